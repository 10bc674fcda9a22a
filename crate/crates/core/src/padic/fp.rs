//! Dense polynomials over a small prime field F_p, coefficients stored low degree first.

pub type FpPoly = Vec<u64>;

pub fn trim(f: &mut FpPoly) {
    while f.last() == Some(&0) {
        f.pop();
    }
}

pub fn degree(f: &[u64]) -> Option<usize> {
    f.iter().rposition(|&c| c != 0)
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

pub fn mul(f: &[u64], g: &[u64], p: u64) -> FpPoly {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = (out[i + j] + a * b) % p;
        }
    }
    trim(&mut out);
    out
}

pub fn sub(f: &[u64], g: &[u64], p: u64) -> FpPoly {
    let mut out = vec![0u64; f.len().max(g.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let a = f.get(i).copied().unwrap_or(0);
        let b = g.get(i).copied().unwrap_or(0);
        *o = (a + p - b) % p;
    }
    trim(&mut out);
    out
}

/// Remainder of `f` modulo a nonzero `m`.
pub fn rem(f: &[u64], m: &[u64], p: u64) -> FpPoly {
    let dm = degree(m).expect("division by zero polynomial");
    let lead_inv = inv_mod(m[dm], p);
    let mut r: FpPoly = f.to_vec();
    trim(&mut r);
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let c = r[dr] * lead_inv % p;
        let shift = dr - dm;
        for (j, &mj) in m.iter().enumerate().take(dm + 1) {
            r[shift + j] = (r[shift + j] + p - c * mj % p) % p;
        }
        trim(&mut r);
    }
    r
}

pub fn gcd(f: &[u64], g: &[u64], p: u64) -> FpPoly {
    let mut a: FpPoly = f.to_vec();
    let mut b: FpPoly = g.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(d) = degree(&a) {
        let li = inv_mod(a[d], p);
        for c in a.iter_mut() {
            *c = *c * li % p;
        }
    }
    a
}

pub fn mulmod(f: &[u64], g: &[u64], m: &[u64], p: u64) -> FpPoly {
    rem(&mul(f, g, p), m, p)
}

/// `base^e mod m` with the exponent given as little-endian u64 limbs.
pub fn powmod_limbs(base: &[u64], e: &[u64], m: &[u64], p: u64) -> FpPoly {
    let mut result = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    for &limb in e {
        let mut l = limb;
        for _ in 0..64 {
            if l & 1 == 1 {
                result = mulmod(&result, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            l >>= 1;
        }
    }
    result
}

pub fn powmod(base: &[u64], e: u128, m: &[u64], p: u64) -> FpPoly {
    powmod_limbs(base, &[e as u64, (e >> 64) as u64], m, p)
}

pub fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Rabin's irreducibility test.
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = match degree(f) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    let x: FpPoly = vec![0, 1];
    let q = p as u128;
    let pow_q = |k: usize| -> FpPoly {
        let mut r = rem(&x, f, p);
        for _ in 0..k {
            r = powmod(&r, q, f, p);
        }
        r
    };
    if !sub(&pow_q(n), &rem(&x, f, p), p).is_empty() {
        return false;
    }
    for r in prime_factors(n as u128) {
        let k = n / r as usize;
        let g = gcd(f, &sub(&pow_q(k), &x, p), p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Whether `x` generates the multiplicative group of F_p[x]/(f); `f` must be irreducible.
pub fn is_primitive(f: &[u64], p: u64) -> bool {
    let n = degree(f).unwrap_or(0);
    let order = (p as u128).pow(n as u32) - 1;
    let x: FpPoly = vec![0, 1];
    if f.len() == 2 && rem(&x, f, p).is_empty() {
        return false;
    }
    prime_factors(order)
        .into_iter()
        .all(|r| powmod(&x, order / r, f, p) != vec![1])
}

/// The first monic irreducible polynomial of the given degree in lexicographic order
/// of its coefficient vector (constant term first).
pub fn smallest_irreducible(p: u64, deg: usize) -> FpPoly {
    let mut coeffs = vec![0u64; deg];
    loop {
        let mut f = coeffs.clone();
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
        let mut i = 0;
        loop {
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
            assert!(i < deg, "no irreducible polynomial found");
        }
    }
}

/// The Conway polynomial when it is tabulated or a = 1 (x - g for the least primitive root g),
/// otherwise the first primitive polynomial in the order of `smallest_irreducible`.
pub fn default_field_polynomial(p: u64, a: usize) -> FpPoly {
    if let Some(f) = conway_polynomial(p, a) {
        return f;
    }
    if a == 1 {
        let g = (1..p).find(|&g| is_primitive(&[p - g, 1], p)).expect("F_p^* is cyclic");
        return vec![p - g, 1];
    }
    let mut coeffs = vec![0u64; a];
    loop {
        let mut f = coeffs.clone();
        f.push(1);
        if is_irreducible(&f, p) && is_primitive(&f, p) {
            return f;
        }
        let mut i = 0;
        loop {
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
            assert!(i < a, "no primitive polynomial found");
        }
    }
}

/// Conway polynomials for small fields, monic, constant term first.
pub fn conway_polynomial(p: u64, a: usize) -> Option<FpPoly> {
    let table: &[(u64, usize, &[u64])] = &[
        (3, 1, &[1, 1]),
        (3, 2, &[2, 2, 1]),
        (3, 3, &[1, 2, 0, 1]),
        (3, 4, &[2, 0, 0, 2, 1]),
        (5, 1, &[3, 1]),
        (5, 2, &[2, 4, 1]),
        (5, 3, &[3, 3, 0, 1]),
        (5, 4, &[2, 4, 4, 0, 1]),
        (7, 1, &[4, 1]),
        (7, 2, &[3, 6, 1]),
        (7, 3, &[4, 0, 6, 1]),
        (7, 4, &[3, 4, 5, 0, 1]),
        (11, 1, &[9, 1]),
        (11, 2, &[2, 7, 1]),
        (11, 3, &[9, 2, 0, 1]),
        (11, 4, &[2, 10, 8, 0, 1]),
        (13, 1, &[11, 1]),
        (13, 2, &[2, 12, 1]),
        (13, 3, &[11, 2, 0, 1]),
        (13, 4, &[2, 12, 3, 0, 1]),
        (17, 1, &[14, 1]),
        (19, 1, &[17, 1]),
        (23, 1, &[18, 1]),
    ];
    table
        .iter()
        .find(|(tp, ta, _)| *tp == p && *ta == a)
        .map(|(_, _, f)| f.to_vec())
}
