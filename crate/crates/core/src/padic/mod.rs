//! Arithmetic in Z_q / p^N, modelled as (Z / p^N)[t] / (h) where h is the lift of the
//! defining polynomial of F_q whose roots are Teichmuller representatives, so that the
//! Frobenius automorphism acts by t -> t^p.

pub mod fp;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::fmt;

use crate::error::{Error, Result};

/// Montgomery multiplication modulo an odd modulus below 2^63.
#[derive(Clone, Debug)]
pub struct Modulus {
    m: u64,
    minv: u64,
    r2: u64,
}

impl Modulus {
    pub fn new(m: u64) -> Self {
        assert!(m % 2 == 1 && m < (1 << 63), "modulus must be odd and below 2^63");
        let mut inv: u64 = m;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(m.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % m as u128) as u64;
        let r2 = ((r as u128 * r as u128) % m as u128) as u64;
        Modulus { m, minv: inv.wrapping_neg(), r2 }
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.m
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let q = (t as u64).wrapping_mul(self.minv);
        let s = t + q as u128 * self.m as u128;
        let r = (s >> 64) as u64;
        if r >= self.m {
            r - self.m
        } else {
            r
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let x = self.redc(a as u128 * b as u128);
        self.redc(x as u128 * self.r2 as u128)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    pub fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.m;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// Reduces a signed integer.
    pub fn from_i64(&self, x: i64) -> u64 {
        let r = x.rem_euclid(self.m as i64);
        r as u64
    }

    /// Reduces a signed 128-bit integer.
    pub fn from_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.m as i128) as u64
    }

    /// Inverse of a residue prime to p, where the modulus is a power of p.
    pub fn inv_unit(&self, x: u64, p: u64) -> u64 {
        let mut y = fp::inv_mod(x % p, p);
        let mut prec = p as u128;
        while prec < self.m as u128 {
            // y <- y (2 - x y)
            let t = self.sub(2 % self.m, self.mul(x, y));
            y = self.mul(y, t);
            prec *= prec;
        }
        y
    }
}

/// p-adic valuation of a residue modulo p^prec; zero has valuation `prec`.
pub fn valuation_u64(x: u64, p: u64, prec: u32) -> u32 {
    if x == 0 {
        return prec;
    }
    let mut v = 0;
    let mut y = x;
    while y.is_multiple_of(p) && v < prec {
        y /= p;
        v += 1;
    }
    v
}

/// The centred representative of a residue modulo m.
pub fn centered(x: u64, m: u64) -> i128 {
    if x > m / 2 {
        x as i128 - m as i128
    } else {
        x as i128
    }
}

/// Parameters of the finite field F_q, q = p^a, and the working p-adic precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub a: usize,
    /// Monic irreducible defining polynomial of F_q over F_p, constant term first.
    pub hbar: Vec<u64>,
    pub precision: u32,
}

impl FieldSpec {
    /// Validates and builds a field description. `field_poly = None` selects
    /// `fp::default_field_polynomial`.
    pub fn new(p: u64, a: usize, field_poly: Option<Vec<u64>>, precision: u32) -> Result<Self> {
        if p == 2 {
            return Err(Error::UnsupportedCharacteristic(p));
        }
        if !fp::is_prime(p) {
            return Err(Error::InvalidFieldSpec(format!("{p} is not prime")));
        }
        if p >= (1 << 31) {
            return Err(Error::InvalidFieldSpec(format!("prime {p} too large")));
        }
        if a == 0 {
            return Err(Error::InvalidFieldSpec("extension degree must be positive".into()));
        }
        let hbar = match field_poly {
            None => fp::default_field_polynomial(p, a),
            Some(mut f) => {
                for c in f.iter_mut() {
                    *c %= p;
                }
                fp::trim(&mut f);
                if fp::degree(&f) != Some(a) || f[a] != 1 {
                    return Err(Error::InvalidFieldSpec(format!(
                        "field polynomial must be monic of degree {a}"
                    )));
                }
                if !fp::is_irreducible(&f, p) {
                    return Err(Error::InvalidFieldSpec("field polynomial is reducible".into()));
                }
                f
            }
        };
        if precision == 0 {
            return Err(Error::InvalidFieldSpec("precision must be positive".into()));
        }
        Ok(FieldSpec { p, a, hbar, precision })
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.a as u32)
    }
}

/// An element of Z_q / p^N as its coefficient vector in the basis 1, t, ..., t^(a-1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RingElement(pub SmallVec<[u64; 4]>);

impl RingElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// A p-adic number with bounded denominator: `numer / p^denom_exp`, with `numer`
/// significant modulo p^(N + denom_exp).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaledElement {
    pub denom_exp: u32,
    pub numer: RingElement,
}

impl ScaledElement {
    /// Removes common factors of p between numerator and denominator.
    pub fn normalize(&mut self, p: u64) {
        while self.denom_exp > 0 && !self.numer.is_zero() && self.numer.0.iter().all(|c| c % p == 0) {
            for c in self.numer.0.iter_mut() {
                *c /= p;
            }
            self.denom_exp -= 1;
        }
    }

    /// Valuation, given the precision `prec` of the numerator.
    pub fn valuation(&self, p: u64, prec: u32) -> i64 {
        let v = self
            .numer
            .0
            .iter()
            .map(|&c| valuation_u64(c, p, prec))
            .min()
            .unwrap_or(prec);
        v as i64 - self.denom_exp as i64
    }
}

/// Z_q / p^N together with its Frobenius automorphism.
#[derive(Clone, Debug)]
pub struct RingContext {
    p: u64,
    a: usize,
    precision: u32,
    modulus: Modulus,
    hbar: Vec<u64>,
    /// Monic lift of `hbar` dividing x^q - x, constant term first, length a + 1.
    h: Vec<u64>,
    sigma: Vec<RingElement>,
    sigma_inv: Vec<RingElement>,
}

fn checked_pow(p: u64, n: u32) -> Result<u64> {
    let mut r: u64 = 1;
    for _ in 0..n {
        r = r
            .checked_mul(p)
            .filter(|&x| x < (1 << 63))
            .ok_or(Error::PrecisionTooLarge { exp: n })?;
    }
    Ok(r)
}

impl RingContext {
    pub fn new(field: &FieldSpec) -> Result<Self> {
        Self::with_precision(field, field.precision)
    }

    pub fn with_precision(field: &FieldSpec, precision: u32) -> Result<Self> {
        let pn = checked_pow(field.p, precision)?;
        let modulus = Modulus::new(pn);
        let a = field.a;
        let one = {
            let mut v = SmallVec::from_elem(0, a);
            v[0] = 1 % pn;
            RingElement(v)
        };
        let mut raw = RingContext {
            p: field.p,
            a,
            precision,
            modulus,
            hbar: field.hbar.clone(),
            h: field.hbar.clone(),
            sigma: Vec::new(),
            sigma_inv: Vec::new(),
        };
        if a > 1 {
            // The Teichmuller lift of t in any model of the ring is a root of the lifted h.
            let mut t = raw.zero();
            t.0[1] = 1;
            let tau = raw.teichmuller(&t);
            let mut conj = tau.clone();
            // h(X) = prod_i (X - tau^(p^i)), coefficients in the model, constant first.
            let mut hpoly: Vec<RingElement> = vec![one.clone()];
            for _ in 0..a {
                let mut next = vec![raw.zero(); hpoly.len() + 1];
                for (k, c) in hpoly.iter().enumerate() {
                    next[k + 1] = raw.add(&next[k + 1], c);
                    let prod = raw.mul(c, &conj);
                    next[k] = raw.sub(&next[k], &prod);
                }
                hpoly = next;
                conj = raw.pow(&conj, field.p as u128);
            }
            let mut h = Vec::with_capacity(a + 1);
            for c in &hpoly {
                if c.0[1..].iter().any(|&x| x != 0) {
                    return Err(Error::PrecisionOrLogicError(
                        "lifted defining polynomial has non-rational coefficients".into(),
                    ));
                }
                h.push(c.0[0]);
            }
            raw.h = h;
        } else {
            let root = raw.teichmuller(&raw.from_int(-(field.hbar[0] as i64)));
            raw.h = vec![raw.modulus.neg(root.0[0]), 1];
        }
        // sigma(t^i) = t^(p i), sigma^{-1}(t^i) = t^(i p^(a-1)).
        let mut sigma = vec![one.clone()];
        let mut sigma_inv = vec![one.clone()];
        if a > 1 {
            let mut t = raw.zero();
            t.0[1] = 1;
            let tp = raw.pow(&t, field.p as u128);
            let tpinv = raw.pow(&t, (field.p as u128).pow(a as u32 - 1));
            for i in 1..a {
                let s = raw.mul(&sigma[i - 1], &tp);
                let si = raw.mul(&sigma_inv[i - 1], &tpinv);
                sigma.push(s);
                sigma_inv.push(si);
            }
        }
        raw.sigma = sigma;
        raw.sigma_inv = sigma_inv;
        Ok(raw)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.a as u32)
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// p^N.
    pub fn pn(&self) -> u64 {
        self.modulus.value()
    }

    pub fn defining_poly(&self) -> &[u64] {
        &self.h
    }

    pub fn residue_poly(&self) -> &[u64] {
        &self.hbar
    }

    pub fn zero(&self) -> RingElement {
        RingElement(SmallVec::from_elem(0, self.a))
    }

    pub fn one(&self) -> RingElement {
        self.from_int(1)
    }

    pub fn from_int(&self, x: i64) -> RingElement {
        let mut e = self.zero();
        e.0[0] = self.modulus.from_i64(x);
        e
    }

    pub fn from_u64(&self, x: u64) -> RingElement {
        let mut e = self.zero();
        e.0[0] = x % self.pn();
        e
    }

    /// Builds an element from coefficients in the power basis of t, reducing them.
    pub fn from_coeffs(&self, coeffs: &[i64]) -> Result<RingElement> {
        if coeffs.len() > self.a {
            return Err(Error::InvalidInput(format!(
                "coefficient vector of length {} exceeds extension degree {}",
                coeffs.len(),
                self.a
            )));
        }
        let mut e = self.zero();
        for (i, &c) in coeffs.iter().enumerate() {
            e.0[i] = self.modulus.from_i64(c);
        }
        Ok(e)
    }

    pub fn is_zero(&self, x: &RingElement) -> bool {
        x.is_zero()
    }

    pub fn add(&self, x: &RingElement, y: &RingElement) -> RingElement {
        let m = &self.modulus;
        RingElement(x.0.iter().zip(y.0.iter()).map(|(&a, &b)| m.add(a, b)).collect())
    }

    pub fn add_assign(&self, x: &mut RingElement, y: &RingElement) {
        for (a, &b) in x.0.iter_mut().zip(y.0.iter()) {
            *a = self.modulus.add(*a, b);
        }
    }

    pub fn sub(&self, x: &RingElement, y: &RingElement) -> RingElement {
        let m = &self.modulus;
        RingElement(x.0.iter().zip(y.0.iter()).map(|(&a, &b)| m.sub(a, b)).collect())
    }

    pub fn neg(&self, x: &RingElement) -> RingElement {
        RingElement(x.0.iter().map(|&a| self.modulus.neg(a)).collect())
    }

    pub fn scale(&self, x: &RingElement, c: u64) -> RingElement {
        RingElement(x.0.iter().map(|&a| self.modulus.mul(a, c)).collect())
    }

    /// x += y * c for a scalar residue c.
    pub fn add_scaled_assign(&self, x: &mut RingElement, y: &RingElement, c: u64) {
        for (a, &b) in x.0.iter_mut().zip(y.0.iter()) {
            *a = self.modulus.add(*a, self.modulus.mul(b, c));
        }
    }

    pub fn mul(&self, x: &RingElement, y: &RingElement) -> RingElement {
        let m = &self.modulus;
        if self.a == 1 {
            let mut v = SmallVec::new();
            v.push(m.mul(x.0[0], y.0[0]));
            return RingElement(v);
        }
        let a = self.a;
        let mut prod: SmallVec<[u64; 8]> = SmallVec::from_elem(0, 2 * a - 1);
        for (i, &xi) in x.0.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.0.iter().enumerate() {
                prod[i + j] = m.add(prod[i + j], m.mul(xi, yj));
            }
        }
        for k in (a..2 * a - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for j in 0..a {
                let sub = m.mul(c, self.h[j]);
                prod[k - a + j] = m.sub(prod[k - a + j], sub);
            }
        }
        RingElement(prod[..a].iter().copied().collect())
    }

    /// x += y * z.
    pub fn mul_add_assign(&self, x: &mut RingElement, y: &RingElement, z: &RingElement) {
        if self.a == 1 {
            let m = &self.modulus;
            x.0[0] = m.add(x.0[0], m.mul(y.0[0], z.0[0]));
            return;
        }
        let prod = self.mul(y, z);
        self.add_assign(x, &prod);
    }

    pub fn pow(&self, x: &RingElement, mut e: u128) -> RingElement {
        let mut result = self.one();
        let mut b = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        result
    }

    /// Reduction modulo p as an element of F_q (coefficients in F_p).
    pub fn reduce_mod_p(&self, x: &RingElement) -> Vec<u64> {
        x.0.iter().map(|&c| c % self.p).collect()
    }

    pub fn is_unit(&self, x: &RingElement) -> bool {
        x.0.iter().any(|&c| c % self.p != 0)
    }

    /// Valuation of x (the minimum over its coefficients); zero has valuation N.
    pub fn valuation(&self, x: &RingElement) -> u32 {
        x.0.iter()
            .map(|&c| valuation_u64(c, self.p, self.precision))
            .min()
            .unwrap_or(self.precision)
    }

    /// Multiplicative inverse of a unit.
    pub fn inv(&self, x: &RingElement) -> Result<RingElement> {
        if !self.is_unit(x) {
            return Err(Error::PrecisionOrLogicError("inverse of a non-unit".into()));
        }
        let q = self.q() as u128;
        // y0 inverts x modulo p; Newton then doubles the precision each step.
        let mut y = self.pow(x, q - 2);
        let two = self.from_int(2);
        let mut prec = 1u32;
        while prec < self.precision {
            let xy = self.mul(x, &y);
            y = self.mul(&y, &self.sub(&two, &xy));
            prec *= 2;
        }
        Ok(y)
    }

    /// Division by p^k of an element divisible by it; the result is defined modulo p^(N-k).
    pub fn div_p_pow(&self, x: &RingElement, k: u32) -> Result<RingElement> {
        let pk = self.p.pow(k);
        if x.0.iter().any(|&c| c % pk != 0) {
            return Err(Error::PrecisionOrLogicError(format!("element not divisible by p^{k}")));
        }
        Ok(RingElement(x.0.iter().map(|&c| c / pk).collect()))
    }

    pub fn mul_p_pow(&self, x: &RingElement, k: u32) -> RingElement {
        if k >= self.precision {
            return self.zero();
        }
        self.scale(x, self.p.pow(k))
    }

    fn apply_matrix(&self, x: &RingElement, images: &[RingElement]) -> RingElement {
        let mut out = self.zero();
        for (i, &c) in x.0.iter().enumerate() {
            if c != 0 {
                self.add_scaled_assign(&mut out, &images[i], c);
            }
        }
        out
    }

    /// The Frobenius automorphism.
    pub fn sigma(&self, x: &RingElement) -> RingElement {
        if self.a == 1 {
            return x.clone();
        }
        self.apply_matrix(x, &self.sigma)
    }

    pub fn sigma_inv(&self, x: &RingElement) -> RingElement {
        if self.a == 1 {
            return x.clone();
        }
        self.apply_matrix(x, &self.sigma_inv)
    }

    /// sigma^k for any integer k.
    pub fn sigma_pow(&self, x: &RingElement, k: i64) -> RingElement {
        let k = k.rem_euclid(self.a as i64);
        let mut y = x.clone();
        for _ in 0..k {
            y = self.sigma(&y);
        }
        y
    }

    /// The Teichmuller representative congruent to x modulo p.
    pub fn teichmuller(&self, x: &RingElement) -> RingElement {
        let q = self.q() as u128;
        let qe = self.from_u64(self.q());
        let one = self.one();
        let mut y = x.clone();
        // Newton iteration on X^q - X, whose derivative q X^(q-1) - 1 is a unit.
        for _ in 0..64 {
            let yq1 = self.pow(&y, q - 1);
            let yq = self.mul(&yq1, &y);
            let f = self.sub(&yq, &y);
            if f.is_zero() {
                break;
            }
            let df = self.sub(&self.mul(&qe, &yq1), &one);
            let step = self.mul(&f, &self.inv(&df).expect("derivative is a unit"));
            y = self.sub(&y, &step);
        }
        y
    }

    /// Teichmuller lift of an element of F_q given by its F_p coordinates.
    pub fn teichmuller_of_residue(&self, residue: &[u64]) -> Result<RingElement> {
        let coeffs: Vec<i64> = residue.iter().map(|&c| (c % self.p) as i64).collect();
        Ok(self.teichmuller(&self.from_coeffs(&coeffs)?))
    }

    /// Reinterprets an element at a lower precision.
    pub fn truncate_to(&self, x: &RingElement, other: &RingContext) -> RingElement {
        RingElement(x.0.iter().map(|&c| c % other.pn()).collect())
    }

    /// If x lies in Z_p / p^N, its value.
    pub fn as_scalar(&self, x: &RingElement) -> Option<u64> {
        if x.0[1..].iter().all(|&c| c == 0) {
            Some(x.0[0])
        } else {
            None
        }
    }
}
