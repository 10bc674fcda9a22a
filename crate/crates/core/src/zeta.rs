//! Precision bounds, the characteristic polynomial of Frobenius, integer lifting and the
//! assembly of the zeta function in each mode.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cone::Mode;
use crate::error::{Error, Result};
use crate::padic::{centered, RingContext, RingElement};

fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// The index j with max_i binom(v, i) x^i attained at i = ceil(v/2) + j, for x = q^(n/2) >= 1.
pub fn max_binomial_offset(v: u64, q: u64, n: u32) -> u64 {
    let hi = v.div_ceil(2);
    let lo = v / 2;
    let xsq = BigInt::from(q).pow(n);
    // x >= (hi + j + 1)/(lo - j) moves the maximum past hi + j
    let mut j = 0;
    while j < lo {
        let a = BigInt::from(hi + j + 1);
        let b = BigInt::from(lo - j);
        if &xsq * &b * &b >= &a * &a {
            j += 1;
        } else {
            break;
        }
    }
    j
}

/// Smallest N with p^N >= 2 binom(v, i) q^(n i / 2), i = ceil(v/2) + j.
pub fn precision_bound(v: u64, n: u32, q: u64, p: u64) -> u32 {
    let i = v.div_ceil(2) + max_binomial_offset(v, q, n);
    // compare squares: p^(2N) >= 4 binom^2 q^(n i)
    let rhs = BigInt::from(4) * binom(v, i).pow(2) * BigInt::from(q).pow(n * i as u32);
    smallest_power(p, &rhs)
}

/// Smallest N with p^N >= 2^(v+1) q^(n v / 2).
pub fn crude_precision_bound(v: u64, n: u32, q: u64, p: u64) -> u32 {
    let rhs = BigInt::from(4).pow(v as u32 + 1) * BigInt::from(q).pow(n * v as u32);
    smallest_power(p, &rhs)
}

fn smallest_power(p: u64, rhs_sq: &BigInt) -> u32 {
    let p2 = BigInt::from(p).pow(2);
    let mut lhs = BigInt::one();
    let mut n = 0;
    while &lhs < rhs_sq {
        lhs *= &p2;
        n += 1;
    }
    n.max(1)
}

pub type Matrix = Vec<Vec<RingElement>>;

pub fn mat_mul(ctx: &RingContext, x: &Matrix, y: &Matrix) -> Matrix {
    let m = x.len();
    let k = y.len();
    let c = if k == 0 { 0 } else { y[0].len() };
    let mut out = vec![vec![ctx.zero(); c]; m];
    for i in 0..m {
        for l in 0..k {
            if x[i][l].is_zero() {
                continue;
            }
            for j in 0..c {
                ctx.mul_add_assign(&mut out[i][j], &x[i][l], &y[l][j]);
            }
        }
    }
    out
}

fn map_matrix(x: &Matrix, f: impl Fn(&RingElement) -> RingElement) -> Matrix {
    x.iter().map(|r| r.iter().map(&f).collect()).collect()
}

/// A_a = A A^(sigma^-1) ... A^(sigma^-(a-1)).
pub fn twisted_product(ctx: &RingContext, a: &Matrix) -> Matrix {
    let mut out = a.clone();
    let mut twisted = a.clone();
    for _ in 1..ctx.a() {
        twisted = map_matrix(&twisted, |x| ctx.sigma_inv(x));
        out = mat_mul(ctx, &out, &twisted);
    }
    out
}

/// The same product folded from the right.
pub fn twisted_product_right(ctx: &RingContext, a: &Matrix) -> Matrix {
    let k = ctx.a();
    let mut out = map_matrix(a, |x| ctx.sigma_pow(x, -(k as i64 - 1)));
    for i in (0..k - 1).rev() {
        let t = map_matrix(a, |x| ctx.sigma_pow(x, -(i as i64)));
        out = mat_mul(ctx, &t, &out);
    }
    out
}

/// Coefficients [1, c_1, ..., c_m] of det(x I - M) by Berkowitz's division-free algorithm.
pub fn charpoly(ctx: &RingContext, m: &Matrix) -> Vec<RingElement> {
    let n = m.len();
    let mut vect = vec![ctx.one()];
    for r in 0..n {
        // Toeplitz column: 1, -m_rr, -R C, -R A C, ..., -R A^(r-1) C
        let mut col = vec![ctx.one(), ctx.neg(&m[r][r])];
        let mut cvec: Vec<RingElement> = (0..r).map(|i| m[i][r].clone()).collect();
        for _ in 0..r {
            let mut dot = ctx.zero();
            for (j, c) in cvec.iter().enumerate() {
                ctx.mul_add_assign(&mut dot, &m[r][j], c);
            }
            col.push(ctx.neg(&dot));
            let mut next = vec![ctx.zero(); r];
            for (i, slot) in next.iter_mut().enumerate() {
                for (j, c) in cvec.iter().enumerate() {
                    ctx.mul_add_assign(slot, &m[i][j], c);
                }
            }
            cvec = next;
        }
        let mut nv = vec![ctx.zero(); r + 2];
        for (i, slot) in nv.iter_mut().enumerate() {
            for (j, v) in vect.iter().enumerate() {
                if i >= j {
                    ctx.mul_add_assign(slot, &col[i - j], v);
                }
            }
        }
        vect = nv;
    }
    vect
}

/// The Frobenius matrix on the monomial basis (columns are images of basis elements).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrobeniusMatrix {
    pub mode: Mode,
    pub entries: Matrix,
}

/// Z(V, T) as a quotient of integer polynomials (constant term first).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaFunction {
    pub numerator: Vec<i128>,
    pub denominator: Vec<i128>,
    /// The factor det(1 - T q^(-1) A_a) (toric mode: on the complement of the unit block).
    pub l_polynomial: Vec<i128>,
    pub point_counts: Vec<i128>,
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Power sums s_r of the inverse roots of 1 + c_1 T + ... for r = 1..=count.
pub fn power_sums(poly: &[BigInt], count: usize) -> Vec<BigInt> {
    let c = |i: usize| poly.get(i).cloned().unwrap_or_else(BigInt::zero);
    let mut s: Vec<BigInt> = Vec::with_capacity(count);
    for r in 1..=count {
        let mut v = -BigInt::from(r) * c(r);
        for i in 1..r {
            v -= c(i) * &s[r - i - 1];
        }
        s.push(v);
    }
    s
}

/// #V(F_(q^r)) for r = 1..=count from Z = numerator / denominator.
pub fn point_counts(num: &[BigInt], den: &[BigInt], count: usize) -> Vec<BigInt> {
    let sn = power_sums(num, count);
    let sd = power_sums(den, count);
    sd.iter().zip(&sn).map(|(a, b)| a - b).collect()
}

fn to_i128(v: &[BigInt]) -> Result<Vec<i128>> {
    v.iter()
        .map(|x| x.to_i128().ok_or_else(|| Error::ConsistencyFailure(format!("coefficient {x} exceeds 128 bits"))))
        .collect()
}

/// Lifts det(1 - T M) mod p^prec to integers, rejecting coefficients outside the bound
/// |c_i| <= binom(m, i) q^(i n / 2).
pub fn lift_coefficients(ctx: &RingContext, coeffs: &[RingElement], n: u32) -> Result<Vec<BigInt>> {
    let m = coeffs.len() as u64 - 1;
    let q = BigInt::from(ctx.q());
    let mut out = Vec::with_capacity(coeffs.len());
    for (i, c) in coeffs.iter().enumerate() {
        let x = ctx.as_scalar(c).ok_or_else(|| {
            Error::PrecisionOrLogicError(format!("coefficient {i} of the characteristic polynomial is not Frobenius invariant"))
        })?;
        let v = BigInt::from(centered(x, ctx.pn()));
        let bound_sq = binom(m, i as u64).pow(2) * q.pow(n * i as u32);
        if &v * &v > bound_sq {
            return Err(Error::InsufficientPrecision(format!(
                "lifted coefficient {v} of T^{i} violates the bound; increase the precision"
            )));
        }
        out.push(v);
    }
    Ok(out)
}

/// det(1 - T q^(-1) B_a) with B_a the twisted product, each factor of B divided exactly by p.
/// The result is computed at precision one less than the context.
pub fn scaled_charpoly(ctx: &RingContext, low: &RingContext, b: &Matrix) -> Result<Vec<RingElement>> {
    let mut scaled = Vec::with_capacity(b.len());
    for row in b {
        let mut r = Vec::with_capacity(row.len());
        for x in row {
            let y = ctx.div_p_pow(x, 1).map_err(|_| {
                Error::PrecisionOrLogicError("Frobenius matrix entry not divisible by p".into())
            })?;
            r.push(ctx.truncate_to(&y, low));
        }
        scaled.push(r);
    }
    let prod = twisted_product(low, &scaled);
    let cp = charpoly(low, &prod);
    // det(1 - T M) has the coefficients of det(x I - M) in the same order
    Ok(cp)
}

/// Assembles Z(V, T) from the Frobenius matrix. `count` point counts are derived.
pub fn assemble_zeta(
    ctx: &RingContext,
    low: &RingContext,
    mode: Mode,
    n: usize,
    a: &Matrix,
    count: usize,
) -> Result<ZetaFunction> {
    let block: Matrix = match mode {
        Mode::Toric => {
            if a.is_empty() || a[0][0] != ctx.one() || a[0][1..].iter().any(|x| !x.is_zero()) {
                return Err(Error::PrecisionOrLogicError("the unit row of the Frobenius matrix is not (1, 0, ..., 0)".into()));
            }
            a[1..].iter().map(|r| r[1..].to_vec()).collect()
        }
        Mode::Affine | Mode::Projective => a.clone(),
    };
    let cp = scaled_charpoly(ctx, low, &block)?;
    let l = lift_coefficients(low, &cp, n as u32)?;
    let q = BigInt::from(ctx.q());
    let lin = |k: u32| vec![BigInt::one(), -q.pow(k)];
    let sign_n: i64 = if n.is_multiple_of(2) { 1 } else { -1 };
    // (factor, exponent) pairs with Z = prod factor^exponent
    let mut factors: Vec<(Vec<BigInt>, i64)> = Vec::new();
    match mode {
        Mode::Toric => {
            factors.push((l.clone(), sign_n));
            for i in 1..=n {
                let e = -(binom(n as u64, i as u64).to_i64().expect("small")) * if i % 2 == 0 { 1 } else { -1 };
                factors.push((lin(i as u32 - 1), e * sign_n));
            }
        }
        Mode::Affine => {
            factors.push((l.clone(), sign_n));
            factors.push((lin(n as u32 - 1), -1));
        }
        Mode::Projective => {
            factors.push((l.clone(), -sign_n));
            for i in 0..=(n as u32 - 2) {
                factors.push((lin(i), -1));
            }
        }
    }
    let mut num = vec![BigInt::one()];
    let mut den = vec![BigInt::one()];
    for (f, e) in &factors {
        for _ in 0..e.abs() {
            if *e > 0 {
                num = poly_mul(&num, f);
            } else {
                den = poly_mul(&den, f);
            }
        }
    }
    while num.len() > 1 && num.last().is_some_and(|x| x.is_zero()) {
        num.pop();
    }
    let counts = point_counts(&num, &den, count);
    if counts.iter().any(|c| c.is_negative()) {
        return Err(Error::ConsistencyFailure(format!("negative point count in {counts:?}")));
    }
    let mut l = l;
    while l.len() > 1 && l.last().is_some_and(|x| x.is_zero()) {
        l.pop();
    }
    Ok(ZetaFunction {
        numerator: to_i128(&num)?,
        denominator: to_i128(&den)?,
        l_polynomial: to_i128(&l)?,
        point_counts: to_i128(&counts)?,
    })
}

/// Whether a/b == c/d as rational functions.
pub fn same_rational(a: &[i128], b: &[i128], c: &[i128], d: &[i128]) -> bool {
    let big = |v: &[i128]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
    let mut l = poly_mul(&big(a), &big(d));
    let mut r = poly_mul(&big(c), &big(b));
    let len = l.len().max(r.len());
    l.resize(len, BigInt::zero());
    r.resize(len, BigInt::zero());
    l == r
}
