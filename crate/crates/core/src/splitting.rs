//! Coefficients of the splitting function exp(pi (t - t^p)) = sum_i pi^i l_i t^i, where
//! pi^(p-1) = -p and each l_i is a p-adic rational.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::padic::{Modulus, RingElement, ScaledElement};

#[derive(Debug)]
pub struct SplittingSeries {
    pub p: u64,
    pub n_work: u32,
    /// Exact values of l_i.
    pub exact: Vec<BigRational>,
    /// l_i as p^(-e) * numer with numer known to relative precision N_work.
    pub ell: Vec<ScaledElement>,
    /// ord_p(l_i).
    pub valuation: Vec<i64>,
    /// l_i / p^ord_p(l_i) modulo p^N_work.
    pub unit: Vec<u64>,
}

/// Number of coefficients needed so that the truncation is exact modulo p^N.
pub fn i_max(p: u64, n: u32) -> usize {
    let num = n as u64 * p * p;
    num.div_ceil(p - 1) as usize
}

/// The denominator bound d(p, i) = floor(i (2p - 1) / (p^2 (p - 1))).
pub fn denominator_bound(p: u64, i: usize) -> u32 {
    ((i as u64 * (2 * p - 1)) / (p * p * (p - 1))) as u32
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, x| acc * BigInt::from(x))
}

fn p_valuation(x: &BigInt, p: &BigInt) -> (i64, BigInt) {
    let mut v = 0;
    let mut y = x.clone();
    while !y.is_zero() && y.is_multiple_of(p) {
        y /= p;
        v += 1;
    }
    (v, y)
}

/// l_i for i < len by multiplying the series exp(pi t) and exp(-pi t^p) with pi kept
/// symbolic, then rewriting pi^(e - i) = (-p)^((e - i)/(p - 1)).
pub fn exact_coefficients(p: u64, len: usize) -> Result<Vec<BigRational>> {
    if p == 2 {
        return Err(Error::UnsupportedCharacteristic(p));
    }
    let pu = p as usize;
    let facts: Vec<BigInt> = (0..len).map(factorial).collect();
    let mut out = Vec::with_capacity(len);
    let minus_p = BigRational::from_integer(BigInt::from(-(p as i64)));
    for i in 0..len {
        // pi-exponent -> rational coefficient of t^i
        let mut terms: BTreeMap<usize, BigRational> = BTreeMap::new();
        for j in 0..=i / pu {
            let k = i - pu * j;
            let sign = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            let c = BigRational::new(sign, &facts[k] * &facts[j]);
            *terms.entry(k + j).or_insert_with(BigRational::zero) += c;
        }
        let mut ell = BigRational::zero();
        for (e, c) in terms {
            if (i - e) % (pu - 1) != 0 {
                return Err(Error::PrecisionOrLogicError(format!(
                    "pi-exponent {e} not congruent to {i} modulo p - 1"
                )));
            }
            let j = ((i - e) / (pu - 1)) as i32;
            ell += c / minus_p.pow(j);
        }
        out.push(ell);
    }
    Ok(out)
}

fn build(p: u64, n_work: u32, len: usize) -> Result<SplittingSeries> {
    let exact = exact_coefficients(p, len)?;
    let pb = BigInt::from(p);
    let pn = p.checked_pow(n_work).filter(|&m| m < (1 << 63)).ok_or(Error::PrecisionTooLarge { exp: n_work })?;
    let m = Modulus::new(pn);
    let pn_big = BigInt::from(pn);
    let mut ell = Vec::with_capacity(len);
    let mut valuation = Vec::with_capacity(len);
    let mut unit = Vec::with_capacity(len);
    for (i, x) in exact.iter().enumerate() {
        let (vn, un) = p_valuation(x.numer(), &pb);
        let (vd, ud) = p_valuation(x.denom(), &pb);
        let v = vn - vd;
        let un = un.mod_floor(&pn_big).to_u64().expect("reduced");
        let ud = ud.mod_floor(&pn_big).to_u64().expect("reduced");
        let u = m.mul(un, m.inv_unit(ud, p));
        if -v > denominator_bound(p, i) as i64 {
            return Err(Error::PrecisionOrLogicError(format!("denominator of l_{i} exceeds its bound")));
        }
        let numer = if v >= 0 {
            if v >= n_work as i64 {
                0
            } else {
                m.mul(u, p.pow(v as u32))
            }
        } else {
            u
        };
        let mut coeffs = smallvec::SmallVec::new();
        coeffs.push(numer);
        ell.push(ScaledElement { denom_exp: (-v).max(0) as u32, numer: RingElement(coeffs) });
        valuation.push(v);
        unit.push(u);
    }
    Ok(SplittingSeries { p, n_work, exact, ell, valuation, unit })
}

type Cache = Mutex<HashMap<(u64, u32, usize), Arc<SplittingSeries>>>;

/// The first `len` coefficients l_i at working precision `n_work`, memoized per (p, n_work, len).
pub fn compute_splitting(p: u64, n_work: u32, len: usize) -> Result<Arc<SplittingSeries>> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().expect("cache lock").get(&(p, n_work, len)) {
        return Ok(s.clone());
    }
    let s = Arc::new(build(p, n_work, len)?);
    cache.lock().expect("cache lock").insert((p, n_work, len), s.clone());
    Ok(s)
}

/// Series with the default length for precision N.
pub fn compute_splitting_default(p: u64, n_work: u32) -> Result<Arc<SplittingSeries>> {
    compute_splitting(p, n_work, i_max(p, n_work))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Closed form: l_i = sum_j 1 / (p^j j! (i - p j)!).
    fn closed_form(p: u64, i: usize) -> BigRational {
        let pu = p as usize;
        (0..=i / pu)
            .map(|j| BigRational::new(BigInt::one(), BigInt::from(p).pow(j as u32) * factorial(j) * factorial(i - pu * j)))
            .sum()
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn first_coefficients() {
        let l = exact_coefficients(3, 6).unwrap();
        assert_eq!(l[0], rat(1, 1));
        assert_eq!(l[1], rat(1, 1));
        assert_eq!(l[2], rat(1, 2));
        assert_eq!(l[3], rat(1, 2));
        let l = exact_coefficients(5, 3).unwrap();
        assert_eq!(l[1], rat(1, 1));
    }

    #[test]
    fn p2_rejected() {
        assert_eq!(exact_coefficients(2, 4).unwrap_err(), Error::UnsupportedCharacteristic(2));
    }

    #[test]
    fn matches_closed_form() {
        for p in [3u64, 5, 7, 11, 13] {
            let l = exact_coefficients(p, 80).unwrap();
            for (i, x) in l.iter().enumerate() {
                assert_eq!(*x, closed_form(p, i), "p={p} i={i}");
            }
        }
    }

    #[test]
    fn denominators_and_lambda_valuations_bounded() {
        for p in [3u64, 5, 7] {
            let s = compute_splitting(p, 6, 200).unwrap();
            for i in 0..200 {
                assert!(s.ell[i].denom_exp <= denominator_bound(p, i));
                // ord(lambda_i) = ord(l_i) + i/(p-1) >= i (p-1)/p^2, compared over a common denominator
                let lhs = (s.valuation[i] * (p as i64 - 1) + i as i64) * (p * p) as i64;
                let rhs = (i as i64) * ((p - 1) * (p - 1)) as i64;
                assert!(lhs >= rhs, "p={p} i={i}");
            }
        }
    }

    #[test]
    fn cache_is_identical() {
        let a = compute_splitting(5, 4, 30).unwrap();
        let b = compute_splitting(5, 4, 30).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        let c = build(5, 4, 30).unwrap();
        assert_eq!(a.ell, c.ell);
    }

    #[test]
    fn i_max_values() {
        assert_eq!(i_max(3, 2), 9);
        assert_eq!(i_max(13, 3), 43);
    }

    proptest! {
        #[test]
        fn unit_parts_reconstruct_value(p in prop::sample::select(vec![3u64, 5, 7]), i in 0usize..60) {
            let s = compute_splitting(p, 5, 60).unwrap();
            let pn = BigInt::from(p.pow(5));
            // l_i / p^v has numerator congruent to unit * denominator
            let pv = BigRational::from_integer(BigInt::from(p)).pow(-s.valuation[i] as i32);
            let y = &s.exact[i] * pv;
            let back = (BigInt::from(s.unit[i]) * y.denom()).mod_floor(&pn);
            prop_assert_eq!(back, y.numer().mod_floor(&pn));
        }
    }
}
