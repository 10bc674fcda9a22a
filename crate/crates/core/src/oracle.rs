//! Exhaustive point counting over finite fields and zeta functions recovered from counts.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::cone::Mode;
use crate::error::{Error, Result};
use crate::input::FqPolynomial;
use crate::padic::fp::{self, FpPoly};
use crate::padic::FieldSpec;
use crate::polytope::hull_and_triangulate;

pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Sentinel logarithm of zero.
const ZERO: u32 = u32::MAX;

/// F_(q^r) = F_p[t]/(h) with h the lexicographically smallest irreducible polynomial, in
/// the logarithmic representation with respect to a primitive element.
pub struct ExtensionField {
    pub p: u64,
    pub degree: usize,
    pub order: u64,
    modulus: FpPoly,
    /// `exp[i]` is the index of g^i, where index = sum of coefficients times powers of p.
    exp: Vec<u64>,
    log: Vec<u32>,
    /// `zech[k] = log(1 + g^k)`.
    zech: Vec<u32>,
}

fn poly_index(f: &[u64], p: u64) -> u64 {
    f.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn index_poly(mut x: u64, p: u64, deg: usize) -> FpPoly {
    let mut f = Vec::with_capacity(deg);
    for _ in 0..deg {
        f.push(x % p);
        x /= p;
    }
    fp::trim(&mut f);
    f
}

impl ExtensionField {
    pub fn new(p: u64, degree: usize) -> Self {
        let modulus = fp::smallest_irreducible(p, degree);
        let order = p.pow(degree as u32);
        let group = (order - 1) as u128;
        let factors = fp::prime_factors(group);
        let g = (1..order)
            .map(|x| index_poly(x, p, degree))
            .find(|g| factors.iter().all(|&r| fp::powmod(g, group / r, &modulus, p) != vec![1]) && !g.is_empty())
            .expect("the multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(group as usize);
        let mut log = vec![ZERO; order as usize];
        let mut cur: FpPoly = vec![1];
        for i in 0..group as u32 {
            let idx = poly_index(&cur, p);
            exp.push(idx);
            log[idx as usize] = i;
            cur = fp::mulmod(&cur, &g, &modulus, p);
        }
        let mut zech = vec![ZERO; group as usize];
        for (k, z) in zech.iter_mut().enumerate() {
            // 1 + g^k: add one to the constant digit
            let e = exp[k];
            let c0 = e % p;
            let s = e - c0 + (c0 + 1) % p;
            *z = log[s as usize];
        }
        ExtensionField { p, degree, order, modulus, exp, log, zech }
    }

    pub fn group_order(&self) -> u32 {
        (self.order - 1) as u32
    }

    /// log(g^a + g^b) for logarithms that may be ZERO.
    #[inline]
    pub fn add_logs(&self, a: u32, b: u32) -> u32 {
        if a == ZERO {
            return b;
        }
        if b == ZERO {
            return a;
        }
        let m = self.group_order();
        let d = if b >= a { b - a } else { b + m - a };
        let z = self.zech[d as usize];
        if z == ZERO {
            ZERO
        } else {
            let s = a as u64 + z as u64;
            (s % m as u64) as u32
        }
    }

    /// The logarithm of an element given by its polynomial in the field generator.
    pub fn log_of(&self, f: &[u64]) -> u32 {
        let r = fp::rem(f, &self.modulus, self.p);
        self.log[poly_index(&r, self.p) as usize]
    }

    pub fn element(&self, log: u32) -> FpPoly {
        if log == ZERO {
            return Vec::new();
        }
        index_poly(self.exp[log as usize], self.p, self.degree)
    }

    /// Logarithm of a root of `hbar`, the first one in index order.
    pub fn embed_root(&self, hbar: &[u64]) -> Result<u32> {
        for x in 0..self.order {
            let t = index_poly(x, self.p, self.degree);
            // Horner evaluation of hbar at t
            let mut acc: FpPoly = Vec::new();
            for &c in hbar.iter().rev() {
                acc = fp::mulmod(&acc, &t, &self.modulus, self.p);
                let mut cst = vec![c % self.p];
                fp::trim(&mut cst);
                acc = fp::rem(&add_polys(&acc, &cst, self.p), &self.modulus, self.p);
            }
            if acc.is_empty() {
                return Ok(self.log[x as usize]);
            }
        }
        Err(Error::InvalidFieldSpec("field polynomial has no root in the extension".into()))
    }
}

fn add_polys(f: &[u64], g: &[u64], p: u64) -> FpPoly {
    let neg: FpPoly = g.iter().map(|&c| (p - c % p) % p).collect();
    fp::sub(f, &neg, p)
}

/// A polynomial over F_q prepared for evaluation over F_(q^r).
pub struct PointCounter {
    pub field: ExtensionField,
    n: usize,
    exps: Vec<Vec<i64>>,
    coeff_logs: Vec<u32>,
}

impl PointCounter {
    pub fn new(spec: &FieldSpec, f: &FqPolynomial, r: usize) -> Result<Self> {
        let field = ExtensionField::new(spec.p, spec.a * r);
        let root = field.embed_root(&spec.hbar)?;
        let m = field.group_order() as u64;
        let mut coeff_logs = Vec::new();
        for (_, c) in &f.terms {
            // sum_i c_i root^i
            let mut acc = ZERO;
            for (i, &ci) in c.iter().enumerate() {
                if ci == 0 {
                    continue;
                }
                let l = (field.log_of(&[ci]) as u64 + root as u64 * i as u64) % m;
                acc = field.add_logs(acc, l as u32);
            }
            coeff_logs.push(acc);
        }
        Ok(PointCounter { field, n: f.n, exps: f.terms.iter().map(|t| t.0.clone()).collect(), coeff_logs })
    }

    /// log f(x) for coordinates given as logarithms (ZERO allowed for nonnegative exponents).
    #[inline]
    fn eval(&self, x: &[u32]) -> u32 {
        let m = self.field.group_order() as i64;
        let mut acc = ZERO;
        'terms: for (e, &c) in self.exps.iter().zip(&self.coeff_logs) {
            let mut l = c as i64;
            for i in 0..self.n {
                if e[i] == 0 {
                    continue;
                }
                if x[i] == ZERO {
                    continue 'terms;
                }
                l += e[i] * x[i] as i64;
            }
            acc = self.field.add_logs(acc, l.rem_euclid(m) as u32);
        }
        acc
    }

    pub fn evaluations(&self, mode: Mode) -> u128 {
        let q = self.field.order as u128;
        match mode {
            Mode::Toric => (q - 1).pow(self.n as u32),
            Mode::Affine => q.pow(self.n as u32),
            Mode::Projective => (q.pow(self.n as u32) - 1) / (q - 1),
        }
    }

    pub fn count(&self, mode: Mode, budget: u128) -> Result<u128> {
        let evals = self.evaluations(mode);
        if evals > budget {
            return Err(Error::BudgetExceeded(evals));
        }
        let m = self.field.group_order();
        let n = self.n;
        let mut count = 0u128;
        match mode {
            Mode::Toric | Mode::Affine => {
                let lo_zero = mode == Mode::Affine;
                let mut x = vec![0u32; n];
                if lo_zero {
                    x.iter_mut().for_each(|v| *v = ZERO);
                }
                loop {
                    if self.eval(&x) == ZERO {
                        count += 1;
                    }
                    if !advance(&mut x, m, lo_zero) {
                        break;
                    }
                }
            }
            Mode::Projective => {
                // representatives (0, ..., 0, 1, *, ..., *)
                for lead in 0..n {
                    let mut x = vec![ZERO; n];
                    x[lead] = 0;
                    loop {
                        if self.eval(&x) == ZERO {
                            count += 1;
                        }
                        if !advance(&mut x[lead + 1..], m, true) {
                            break;
                        }
                    }
                }
            }
        }
        Ok(count)
    }
}

/// Odometer over logarithms 0..m, preceded by ZERO when `with_zero`.
fn advance(x: &mut [u32], m: u32, with_zero: bool) -> bool {
    for v in x.iter_mut().rev() {
        if *v == ZERO {
            *v = 0;
            return true;
        }
        if *v + 1 < m {
            *v += 1;
            return true;
        }
        *v = if with_zero { ZERO } else { 0 };
    }
    false
}

/// #V(F_(q^r)) by exhaustive evaluation.
pub fn count_points(spec: &FieldSpec, f: &FqPolynomial, mode: Mode, r: usize, budget: u128) -> Result<u128> {
    PointCounter::new(spec, f, r)?.count(mode, budget)
}

/// The rational function num/den with deg num <= num_deg, deg den <= den_deg and den(0) = 1
/// whose logarithmic expansion reproduces the counts.
pub fn zeta_from_counts(counts: &[i128], num_deg: usize, den_deg: usize) -> Result<(Vec<i128>, Vec<i128>)> {
    let k = counts.len();
    if k < num_deg + den_deg {
        return Err(Error::UnderDetermined(format!(
            "{k} counts cannot determine degrees ({num_deg}, {den_deg})"
        )));
    }
    // Z = exp(sum N_r T^r / r) as a rational power series up to T^k
    let mut z = vec![BigRational::zero(); k + 1];
    z[0] = BigRational::one();
    for m in 1..=k {
        // m z_m = sum_{r=1}^m N_r z_(m-r)
        let mut acc = BigRational::zero();
        for r in 1..=m {
            acc += BigRational::from_integer(BigInt::from(counts[r - 1])) * &z[m - r];
        }
        z[m] = acc / BigRational::from_integer(BigInt::from(m as i64));
    }
    let (mut a, mut b) = (num_deg, den_deg);
    loop {
        if let Some(den) = solve_denominator(&z, a, b) {
            let mut num = vec![BigRational::zero(); a + 1];
            for (i, slot) in num.iter_mut().enumerate() {
                for j in 0..=b.min(i) {
                    *slot += &den[j] * &z[i - j];
                }
            }
            // the remaining coefficients must vanish
            for m in (a + 1)..=k {
                let mut s = BigRational::zero();
                for j in 0..=b.min(m) {
                    s += &den[j] * &z[m - j];
                }
                if !s.is_zero() {
                    return Err(Error::UnderDetermined("counts are inconsistent with the degree bounds".into()));
                }
            }
            let to_int = |v: &[BigRational]| -> Result<Vec<i128>> {
                let mut out: Vec<i128> = v
                    .iter()
                    .map(|x| {
                        if !x.is_integer() {
                            return Err(Error::ConsistencyFailure(format!("non-integral coefficient {x}")));
                        }
                        x.to_integer().to_i128().ok_or_else(|| Error::ConsistencyFailure("coefficient too large".into()))
                    })
                    .collect::<Result<_>>()?;
                while out.len() > 1 && out.last() == Some(&0) {
                    out.pop();
                }
                Ok(out)
            };
            return Ok((to_int(&num)?, to_int(&den)?));
        }
        if a == 0 || b == 0 {
            return Err(Error::UnderDetermined("no rational function matches the counts".into()));
        }
        a -= 1;
        b -= 1;
    }
}

/// den with den_0 = 1 and sum_j den_j z_(m-j) = 0 for m = a+1..a+b, if uniquely solvable.
fn solve_denominator(z: &[BigRational], a: usize, b: usize) -> Option<Vec<BigRational>> {
    let mut rows: Vec<Vec<BigRational>> = (1..=b)
        .map(|i| {
            let m = a + i;
            let mut row: Vec<BigRational> =
                (1..=b).map(|j| if j <= m { z[m - j].clone() } else { BigRational::zero() }).collect();
            row.push(-z[m].clone());
            row
        })
        .collect();
    for c in 0..b {
        let piv = (c..b).find(|&r| !rows[r][c].is_zero())?;
        rows.swap(c, piv);
        let inv = BigRational::one() / &rows[c][c];
        for x in rows[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..b {
            if r != c && !rows[r][c].is_zero() {
                let f = rows[r][c].clone();
                let pivot_row = rows[c].clone();
                for (x, y) in rows[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    let mut den = vec![BigRational::one()];
    den.extend(rows.iter().map(|r| r[b].clone()));
    Some(den)
}

/// A face of the Newton polytope together with a common zero of f restricted to it and all
/// x_i df/dx_i over F_(q^k), if one is found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegeneracyWitness {
    pub face_points: Vec<Vec<i64>>,
    pub extension_degree: usize,
    pub point: Vec<Vec<u64>>,
}

/// Searches (F_(q^k)^*)^n for k = 1..=k_max on every face for a singular point of f restricted
/// to the face. Finding one proves degeneracy; finding none proves nothing.
pub fn find_degeneracy_witness(
    spec: &FieldSpec,
    f: &FqPolynomial,
    k_max: usize,
    budget: u128,
) -> Result<Option<DegeneracyWitness>> {
    let support = f.support();
    let (poly, _) = hull_and_triangulate(&support)?;
    let n = f.n;
    for k in 1..=k_max {
        for face in poly.faces(&support) {
            let terms: Vec<_> = face.points.iter().map(|&i| f.terms[i].clone()).collect();
            let restricted = FqPolynomial { n, terms };
            let counter = PointCounter::new(spec, &restricted, k)?;
            let evals = counter.evaluations(Mode::Toric);
            if evals > budget {
                return Err(Error::BudgetExceeded(evals));
            }
            let derivs: Vec<PointCounter> = (0..n)
                .map(|i| {
                    let dt: Vec<_> = restricted
                        .terms
                        .iter()
                        .filter(|(e, _)| e[i].rem_euclid(spec.p as i64) != 0)
                        .map(|(e, c)| {
                            let m = e[i].rem_euclid(spec.p as i64) as u64;
                            (e.clone(), c.iter().map(|&x| x * m % spec.p).collect::<Vec<u64>>())
                        })
                        .collect();
                    PointCounter::new(spec, &FqPolynomial { n, terms: dt }, k)
                })
                .collect::<Result<_>>()?;
            let m = counter.field.group_order();
            let mut x = vec![0u32; n];
            loop {
                if counter.eval(&x) == ZERO && derivs.iter().all(|d| d.exps.is_empty() || d.eval(&x) == ZERO) {
                    return Ok(Some(DegeneracyWitness {
                        face_points: face.points.iter().map(|&i| support[i].clone()).collect(),
                        extension_degree: k,
                        point: x.iter().map(|&l| counter.field.element(l)).collect(),
                    }));
                }
                if !advance(&mut x, m, false) {
                    break;
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: u64, a: usize) -> FieldSpec {
        FieldSpec::new(p, a, None, 1).unwrap()
    }

    #[test]
    fn field_tables_consistent() {
        for (p, d) in [(3u64, 1usize), (3, 2), (5, 2), (7, 1), (3, 4)] {
            let f = ExtensionField::new(p, d);
            let m = f.group_order();
            // g^a + g^a = 2 g^a
            let two = f.log_of(&[2]);
            for a in (0..m).step_by(7) {
                assert_eq!(f.add_logs(a, a), (a + two) % m);
            }
            // x + (-x) = 0
            let minus_one = f.log_of(&[p - 1]);
            for a in 0..m.min(50) {
                assert_eq!(f.add_logs(a, (a + minus_one) % m), ZERO);
            }
        }
    }

    #[test]
    fn torus_line_has_one_point() {
        let s = spec(5, 1);
        let f = FqPolynomial::new(1, 5, 1, &[(vec![1], vec![1]), (vec![0], vec![-1])]).unwrap();
        for r in 1..=4 {
            assert_eq!(count_points(&s, &f, Mode::Toric, r, DEFAULT_BUDGET).unwrap(), 1);
        }
    }

    #[test]
    fn extension_embedding_respects_field_polynomial() {
        // over F_9 = F_3[t]/(t^2 + 1), x - t has exactly one root, in every extension
        let s = FieldSpec::new(3, 2, Some(vec![1, 0, 1]), 1).unwrap();
        let f = FqPolynomial::new(1, 3, 2, &[(vec![1], vec![1]), (vec![0], vec![0, 2])]).unwrap();
        for r in 1..=3 {
            assert_eq!(count_points(&s, &f, Mode::Affine, r, DEFAULT_BUDGET).unwrap(), 1);
        }
        // x^2 + 1 splits over F_9
        let g = FqPolynomial::new(1, 3, 2, &[(vec![2], vec![1]), (vec![0], vec![1])]).unwrap();
        assert_eq!(count_points(&s, &g, Mode::Affine, 1, DEFAULT_BUDGET).unwrap(), 2);
    }

    #[test]
    fn elliptic_projective_is_affine_plus_one() {
        for p in [5u64, 7, 11] {
            let s = spec(p, 1);
            let aff = FqPolynomial::new(2, p, 1, &[(vec![3, 0], vec![1]), (vec![1, 0], vec![1]), (vec![0, 0], vec![1]), (vec![0, 2], vec![-1])]).unwrap();
            let proj = FqPolynomial::new(3, p, 1, &[(vec![3, 0, 0], vec![1]), (vec![1, 0, 2], vec![1]), (vec![0, 0, 3], vec![1]), (vec![0, 2, 1], vec![-1])]).unwrap();
            for r in 1..=2 {
                let a = count_points(&s, &aff, Mode::Affine, r, DEFAULT_BUDGET).unwrap();
                let b = count_points(&s, &proj, Mode::Projective, r, DEFAULT_BUDGET).unwrap();
                assert_eq!(b, a + 1);
            }
        }
    }

    #[test]
    fn budget_enforced() {
        let s = spec(7, 1);
        let f = FqPolynomial::new(3, 7, 1, &[(vec![1, 1, 1], vec![1]), (vec![0, 0, 0], vec![1])]).unwrap();
        assert_eq!(count_points(&s, &f, Mode::Affine, 2, 1000).unwrap_err(), Error::BudgetExceeded(117649));
    }

    #[test]
    fn torus_zeta_from_counts() {
        let q = 7i128;
        let counts: Vec<i128> = (1..=4).map(|r| q.pow(r) - 1).collect();
        assert_eq!(zeta_from_counts(&counts, 1, 1).unwrap(), (vec![1, -1], vec![1, -7]));
        // larger bounds reduce to the same answer
        assert_eq!(zeta_from_counts(&counts, 2, 2).unwrap(), (vec![1, -1], vec![1, -7]));
        assert!(matches!(zeta_from_counts(&counts[..1], 1, 1), Err(Error::UnderDetermined(_))));
    }

    #[test]
    fn elliptic_zeta_from_counts() {
        let s = spec(5, 1);
        let proj = FqPolynomial::new(3, 5, 1, &[(vec![3, 0, 0], vec![1]), (vec![1, 0, 2], vec![2]), (vec![0, 0, 3], vec![1]), (vec![0, 2, 1], vec![-1])]).unwrap();
        let counts: Vec<i128> = (1..=4).map(|r| count_points(&s, &proj, Mode::Projective, r, DEFAULT_BUDGET).unwrap() as i128).collect();
        let aq = 5 + 1 - counts[0];
        let (num, den) = zeta_from_counts(&counts, 2, 2).unwrap();
        assert_eq!(num, vec![1, -aq, 5]);
        assert_eq!(den, vec![1, -6, 5]);
    }

    #[test]
    fn witness_search() {
        let s = spec(5, 1);
        // (x - 1)^2 y + y^2 + ... degenerate: x^2 - 2x + 1 on the segment face has a double root
        let bad = FqPolynomial::new(1, 5, 1, &[(vec![2], vec![1]), (vec![1], vec![-2]), (vec![0], vec![1])]).unwrap();
        let w = find_degeneracy_witness(&s, &bad, 1, DEFAULT_BUDGET).unwrap().unwrap();
        assert_eq!(w.point, vec![vec![1]]);
        let good = FqPolynomial::new(1, 5, 1, &[(vec![2], vec![1]), (vec![0], vec![-2])]).unwrap();
        assert_eq!(find_degeneracy_witness(&s, &good, 2, DEFAULT_BUDGET).unwrap(), None);
    }
}
