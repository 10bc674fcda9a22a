//! The Frobenius image alpha((pi w)^d x^mu) = psi((pi w)^d x^mu F(w, x)) with
//! F = prod_j theta(a_j w x^(nu_j)), by congruence enumeration or by the dense product.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Arc;

use crate::cone::{Cone, ConeElement, ConeMonomial, Exponent};
use crate::error::{Error, Result};
use crate::jacobian::LiftedPolynomial;
use crate::padic::{RingContext, RingElement};
use crate::splitting::{compute_splitting, SplittingSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expansion {
    Fewnomial,
    Dense,
}

/// The (n+1) x s matrix with columns (1, nu_j) over the support, and its rank mod p.
#[derive(Clone, Debug)]
pub struct SupportMatrix {
    pub u: Vec<Vec<i64>>,
    pub s: usize,
    pub rho: usize,
}

impl SupportMatrix {
    pub fn new(support: &[Exponent], n: usize, p: u64) -> Self {
        let s = support.len();
        let mut u = vec![vec![1i64; s]];
        for i in 0..n {
            u.push(support.iter().map(|e| e.0[i] as i64).collect());
        }
        let rho = rref_mod_p(&u, &vec![0; n + 1], p).pivots.len();
        SupportMatrix { u, s, rho }
    }
}

struct Rref {
    rows: Vec<Vec<u64>>,
    rhs: Vec<u64>,
    pivots: Vec<usize>,
    consistent: bool,
}

fn rref_mod_p(u: &[Vec<i64>], target: &[i64], p: u64) -> Rref {
    let m = u.len();
    let s = u[0].len();
    let red = |x: i64| x.rem_euclid(p as i64) as u64;
    let mut rows: Vec<Vec<u64>> = u.iter().map(|r| r.iter().map(|&x| red(x)).collect()).collect();
    let mut rhs: Vec<u64> = target.iter().map(|&x| red(x)).collect();
    let inv = |x: u64| -> u64 {
        let mut r = 1u64;
        let (mut b, mut e) = (x, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..s {
        let Some(r) = (row..m).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(row, r);
        rhs.swap(row, r);
        let iv = inv(rows[row][c]);
        for x in rows[row].iter_mut() {
            *x = *x * iv % p;
        }
        rhs[row] = rhs[row] * iv % p;
        for r2 in 0..m {
            if r2 != row && rows[r2][c] != 0 {
                let f = rows[r2][c];
                for k in 0..s {
                    rows[r2][k] = (rows[r2][k] + p * p - f * rows[row][k] % p) % p;
                }
                rhs[r2] = (rhs[r2] + p - f * rhs[row] % p) % p;
            }
        }
        pivots.push(c);
        row += 1;
        if row == m {
            break;
        }
    }
    let consistent = (row..m).all(|r| rhs[r] == 0);
    Rref { rows, rhs, pivots, consistent }
}

/// All k in {0..p-1}^s with U k = target mod p, in lexicographic order of the kernel coordinates.
pub fn solve_congruence(u: &[Vec<i64>], target: &[i64], p: u64) -> Vec<Vec<u64>> {
    let s = u[0].len();
    let r = rref_mod_p(u, target, p);
    if !r.consistent {
        return Vec::new();
    }
    let free: Vec<usize> = (0..s).filter(|c| !r.pivots.contains(c)).collect();
    let mut out = Vec::new();
    let mut t = vec![0u64; free.len()];
    loop {
        let mut k = vec![0u64; s];
        for (i, &c) in free.iter().enumerate() {
            k[c] = t[i];
        }
        for (i, &c) in r.pivots.iter().enumerate() {
            let mut v = r.rhs[i] as i64;
            for &fc in &free {
                v -= (r.rows[i][fc] * k[fc]) as i64;
            }
            k[c] = v.rem_euclid(p as i64) as u64;
        }
        out.push(k);
        // odometer, last coordinate fastest
        let mut i = free.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < p {
                break;
            }
            t[i] = 0;
        }
    }
}

/// E = ceil(beta (N + gamma)) with beta = (p^2 - p)/(p^2 - 3p + 1) and gamma = (n + 1)/(p^2 - p).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationBound {
    pub e: u64,
}

impl TruncationBound {
    pub fn new(p: u64, n: usize, n_work: u32) -> Self {
        // beta (N + gamma) = ((p^2 - p) N + n + 1) / (p^2 - 3p + 1)
        let num = (p * p - p) * n_work as u64 + n as u64 + 1;
        TruncationBound { e: num.div_ceil(p * p - 3 * p + 1) }
    }

    /// beta as an exact fraction.
    pub fn beta(p: u64) -> (u64, u64) {
        let (a, b) = (p * p - p, p * p - 3 * p + 1);
        let g = a.gcd(&b);
        (a / g, b / g)
    }
}

/// Largest D with floor(D (2p - 1) / (p^2 (p - 1))) as the scaling exponent of F_D.
fn delta(p: u64, d: u64) -> u32 {
    (d * (2 * p - 1) / (p * p * (p - 1))) as u32
}

/// Precomputed data for expanding Frobenius images of basis monomials.
pub struct FrobeniusExpander {
    pub p: u64,
    pub n: usize,
    pub n_work: u32,
    pub support: Vec<Exponent>,
    pub matrix: SupportMatrix,
    pub series: Arc<SplittingSeries>,
    /// `tables[j][r][e] = (phi, w)` with phi = e + ord(l_(r+pe)) and
    /// w = unit(l_(r+pe)) a_j^e.
    tables: Vec<Vec<Vec<(i64, RingElement)>>>,
    /// `small_pows[j][r] = a_j^r` for r < p.
    small_pows: Vec<Vec<RingElement>>,
    dense: Option<DenseProduct>,
}

/// Largest |e| encountered in a fewnomial expansion, for checking the truncation bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExpansionStats {
    pub max_e: u64,
    pub terms: u64,
}

impl FrobeniusExpander {
    pub fn new(ctx: &RingContext, f: &LiftedPolynomial, expansion: Expansion) -> Result<Self> {
        let p = ctx.p();
        let n = f.n;
        let n_work = ctx.precision();
        let s = f.support.len();
        let sc = (p * p * (p - 1)) as i64;
        let slope = (p * (p * p - 3 * p + 1)) as i64;
        // smallest e with e p (p^2-3p+1) - (p-1)(2p-1) >= N_work p^2 (p-1)
        let need = n_work as i64 * sc + ((p - 1) * (2 * p - 1)) as i64;
        let e_max = (need + slope - 1) / slope + 1;
        let dense_len = dense_bound(p, n_work) as usize;
        let mut len = (p as usize - 1) + p as usize * e_max as usize + 1;
        if expansion == Expansion::Dense {
            len = len.max(dense_len);
        }
        let series = compute_splitting(p, n_work, len)?;
        let mut tables = Vec::with_capacity(s);
        let mut small_pows = Vec::with_capacity(s);
        for a in &f.coeffs {
            let mut pw = vec![ctx.one()];
            for _ in 1..(e_max as usize).max(p as usize) {
                let last = pw.last().expect("nonempty");
                pw.push(ctx.mul(last, a));
            }
            small_pows.push(pw[..p as usize].to_vec());
            let mut per_r = Vec::with_capacity(p as usize);
            for r in 0..p as usize {
                let mut t = Vec::with_capacity(e_max as usize);
                for e in 0..e_max as usize {
                    let i = r + p as usize * e;
                    let phi = e as i64 + series.valuation[i];
                    t.push((phi, ctx.scale(&pw[e], series.unit[i])));
                }
                per_r.push(t);
            }
            tables.push(per_r);
        }
        let dense = match expansion {
            Expansion::Dense => Some(DenseProduct::new(ctx, f, &series)?),
            Expansion::Fewnomial => None,
        };
        Ok(FrobeniusExpander {
            p,
            n,
            n_work,
            support: f.support.clone(),
            matrix: SupportMatrix::new(&f.support, n, p),
            series,
            tables,
            small_pows,
            dense,
        })
    }

    pub fn expand(&self, ctx: &RingContext, cone: &Cone, m: &ConeMonomial) -> Result<ConeElement> {
        match &self.dense {
            Some(dp) => dp.apply(ctx, cone, m),
            None => Ok(self.expand_fewnomial(ctx, cone, m)?.0),
        }
    }

    /// alpha((pi w)^d x^mu) by enumerating k = k0 + p e with k0 in the congruence solution set.
    pub fn expand_fewnomial(
        &self,
        ctx: &RingContext,
        cone: &Cone,
        m: &ConeMonomial,
    ) -> Result<(ConeElement, ExpansionStats)> {
        let p = self.p;
        let n = self.n;
        let s = self.support.len();
        let mut target = vec![-(m.d as i64)];
        target.extend((0..n).map(|i| -(m.mu.0[i] as i64)));
        let ks = solve_congruence(&self.matrix.u, &target, p);
        let mut acc: HashMap<ConeMonomial, RingElement> = HashMap::new();
        let mut stats = ExpansionStats::default();
        for k0 in &ks {
            let ksum: u64 = k0.iter().sum();
            let d0 = (ksum + m.d as u64) / p;
            let budget = self.n_work as i64 - d0 as i64;
            if budget <= 0 {
                continue;
            }
            let mut mu0 = m.mu;
            for (j, &kj) in k0.iter().enumerate() {
                mu0 = mu0.add(&self.support[j].scale(kj as i32));
            }
            for i in 0..n {
                debug_assert_eq!(mu0.0[i].rem_euclid(p as i32), 0);
                mu0.0[i] /= p as i32;
            }
            let mut c0 = ctx.one();
            for (j, &kj) in k0.iter().enumerate() {
                c0 = ctx.mul(&c0, &self.small_pows[j][kj as usize]);
            }
            let c0 = ctx.sigma_inv(&c0);
            let mut walk = Walk {
                ctx,
                exp: self,
                k0,
                budget,
                d0,
                acc: &mut acc,
                stats: &mut stats,
                s,
            };
            walk.descend(0, 0, 0, mu0, c0);
        }
        let mut out = ConeElement::new();
        for (mono, c) in acc {
            if c.is_zero() {
                continue;
            }
            if !cone.contains(mono.d, &mono.mu) {
                return Err(Error::PrecisionOrLogicError(format!("Frobenius term {mono:?} outside the cone")));
            }
            out.terms.insert(mono, c);
        }
        Ok((out, stats))
    }
}

struct Walk<'a> {
    ctx: &'a RingContext,
    exp: &'a FrobeniusExpander,
    k0: &'a [u64],
    budget: i64,
    d0: u64,
    acc: &'a mut HashMap<ConeMonomial, RingElement>,
    stats: &'a mut ExpansionStats,
    s: usize,
}

impl Walk<'_> {
    fn descend(&mut self, j: usize, phi: i64, esum: u64, mu: Exponent, c: RingElement) {
        let ctx = self.ctx;
        if j == self.s {
            // the term is (-1)^D p^(D + sum ord l) (units) with D = d0 + |e|
            let dd = self.d0 + esum;
            let val = self.d0 as i64 + phi;
            debug_assert!(val < ctx.precision() as i64);
            let mut v = ctx.mul_p_pow(&c, val as u32);
            if dd % 2 == 1 {
                v = ctx.neg(&v);
            }
            self.stats.max_e = self.stats.max_e.max(esum);
            self.stats.terms += 1;
            let key = ConeMonomial { d: dd as u32, mu };
            match self.acc.get_mut(&key) {
                Some(x) => ctx.add_assign(x, &v),
                None => {
                    self.acc.insert(key, v);
                }
            }
            return;
        }
        let table = &self.exp.tables[j][self.k0[j] as usize];
        let nu = self.exp.support[j];
        let mut mu_e = mu;
        for (e, (dphi, w)) in table.iter().enumerate() {
            // phi_j(e) >= 0 is an integer lower-bounded by an increasing function of e, so once
            // that bound exceeds the budget no later e can contribute
            let sc = scale(self.exp.p);
            if phi * sc + lower_bound_scaled(self.exp.p, e as i64, self.k0[j] as i64) >= self.budget * sc {
                break;
            }
            if phi + dphi < self.budget {
                self.descend(j + 1, phi + dphi, esum + e as u64, mu_e, ctx.mul(&c, w));
            }
            mu_e = mu_e.add(&nu);
        }
    }
}

fn scale(p: u64) -> i64 {
    (p * p * (p - 1)) as i64
}

/// p^2 (p - 1) times the lower bound e (1 - (2p-1)/(p(p-1))) - r (2p-1)/(p^2 (p-1)) for
/// e + ord(l_(r + pe)).
fn lower_bound_scaled(p: u64, e: i64, r: i64) -> i64 {
    let p = p as i64;
    e * p * (p * p - 3 * p + 1) - r * (2 * p - 1)
}

/// Degrees D of F that can matter modulo p^N: D < N p^2 (p-1) / (p^2 - 3p + 1).
pub fn dense_bound(p: u64, n_work: u32) -> u64 {
    (n_work as u64 * p * p * (p - 1)).div_ceil(p * p - 3 * p + 1)
}

/// F = prod_j theta(a_j w x^(nu_j)) stored as G_D = p^delta(D) F_D modulo p^N.
pub struct DenseProduct {
    p: u64,
    d_bound: u64,
    pub g: Vec<HashMap<Exponent, RingElement>>,
}

impl DenseProduct {
    pub fn new(ctx: &RingContext, f: &LiftedPolynomial, series: &SplittingSeries) -> Result<Self> {
        let p = ctx.p();
        let n_work = ctx.precision();
        let d_bound = dense_bound(p, n_work);
        if series.unit.len() < d_bound as usize {
            return Err(Error::PrecisionOrLogicError("splitting series too short for the dense product".into()));
        }
        let mut g: Vec<HashMap<Exponent, RingElement>> = vec![HashMap::new(); d_bound as usize];
        g[0].insert(Exponent::default(), ctx.one());
        for (nu, a) in f.support.iter().zip(&f.coeffs) {
            // factor_i = p^delta(i) l_i a^i, integral
            let mut factors = Vec::with_capacity(d_bound as usize);
            let mut apow = ctx.one();
            for i in 0..d_bound as usize {
                let ex = delta(p, i as u64) as i64 + series.valuation[i];
                if ex < 0 {
                    return Err(Error::InternalPrecisionError(format!("l_{i} exceeds its denominator bound")));
                }
                let fct = if ex >= n_work as i64 {
                    ctx.zero()
                } else {
                    ctx.mul_p_pow(&ctx.scale(&apow, series.unit[i]), ex as u32)
                };
                factors.push(fct);
                apow = ctx.mul(&apow, a);
            }
            let mut next: Vec<HashMap<Exponent, RingElement>> = vec![HashMap::new(); d_bound as usize];
            for d1 in 0..d_bound {
                for (mu, c) in &g[d1 as usize] {
                    let mut mu_i = *mu;
                    for i in 0..(d_bound - d1) {
                        let fct = &factors[i as usize];
                        if !fct.is_zero() {
                            let shift = delta(p, d1 + i) - delta(p, d1) - delta(p, i);
                            let term = ctx.mul_p_pow(&ctx.mul(c, fct), shift);
                            if !term.is_zero() {
                                let slot = next[(d1 + i) as usize].entry(mu_i).or_insert_with(|| ctx.zero());
                                ctx.add_assign(slot, &term);
                            }
                        }
                        mu_i = mu_i.add(nu);
                    }
                }
            }
            // drop terms whose final contribution is divisible by p^N
            for (d, layer) in next.iter_mut().enumerate() {
                let dl = delta(p, d as u64) as i64;
                layer.retain(|_, c| {
                    !c.is_zero() && p as i64 * (ctx.valuation(c) as i64 - dl) + (d as i64) < p as i64 * n_work as i64
                });
            }
            g = next;
        }
        Ok(DenseProduct { p, d_bound, g })
    }

    /// psi((pi w)^d x^mu F) with sigma^(-1) applied to the coefficients.
    pub fn apply(&self, ctx: &RingContext, cone: &Cone, m: &ConeMonomial) -> Result<ConeElement> {
        let p = self.p;
        let n = cone.n;
        let mut out = ConeElement::new();
        for dd in 0..self.d_bound {
            if !(dd + m.d as u64).is_multiple_of(p) {
                continue;
            }
            let d_out = (dd + m.d as u64) / p;
            let shift = d_out as i64 - delta(p, dd) as i64;
            if shift < 0 {
                return Err(Error::InternalPrecisionError(format!("negative valuation in degree {dd}")));
            }
            for (nu, c) in &self.g[dd as usize] {
                let mut mu = nu.add(&m.mu);
                if (0..n).any(|i| mu.0[i].rem_euclid(p as i32) != 0) {
                    continue;
                }
                for i in 0..n {
                    mu.0[i] /= p as i32;
                }
                if shift >= ctx.precision() as i64 {
                    continue;
                }
                let mut v = ctx.mul_p_pow(&ctx.sigma_inv(c), shift as u32);
                if d_out % 2 == 1 {
                    v = ctx.neg(&v);
                }
                let mono = ConeMonomial { d: d_out as u32, mu };
                if !v.is_zero() && !cone.contains(mono.d, &mono.mu) {
                    return Err(Error::PrecisionOrLogicError(format!("Frobenius term {mono:?} outside the cone")));
                }
                out.add_term(ctx, mono, &v);
            }
        }
        Ok(out)
    }
}
