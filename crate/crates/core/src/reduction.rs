//! Reduction of elements of the cone algebra to coordinates on the monomial basis, using
//! the relations (pi w) f_g xi = -x_g d(xi)/dx_g and the recorded echelon transforms.

use std::collections::BTreeMap;

use crate::cone::{Cone, ConeElement, ConeMonomial, Exponent};
use crate::error::{Error, Result};
use crate::jacobian::{column_allowed, DegreeEchelon, EchelonData, MonomialBasis};
use crate::padic::{RingContext, RingElement};

/// How the degree-(n+2) divisor of a leading monomial is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DivisorPolicy {
    /// The first valid monomial in term order.
    #[default]
    First,
    /// The last valid monomial in term order.
    Last,
}

pub struct Reducer<'a> {
    ctx: &'a RingContext,
    cone: &'a Cone,
    ech: &'a EchelonData,
    basis: &'a MonomialBasis,
    policy: DivisorPolicy,
}

type Layers = BTreeMap<u32, BTreeMap<Exponent, RingElement>>;

impl<'a> Reducer<'a> {
    pub fn new(ctx: &'a RingContext, cone: &'a Cone, ech: &'a EchelonData, basis: &'a MonomialBasis) -> Self {
        Reducer { ctx, cone, ech, basis, policy: DivisorPolicy::First }
    }

    pub fn with_policy(mut self, policy: DivisorPolicy) -> Self {
        self.policy = policy;
        self
    }

    /// Coordinates of the class of g on the basis.
    pub fn reduce(&self, g: &ConeElement) -> Result<Vec<RingElement>> {
        let ctx = self.ctx;
        let n = self.ech.n;
        let mode = self.ech.mode;
        let top = n as u32 + 2;
        let mut layers: Layers = BTreeMap::new();
        for (m, c) in &g.terms {
            if !column_allowed(mode, n, &m.mu) {
                return Err(Error::PrecisionOrLogicError(format!("monomial {m:?} outside the reduction domain")));
            }
            layers.entry(m.d).or_default().insert(m.mu, c.clone());
        }
        let jt = &self.ech.degrees[top as usize];
        let mut y = vec![ctx.zero(); jt.rows.len()];
        while let Some((&e, layer)) = layers.iter_mut().next_back() {
            if e < top {
                break;
            }
            let Some((&lm, _)) = layer.iter().next_back() else {
                layers.remove(&e);
                continue;
            };
            let before = layer.len();
            let mu_m = self.divisor(e, &lm, jt)?;
            for v in y.iter_mut() {
                *v = ctx.zero();
            }
            for (c, col) in jt.columns.iter().enumerate() {
                if let Some(xc) = layer.remove(&mu_m.add(col)) {
                    let pr = &jt.pivots[jt.pivot_of[c].expect("top degree has full rank")];
                    for (r, t) in &pr.transform {
                        ctx.mul_add_assign(&mut y[*r], &xc, t);
                    }
                }
            }
            if layer.len() >= before || layer.contains_key(&lm) {
                return Err(Error::NonTermination(format!("leading monomial {lm:?} of degree {e} was not removed")));
            }
            self.push_derivatives(&mut layers, e - 1, &mu_m, jt, &y)?;
        }
        let mut coords = vec![ctx.zero(); self.basis.len()];
        for d in (1..top).rev() {
            let Some(layer) = layers.remove(&d) else { continue };
            let je = &self.ech.degrees[d as usize];
            let mut xi = vec![ctx.zero(); je.columns.len()];
            for (mu, c) in layer {
                let k = *je.col_index.get(&mu).ok_or_else(|| {
                    Error::PrecisionOrLogicError(format!("monomial {mu:?} of degree {d} outside the column set"))
                })?;
                xi[k] = c;
            }
            let mut y = vec![ctx.zero(); je.rows.len()];
            let mut v: Vec<RingElement> = je.nonpivot.iter().map(|&q| xi[q].clone()).collect();
            for (c, x) in xi.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let Some(k) = je.pivot_of[c] else { continue };
                let pr = &je.pivots[k];
                for (r, t) in &pr.transform {
                    ctx.mul_add_assign(&mut y[*r], x, t);
                }
                for (q, mval) in &pr.reduced {
                    let pos = je.nonpivot.binary_search(q).expect("reduced entries lie in non-pivot columns");
                    let prod = ctx.mul(x, mval);
                    v[pos] = ctx.sub(&v[pos], &prod);
                }
            }
            for (pos, &q) in je.nonpivot.iter().enumerate() {
                if v[pos].is_zero() {
                    continue;
                }
                let idx = self.basis.index[&ConeMonomial { d, mu: je.columns[q] }];
                coords[idx] = v[pos].clone();
            }
            self.push_derivatives(&mut layers, d - 1, &Exponent::default(), je, &y)?;
        }
        if let Some(layer) = layers.remove(&0) {
            for (mu, c) in layer {
                if c.is_zero() {
                    continue;
                }
                let idx = self.basis.index.get(&ConeMonomial { d: 0, mu }).ok_or_else(|| {
                    Error::PrecisionOrLogicError(format!("degree-zero monomial {mu:?} is not a basis element"))
                })?;
                coords[*idx] = c;
            }
        }
        Ok(coords)
    }

    /// The cofactor lm - m0 for the chosen divisor m0 of degree n + 2.
    fn divisor(&self, e: u32, lm: &Exponent, jt: &DegreeEchelon) -> Result<Exponent> {
        let rest = e - jt.d;
        let ok = |col: &Exponent| {
            let mu = lm.sub(col);
            if self.cone.contains(rest, &mu) {
                Some(mu)
            } else {
                None
            }
        };
        let found = match self.policy {
            DivisorPolicy::First => jt.columns.iter().find_map(ok),
            DivisorPolicy::Last => jt.columns.iter().rev().find_map(ok),
        };
        found.ok_or_else(|| Error::DecompositionError(format!("{lm:?} in degree {e}")))
    }

    /// Adds -sum_r y_r x_g d/dx_g (x^(mu_m + m_r)) in degree `d`, where x_0 d/dx_0 multiplies by d.
    fn push_derivatives(
        &self,
        layers: &mut Layers,
        d: u32,
        mu_m: &Exponent,
        je: &DegreeEchelon,
        y: &[RingElement],
    ) -> Result<()> {
        let ctx = self.ctx;
        let n = self.ech.n;
        for (r, yr) in y.iter().enumerate() {
            if yr.is_zero() {
                continue;
            }
            let (g, m) = &je.rows[r];
            let pt = mu_m.add(m);
            let factor = if *g == 0 { d as i64 } else { pt.0[g - 1] as i64 };
            if factor == 0 {
                continue;
            }
            if !column_allowed(self.ech.mode, n, &pt) || !self.cone.contains(d, &pt) {
                return Err(Error::PrecisionOrLogicError(format!("relation term {pt:?} left the reduction domain")));
            }
            let term = ctx.mul(&ctx.from_int(-factor), yr);
            let slot = layers.entry(d).or_default().entry(pt).or_insert_with(|| ctx.zero());
            ctx.add_assign(slot, &term);
            if slot.is_zero() {
                layers.get_mut(&d).expect("present").remove(&pt);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::Mode;
    use crate::input::FqPolynomial;
    use crate::jacobian::{build_jacobian, derivation, generator_indices, row_allowed, LiftedPolynomial};
    use crate::padic::FieldSpec;
    use crate::polytope::hull_and_triangulate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct Fixture {
        ctx: RingContext,
        cone: Cone,
        f: LiftedPolynomial,
        ech: EchelonData,
        basis: MonomialBasis,
    }

    fn fixture(p: u64, a: usize, mode: Mode, terms: &[(Vec<i64>, Vec<i64>)], n: usize) -> Fixture {
        let ctx = RingContext::with_precision(&FieldSpec::new(p, a, None, 1).unwrap(), 4).unwrap();
        let poly = FqPolynomial::new(n, p, a, terms).unwrap();
        let cone = match mode {
            Mode::Projective => Cone::projective(n, poly.homogeneous_degree().unwrap() as u32).unwrap(),
            _ => {
                let (pl, tri) = hull_and_triangulate(&poly.support()).unwrap();
                Cone::from_polytope(mode, pl, tri).unwrap()
            }
        };
        let f = LiftedPolynomial::lift(&ctx, &poly).unwrap();
        let (ech, basis) = build_jacobian(&ctx, &cone, &f).unwrap();
        Fixture { ctx, cone, f, ech, basis }
    }

    fn random_element(fx: &Fixture, rng: &mut ChaCha8Rng, g: usize, max_d: u32) -> ConeElement {
        let mut xi = ConeElement::new();
        let n = fx.cone.n;
        for _ in 0..rng.gen_range(1..4) {
            let d = rng.gen_range(0..=max_d);
            let pts: Vec<_> = fx
                .cone
                .degree_points(d)
                .iter()
                .filter(|m| row_allowed(fx.cone.mode, n, g, m))
                .copied()
                .collect();
            if pts.is_empty() {
                continue;
            }
            let mu = pts[rng.gen_range(0..pts.len())];
            let c: Vec<i64> = (0..fx.ctx.a()).map(|_| rng.gen_range(0..fx.ctx.pn() as i64)).collect();
            xi.add_term(&fx.ctx, ConeMonomial { d, mu }, &fx.ctx.from_coeffs(&c).unwrap());
        }
        xi
    }

    fn check_relations(fx: &Fixture, seed: u64, count: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let red = Reducer::new(&fx.ctx, &fx.cone, &fx.ech, &fx.basis);
        let gens = generator_indices(fx.cone.mode, fx.cone.n);
        for _ in 0..count {
            let g = gens[rng.gen_range(0..gens.len())];
            let xi = random_element(fx, &mut rng, g, 3);
            let rel = derivation(&fx.ctx, &fx.f, g, &xi);
            let coords = red.reduce(&rel).unwrap();
            assert!(coords.iter().all(|c| c.is_zero()), "D_{g} of {} did not vanish", xi.to_text(fx.cone.n));
        }
    }

    fn elliptic() -> Vec<(Vec<i64>, Vec<i64>)> {
        vec![(vec![3, 0], vec![1]), (vec![1, 0], vec![2]), (vec![0, 0], vec![1]), (vec![0, 2], vec![-1])]
    }

    #[test]
    fn relations_vanish_toric() {
        check_relations(&fixture(5, 1, Mode::Toric, &elliptic(), 2), 1, 40);
        let laurent = vec![(vec![1, 0], vec![1, 1]), (vec![0, 1], vec![2]), (vec![-1, -1], vec![0, 1]), (vec![1, 1], vec![1])];
        check_relations(&fixture(3, 2, Mode::Toric, &laurent, 2), 2, 40);
        check_relations(&fixture(7, 1, Mode::Toric, &[(vec![2], vec![1]), (vec![0], vec![3]), (vec![-1], vec![1])], 1), 3, 40);
    }

    #[test]
    fn relations_vanish_affine_and_projective() {
        check_relations(&fixture(7, 1, Mode::Affine, &elliptic(), 2), 4, 40);
        let fermat = vec![(vec![3, 0], vec![2]), (vec![0, 4], vec![1]), (vec![0, 0], vec![1])];
        check_relations(&fixture(5, 1, Mode::Affine, &fermat, 2), 5, 40);
        let cubic = vec![(vec![3, 0, 0], vec![1]), (vec![0, 3, 0], vec![2]), (vec![0, 0, 3], vec![1]), (vec![1, 1, 1], vec![1])];
        check_relations(&fixture(7, 1, Mode::Projective, &cubic, 3), 6, 40);
    }

    #[test]
    fn basis_elements_are_fixed() {
        let fx = fixture(5, 1, Mode::Toric, &elliptic(), 2);
        let red = Reducer::new(&fx.ctx, &fx.cone, &fx.ech, &fx.basis);
        for (i, m) in fx.basis.elements.iter().enumerate() {
            let coords = red.reduce(&ConeElement::monomial(*m, fx.ctx.from_int(3))).unwrap();
            for (j, c) in coords.iter().enumerate() {
                assert_eq!(*c, if i == j { fx.ctx.from_int(3) } else { fx.ctx.zero() });
            }
        }
    }

    #[test]
    fn linear_and_policy_independent() {
        let fx = fixture(7, 1, Mode::Toric, &elliptic(), 2);
        let first = Reducer::new(&fx.ctx, &fx.cone, &fx.ech, &fx.basis);
        let last = Reducer::new(&fx.ctx, &fx.cone, &fx.ech, &fx.basis).with_policy(DivisorPolicy::Last);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a = random_element(&fx, &mut rng, 0, 7);
            let b = random_element(&fx, &mut rng, 0, 7);
            let ra = first.reduce(&a).unwrap();
            let rb = first.reduce(&b).unwrap();
            let rab = first.reduce(&a.add(&fx.ctx, &b)).unwrap();
            for i in 0..ra.len() {
                assert_eq!(rab[i], fx.ctx.add(&ra[i], &rb[i]));
            }
            assert_eq!(last.reduce(&a).unwrap(), ra);
        }
    }

    #[test]
    fn vertical_relation_on_elliptic_curve() {
        // D_y on (pi w)^(k-1) x^u y^(v-2) gives (pi w)^k x^u y^v = ((v - 2)/2) (pi w)^(k-1) x^u y^(v-2)
        let fx = fixture(7, 1, Mode::Affine, &elliptic(), 2);
        let red = Reducer::new(&fx.ctx, &fx.cone, &fx.ech, &fx.basis);
        let inv2 = fx.ctx.inv(&fx.ctx.from_int(2)).unwrap();
        for (k, u, v) in [(2u32, 1i64, 3i64), (3, 1, 5), (5, 2, 7), (3, 2, 3)] {
            let lhs = red.reduce(&ConeElement::monomial(ConeMonomial { d: k, mu: Exponent::from_slice(&[u, v]) }, fx.ctx.one())).unwrap();
            let rhs = red
                .reduce(&ConeElement::monomial(
                    ConeMonomial { d: k - 1, mu: Exponent::from_slice(&[u, v - 2]) },
                    fx.ctx.mul(&fx.ctx.from_int(v - 2), &inv2),
                ))
                .unwrap();
            assert_eq!(lhs, rhs, "k={k} u={u} v={v}");
        }
    }
}
