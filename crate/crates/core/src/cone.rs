//! The graded algebra spanned by the monomials (pi w)^d x^mu with mu in d·Δ.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::padic::{RingContext, RingElement};
use crate::polytope::{LatticePolytope, Triangulation};

pub const MAX_VARS: usize = 6;

/// An exponent vector; coordinates beyond the number of variables are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Exponent(pub [i32; MAX_VARS]);

impl Exponent {
    pub fn from_slice(v: &[i64]) -> Self {
        let mut e = [0i32; MAX_VARS];
        for (i, &x) in v.iter().enumerate() {
            e[i] = x as i32;
        }
        Exponent(e)
    }

    pub fn to_vec(&self, n: usize) -> Vec<i64> {
        self.0[..n].iter().map(|&x| x as i64).collect()
    }

    #[inline]
    pub fn add(&self, o: &Exponent) -> Exponent {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(o.0.iter()) {
            *a += b;
        }
        Exponent(e)
    }

    #[inline]
    pub fn sub(&self, o: &Exponent) -> Exponent {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(o.0.iter()) {
            *a -= b;
        }
        Exponent(e)
    }

    #[inline]
    pub fn scale(&self, k: i32) -> Exponent {
        let mut e = self.0;
        for a in e.iter_mut() {
            *a *= k;
        }
        Exponent(e)
    }

    pub fn total(&self) -> i64 {
        self.0.iter().map(|&x| x as i64).sum()
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Toric,
    Affine,
    Projective,
}

/// A monomial (pi w)^d x^mu; the derived order is the term order (degree, then lex on mu).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ConeMonomial {
    pub d: u32,
    pub mu: Exponent,
}

enum Shape {
    Polytope { poly: LatticePolytope, tri: Triangulation },
    /// The simplex with vertices deg·e_i; its dilations are the monomials of total degree d·deg.
    Simplex { deg: u32 },
}

/// The cone over Δ together with a cache of the lattice points of its dilations.
pub struct Cone {
    pub mode: Mode,
    pub n: usize,
    shape: Shape,
    cache: Mutex<HashMap<u32, Arc<Vec<Exponent>>>>,
}

impl Cone {
    pub fn from_polytope(mode: Mode, poly: LatticePolytope, tri: Triangulation) -> Result<Self> {
        if poly.n > MAX_VARS {
            return Err(Error::DimensionTooLarge(poly.n));
        }
        Ok(Cone { mode, n: poly.n, shape: Shape::Polytope { poly, tri }, cache: Default::default() })
    }

    pub fn projective(n: usize, deg: u32) -> Result<Self> {
        if n > MAX_VARS {
            return Err(Error::DimensionTooLarge(n));
        }
        Ok(Cone { mode: Mode::Projective, n, shape: Shape::Simplex { deg }, cache: Default::default() })
    }

    pub fn polytope(&self) -> Option<&LatticePolytope> {
        match &self.shape {
            Shape::Polytope { poly, .. } => Some(poly),
            Shape::Simplex { .. } => None,
        }
    }

    /// Whether mu lies in d·Δ.
    pub fn contains(&self, d: u32, mu: &Exponent) -> bool {
        let n = self.n;
        match &self.shape {
            Shape::Polytope { poly, .. } => poly.facets.iter().all(|f| {
                let s: i64 = f.normal.iter().zip(&mu.0[..n]).map(|(a, &b)| a * b as i64).sum();
                s <= d as i64 * f.offset
            }),
            Shape::Simplex { deg } => {
                mu.0[..n].iter().all(|&x| x >= 0) && mu.total() == d as i64 * *deg as i64
            }
        }
    }

    /// Lattice points of d·Δ in lexicographic order.
    pub fn degree_points(&self, d: u32) -> Arc<Vec<Exponent>> {
        if let Some(v) = self.cache.lock().expect("cache lock").get(&d) {
            return v.clone();
        }
        let pts: Vec<Exponent> = match &self.shape {
            Shape::Polytope { poly, tri } => {
                poly.lattice_points(tri, d).iter().map(|p| Exponent::from_slice(p)).collect()
            }
            Shape::Simplex { deg } => {
                let mut out = Vec::new();
                compositions(self.n, (d * deg) as i32, &mut [0; MAX_VARS], 0, &mut out);
                out.sort();
                out
            }
        };
        let pts = Arc::new(pts);
        self.cache.lock().expect("cache lock").insert(d, pts.clone());
        pts
    }

    /// All monomials of degree d in term order.
    pub fn monomial_basis(&self, d: u32) -> Vec<ConeMonomial> {
        self.degree_points(d).iter().map(|&mu| ConeMonomial { d, mu }).collect()
    }

    /// Whether a monomial is divisible by x_1 ... x_n, optionally ignoring one variable.
    pub fn divisible(&self, mu: &Exponent, skip: Option<usize>) -> bool {
        (0..self.n).all(|i| Some(i) == skip || mu.0[i] >= 1)
    }
}

fn compositions(n: usize, total: i32, cur: &mut [i32; MAX_VARS], i: usize, out: &mut Vec<Exponent>) {
    if i + 1 == n {
        cur[i] = total;
        out.push(Exponent(*cur));
        cur[i] = 0;
        return;
    }
    for x in 0..=total {
        cur[i] = x;
        compositions(n, total - x, cur, i + 1, out);
    }
    cur[i] = 0;
}

/// A finite sum of cone monomials with coefficients in R; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConeElement {
    pub terms: BTreeMap<ConeMonomial, RingElement>,
}

impl ConeElement {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn monomial(m: ConeMonomial, c: RingElement) -> Self {
        let mut e = Self::new();
        if !c.is_zero() {
            e.terms.insert(m, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, ctx: &RingContext, m: ConeMonomial, c: &RingElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                ctx.add_assign(x, c);
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add(&self, ctx: &RingContext, other: &ConeElement) -> ConeElement {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(ctx, *m, c);
        }
        out
    }

    pub fn scale(&self, ctx: &RingContext, c: &RingElement) -> ConeElement {
        let mut out = ConeElement::new();
        for (m, x) in &self.terms {
            out.add_term(ctx, *m, &ctx.mul(x, c));
        }
        out
    }

    /// Product in the monoid algebra; fails if a product monomial leaves the cone.
    pub fn mul(&self, ctx: &RingContext, other: &ConeElement, cone: &Cone) -> Result<ConeElement> {
        let mut out = ConeElement::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = ConeMonomial { d: m1.d + m2.d, mu: m1.mu.add(&m2.mu) };
                if !cone.contains(m.d, &m.mu) {
                    return Err(Error::PrecisionOrLogicError(format!("product monomial {m:?} left the cone")));
                }
                out.add_term(ctx, m, &ctx.mul(c1, c2));
            }
        }
        Ok(out)
    }

    pub fn leading_monomial(&self) -> Result<ConeMonomial> {
        self.terms.keys().next_back().copied().ok_or(Error::EmptyElement)
    }

    /// Text form `c * (pi*w)^d * x^(mu) + ...` in term order.
    pub fn to_text(&self, n: usize) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(m, c)| {
                let mu: Vec<String> = m.mu.0[..n].iter().map(|x| x.to_string()).collect();
                format!("{c} * (pi*w)^{} * x^({})", m.d, mu.join(","))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::FieldSpec;
    use crate::polytope::hull_and_triangulate;
    use proptest::prelude::*;

    fn elliptic_cone() -> Cone {
        let (p, t) = hull_and_triangulate(&[vec![0, 0], vec![3, 0], vec![0, 2], vec![1, 0]]).unwrap();
        Cone::from_polytope(Mode::Toric, p, t).unwrap()
    }

    fn ctx() -> RingContext {
        RingContext::new(&FieldSpec::new(5, 1, None, 4).unwrap()).unwrap()
    }

    #[test]
    fn basis_sizes() {
        let c = elliptic_cone();
        assert_eq!(c.monomial_basis(0).len(), 1);
        assert_eq!(c.monomial_basis(1).len(), 7);
        let poly = c.polytope().unwrap();
        for d in 0..=4 {
            assert_eq!(c.monomial_basis(d).len(), poly.lattice_points_by_box(d).len());
        }
        let pr = Cone::projective(3, 3).unwrap();
        assert_eq!(pr.monomial_basis(1).len(), 10);
        assert!(pr.contains(2, &Exponent::from_slice(&[2, 2, 2])));
        assert!(!pr.contains(2, &Exponent::from_slice(&[2, 2, 1])));
    }

    #[test]
    fn leading_monomial_respects_grading() {
        let r = ctx();
        assert_eq!(ConeElement::new().leading_monomial(), Err(Error::EmptyElement));
        let a = ConeMonomial { d: 1, mu: Exponent::from_slice(&[1, 0]) };
        let b = ConeMonomial { d: 2, mu: Exponent::from_slice(&[2, 0]) };
        let mut g = ConeElement::monomial(a, r.one());
        assert_eq!(g.leading_monomial().unwrap(), a);
        g.add_term(&r, b, &r.one());
        assert_eq!(g.leading_monomial().unwrap(), b);
        g.add_term(&r, ConeMonomial { d: 0, mu: Exponent::default() }, &r.from_int(3));
        assert_eq!(g.leading_monomial().unwrap(), b);
        assert_eq!(
            g.to_text(2),
            "3 * (pi*w)^0 * x^(0,0) + 1 * (pi*w)^1 * x^(1,0) + 1 * (pi*w)^2 * x^(2,0)"
        );
    }

    #[test]
    fn products_stay_in_cone() {
        let r = ctx();
        let c = elliptic_cone();
        let x: ConeElement = {
            let mut e = ConeElement::new();
            for mu in c.degree_points(1).iter() {
                e.add_term(&r, ConeMonomial { d: 1, mu: *mu }, &r.from_int(mu.total() + 1));
            }
            e
        };
        let y = x.mul(&r, &x, &c).unwrap();
        for m in y.terms.keys() {
            assert_eq!(m.d, 2);
            assert!(c.contains(2, &m.mu));
        }
    }

    proptest! {
        #[test]
        fn term_order_is_total(a in (0u32..3, -2i32..3, -2i32..3), b in (0u32..3, -2i32..3, -2i32..3), c in (0u32..3, -2i32..3, -2i32..3)) {
            let mk = |t: (u32, i32, i32)| ConeMonomial { d: t.0, mu: Exponent::from_slice(&[t.1 as i64, t.2 as i64]) };
            let (x, y, z) = (mk(a), mk(b), mk(c));
            prop_assert_eq!(x <= y && y <= x, x == y);
            if x <= y && y <= z {
                prop_assert!(x <= z);
            }
            if x.d < y.d {
                prop_assert!(x < y);
            }
        }
    }
}
