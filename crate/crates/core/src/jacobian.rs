//! Echelon forms of the Jacobian relations in each degree and the monomial basis of the
//! Jacobian ring.

use std::collections::HashMap;

use crate::cone::{Cone, ConeElement, ConeMonomial, Exponent, Mode};
use crate::error::{Error, Result};
use crate::input::FqPolynomial;
use crate::padic::{RingContext, RingElement};

/// f with Teichmuller coefficients, and the coefficients of f_0 = f and f_i = x_i df/dx_i.
#[derive(Clone, Debug)]
pub struct LiftedPolynomial {
    pub n: usize,
    pub support: Vec<Exponent>,
    pub coeffs: Vec<RingElement>,
    /// `generators[g][k]` is the coefficient of x^support[k] in f_g.
    pub generators: Vec<Vec<RingElement>>,
}

impl LiftedPolynomial {
    pub fn lift(ctx: &RingContext, f: &FqPolynomial) -> Result<Self> {
        let n = f.n;
        let mut support = Vec::new();
        let mut coeffs = Vec::new();
        for (e, c) in &f.terms {
            if c.iter().all(|&x| x % ctx.p() == 0) {
                return Err(Error::InvalidInput(format!("zero coefficient at exponent {e:?}")));
            }
            support.push(Exponent::from_slice(e));
            coeffs.push(ctx.teichmuller_of_residue(c)?);
        }
        let mut generators = vec![coeffs.clone()];
        for i in 0..n {
            generators.push(
                support
                    .iter()
                    .zip(&coeffs)
                    .map(|(e, c)| ctx.mul(&ctx.from_int(e.0[i] as i64), c))
                    .collect(),
            );
        }
        Ok(LiftedPolynomial { n, support, coeffs, generators })
    }

    /// (pi w) f_g as an element of degree one.
    pub fn generator_element(&self, ctx: &RingContext, g: usize) -> ConeElement {
        let mut out = ConeElement::new();
        for (e, c) in self.support.iter().zip(&self.generators[g]) {
            out.add_term(ctx, ConeMonomial { d: 1, mu: *e }, c);
        }
        out
    }
}

/// The relation D_i xi = x_i d(xi)/dx_i + (pi w) f_i xi, where x_0 d/dx_0 multiplies by the w-degree.
pub fn derivation(ctx: &RingContext, f: &LiftedPolynomial, i: usize, xi: &ConeElement) -> ConeElement {
    let mut out = ConeElement::new();
    for (m, c) in &xi.terms {
        let k = if i == 0 { m.d as i64 } else { m.mu.0[i - 1] as i64 };
        out.add_term(ctx, *m, &ctx.mul(&ctx.from_int(k), c));
        for (e, g) in f.support.iter().zip(&f.generators[i]) {
            out.add_term(ctx, ConeMonomial { d: m.d + 1, mu: m.mu.add(e) }, &ctx.mul(g, c));
        }
    }
    out
}

/// Which monomials of the cone carry the Jacobian ring in the given mode.
pub fn column_allowed(mode: Mode, n: usize, mu: &Exponent) -> bool {
    match mode {
        Mode::Toric => true,
        Mode::Affine | Mode::Projective => (0..n).all(|i| mu.0[i] >= 1),
    }
}

/// Whether m (f_g) is one of the spanning relations in the given mode.
pub fn row_allowed(mode: Mode, n: usize, g: usize, m: &Exponent) -> bool {
    match mode {
        Mode::Toric => true,
        Mode::Affine | Mode::Projective => (0..n).all(|j| j + 1 == g || m.0[j] >= 1),
    }
}

/// The generators f_g taking part in the relations.
pub fn generator_indices(mode: Mode, n: usize) -> Vec<usize> {
    match mode {
        Mode::Toric | Mode::Affine => (0..=n).collect(),
        Mode::Projective => (1..=n).collect(),
    }
}

/// A row of M_d = T_d J_d with a unit pivot, normalized to 1.
#[derive(Clone, Debug)]
pub struct PivotRow {
    pub column: usize,
    /// Entries of the echelon row in non-pivot columns (column index, value).
    pub reduced: Vec<(usize, RingElement)>,
    /// The transform row: the echelon row equals sum over r of transform[r] * J_d[r].
    pub transform: Vec<(usize, RingElement)>,
}

/// Echelon data of one degree.
#[derive(Clone, Debug)]
pub struct DegreeEchelon {
    pub d: u32,
    pub columns: Vec<Exponent>,
    pub col_index: HashMap<Exponent, usize>,
    /// (generator g, cofactor monomial m of degree d - 1) for each row m (pi w) f_g.
    pub rows: Vec<(usize, Exponent)>,
    /// Sparse rows of J_d.
    pub j: Vec<Vec<(usize, RingElement)>>,
    /// For each column, the index into `pivots` of its pivot row.
    pub pivot_of: Vec<Option<usize>>,
    pub pivots: Vec<PivotRow>,
    pub nonpivot: Vec<usize>,
}

impl DegreeEchelon {
    /// Checks M_d = T_d J_d for every stored pivot row.
    pub fn check_identity(&self, ctx: &RingContext) -> bool {
        self.pivots.iter().all(|pr| {
            let mut row = vec![ctx.zero(); self.columns.len()];
            for (r, t) in &pr.transform {
                for (c, x) in &self.j[*r] {
                    ctx.mul_add_assign(&mut row[*c], t, x);
                }
            }
            let mut expect = vec![ctx.zero(); self.columns.len()];
            expect[pr.column] = ctx.one();
            for (c, x) in &pr.reduced {
                expect[*c] = x.clone();
            }
            row == expect
        })
    }
}

#[derive(Clone, Debug)]
pub struct EchelonData {
    pub mode: Mode,
    pub n: usize,
    pub generators: Vec<usize>,
    /// Indexed by degree 0..=n+2.
    pub degrees: Vec<DegreeEchelon>,
}

/// The monomials V of degree at most n + 1 whose classes form a basis of the Jacobian ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    pub elements: Vec<ConeMonomial>,
    pub index: HashMap<ConeMonomial, usize>,
}

impl MonomialBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn degree_part(&self, d: u32) -> Vec<ConeMonomial> {
        self.elements.iter().filter(|m| m.d == d).copied().collect()
    }
}

fn echelon_degree(
    ctx: &RingContext,
    cone: &Cone,
    f: &LiftedPolynomial,
    generators: &[usize],
    d: u32,
) -> Result<DegreeEchelon> {
    let n = cone.n;
    let mode = cone.mode;
    let columns: Vec<Exponent> =
        cone.degree_points(d).iter().filter(|mu| column_allowed(mode, n, mu)).copied().collect();
    let col_index: HashMap<Exponent, usize> = columns.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut rows = Vec::new();
    let mut j = Vec::new();
    if d >= 1 {
        let prev = cone.degree_points(d - 1);
        for &g in generators {
            for m in prev.iter().filter(|m| row_allowed(mode, n, g, m)) {
                let mut row = Vec::new();
                for (e, c) in f.support.iter().zip(&f.generators[g]) {
                    if c.is_zero() {
                        continue;
                    }
                    let mu = m.add(e);
                    let col = *col_index.get(&mu).ok_or_else(|| {
                        Error::PrecisionOrLogicError(format!("relation monomial {mu:?} outside the column set"))
                    })?;
                    row.push((col, c.clone()));
                }
                row.sort_by_key(|x| x.0);
                rows.push((g, *m));
                j.push(row);
            }
        }
    }
    let nc = columns.len();
    let nr = rows.len();
    let width = nc + nr;
    let mut w: Vec<Vec<RingElement>> = (0..nr)
        .map(|r| {
            let mut v = vec![ctx.zero(); width];
            for (c, x) in &j[r] {
                v[*c] = x.clone();
            }
            v[nc + r] = ctx.one();
            v
        })
        .collect();
    let mut used = vec![false; nr];
    let mut pivot_rows: Vec<(usize, usize)> = Vec::new();
    let mut is_pivot = vec![false; nc];
    // Largest monomials are eliminated first, so the basis consists of the smallest ones.
    for c in (0..nc).rev() {
        let Some(r) = (0..nr).find(|&r| !used[r] && ctx.is_unit(&w[r][c])) else {
            continue;
        };
        let inv = ctx.inv(&w[r][c])?;
        let pivot_row: Vec<RingElement> = w[r].iter().map(|x| ctx.mul(x, &inv)).collect();
        let nz: Vec<usize> = (0..width).filter(|&k| !pivot_row[k].is_zero()).collect();
        for (r2, row) in w.iter_mut().enumerate() {
            if r2 == r || row[c].is_zero() {
                continue;
            }
            let factor = ctx.neg(&row[c]);
            for &k in &nz {
                ctx.mul_add_assign(&mut row[k], &factor, &pivot_row[k]);
            }
        }
        w[r] = pivot_row;
        used[r] = true;
        is_pivot[c] = true;
        pivot_rows.push((c, r));
    }
    for r in 0..nr {
        if !used[r] && w[r][..nc].iter().any(|x| !x.is_zero()) {
            return Err(Error::NondegeneracyFailure(format!(
                "degree {d}: a relation has no unit pivot (non-unit remainder)"
            )));
        }
    }
    let nonpivot: Vec<usize> = (0..nc).filter(|&c| !is_pivot[c]).collect();
    let mut pivot_of = vec![None; nc];
    let pivots = pivot_rows
        .iter()
        .enumerate()
        .map(|(k, &(c, r))| {
            pivot_of[c] = Some(k);
            PivotRow {
                column: c,
                reduced: nonpivot.iter().filter(|&&q| !w[r][q].is_zero()).map(|&q| (q, w[r][q].clone())).collect(),
                transform: (0..nr).filter(|&t| !w[r][nc + t].is_zero()).map(|t| (t, w[r][nc + t].clone())).collect(),
            }
        })
        .collect();
    Ok(DegreeEchelon { d, columns, col_index, rows, j, pivot_of, pivots, nonpivot })
}

/// Builds the echelon data in degrees 0..=n+2 and extracts the monomial basis.
pub fn build_jacobian(
    ctx: &RingContext,
    cone: &Cone,
    f: &LiftedPolynomial,
) -> Result<(EchelonData, MonomialBasis)> {
    let n = cone.n;
    let mode = cone.mode;
    let generators = generator_indices(mode, n);
    let mut degrees = Vec::new();
    for d in 0..=(n as u32 + 2) {
        degrees.push(echelon_degree(ctx, cone, f, &generators, d)?);
    }
    let top = &degrees[n + 2];
    if !top.nonpivot.is_empty() {
        return Err(Error::NondegeneracyFailure(format!(
            "{} monomials of degree {} are not reducible",
            top.nonpivot.len(),
            n + 2
        )));
    }
    let mut elements = Vec::new();
    for deg in &degrees[..=n + 1] {
        for &c in &deg.nonpivot {
            elements.push(ConeMonomial { d: deg.d, mu: deg.columns[c] });
        }
    }
    if mode == Mode::Toric {
        let nvol = cone.polytope().map(|p| p.nvol).unwrap_or(0);
        if elements.len() as u64 != nvol {
            return Err(Error::NondegeneracyFailure(format!(
                "basis has {} elements but the normalized volume is {nvol}",
                elements.len()
            )));
        }
    }
    let index = elements.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    Ok((EchelonData { mode, n, generators, degrees }, MonomialBasis { elements, index }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::FieldSpec;
    use crate::polytope::hull_and_triangulate;

    pub(crate) fn setup(p: u64, mode: Mode, terms: &[(Vec<i64>, Vec<i64>)], n: usize) -> (RingContext, Cone, LiftedPolynomial) {
        let ctx = RingContext::new(&FieldSpec::new(p, 1, None, 4).unwrap()).unwrap();
        let f = FqPolynomial::new(n, p, 1, terms).unwrap();
        let cone = match mode {
            Mode::Projective => Cone::projective(n, f.homogeneous_degree().unwrap() as u32).unwrap(),
            _ => {
                let (poly, tri) = hull_and_triangulate(&f.support()).unwrap();
                Cone::from_polytope(mode, poly, tri).unwrap()
            }
        };
        let lf = LiftedPolynomial::lift(&ctx, &f).unwrap();
        (ctx, cone, lf)
    }

    fn elliptic(a: i64, b: i64) -> Vec<(Vec<i64>, Vec<i64>)> {
        vec![(vec![3, 0], vec![1]), (vec![1, 0], vec![a]), (vec![0, 0], vec![b]), (vec![0, 2], vec![-1])]
    }

    #[test]
    fn lift_elliptic_generators() {
        let (ctx, _, f) = setup(7, Mode::Affine, &elliptic(2, 3), 2);
        // support sorted: (0,0), (0,2), (1,0), (3,0)
        assert_eq!(f.support[3], Exponent::from_slice(&[3, 0]));
        assert_eq!(f.generators[1][3], ctx.from_int(3));
        assert_eq!(f.generators[1][2], f.coeffs[2]);
        assert_eq!(f.generators[2][1], ctx.from_int(-2));
        assert!(f.generators[1][0].is_zero());
    }

    #[test]
    fn elliptic_affine_basis() {
        let (ctx, cone, f) = setup(7, Mode::Affine, &elliptic(2, 3), 2);
        let (ech, v) = build_jacobian(&ctx, &cone, &f).unwrap();
        let want = vec![
            ConeMonomial { d: 1, mu: Exponent::from_slice(&[1, 1]) },
            ConeMonomial { d: 2, mu: Exponent::from_slice(&[1, 1]) },
        ];
        assert_eq!(v.elements, want);
        for deg in &ech.degrees {
            assert!(deg.check_identity(&ctx));
        }
    }

    #[test]
    fn elliptic_toric_basis_has_volume_size() {
        let (ctx, cone, f) = setup(5, Mode::Toric, &elliptic(1, 1), 2);
        let (_, v) = build_jacobian(&ctx, &cone, &f).unwrap();
        assert_eq!(v.len(), 6);
        assert_eq!(v.elements[0], ConeMonomial { d: 0, mu: Exponent::default() });
    }

    #[test]
    fn fermat_affine_basis_closed_form() {
        for (p, m1, m2) in [(5u64, 2i64, 3i64), (7, 3, 4), (5, 4, 4), (7, 2, 2)] {
            let terms = vec![(vec![m1, 0], vec![2]), (vec![0, m2], vec![3]), (vec![0, 0], vec![1])];
            let (ctx, cone, f) = setup(p, Mode::Affine, &terms, 2);
            let (_, v) = build_jacobian(&ctx, &cone, &f).unwrap();
            let mut want = Vec::new();
            for d in 1..=3u32 {
                for x in 1..m1 {
                    for y in 1..m2 {
                        // d - 1 < x/m1 + y/m2 <= d
                        let s = x * m2 + y * m1;
                        if (d as i64 - 1) * m1 * m2 < s && s <= d as i64 * m1 * m2 {
                            want.push(ConeMonomial { d, mu: Exponent::from_slice(&[x, y]) });
                        }
                    }
                }
            }
            want.sort();
            assert_eq!(v.elements, want, "m = ({m1}, {m2})");
        }
    }

    #[test]
    fn projective_cubic_basis() {
        let terms = vec![(vec![3, 0, 0], vec![1]), (vec![0, 3, 0], vec![1]), (vec![0, 0, 3], vec![1])];
        let (ctx, cone, f) = setup(7, Mode::Projective, &terms, 3);
        let (_, v) = build_jacobian(&ctx, &cone, &f).unwrap();
        // genus one: x y z in degree 1 and x^2 y^2 z^2 in degree 2
        assert_eq!(v.len(), 2);
        assert_eq!(v.elements[0].mu, Exponent::from_slice(&[1, 1, 1]));
        assert_eq!(v.elements[1].mu, Exponent::from_slice(&[2, 2, 2]));
    }

    #[test]
    fn degenerate_detected() {
        // (x + 1)^2 is degenerate on the segment face
        let terms = vec![(vec![2], vec![1]), (vec![1], vec![2]), (vec![0], vec![1])];
        let (ctx, cone, f) = setup(5, Mode::Toric, &terms, 1);
        assert!(matches!(build_jacobian(&ctx, &cone, &f), Err(Error::NondegeneracyFailure(_))));
    }

    #[test]
    fn pivot_set_independent_of_row_order() {
        let (ctx, cone, f) = setup(7, Mode::Toric, &elliptic(3, 2), 2);
        let (ech, _) = build_jacobian(&ctx, &cone, &f).unwrap();
        let mut g: Vec<usize> = generator_indices(Mode::Toric, 2);
        g.reverse();
        for d in 0..=4 {
            let other = echelon_degree(&ctx, &cone, &f, &g, d).unwrap();
            assert_eq!(other.nonpivot, ech.degrees[d as usize].nonpivot);
        }
    }

    #[test]
    fn derivation_is_linear() {
        let (ctx, _, f) = setup(5, Mode::Toric, &elliptic(1, 2), 2);
        let a = ConeElement::monomial(ConeMonomial { d: 1, mu: Exponent::from_slice(&[1, 0]) }, ctx.from_int(3));
        let b = ConeElement::monomial(ConeMonomial { d: 2, mu: Exponent::from_slice(&[2, 1]) }, ctx.from_int(7));
        for i in 0..=2 {
            let lhs = derivation(&ctx, &f, i, &a.add(&ctx, &b));
            let rhs = derivation(&ctx, &f, i, &a).add(&ctx, &derivation(&ctx, &f, i, &b));
            assert_eq!(lhs, rhs);
        }
    }
}
