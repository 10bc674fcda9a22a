//! End-to-end computation: input problem to zeta function and report.

use serde::{Deserialize, Serialize};

use crate::cone::{Cone, ConeMonomial, Mode};
use crate::error::{Error, Result};
use crate::frobenius::{Expansion, FrobeniusExpander};
use crate::input::{FqPolynomial, Problem};
use crate::jacobian::{build_jacobian, EchelonData, LiftedPolynomial, MonomialBasis};
use crate::oracle;
use crate::padic::{FieldSpec, RingContext};
use crate::polytope::{confine, hull_and_triangulate, LatticePolytope};
use crate::reduction::{DivisorPolicy, Reducer};
use crate::zeta::{assemble_zeta, crude_precision_bound, precision_bound, FrobeniusMatrix, Matrix, ZetaFunction};

/// Automatic retries at two more digits when lifting fails the coefficient bound.
pub const PRECISION_RETRIES: u32 = 2;

#[derive(Clone, Debug)]
pub struct Options {
    pub precision: Option<u32>,
    pub crude_precision: bool,
    pub expansion: Expansion,
    pub confine: bool,
    pub verify: Option<usize>,
    pub emit_matrix: bool,
    pub point_counts: usize,
    pub policy: DivisorPolicy,
    pub budget: u128,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            precision: None,
            crude_precision: false,
            expansion: Expansion::Fewnomial,
            confine: false,
            verify: None,
            emit_matrix: false,
            point_counts: 5,
            policy: DivisorPolicy::First,
            budget: oracle::DEFAULT_BUDGET,
        }
    }
}

/// The polynomial actually fed to the Dwork machinery, its cone and the target precision.
pub struct Prepared {
    pub field: FieldSpec,
    pub mode: Mode,
    pub poly: FqPolynomial,
    pub cone: Cone,
    /// Size of the matrix whose characteristic polynomial is lifted.
    pub block_size: usize,
    /// Number of basis monomials.
    pub v: usize,
    pub precision: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeSummary {
    pub vertices: Vec<Vec<i64>>,
    pub facets: Vec<(Vec<i64>, i64)>,
    pub nvol: u64,
}

impl From<&LatticePolytope> for PolytopeSummary {
    fn from(p: &LatticePolytope) -> Self {
        PolytopeSummary {
            vertices: p.vertices.clone(),
            facets: p.facets.iter().map(|f| (f.normal.clone(), f.offset)).collect(),
            nvol: p.nvol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixReport {
    /// Entries are residues modulo p^precision, as coefficient vectors in the field generator.
    pub precision: u32,
    pub entries: Vec<Vec<Vec<u64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub r_max: usize,
    pub oracle_counts: Vec<i128>,
    pub computed_counts: Vec<i128>,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub mode: Mode,
    pub p: u64,
    pub a: usize,
    pub n: usize,
    pub v: usize,
    #[serde(rename = "N_used")]
    pub n_used: u32,
    pub numerator: Vec<i128>,
    pub denominator: Vec<i128>,
    pub point_counts: Vec<i128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polytope: Option<PolytopeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frobenius_matrix: Option<MatrixReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

/// Everything computed at one working precision.
pub struct FrobeniusComputation {
    pub ctx: RingContext,
    pub low: RingContext,
    pub lifted: LiftedPolynomial,
    pub echelon: EchelonData,
    pub basis: MonomialBasis,
    pub matrix: FrobeniusMatrix,
}

fn build_cone(mode: Mode, poly: &FqPolynomial) -> Result<Cone> {
    match mode {
        Mode::Projective => {
            let deg = poly.homogeneous_degree().ok_or_else(|| Error::InvalidInput("projective input must be homogeneous".into()))?;
            Cone::projective(poly.n, deg as u32)
        }
        Mode::Toric | Mode::Affine => {
            let (pl, tri) = hull_and_triangulate(&poly.support())?;
            Cone::from_polytope(mode, pl, tri)
        }
    }
}

/// Applies the optional confinement, builds the cone, sizes the basis and picks the precision.
pub fn prepare(problem: &Problem, opts: &Options) -> Result<Prepared> {
    let mut poly = problem.poly.clone();
    if opts.confine || problem.confine {
        if problem.mode != Mode::Toric {
            return Err(Error::InvalidInput("confinement changes coordinates and is only available in toric mode".into()));
        }
        let c = confine(&poly.support())?;
        poly = poly.transform(&c.u, &c.translation);
    }
    let cone = build_cone(problem.mode, &poly)?;
    // Pivots are units, so the basis is already determined modulo p.
    let ctx1 = RingContext::with_precision(&problem.field, 1)?;
    let lifted = LiftedPolynomial::lift(&ctx1, &poly)?;
    let (_, basis) = build_jacobian(&ctx1, &cone, &lifted)?;
    let v = basis.len();
    let block_size = if problem.mode == Mode::Toric { v - 1 } else { v };
    let q = problem.field.q();
    let n = poly.n as u32;
    let precision = match opts.precision.or(problem.precision) {
        Some(np) => np,
        None if block_size == 0 => 1,
        None if opts.crude_precision => crude_precision_bound(block_size as u64, n, q, problem.field.p),
        None => precision_bound(block_size as u64, n, q, problem.field.p),
    };
    Ok(Prepared { field: problem.field.clone(), mode: problem.mode, poly, cone, block_size, v, precision })
}

/// The Frobenius matrix at working precision N + a + 1.
pub fn frobenius_matrix(prep: &Prepared, precision: u32, expansion: Expansion, policy: DivisorPolicy) -> Result<FrobeniusComputation> {
    let n_work = precision + prep.field.a as u32 + 1;
    let ctx = RingContext::with_precision(&prep.field, n_work)?;
    let low = RingContext::with_precision(&prep.field, n_work - 1)?;
    let lifted = LiftedPolynomial::lift(&ctx, &prep.poly)?;
    let (echelon, basis) = build_jacobian(&ctx, &prep.cone, &lifted)?;
    let expander = FrobeniusExpander::new(&ctx, &lifted, expansion)?;
    let reducer = Reducer::new(&ctx, &prep.cone, &echelon, &basis).with_policy(policy);
    let v = basis.len();
    let mut entries: Matrix = vec![vec![ctx.zero(); v]; v];
    for (j, m) in basis.elements.iter().enumerate() {
        let image = expander.expand(&ctx, &prep.cone, m)?;
        let coords = reducer.reduce(&image)?;
        for (i, c) in coords.into_iter().enumerate() {
            entries[i][j] = c;
        }
    }
    Ok(FrobeniusComputation { ctx, low, lifted, echelon, basis, matrix: FrobeniusMatrix { mode: prep.mode, entries } })
}

/// Z(V, T) at the given target precision, without retries.
pub fn zeta_at(prep: &Prepared, precision: u32, opts: &Options) -> Result<(ZetaFunction, FrobeniusComputation)> {
    let comp = frobenius_matrix(prep, precision, opts.expansion, opts.policy)?;
    let z = assemble_zeta(&comp.ctx, &comp.low, prep.mode, prep.poly.n, &comp.matrix.entries, opts.point_counts)?;
    Ok((z, comp))
}

/// The basis monomials of a problem, computed modulo p.
pub fn basis_monomials(prep: &Prepared) -> Result<Vec<ConeMonomial>> {
    let ctx = RingContext::with_precision(&prep.field, 1)?;
    let lifted = LiftedPolynomial::lift(&ctx, &prep.poly)?;
    Ok(build_jacobian(&ctx, &prep.cone, &lifted)?.1.elements)
}

/// Runs the whole computation and assembles the report.
pub fn run(problem: &Problem, opts: &Options) -> Result<Report> {
    let prep = prepare(problem, opts)?;
    let mut opts = opts.clone();
    if let Some(r) = opts.verify {
        opts.point_counts = opts.point_counts.max(r);
    }
    let mut precision = prep.precision;
    let mut attempt = 0;
    let (zeta, comp) = loop {
        match zeta_at(&prep, precision, &opts) {
            Err(Error::InsufficientPrecision(_)) if attempt < PRECISION_RETRIES => {
                attempt += 1;
                precision += 2;
            }
            other => break other?,
        }
    };
    let verification = match opts.verify {
        Some(r) => {
            let mut oracle_counts = Vec::with_capacity(r);
            for k in 1..=r {
                oracle_counts.push(oracle::count_points(&prep.field, &problem.poly, prep.mode, k, opts.budget)? as i128);
            }
            let computed_counts = zeta.point_counts[..r].to_vec();
            let agrees = computed_counts == oracle_counts;
            if !agrees {
                return Err(Error::ConsistencyFailure(format!(
                    "computed point counts {computed_counts:?} differ from enumeration {oracle_counts:?}"
                )));
            }
            Some(Verification { r_max: r, oracle_counts, computed_counts, agrees })
        }
        None => None,
    };
    let frobenius_matrix = opts.emit_matrix.then(|| MatrixReport {
        precision: comp.ctx.precision(),
        entries: comp.matrix.entries.iter().map(|row| row.iter().map(|x| x.coeffs().to_vec()).collect()).collect(),
    });
    Ok(Report {
        mode: prep.mode,
        p: prep.field.p,
        a: prep.field.a,
        n: prep.poly.n,
        v: prep.v,
        n_used: precision,
        numerator: zeta.numerator,
        denominator: zeta.denominator,
        point_counts: zeta.point_counts,
        polytope: prep.cone.polytope().map(PolytopeSummary::from),
        frobenius_matrix,
        verification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::ProblemSpec;

    fn problem(p: u64, a: usize, mode: Mode, n: usize, terms: &[(Vec<i64>, Vec<i64>)]) -> Problem {
        let field = FieldSpec::new(p, a, None, 1).unwrap();
        let poly = FqPolynomial::new(n, p, a, terms).unwrap();
        poly.check_mode(mode, p).unwrap();
        Problem { field, mode, poly, precision: None, confine: false }
    }

    fn oracle_counts(pr: &Problem, r: usize) -> Vec<i128> {
        (1..=r).map(|k| oracle::count_points(&pr.field, &pr.poly, pr.mode, k, oracle::DEFAULT_BUDGET).unwrap() as i128).collect()
    }

    #[test]
    fn torus_line() {
        let pr = problem(5, 1, Mode::Toric, 1, &[(vec![1], vec![1]), (vec![0], vec![-1])]);
        let rep = run(&pr, &Options::default()).unwrap();
        assert_eq!(rep.v, 1);
        assert_eq!(rep.point_counts, vec![1; 5]);
    }

    #[test]
    fn elliptic_affine_matches_enumeration() {
        for p in [5u64, 7] {
            let aff = problem(p, 1, Mode::Affine, 2, &[(vec![3, 0], vec![1]), (vec![1, 0], vec![1]), (vec![0, 0], vec![1]), (vec![0, 2], vec![-1])]);
            let rep = run(&aff, &Options { verify: Some(3), ..Options::default() }).unwrap();
            assert_eq!(rep.v, 2);
            assert_eq!(rep.numerator.len(), 3);
            assert_eq!(rep.numerator[2], p as i128);
            let aq = -rep.numerator[1];
            assert_eq!(rep.point_counts[0], p as i128 - aq);
        }
    }

    #[test]
    fn toric_quadric_matches_enumeration() {
        let pr = problem(5, 1, Mode::Toric, 2, &[(vec![1, 0], vec![1]), (vec![0, 1], vec![1]), (vec![-1, -1], vec![1])]);
        let rep = run(&pr, &Options::default()).unwrap();
        assert_eq!(rep.v, 3);
        assert_eq!(rep.point_counts[..4], oracle_counts(&pr, 4)[..]);
    }

    #[test]
    fn projective_cubic_matches_enumeration() {
        let pr = problem(7, 1, Mode::Projective, 3, &[(vec![3, 0, 0], vec![1]), (vec![0, 3, 0], vec![1]), (vec![0, 0, 3], vec![2])]);
        let rep = run(&pr, &Options::default()).unwrap();
        assert_eq!(rep.point_counts[..3], oracle_counts(&pr, 3)[..]);
    }

    #[test]
    fn report_json_fields() {
        let spec = r#"{"p":5,"n":1,"mode":"toric","terms":[{"exp":[2],"coeff":[1]},{"exp":[0],"coeff":[-2]}],"precision":null,"confine":false}"#;
        let pr = ProblemSpec::from_json(spec).unwrap().validate().unwrap();
        let rep = run(&pr, &Options { emit_matrix: true, ..Options::default() }).unwrap();
        let json = serde_json::to_value(&rep).unwrap();
        for key in ["mode", "p", "a", "n", "v", "N_used", "numerator", "denominator", "point_counts", "frobenius_matrix"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        // x^2 = 2 has no roots in F_5 and two in F_25
        assert_eq!(rep.point_counts[..2], [0, 2]);
    }
}
