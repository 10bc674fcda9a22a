use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use dwork_zeta::cone::Mode;
use dwork_zeta::frobenius::Expansion;
use dwork_zeta::input::{FieldPoly, Problem as CoreProblem, ProblemSpec, TermSpec};
use dwork_zeta::pipeline::{self, Options, Report as CoreReport};
use dwork_zeta::polytope::{hull_and_triangulate, LatticePolytope};
use dwork_zeta::{oracle, zeta, Error};

create_exception!(pydwork, DworkError, PyValueError);

fn err(e: Error) -> PyErr {
    DworkError::new_err(format!("{}: {e}", e.name()))
}

fn parse_mode(s: &str) -> PyResult<Mode> {
    match s {
        "toric" => Ok(Mode::Toric),
        "affine" => Ok(Mode::Affine),
        "projective" => Ok(Mode::Projective),
        _ => Err(PyValueError::new_err(format!("unknown mode {s:?}"))),
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Toric => "toric",
        Mode::Affine => "affine",
        Mode::Projective => "projective",
    }
}

/// A hypersurface over F_q given by a Laurent polynomial.
#[pyclass(frozen)]
pub struct Problem {
    inner: CoreProblem,
}

#[pymethods]
impl Problem {
    /// `terms` is a list of (exponent, coefficient) pairs; each coefficient lists the
    /// F_p-coordinates on the generator of F_q, or is a plain integer when a = 1.
    #[new]
    #[pyo3(signature = (p, n, mode, terms, a=1, field_poly=None))]
    fn new(p: u64, n: usize, mode: &str, terms: Vec<(Vec<i64>, Bound<'_, PyAny>)>, a: usize, field_poly: Option<Vec<i64>>) -> PyResult<Self> {
        let terms = terms
            .into_iter()
            .map(|(exp, c)| {
                let coeff = match c.extract::<i64>() {
                    Ok(x) => vec![x],
                    Err(_) => c.extract::<Vec<i64>>()?,
                };
                Ok(TermSpec { exp, coeff })
            })
            .collect::<PyResult<Vec<_>>>()?;
        let spec = ProblemSpec {
            p,
            a,
            field_poly: field_poly.map(FieldPoly::Coefficients).unwrap_or_else(|| FieldPoly::Named("conway".into())),
            n,
            mode: parse_mode(mode)?,
            terms,
            precision: None,
            confine: false,
        };
        Ok(Problem { inner: spec.validate().map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let spec = ProblemSpec::from_json(text).map_err(err)?;
        Ok(Problem { inner: spec.validate().map_err(err)? })
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.field.p
    }

    #[getter]
    fn a(&self) -> usize {
        self.inner.field.a
    }

    #[getter]
    fn q(&self) -> u64 {
        self.inner.field.q()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.poly.n
    }

    #[getter]
    fn mode(&self) -> &'static str {
        mode_name(self.inner.mode)
    }

    /// Exponents of the support.
    fn support(&self) -> Vec<Vec<i64>> {
        self.inner.poly.support()
    }

    /// #V(F_(q^r)) by exhaustive enumeration.
    #[pyo3(signature = (r, budget=oracle::DEFAULT_BUDGET))]
    fn count_points(&self, r: usize, budget: u128) -> PyResult<u128> {
        oracle::count_points(&self.inner.field, &self.inner.poly, self.inner.mode, r, budget).map_err(err)
    }

    /// Runs the full computation.
    #[pyo3(signature = (precision=None, expansion="fewnomial", confine=false, crude_precision=false, verify=None, counts=5, emit_matrix=false))]
    #[allow(clippy::too_many_arguments)]
    fn zeta(
        &self,
        py: Python<'_>,
        precision: Option<u32>,
        expansion: &str,
        confine: bool,
        crude_precision: bool,
        verify: Option<usize>,
        counts: usize,
        emit_matrix: bool,
    ) -> PyResult<Report> {
        let expansion = match expansion {
            "fewnomial" => Expansion::Fewnomial,
            "dense" => Expansion::Dense,
            other => return Err(PyValueError::new_err(format!("unknown expansion {other:?}"))),
        };
        let opts = Options { precision, crude_precision, expansion, confine, verify, emit_matrix, point_counts: counts, ..Options::default() };
        let inner = py.detach(|| pipeline::run(&self.inner, &opts)).map_err(err)?;
        Ok(Report { inner })
    }

    fn __repr__(&self) -> String {
        format!("Problem(p={}, a={}, n={}, mode={:?}, terms={})", self.p(), self.a(), self.n(), self.mode(), self.inner.poly.terms.len())
    }
}

/// The result of a zeta function computation.
#[pyclass(frozen)]
pub struct Report {
    inner: CoreReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn numerator(&self) -> Vec<i128> {
        self.inner.numerator.clone()
    }

    #[getter]
    fn denominator(&self) -> Vec<i128> {
        self.inner.denominator.clone()
    }

    #[getter]
    fn point_counts(&self) -> Vec<i128> {
        self.inner.point_counts.clone()
    }

    #[getter]
    fn v(&self) -> usize {
        self.inner.v
    }

    #[getter]
    fn precision_used(&self) -> u32 {
        self.inner.n_used
    }

    #[getter]
    fn mode(&self) -> &'static str {
        mode_name(self.inner.mode)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("reports serialize")
    }

    fn __repr__(&self) -> String {
        format!("Report(numerator={:?}, denominator={:?})", self.inner.numerator, self.inner.denominator)
    }
}

/// Convex hull of a lattice point set.
#[pyclass(frozen)]
pub struct Polytope {
    inner: LatticePolytope,
}

#[pymethods]
impl Polytope {
    #[new]
    fn new(points: Vec<Vec<i64>>) -> PyResult<Self> {
        let (inner, _) = hull_and_triangulate(&points).map_err(err)?;
        Ok(Polytope { inner })
    }

    #[getter]
    fn nvol(&self) -> u64 {
        self.inner.nvol
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<i64>> {
        self.inner.vertices.clone()
    }

    /// Facets as (normal, offset) with normal . x <= offset.
    #[getter]
    fn facets(&self) -> Vec<(Vec<i64>, i64)> {
        self.inner.facets.iter().map(|f| (f.normal.clone(), f.offset)).collect()
    }

    /// Lattice points of the d-th dilation.
    #[pyo3(signature = (d=1))]
    fn lattice_points(&self, d: u32) -> Vec<Vec<i64>> {
        self.inner.lattice_points_by_box(d)
    }
}

/// The rational function (numerator, denominator) matching the given point counts.
#[pyfunction]
fn zeta_from_counts(counts: Vec<i128>, num_deg: usize, den_deg: usize) -> PyResult<(Vec<i128>, Vec<i128>)> {
    oracle::zeta_from_counts(&counts, num_deg, den_deg).map_err(err)
}

/// Target precision for a characteristic polynomial of size v.
#[pyfunction]
#[pyo3(signature = (v, n, q, p, crude=false))]
fn precision_bound(v: u64, n: u32, q: u64, p: u64, crude: bool) -> u32 {
    if crude {
        zeta::crude_precision_bound(v, n, q, p)
    } else {
        zeta::precision_bound(v, n, q, p)
    }
}

#[pymodule]
fn pydwork(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_class::<Report>()?;
    m.add_class::<Polytope>()?;
    m.add_function(wrap_pyfunction!(zeta_from_counts, m)?)?;
    m.add_function(wrap_pyfunction!(precision_bound, m)?)?;
    m.add("DworkError", m.py().get_type::<DworkError>())?;
    Ok(())
}
