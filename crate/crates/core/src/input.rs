//! Polynomials over F_q and the JSON problem description.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::cone::{Mode, MAX_VARS};
use crate::error::{Error, Result};
use crate::padic::FieldSpec;

/// A (Laurent) polynomial over F_q; coefficients are F_p coordinates on the field generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FqPolynomial {
    pub n: usize,
    /// Sorted by exponent, no zero coefficients, each coefficient of length a.
    pub terms: Vec<(Vec<i64>, Vec<u64>)>,
}

impl FqPolynomial {
    /// Merges duplicate exponents and reduces coefficients mod p. A zero coefficient is an error.
    pub fn new(n: usize, p: u64, a: usize, terms: &[(Vec<i64>, Vec<i64>)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("at least one variable is required".into()));
        }
        if n > MAX_VARS {
            return Err(Error::DimensionTooLarge(n));
        }
        if terms.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut map: BTreeMap<Vec<i64>, Vec<u64>> = BTreeMap::new();
        for (exp, coeff) in terms {
            if exp.len() != n {
                return Err(Error::InvalidInput(format!("exponent {exp:?} does not have {n} entries")));
            }
            if exp.iter().any(|e| e.abs() > 1 << 20) {
                return Err(Error::InvalidInput(format!("exponent {exp:?} too large")));
            }
            if coeff.len() > a {
                return Err(Error::InvalidInput(format!("coefficient {coeff:?} has more than {a} entries")));
            }
            let mut c = vec![0u64; a];
            for (i, &x) in coeff.iter().enumerate() {
                c[i] = x.rem_euclid(p as i64) as u64;
            }
            if c.iter().all(|&x| x == 0) {
                return Err(Error::InvalidInput(format!("zero coefficient at exponent {exp:?}")));
            }
            let e = map.entry(exp.clone()).or_insert_with(|| vec![0; a]);
            for (x, y) in e.iter_mut().zip(&c) {
                *x = (*x + y) % p;
            }
        }
        let terms: Vec<_> = map.into_iter().filter(|(_, c)| c.iter().any(|&x| x != 0)).collect();
        if terms.is_empty() {
            return Err(Error::EmptySupport);
        }
        Ok(FqPolynomial { n, terms })
    }

    pub fn support(&self) -> Vec<Vec<i64>> {
        self.terms.iter().map(|(e, _)| e.clone()).collect()
    }

    /// The common total degree, if the polynomial is homogeneous.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let d: i64 = self.terms[0].0.iter().sum();
        self.terms.iter().all(|(e, _)| e.iter().sum::<i64>() == d).then_some(d)
    }

    /// Nonzero constant term and a pure power of every variable.
    pub fn is_convenient(&self) -> bool {
        let has_const = self.terms.iter().any(|(e, _)| e.iter().all(|&x| x == 0));
        has_const
            && (0..self.n).all(|i| {
                self.terms
                    .iter()
                    .any(|(e, _)| e[i] > 0 && e.iter().enumerate().all(|(j, &x)| j == i || x == 0))
            })
    }

    /// The image under the monomial change of variables x^nu -> x^(U nu + t).
    pub fn transform(&self, u: &[Vec<i64>], t: &[i64]) -> FqPolynomial {
        let mut terms: Vec<_> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let img: Vec<i64> =
                    (0..self.n).map(|i| t[i] + (0..self.n).map(|j| u[i][j] * e[j]).sum::<i64>()).collect();
                (img, c.clone())
            })
            .collect();
        terms.sort();
        FqPolynomial { n: self.n, terms }
    }

    /// Checks the support against the requirements of a mode.
    pub fn check_mode(&self, mode: Mode, p: u64) -> Result<()> {
        match mode {
            Mode::Toric => Ok(()),
            Mode::Affine => {
                if self.terms.iter().any(|(e, _)| e.iter().any(|&x| x < 0)) {
                    return Err(Error::InvalidInput("affine mode needs nonnegative exponents".into()));
                }
                if !self.is_convenient() {
                    return Err(Error::InvalidInput(
                        "affine mode needs a nonzero constant term and a pure power of every variable".into(),
                    ));
                }
                Ok(())
            }
            Mode::Projective => {
                if self.terms.iter().any(|(e, _)| e.iter().any(|&x| x < 0)) {
                    return Err(Error::InvalidInput("projective mode needs nonnegative exponents".into()));
                }
                let d = self
                    .homogeneous_degree()
                    .ok_or_else(|| Error::InvalidInput("projective mode needs a homogeneous polynomial".into()))?;
                if d <= 0 || (d as u64).is_multiple_of(p) {
                    return Err(Error::InvalidInput(format!("projective degree {d} must be positive and prime to p")));
                }
                if self.n < 2 {
                    return Err(Error::InvalidInput("projective mode needs at least two variables".into()));
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldPoly {
    Coefficients(Vec<i64>),
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSpec {
    pub exp: Vec<i64>,
    pub coeff: Vec<i64>,
}

/// The JSON input file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub p: u64,
    #[serde(default = "one")]
    pub a: usize,
    #[serde(default = "conway")]
    pub field_poly: FieldPoly,
    pub n: usize,
    pub mode: Mode,
    pub terms: Vec<TermSpec>,
    #[serde(default)]
    pub precision: Option<u32>,
    #[serde(default)]
    pub confine: bool,
}

fn one() -> usize {
    1
}

fn conway() -> FieldPoly {
    FieldPoly::Named("conway".into())
}

/// A validated problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub field: FieldSpec,
    pub mode: Mode,
    pub poly: FqPolynomial,
    pub precision: Option<u32>,
    pub confine: bool,
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed input: {e}")))
    }

    pub fn validate(&self) -> Result<Problem> {
        let hbar = match &self.field_poly {
            FieldPoly::Named(s) if s == "conway" => None,
            FieldPoly::Named(s) => return Err(Error::InvalidFieldSpec(format!("unknown field polynomial {s:?}"))),
            FieldPoly::Coefficients(c) => {
                if self.p == 0 {
                    return Err(Error::InvalidFieldSpec("p must be positive".into()));
                }
                Some(c.iter().map(|&x| x.rem_euclid(self.p as i64) as u64).collect())
            }
        };
        if self.n > MAX_VARS {
            return Err(Error::DimensionTooLarge(self.n));
        }
        let field = FieldSpec::new(self.p, self.a, hbar, self.precision.unwrap_or(1).max(1))?;
        let terms: Vec<_> = self.terms.iter().map(|t| (t.exp.clone(), t.coeff.clone())).collect();
        let poly = FqPolynomial::new(self.n, self.p, self.a, &terms)?;
        poly.check_mode(self.mode, self.p)?;
        if self.precision == Some(0) {
            return Err(Error::InvalidInput("precision must be positive".into()));
        }
        Ok(Problem { field, mode: self.mode, poly, precision: self.precision, confine: self.confine })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ELLIPTIC: &str = r#"{"p":5,"a":1,"field_poly":"conway","n":2,"mode":"affine",
        "terms":[{"exp":[3,0],"coeff":[1]},{"exp":[1,0],"coeff":[2]},{"exp":[0,0],"coeff":[1]},{"exp":[0,2],"coeff":[-1]}],
        "precision":null,"confine":false}"#;

    #[test]
    fn parses_elliptic() {
        let p = ProblemSpec::from_json(ELLIPTIC).unwrap().validate().unwrap();
        assert_eq!(p.poly.terms.len(), 4);
        assert_eq!(p.poly.terms[1], (vec![0, 2], vec![4]));
        assert!(p.poly.is_convenient());
        assert_eq!(p.mode, Mode::Affine);
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = ELLIPTIC.replace("\"coeff\":[2]", "\"coeff\":[5]");
        assert!(matches!(ProblemSpec::from_json(&bad).unwrap().validate(), Err(Error::InvalidInput(_))));
        let bad = ELLIPTIC.replace("\"p\":5", "\"p\":2");
        assert_eq!(ProblemSpec::from_json(&bad).unwrap().validate().unwrap_err(), Error::UnsupportedCharacteristic(2));
        let bad = ELLIPTIC.replace("{\"exp\":[0,0],\"coeff\":[1]},", "");
        assert!(matches!(ProblemSpec::from_json(&bad).unwrap().validate(), Err(Error::InvalidInput(_))));
        assert!(matches!(ProblemSpec::from_json("{").unwrap_err(), Error::InvalidInput(_)));
        assert_eq!(FqPolynomial::new(2, 5, 1, &[]).unwrap_err(), Error::EmptySupport);
        assert_eq!(FqPolynomial::new(7, 5, 1, &[]).unwrap_err(), Error::DimensionTooLarge(7));
    }

    #[test]
    fn projective_checks() {
        let cubic = FqPolynomial::new(3, 5, 1, &[(vec![3, 0, 0], vec![1]), (vec![0, 3, 0], vec![1]), (vec![0, 0, 3], vec![1])]).unwrap();
        assert!(cubic.check_mode(Mode::Projective, 5).is_ok());
        assert!(cubic.check_mode(Mode::Projective, 3).is_err());
        let inhom = FqPolynomial::new(2, 5, 1, &[(vec![3, 0], vec![1]), (vec![0, 2], vec![1])]).unwrap();
        assert!(inhom.check_mode(Mode::Projective, 5).is_err());
    }
}
