use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::kernel::KernelSpec;

/// A weighted sum-of-translates problem `F(y, t) = J(t) + Σ r_j K(t - y_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemJson", into = "ProblemJson")]
pub struct Problem {
    r: Vec<f64>,
    kernel: KernelSpec,
    field: FieldSpec,
}

/// Wire format: `{"n", "r", "kernel", "field"}`.
#[derive(Serialize, Deserialize)]
struct ProblemJson {
    n: usize,
    r: Vec<f64>,
    kernel: KernelSpec,
    field: FieldSpec,
}

impl TryFrom<ProblemJson> for Problem {
    type Error = Error;

    fn try_from(p: ProblemJson) -> Result<Self> {
        if p.n != p.r.len() {
            return Err(Error::Validation(format!("n = {} but {} exponents given", p.n, p.r.len())));
        }
        Problem::new(p.r, p.kernel, p.field)
    }
}

impl From<Problem> for ProblemJson {
    fn from(p: Problem) -> Self {
        ProblemJson { n: p.r.len(), r: p.r, kernel: p.kernel, field: p.field }
    }
}

impl Problem {
    pub fn new(r: Vec<f64>, kernel: KernelSpec, field: FieldSpec) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::Validation("at least one translate is required".into()));
        }
        if let Some(bad) = r.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Validation(format!("exponents must be positive, got {bad}")));
        }
        kernel.validate()?;
        if !field.admissible(r.len()) {
            return Err(Error::Admissibility(format!(
                "field is finite at too few points for n = {}",
                r.len()
            )));
        }
        Ok(Problem { r, kernel, field })
    }

    /// Unit exponents.
    pub fn uniform(n: usize, kernel: KernelSpec, field: FieldSpec) -> Result<Self> {
        Self::new(vec![1.0; n], kernel, field)
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// Same exponents and field with another kernel.
    pub fn with_kernel(&self, kernel: KernelSpec) -> Problem {
        Problem { r: self.r.clone(), kernel, field: self.field.clone() }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problems serialize infallibly")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldFormula, FieldPiece};

    #[test]
    fn parses_the_documented_schema() {
        let json = r#"{
            "n": 2,
            "r": [1.0, 2.0],
            "kernel": {"variant": "CappedLog", "params": {"a": 0.25}},
            "field": {
                "pieces": [
                    {"lo": 0.0, "hi": 0.5, "formula": {"variant": "Constant", "params": {"c": 0.0}}},
                    {"lo": 0.5, "hi": 1.0, "formula": {"variant": "SqrtAffine", "params": {"c": 1.0, "s": 1.0, "t0": 0.5}}}
                ],
                "point_values": [[0.25, 3.0]]
            }
        }"#;
        let p = Problem::from_json(json).unwrap();
        assert_eq!(p.n(), 2);
        assert_eq!(p.kernel(), &KernelSpec::CappedLog { a: 0.25 });
        assert_eq!(p.field().pieces().len(), 2);
        let back = Problem::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_inconsistent_problems() {
        let bad_n = r#"{"n": 3, "r": [1.0], "kernel": {"variant": "Log"},
            "field": {"pieces": [{"lo": 0.0, "hi": 1.0, "formula": {"variant": "Constant", "params": {"c": 0}}}]}}"#;
        assert!(Problem::from_json(bad_n).is_err());
        assert!(Problem::new(vec![1.0, -1.0], KernelSpec::Log, FieldSpec::zero()).is_err());
        let sparse = FieldSpec::finite_at_points(&[0.0, 0.5, 1.0]).unwrap();
        assert!(matches!(
            Problem::new(vec![1.0, 1.0], KernelSpec::Log, sparse),
            Err(Error::Admissibility(_))
        ));
        let neg = FieldSpec::new(
            vec![FieldPiece { lo: 0.0, hi: 1.0, formula: FieldFormula::NegInfinity }],
            vec![],
        )
        .unwrap();
        assert!(Problem::new(vec![1.0], KernelSpec::Log, neg).is_err());
    }
}
