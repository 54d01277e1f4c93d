//! Kernel functions `K: [-1, 1] → R ∪ {-∞}`.
//!
//! Every kernel is concave on `(-1, 0)` and on `(0, 1)`, with matching limits
//! at the origin. Values at `-1`, `0` and `1` are the one-sided limits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtReal;

/// The built-in kernel family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::schema::Tagged", into = "crate::schema::Tagged")]
pub enum KernelSpec {
    /// `log|t|`.
    Log,
    /// `L_a(t) = min(0, log|t/a|)` with `0 < a < 1`.
    CappedLog { a: f64 },
    /// `sqrt(|t| + 4)`, even and finite at the origin.
    SqrtShift,
    /// `min(log|10t|, log((10/9)(1 - |t|)))`, peaked at `|t| = 1/10`.
    TentLog,
    /// `L_a(t) + 1 - 2t²`.
    CappedLogPlusQuadratic { a: f64 },
    /// `base(t) + eta·sqrt|t|`, a strictly concave, strictly monotone perturbation.
    Regularized { base: Box<KernelSpec>, eta: f64 },
}

/// Structural properties of a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelFlags {
    /// `K(0) = -∞`.
    pub singular: bool,
    /// Decreasing on `(-1, 0)`, increasing on `(0, 1)`.
    pub monotone_m: bool,
    /// Strictly decreasing on `[-1, 0)`, strictly increasing on `(0, 1]`.
    pub strictly_monotone_sm: bool,
    /// Strictly concave on both halves.
    pub strictly_concave: bool,
}

impl KernelSpec {
    pub fn capped_log(a: f64) -> Result<Self> {
        let k = KernelSpec::CappedLog { a };
        k.validate()?;
        Ok(k)
    }

    pub fn regularized(base: KernelSpec, eta: f64) -> Result<Self> {
        let k = KernelSpec::Regularized { base: Box::new(base), eta };
        k.validate()?;
        Ok(k)
    }

    /// Checks the numeric parameters.
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::CappedLog { a } | KernelSpec::CappedLogPlusQuadratic { a } => {
                if !(*a > 0.0 && *a < 1.0) {
                    return Err(Error::Validation(format!(
                        "capped-log parameter must lie in (0, 1), got {a}"
                    )));
                }
                Ok(())
            }
            KernelSpec::Regularized { base, eta } => {
                if !(eta.is_finite() && *eta > 0.0) {
                    return Err(Error::Validation(format!(
                        "regularization strength must be positive, got {eta}"
                    )));
                }
                base.validate()
            }
            KernelSpec::Log | KernelSpec::SqrtShift | KernelSpec::TentLog => Ok(()),
        }
    }

    /// Evaluates `K(t)` for `t ∈ [-1, 1]`.
    pub fn eval(&self, t: f64) -> Result<ExtReal> {
        if !(-1.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("kernel argument {t} outside [-1, 1]")));
        }
        Ok(self.eval_unchecked(t))
    }

    /// Evaluation without the domain check; callers guarantee `|t| ≤ 1`.
    pub(crate) fn eval_unchecked(&self, t: f64) -> ExtReal {
        let s = t.abs();
        match self {
            KernelSpec::Log => ExtReal::ln(s),
            KernelSpec::CappedLog { a } => capped_log(s, *a),
            KernelSpec::SqrtShift => ExtReal::Finite((s + 4.0).sqrt()),
            KernelSpec::TentLog => {
                let rising = ExtReal::ln(10.0 * s);
                let falling = ExtReal::ln((10.0 / 9.0) * (1.0 - s).max(0.0));
                rising.min(falling)
            }
            KernelSpec::CappedLogPlusQuadratic { a } => capped_log(s, *a) + (1.0 - 2.0 * s * s),
            KernelSpec::Regularized { base, eta } => base.eval_unchecked(t) + eta * s.sqrt(),
        }
    }

    /// Classification flags, known analytically for every variant.
    pub fn classify(&self) -> KernelFlags {
        match self {
            KernelSpec::Log => KernelFlags {
                singular: true,
                monotone_m: true,
                strictly_monotone_sm: true,
                strictly_concave: true,
            },
            KernelSpec::CappedLog { .. } => KernelFlags {
                singular: true,
                monotone_m: true,
                strictly_monotone_sm: false,
                strictly_concave: false,
            },
            KernelSpec::SqrtShift => KernelFlags {
                singular: false,
                monotone_m: true,
                strictly_monotone_sm: true,
                strictly_concave: true,
            },
            KernelSpec::TentLog | KernelSpec::CappedLogPlusQuadratic { .. } => KernelFlags {
                singular: true,
                monotone_m: false,
                strictly_monotone_sm: false,
                strictly_concave: true,
            },
            // sqrt|t| is strictly concave and strictly monotone in the kernel sense,
            // so adding it to a monotone kernel yields (SM); without (M) in the base
            // nothing about monotonicity is claimed.
            KernelSpec::Regularized { base, .. } => {
                let b = base.classify();
                KernelFlags {
                    singular: b.singular,
                    monotone_m: b.monotone_m,
                    strictly_monotone_sm: b.monotone_m,
                    strictly_concave: true,
                }
            }
        }
    }

    /// Short human-readable name.
    pub fn name(&self) -> String {
        match self {
            KernelSpec::Log => "Log".into(),
            KernelSpec::CappedLog { a } => format!("CappedLog(a={a})"),
            KernelSpec::SqrtShift => "SqrtShift".into(),
            KernelSpec::TentLog => "TentLog".into(),
            KernelSpec::CappedLogPlusQuadratic { a } => format!("CappedLogPlusQuadratic(a={a})"),
            KernelSpec::Regularized { base, eta } => format!("Regularized({}, eta={eta})", base.name()),
        }
    }
}

fn capped_log(s: f64, a: f64) -> ExtReal {
    ExtReal::ln(s / a).min(ExtReal::ZERO)
}
