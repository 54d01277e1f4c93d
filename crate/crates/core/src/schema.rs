//! JSON encoding shared by kernels, field formulas and weights:
//! `{"variant": "<Name>", "params": {...}}`.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::field::{FieldFormula, WeightExpr};
use crate::kernel::KernelSpec;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tagged {
    pub variant: String,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub params: Map<String, Value>,
}

impl Tagged {
    fn new(variant: &str) -> Self {
        Tagged { variant: variant.to_string(), params: Map::new() }
    }

    fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    fn num(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::Validation(format!("{}: missing numeric parameter '{key}'", self.variant)))
    }

    fn nested<T: serde::de::DeserializeOwned>(&self, key: &str) -> Result<T> {
        let v = self
            .params
            .get(key)
            .ok_or_else(|| Error::Validation(format!("{}: missing parameter '{key}'", self.variant)))?;
        Ok(serde_json::from_value(v.clone())?)
    }

    fn unknown(&self, what: &str) -> Error {
        Error::Validation(format!("unknown {what} variant '{}'", self.variant))
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("schema types serialize infallibly")
}

impl TryFrom<Tagged> for KernelSpec {
    type Error = Error;

    fn try_from(t: Tagged) -> Result<Self> {
        let k = match t.variant.as_str() {
            "Log" => KernelSpec::Log,
            "CappedLog" => KernelSpec::CappedLog { a: t.num("a")? },
            "SqrtShift" => KernelSpec::SqrtShift,
            "TentLog" => KernelSpec::TentLog,
            "CappedLogPlusQuadratic" => KernelSpec::CappedLogPlusQuadratic { a: t.num("a")? },
            "Regularized" => KernelSpec::Regularized { base: Box::new(t.nested("base")?), eta: t.num("eta")? },
            _ => return Err(t.unknown("kernel")),
        };
        k.validate()?;
        Ok(k)
    }
}

impl From<KernelSpec> for Tagged {
    fn from(k: KernelSpec) -> Self {
        match k {
            KernelSpec::Log => Tagged::new("Log"),
            KernelSpec::CappedLog { a } => Tagged::new("CappedLog").with("a", a),
            KernelSpec::SqrtShift => Tagged::new("SqrtShift"),
            KernelSpec::TentLog => Tagged::new("TentLog"),
            KernelSpec::CappedLogPlusQuadratic { a } => Tagged::new("CappedLogPlusQuadratic").with("a", a),
            KernelSpec::Regularized { base, eta } => {
                Tagged::new("Regularized").with("base", to_value(&*base)).with("eta", eta)
            }
        }
    }
}

impl TryFrom<Tagged> for WeightExpr {
    type Error = Error;

    fn try_from(t: Tagged) -> Result<Self> {
        Ok(match t.variant.as_str() {
            "Constant" => WeightExpr::Constant { c: t.num("c")? },
            "Jacobi" => WeightExpr::Jacobi {
                scale: t.num("scale")?,
                left: t.num("left")?,
                alpha: t.num("alpha")?,
                right: t.num("right")?,
                beta: t.num("beta")?,
            },
            "Exponential" => WeightExpr::Exponential { scale: t.num("scale")?, rate: t.num("rate")? },
            _ => return Err(t.unknown("weight")),
        })
    }
}

impl From<WeightExpr> for Tagged {
    fn from(w: WeightExpr) -> Self {
        match w {
            WeightExpr::Constant { c } => Tagged::new("Constant").with("c", c),
            WeightExpr::Jacobi { scale, left, alpha, right, beta } => Tagged::new("Jacobi")
                .with("scale", scale)
                .with("left", left)
                .with("alpha", alpha)
                .with("right", right)
                .with("beta", beta),
            WeightExpr::Exponential { scale, rate } => {
                Tagged::new("Exponential").with("scale", scale).with("rate", rate)
            }
        }
    }
}

impl TryFrom<Tagged> for FieldFormula {
    type Error = Error;

    fn try_from(t: Tagged) -> Result<Self> {
        Ok(match t.variant.as_str() {
            "Constant" => FieldFormula::Constant { c: t.num("c")? },
            "NegInfinity" => FieldFormula::NegInfinity,
            "LogOfWeight" => FieldFormula::LogOfWeight { weight: t.nested("weight")? },
            "SqrtAffine" => FieldFormula::SqrtAffine { c: t.num("c")?, s: t.num("s")?, t0: t.num("t0")? },
            "Indicator" => FieldFormula::Indicator { value: t.num("value")? },
            _ => return Err(t.unknown("field formula")),
        })
    }
}

impl From<FieldFormula> for Tagged {
    fn from(f: FieldFormula) -> Self {
        match f {
            FieldFormula::Constant { c } => Tagged::new("Constant").with("c", c),
            FieldFormula::NegInfinity => Tagged::new("NegInfinity"),
            FieldFormula::LogOfWeight { weight } => Tagged::new("LogOfWeight").with("weight", to_value(&weight)),
            FieldFormula::SqrtAffine { c, s, t0 } => {
                Tagged::new("SqrtAffine").with("c", c).with("s", s).with("t0", t0)
            }
            FieldFormula::Indicator { value } => Tagged::new("Indicator").with("value", value),
        }
    }
}
