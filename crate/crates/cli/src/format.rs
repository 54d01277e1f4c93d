use equiosc::ExtReal;
use serde_json::{json, Value};

/// Rounds to 9 significant digits.
pub fn round9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// Prints a float with 9 significant digits.
pub fn fmt9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.8e}")
    }
}

pub fn fmt_ext(x: ExtReal) -> String {
    match x {
        ExtReal::NegInf => "-inf".into(),
        ExtReal::Finite(v) => fmt9(v),
    }
}

pub fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| fmt9(*x)).collect();
    format!("[{}]", parts.join(", "))
}

pub fn fmt_ext_vec(v: &[ExtReal]) -> String {
    let parts: Vec<String> = v.iter().map(|x| fmt_ext(*x)).collect();
    format!("[{}]", parts.join(", "))
}

pub fn num(x: f64) -> Value {
    json!(round9(x))
}

pub fn ext(x: ExtReal) -> Value {
    match x {
        ExtReal::NegInf => Value::Null,
        ExtReal::Finite(v) => num(v),
    }
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

pub fn exts(v: &[ExtReal]) -> Value {
    Value::Array(v.iter().map(|x| ext(*x)).collect())
}
