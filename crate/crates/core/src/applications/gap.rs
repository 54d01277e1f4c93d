use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldFormula, FieldPiece, FieldSpec, WeightExpr};
use crate::kernel::KernelSpec;
use crate::problem::Problem;
use crate::solver::solve_equioscillation;

/// One piece of a weight on `[lo, hi]`; `None` means the weight vanishes there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightPiece {
    pub lo: f64,
    pub hi: f64,
    pub expr: Option<WeightExpr>,
}

/// A non-negative usc weight on `[a, b]`, stored as `log w` pulled back to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightSpecRaw", into = "WeightSpecRaw")]
pub struct WeightSpec {
    a: f64,
    b: f64,
    pieces: Vec<WeightPiece>,
    point_values: Vec<(f64, f64)>,
    log_field: FieldSpec,
}

#[derive(Serialize, Deserialize)]
struct WeightSpecRaw {
    a: f64,
    b: f64,
    pieces: Vec<WeightPiece>,
    #[serde(default)]
    point_values: Vec<(f64, f64)>,
}

impl TryFrom<WeightSpecRaw> for WeightSpec {
    type Error = Error;

    fn try_from(raw: WeightSpecRaw) -> Result<Self> {
        WeightSpec::new(raw.a, raw.b, raw.pieces, raw.point_values)
    }
}

impl From<WeightSpec> for WeightSpecRaw {
    fn from(w: WeightSpec) -> Self {
        WeightSpecRaw { a: w.a, b: w.b, pieces: w.pieces, point_values: w.point_values }
    }
}

impl WeightSpec {
    /// Pieces must tile `[a, b]`; `point_values` raise the weight at single points.
    pub fn new(a: f64, b: f64, pieces: Vec<WeightPiece>, point_values: Vec<(f64, f64)>) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Validation(format!("weight interval [{a}, {b}] is degenerate")));
        }
        let len = b - a;
        let to_unit = |t: f64| if t == b { 1.0 } else { ((t - a) / len).clamp(0.0, 1.0) };
        if pieces.first().is_none_or(|p| p.lo != a) || pieces.last().is_none_or(|p| p.hi != b) {
            return Err(Error::Validation(format!("weight pieces must cover [{a}, {b}]")));
        }
        let field_pieces = pieces
            .iter()
            .map(|p| FieldPiece {
                lo: to_unit(p.lo),
                hi: to_unit(p.hi),
                formula: match &p.expr {
                    Some(e) => FieldFormula::LogOfWeight { weight: e.pull_back(a, len) },
                    None => FieldFormula::NegInfinity,
                },
            })
            .collect();
        let mut field_points = Vec::with_capacity(point_values.len());
        for &(t, v) in &point_values {
            if !(a..=b).contains(&t) || !(v.is_finite() && v >= 0.0) {
                return Err(Error::Validation(format!("weight value {v} at {t} is invalid")));
            }
            field_points.push((to_unit(t), crate::ext::ExtReal::ln(v)));
        }
        let log_field = FieldSpec::new(field_pieces, field_points)?;
        Ok(WeightSpec { a, b, pieces, point_values, log_field })
    }

    /// A single expression on all of `[a, b]`.
    pub fn single(a: f64, b: f64, expr: WeightExpr) -> Result<Self> {
        Self::new(a, b, vec![WeightPiece { lo: a, hi: b, expr: Some(expr) }], Vec::new())
    }

    /// `w ≡ 1` on `[a, b]`.
    pub fn unit(a: f64, b: f64) -> Result<Self> {
        Self::single(a, b, WeightExpr::Constant { c: 1.0 })
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// `log w` as a field on `[0, 1]` under `t = a + (b - a) s`.
    pub fn log_field(&self) -> &FieldSpec {
        &self.log_field
    }

    pub fn to_unit(&self, t: f64) -> f64 {
        (t - self.a) / (self.b - self.a)
    }

    pub fn from_unit(&self, s: f64) -> f64 {
        self.a + (self.b - self.a) * s
    }

    /// `w(t)` with its usc value at breakpoints.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(self.a..=self.b).contains(&t) {
            return Err(Error::Domain(format!("{t} outside the weight interval [{}, {}]", self.a, self.b)));
        }
        Ok(self.log_field.eval(self.to_unit(t).clamp(0.0, 1.0))?.exp())
    }
}

/// A weighted Bojanov–Chebyshev problem on `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapProblem {
    pub exponents: Vec<f64>,
    pub weight: WeightSpec,
}

impl GapProblem {
    pub fn new(exponents: Vec<f64>, weight: WeightSpec) -> Result<Self> {
        let gap = GapProblem { exponents, weight };
        gap.problem()?;
        Ok(gap)
    }

    /// Unweighted problem on `[a, b]`.
    pub fn unweighted(a: f64, b: f64, exponents: Vec<f64>) -> Result<Self> {
        Self::new(exponents, WeightSpec::unit(a, b)?)
    }

    /// The equivalent sum-of-translates problem on `[0, 1]`.
    pub fn problem(&self) -> Result<Problem> {
        Problem::new(self.exponents.clone(), KernelSpec::Log, self.weight.log_field().clone())
    }

    /// Logarithm of the factor `(b - a)^{Σ r_j}` lost by the affine map.
    pub(crate) fn log_scale(&self) -> f64 {
        let (a, b) = self.weight.interval();
        self.exponents.iter().sum::<f64>() * (b - a).ln()
    }
}

/// The extremal polynomial of a [`GapProblem`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSolution {
    pub nodes: Vec<f64>,
    pub extremal_points: Vec<f64>,
    /// `sup_{[a, b]} w · P`.
    pub norm: f64,
    /// `t_0 < x_1 < t_1 < … < x_n < t_n`.
    pub interlaces: bool,
}

/// `w(t) ∏ |t - x_j|^{r_j}`.
pub fn gap_eval(nodes: &[f64], r: &[f64], weight: &WeightSpec, t: f64) -> Result<f64> {
    if nodes.len() != r.len() {
        return Err(Error::Validation("nodes and exponents differ in length".into()));
    }
    let w = weight.eval(t)?;
    Ok(nodes.iter().zip(r).fold(w, |acc, (x, r)| acc * (t - x).abs().powf(*r)))
}

/// Solves for the unique extremal polynomial through the equioscillation point.
pub fn solve_bojanov(gap: &GapProblem, tol: f64) -> Result<GapSolution> {
    let problem = gap.problem()?;
    let report = solve_equioscillation(&problem, tol)?;
    let w = &gap.weight;
    let nodes: Vec<f64> = report.nodes.as_slice().iter().map(|&s| w.from_unit(s)).collect();
    let extremal_points: Vec<f64> = report.maxima.argmax.iter().map(|t| w.from_unit(t.unwrap_or(f64::NAN))).collect();
    Ok(GapSolution {
        nodes,
        extremal_points,
        norm: (report.value + gap.log_scale()).exp(),
        interlaces: report.interlaces(),
    })
}

/// Checks the signed equioscillation `T(t_k) = (-1)^{ν_{k+1} + … + ν_n} ‖T‖` of
/// `T(t) = w(t) ∏ (t - x_j)^{ν_j}` at the given points, to `1e-9` relative.
pub fn verify_signed_equioscillation(nodes: &[f64], nu: &[f64], extremal_points: &[f64], weight: &WeightSpec) -> Result<bool> {
    let n = nodes.len();
    if nu.len() != n || extremal_points.len() != n + 1 {
        return Err(Error::Validation("need n exponents and n + 1 extremal points".into()));
    }
    if nu.iter().any(|v| !(v.fract() == 0.0 && *v >= 1.0)) {
        return Err(Error::Precondition(format!("exponents {nu:?} must be positive integers")));
    }
    let mut seq = Vec::with_capacity(2 * n + 1);
    for k in 0..=n {
        seq.push(extremal_points[k]);
        if k < n {
            seq.push(nodes[k]);
        }
    }
    if !seq.windows(2).all(|p| p[0] < p[1]) {
        return Err(Error::Precondition("extremal points must interlace the nodes".into()));
    }
    let signed = |t: f64| -> Result<f64> {
        let w = weight.eval(t)?;
        Ok(nodes.iter().zip(nu).fold(w, |acc, (x, v)| acc * (t - x).powi(*v as i32)))
    };
    let values: Vec<f64> = extremal_points.iter().map(|&t| signed(t)).collect::<Result<_>>()?;
    let norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if norm == 0.0 {
        return Ok(false);
    }
    Ok(values.iter().enumerate().all(|(k, v)| {
        let tail: f64 = nu[k..].iter().sum();
        let sign = if tail as i64 % 2 == 0 { 1.0 } else { -1.0 };
        (v - sign * norm).abs() <= 1e-9 * norm
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation() {
        let w = WeightSpec::unit(0.0, 1.0).unwrap();
        assert!((gap_eval(&[0.5], &[1.0], &w, 0.75).unwrap() - 0.25).abs() < 1e-15);
        assert!((gap_eval(&[0.5], &[2.0], &w, 0.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((gap_eval(&[0.146447, 0.853553], &[1.0, 1.0], &w, 0.0).unwrap() - 0.125).abs() < 1e-6);
        assert!(matches!(gap_eval(&[0.5], &[1.0], &w, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn classical_extremal_polynomials() {
        let s = solve_bojanov(&GapProblem::unweighted(0.0, 1.0, vec![1.0, 1.0]).unwrap(), 1e-11).unwrap();
        assert!((s.nodes[0] - 0.1464466).abs() < 1e-7 && (s.nodes[1] - 0.8535534).abs() < 1e-7);
        assert!((s.norm - 0.125).abs() < 1e-10);
        assert!(s.interlaces);

        let s = solve_bojanov(&GapProblem::unweighted(0.0, 1.0, vec![2.0]).unwrap(), 1e-11).unwrap();
        assert!((s.nodes[0] - 0.5).abs() < 1e-9 && (s.norm - 0.25).abs() < 1e-10);

        let s = solve_bojanov(&GapProblem::unweighted(-1.0, 1.0, vec![1.0; 3]).unwrap(), 1e-11).unwrap();
        let h = 3f64.sqrt() / 2.0;
        for (a, b) in s.nodes.iter().zip([-h, 0.0, h]) {
            assert!((a - b).abs() < 1e-8, "{:?}", s.nodes);
        }
        assert!((s.norm - 0.25).abs() < 1e-9);
    }

    #[test]
    fn weighted_solution_equioscillates() {
        let w = WeightSpec::single(0.0, 2.0, WeightExpr::Jacobi { scale: 1.0, left: 0.0, alpha: 1.0, right: 2.0, beta: 0.5 })
            .unwrap();
        let gap = GapProblem::new(vec![1.0, 2.0, 1.0], w.clone()).unwrap();
        let s = solve_bojanov(&gap, 1e-11).unwrap();
        assert!(s.interlaces);
        for &t in &s.extremal_points {
            let v = gap_eval(&s.nodes, &gap.exponents, &w, t).unwrap();
            assert!((v - s.norm).abs() <= 1e-8 * s.norm);
        }
        for k in 0..=200 {
            let t = 2.0 * k as f64 / 200.0;
            assert!(gap_eval(&s.nodes, &gap.exponents, &w, t).unwrap() <= s.norm * (1.0 + 1e-9));
        }
    }

    #[test]
    fn signed_equioscillation() {
        let w = WeightSpec::unit(0.0, 1.0).unwrap();
        let s = solve_bojanov(&GapProblem::unweighted(0.0, 1.0, vec![1.0, 1.0]).unwrap(), 1e-11).unwrap();
        assert!(verify_signed_equioscillation(&s.nodes, &[1.0, 1.0], &s.extremal_points, &w).unwrap());
        assert!(verify_signed_equioscillation(&[0.5], &[2.0], &[0.0, 1.0], &w).unwrap());

        let w2 = WeightSpec::unit(-1.0, 1.0).unwrap();
        let s = solve_bojanov(&GapProblem::unweighted(-1.0, 1.0, vec![1.0, 2.0]).unwrap(), 1e-11).unwrap();
        assert!(verify_signed_equioscillation(&s.nodes, &[1.0, 2.0], &s.extremal_points, &w2).unwrap());

        assert!(!verify_signed_equioscillation(&[0.3], &[1.0], &[0.0, 1.0], &w).unwrap());
        assert!(matches!(
            verify_signed_equioscillation(&[0.5], &[1.5], &[0.0, 1.0], &w),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn zero_weight_regions_and_admissibility() {
        let w = WeightSpec::new(
            0.0,
            1.0,
            vec![
                WeightPiece { lo: 0.0, hi: 0.3, expr: Some(WeightExpr::Constant { c: 1.0 }) },
                WeightPiece { lo: 0.3, hi: 0.7, expr: None },
                WeightPiece { lo: 0.7, hi: 1.0, expr: Some(WeightExpr::Constant { c: 2.0 }) },
            ],
            vec![],
        )
        .unwrap();
        assert_eq!(w.eval(0.5).unwrap(), 0.0);
        assert_eq!(w.eval(0.7).unwrap(), 2.0);
        let s = solve_bojanov(&GapProblem::new(vec![1.0, 1.0], w).unwrap(), 1e-10).unwrap();
        assert!(s.nodes[0] < s.nodes[1]);

        let two_points = WeightSpec::new(
            0.0,
            1.0,
            vec![WeightPiece { lo: 0.0, hi: 1.0, expr: None }],
            vec![(0.0, 1.0), (0.5, 1.0)],
        )
        .unwrap();
        assert!(matches!(GapProblem::new(vec![1.0, 1.0], two_points), Err(Error::Admissibility(_))));
    }
}
