//! Upper semicontinuous external fields `J: [0, 1] → R ∪ {-∞}`.
//!
//! A field is stored as consecutive closed-form pieces covering `[0, 1]` plus
//! optional point overrides. At every breakpoint and override point the field
//! takes the maximum of the adjacent one-sided limits and the override, which
//! is exactly the upper semicontinuous closure of the piecewise description.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtReal;

/// Slack for affine-domain checks on piece endpoints.
const DOMAIN_SLACK: f64 = 1e-12;

/// Non-negative weight expressions `w(t)`; fields built from them use `log w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::schema::Tagged", into = "crate::schema::Tagged")]
pub enum WeightExpr {
    /// `c ≥ 0`; a zero weight makes the piece singular.
    Constant { c: f64 },
    /// `scale · (t - left)^alpha · (right - t)^beta` with `alpha, beta ≥ 0`.
    Jacobi { scale: f64, left: f64, alpha: f64, right: f64, beta: f64 },
    /// `scale · exp(rate · t)`.
    Exponential { scale: f64, rate: f64 },
}

impl WeightExpr {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            WeightExpr::Constant { c } => c,
            WeightExpr::Jacobi { scale, left, alpha, right, beta } => {
                scale * pow0((t - left).max(0.0), alpha) * pow0((right - t).max(0.0), beta)
            }
            WeightExpr::Exponential { scale, rate } => scale * (rate * t).exp(),
        }
    }

    /// `log w(t)`, evaluated without forming `w` to keep precision.
    pub fn log_eval(&self, t: f64) -> ExtReal {
        match *self {
            WeightExpr::Constant { c } => ExtReal::ln(c),
            WeightExpr::Jacobi { scale, left, alpha, right, beta } => {
                ExtReal::ln(scale) + log_pow((t - left).max(0.0), alpha) + log_pow((right - t).max(0.0), beta)
            }
            WeightExpr::Exponential { scale, rate } => ExtReal::ln(scale) + rate * t,
        }
    }

    fn is_identically_zero(&self) -> bool {
        match *self {
            WeightExpr::Constant { c } => c == 0.0,
            WeightExpr::Jacobi { scale, .. } | WeightExpr::Exponential { scale, .. } => scale == 0.0,
        }
    }

    fn validate_on(&self, lo: f64, hi: f64) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(msg));
        match *self {
            WeightExpr::Constant { c } => {
                if !(c.is_finite() && c >= 0.0) {
                    return bad(format!("constant weight must be finite and non-negative, got {c}"));
                }
            }
            WeightExpr::Jacobi { scale, left, alpha, right, beta } => {
                if ![scale, left, alpha, right, beta].iter().all(|x| x.is_finite()) {
                    return bad("Jacobi weight parameters must be finite".into());
                }
                if scale < 0.0 || alpha < 0.0 || beta < 0.0 {
                    return bad("Jacobi weight needs scale, alpha, beta ≥ 0".into());
                }
                if left > lo + DOMAIN_SLACK || right < hi - DOMAIN_SLACK {
                    return bad(format!(
                        "Jacobi weight support [{left}, {right}] must contain its piece [{lo}, {hi}]"
                    ));
                }
            }
            WeightExpr::Exponential { scale, rate } => {
                if !(scale.is_finite() && scale >= 0.0 && rate.is_finite()) {
                    return bad("exponential weight needs finite scale ≥ 0 and finite rate".into());
                }
            }
        }
        Ok(())
    }

    /// Re-expresses the weight in the coordinate `s` with `t = lo + len·s`.
    pub fn pull_back(&self, lo: f64, len: f64) -> WeightExpr {
        match *self {
            WeightExpr::Constant { c } => WeightExpr::Constant { c },
            WeightExpr::Jacobi { scale, left, alpha, right, beta } => WeightExpr::Jacobi {
                scale: scale * len.powf(alpha + beta),
                left: (left - lo) / len,
                alpha,
                right: (right - lo) / len,
                beta,
            },
            WeightExpr::Exponential { scale, rate } => WeightExpr::Exponential {
                scale: scale * (rate * lo).exp(),
                rate: rate * len,
            },
        }
    }
}

fn pow0(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        x.powf(p)
    }
}

fn log_pow(x: f64, p: f64) -> ExtReal {
    if p == 0.0 {
        ExtReal::ZERO
    } else {
        p * ExtReal::ln(x)
    }
}

/// Closed-form expression of one field piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::schema::Tagged", into = "crate::schema::Tagged")]
pub enum FieldFormula {
    Constant { c: f64 },
    NegInfinity,
    LogOfWeight { weight: WeightExpr },
    /// `c · sqrt(s · (t - t0))`.
    SqrtAffine { c: f64, s: f64, t0: f64 },
    /// Level taken by an indicator-type field on this piece.
    Indicator { value: f64 },
}

impl FieldFormula {
    /// Value of the closed form at `t`, which is also its one-sided limit at piece ends.
    pub fn eval(&self, t: f64) -> ExtReal {
        match self {
            FieldFormula::Constant { c } => ExtReal::Finite(*c),
            FieldFormula::Indicator { value } => ExtReal::Finite(*value),
            FieldFormula::NegInfinity => ExtReal::NegInf,
            FieldFormula::LogOfWeight { weight } => weight.log_eval(t),
            FieldFormula::SqrtAffine { c, s, t0 } => ExtReal::Finite(c * (s * (t - t0)).max(0.0).sqrt()),
        }
    }

    /// `-∞` on the whole open piece.
    pub fn is_neg_inf(&self) -> bool {
        match self {
            FieldFormula::NegInfinity => true,
            FieldFormula::LogOfWeight { weight } => weight.is_identically_zero(),
            _ => false,
        }
    }

    /// Concave on its piece (a concave field keeps the sum of translates concave).
    pub fn is_concave(&self) -> bool {
        match self {
            FieldFormula::SqrtAffine { c, .. } => *c >= 0.0,
            // Weights are restricted to log-concave families.
            FieldFormula::LogOfWeight { .. } => true,
            FieldFormula::Constant { .. } | FieldFormula::Indicator { .. } | FieldFormula::NegInfinity => true,
        }
    }

    fn validate_on(&self, lo: f64, hi: f64) -> Result<()> {
        match self {
            FieldFormula::Constant { c: v } | FieldFormula::Indicator { value: v } => {
                if !v.is_finite() {
                    return Err(Error::Validation(format!("field level must be finite, got {v}")));
                }
            }
            FieldFormula::NegInfinity => {}
            FieldFormula::LogOfWeight { weight } => weight.validate_on(lo, hi)?,
            FieldFormula::SqrtAffine { c, s, t0 } => {
                if ![*c, *s, *t0].iter().all(|x| x.is_finite()) {
                    return Err(Error::Validation("sqrt-affine parameters must be finite".into()));
                }
                if s * (lo - t0) < -DOMAIN_SLACK || s * (hi - t0) < -DOMAIN_SLACK {
                    return Err(Error::Validation(format!(
                        "sqrt-affine radicand s·(t - t0) is negative on [{lo}, {hi}]"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldPiece {
    pub lo: f64,
    pub hi: f64,
    pub formula: FieldFormula,
}

/// A maximal connected component of the singularity set `{J = -∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularComponent {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl SingularComponent {
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Whether the interval `(lo, hi)` with the given closedness lies inside this component.
    pub fn contains_interval(&self, lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> bool {
        let left_ok = self.lo < lo || (self.lo == lo && (self.lo_closed || !lo_closed));
        let right_ok = hi < self.hi || (hi == self.hi && (self.hi_closed || !hi_closed));
        left_ok && right_ok
    }
}

/// A point or an open interval between consecutive special points.
#[derive(Debug, Clone, Copy)]
enum Atom<'a> {
    Point(f64, ExtReal),
    Open(f64, f64, &'a FieldFormula),
}

/// An upper semicontinuous piecewise field on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldSpecRaw", into = "FieldSpecRaw")]
pub struct FieldSpec {
    pieces: Vec<FieldPiece>,
    point_values: Vec<(f64, ExtReal)>,
    /// Sorted special points (breakpoints and overrides) with their usc values.
    special: Vec<(f64, ExtReal)>,
}

#[derive(Serialize, Deserialize)]
struct FieldSpecRaw {
    pieces: Vec<FieldPiece>,
    #[serde(default)]
    point_values: Vec<(f64, ExtReal)>,
}

impl TryFrom<FieldSpecRaw> for FieldSpec {
    type Error = Error;

    fn try_from(raw: FieldSpecRaw) -> Result<Self> {
        FieldSpec::new(raw.pieces, raw.point_values)
    }
}

impl From<FieldSpec> for FieldSpecRaw {
    fn from(f: FieldSpec) -> Self {
        FieldSpecRaw { pieces: f.pieces, point_values: f.point_values }
    }
}

impl FieldSpec {
    /// Builds and validates a field: pieces must tile `[0, 1]` in order.
    pub fn new(pieces: Vec<FieldPiece>, point_values: Vec<(f64, ExtReal)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Validation("a field needs at least one piece".into()));
        }
        if pieces[0].lo != 0.0 || pieces[pieces.len() - 1].hi != 1.0 {
            return Err(Error::Validation("field pieces must cover [0, 1]".into()));
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(Error::Validation(format!(
                    "field pieces must be contiguous, found gap/overlap at {} vs {}",
                    w[0].hi, w[1].lo
                )));
            }
        }
        for p in &pieces {
            if !(p.lo < p.hi) {
                return Err(Error::Validation(format!("empty field piece [{}, {}]", p.lo, p.hi)));
            }
            p.formula.validate_on(p.lo, p.hi)?;
        }
        for &(t, _) in &point_values {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::Validation(format!("point override at {t} outside [0, 1]")));
            }
        }

        let mut special: Vec<(f64, ExtReal)> = Vec::with_capacity(pieces.len() + 1 + point_values.len());
        special.push((0.0, pieces[0].formula.eval(0.0)));
        for w in pieces.windows(2) {
            let t = w[0].hi;
            special.push((t, w[0].formula.eval(t).max(w[1].formula.eval(t))));
        }
        let last = &pieces[pieces.len() - 1];
        special.push((1.0, last.formula.eval(1.0)));
        for &(t, v) in &point_values {
            match special.iter_mut().find(|(s, _)| *s == t) {
                Some(entry) => entry.1 = entry.1.max(v),
                None => {
                    let idx = piece_index(&pieces, t);
                    special.push((t, pieces[idx].formula.eval(t).max(v)));
                }
            }
        }
        special.sort_by(|a, b| a.0.total_cmp(&b.0));

        Ok(FieldSpec { pieces, point_values, special })
    }

    /// A single piece on `[0, 1]`.
    pub fn single(formula: FieldFormula) -> Result<Self> {
        Self::new(vec![FieldPiece { lo: 0.0, hi: 1.0, formula }], Vec::new())
    }

    /// `J ≡ c`.
    pub fn constant(c: f64) -> Self {
        Self::single(FieldFormula::Constant { c }).expect("finite constant field")
    }

    /// `J ≡ 0`.
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// Characteristic function of `[b, 1]` (value 1 there, 0 elsewhere).
    pub fn indicator_from(b: f64) -> Result<Self> {
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::Validation(format!("indicator threshold {b} must be inside (0, 1)")));
        }
        Self::new(
            vec![
                FieldPiece { lo: 0.0, hi: b, formula: FieldFormula::Indicator { value: 0.0 } },
                FieldPiece { lo: b, hi: 1.0, formula: FieldFormula::Indicator { value: 1.0 } },
            ],
            Vec::new(),
        )
    }

    /// `log χ_E` for a union `E` of closed intervals inside `[0, 1]`.
    pub fn log_indicator(intervals: &[(f64, f64)]) -> Result<Self> {
        Self::zero().restrict_to(intervals)
    }

    /// Finite (zero) only at the given points, `-∞` elsewhere.
    pub fn finite_at_points(points: &[f64]) -> Result<Self> {
        Self::new(
            vec![FieldPiece { lo: 0.0, hi: 1.0, formula: FieldFormula::NegInfinity }],
            points.iter().map(|&t| (t, ExtReal::ZERO)).collect(),
        )
    }

    pub fn pieces(&self) -> &[FieldPiece] {
        &self.pieces
    }

    pub fn point_values(&self) -> &[(f64, ExtReal)] {
        &self.point_values
    }

    /// Breakpoints and override locations in increasing order, including 0 and 1.
    pub fn special_points(&self) -> impl Iterator<Item = f64> + '_ {
        self.special.iter().map(|&(t, _)| t)
    }

    /// Evaluates `J(t)` for `t ∈ [0, 1]`.
    pub fn eval(&self, t: f64) -> Result<ExtReal> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("field argument {t} outside [0, 1]")));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> ExtReal {
        if let Ok(i) = self.special.binary_search_by(|(s, _)| s.total_cmp(&t)) {
            return self.special[i].1;
        }
        self.pieces[piece_index(&self.pieces, t)].formula.eval(t)
    }

    /// Whether every piece formula is concave, which makes `J + f` concave between nodes.
    pub fn is_concave(&self) -> bool {
        self.pieces.len() == 1 && self.point_values.is_empty() && self.pieces[0].formula.is_concave()
    }

    /// Special points strictly inside `(lo, hi)`.
    pub(crate) fn special_points_between(&self, lo: f64, hi: f64) -> impl Iterator<Item = f64> + '_ {
        let start = self.special.partition_point(|&(s, _)| s <= lo);
        self.special[start..].iter().map(|&(s, _)| s).take_while(move |&s| s < hi)
    }

    /// Formula governing the open interval between two consecutive special points.
    pub(crate) fn formula_between(&self, lo: f64, hi: f64) -> &FieldFormula {
        &self.pieces[piece_index(&self.pieces, 0.5 * (lo + hi))].formula
    }

    fn atoms(&self) -> Vec<Atom<'_>> {
        let mut atoms = Vec::with_capacity(2 * self.special.len());
        for (i, &(t, v)) in self.special.iter().enumerate() {
            atoms.push(Atom::Point(t, v));
            if let Some(&(next, _)) = self.special.get(i + 1) {
                atoms.push(Atom::Open(t, next, self.formula_between(t, next)));
            }
        }
        atoms
    }

    /// Whether `J` is finite at more than `n` points, counting 0 and 1 with weight 1/2.
    pub fn admissible(&self, n: usize) -> bool {
        let mut count = 0.0;
        for atom in self.atoms() {
            match atom {
                Atom::Open(_, _, f) if !f.is_neg_inf() => return true,
                Atom::Open(..) => {}
                Atom::Point(t, v) if v.is_finite() => count += if t == 0.0 || t == 1.0 { 0.5 } else { 1.0 },
                Atom::Point(..) => {}
            }
        }
        count > n as f64
    }

    /// The set `{t : J(t) = -∞}` as maximal intervals and isolated points.
    pub fn singularity_set(&self) -> Vec<SingularComponent> {
        let mut out: Vec<SingularComponent> = Vec::new();
        let mut open: Option<SingularComponent> = None;
        for atom in self.atoms() {
            let (lo, hi, closed, singular) = match atom {
                Atom::Point(t, v) => (t, t, true, v.is_neg_inf()),
                Atom::Open(a, b, f) => (a, b, false, f.is_neg_inf()),
            };
            if singular {
                match open.as_mut() {
                    Some(c) => {
                        c.hi = hi;
                        c.hi_closed = closed;
                    }
                    None => open = Some(SingularComponent { lo, hi, lo_closed: closed, hi_closed: closed }),
                }
            } else if let Some(c) = open.take() {
                out.push(c);
            }
        }
        out.extend(open);
        out
    }

    /// `J · χ_E` in the multiplicative sense: `-∞` off the union of closed intervals.
    ///
    /// Values on `E` (including usc values at old breakpoints) are preserved.
    pub fn restrict_to(&self, intervals: &[(f64, f64)]) -> Result<Self> {
        for &(a, b) in intervals {
            if !(0.0 <= a && a <= b && b <= 1.0) {
                return Err(Error::Validation(format!("interval [{a}, {b}] is not inside [0, 1]")));
            }
        }
        let inside = |t: f64| intervals.iter().any(|&(a, b)| a <= t && t <= b);

        let mut cuts: Vec<f64> = self.pieces.iter().map(|p| p.lo).collect();
        cuts.push(1.0);
        cuts.extend(intervals.iter().flat_map(|&(a, b)| [a, b]));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut pieces: Vec<FieldPiece> = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let formula = if inside(0.5 * (lo + hi)) {
                self.formula_between(lo, hi).clone()
            } else {
                FieldFormula::NegInfinity
            };
            match pieces.last_mut() {
                Some(last) if last.formula == formula => last.hi = hi,
                _ => pieces.push(FieldPiece { lo, hi, formula }),
            }
        }
        let point_values = self
            .special
            .iter()
            .filter(|&&(t, v)| inside(t) && v.is_finite())
            .copied()
            .collect();
        FieldSpec::new(pieces, point_values)
    }
}

fn piece_index(pieces: &[FieldPiece], t: f64) -> usize {
    pieces.partition_point(|p| p.hi < t).min(pieces.len() - 1)
}
