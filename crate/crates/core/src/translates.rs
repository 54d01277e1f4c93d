//! Sum-of-translates functions and their interval maxima.
//!
//! Between two consecutive nodes every translate `K(· - y_i)` stays inside one
//! concavity interval of the kernel, so `f(y, ·)` is concave there. With a
//! concave field piece the sum is concave too and golden-section search finds
//! its maximum; field breakpoints and interval ends are checked as explicit
//! candidates because usc maxima can sit exactly at jumps.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::nodes::NodeSystem;
use crate::problem::Problem;

/// Golden-section stops once the bracket is narrower than this.
pub const GOLDEN_WIDTH_TOL: f64 = 1e-12;

/// Sample count used on field pieces that are not concave.
const NONCONCAVE_SAMPLES: usize = 4097;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// How the supremum over one interval is located.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaxStrategy {
    /// Golden-section per concave field piece, plus breakpoint candidates.
    #[default]
    Auto,
    /// Plain uniform sampling, endpoints included. Used as an independent check.
    Grid { points: usize },
}

/// Interval maxima `(m_0, …, m_n)` and a maximizing location for each finite one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximaVector {
    pub m: Vec<ExtReal>,
    pub argmax: Vec<Option<f64>>,
}

impl MaximaVector {
    /// `max_j m_j`, the supremum of `F(y, ·)` over `[0, 1]`.
    pub fn upper(&self) -> ExtReal {
        self.m.iter().copied().fold(ExtReal::NegInf, ExtReal::max)
    }

    /// `min_j m_j`.
    pub fn lower(&self) -> ExtReal {
        self.m.iter().copied().fold(self.m[0], ExtReal::min)
    }

    /// Consecutive differences `m_j - m_{j-1}`, if all maxima are finite.
    pub fn differences(&self) -> Option<Vec<f64>> {
        let finite: Option<Vec<f64>> = self.m.iter().map(|v| v.finite()).collect();
        finite.map(|m| m.windows(2).map(|w| w[1] - w[0]).collect())
    }
}

/// `Φ(y) = (m_1 - m_0, …, m_n - m_{n-1})`, all finite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceVector {
    pub phi: Vec<f64>,
}

/// Evaluation of `f` and `F` for one node vector. Nodes need not be validated.
#[derive(Clone, Copy)]
pub(crate) struct Translates<'a> {
    pub problem: &'a Problem,
    pub nodes: &'a [f64],
}

impl<'a> Translates<'a> {
    pub fn new(problem: &'a Problem, nodes: &'a [f64]) -> Self {
        debug_assert_eq!(problem.n(), nodes.len());
        Translates { problem, nodes }
    }

    pub fn pure(&self, t: f64) -> ExtReal {
        let kernel = self.problem.kernel();
        let mut acc = 0.0;
        for (&r, &y) in self.problem.r().iter().zip(self.nodes) {
            match kernel.eval_unchecked((t - y).clamp(-1.0, 1.0)) {
                ExtReal::Finite(v) => acc += r * v,
                ExtReal::NegInf => return ExtReal::NegInf,
            }
        }
        ExtReal::Finite(acc)
    }

    pub fn weighted(&self, t: f64) -> ExtReal {
        let j = self.problem.field().eval_unchecked(t);
        if j.is_neg_inf() {
            return j;
        }
        j + self.pure(t)
    }

    pub fn bound(&self, j: usize) -> f64 {
        match j {
            0 => 0.0,
            j if j == self.nodes.len() + 1 => 1.0,
            j => self.nodes[j - 1],
        }
    }

    /// Maximum of `F(y, ·)` over `I_j`, with its leftmost maximizing candidate.
    pub fn max_on(&self, j: usize, strategy: MaxStrategy) -> (f64, ExtReal) {
        let (lo, hi) = (self.bound(j), self.bound(j + 1));
        if lo >= hi {
            return (lo, self.weighted(lo));
        }
        match strategy {
            MaxStrategy::Auto => self.max_auto(lo, hi),
            MaxStrategy::Grid { points } => {
                let points = points.max(2);
                let mut best = (lo, self.weighted(lo));
                for i in 1..points {
                    let t = if i == points - 1 { hi } else { lo + (hi - lo) * i as f64 / (points - 1) as f64 };
                    let v = self.weighted(t);
                    if v > best.1 {
                        best = (t, v);
                    }
                }
                best
            }
        }
    }

    fn max_auto(&self, lo: f64, hi: f64) -> (f64, ExtReal) {
        let field = self.problem.field();
        let mut cuts = Vec::with_capacity(4);
        cuts.push(lo);
        cuts.extend(field.special_points_between(lo, hi));
        cuts.push(hi);

        let mut best = (lo, self.weighted(lo));
        let consider = |t: f64, v: ExtReal, best: &mut (f64, ExtReal)| {
            if v > best.1 || (v == best.1 && t < best.0) {
                *best = (t, v);
            }
        };
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let formula = field.formula_between(a, b);
            if !formula.is_neg_inf() && b > a {
                let g = |t: f64| formula.eval(t) + self.pure(t);
                let (t, v) = if formula.is_concave() {
                    golden_max(&g, a, b)
                } else {
                    sampled_max(&g, a, b)
                };
                consider(t, v, &mut best);
            }
            consider(b, self.weighted(b), &mut best);
        }
        best
    }

    pub fn maxima(&self, strategy: MaxStrategy) -> MaximaVector {
        let n = self.nodes.len();
        let mut m = Vec::with_capacity(n + 1);
        let mut argmax = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let (t, v) = self.max_on(j, strategy);
            m.push(v);
            argmax.push(v.is_finite().then_some(t));
        }
        MaximaVector { m, argmax }
    }
}

/// Golden-section search for the maximum of a concave function on the open
/// interval `(a, b)`. Ties keep the left bracket.
pub(crate) fn golden_max(g: &impl Fn(f64) -> ExtReal, a: f64, b: f64) -> (f64, ExtReal) {
    let (mut a, mut b) = (a, b);
    if b - a <= GOLDEN_WIDTH_TOL {
        let t = 0.5 * (a + b);
        return (t, g(t));
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    while b - a > GOLDEN_WIDTH_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = g(d);
        }
        if c >= d {
            break;
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Dense sampling followed by a golden refinement around the best sample.
fn sampled_max(g: &impl Fn(f64) -> ExtReal, a: f64, b: f64) -> (f64, ExtReal) {
    let h = (b - a) / (NONCONCAVE_SAMPLES + 1) as f64;
    let mut best = (a + h, g(a + h));
    for i in 2..=NONCONCAVE_SAMPLES {
        let t = a + h * i as f64;
        let v = g(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    let refined = golden_max(g, (best.0 - h).max(a), (best.0 + h).min(b));
    if refined.1 > best.1 {
        refined
    } else {
        best
    }
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::Domain(format!("evaluation point {t} outside [0, 1]")))
    }
}

fn check_len(problem: &Problem, y: &NodeSystem) -> Result<()> {
    if problem.n() != y.len() {
        return Err(Error::Validation(format!("problem has n = {} but {} nodes given", problem.n(), y.len())));
    }
    Ok(())
}

/// Pure sum of translates `f(y, t) = Σ r_j K(t - y_j)`.
pub fn eval_pure(problem: &Problem, y: &NodeSystem, t: f64) -> Result<ExtReal> {
    check_len(problem, y)?;
    check_t(t)?;
    Ok(Translates::new(problem, y.as_slice()).pure(t))
}

/// Weighted sum of translates `F(y, t) = J(t) + f(y, t)`.
pub fn eval_weighted(problem: &Problem, y: &NodeSystem, t: f64) -> Result<ExtReal> {
    check_len(problem, y)?;
    check_t(t)?;
    Ok(Translates::new(problem, y.as_slice()).weighted(t))
}

/// `sup F(y, ·)` over `I_j(y)` and a location attaining it.
pub fn maximize_on_interval(problem: &Problem, y: &NodeSystem, j: usize, strategy: MaxStrategy) -> Result<(f64, ExtReal)> {
    check_len(problem, y)?;
    if j > problem.n() {
        return Err(Error::Domain(format!("interval index {j} exceeds n = {}", problem.n())));
    }
    Ok(Translates::new(problem, y.as_slice()).max_on(j, strategy))
}

/// All interval maxima `m_0(y), …, m_n(y)`.
pub fn interval_maxima(problem: &Problem, y: &NodeSystem) -> Result<MaximaVector> {
    check_len(problem, y)?;
    Ok(Translates::new(problem, y.as_slice()).maxima(MaxStrategy::Auto))
}

/// Regularity test on a raw node slice; the kernel must be singular.
pub(crate) fn is_regular(problem: &Problem, nodes: &[f64]) -> bool {
    let n = nodes.len();
    let strict = nodes[0] > 0.0 && nodes[n - 1] < 1.0 && nodes.windows(2).all(|w| w[0] < w[1]);
    if !strict {
        return false;
    }
    let components = problem.field().singularity_set();
    if components.is_empty() {
        return true;
    }
    (0..=n).all(|j| {
        let lo = if j == 0 { 0.0 } else { nodes[j - 1] };
        let hi = if j == n { 1.0 } else { nodes[j] };
        // relative interior with respect to [0, 1]
        let (lo_closed, hi_closed) = (j == 0, j == n);
        !components.iter().any(|c| c.contains_interval(lo, lo_closed, hi, hi_closed))
    })
}

/// Membership in the regularity set `Y`: strictly ordered nodes and no interval
/// whose relative interior lies inside the singularity set of the field.
pub fn in_regularity_set(problem: &Problem, y: &NodeSystem) -> Result<bool> {
    check_len(problem, y)?;
    if !problem.kernel().classify().singular {
        return Err(Error::Hypothesis(format!(
            "the regularity test needs a singular kernel, {} is not",
            problem.kernel().name()
        )));
    }
    Ok(is_regular(problem, y.as_slice()))
}

/// The difference map `Φ(y)`, defined on `Y`.
pub fn difference(problem: &Problem, y: &NodeSystem) -> Result<DifferenceVector> {
    if !in_regularity_set(problem, y)? {
        return Err(Error::Regularity(format!("{:?} is not in the regularity set", y.as_slice())));
    }
    let maxima = interval_maxima(problem, y)?;
    let phi = maxima
        .differences()
        .ok_or_else(|| Error::Regularity("an interval maximum is -inf".into()))?;
    Ok(DifferenceVector { phi })
}
