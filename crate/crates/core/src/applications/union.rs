use serde::{Deserialize, Serialize};

use super::gap::{GapProblem, WeightSpec};
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::oracle::{grid_minimize, GridSpec, DEFAULT_BUDGET};
use crate::problem::Problem;
use crate::solver::solve_equioscillation;
use crate::translates::{MaxStrategy, Translates};

/// Grid cells per composition and refinement round in [`restricted_constant`].
const CELLS_PER_ROUND: usize = 3000;
const REFINE_ROUNDS: usize = 6;
const MAX_RESTRICTED_NODES: usize = 4;

/// A finite union of disjoint closed intervals `[a_1, b_1] ∪ … ∪ [a_k, b_k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct IntervalUnion {
    components: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for IntervalUnion {
    type Error = Error;

    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        IntervalUnion::new(v)
    }
}

impl From<IntervalUnion> for Vec<(f64, f64)> {
    fn from(u: IntervalUnion) -> Self {
        u.components
    }
}

impl IntervalUnion {
    pub fn new(components: Vec<(f64, f64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Validation("an interval union needs at least one component".into()));
        }
        if components.iter().any(|&(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(Error::Validation(format!("components {components:?} must be non-degenerate")));
        }
        if components.windows(2).any(|w| !(w[0].1 < w[1].0)) {
            return Err(Error::Validation(format!("components {components:?} must be ordered and disjoint")));
        }
        Ok(IntervalUnion { components })
    }

    pub fn components(&self) -> &[(f64, f64)] {
        &self.components
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    /// The convex hull `[a_1, b_k]`.
    pub fn hull(&self) -> (f64, f64) {
        (self.components[0].0, self.components[self.components.len() - 1].1)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.components.iter().any(|&(a, b)| a <= t && t <= b)
    }
}

/// A Chebyshev constant and the nodes attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnionConstant {
    pub value: f64,
    pub nodes: Vec<f64>,
}

/// Side-by-side unrestricted and restricted constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantComparison {
    pub unrestricted: UnionConstant,
    pub restricted: UnionConstant,
    /// `C(k, r)`.
    pub factor: f64,
    /// Unrestricted nodes moved out of the gaps.
    pub snapped_nodes: Vec<f64>,
    pub snapped_norm: f64,
    /// `C ≤ R`.
    pub lower_ok: bool,
    /// `R ≤ C(k, r) C`.
    pub upper_ok: bool,
    /// `‖Q_snap‖ ≤ C(k, r) C`.
    pub snap_ok: bool,
}

/// Slack used by [`compare_constants`].
pub const COMPARISON_SLACK: f64 = 1e-9;

/// `2` raised to the largest sum of `k - 1` exponents. With fewer than `k - 1`
/// exponents all of them are summed, since at most `n` gaps can hold a node.
pub fn union_factor(k: usize, r: &[f64]) -> f64 {
    let mut sorted = r.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let take = k.saturating_sub(1).min(sorted.len());
    2f64.powf(sorted[..take].iter().sum())
}

/// Moves nodes lying in a gap `(b_l, a_{l+1})` to the nearer gap end, ties to `b_l`.
pub fn snap_to_e(nodes: &[f64], e: &IntervalUnion) -> Vec<f64> {
    let (lo, hi) = e.hull();
    let mut out: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let x = x.clamp(lo, hi);
            for w in e.components.windows(2) {
                let (b, a) = (w[0].1, w[1].0);
                if b < x && x < a {
                    return if x - b <= a - x { b } else { a };
                }
            }
            x
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// The problem on `[0, 1]` with field `log(w χ_E)` and the log of the scale factor.
fn union_problem(e: &IntervalUnion, r: &[f64], weight: &WeightSpec) -> Result<(Problem, GapProblem, Vec<(f64, f64)>)> {
    let (lo, hi) = e.hull();
    if weight.interval() != (lo, hi) {
        return Err(Error::Validation(format!(
            "weight lives on {:?} but the hull of E is [{lo}, {hi}]",
            weight.interval()
        )));
    }
    let gap = GapProblem { exponents: r.to_vec(), weight: weight.clone() };
    let unit: Vec<(f64, f64)> = e
        .components
        .iter()
        .map(|&(a, b)| (weight.to_unit(a).clamp(0.0, 1.0), weight.to_unit(b).clamp(0.0, 1.0)))
        .collect();
    let field = weight.log_field().restrict_to(&unit)?;
    let problem = Problem::new(r.to_vec(), KernelSpec::Log, field)?;
    Ok((problem, gap, unit))
}

fn log_norm(problem: &Problem, unit_nodes: &[f64]) -> f64 {
    Translates::new(problem, unit_nodes).maxima(MaxStrategy::Auto).upper().to_f64()
}

/// Minimal weighted sup-norm over `E` of `∏|t - x_j|^{r_j}` with ordered real
/// nodes anywhere; the minimizer has its nodes in the hull of `E`.
pub fn unrestricted_constant(e: &IntervalUnion, r: &[f64], weight: &WeightSpec, tol: f64) -> Result<UnionConstant> {
    let (problem, gap, _) = union_problem(e, r, weight)?;
    let report = solve_equioscillation(&problem, tol)?;
    Ok(UnionConstant {
        value: (report.value + gap.log_scale()).exp(),
        nodes: report.nodes.as_slice().iter().map(|&s| weight.from_unit(s)).collect(),
    })
}

/// All ways to split `n` ordered nodes into `k` components.
fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![n]];
    }
    (0..=n)
        .flat_map(|first| {
            compositions(n - first, k - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Coordinate search inside per-coordinate boxes, keeping the nodes ordered.
fn compass_polish(x: &mut [f64], lower: &[f64], upper: &[f64], start_step: f64, tol: f64, f: impl Fn(&[f64]) -> f64) -> f64 {
    let n = x.len();
    let mut best = f(x);
    let mut step = start_step;
    while step >= tol {
        let mut improved = false;
        for i in 0..n {
            for dir in [-1.0, 1.0] {
                let lo = if i == 0 { lower[i] } else { lower[i].max(x[i - 1]) };
                let hi = if i + 1 == n { upper[i] } else { upper[i].min(x[i + 1]) };
                let old = x[i];
                x[i] = (old + dir * step).clamp(lo, hi);
                let v = f(x);
                if v < best {
                    best = v;
                    improved = true;
                } else {
                    x[i] = old;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Minimal weighted sup-norm over `E` with all (ordered) nodes in `E`.
///
/// Every split of the nodes among the components gets a refined grid search;
/// the snapped unrestricted extremizer is always a candidate.
pub fn restricted_constant(e: &IntervalUnion, r: &[f64], weight: &WeightSpec, tol: f64) -> Result<UnionConstant> {
    let n = r.len();
    if n > MAX_RESTRICTED_NODES {
        return Err(Error::Budget(format!("restricted search supports n <= {MAX_RESTRICTED_NODES}, got {n}")));
    }
    let (problem, gap, unit) = union_problem(e, r, weight)?;
    let objective = |x: &[f64]| log_norm(&problem, x);
    let points = ((CELLS_PER_ROUND as f64).powf(1.0 / n as f64).floor() as usize).clamp(3, 200);
    let grid = GridSpec::new(points, REFINE_ROUNDS);

    let mut best: Option<(f64, Vec<f64>, Vec<f64>, Vec<f64>)> = None;
    let mut consider = |score: f64, x: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>| {
        if best.as_ref().is_none_or(|b| score < b.0) {
            best = Some((score, x, lower, upper));
        }
    };
    for split in compositions(n, e.k()) {
        let mut lower = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n);
        for (l, &count) in split.iter().enumerate() {
            lower.extend(std::iter::repeat_n(unit[l].0, count));
            upper.extend(std::iter::repeat_n(unit[l].1, count));
        }
        let search = grid_minimize(&lower, &upper, grid, DEFAULT_BUDGET, objective)?;
        consider(search.score, search.nodes, lower, upper);
    }

    if let Ok(unrestricted) = solve_equioscillation(&problem, tol.max(1e-12)) {
        let snapped: Vec<f64> = snap_to_e(unrestricted.nodes.as_slice(), &IntervalUnion { components: unit.clone() });
        let (lower, upper): (Vec<f64>, Vec<f64>) = snapped
            .iter()
            .map(|&x| *unit.iter().find(|c| c.0 <= x && x <= c.1).expect("snapped into E"))
            .unzip();
        consider(objective(&snapped), snapped, lower, upper);
    }

    let (_, mut x, lower, upper) = best.expect("at least one composition");
    let start = (lower.iter().zip(&upper).map(|(l, u)| u - l).fold(0.0, f64::max) / points as f64).max(tol);
    let score = compass_polish(&mut x, &lower, &upper, start, tol.max(1e-14), objective);
    Ok(UnionConstant {
        value: (score + gap.log_scale()).exp(),
        nodes: x.iter().map(|&s| weight.from_unit(s)).collect(),
    })
}

/// Computes both constants and checks `C ≤ R ≤ C(k, r) C` and the snapping bound.
pub fn compare_constants(e: &IntervalUnion, r: &[f64], weight: &WeightSpec, tol: f64) -> Result<ConstantComparison> {
    let (problem, gap, _) = union_problem(e, r, weight)?;
    let unrestricted = unrestricted_constant(e, r, weight, tol)?;
    let restricted = restricted_constant(e, r, weight, tol)?;
    let factor = union_factor(e.k(), r);
    let snapped_nodes = snap_to_e(&unrestricted.nodes, e);
    let unit: Vec<f64> = snapped_nodes.iter().map(|&x| weight.to_unit(x).clamp(0.0, 1.0)).collect();
    let snapped_norm = (log_norm(&problem, &unit) + gap.log_scale()).exp();
    let c = unrestricted.value;
    let slack = COMPARISON_SLACK * (1.0 + factor * c);
    Ok(ConstantComparison {
        lower_ok: c <= restricted.value + slack,
        upper_ok: restricted.value <= factor * c + slack,
        snap_ok: snapped_norm <= factor * c + slack,
        unrestricted,
        restricted,
        factor,
        snapped_nodes,
        snapped_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_gaps() -> IntervalUnion {
        IntervalUnion::new(vec![(0.0, 0.4), (0.6, 1.0)]).unwrap()
    }

    #[test]
    fn union_validation() {
        assert!(IntervalUnion::new(vec![(0.0, 0.5), (0.5, 1.0)]).is_err());
        assert!(IntervalUnion::new(vec![(0.3, 0.2)]).is_err());
        assert!(IntervalUnion::new(vec![]).is_err());
        let e = two_gaps();
        assert_eq!(e.hull(), (0.0, 1.0));
        assert!(e.contains(0.4) && !e.contains(0.5));
    }

    #[test]
    fn snapping() {
        let e = two_gaps();
        assert_eq!(snap_to_e(&[0.5], &e), vec![0.4]);
        assert_eq!(snap_to_e(&[0.45, 0.7], &e), vec![0.4, 0.7]);
        assert_eq!(snap_to_e(&[0.3], &e), vec![0.3]);
        assert_eq!(snap_to_e(&[0.58], &e), vec![0.6]);
    }

    #[test]
    fn factor() {
        assert_eq!(union_factor(2, &[1.0, 1.0, 1.0]), 2.0);
        assert_eq!(union_factor(3, &[1.0, 1.0]), 4.0);
        assert_eq!(union_factor(2, &[2.0, 1.0]), 4.0);
        assert_eq!(union_factor(1, &[3.0]), 1.0);
        assert_eq!(union_factor(4, &[1.0, 0.5]), 2f64.powf(1.5));
    }

    #[test]
    fn one_node_on_two_intervals() {
        let e = two_gaps();
        let w = WeightSpec::unit(0.0, 1.0).unwrap();
        let c = unrestricted_constant(&e, &[1.0], &w, 1e-11).unwrap();
        assert!((c.value - 0.5).abs() < 1e-9 && (c.nodes[0] - 0.5).abs() < 1e-9);
        let r = restricted_constant(&e, &[1.0], &w, 1e-12).unwrap();
        assert!((r.value - 0.6).abs() < 1e-9);
        assert!((r.nodes[0] - 0.4).abs() < 1e-9 || (r.nodes[0] - 0.6).abs() < 1e-9);
        let cmp = compare_constants(&e, &[1.0], &w, 1e-11).unwrap();
        assert!(cmp.lower_ok && cmp.upper_ok && cmp.snap_ok);
        assert!((cmp.snapped_norm - 0.6).abs() < 1e-9);
    }

    #[test]
    fn single_component_matches_the_interval_problem() {
        let e = IntervalUnion::new(vec![(0.0, 1.0)]).unwrap();
        let w = WeightSpec::unit(0.0, 1.0).unwrap();
        let c = unrestricted_constant(&e, &[1.0, 1.0], &w, 1e-11).unwrap();
        assert!((c.value - 0.125).abs() < 1e-10);
        let r = restricted_constant(&e, &[1.0, 1.0], &w, 1e-12).unwrap();
        assert!((r.value - c.value).abs() < 1e-8);
    }

    #[test]
    fn two_nodes_on_two_intervals() {
        let e = two_gaps();
        let w = WeightSpec::unit(0.0, 1.0).unwrap();
        let cmp = compare_constants(&e, &[1.0, 1.0], &w, 1e-11).unwrap();
        assert!(cmp.lower_ok && cmp.upper_ok && cmp.snap_ok, "{cmp:?}");
        assert!(cmp.restricted.value <= 2.0 * cmp.unrestricted.value + 1e-9);
    }

    #[test]
    fn weight_must_live_on_the_hull() {
        let w = WeightSpec::unit(0.0, 2.0).unwrap();
        assert!(matches!(unrestricted_constant(&two_gaps(), &[1.0], &w, 1e-9), Err(Error::Validation(_))));
    }
}
