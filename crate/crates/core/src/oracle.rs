//! Brute-force grid search for the minimax and maximin values.
//!
//! Cells are non-decreasing node tuples on a tensor grid, so degenerate node
//! systems on the boundary of the simplex are included. Each refinement round
//! shrinks the box around the incumbent and re-grids.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::nodes::NodeSystem;
use crate::problem::Problem;
use crate::translates::{MaxStrategy, MaximaVector, Translates};

/// Default cap on `points_per_dim^n * (refine_rounds + 1)`.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Largest node count the oracle accepts.
pub const MAX_NODES: usize = 4;

/// Cells whose score is within this of the best are reported as near-optimal.
pub const NEAR_OPTIMAL_TOL: f64 = 1e-9;

const NEAR_OPTIMAL_CAP: usize = 10_000;

/// Grid resolution and refinement depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    pub points_per_dim: usize,
    pub refine_rounds: usize,
}

impl GridSpec {
    pub fn new(points_per_dim: usize, refine_rounds: usize) -> Self {
        GridSpec { points_per_dim, refine_rounds }
    }

    fn check(&self, n: usize, budget: u64) -> Result<()> {
        if self.points_per_dim < 2 {
            return Err(Error::Validation("a grid needs at least 2 points per dimension".into()));
        }
        let cost = (self.points_per_dim as u64)
            .checked_pow(n as u32)
            .and_then(|c| c.checked_mul(self.refine_rounds as u64 + 1));
        match cost {
            Some(c) if c <= budget => Ok(()),
            _ => Err(Error::Budget(format!(
                "{}^{n} points x {} rounds exceeds the budget of {budget}",
                self.points_per_dim,
                self.refine_rounds + 1
            ))),
        }
    }
}

/// Outcome of a generic grid minimization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSearch {
    pub nodes: Vec<f64>,
    pub score: f64,
    /// Largest coordinate spacing of the last round.
    pub pitch: f64,
    pub evaluations: u64,
    /// First-round cells within [`NEAR_OPTIMAL_TOL`] of the first-round best.
    pub near_optimal: Vec<Vec<f64>>,
}

/// Result of [`grid_minimax`] or [`grid_maximin`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub nodes: NodeSystem,
    pub value: ExtReal,
    pub maxima: MaximaVector,
    pub pitch: f64,
    pub evaluations: u64,
    pub near_optimal: Vec<NodeSystem>,
}

fn axis(lo: f64, hi: f64, p: usize) -> Vec<f64> {
    (0..p)
        .map(|k| if k + 1 == p { hi } else { lo + (hi - lo) * k as f64 / (p - 1) as f64 })
        .collect()
}

/// Non-decreasing tuples from per-coordinate axes, in lexicographic order.
fn sorted_tuples(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(axes.len());
    fn rec(axes: &[Vec<f64>], current: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        let i = current.len();
        if i == axes.len() {
            out.push(current.clone());
            return;
        }
        let floor = current.last().copied().unwrap_or(f64::MIN);
        for &v in &axes[i] {
            if v >= floor {
                current.push(v);
                rec(axes, current, out);
                current.pop();
            }
        }
    }
    rec(axes, &mut current, &mut out);
    out
}

/// Minimizes `objective` over non-decreasing tuples in the box `[lower, upper]`.
///
/// Ties go to the lexicographically smallest tuple, independent of scheduling.
pub fn grid_minimize<F>(lower: &[f64], upper: &[f64], grid: GridSpec, budget: u64, objective: F) -> Result<GridSearch>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = lower.len();
    if n == 0 || upper.len() != n || lower.iter().zip(upper).any(|(l, u)| !(l <= u)) {
        return Err(Error::Validation("grid box bounds are malformed".into()));
    }
    grid.check(n, budget)?;
    let p = grid.points_per_dim;
    let mut lo = lower.to_vec();
    let mut hi = upper.to_vec();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut near_optimal = Vec::new();
    let mut evaluations = 0u64;
    let mut pitch = 0.0;

    for round in 0..=grid.refine_rounds {
        let axes: Vec<Vec<f64>> = (0..n).map(|i| axis(lo[i], hi[i], p)).collect();
        let cells = sorted_tuples(&axes);
        evaluations += cells.len() as u64;
        pitch = (0..n).map(|i| (hi[i] - lo[i]) / (p - 1) as f64).fold(0.0, f64::max);
        let scores: Vec<f64> = cells.par_iter().map(|c| objective(c)).collect();
        let mut round_best: Option<usize> = None;
        for (k, s) in scores.iter().enumerate() {
            if s.is_nan() {
                continue;
            }
            if round_best.is_none_or(|b| *s < scores[b]) {
                round_best = Some(k);
            }
        }
        let Some(k) = round_best else {
            return Err(Error::Validation("objective is undefined on every grid cell".into()));
        };
        if round == 0 {
            let cutoff = scores[k] + NEAR_OPTIMAL_TOL;
            near_optimal = cells
                .iter()
                .zip(&scores)
                .filter(|(_, s)| **s <= cutoff)
                .take(NEAR_OPTIMAL_CAP)
                .map(|(c, _)| c.clone())
                .collect();
        }
        if best.as_ref().is_none_or(|(s, _)| scores[k] < *s) {
            best = Some((scores[k], cells[k].clone()));
        }
        let center = &best.as_ref().expect("set above").1;
        for i in 0..n {
            let width = ((hi[i] - lo[i]) / 10.0).max(4.0 * (hi[i] - lo[i]) / (p - 1) as f64);
            let (mut a, mut b) = (center[i] - width / 2.0, center[i] + width / 2.0);
            if a < lower[i] {
                b = (b + lower[i] - a).min(upper[i]);
                a = lower[i];
            }
            if b > upper[i] {
                a = (a - (b - upper[i])).max(lower[i]);
                b = upper[i];
            }
            lo[i] = a;
            hi[i] = b;
        }
    }
    let (score, nodes) = best.expect("at least one round");
    Ok(GridSearch { nodes, score, pitch, evaluations, near_optimal })
}

fn check_problem(problem: &Problem) -> Result<()> {
    if problem.n() > MAX_NODES {
        return Err(Error::Budget(format!("grid oracle supports n <= {MAX_NODES}, got {}", problem.n())));
    }
    Ok(())
}

fn upper_score(problem: &Problem, y: &[f64]) -> f64 {
    Translates::new(problem, y).maxima(MaxStrategy::Auto).upper().to_f64()
}

fn lower_score(problem: &Problem, y: &[f64]) -> f64 {
    match Translates::new(problem, y).maxima(MaxStrategy::Auto).lower() {
        ExtReal::Finite(v) => -v,
        ExtReal::NegInf => f64::INFINITY,
    }
}

fn into_result(problem: &Problem, search: GridSearch, value: ExtReal) -> Result<OracleResult> {
    let maxima = Translates::new(problem, &search.nodes).maxima(MaxStrategy::Auto);
    Ok(OracleResult {
        nodes: NodeSystem::new(search.nodes)?,
        value,
        maxima,
        pitch: search.pitch,
        evaluations: search.evaluations,
        near_optimal: search.near_optimal.into_iter().map(NodeSystem::new).collect::<Result<_>>()?,
    })
}

/// Grid approximation of `inf_S max_j m_j`.
pub fn grid_minimax(problem: &Problem, grid: GridSpec) -> Result<OracleResult> {
    check_problem(problem)?;
    let n = problem.n();
    let search = grid_minimize(&vec![0.0; n], &vec![1.0; n], grid, DEFAULT_BUDGET, |y| upper_score(problem, y))?;
    let value = ExtReal::from_f64(search.score);
    into_result(problem, search, value)
}

/// Grid approximation of `sup_S min_j m_j`. Cells with `min_j m_j = -∞` only win if every cell has it.
pub fn grid_maximin(problem: &Problem, grid: GridSpec) -> Result<OracleResult> {
    check_problem(problem)?;
    let n = problem.n();
    let search = grid_minimize(&vec![0.0; n], &vec![1.0; n], grid, DEFAULT_BUDGET, |y| lower_score(problem, y))?;
    let value = if search.score.is_finite() { ExtReal::Finite(-search.score) } else { ExtReal::NegInf };
    into_result(problem, search, value)
}

/// Interval maxima for many node systems, evaluated in parallel in input order.
pub fn evaluate_many(problem: &Problem, systems: &[Vec<f64>]) -> Result<Vec<MaximaVector>> {
    if let Some(bad) = systems.iter().find(|y| y.len() != problem.n()) {
        return Err(Error::Validation(format!("node system {bad:?} has the wrong length")));
    }
    Ok(systems.par_iter().map(|y| Translates::new(problem, y).maxima(MaxStrategy::Auto)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::kernel::KernelSpec;

    #[test]
    fn single_log_node() {
        let p = Problem::new(vec![1.0], KernelSpec::Log, FieldSpec::zero()).unwrap();
        let r = grid_minimax(&p, GridSpec::new(10_000, 2)).unwrap();
        assert!((r.nodes.as_slice()[0] - 0.5).abs() < 1e-4);
        assert!((r.value.to_f64() - 0.5f64.ln()).abs() < 1e-4);
        let r = grid_maximin(&p, GridSpec::new(101, 3)).unwrap();
        assert!((r.nodes.as_slice()[0] - 0.5).abs() < 1e-5);
        assert!((r.value.to_f64() - 0.5f64.ln()).abs() < 1e-5);
    }

    #[test]
    fn two_chebyshev_nodes() {
        let p = Problem::uniform(2, KernelSpec::Log, FieldSpec::zero()).unwrap();
        let r = grid_minimax(&p, GridSpec::new(51, 4)).unwrap();
        let err = r.value.to_f64() - 0.125f64.ln();
        assert!(err >= 0.0 && err <= 10.0 * r.pitch, "{err} vs pitch {}", r.pitch);
        assert!((r.nodes.as_slice()[0] - 0.1464466).abs() < 1e-3);
    }

    #[test]
    fn budget_and_dimension_limits() {
        let p = Problem::uniform(3, KernelSpec::Log, FieldSpec::zero()).unwrap();
        assert!(matches!(grid_minimax(&p, GridSpec::new(1000, 200)), Err(Error::Budget(_))));
        let p5 = Problem::uniform(5, KernelSpec::Log, FieldSpec::zero()).unwrap();
        assert!(matches!(grid_minimax(&p5, GridSpec::new(3, 0)), Err(Error::Budget(_))));
        assert!(matches!(grid_minimax(&p, GridSpec::new(1, 0)), Err(Error::Validation(_))));
    }

    #[test]
    fn ties_prefer_the_lexicographically_smallest_cell() {
        let s = grid_minimize(&[0.0, 0.0], &[1.0, 1.0], GridSpec::new(5, 0), DEFAULT_BUDGET, |_| 1.0).unwrap();
        assert_eq!(s.nodes, vec![0.0, 0.0]);
        assert_eq!(s.near_optimal.len(), 15);
        assert_eq!(s.evaluations, 15);
    }

    #[test]
    fn flat_maximin_reports_many_cells() {
        let field = FieldSpec::indicator_from(0.955671).unwrap();
        let p = Problem::new(vec![1.0], KernelSpec::CappedLog { a: 0.25 }, field).unwrap();
        let r = grid_maximin(&p, GridSpec::new(1001, 0)).unwrap();
        assert!(r.value.to_f64().abs() < 1e-12);
        assert!(r.near_optimal.len() > 600);
    }

    #[test]
    fn evaluate_many_keeps_order() {
        let p = Problem::new(vec![1.0], KernelSpec::Log, FieldSpec::zero()).unwrap();
        let m = evaluate_many(&p, &[vec![0.25], vec![0.5]]).unwrap();
        assert!((m[0].m[0].to_f64() - 0.25f64.ln()).abs() < 1e-15);
        assert!((m[1].m[0].to_f64() - 0.5f64.ln()).abs() < 1e-15);
        assert!(evaluate_many(&p, &[vec![0.1, 0.2]]).is_err());
    }
}
