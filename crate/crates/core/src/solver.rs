//! Solving `Φ(w) = c` for node systems, and the equioscillation point `c = 0`.
//!
//! Moving node `w_j` to the right raises `m_{j-1}` and lowers `m_j`, so each
//! component `Φ_j - c_j` is monotone in its own node. Gauss–Seidel sweeps
//! bisect one node at a time until the residual is small, then damped Newton
//! with a forward-difference Jacobian finishes the solve.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::kernel::KernelSpec;
use crate::nodes::NodeSystem;
use crate::problem::Problem;
use crate::translates::{is_regular, MaxStrategy, MaximaVector, Translates};

/// Knobs of the difference solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Target bound on `max_j |Φ_j(w) - c_j|`.
    pub tol: f64,
    /// Cap on sweeps plus Newton steps.
    pub max_iterations: usize,
    /// Residual below which Newton takes over from the sweeps.
    pub newton_switch: f64,
    /// Forward-difference step for the Jacobian.
    pub fd_step: f64,
    /// Final bracket width of a single-node bisection.
    pub bisect_tol: f64,
    /// Gap kept between a bisected node and its neighbours.
    pub bracket_eps: f64,
    /// Starting nodes; must lie in the regularity set. Defaults to [`initial_nodes`].
    pub initial: Option<NodeSystem>,
    /// Regularization strengths used for monotone kernels that are not strictly monotone.
    pub etas: Vec<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-9,
            max_iterations: 500,
            newton_switch: 1e-3,
            fd_step: 1e-7,
            bisect_tol: 1e-13,
            bracket_eps: 1e-12,
            initial: None,
            etas: vec![1e-2, 1e-3, 1e-4],
        }
    }
}

impl SolverConfig {
    pub fn with_tol(tol: f64) -> Self {
        SolverConfig { tol, ..Self::default() }
    }
}

/// What the regularized route did for a kernel without strict monotonicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizationReport {
    pub etas: Vec<f64>,
    /// Solution for each `eta`.
    pub nodes: Vec<Vec<f64>>,
    /// `max m_j` for each `eta`.
    pub values: Vec<f64>,
    /// Quadratic extrapolation of the nodes to `eta = 0`.
    pub extrapolated: Vec<f64>,
    /// Max-norm change between the last two regularized solutions.
    pub trend: f64,
    /// Whether a direct solve with the original kernel, started at the extrapolation, converged.
    pub polished: bool,
    /// Always set: without strict monotonicity the solution need not be unique.
    pub non_uniqueness_risk: bool,
}

/// Result of a difference or equioscillation solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub nodes: NodeSystem,
    pub maxima: MaximaVector,
    pub target: Vec<f64>,
    /// `max_j |Φ_j(w) - c_j|`.
    pub residual: f64,
    /// `max_j m_j(w)`.
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regularization: Option<RegularizationReport>,
}

impl SolveReport {
    /// `Φ(w)`.
    pub fn phi(&self) -> Vec<f64> {
        self.maxima.differences().unwrap_or_default()
    }

    /// Whether the argmax points strictly interlace the nodes: `t_0 < w_1 < t_1 < … < w_n < t_n`.
    pub fn interlaces(&self) -> bool {
        let mut seq = Vec::with_capacity(2 * self.nodes.len() + 1);
        for (j, t) in self.maxima.argmax.iter().enumerate() {
            match t {
                Some(t) => seq.push(*t),
                None => return false,
            }
            if let Some(&w) = self.nodes.as_slice().get(j) {
                seq.push(w);
            }
        }
        seq.windows(2).all(|p| p[0] < p[1])
    }
}

/// Outcome of [`sandwich_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SandwichCheck {
    pub lower_ok: bool,
    pub upper_ok: bool,
}

/// Slack used by [`sandwich_check`].
pub const SANDWICH_SLACK: f64 = 1e-9;

/// Checks `min_j m_j(x) ≤ value ≤ max_j m_j(x)` up to [`SANDWICH_SLACK`].
pub fn sandwich_check(problem: &Problem, x: &NodeSystem, value: f64) -> Result<SandwichCheck> {
    let maxima = crate::translates::interval_maxima(problem, x)?;
    Ok(SandwichCheck {
        lower_ok: maxima.lower() <= ExtReal::Finite(value + SANDWICH_SLACK),
        upper_ok: ExtReal::Finite(value) <= maxima.upper() + SANDWICH_SLACK,
    })
}

/// Solves `Φ(w) = c` with default settings and the given residual tolerance.
pub fn solve_difference(problem: &Problem, c: &[f64], tol: f64) -> Result<SolveReport> {
    solve_difference_with(problem, c, &SolverConfig::with_tol(tol))
}

/// The equioscillation point, which is also the minimax and maximin point.
pub fn solve_equioscillation(problem: &Problem, tol: f64) -> Result<SolveReport> {
    solve_difference(problem, &vec![0.0; problem.n()], tol)
}

pub fn solve_equioscillation_with(problem: &Problem, config: &SolverConfig) -> Result<SolveReport> {
    solve_difference_with(problem, &vec![0.0; problem.n()], config)
}

pub fn solve_difference_with(problem: &Problem, c: &[f64], config: &SolverConfig) -> Result<SolveReport> {
    if c.len() != problem.n() {
        return Err(Error::Validation(format!("target has {} entries, expected {}", c.len(), problem.n())));
    }
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::Validation("target entries must be finite".into()));
    }
    let flags = problem.kernel().classify();
    if !flags.singular || !flags.monotone_m {
        return Err(Error::Hypothesis(format!(
            "{} must be singular and monotone for the difference solver",
            problem.kernel().name()
        )));
    }
    let start = match &config.initial {
        Some(y) => {
            if y.len() != problem.n() || !is_regular(problem, y.as_slice()) {
                return Err(Error::Regularity(format!("initial nodes {:?} are not regular", y.as_slice())));
            }
            y.as_slice().to_vec()
        }
        None => initial_nodes(problem).into_vec(),
    };
    if flags.strictly_monotone_sm {
        let run = run_solver(problem, c, config, start);
        finish(problem, c, config, run, None)
    } else {
        solve_regularized(problem, c, config, start)
    }
}

/// Default starting point: equispaced nodes when they are regular, otherwise
/// midpoints between `n + 1` spread-out points where the field is finite.
pub fn initial_nodes(problem: &Problem) -> NodeSystem {
    let n = problem.n();
    let equi = NodeSystem::equispaced(n);
    if is_regular(problem, equi.as_slice()) {
        return equi;
    }
    let field = problem.field();
    let samples = 64 * (n + 1);
    let mut finite: Vec<f64> = (0..=samples)
        .map(|i| i as f64 / samples as f64)
        .chain(field.special_points())
        .filter(|&t| field.eval_unchecked(t).is_finite())
        .collect();
    finite.sort_by(f64::total_cmp);
    finite.dedup();
    if finite.len() < n + 1 {
        return equi;
    }
    let last = finite.len() - 1;
    let picks: Vec<f64> = (0..=n).map(|k| finite[(k * last + n / 2) / n.max(1)]).collect();
    let nodes: Vec<f64> = picks.windows(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    NodeSystem::new(nodes).unwrap_or(equi)
}

struct Run {
    nodes: Vec<f64>,
    residual: f64,
    iterations: usize,
}

fn finish(problem: &Problem, c: &[f64], config: &SolverConfig, run: Run, reg: Option<RegularizationReport>) -> Result<SolveReport> {
    if !(run.residual <= config.tol) || !is_regular(problem, &run.nodes) {
        return Err(Error::Convergence { iterations: run.iterations, residual: run.residual });
    }
    let maxima = Translates::new(problem, &run.nodes).maxima(MaxStrategy::Auto);
    let value = maxima.upper().to_f64();
    Ok(SolveReport {
        nodes: NodeSystem::new(run.nodes)?,
        maxima,
        target: c.to_vec(),
        residual: run.residual,
        value,
        iterations: run.iterations,
        converged: true,
        regularization: reg,
    })
}

/// `Φ(w) - c`, or `None` when `w` is not strictly ordered or a maximum is `-∞`.
fn residual_vector(problem: &Problem, w: &[f64], c: &[f64]) -> Option<Vec<f64>> {
    let n = w.len();
    if !(w[0] > 0.0 && w[n - 1] < 1.0 && w.windows(2).all(|p| p[0] < p[1])) {
        return None;
    }
    let m = Translates::new(problem, w).maxima(MaxStrategy::Auto);
    let phi = m.differences()?;
    Some(phi.iter().zip(c).map(|(p, c)| p - c).collect())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn residual_norm(problem: &Problem, w: &[f64], c: &[f64]) -> f64 {
    residual_vector(problem, w, c).map_or(f64::INFINITY, |r| norm(&r))
}

fn run_solver(problem: &Problem, c: &[f64], config: &SolverConfig, start: Vec<f64>) -> Run {
    let mut w = start;
    let mut residual = residual_norm(problem, &w, c);
    let mut iterations = 0;
    let mut newton_ok = true;
    while residual > config.tol && iterations < config.max_iterations {
        iterations += 1;
        if newton_ok && residual <= config.newton_switch {
            if let Some((next, r)) = newton_step(problem, &w, c, residual, config) {
                w = next;
                residual = r;
                continue;
            }
            newton_ok = false;
        } else {
            newton_ok = true;
        }
        sweep(problem, &mut w, c, config);
        residual = residual_norm(problem, &w, c);
    }
    Run { nodes: w, residual, iterations }
}

/// Sign of `m_j - m_{j-1} - c` for interval pair `(j-1, j)`; `None` if both maxima are `-∞`.
fn local_sign(t: &Translates<'_>, j: usize, c: f64) -> Option<f64> {
    let (_, left) = t.max_on(j - 1, MaxStrategy::Auto);
    let (_, right) = t.max_on(j, MaxStrategy::Auto);
    match (left, right) {
        (ExtReal::Finite(l), ExtReal::Finite(r)) => Some(r - l - c),
        (ExtReal::NegInf, ExtReal::Finite(_)) => Some(1.0),
        (ExtReal::Finite(_), ExtReal::NegInf) => Some(-1.0),
        (ExtReal::NegInf, ExtReal::NegInf) => None,
    }
}

/// One Gauss–Seidel pass: bisect each node on its own residual component.
fn sweep(problem: &Problem, w: &mut [f64], c: &[f64], config: &SolverConfig) {
    let n = w.len();
    for k in 0..n {
        let left = if k == 0 { 0.0 } else { w[k - 1] };
        let right = if k + 1 == n { 1.0 } else { w[k + 1] };
        let mut lo = left + config.bracket_eps;
        let mut hi = right - config.bracket_eps;
        if !(lo < hi) {
            continue;
        }
        let original = w[k];
        let mut stalled = false;
        while hi - lo > config.bisect_tol {
            let mid = 0.5 * (lo + hi);
            w[k] = mid;
            match local_sign(&Translates::new(problem, w), k + 1, c[k]) {
                Some(s) if s > 0.0 => lo = mid,
                Some(s) if s < 0.0 => hi = mid,
                Some(_) => {
                    lo = mid;
                    hi = mid;
                }
                None => {
                    stalled = true;
                    break;
                }
            }
        }
        w[k] = if stalled { original } else { 0.5 * (lo + hi) };
    }
}

/// One damped Newton step; `None` if the Jacobian is singular or no damped step reduces the residual.
fn newton_step(problem: &Problem, w: &[f64], c: &[f64], current: f64, config: &SolverConfig) -> Option<(Vec<f64>, f64)> {
    let n = w.len();
    let base = residual_vector(problem, w, c)?;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut probe = w.to_vec();
        let upper = if j + 1 == n { 1.0 } else { w[j + 1] };
        let h = if w[j] + config.fd_step < upper { config.fd_step } else { -config.fd_step };
        probe[j] += h;
        let shifted = residual_vector(problem, &probe, c)?;
        for i in 0..n {
            jac[(i, j)] = (shifted[i] - base[i]) / h;
        }
    }
    let rhs = -DVector::from_vec(base);
    let step = jac.lu().solve(&rhs)?;
    if step.iter().any(|s| !s.is_finite()) {
        return None;
    }
    let mut lambda = 1.0;
    for _ in 0..=30 {
        let trial: Vec<f64> = w.iter().zip(step.iter()).map(|(x, s)| x + lambda * s).collect();
        if let Some(r) = residual_vector(problem, &trial, c) {
            let r = norm(&r);
            if r < current {
                return Some((trial, r));
            }
        }
        lambda *= 0.5;
    }
    None
}

/// Lagrange weights at zero for the nodes `xs`.
fn extrapolation_weights(xs: &[f64]) -> Vec<f64> {
    (0..xs.len())
        .map(|i| {
            xs.iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, &xk)| xk / (xk - xs[i]))
                .product()
        })
        .collect()
}

fn solve_regularized(problem: &Problem, c: &[f64], config: &SolverConfig, start: Vec<f64>) -> Result<SolveReport> {
    if config.etas.is_empty() {
        return Err(Error::Validation("no regularization strengths configured".into()));
    }
    let mut solutions: Vec<Vec<f64>> = Vec::with_capacity(config.etas.len());
    let mut values = Vec::with_capacity(config.etas.len());
    let mut iterations = 0;
    let mut warm = start;
    for &eta in &config.etas {
        let regularized = problem.with_kernel(KernelSpec::regularized(problem.kernel().clone(), eta)?);
        let run = run_solver(&regularized, c, config, warm.clone());
        iterations += run.iterations;
        if !(run.residual <= config.tol) {
            return Err(Error::Convergence { iterations, residual: run.residual });
        }
        values.push(Translates::new(&regularized, &run.nodes).maxima(MaxStrategy::Auto).upper().to_f64());
        warm = run.nodes.clone();
        solutions.push(run.nodes);
    }
    let weights = extrapolation_weights(&config.etas);
    let n = problem.n();
    let mut extrapolated: Vec<f64> =
        (0..n).map(|i| solutions.iter().zip(&weights).map(|(s, w)| w * s[i]).sum()).collect();
    if !is_regular(problem, &extrapolated) {
        extrapolated = warm.clone();
    }
    let last = solutions.len() - 1;
    let trend = if last == 0 {
        0.0
    } else {
        solutions[last].iter().zip(&solutions[last - 1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };

    let polish = run_solver(problem, c, config, extrapolated.clone());
    let polished = polish.residual <= config.tol && is_regular(problem, &polish.nodes);
    let run = if polished {
        Run { iterations: iterations + polish.iterations, ..polish }
    } else {
        let residual = residual_norm(problem, &extrapolated, c);
        Run { nodes: extrapolated.clone(), residual, iterations }
    };
    let report = RegularizationReport {
        etas: config.etas.clone(),
        nodes: solutions,
        values,
        extrapolated,
        trend,
        polished,
        non_uniqueness_risk: true,
    };
    finish(problem, c, config, run, Some(report))
}
