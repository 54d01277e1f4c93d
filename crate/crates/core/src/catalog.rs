//! Built-in example problems with closed-form references.
//!
//! Each example pairs a fully specified [`Problem`] with formulas for its
//! interval maxima or extremal configuration, and [`run_example`] compares the
//! numerical pipeline against them.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::field::{FieldFormula, FieldSpec};
use crate::kernel::KernelSpec;
use crate::nodes::NodeSystem;
use crate::oracle::{evaluate_many, grid_maximin, grid_minimax, GridSpec};
use crate::perturbation::{check_intertwining, find_strict_majorization, IntertwiningVerdict};
use crate::problem::Problem;
use crate::solver::solve_equioscillation;
use crate::translates::{difference, interval_maxima};

/// Capped-log parameter of the strictness example.
pub const STRICTNESS_A: f64 = 0.25;
/// Start of the indicator field in the strictness example.
pub const STRICTNESS_B: f64 = 0.955671;
/// Capped-log parameter of the monotonicity example.
pub const MONOTONICITY_A: f64 = 0.1;

/// The two quartic node systems compared in the intertwining picture.
pub const QUARTIC_NODES: [[f64; 4]; 2] = [[0.05, 0.22, 0.634, 0.915], [0.035, 0.25, 0.4, 0.965]];

/// Deviation above which an example counts as failed.
pub const EXAMPLE_TOL: f64 = 1e-6;

/// The built-in examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleId {
    /// Non-singular kernel: the extremal point sits on the boundary of the simplex.
    Singularity,
    /// Non-monotone kernel: the minimax point is degenerate and nothing equioscillates.
    Monotonicity,
    /// Monotone but not strictly monotone kernel: the maximin value is attained on a segment.
    Strictness,
    /// Non-monotone tent kernel: equioscillating families and strict majorization.
    NonMonotone,
    /// Monic Chebyshev polynomial of degree `n` on `[0, 1]`.
    ClassicalChebyshev(usize),
    /// Two quartic node systems with intertwining maxima.
    Quartics,
}

impl ExampleId {
    pub fn all() -> Vec<ExampleId> {
        vec![
            ExampleId::Singularity,
            ExampleId::Monotonicity,
            ExampleId::Strictness,
            ExampleId::NonMonotone,
            ExampleId::ClassicalChebyshev(3),
            ExampleId::Quartics,
        ]
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleId::Singularity => write!(f, "singularity"),
            ExampleId::Monotonicity => write!(f, "monotonicity"),
            ExampleId::Strictness => write!(f, "strictness"),
            ExampleId::NonMonotone => write!(f, "nonmonotone"),
            ExampleId::ClassicalChebyshev(n) => write!(f, "classical_chebyshev:{n}"),
            ExampleId::Quartics => write!(f, "quartics"),
        }
    }
}

/// Drops a trailing `_<digits>_<digits>` tag and a leading `figure<digits>_` tag.
fn strip_tags(s: &str) -> &str {
    let mut s = s;
    if let Some(rest) = s.strip_prefix("figure") {
        if let Some(pos) = rest.find('_') {
            if pos > 0 && rest[..pos].chars().all(|c| c.is_ascii_digit()) {
                s = &rest[pos + 1..];
            }
        }
    }
    let parts: Vec<&str> = s.rsplitn(3, '_').collect();
    if parts.len() == 3 && [parts[0], parts[1]].iter().all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_digit())) {
        return parts[2];
    }
    s
}

impl FromStr for ExampleId {
    type Err = Error;

    /// Accepts the canonical names, `classical_chebyshev:N`, `classical_chebyshev(N)`,
    /// and names carrying a numeric tag such as `strictness_1_2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        for prefix in ["classical_chebyshev:", "classical_chebyshev(", "classical_chebyshev_"] {
            if let Some(rest) = s.strip_prefix(prefix) {
                let digits = rest.trim_end_matches(')');
                let n: usize = digits
                    .parse()
                    .map_err(|_| Error::Validation(format!("bad Chebyshev degree in {s:?}")))?;
                if n == 0 {
                    return Err(Error::Validation("Chebyshev degree must be positive".into()));
                }
                return Ok(ExampleId::ClassicalChebyshev(n));
            }
        }
        match strip_tags(s) {
            "singularity" => Ok(ExampleId::Singularity),
            "monotonicity" => Ok(ExampleId::Monotonicity),
            "strictness" => Ok(ExampleId::Strictness),
            "nonmonotone" => Ok(ExampleId::NonMonotone),
            "classical_chebyshev" => Ok(ExampleId::ClassicalChebyshev(3)),
            "quartics" => Ok(ExampleId::Quartics),
            other => Err(Error::Validation(format!("unknown example {other:?}"))),
        }
    }
}

/// The problem behind an example.
pub fn example_problem(id: ExampleId) -> Result<Problem> {
    match id {
        ExampleId::Singularity => Problem::uniform(
            2,
            KernelSpec::SqrtShift,
            FieldSpec::single(FieldFormula::SqrtAffine { c: 8.0, s: -1.0, t0: 1.0 })?,
        ),
        ExampleId::Monotonicity => Problem::uniform(
            1,
            KernelSpec::CappedLogPlusQuadratic { a: MONOTONICITY_A },
            FieldSpec::single(FieldFormula::SqrtAffine { c: 1.0, s: 1.0, t0: 0.0 })?,
        ),
        ExampleId::Strictness => {
            Problem::uniform(1, KernelSpec::capped_log(STRICTNESS_A)?, FieldSpec::indicator_from(STRICTNESS_B)?)
        }
        ExampleId::NonMonotone => Problem::uniform(2, KernelSpec::TentLog, FieldSpec::zero()),
        ExampleId::ClassicalChebyshev(n) => Problem::uniform(n, KernelSpec::Log, FieldSpec::zero()),
        ExampleId::Quartics => Problem::uniform(4, KernelSpec::Log, FieldSpec::zero()),
    }
}

/// Closed-form interval maxima for the singular-free example on the closed simplex.
pub fn singularity_maxima(y1: f64, y2: f64) -> [f64; 3] {
    [
        8.0 + (4.0 + y1).sqrt() + (4.0 + y2).sqrt(),
        8.0 * (1.0 - y1).sqrt() + 2.0 + (4.0 + y2 - y1).sqrt(),
        8.0 * (1.0 - y2).sqrt() + (4.0 + y2 - y1).sqrt() + 2.0,
    ]
}

/// Closed-form `(m_0, m_1)` for the capped-log example with the indicator field.
pub fn strictness_maxima(x: f64) -> [ExtReal; 2] {
    let capped = |s: f64| ExtReal::ln(s / STRICTNESS_A).min(ExtReal::ZERO);
    [capped(x), capped(1.0 - x) + 1.0]
}

/// The unique equioscillation point `1 - a/e` of the strictness example.
pub fn strictness_equioscillation_point() -> f64 {
    1.0 - STRICTNESS_A / std::f64::consts::E
}

/// Half-distance at which the two inner maxima of the tent example agree.
pub fn tent_delta0() -> f64 {
    (82f64.sqrt() - 1.0) / 90.0
}

/// Closed-form middle maximum of the tent example for `x = (a - δ, a + δ)`.
pub fn tent_middle_maximum(delta: f64) -> ExtReal {
    if delta <= 0.1 {
        2.0 * ExtReal::ln(10.0 * delta)
    } else {
        2.0 * ExtReal::ln(10.0 * (1.0 - delta) / 9.0)
    }
}

/// Closed-form right maximum of the tent example, valid when `a + δ + 1/10 ≤ 1`.
pub fn tent_right_maximum(delta: f64) -> f64 {
    if delta + 0.1 <= 0.5 {
        (1.0 - 20.0 * delta / 9.0).ln()
    } else {
        (100.0 / 9.0 * (0.5 - delta).powi(2)).ln()
    }
}

/// Chebyshev nodes on `[0, 1]`, ascending.
pub fn chebyshev_nodes(n: usize) -> Vec<f64> {
    (1..=n)
        .rev()
        .map(|j| 0.5 * (1.0 + ((2 * j - 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos()))
        .collect()
}

/// `log(2 · 4^{-n})`, the log sup-norm of the monic Chebyshev polynomial on `[0, 1]`.
pub fn chebyshev_value(n: usize) -> f64 {
    std::f64::consts::LN_2 - 2.0 * n as f64 * std::f64::consts::LN_2
}

/// One computed-versus-reference comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleCheck {
    pub label: String,
    pub computed: f64,
    pub expected: f64,
    pub deviation: f64,
}

/// The outcome of [`run_example`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleReport {
    pub id: String,
    pub checks: Vec<ExampleCheck>,
    pub max_deviation: f64,
    pub notes: Vec<String>,
}

impl ExampleReport {
    pub fn passed(&self) -> bool {
        self.max_deviation <= EXAMPLE_TOL
    }
}

#[derive(Default)]
struct Checks {
    checks: Vec<ExampleCheck>,
    notes: Vec<String>,
}

impl Checks {
    fn value(&mut self, label: impl Into<String>, computed: f64, expected: f64) {
        let deviation = if computed == expected { 0.0 } else { (computed - expected).abs() };
        let deviation = if deviation.is_nan() { f64::MAX } else { deviation };
        self.checks.push(ExampleCheck { label: label.into(), computed, expected, deviation });
    }

    /// A precomputed deviation, reported against an expected value of zero.
    fn deviation(&mut self, label: impl Into<String>, deviation: f64) {
        self.value(label, deviation, 0.0);
    }

    fn flag(&mut self, label: impl Into<String>, ok: bool) {
        self.value(label, if ok { 1.0 } else { 0.0 }, 1.0);
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self, id: ExampleId) -> ExampleReport {
        let max_deviation = self.checks.iter().map(|c| c.deviation).fold(0.0, f64::max);
        ExampleReport { id: id.to_string(), checks: self.checks, max_deviation, notes: self.notes }
    }
}

fn ext_gap(a: ExtReal, b: ExtReal) -> f64 {
    match (a, b) {
        (ExtReal::NegInf, ExtReal::NegInf) => 0.0,
        (ExtReal::Finite(x), ExtReal::Finite(y)) => (x - y).abs(),
        _ => f64::MAX,
    }
}

/// Runs an example end to end and compares against its closed forms.
pub fn run_example(id: ExampleId) -> Result<ExampleReport> {
    let problem = example_problem(id)?;
    let mut c = Checks::default();
    match id {
        ExampleId::Singularity => run_singularity(&problem, &mut c)?,
        ExampleId::Monotonicity => run_monotonicity(&problem, &mut c)?,
        ExampleId::Strictness => run_strictness(&problem, &mut c)?,
        ExampleId::NonMonotone => run_nonmonotone(&problem, &mut c)?,
        ExampleId::ClassicalChebyshev(n) => run_chebyshev(&problem, n, &mut c)?,
        ExampleId::Quartics => run_quartics(&problem, &mut c)?,
    }
    Ok(c.finish(id))
}

fn run_singularity(problem: &Problem, c: &mut Checks) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let y = NodeSystem::random(2, &mut rng);
        let m = interval_maxima(problem, &y)?;
        let expected = singularity_maxima(y.as_slice()[0], y.as_slice()[1]);
        for (got, want) in m.m.iter().zip(expected) {
            worst = worst.max(ext_gap(*got, ExtReal::Finite(want)));
        }
    }
    c.deviation("interval maxima vs closed forms at 100 random nodes", worst);

    let grid = GridSpec::new(101, 2);
    let minimax = grid_minimax(problem, grid)?;
    let maximin = grid_maximin(problem, grid)?;
    for (name, r) in [("minimax", &minimax), ("maximin", &maximin)] {
        c.value(format!("grid {name} node 1"), r.nodes.as_slice()[0], 0.0);
        c.value(format!("grid {name} node 2"), r.nodes.as_slice()[1], 0.0);
        c.value(format!("grid {name} value"), r.value.to_f64(), 12.0);
    }
    c.note("the closed forms give the optimal value 12 at (0, 0); a value of -4 is not consistent with them");
    Ok(())
}

fn run_monotonicity(problem: &Problem, c: &mut Checks) -> Result<()> {
    let r = grid_minimax(problem, GridSpec::new(1001, 3))?;
    c.value("grid minimax node", r.nodes.as_slice()[0], 0.0);
    c.value("grid minimax value", r.value.to_f64(), 11.0 / 8.0);
    c.flag("left interval maximum is -inf at the optimum", r.maxima.m[0].is_neg_inf());
    let at_zero = interval_maxima(problem, &NodeSystem::new(vec![0.0])?)?;
    c.value("m_1(0) = F(0, 1/4)", at_zero.m[1].to_f64(), 11.0 / 8.0);
    c.value("maximizer of F(0, .)", at_zero.argmax[1].unwrap_or(f64::NAN), 0.25);

    let ys: Vec<Vec<f64>> = (1..=1000).map(|k| vec![k as f64 / 1000.0]).collect();
    let maxima = evaluate_many(problem, &ys)?;
    let mut shortfall = 0.0f64;
    for (y, m) in ys.iter().zip(&maxima) {
        let y = y[0];
        let bound = if y <= 0.5 { (y + 0.25).sqrt() + 7.0 / 8.0 } else { (y - 0.25).sqrt() + 7.0 / 8.0 };
        shortfall = shortfall.max(bound - m.upper().to_f64());
    }
    c.deviation("lower bound on max m_j away from 0 (largest shortfall)", shortfall.max(0.0));
    Ok(())
}

fn run_strictness(problem: &Problem, c: &mut Checks) -> Result<()> {
    let x_star = strictness_equioscillation_point();
    let report = solve_equioscillation(problem, 1e-12)?;
    c.value("equioscillation node", report.nodes.as_slice()[0], x_star);
    c.value("equioscillation value", report.value, 0.0);

    let mut worst = 0.0f64;
    for k in 1..1000 {
        let x = k as f64 / 1000.0;
        let m = interval_maxima(problem, &NodeSystem::new(vec![x])?)?;
        let expected = strictness_maxima(x);
        worst = worst.max(ext_gap(m.m[0], expected[0])).max(ext_gap(m.m[1], expected[1]));
    }
    c.deviation("interval maxima vs closed forms on a 1e-3 grid", worst);

    let mut flat = 0.0f64;
    let (lo, hi) = (STRICTNESS_A, 0.908);
    for k in 0..=200 {
        let x = lo + (hi - lo) * k as f64 / 200.0;
        let m = interval_maxima(problem, &NodeSystem::new(vec![x])?)?;
        flat = flat.max(m.lower().to_f64().abs());
    }
    c.deviation("min_j m_j = 0 across [a, 0.908]", flat);

    let maximin = grid_maximin(problem, GridSpec::new(1001, 0))?;
    c.value("grid maximin value", maximin.value.to_f64(), 0.0);
    let cells = maximin.near_optimal.iter().map(|y| y.as_slice()[0]);
    let (min_cell, max_cell) = cells.fold((1.0f64, 0.0f64), |(a, b), x| (a.min(x), b.max(x)));
    c.value("first maximin cell", min_cell, STRICTNESS_A);
    c.value("last maximin cell", max_cell, (x_star * 1000.0).floor() / 1000.0);

    let phi = difference(problem, &NodeSystem::new(vec![0.775])?)?.phi[0];
    c.value("difference at 0.775", phi, 1.0 + (0.225f64 / STRICTNESS_A).ln());
    if let Some(reg) = &report.regularization {
        c.note(format!(
            "solved through regularization (trend {:.3e}); the kernel is not strictly monotone",
            reg.trend
        ));
    }
    Ok(())
}

/// Node systems `(a - δ, a + δ)` on the `1e-3` lattice with `δ ≤ min(a, 1 - a)`.
fn tent_lattice() -> Vec<(usize, usize)> {
    let mut cells = Vec::new();
    for ia in 0..=1000usize {
        let reach = ia.min(1000 - ia);
        for id in 0..=reach {
            cells.push((ia, id));
        }
    }
    cells
}

fn run_nonmonotone(problem: &Problem, c: &mut Checks) -> Result<()> {
    let d0 = tent_delta0();
    c.value("middle and right branches agree at delta_0", (2.0 * (10.0 * d0).ln()) - (1.0 - 20.0 * d0 / 9.0).ln(), 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(54);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let delta: f64 = rng.gen_range(0.0..0.4);
        let a = rng.gen_range(delta..=0.9 - delta);
        let m = interval_maxima(problem, &NodeSystem::new(vec![a - delta, a + delta])?)?;
        worst = worst.max(ext_gap(m.m[1], tent_middle_maximum(delta)));
        worst = worst.max(ext_gap(m.m[2], ExtReal::Finite(tent_right_maximum(delta))));
    }
    c.deviation("middle and right maxima vs branch formulas", worst);

    let cells = tent_lattice();
    let systems: Vec<Vec<f64>> = cells
        .iter()
        .map(|&(ia, id)| {
            let (a, d) = (ia as f64 / 1000.0, id as f64 / 1000.0);
            vec![(a - d).max(0.0), (a + d).min(1.0)]
        })
        .collect();
    let maxima = evaluate_many(problem, &systems)?;
    let mut mismatches = 0usize;
    let mut zero_cells = 0usize;
    let mut positive = 0usize;
    for (&(_, id), m) in cells.iter().zip(&maxima) {
        let top = m.upper().to_f64();
        if top > 1e-12 {
            positive += 1;
        }
        let zero = top.abs() <= 1e-9;
        zero_cells += zero as usize;
        if zero != (id == 0 || id == 100) {
            mismatches += 1;
        }
    }
    c.value("lattice cells where max m_j = 0 off {delta = 0, 1/10}, or missing on it", mismatches as f64, 0.0);
    c.value("lattice cells with max m_j > 0", positive as f64, 0.0);
    c.note(format!("{} lattice cells scanned, {zero_cells} with max m_j = 0", cells.len()));

    let mut spread = 0.0f64;
    let steps = 50;
    let (lo, hi) = (d0 + 0.1, 1.0 - d0 - 0.1);
    for k in 0..=steps {
        let a = lo + (hi - lo) * k as f64 / steps as f64;
        let m = interval_maxima(problem, &NodeSystem::new(vec![a - d0, a + d0])?)?;
        let v: Vec<f64> = m.m.iter().map(|x| x.to_f64()).collect();
        let (mn, mx) = v.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        spread = spread.max(mx - mn);
    }
    c.deviation("equioscillation along the delta_0 family (max spread of m_j)", spread);

    let pairs: Vec<(NodeSystem, NodeSystem)> = (0..20)
        .map(|k| {
            let d = 0.1 + 0.01 * k as f64;
            Ok((NodeSystem::new(vec![0.5 - d, 0.5 + d])?, NodeSystem::new(vec![0.5 - d - 0.005, 0.5 + d + 0.005])?))
        })
        .collect::<Result<_>>()?;
    let found = find_strict_majorization(problem, &pairs)?;
    c.flag("strict majorization found for delta in [0.1, 0.3]", !found.is_empty());
    Ok(())
}

fn run_chebyshev(problem: &Problem, n: usize, c: &mut Checks) -> Result<()> {
    let report = solve_equioscillation(problem, 1e-12)?;
    for (j, (got, want)) in report.nodes.as_slice().iter().zip(chebyshev_nodes(n)).enumerate() {
        c.value(format!("node {}", j + 1), *got, want);
    }
    c.value("value", report.value, chebyshev_value(n));
    c.flag("argmax points interlace the nodes", report.interlaces());
    Ok(())
}

fn run_quartics(problem: &Problem, c: &mut Checks) -> Result<()> {
    let x = NodeSystem::new(QUARTIC_NODES[0].to_vec())?;
    let y = NodeSystem::new(QUARTIC_NODES[1].to_vec())?;
    let verdict = check_intertwining(problem, &x, &y)?;
    c.flag("two-sided witness between the quartics", matches!(verdict, IntertwiningVerdict::Witness { .. }));
    if let IntertwiningVerdict::Witness { i, j } = verdict {
        c.note(format!("m_{i}(x) < m_{i}(y) and m_{j}(x) > m_{j}(y)"));
    }
    for (name, nodes) in [("x", &x), ("y", &y)] {
        let m = interval_maxima(problem, nodes)?;
        let mut worst = 0.0f64;
        for j in 0..=4 {
            let (lo, hi) = nodes.interval(j);
            let samples = 100_000;
            let dense = (0..=samples)
                .map(|k| lo + (hi - lo) * k as f64 / samples as f64)
                .map(|t| nodes.as_slice().iter().map(|xi| (t - xi).abs()).product::<f64>())
                .fold(0.0f64, f64::max);
            worst = worst.max((m.m[j].to_f64() - dense.ln()).abs());
        }
        c.deviation(format!("maxima of |q_{name}| vs dense sampling"), worst);
    }
    Ok(())
}
