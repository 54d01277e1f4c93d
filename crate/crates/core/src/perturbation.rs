//! Numerical checks of the perturbation and intertwining statements.
//!
//! Widening a pair of translates `(a, b) -> (α, β)` lowers the sum outside the
//! pair and raises it inside. Moving the boundary nodes of a partition of the
//! intervals into shrinking and growing classes lowers the maxima of the first
//! class and raises those of the second, which in turn rules out one maxima
//! vector dominating another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::kernel::KernelSpec;
use crate::nodes::NodeSystem;
use crate::problem::Problem;
use crate::translates::{in_regularity_set, interval_maxima, is_regular, MaximaVector};

/// Separates strict from tied comparisons of interval maxima.
pub const STRICT_TOL: f64 = 1e-9;

/// Node systems closer than this are treated as equal.
pub const NODE_EQ_TOL: f64 = 1e-12;

const COMPARE_TOL: f64 = 1e-12;

/// Outcome for one case of the widening check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub case: char,
    /// Whether the hypotheses of this case hold for the given inputs.
    pub applicable: bool,
    pub samples: usize,
    pub violations: usize,
    /// Smallest finite margin by which the claimed inequality held.
    pub worst_margin: Option<f64>,
    /// Every sample satisfied the inequality strictly.
    pub strict: bool,
}

/// Report of [`check_interval_perturbation`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WideningReport {
    pub mu: f64,
    pub cases: Vec<CaseReport>,
}

impl WideningReport {
    pub fn case(&self, c: char) -> &CaseReport {
        self.cases.iter().find(|r| r.case == c).expect("cases a to e are always present")
    }

    pub fn violations(&self) -> usize {
        self.cases.iter().filter(|c| c.applicable).map(|c| c.violations).sum()
    }
}

/// Margin of `small <= large`: `Some(Some(d))` finite, `Some(None)` infinitely
/// satisfied, `None` for a `-∞ = -∞` tie.
fn margin(small: ExtReal, large: ExtReal) -> Option<Option<ExtReal>> {
    match (small, large) {
        (ExtReal::NegInf, ExtReal::NegInf) => None,
        (ExtReal::NegInf, ExtReal::Finite(_)) => Some(None),
        (ExtReal::Finite(s), ExtReal::Finite(l)) => Some(Some(ExtReal::Finite(l - s))),
        (ExtReal::Finite(_), ExtReal::NegInf) => Some(Some(ExtReal::NegInf)),
    }
}

struct Tally {
    samples: usize,
    violations: usize,
    worst: Option<f64>,
    strict: bool,
}

impl Tally {
    fn new() -> Self {
        Tally { samples: 0, violations: 0, worst: None, strict: true }
    }

    fn record(&mut self, small: ExtReal, large: ExtReal, need_strict: bool) {
        self.samples += 1;
        let ok_strict = match margin(small, large) {
            None => false,
            Some(None) => true,
            Some(Some(ExtReal::NegInf)) => {
                self.violations += 1;
                self.strict = false;
                return;
            }
            Some(Some(ExtReal::Finite(d))) => {
                self.worst = Some(self.worst.map_or(d, |w| w.min(d)));
                let scale = COMPARE_TOL * (1.0 + small.to_f64().abs().max(large.to_f64().abs()));
                if d < -scale {
                    self.violations += 1;
                    self.strict = false;
                    return;
                }
                d > 0.0
            }
        };
        if !ok_strict {
            self.strict = false;
            if need_strict {
                self.violations += 1;
            }
        }
    }
}

fn samples_on(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |k| if k + 1 == points { hi } else { lo + (hi - lo) * k as f64 / (points - 1) as f64 })
}

/// Samples the widening inequalities for the pair `(a, b)` replaced by `(α, β)`
/// with weights `p, q`, case by case.
#[allow(clippy::too_many_arguments)]
pub fn check_interval_perturbation(
    kernel: &KernelSpec,
    alpha: f64,
    a: f64,
    b: f64,
    beta: f64,
    p: f64,
    q: f64,
    grid_points: usize,
) -> Result<WideningReport> {
    if !(0.0 < alpha && alpha < a && a < b && b < beta && beta < 1.0) {
        return Err(Error::Precondition(format!("need 0 < α < a < b < β < 1, got {alpha}, {a}, {b}, {beta}")));
    }
    if !(p > 0.0 && q > 0.0) || grid_points < 2 {
        return Err(Error::Precondition("weights must be positive and at least two sample points are needed".into()));
    }
    kernel.validate()?;
    let flags = kernel.classify();
    let mu = p * (a - alpha) / (q * (beta - b));
    let mu_is_one = (mu - 1.0).abs() <= 1e-12;
    let k = |t: f64| kernel.eval_unchecked(t);
    let widened = |t: f64| p * k(t - alpha) + q * k(t - beta);
    let original = |t: f64| p * k(t - a) + q * k(t - b);

    let outer = |regions: &[(f64, f64)], need_strict: bool| {
        let mut tally = Tally::new();
        for &(lo, hi) in regions {
            for t in samples_on(lo, hi, grid_points) {
                tally.record(widened(t), original(t), need_strict);
            }
        }
        tally
    };

    let applicable_a = flags.monotone_m && mu >= 1.0;
    let applicable_b = flags.monotone_m && mu <= 1.0;
    let mut reports = Vec::with_capacity(5);
    let to_report = |case: char, applicable: bool, t: Tally| CaseReport {
        case,
        applicable,
        samples: t.samples,
        violations: t.violations,
        worst_margin: t.worst,
        strict: t.strict,
    };
    reports.push(to_report('a', applicable_a, outer(&[(0.0, alpha)], false)));
    reports.push(to_report('b', applicable_b, outer(&[(beta, 1.0)], false)));
    reports.push(to_report('c', mu_is_one, outer(&[(0.0, alpha), (beta, 1.0)], false)));

    let mut strict_regions = Vec::new();
    if applicable_a || mu_is_one {
        strict_regions.push((0.0, alpha));
    }
    if applicable_b || mu_is_one {
        strict_regions.push((beta, 1.0));
    }
    let applicable_d = flags.strictly_concave && !strict_regions.is_empty();
    reports.push(to_report('d', applicable_d, outer(&strict_regions, true)));

    let mut inside = Tally::new();
    for t in samples_on(a, b, grid_points) {
        inside.record(original(t), widened(t), flags.strictly_monotone_sm);
    }
    reports.push(to_report('e', flags.monotone_m, inside));
    Ok(WideningReport { mu, cases: reports })
}

/// Which way an interval is pushed by [`perturb_partition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IntervalClass {
    /// The interval shrinks and its maximum does not increase.
    Shrink,
    /// The interval grows and its maximum does not decrease.
    Grow,
}

/// A labelling of the intervals `I_0..I_n` using both classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionSpec {
    class_of: Vec<IntervalClass>,
}

impl PartitionSpec {
    pub fn new(class_of: Vec<IntervalClass>) -> Result<Self> {
        let shrink = class_of.contains(&IntervalClass::Shrink);
        let grow = class_of.contains(&IntervalClass::Grow);
        if !(shrink && grow) {
            return Err(Error::Validation("a partition must use both classes".into()));
        }
        Ok(PartitionSpec { class_of })
    }

    /// Builds a partition from the indices of the shrinking intervals.
    pub fn from_shrinking(n: usize, shrinking: &[usize]) -> Result<Self> {
        let mut class_of = vec![IntervalClass::Grow; n + 1];
        for &i in shrinking {
            if i > n {
                return Err(Error::Validation(format!("interval index {i} exceeds n = {n}")));
            }
            class_of[i] = IntervalClass::Shrink;
        }
        Self::new(class_of)
    }

    pub fn classes(&self) -> &[IntervalClass] {
        &self.class_of
    }
}

/// Moves every node that separates intervals of different classes by `h / r_l`,
/// towards the shrinking side's interior: right if the shrinking interval is on
/// its right, left otherwise. Nodes between same-class intervals stay put.
pub fn perturb_partition(problem: &Problem, w: &NodeSystem, partition: &PartitionSpec, h: f64) -> Result<NodeSystem> {
    let n = problem.n();
    if w.len() != n || partition.class_of.len() != n + 1 {
        return Err(Error::Validation("node count and partition size must match the problem".into()));
    }
    if !w.is_strict() {
        return Err(Error::Precondition(format!("{:?} must lie strictly inside the simplex", w.as_slice())));
    }
    if !(h > 0.0) {
        return Err(Error::Precondition(format!("step must be positive, got {h}")));
    }
    let moved: Vec<f64> = (0..n)
        .map(|l| {
            let shift = h / problem.r()[l];
            match (partition.class_of[l], partition.class_of[l + 1]) {
                (IntervalClass::Grow, IntervalClass::Shrink) => w.as_slice()[l] + shift,
                (IntervalClass::Shrink, IntervalClass::Grow) => w.as_slice()[l] - shift,
                _ => w.as_slice()[l],
            }
        })
        .collect();
    let ordered = moved[0] > 0.0 && moved[n - 1] < 1.0 && moved.windows(2).all(|p| p[0] < p[1]);
    if !ordered {
        return Err(Error::Precondition(format!("step {h} breaks the node ordering")));
    }
    NodeSystem::new(moved)
}

/// What a partition move did to intervals and maxima.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionCheck {
    pub moved: NodeSystem,
    /// Shrinking intervals are contained in, growing ones contain, the old ones.
    pub inclusions_ok: bool,
    /// Maxima moved in the promised direction, up to `1e-12`.
    pub signs_ok: bool,
    /// Smallest strict change over intervals with finite maxima; positive means every change was strict.
    pub min_margin: Option<f64>,
}

/// Applies [`perturb_partition`] and checks the interval and maxima contracts.
pub fn check_partition_perturbation(
    problem: &Problem,
    w: &NodeSystem,
    partition: &PartitionSpec,
    h: f64,
) -> Result<PartitionCheck> {
    let moved = perturb_partition(problem, w, partition, h)?;
    let before = interval_maxima(problem, w)?;
    let after = interval_maxima(problem, &moved)?;
    let mut inclusions_ok = true;
    let mut signs_ok = true;
    let mut min_margin: Option<f64> = None;
    for (j, class) in partition.class_of.iter().enumerate() {
        let (lo, hi) = w.interval(j);
        let (lo2, hi2) = moved.interval(j);
        let (old, new) = (before.m[j], after.m[j]);
        let (inside, sign_gap) = match class {
            IntervalClass::Shrink => (lo <= lo2 && hi2 <= hi, margin(new, old)),
            IntervalClass::Grow => (lo2 <= lo && hi <= hi2, margin(old, new)),
        };
        inclusions_ok &= inside;
        match sign_gap {
            Some(Some(ExtReal::Finite(d))) => {
                if d < -1e-12 {
                    signs_ok = false;
                }
                min_margin = Some(min_margin.map_or(d, |m| m.min(d)));
            }
            Some(Some(ExtReal::NegInf)) => signs_ok = false,
            _ => {}
        }
    }
    Ok(PartitionCheck { moved, inclusions_ok, signs_ok, min_margin })
}

/// Which node system's maxima dominate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    XOverY,
    YOverX,
}

/// Outcome of [`check_intertwining`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IntertwiningVerdict {
    /// The node systems coincide.
    Equal,
    /// `m_i(x) < m_i(y)` and `m_j(x) > m_j(y)`, both beyond [`STRICT_TOL`].
    Witness { i: usize, j: usize },
    /// Distinct node systems whose maxima agree to within [`STRICT_TOL`] everywhere.
    Tied,
    /// One maxima vector weakly dominates the other with at least one strict coordinate.
    MajorizationViolation(Direction),
}

fn compare(mx: &MaximaVector, my: &MaximaVector) -> IntertwiningVerdict {
    let below = mx.m.iter().zip(&my.m).position(|(a, b)| *a + STRICT_TOL < *b);
    let above = mx.m.iter().zip(&my.m).position(|(a, b)| *b + STRICT_TOL < *a);
    match (below, above) {
        (Some(i), Some(j)) => IntertwiningVerdict::Witness { i, j },
        (None, None) => IntertwiningVerdict::Tied,
        (Some(_), None) => IntertwiningVerdict::MajorizationViolation(Direction::YOverX),
        (None, Some(_)) => IntertwiningVerdict::MajorizationViolation(Direction::XOverY),
    }
}

/// Looks for two-sided differences between the maxima vectors of `x` and `y`.
pub fn check_intertwining(problem: &Problem, x: &NodeSystem, y: &NodeSystem) -> Result<IntertwiningVerdict> {
    for z in [x, y] {
        if !in_regularity_set(problem, z)? {
            return Err(Error::Regularity(format!("{:?} is not in the regularity set", z.as_slice())));
        }
    }
    if x.distance(y) <= NODE_EQ_TOL {
        return Ok(IntertwiningVerdict::Equal);
    }
    Ok(compare(&interval_maxima(problem, x)?, &interval_maxima(problem, y)?))
}

/// A pair where one maxima vector beats the other in every coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrictMajorization {
    pub pair: usize,
    pub direction: Direction,
    /// Smallest coordinate gap.
    pub gap: f64,
}

fn strict_gap(hi: &MaximaVector, lo: &MaximaVector) -> Option<f64> {
    let mut gap = f64::MAX;
    for (a, b) in hi.m.iter().zip(&lo.m) {
        match (a, b) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => gap = gap.min(a - b),
            (ExtReal::Finite(_), ExtReal::NegInf) => {}
            _ => return None,
        }
    }
    (gap > STRICT_TOL).then_some(gap)
}

/// Reports every pair whose maxima strictly dominate in all coordinates.
/// No kernel hypotheses are required, which makes this usable as a negative control.
pub fn find_strict_majorization(problem: &Problem, pairs: &[(NodeSystem, NodeSystem)]) -> Result<Vec<StrictMajorization>> {
    let mut found = Vec::new();
    for (k, (x, y)) in pairs.iter().enumerate() {
        let mx = interval_maxima(problem, x)?;
        let my = interval_maxima(problem, y)?;
        if let Some(gap) = strict_gap(&mx, &my) {
            found.push(StrictMajorization { pair: k, direction: Direction::XOverY, gap });
        } else if let Some(gap) = strict_gap(&my, &mx) {
            found.push(StrictMajorization { pair: k, direction: Direction::YOverX, gap });
        }
    }
    Ok(found)
}

/// Summary of [`check_strict_majorization_excluded`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorizationReport {
    pub checked: usize,
    pub strict_violations: Vec<StrictMajorization>,
    /// Pairs where one vector dominates weakly, with some coordinates tied.
    pub weak_ties: usize,
}

/// Samples `samples` random pairs in the regularity set and confirms that no
/// maxima vector strictly dominates the other.
pub fn check_strict_majorization_excluded(problem: &Problem, samples: usize, seed: u64) -> Result<MajorizationReport> {
    let flags = problem.kernel().classify();
    if !(flags.singular && flags.monotone_m) {
        return Err(Error::Hypothesis(format!("{} must be singular and monotone", problem.kernel().name())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = problem.n();
    let mut pairs = Vec::with_capacity(samples);
    let mut attempts = 0;
    while pairs.len() < samples {
        attempts += 1;
        if attempts > 1000 * samples.max(1) {
            return Err(Error::Precondition("could not sample regular node systems".into()));
        }
        let x = NodeSystem::random(n, &mut rng);
        let y = NodeSystem::random(n, &mut rng);
        if is_regular(problem, x.as_slice()) && is_regular(problem, y.as_slice()) {
            pairs.push((x, y));
        }
    }
    let mut strict_violations = Vec::new();
    let mut weak_ties = 0;
    for (k, (x, y)) in pairs.iter().enumerate() {
        let mx = interval_maxima(problem, x)?;
        let my = interval_maxima(problem, y)?;
        if let Some(gap) = strict_gap(&mx, &my) {
            strict_violations.push(StrictMajorization { pair: k, direction: Direction::XOverY, gap });
        } else if let Some(gap) = strict_gap(&my, &mx) {
            strict_violations.push(StrictMajorization { pair: k, direction: Direction::YOverX, gap });
        } else if x.distance(y) > NODE_EQ_TOL
            && matches!(compare(&mx, &my), IntertwiningVerdict::MajorizationViolation(_) | IntertwiningVerdict::Tied)
        {
            weak_ties += 1;
        }
    }
    Ok(MajorizationReport { checked: pairs.len(), strict_violations, weak_ties })
}
