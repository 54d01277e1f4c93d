//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::f64::consts::{E, PI};
use std::time::{Duration, Instant};

use equiosc::applications::{compare_constants, IntervalUnion, WeightSpec};
use equiosc::catalog::{example_problem, run_example, tent_delta0, ExampleId, ExampleReport};
use equiosc::oracle::{grid_minimax, GridSpec};
use equiosc::perturbation::{
    check_interval_perturbation, check_partition_perturbation, find_strict_majorization, IntervalClass,
    IntertwiningVerdict, PartitionSpec,
};
use equiosc::{
    check_intertwining, in_regularity_set, interval_maxima, sandwich_check, solve_difference_with,
    solve_equioscillation, ExtReal, FieldSpec, KernelSpec, NodeSystem, Problem, SolverConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_concave_field, random_sm_problem, random_spread_nodes};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn run(number: usize, title: &str, limit: Duration, body: impl FnOnce() -> Result<Outcome, equiosc::Error>) -> bool {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let (pass, detail) = match result {
        Ok(o) => (o.pass && elapsed <= limit, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let timing = if elapsed <= limit { String::new() } else { format!(" [over the {:.0?} limit]", limit) };
    println!(
        "criterion {number:>2} {:<4} {title}: {detail} ({:.2?}){timing}",
        if pass { "PASS" } else { "FAIL" },
        elapsed
    );
    pass
}

fn check_named(report: &ExampleReport, labels: &[&str], tol: f64) -> (bool, f64) {
    let mut worst = 0.0f64;
    let mut found = 0;
    for c in &report.checks {
        if labels.iter().any(|l| c.label.starts_with(l)) {
            found += 1;
            worst = worst.max(c.deviation);
        }
    }
    (found > 0 && worst <= tol, worst)
}

fn chebyshev() -> Result<Outcome, equiosc::Error> {
    let mut worst_node = 0.0f64;
    let mut worst_value = 0.0f64;
    let mut slowest = Duration::ZERO;
    for n in 1..=5 {
        let problem = Problem::uniform(n, KernelSpec::Log, FieldSpec::zero())?;
        let start = Instant::now();
        let report = solve_equioscillation(&problem, 1e-12)?;
        slowest = slowest.max(start.elapsed());
        for (j, got) in report.nodes.as_slice().iter().enumerate() {
            let k = (n - j) as f64;
            let want = 0.5 * (1.0 + ((2.0 * k - 1.0) * PI / (2.0 * n as f64)).cos());
            worst_node = worst_node.max((got - want).abs());
        }
        let value = (2.0 * 4f64.powi(-(n as i32))).ln();
        worst_value = worst_value.max((report.value - value).abs());
    }
    Ok(outcome(
        worst_node <= 1e-8 && worst_value <= 1e-8 && slowest < Duration::from_secs(1),
        format!("node error {worst_node:.2e}, value error {worst_value:.2e}, slowest solve {slowest:.2?}"),
    ))
}

fn strictness() -> Result<Outcome, equiosc::Error> {
    let problem = example_problem(ExampleId::Strictness)?;
    let report = solve_equioscillation(&problem, 1e-10)?;
    let x = report.nodes.as_slice()[0];
    let node_err = (x - (1.0 - 0.25 / E)).abs();
    let mut worst_lower = 0.0f64;
    for k in 0..=658 {
        let x = 0.25 + k as f64 * 1e-3;
        let m = interval_maxima(&problem, &NodeSystem::new(vec![x])?)?;
        worst_lower = worst_lower.max(match m.lower() {
            ExtReal::Finite(v) => v.abs(),
            ExtReal::NegInf => f64::INFINITY,
        });
    }
    Ok(outcome(
        node_err <= 1e-6 && worst_lower <= 1e-6 && report.value.abs() <= 1e-6,
        format!("x = {x:.9}, error {node_err:.2e}; max |min_j m_j| on [0.25, 0.908] = {worst_lower:.2e}"),
    ))
}

fn tent() -> Result<Outcome, equiosc::Error> {
    let d0 = tent_delta0();
    let branch = (2.0 * (10.0 * d0).ln() - (1.0 - 20.0 * d0 / 9.0).ln()).abs();
    let problem = example_problem(ExampleId::NonMonotone)?;
    let m = interval_maxima(&problem, &NodeSystem::new(vec![0.5 - d0, 0.5 + d0])?)?;
    let computed = (m.m[1].to_f64() - m.m[2].to_f64()).abs();
    let report = run_example(ExampleId::NonMonotone)?;
    let (scan_ok, _) = check_named(&report, &["lattice cells"], 0.0);
    Ok(outcome(
        branch <= 1e-9 && computed <= 1e-9 && scan_ok,
        format!(
            "branch gap {branch:.2e}, computed m_1 - m_2 at delta_0 {computed:.2e}, zero set of max m_j on the 1e-3 lattice {}",
            if scan_ok { "is exactly delta in {0, 1/10}" } else { "differs from delta in {0, 1/10}" }
        ),
    ))
}

fn monotonicity() -> Result<Outcome, equiosc::Error> {
    let report = run_example(ExampleId::Monotonicity)?;
    let (ok, worst) = check_named(&report, &["grid minimax node", "grid minimax value"], 1e-6);
    Ok(outcome(ok, format!("minimax at x = 0 with value 11/8, deviation {worst:.2e}")))
}

fn singularity() -> Result<Outcome, equiosc::Error> {
    let report = run_example(ExampleId::Singularity)?;
    let (nodes_ok, node_dev) = check_named(&report, &["grid minimax node", "grid maximin node"], 1e-3);
    let (value_ok, value_dev) = check_named(&report, &["grid minimax value", "grid maximin value"], 1e-6);
    let (formula_ok, formula_dev) = check_named(&report, &["interval maxima vs closed forms"], 1e-9);
    Ok(outcome(
        nodes_ok && value_ok && formula_ok,
        format!(
            "optimum (0, 0) off by {node_dev:.2e}, value 12 off by {value_dev:.2e}, closed forms off by {formula_dev:.2e}"
        ),
    ))
}

fn round_trip() -> Result<Outcome, equiosc::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_residual = 0.0f64;
    let mut worst_spread = 0.0f64;
    let mut solves = 0;
    for n in 1..=3 {
        for _ in 0..100 {
            let problem = random_sm_problem(n, &mut rng);
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let mut first: Option<NodeSystem> = None;
            for _ in 0..10 {
                let init = loop {
                    let y = random_spread_nodes(n, 1e-3, &mut rng);
                    if in_regularity_set(&problem, &y)? {
                        break y;
                    }
                };
                let config = SolverConfig { tol: 1e-10, initial: Some(init), ..SolverConfig::default() };
                let report = solve_difference_with(&problem, &c, &config)?;
                solves += 1;
                let phi = report.phi();
                for (p, t) in phi.iter().zip(&c) {
                    worst_residual = worst_residual.max((p - t).abs());
                }
                match &first {
                    None => first = Some(report.nodes.clone()),
                    Some(f) => worst_spread = worst_spread.max(f.distance(&report.nodes)),
                }
            }
        }
    }
    Ok(outcome(
        worst_residual <= 1e-6 && worst_spread <= 1e-7,
        format!("{solves} solves, max |phi - c| = {worst_residual:.2e}, max spread across starts = {worst_spread:.2e}"),
    ))
}

fn sandwich() -> Result<Outcome, equiosc::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = 0;
    let mut checked = 0;
    for p in 0..10 {
        let problem = random_sm_problem(1 + p % 4, &mut rng);
        let value = solve_equioscillation(&problem, 1e-11)?.value;
        for _ in 0..50 {
            let x = NodeSystem::random(problem.n(), &mut rng);
            let s = sandwich_check(&problem, &x, value)?;
            checked += 1;
            violations += usize::from(!(s.lower_ok && s.upper_ok));
        }
    }
    Ok(outcome(violations == 0, format!("{checked} node systems, {violations} violations")))
}

fn intertwining() -> Result<Outcome, equiosc::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut majorized = 0;
    let mut missing_witness = 0;
    let mut pairs = 0;
    for p in 0..10 {
        let problem = random_sm_problem(1 + p % 4, &mut rng);
        let n = problem.n();
        while pairs < 50 * (p + 1) {
            let x = NodeSystem::random(n, &mut rng);
            let y = NodeSystem::random(n, &mut rng);
            if !(in_regularity_set(&problem, &x)? && in_regularity_set(&problem, &y)?) {
                continue;
            }
            pairs += 1;
            let verdict = check_intertwining(&problem, &x, &y)?;
            if matches!(verdict, IntertwiningVerdict::MajorizationViolation(_)) {
                majorized += 1;
            }
            let mx = interval_maxima(&problem, &x)?;
            let my = interval_maxima(&problem, &y)?;
            let differ = mx.m.iter().zip(&my.m).any(|(a, b)| (a.to_f64() - b.to_f64()).abs() > 1e-7);
            if differ && !matches!(verdict, IntertwiningVerdict::Witness { .. }) {
                missing_witness += 1;
            }
        }
    }
    let tent = example_problem(ExampleId::NonMonotone)?;
    let scan: Vec<(NodeSystem, NodeSystem)> = (0..20)
        .map(|k| {
            let d = 0.1 + 0.01 * k as f64;
            Ok((NodeSystem::new(vec![0.5 - d, 0.5 + d])?, NodeSystem::new(vec![0.5 - d - 0.005, 0.5 + d + 0.005])?))
        })
        .collect::<Result<_, equiosc::Error>>()?;
    let control = find_strict_majorization(&tent, &scan)?.len();
    Ok(outcome(
        majorized == 0 && missing_witness == 0 && control > 0,
        format!(
            "{pairs} pairs, {majorized} majorizations, {missing_witness} missing witnesses; tent control found {control} strict majorizations"
        ),
    ))
}

fn perturbation() -> Result<Outcome, equiosc::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = 0;
    let mut instances = [0usize; 5];
    for case in ['a', 'b', 'c', 'd', 'e'] {
        let idx = (case as u8 - b'a') as usize;
        while instances[idx] < 200 {
            let kernel = if rng.gen_bool(0.5) { KernelSpec::Log } else { KernelSpec::SqrtShift };
            let mut pts: Vec<f64> = (0..4).map(|_| rng.gen_range(0.02..0.98)).collect();
            pts.sort_by(f64::total_cmp);
            if pts.windows(2).any(|w| w[1] - w[0] < 0.01) {
                continue;
            }
            let (alpha, a, b, beta) = (pts[0], pts[1], pts[2], pts[3]);
            let p = rng.gen_range(0.5..2.0);
            let ratio = p * (a - alpha) / (beta - b);
            let q = match case {
                'a' => ratio / rng.gen_range(1.0..3.0),
                'b' => ratio * rng.gen_range(1.0..3.0),
                'c' => ratio,
                _ => rng.gen_range(0.5..2.0),
            };
            let report = check_interval_perturbation(&kernel, alpha, a, b, beta, p, q, 1000)?;
            let c = report.case(case);
            if !c.applicable {
                continue;
            }
            instances[idx] += 1;
            violations += c.violations;
        }
    }

    let mut partition_failures = 0;
    let mut worst_margin = f64::INFINITY;
    let mut moves = 0;
    while moves < 200 {
        let n = rng.gen_range(1..=4);
        let problem = Problem::new(common::random_exponents(n, &mut rng), KernelSpec::Log, random_concave_field(&mut rng))?;
        let w = random_spread_nodes(n, 0.02, &mut rng);
        if !in_regularity_set(&problem, &w)? {
            continue;
        }
        let classes: Vec<IntervalClass> =
            (0..=n).map(|_| if rng.gen_bool(0.5) { IntervalClass::Shrink } else { IntervalClass::Grow }).collect();
        let Ok(partition) = PartitionSpec::new(classes) else { continue };
        let h = rng.gen_range(1e-4..5e-3);
        let check = check_partition_perturbation(&problem, &w, &partition, h)?;
        moves += 1;
        if !(check.inclusions_ok && check.signs_ok) {
            partition_failures += 1;
        }
        match check.min_margin {
            Some(m) => worst_margin = worst_margin.min(m),
            None => partition_failures += 1,
        }
    }
    Ok(outcome(
        violations == 0 && partition_failures == 0 && worst_margin > 0.0,
        format!(
            "widening cases a-e: {instances:?} instances, {violations} violations; {moves} partition moves, {partition_failures} failures, smallest strict margin {worst_margin:.2e}"
        ),
    ))
}

fn union_bound() -> Result<Outcome, equiosc::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut failures = 0;
    let mut worst_ratio = 0.0f64;
    for _ in 0..50 {
        let k = rng.gen_range(2..=3);
        let n = rng.gen_range(1..=3);
        let ends = loop {
            let mut v: Vec<f64> = (0..2 * k).map(|_| rng.gen_range(0.0..1.0)).collect();
            v.sort_by(f64::total_cmp);
            if v.windows(2).all(|w| w[1] - w[0] >= 0.02) {
                break v;
            }
        };
        let e = IntervalUnion::new(ends.chunks(2).map(|c| (c[0], c[1])).collect())?;
        let (lo, hi) = e.hull();
        let weight = WeightSpec::unit(lo, hi)?;
        let cmp = compare_constants(&e, &vec![1.0; n], &weight, 1e-10)?;
        let (c, r) = (cmp.unrestricted.value, cmp.restricted.value);
        let bound = 2f64.powi(k - 1) * c;
        let ok = c <= r + 1e-9 && r <= bound + 1e-9 && cmp.snapped_norm <= bound + 1e-9;
        failures += usize::from(!ok);
        worst_ratio = worst_ratio.max(r / c);
    }
    let seed = IntervalUnion::new(vec![(0.0, 0.4), (0.6, 1.0)])?;
    let cmp = compare_constants(&seed, &[1.0], &WeightSpec::unit(0.0, 1.0)?, 1e-10)?;
    let seed_err = (cmp.unrestricted.value - 0.5).abs().max((cmp.restricted.value - 0.6).abs());
    Ok(outcome(
        failures == 0 && seed_err <= 1e-6,
        format!(
            "50 instances, {failures} failures, largest R/C {worst_ratio:.4}; seed C = {:.9}, R = {:.9}",
            cmp.unrestricted.value, cmp.restricted.value
        ),
    ))
}

fn oracle_agreement() -> Result<Outcome, equiosc::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_ratio = 0.0f64;
    for i in 0..10 {
        let problem = random_sm_problem(1 + i % 2, &mut rng);
        let solved = solve_equioscillation(&problem, 1e-11)?.value;
        let grid = grid_minimax(&problem, GridSpec::new(101, 3))?;
        let gap = (grid.value.to_f64() - solved).abs();
        worst_ratio = worst_ratio.max(gap / grid.pitch);
    }
    Ok(outcome(worst_ratio <= 10.0, format!("largest |grid - solver| / pitch = {worst_ratio:.3}")))
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        run(1, "classical Chebyshev nodes and values", s(5), chebyshev),
        run(2, "capped-log equioscillation point and flat maximin", s(1), strictness),
        run(3, "tent kernel branch equality and zero set", s(30), tent),
        run(4, "monotonicity example minimax", s(10), monotonicity),
        run(5, "singularity example optimum and closed forms", s(30), singularity),
        run(6, "difference map round trip and uniqueness", s(60), round_trip),
        run(7, "sandwich property", s(60), sandwich),
        run(8, "intertwining and tent control", s(60), intertwining),
        run(9, "widening and partition perturbations", s(120), perturbation),
        run(10, "union-of-intervals constants", s(300), union_bound),
        run(11, "grid oracle versus solver", s(120), oracle_agreement),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
