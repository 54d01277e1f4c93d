//! Command-line front end for the equioscillation library.

mod export;
mod format;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use equiosc::applications::{compare_constants, solve_bojanov, GapProblem, IntervalUnion, WeightSpec};
use equiosc::catalog::{example_problem, run_example, ExampleId, ExampleReport};
use equiosc::oracle::{grid_maximin, grid_minimax, GridSpec, OracleResult};
use equiosc::perturbation::{check_intertwining, check_strict_majorization_excluded, IntertwiningVerdict};
use equiosc::solver::{solve_difference_with, SolveReport, SolverConfig};
use equiosc::{Error, NodeSystem, Problem};
use serde_json::{json, Value};

use crate::format::{ext, exts, fmt9, fmt_ext, fmt_ext_vec, fmt_vec, num, nums};

#[derive(Parser)]
#[command(name = "equiosc", version, about = "Equioscillating node systems for weighted sums of translates")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Residual tolerance of the solver.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Oracle grid as POINTS or POINTS:ROUNDS.
    #[arg(long, global = true, default_value = "101:3")]
    grid: String,
    /// Also write the report as JSON to this file.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Worker threads for grid searches (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the equioscillation point.
    Solve {
        /// Problem JSON file, or `example:<id>`.
        problem: String,
        /// Starting nodes, comma separated.
        #[arg(long)]
        init: Option<String>,
    },
    /// Solve for prescribed differences of consecutive interval maxima.
    SolveDiff {
        problem: String,
        /// Target differences, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long)]
        init: Option<String>,
    },
    /// Brute-force grid minimax and maximin.
    Oracle { problem: String },
    /// Compare the interval maxima of two node systems.
    Intertwine {
        problem: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Sample random pairs and look for strict majorization.
    Majorization {
        problem: String,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Extremal weighted generalized polynomial on an interval.
    Bojanov {
        /// Interval as `a,b`.
        #[arg(long, allow_hyphen_values = true)]
        interval: String,
        /// Exponents, comma separated.
        #[arg(long)]
        exponents: String,
        /// Weight JSON file; defaults to the unit weight.
        #[arg(long)]
        weight: Option<PathBuf>,
    },
    /// Unrestricted versus restricted Chebyshev constants on a union of intervals.
    UnionCompare {
        /// Components as `a1,b1;a2,b2;...`.
        #[arg(long, allow_hyphen_values = true)]
        components: String,
        #[arg(long)]
        exponents: String,
        #[arg(long)]
        weight: Option<PathBuf>,
    },
    /// Run a built-in example against its closed forms (`all` runs every example).
    Example { id: String },
    /// Write `F(y, .)` as CSV plus a JSON sidecar.
    Export {
        problem: String,
        #[arg(long)]
        nodes: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Lib(Error),
    ExampleDeviation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Convergence { .. } => 3,
        Error::Budget(_) => 4,
        _ => 2,
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Validation(format!("not a number: {p:?}"))))
        .collect()
}

fn parse_grid(s: &str) -> Result<GridSpec, Error> {
    let bad = || Error::Validation(format!("grid must be POINTS or POINTS:ROUNDS, got {s:?}"));
    let mut parts = s.split(':');
    let points = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
    let rounds = match parts.next() {
        Some(r) => r.parse().map_err(|_| bad())?,
        None => 0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(GridSpec::new(points, rounds))
}

fn load_problem(source: &str) -> Result<Problem, Error> {
    if let Some(id) = source.strip_prefix("example:") {
        return example_problem(id.parse()?);
    }
    Problem::from_json(&std::fs::read_to_string(source)?)
}

fn load_weight(path: Option<&Path>, a: f64, b: f64) -> Result<WeightSpec, Error> {
    match path {
        Some(p) => Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?),
        None => WeightSpec::unit(a, b),
    }
}

fn nodes_arg(s: &str) -> Result<NodeSystem, Error> {
    NodeSystem::new(parse_list(s)?)
}

fn solve_json(r: &SolveReport) -> Value {
    let mut v = json!({
        "nodes": nums(r.nodes.as_slice()),
        "m": exts(&r.maxima.m),
        "phi": nums(&r.phi()),
        "value": num(r.value),
        "residual": num(r.residual),
        "iterations": r.iterations,
        "converged": r.converged,
    });
    if let Some(reg) = &r.regularization {
        v["regularization"] = json!({
            "etas": reg.etas,
            "extrapolated": nums(&reg.extrapolated),
            "trend": num(reg.trend),
            "polished": reg.polished,
            "non_uniqueness_risk": reg.non_uniqueness_risk,
        });
    }
    v
}

fn print_solve(r: &SolveReport) {
    println!("nodes      {}", fmt_vec(r.nodes.as_slice()));
    println!("m          {}", fmt_ext_vec(&r.maxima.m));
    println!("phi        {}", fmt_vec(&r.phi()));
    println!("value      {}", fmt9(r.value));
    println!("residual   {}", fmt9(r.residual));
    println!("iterations {}", r.iterations);
    println!("converged  {}", r.converged);
    if let Some(reg) = &r.regularization {
        println!(
            "regularized: trend {} polished {} (kernel is not strictly monotone; solutions may not be unique)",
            fmt9(reg.trend),
            reg.polished
        );
    }
}

fn oracle_json(r: &OracleResult) -> Value {
    json!({
        "nodes": nums(r.nodes.as_slice()),
        "value": ext(r.value),
        "m": exts(&r.maxima.m),
        "pitch": num(r.pitch),
        "evaluations": r.evaluations,
        "near_optimal_cells": r.near_optimal.len(),
    })
}

fn print_example(r: &ExampleReport) {
    println!("example {}", r.id);
    for c in &r.checks {
        let mark = if c.deviation <= equiosc::catalog::EXAMPLE_TOL { "ok " } else { "BAD" };
        println!(
            "  {mark} {:<64} computed {:>16} expected {:>16} dev {}",
            c.label,
            fmt9(c.computed),
            fmt9(c.expected),
            fmt9(c.deviation)
        );
    }
    for n in &r.notes {
        println!("  note: {n}");
    }
    println!("  max deviation {} -> {}", fmt9(r.max_deviation), if r.passed() { "PASS" } else { "FAIL" });
}

fn solver_config(common: &Common, init: Option<&str>) -> Result<SolverConfig, Error> {
    Ok(SolverConfig {
        tol: common.tol,
        initial: init.map(nodes_arg).transpose()?,
        ..SolverConfig::default()
    })
}

fn run(cli: Cli) -> Result<Value, Failure> {
    let common = &cli.common;
    if let Some(t) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    }
    let out = match &cli.command {
        Command::Solve { problem, init } => {
            let p = load_problem(problem)?;
            let c = vec![0.0; p.n()];
            let r = solve_difference_with(&p, &c, &solver_config(common, init.as_deref())?)?;
            print_solve(&r);
            solve_json(&r)
        }
        Command::SolveDiff { problem, target, init } => {
            let p = load_problem(problem)?;
            let r = solve_difference_with(&p, &parse_list(target)?, &solver_config(common, init.as_deref())?)?;
            print_solve(&r);
            solve_json(&r)
        }
        Command::Oracle { problem } => {
            let p = load_problem(problem)?;
            let grid = parse_grid(&common.grid)?;
            let minimax = grid_minimax(&p, grid)?;
            let maximin = grid_maximin(&p, grid)?;
            println!("minimax {} at {} (pitch {})", fmt_ext(minimax.value), fmt_vec(minimax.nodes.as_slice()), fmt9(minimax.pitch));
            println!("maximin {} at {} (pitch {})", fmt_ext(maximin.value), fmt_vec(maximin.nodes.as_slice()), fmt9(maximin.pitch));
            println!("near-optimal maximin cells on the first grid: {}", maximin.near_optimal.len());
            json!({ "minimax": oracle_json(&minimax), "maximin": oracle_json(&maximin) })
        }
        Command::Intertwine { problem, x, y } => {
            let p = load_problem(problem)?;
            let (x, y) = (nodes_arg(x)?, nodes_arg(y)?);
            let verdict = check_intertwining(&p, &x, &y)?;
            let mx = equiosc::interval_maxima(&p, &x)?;
            let my = equiosc::interval_maxima(&p, &y)?;
            println!("m(x) {}", fmt_ext_vec(&mx.m));
            println!("m(y) {}", fmt_ext_vec(&my.m));
            let text = match verdict {
                IntertwiningVerdict::Equal => "equal".to_string(),
                IntertwiningVerdict::Tied => "tied".to_string(),
                IntertwiningVerdict::Witness { i, j } => format!("witness i={i} j={j}"),
                IntertwiningVerdict::MajorizationViolation(d) => format!("majorization {d:?}"),
            };
            println!("verdict {text}");
            json!({ "verdict": text, "m_x": exts(&mx.m), "m_y": exts(&my.m) })
        }
        Command::Majorization { problem, samples } => {
            let p = load_problem(problem)?;
            let r = check_strict_majorization_excluded(&p, *samples, common.seed)?;
            println!("checked {} pairs: {} strict, {} weak ties", r.checked, r.strict_violations.len(), r.weak_ties);
            json!({ "checked": r.checked, "strict": r.strict_violations.len(), "weak_ties": r.weak_ties })
        }
        Command::Bojanov { interval, exponents, weight } => {
            let ab = parse_list(interval)?;
            if ab.len() != 2 {
                return Err(Error::Validation("interval needs two numbers".into()).into());
            }
            let w = load_weight(weight.as_deref(), ab[0], ab[1])?;
            let gap = GapProblem::new(parse_list(exponents)?, w)?;
            let s = solve_bojanov(&gap, common.tol)?;
            println!("nodes            {}", fmt_vec(&s.nodes));
            println!("extremal points  {}", fmt_vec(&s.extremal_points));
            println!("norm             {}", fmt9(s.norm));
            println!("interlaces       {}", s.interlaces);
            json!({
                "nodes": nums(&s.nodes),
                "extremal_points": nums(&s.extremal_points),
                "norm": num(s.norm),
                "interlaces": s.interlaces,
            })
        }
        Command::UnionCompare { components, exponents, weight } => {
            let comps = components
                .split(';')
                .map(|c| {
                    let v = parse_list(c)?;
                    match v.as_slice() {
                        [a, b] => Ok((*a, *b)),
                        _ => Err(Error::Validation(format!("component {c:?} needs two numbers"))),
                    }
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let e = IntervalUnion::new(comps)?;
            let (a, b) = e.hull();
            let w = load_weight(weight.as_deref(), a, b)?;
            let r = compare_constants(&e, &parse_list(exponents)?, &w, common.tol)?;
            println!("unrestricted C {} at {}", fmt9(r.unrestricted.value), fmt_vec(&r.unrestricted.nodes));
            println!("restricted   R {} at {}", fmt9(r.restricted.value), fmt_vec(&r.restricted.nodes));
            println!("factor C(k,r)  {}", fmt9(r.factor));
            println!("snapped norm   {} at {}", fmt9(r.snapped_norm), fmt_vec(&r.snapped_nodes));
            println!("C <= R {}  R <= C(k,r) C {}  snapped <= C(k,r) C {}", r.lower_ok, r.upper_ok, r.snap_ok);
            json!({
                "C": num(r.unrestricted.value),
                "R": num(r.restricted.value),
                "factor": num(r.factor),
                "snapped_norm": num(r.snapped_norm),
                "lower_ok": r.lower_ok,
                "upper_ok": r.upper_ok,
                "snap_ok": r.snap_ok,
            })
        }
        Command::Example { id } => {
            let ids = if id == "all" { ExampleId::all() } else { vec![id.parse::<ExampleId>()?] };
            let mut reports = Vec::new();
            let mut failed = false;
            for id in ids {
                let r = run_example(id)?;
                print_example(&r);
                failed |= !r.passed();
                reports.push(serde_json::to_value(&r).map_err(Error::from)?);
            }
            let v = Value::Array(reports);
            write_json(common, &v)?;
            if failed {
                return Err(Failure::ExampleDeviation);
            }
            return Ok(v);
        }
        Command::Export { problem, nodes, samples, out } => {
            let p = load_problem(problem)?;
            let y = nodes_arg(nodes)?;
            let sidecar = export::export_curve(&p, &y, *samples, out)?;
            println!("wrote {} and {}", out.display(), sidecar.display());
            json!({ "csv": out.display().to_string(), "sidecar": sidecar.display().to_string() })
        }
    };
    write_json(common, &out)?;
    Ok(out)
}

fn write_json(common: &Common, v: &Value) -> Result<(), Error> {
    if let Some(path) = &common.json_out {
        std::fs::write(path, serde_json::to_string_pretty(v)?)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(_) => ExitCode::SUCCESS,
        Err(Failure::ExampleDeviation) => ExitCode::from(1),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
