#![allow(dead_code)]

use equiosc::{FieldFormula, FieldSpec, KernelSpec, NodeSystem, Problem, WeightExpr};
use rand::Rng;

/// A random concave field from the closed-form families.
pub fn random_concave_field<R: Rng>(rng: &mut R) -> FieldSpec {
    let formula = match rng.gen_range(0..5) {
        0 => return FieldSpec::zero(),
        1 => FieldFormula::LogOfWeight {
            weight: WeightExpr::Jacobi {
                scale: rng.gen_range(0.5..2.0),
                left: 0.0,
                alpha: rng.gen_range(0.0..1.5),
                right: 1.0,
                beta: rng.gen_range(0.0..1.5),
            },
        },
        2 => FieldFormula::LogOfWeight {
            weight: WeightExpr::Exponential { scale: rng.gen_range(0.5..2.0), rate: rng.gen_range(-2.0..2.0) },
        },
        3 => FieldFormula::SqrtAffine { c: rng.gen_range(0.0..3.0), s: 1.0, t0: 0.0 },
        _ => FieldFormula::SqrtAffine { c: rng.gen_range(0.0..3.0), s: -1.0, t0: 1.0 },
    };
    FieldSpec::single(formula).expect("valid field")
}

/// A singular, strictly monotone kernel.
pub fn random_sm_kernel<R: Rng>(rng: &mut R) -> KernelSpec {
    if rng.gen_bool(0.7) {
        KernelSpec::Log
    } else {
        KernelSpec::regularized(KernelSpec::capped_log(rng.gen_range(0.1..0.6)).unwrap(), rng.gen_range(0.05..0.5))
            .unwrap()
    }
}

pub fn random_exponents<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.5..2.0)).collect()
}

/// A random problem with a singular, strictly monotone kernel and a concave field.
pub fn random_sm_problem<R: Rng>(n: usize, rng: &mut R) -> Problem {
    let kernel = random_sm_kernel(rng);
    Problem::new(random_exponents(n, rng), kernel, random_concave_field(rng)).expect("admissible problem")
}

/// A random strict node system with gaps of at least `min_gap`.
pub fn random_spread_nodes<R: Rng>(n: usize, min_gap: f64, rng: &mut R) -> NodeSystem {
    loop {
        let y = NodeSystem::random(n, rng);
        let mut prev = 0.0;
        let mut ok = true;
        for &v in y.as_slice().iter().chain(std::iter::once(&1.0)) {
            ok &= v - prev >= min_gap;
            prev = v;
        }
        if ok {
            return y;
        }
    }
}
