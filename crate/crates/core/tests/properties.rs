mod common;

use equiosc::applications::{gap_eval, snap_to_e, solve_bojanov, verify_signed_equioscillation, GapProblem, IntervalUnion, WeightSpec};
use equiosc::perturbation::{check_interval_perturbation, perturb_partition, IntervalClass, PartitionSpec};
use equiosc::translates::{maximize_on_interval, MaxStrategy};
use equiosc::{
    check_intertwining, eval_weighted, in_regularity_set, interval_maxima, sandwich_check, solve_difference,
    solve_equioscillation, ExtReal, IntertwiningVerdict, KernelSpec, NodeSystem, Problem,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_concave_field, random_sm_problem, random_spread_nodes};

fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn concave_pieces_have_no_interior_dips(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = seeded(seed);
        let problem = random_sm_problem(n, &mut rng);
        let y = random_spread_nodes(n, 0.01, &mut rng);
        for j in 0..=n {
            let (lo, hi) = y.interval(j);
            let f = |t: f64| eval_weighted(&problem, &y, t).unwrap().to_f64();
            for k in 1..20 {
                let t0 = lo + (hi - lo) * (k as f64 - 0.5) / 20.0;
                let t1 = lo + (hi - lo) * (k as f64) / 20.0;
                let t2 = lo + (hi - lo) * (k as f64 + 0.5) / 20.0;
                prop_assert!(f(t1) >= 0.5 * (f(t0) + f(t2)) - 1e-9);
            }
        }
    }

    #[test]
    fn golden_search_beats_dense_sampling(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = seeded(seed);
        let problem = random_sm_problem(n, &mut rng);
        let y = random_spread_nodes(n, 0.01, &mut rng);
        for j in 0..=n {
            let (_, auto) = maximize_on_interval(&problem, &y, j, MaxStrategy::Auto).unwrap();
            let (_, grid) = maximize_on_interval(&problem, &y, j, MaxStrategy::Grid { points: 20_001 }).unwrap();
            prop_assert!(auto.to_f64() >= grid.to_f64() - 1e-10);
            prop_assert!(auto.to_f64() - grid.to_f64() <= 1e-3);
        }
    }

    #[test]
    fn difference_map_round_trip(seed in any::<u64>(), n in 1usize..4, c in prop::collection::vec(-3.0f64..3.0, 3)) {
        let mut rng = seeded(seed);
        let problem = random_sm_problem(n, &mut rng);
        let target = &c[..n];
        let report = solve_difference(&problem, target, 1e-10).unwrap();
        for (p, t) in report.phi().iter().zip(target) {
            prop_assert!((p - t).abs() <= 1e-8);
        }
        prop_assert!(in_regularity_set(&problem, &report.nodes).unwrap());
    }

    #[test]
    fn sandwich_holds_everywhere(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = seeded(seed);
        let problem = random_sm_problem(n, &mut rng);
        let report = solve_equioscillation(&problem, 1e-11).unwrap();
        let m = &report.maxima.m;
        prop_assert!(m.iter().all(|v| (v.to_f64() - report.value).abs() <= 1e-8));
        for _ in 0..10 {
            let x = NodeSystem::random(n, &mut rng);
            let s = sandwich_check(&problem, &x, report.value).unwrap();
            prop_assert!(s.lower_ok && s.upper_ok);
        }
    }

    #[test]
    fn regular_pairs_intertwine(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = seeded(seed);
        let problem = random_sm_problem(n, &mut rng);
        let x = random_spread_nodes(n, 1e-3, &mut rng);
        let y = random_spread_nodes(n, 1e-3, &mut rng);
        prop_assume!(in_regularity_set(&problem, &x).unwrap() && in_regularity_set(&problem, &y).unwrap());
        let verdict = check_intertwining(&problem, &x, &y).unwrap();
        prop_assert!(!matches!(verdict, IntertwiningVerdict::MajorizationViolation(_)), "{verdict:?}");
    }

    #[test]
    fn widening_lemma_has_no_violations(
        pts in prop::collection::vec(0.02f64..0.98, 4),
        p in 0.3f64..3.0,
        q in 0.3f64..3.0,
        sqrt_kernel in any::<bool>(),
    ) {
        let mut pts = pts;
        pts.sort_by(f64::total_cmp);
        prop_assume!(pts.windows(2).all(|w| w[1] - w[0] > 1e-3));
        let kernel = if sqrt_kernel { KernelSpec::SqrtShift } else { KernelSpec::Log };
        let report = check_interval_perturbation(&kernel, pts[0], pts[1], pts[2], pts[3], p, q, 400).unwrap();
        for c in &report.cases {
            if c.applicable {
                prop_assert_eq!(c.violations, 0, "case {}", c.case);
            }
        }
    }

    #[test]
    fn partition_moves_respect_classes(seed in any::<u64>(), n in 1usize..5, mask in 1u32..31, h in 1e-4f64..4e-3) {
        let mut rng = seeded(seed);
        let problem = Problem::new(common::random_exponents(n, &mut rng), KernelSpec::Log, random_concave_field(&mut rng)).unwrap();
        let classes: Vec<IntervalClass> = (0..=n)
            .map(|j| if mask >> j & 1 == 1 { IntervalClass::Shrink } else { IntervalClass::Grow })
            .collect();
        let partition = PartitionSpec::new(classes.clone());
        prop_assume!(partition.is_ok());
        let partition = partition.unwrap();
        let w = random_spread_nodes(n, 0.02, &mut rng);
        let moved = perturb_partition(&problem, &w, &partition, h).unwrap();
        let before = interval_maxima(&problem, &w).unwrap();
        let after = interval_maxima(&problem, &moved).unwrap();
        for (j, class) in classes.iter().enumerate() {
            let (lo, hi) = w.interval(j);
            let (lo2, hi2) = moved.interval(j);
            let (old, new) = (before.m[j].to_f64(), after.m[j].to_f64());
            match class {
                IntervalClass::Shrink => prop_assert!(lo <= lo2 && hi2 <= hi && new <= old + 1e-12),
                IntervalClass::Grow => prop_assert!(lo2 <= lo && hi <= hi2 && new >= old - 1e-12),
            }
        }
    }

    #[test]
    fn snapping_stays_within_the_union_bound(ends in prop::collection::vec(0.0f64..1.0, 4), n in 1usize..4) {
        let mut ends = ends;
        ends.sort_by(f64::total_cmp);
        prop_assume!(ends.windows(2).all(|w| w[1] - w[0] > 0.02));
        let e = IntervalUnion::new(vec![(ends[0], ends[1]), (ends[2], ends[3])]).unwrap();
        let weight = WeightSpec::unit(ends[0], ends[3]).unwrap();
        let gap = GapProblem::new(vec![1.0; n], weight.clone()).unwrap();
        let sol = solve_bojanov(&gap, 1e-11).unwrap();
        let snapped = snap_to_e(&sol.nodes, &e);
        prop_assert!(snapped.iter().all(|t| e.contains(*t)));
        let mut sup = 0.0f64;
        for &(a, b) in e.components() {
            for k in 0..=2000 {
                let t = if k == 2000 { b } else { a + (b - a) * k as f64 / 2000.0 };
                sup = sup.max(gap_eval(&snapped, &vec![1.0; n], &weight, t).unwrap());
            }
        }
        prop_assert!(sup <= 2.0 * sol.norm + 1e-9);
    }

    #[test]
    fn extremal_gap_alternates_in_sign(a in -2.0f64..0.0, len in 0.5f64..3.0, n in 1usize..6) {
        let weight = WeightSpec::unit(a, a + len).unwrap();
        let gap = GapProblem::new(vec![1.0; n], weight.clone()).unwrap();
        let sol = solve_bojanov(&gap, 1e-11).unwrap();
        prop_assert!(sol.interlaces);
        prop_assert!(verify_signed_equioscillation(&sol.nodes, &vec![1.0; n], &sol.extremal_points, &weight).unwrap());
        let expected = 2.0 * (len / 4.0).powi(n as i32);
        prop_assert!((sol.norm - expected).abs() <= 1e-8 * expected.max(1e-12));
    }

    #[test]
    fn problems_survive_json(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = seeded(seed);
        let problem = random_sm_problem(n, &mut rng);
        let back = Problem::from_json(&problem.to_json()).unwrap();
        prop_assert_eq!(&back, &problem);
        let y = NodeSystem::random(n, &mut rng);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let (u, v) = (eval_weighted(&problem, &y, t).unwrap(), eval_weighted(&back, &y, t).unwrap());
            prop_assert!(u == v || (matches!(u, ExtReal::NegInf) && matches!(v, ExtReal::NegInf)));
        }
    }
}
