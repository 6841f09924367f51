use std::sync::Arc;

use densepack::criticality::{order_parameter, verdict_from, OrderRun, Phase, Protocol, Start};
use densepack::export::{read_snapshot_archive, snapshot_archive};
use densepack::lattice::{catalog, LatticeSpec, OrderSpec};
use densepack::pca::{full_cycle, reachability_check, run, RunOptions};
use densepack::{Configuration, Execution, PeriodicGraph, Pressure};
use proptest::prelude::*;

fn torus(i: usize, a: usize, b: usize) -> Arc<PeriodicGraph> {
    let spec = &catalog()[i];
    let [p1, p2] = spec.class_period;
    Arc::new(PeriodicGraph::new(spec, [a * p1, b * p2]).unwrap())
}

fn pressure(g: &PeriodicGraph, p: f64) -> Pressure {
    if g.spec().is_two_level() {
        Pressure::TwoLevel { p4: p, high: p }
    } else {
        Pressure::Uniform(p)
    }
}

fn lattice() -> impl Strategy<Value = (usize, usize, usize)> {
    (0..catalog().len(), 2usize..4, 2usize..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn snapshot_round_trip((i, a, b) in lattice(), seed: u64, rho in 0.0..1.0f64) {
        let c = Configuration::bernoulli(torus(i, a, b), rho, seed);
        let back = Configuration::from_snapshot(&c.to_snapshot()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn archive_round_trip((i, a, b) in lattice(), seeds in prop::collection::vec(any::<u64>(), 1..4)) {
        let g = torus(i, a, b);
        let cs: Vec<_> = seeds.iter().map(|&s| Configuration::bernoulli(g.clone(), 0.3, s)).collect();
        prop_assert_eq!(read_snapshot_archive(&snapshot_archive(&cs)).unwrap(), cs);
    }

    #[test]
    fn class_counts_add_up((i, a, b) in lattice(), seed: u64) {
        let d = Configuration::bernoulli(torus(i, a, b), 0.5, seed).density();
        prop_assert_eq!(d.class_occupied.iter().sum::<usize>(), d.occupied);
        prop_assert_eq!(d.class_sizes.iter().sum::<usize>(), d.site_count);
    }

    #[test]
    fn zero_pressure_empties((i, a, b) in lattice(), seed: u64) {
        let g = torus(i, a, b);
        let mut c = Configuration::bernoulli(g.clone(), 0.7, seed);
        full_cycle(&mut c, &pressure(&g, 0.0), seed, 0, Execution::Sequential);
        prop_assert_eq!(c.occupied_count(), 0);
    }

    #[test]
    fn runs_are_deterministic((i, a, b) in lattice(), seed: u64, p in 0.1..1.0f64, thin in 1u64..5) {
        let g = torus(i, a, b);
        let start = Configuration::bernoulli(g.clone(), 0.5, seed);
        let opts = RunOptions { cycles: 12, seed, thinning: thin, ..RunOptions::default() };
        let (end1, t1) = run(&start, &pressure(&g, p), &opts).unwrap();
        let (end2, t2) = run(&start, &pressure(&g, p), &opts).unwrap();
        prop_assert_eq!(&end1, &end2);
        prop_assert_eq!(t1.rows.len() as u64, 1 + 12 / thin);
        prop_assert_eq!(t1, t2);
    }

    #[test]
    fn runs_split_at_any_cycle((i, a, b) in lattice(), seed: u64, cut in 1u64..9) {
        let g = torus(i, a, b);
        let pr = pressure(&g, 0.8);
        let start = Configuration::bernoulli(g.clone(), 0.5, seed);
        let whole = RunOptions { cycles: 10, seed, ..RunOptions::default() };
        let (end, _) = run(&start, &pr, &whole).unwrap();
        let first = RunOptions { cycles: cut, ..whole.clone() };
        let (mid, _) = run(&start, &pr, &first).unwrap();
        let rest = RunOptions { cycles: 10 - cut, start_cycle: cut, ..whole };
        let (end2, _) = run(&mid, &pr, &rest).unwrap();
        prop_assert_eq!(end, end2);
    }

    #[test]
    fn any_legal_state_reaches_any_other((i, a, b) in lattice(), s1: u64, s2: u64, p in 0.05..0.95f64) {
        let g = torus(i, a, b);
        let pr = pressure(&g, p);
        let mut x = Configuration::bernoulli(g.clone(), 0.5, s1);
        let mut y = Configuration::bernoulli(g.clone(), 0.5, s2);
        full_cycle(&mut x, &pr, s1, 0, Execution::Sequential);
        full_cycle(&mut y, &pr, s2, 0, Execution::Sequential);
        let w = reachability_check(&x, &y, &pr).unwrap();
        prop_assert!(w.probability > 0.0 || w.ln_probability.is_finite());
        prop_assert!(w.replay(&pr));
    }

    #[test]
    fn lattice_text_round_trip(i in 0..catalog().len()) {
        let spec = &catalog()[i];
        let back = LatticeSpec::from_text(&spec.to_text()).unwrap();
        prop_assert_eq!(&back.name, &spec.name);
        prop_assert_eq!(&back.edges, &spec.edges);
        prop_assert_eq!(&back.class_of, &spec.class_of);
        prop_assert_eq!(&back.table, &spec.table);
    }

    #[test]
    fn order_parameter_in_unit_interval((i, a, b) in lattice(), seed: u64, rho in 0.0..1.0f64) {
        let c = Configuration::bernoulli(torus(i, a, b), rho, seed);
        let m = order_parameter(&c.density(), &catalog()[i].order);
        prop_assert!((0.0..=1.0).contains(&m));
    }
}

#[test]
fn class_filled_start_is_ordered() {
    for spec in catalog() {
        let g = Arc::new(PeriodicGraph::with_min_cells(spec, 4).unwrap());
        let k = match &spec.order {
            OrderSpec::Spread(ks) => ks[0],
            OrderSpec::Contrast(pairs) => pairs[0].0[0],
        };
        let m = order_parameter(&Configuration::class_filled(g, k).density(), &spec.order);
        assert!(m >= 0.5, "{}: {m}", spec.name);
    }
}

fn flat_run(start: Start, level: [f64; 2], cycles: usize) -> OrderRun {
    OrderRun {
        start,
        seed: 1,
        series: vec![(level[0] - level[1]).abs(); cycles],
        class_densities: vec![level.to_vec(); cycles],
        rho_window: 0.25,
    }
}

#[test]
fn verdict_is_a_function_of_runs() {
    let order = OrderSpec::Spread(vec![0, 1]);
    let protocol = Protocol {
        burn_in: 10,
        window: 10,
        max_cycles: 40,
        ..Protocol::default()
    };
    let melted = vec![flat_run(Start::ClassFilled, [0.25, 0.25], 40); 3];
    assert_eq!(verdict_from(&melted, &order, &protocol), Phase::Subcritical);
    let mut held = vec![flat_run(Start::ClassFilled, [0.5, 0.0], 40); 3];
    assert_eq!(verdict_from(&held, &order, &protocol), Phase::Undecided);
    held.extend(vec![flat_run(Start::Bernoulli, [0.4, 0.1], 40); 3]);
    assert_eq!(verdict_from(&held, &order, &protocol), Phase::Supercritical);
}
