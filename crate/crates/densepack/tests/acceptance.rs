//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness. Criteria listed in `EXPECTED_FAIL` are
//! reproduced faithfully and currently fail; they are reported but do not
//! fail the process. Any other failure exits nonzero.
//!
//! `DENSEPACK_ONLY=3,4` restricts the run to some criteria.

use std::sync::Arc;
use std::time::Instant;

use densepack::bounds::{
    bound_tightness, doublet_voter_curve, entropy_constants, kagome_entropy, kissing_stats,
    restricted_voter_curve, voter_curve, EntropyUnit, VoterMode,
};
use densepack::criticality::{
    bracket_pc, classify_phase, critical_curve, curve_is_monotone, torus_for_sites, BracketReport,
    Phase, Protocol, Start,
};
use densepack::lattice::{catalog, lookup};
use densepack::oracle::{
    default_sizes, find_local_moves, flip_connectivity, growth_fit, maximizers, Limits, MoveSummary,
};
use densepack::pca::{class_pass, full_cycle, local_update};
use densepack::rng::PassKey;
use densepack::{Configuration, Execution, PeriodicGraph, Pressure, Rational};
use proptest::prelude::*;
use proptest::test_runner::{Config as PtConfig, TestRunner};

const L_LATTICES: [&str; 7] = ["4^4", "6^3", "3^6", "4.8^2", "4.6.12", "3^2.4.3.4", "3^4.6"];
const R_LATTICES: [&str; 3] = ["3.4.6.4", "3.6.3.6", "3.12^2"];
const TIGHT: [&str; 7] = ["4^4", "6^3", "3^6", "4.8^2", "4.6.12", "3.6.3.6", "3.12^2"];
const THIRD: [&str; 4] = ["3^2.4.3.4", "3^4.6", "3^3.4^2", "3.4.6.4"];

/// Criteria that do not hold for this implementation; see the README.
const EXPECTED_FAIL: [usize; 4] = [1, 6, 8, 9];

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn graph(name: &str, min_cells: usize) -> Arc<PeriodicGraph> {
    Arc::new(PeriodicGraph::with_min_cells(lookup(name).unwrap(), min_cells).unwrap())
}

fn c1_density_bounds() -> Outcome {
    let mut o = Outcome::new();
    let sq = kissing_stats(&graph("4^4", 6)).unwrap();
    o.check(
        sq.d == 4 && sq.n == Rational::from_integer(3) && sq.rho_bar == Rational::new(1, 2),
        format!("4^4: d={} n={} rho_bar={}", sq.d, sq.n, sq.rho_bar),
    );
    let limits = Limits::default();
    for spec in catalog().iter().filter(|s| s.is_uniform_degree()) {
        let t = bound_tightness(spec, &limits).unwrap();
        let name = spec.name.as_str();
        let mut ok = t.max_density <= t.rho_bar && t.tight == TIGHT.contains(&name);
        if THIRD.contains(&name) {
            ok &= t.max_density == Rational::new(1, 3);
        }
        o.check(
            ok,
            format!(
                "{name} on {:?}: max {} rho_bar {} tight={}",
                t.dims, t.max_density, t.rho_bar, t.tight
            ),
        );
    }
    o
}

fn c2_table_densities() -> Outcome {
    let mut o = Outcome::new();
    for spec in catalog() {
        let g = graph(&spec.name, 6);
        for phase in 0..spec.optimal.len() {
            let c = Configuration::optimal_packing(g.clone(), phase).unwrap();
            let rho = c.density().rho_total_exact();
            o.check(
                c.is_legal() && rho == spec.table.density,
                format!("{} phase {phase}: rho {rho} table {}", spec.name, spec.table.density),
            );
        }
    }
    o
}

fn c3_kagome_entropy() -> Outcome {
    let mut o = Outcome::new();
    let e = kagome_entropy();
    let dev = (e.value - 0.32306).abs();
    let err = e.error_estimate.unwrap_or(f64::INFINITY);
    // the reference value is truncated to five places
    o.check(
        dev <= 1e-4 && dev <= 1e-5 + err,
        format!("h = {:.8} deviation {dev:.2e} quadrature error {err:.2e}", e.value),
    );
    o
}

fn c4_closed_forms() -> Outcome {
    let mut o = Outcome::new();
    let ln2 = std::f64::consts::LN_2;
    let want = [("3^3.4^2", 0.5), ("Z2M", 0.5), ("3.4.6.4", 3.0 / 16.0), ("3.12^2", 1.0 / 18.0)];
    let rows = entropy_constants(EntropyUnit::Nats);
    for (name, coef) in want {
        let got = rows.iter().find(|e| e.lattice == name).map(|e| e.value);
        let ok = got.is_some_and(|v| format!("{v:.6}") == format!("{:.6}", coef * ln2));
        o.check(ok, format!("{name}: {got:?} vs {:.6}", coef * ln2));
    }
    o
}

fn c5_brackets() -> Outcome {
    let mut o = Outcome::new();
    let protocol = Protocol {
        fine_sites: 10_000,
        resolution: 0.02,
        ..Protocol::default()
    };
    let table = [
        ("4^4", 0.79, 0.36),
        ("6^3", 0.87, 0.4),
        ("3^6", 0.90, 0.26),
        ("4.8^2", 0.90, 0.4),
        ("4.6.12", 0.91, 0.42),
        ("3^4.6", 0.97, 0.29),
        ("3^2.4.3.4", 0.99, 0.3),
    ];
    for (name, pc, rho) in table {
        let t = Instant::now();
        match bracket_pc(lookup(name).unwrap(), &protocol) {
            Ok(BracketReport::Bracket(b)) => {
                let ok = b.p_lo - 0.04 <= pc && pc <= b.p_hi + 0.04 && (b.rho_at_pc - rho).abs() <= 0.05;
                o.check(
                    ok,
                    format!(
                        "{name} on {:?}: [{:.4}, {:.4}] rho {:.3} (table {pc}, {rho}) {:.0}s",
                        b.dims,
                        b.p_lo,
                        b.p_hi,
                        b.rho_at_pc,
                        t.elapsed().as_secs_f64()
                    ),
                );
            }
            other => o.check(false, format!("{name}: {other:?}")),
        }
    }
    o
}

fn c6_noncriticality() -> Outcome {
    let mut o = Outcome::new();
    let protocol = Protocol::default();
    for name in R_LATTICES {
        let spec = lookup(name).unwrap();
        let dims = torus_for_sites(spec, 10_000);
        for p in [0.9, 0.99, 0.999] {
            let v = classify_phase(spec, dims, &Pressure::Uniform(p), &protocol).unwrap();
            // largest pairwise gap between last-window class means of the melting runs
            let gap = v
                .runs
                .iter()
                .filter(|r| r.start == Start::ClassFilled)
                .map(|r| {
                    let w = &r.class_densities[r.class_densities.len() - protocol.window as usize..];
                    let k = w[0].len();
                    let means: Vec<f64> =
                        (0..k).map(|j| w.iter().map(|row| row[j]).sum::<f64>() / w.len() as f64).collect();
                    let hi = means.iter().cloned().fold(f64::MIN, f64::max);
                    let lo = means.iter().cloned().fold(f64::MAX, f64::min);
                    hi - lo
                })
                .fold(0.0, f64::max);
            o.check(
                v.verdict == Phase::Subcritical && gap <= 2.0 * protocol.epsilon,
                format!("{name} on {dims:?} p={p}: {:?}, class gap {gap:.3}", v.verdict),
            );
        }
    }
    o
}

fn c7_growth() -> Outcome {
    let mut o = Outcome::new();
    let limits = Limits::default();
    for spec in catalog().iter().filter(|s| !s.is_two_level()) {
        let fit = growth_fit(spec, &default_sizes(spec, limits.search_cap), &limits).unwrap();
        o.check(
            fit.packing_type == spec.table.packing_type,
            format!(
                "{}: {} points, a={:.4} b={:.4} -> {} (table {})",
                spec.name,
                fit.points.len(),
                fit.a,
                fit.b,
                fit.packing_type.as_str(),
                spec.table.packing_type.as_str()
            ),
        );
    }
    o
}

fn c8_moves() -> Outcome {
    let mut o = Outcome::new();
    for name in L_LATTICES {
        let g = graph(name, 6);
        let spec = g.spec().clone();
        let total: usize = (0..spec.optimal.len())
            .map(|k| find_local_moves(&Configuration::optimal_packing(g.clone(), k).unwrap()).unwrap().len())
            .sum();
        o.check(total == 0, format!("{name}: {total} moves on optimal packings"));
    }
    let limits = Limits::default();
    for name in R_LATTICES {
        let spec = lookup(name).unwrap();
        let dims = default_sizes(spec, limits.search_cap)
            .into_iter()
            .find(|d| d[0] * d[1] * spec.sites_per_cell() >= 24)
            .unwrap();
        let g = Arc::new(PeriodicGraph::new(spec, dims).unwrap());
        let set = maximizers(&g, &limits).unwrap();
        let mobile = set
            .configurations
            .iter()
            .filter(|c| MoveSummary::of(&find_local_moves(c).unwrap()).local() > 0)
            .count();
        o.check(
            mobile > 0,
            format!("{name} on {dims:?}: {mobile} of {} densest packings have a local move", set.count),
        );
    }
    let g = Arc::new(PeriodicGraph::new(lookup("3.6.3.6").unwrap(), [3, 3]).unwrap());
    let set = maximizers(&g, &limits).unwrap();
    let fc = flip_connectivity(&set.configurations).unwrap();
    o.check(
        fc.connected,
        format!(
            "3.6.3.6 on [3, 3]: {} packings, {} flip components, {} sectors each connected={}",
            fc.states, fc.components, fc.sectors, fc.sectors_connected
        ),
    );
    o
}

/// Square lattice, center class 0 at the origin: one 1 at `at`, then the
/// other class fills wherever it is free, then the origin decides.
fn square_two_step(at: (i64, i64)) -> bool {
    let adjacent = |a: (i64, i64), b: (i64, i64)| (a.0 - b.0).abs() + (a.1 - b.1).abs() == 1;
    let filled = |y: (i64, i64)| !adjacent(y, at);
    [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().all(|&y| !filled(y))
}

fn c9_voter() -> Outcome {
    let mut o = Outcome::new();
    let sq = voter_curve(lookup("4^4").unwrap(), VoterMode::Exhaustive).unwrap();
    let off: Vec<(i64, i64)> = vec![(2, 0), (-2, 0), (0, 2), (0, -2), (1, 1), (1, -1), (-1, 1), (-1, -1)];
    let oracle_pair = square_two_step((0, 0)) && off.iter().all(|&a| !square_two_step(a));
    o.check(
        oracle_pair && sq.patterns[1] == 9 && sq.ones[1] == 1,
        format!("4^4 k=1: {} of {} patterns update to 1", sq.ones[1], sq.patterns[1]),
    );
    for name in ["4^4", "6^3", "3^6"] {
        let c = voter_curve(lookup(name).unwrap(), VoterMode::Exhaustive).unwrap();
        let f = c.fraction();
        o.check(
            c.is_monotone() && f[0] == Some(0.0),
            format!("{name}: monotone={} fraction(0)={:?}", c.is_monotone(), f[0]),
        );
    }
    let z2m = lookup("Z2M").unwrap();
    let r = restricted_voter_curve(z2m, VoterMode::Exhaustive).unwrap();
    o.check(
        !r.is_voter(),
        format!("Z2M restricted: monotone={} corners={}", r.is_monotone(), r.corners_hold()),
    );
    let d = doublet_voter_curve(z2m, VoterMode::Exhaustive).unwrap();
    o.check(
        d.is_voter(),
        format!("Z2M doublet: monotone={} corners={}", d.is_monotone(), d.corners_hold()),
    );
    o
}

fn c10_curves() -> Outcome {
    let mut o = Outcome::new();
    let protocol = Protocol {
        fine_sites: 10_000,
        resolution: 0.02,
        ..Protocol::default()
    };
    let grid = [0.0, 0.2, 0.4, 0.6];
    let uj = critical_curve(lookup("UJ").unwrap(), &grid, &protocol).unwrap();
    let q = critical_curve(lookup("Q").unwrap(), &grid, &protocol).unwrap();
    for (name, pts) in [("UJ", &uj), ("Q", &q)] {
        let at0 = &pts[0];
        o.check(
            at0.p_high_lo - 0.04 <= 0.79 && 0.79 <= at0.p_high_hi + 0.04,
            format!("{name} p4=0: [{:.4}, {:.4}]", at0.p_high_lo, at0.p_high_hi),
        );
        let line: Vec<String> = pts.iter().map(|p| format!("{:.3}", 0.5 * (p.p_high_lo + p.p_high_hi))).collect();
        o.check(
            curve_is_monotone(pts, protocol.resolution),
            format!("{name} curve midpoints {}", line.join(" ")),
        );
    }
    let dominated = uj
        .iter()
        .zip(&q)
        .all(|(a, b)| a.p_high_hi + protocol.resolution >= b.p_high_lo);
    o.check(dominated, "UJ >= Q at every p4".to_string());
    o
}

fn arb_lattice() -> impl Strategy<Value = (usize, usize, usize)> {
    (0..catalog().len(), 2usize..5, 2usize..5)
}

fn arb_pressure(two: bool) -> BoxedStrategy<Pressure> {
    if two {
        (0.0..=1.0f64, 0.0..=1.0f64)
            .prop_map(|(p4, high)| Pressure::TwoLevel { p4, high })
            .boxed()
    } else {
        (0.0..=1.0f64).prop_map(Pressure::Uniform).boxed()
    }
}

fn torus(i: usize, a: usize, b: usize) -> Arc<PeriodicGraph> {
    let spec = &catalog()[i];
    let [p1, p2] = spec.class_period;
    Arc::new(PeriodicGraph::new(spec, [a * p1, b * p2]).unwrap())
}

fn c11_engine_properties() -> Outcome {
    let mut o = Outcome::new();
    let mut runner = TestRunner::new(PtConfig::with_cases(64));

    let legal = runner.run(
        &(arb_lattice(), any::<u64>(), any::<u64>()).prop_flat_map(|((i, a, b), seed, init)| {
            let two = catalog()[i].is_two_level();
            (Just((i, a, b, seed, init)), arb_pressure(two))
        }),
        |((i, a, b, seed, init), pressure)| {
            let mut c = Configuration::bernoulli(torus(i, a, b), 0.6, init);
            for cycle in 0..3 {
                full_cycle(&mut c, &pressure, seed, cycle, Execution::Sequential);
                prop_assert!(c.is_legal());
            }
            Ok(())
        },
    );
    o.check(legal.is_ok(), format!("legal after every cycle from Bernoulli starts: {legal:?}"));

    let pools: Vec<rayon::ThreadPool> = [1, 2, 4]
        .iter()
        .map(|&n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap())
        .collect();
    let repro = runner.run(&(arb_lattice(), any::<u64>()), |((i, a, b), seed)| {
        let g = torus(i, a, b);
        let pressure = if g.spec().is_two_level() {
            Pressure::TwoLevel { p4: 0.5, high: 0.9 }
        } else {
            Pressure::Uniform(0.8)
        };
        let go = |exec| {
            let mut c = Configuration::bernoulli(g.clone(), 0.3, seed);
            for cycle in 0..5 {
                full_cycle(&mut c, &pressure, seed, cycle, exec);
            }
            c.bits().to_vec()
        };
        let reference = go(Execution::Sequential);
        for pool in &pools {
            prop_assert_eq!(&pool.install(|| go(Execution::Parallel)), &reference);
        }
        Ok(())
    });
    o.check(repro.is_ok(), format!("identical bits on 1, 2, 4 threads and sequential: {repro:?}"));

    let order = runner.run(
        &(arb_lattice(), any::<u64>(), any::<u64>()),
        |((i, a, b), seed, shuffle)| {
            let g = torus(i, a, b);
            let pressure = if g.spec().is_two_level() {
                Pressure::TwoLevel { p4: 0.7, high: 0.7 }
            } else {
                Pressure::Uniform(0.7)
            };
            for k in 0..g.class_count() {
                let start = Configuration::bernoulli(g.clone(), 0.4, seed);
                let key = PassKey::new(seed, 0, k as u64);
                let mut a = start.clone();
                class_pass(&mut a, k, &pressure, &key, Execution::Sequential);
                let mut sites: Vec<usize> = g.class_sites(k).iter().map(|&x| x as usize).collect();
                let mut s = densepack::rng::Stream::new(shuffle, 7);
                for j in (1..sites.len()).rev() {
                    sites.swap(j, (s.next_u64() % (j as u64 + 1)) as usize);
                }
                let mut b = start;
                for x in sites {
                    let v = local_update(&b, x, pressure.at(&g, x), key.uniform(x));
                    b.set(x, v);
                }
                prop_assert_eq!(a.bits(), b.bits());
            }
            Ok(())
        },
    );
    o.check(order.is_ok(), format!("class pass independent of site order: {order:?}"));

    let uniform: Vec<usize> = (0..catalog().len()).filter(|&i| catalog()[i].is_uniform_degree()).collect();
    let bars: Vec<Rational> = uniform
        .iter()
        .map(|&i| kissing_stats(&graph(&catalog()[i].name, 6)).unwrap().rho_bar)
        .collect();
    let bound = runner.run(
        &(0..uniform.len(), any::<u64>(), 0.5..=1.0f64, 1u64..40),
        |(j, seed, p, cycles)| {
            let g = graph(&catalog()[uniform[j]].name, 6);
            let mut c = Configuration::bernoulli(g, 0.5, seed);
            for cycle in 0..cycles {
                full_cycle(&mut c, &Pressure::Uniform(p), seed, cycle, Execution::Sequential);
                prop_assert!(c.density().rho_total_exact() <= bars[j]);
            }
            Ok(())
        },
    );
    o.check(bound.is_ok(), format!("sampled densities never exceed rho_bar: {bound:?}"));
    o
}

type Criterion = (usize, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "density bound and tightness", c1_density_bounds),
        (2, "optimal packing densities", c2_table_densities),
        (3, "kagome entropy", c3_kagome_entropy),
        (4, "closed-form entropies", c4_closed_forms),
        (5, "critical brackets", c5_brackets),
        (6, "no transition on random lattices", c6_noncriticality),
        (7, "packing-type classification", c7_growth),
        (8, "rigidity and mobility", c8_moves),
        (9, "voter diagnostics", c9_voter),
        (10, "UJ and Q critical curves", c10_curves),
        (11, "engine properties", c11_engine_properties),
    ];
    let only: Option<Vec<usize>> = std::env::var("DENSEPACK_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut unexpected = Vec::new();
    let mut summary = Vec::new();
    for (n, title, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        let t = Instant::now();
        let out = f();
        for line in &out.lines {
            println!("    [{n}] {line}");
        }
        let status = match (out.pass, EXPECTED_FAIL.contains(&n)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (expected)",
            (false, false) => {
                unexpected.push(n);
                "FAIL"
            }
        };
        let line = format!("criterion {n:>2} {status}: {title} ({:.1}s)", t.elapsed().as_secs_f64());
        println!("{line}");
        summary.push(line);
    }
    println!("\nacceptance summary");
    for line in &summary {
        println!("{line}");
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
