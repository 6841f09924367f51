//! The sublattice-sweep probabilistic cellular automaton.
//!
//! One cycle runs one pass per update class in catalog order. A pass applies
//! the local rule to every site of the class: the site empties if any
//! neighbor is occupied, and otherwise becomes occupied with probability
//! `p`. Sites of one class are never adjacent, so a pass may be computed in
//! any order.

use serde::{Deserialize, Serialize};

use crate::config::{Configuration, DensityReport};
use crate::lattice::PeriodicGraph;
use crate::par;
use crate::rng::PassKey;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Pressure {
    Uniform(f64),
    /// Degree-4 sites use `p4`, all others `high`.
    TwoLevel { p4: f64, high: f64 },
}

impl Pressure {
    pub fn validate(&self, g: &PeriodicGraph) -> Result<()> {
        let (vals, two) = match *self {
            Pressure::Uniform(p) => (vec![p], false),
            Pressure::TwoLevel { p4, high } => (vec![p4, high], true),
        };
        for v in vals {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::PressureOutOfRange(v));
            }
        }
        if two != g.spec().is_two_level() {
            return Err(Error::PressureShape(g.name().to_string()));
        }
        Ok(())
    }

    #[inline]
    pub fn at(&self, g: &PeriodicGraph, x: usize) -> f64 {
        match *self {
            Pressure::Uniform(p) => p,
            Pressure::TwoLevel { p4, high } => {
                if g.is_low_site(x) {
                    p4
                } else {
                    high
                }
            }
        }
    }

    fn values(&self) -> Vec<f64> {
        match *self {
            Pressure::Uniform(p) => vec![p],
            Pressure::TwoLevel { p4, high } => vec![p4, high],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        self == Execution::Parallel && par::available()
    }
}

/// Source of uniforms for a single pass.
pub trait Draws: Sync {
    fn draw(&self, x: usize) -> f64;
}

impl Draws for PassKey {
    #[inline]
    fn draw(&self, x: usize) -> f64 {
        self.uniform(x)
    }
}

impl<F: Fn(usize) -> f64 + Sync> Draws for F {
    #[inline]
    fn draw(&self, x: usize) -> f64 {
        self(x)
    }
}

/// The local rule with an explicit uniform `u`.
#[inline]
pub fn local_update(c: &Configuration, x: usize, p: f64, u: f64) -> bool {
    !c.blocked(x) && u < p
}

/// Update every site of class `k` from the current configuration.
pub fn class_pass<D: Draws>(
    c: &mut Configuration,
    k: usize,
    pressure: &Pressure,
    draws: &D,
    exec: Execution,
) {
    let graph = c.graph_arc().clone();
    let sites = graph.class_sites(k);
    if exec.is_parallel() {
        let snapshot = &*c;
        let new: Vec<u8> = par::map_slice(sites, true, |&x| {
            let x = x as usize;
            u8::from(local_update(snapshot, x, pressure.at(&graph, x), draws.draw(x)))
        });
        let bits = c.bits_mut();
        for (&x, v) in sites.iter().zip(new) {
            bits[x as usize] = v;
        }
    } else {
        for &x in sites {
            let x = x as usize;
            let v = local_update(c, x, pressure.at(&graph, x), draws.draw(x));
            c.set(x, v);
        }
    }
}

/// One full cycle: a pass per class in schedule order.
pub fn full_cycle(
    c: &mut Configuration,
    pressure: &Pressure,
    seed: u64,
    cycle: u64,
    exec: Execution,
) {
    for k in 0..c.graph().class_count() {
        class_pass(c, k, pressure, &PassKey::new(seed, cycle, k as u64), exec);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub cycles: u64,
    pub seed: u64,
    /// Cycle number of the first cycle run; draws are keyed by absolute cycle.
    pub start_cycle: u64,
    /// Record every `thinning`-th cycle.
    pub thinning: u64,
    pub execution: Execution,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            cycles: 1000,
            seed: 1,
            start_cycle: 0,
            thinning: 1,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub cycle: u64,
    pub density: DensityReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub lattice: String,
    pub dims: [usize; 2],
    pub seed: u64,
    pub cycles: u64,
    pub schedule: Vec<usize>,
    pub pressure: Pressure,
    pub rows: Vec<TraceRow>,
}

/// Run cycles, calling `observer` after each one with the absolute cycle count.
pub fn run_observed<F>(
    c: &mut Configuration,
    pressure: &Pressure,
    opts: &RunOptions,
    mut observer: F,
) -> Result<()>
where
    F: FnMut(u64, &Configuration) -> bool,
{
    pressure.validate(c.graph())?;
    for t in 0..opts.cycles {
        let cycle = opts.start_cycle + t;
        full_cycle(c, pressure, opts.seed, cycle, opts.execution);
        if !observer(cycle + 1, c) {
            break;
        }
    }
    Ok(())
}

/// Run from `start`, recording densities at cycle 0 and every `thinning` cycles.
pub fn run(
    start: &Configuration,
    pressure: &Pressure,
    opts: &RunOptions,
) -> Result<(Configuration, RunTrace)> {
    let mut c = start.clone();
    let thin = opts.thinning.max(1);
    let mut rows = vec![TraceRow {
        cycle: opts.start_cycle,
        density: c.density(),
    }];
    run_observed(&mut c, pressure, opts, |cycle, cur| {
        if (cycle - opts.start_cycle) % thin == 0 {
            rows.push(TraceRow {
                cycle,
                density: cur.density(),
            });
        }
        true
    })?;
    let trace = RunTrace {
        lattice: c.graph().name().to_string(),
        dims: c.graph().dims(),
        seed: opts.seed,
        cycles: opts.cycles,
        schedule: (0..c.graph().class_count()).collect(),
        pressure: *pressure,
        rows,
    };
    Ok((c, trace))
}

/// What a single draw must do for the witness path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DrawRule {
    /// Site is blocked; any draw works.
    Free,
    /// Draw below `p` to occupy.
    Below(f64),
    /// Draw at or above `p` to stay empty.
    AtLeast(f64),
}

impl DrawRule {
    fn probability(self) -> f64 {
        match self {
            DrawRule::Free => 1.0,
            DrawRule::Below(p) => p,
            DrawRule::AtLeast(p) => 1.0 - p,
        }
    }

    fn representative(self) -> f64 {
        match self {
            DrawRule::Free => 0.5,
            DrawRule::Below(p) => p / 2.0,
            DrawRule::AtLeast(p) => (1.0 + p) / 2.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct WitnessStep {
    pub from: Configuration,
    pub to: Configuration,
    /// Per pass, the draw rule for each site of that class.
    pub draws: Vec<Vec<(usize, DrawRule)>>,
    pub probability: f64,
    pub ln_probability: f64,
}

/// Two-cycle path `a -> all empty -> b` with positive probability.
#[derive(Clone, Debug)]
pub struct Witness {
    pub steps: Vec<WitnessStep>,
    pub probability: f64,
    pub ln_probability: f64,
}

impl Witness {
    /// Replay the recorded draw rules through the engine and check endpoints.
    pub fn replay(&self, pressure: &Pressure) -> bool {
        self.steps.iter().all(|step| {
            let mut c = step.from.clone();
            for (k, rules) in step.draws.iter().enumerate() {
                let mut u = vec![0.5; c.graph().site_count()];
                for &(x, r) in rules {
                    u[x] = r.representative();
                }
                class_pass(&mut c, k, pressure, &|x: usize| u[x], Execution::Sequential);
            }
            c == step.to
        })
    }
}

fn forced_cycle(from: &Configuration, target: &Configuration, pressure: &Pressure) -> WitnessStep {
    let g = from.graph_arc().clone();
    let mut c = from.clone();
    let mut draws = Vec::with_capacity(g.class_count());
    let mut ln = 0.0;
    for k in 0..g.class_count() {
        let mut rules = Vec::with_capacity(g.class_sites(k).len());
        for &x in g.class_sites(k) {
            let x = x as usize;
            let p = pressure.at(&g, x);
            let rule = if c.blocked(x) {
                DrawRule::Free
            } else if target.get(x) {
                DrawRule::Below(p)
            } else {
                DrawRule::AtLeast(p)
            };
            ln += rule.probability().ln();
            rules.push((x, rule));
        }
        for &(x, r) in &rules {
            c.set(x, matches!(r, DrawRule::Below(_)));
        }
        draws.push(rules);
    }
    WitnessStep {
        from: from.clone(),
        to: c,
        draws,
        probability: ln.exp(),
        ln_probability: ln,
    }
}

/// Constructive proof that `b` is reachable from `a` in two cycles.
pub fn reachability_check(
    a: &Configuration,
    b: &Configuration,
    pressure: &Pressure,
) -> Result<Witness> {
    pressure.validate(a.graph())?;
    for p in pressure.values() {
        if p <= 0.0 || p >= 1.0 {
            return Err(Error::BoundaryPressure(p));
        }
    }
    if a.graph().name() != b.graph().name() || a.graph().dims() != b.graph().dims() {
        return Err(Error::InvalidSpec("configurations live on different tori".into()));
    }
    if !a.is_legal() || !b.is_legal() {
        return Err(Error::Illegal);
    }
    let empty = Configuration::empty(a.graph_arc().clone());
    let s1 = forced_cycle(a, &empty, pressure);
    let s2 = forced_cycle(&empty, b, pressure);
    debug_assert!(s1.to == empty && s2.to == *b);
    let ln = s1.ln_probability + s2.ln_probability;
    Ok(Witness {
        steps: vec![s1, s2],
        probability: ln.exp(),
        ln_probability: ln,
    })
}
