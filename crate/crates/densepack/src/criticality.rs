//! Order parameters, phase verdicts and critical-pressure brackets.
//!
//! A verdict at one pressure comes from two kinds of runs. Runs started
//! from a single full class test whether the imposed order melts (the
//! subcritical test). Runs started from a Bernoulli configuration test
//! whether order grows on its own (the supercritical test). Each kind uses
//! several seeds and a majority vote.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::{Configuration, DensityReport};
use crate::lattice::{LatticeSpec, OrderSpec, PackingType, PeriodicGraph};
use crate::par;
use crate::pca::{full_cycle, Execution, Pressure};
use crate::{Error, Result};

/// Largest class-density contrast allowed by `order`.
pub fn order_parameter(report: &DensityReport, order: &OrderSpec) -> f64 {
    order_of_densities(&report.class_densities(), order)
}

fn order_of_densities(rho: &[f64], order: &OrderSpec) -> f64 {
    let mean = |ks: &[usize]| ks.iter().map(|&k| rho[k]).sum::<f64>() / ks.len() as f64;
    match order {
        OrderSpec::Spread(ks) => {
            let vals = ks.iter().map(|&k| rho[k]);
            let hi = vals.clone().fold(f64::NEG_INFINITY, f64::max);
            let lo = vals.fold(f64::INFINITY, f64::min);
            if ks.is_empty() {
                0.0
            } else {
                hi - lo
            }
        }
        OrderSpec::Contrast(pairs) => pairs
            .iter()
            .map(|(a, b)| (mean(a) - mean(b)).abs())
            .fold(0.0, f64::max),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub burn_in: u64,
    pub window: u64,
    /// Subcritical when the last window mean is below this.
    pub epsilon: f64,
    /// Supercritical when window means reach this and do not fall.
    pub delta: f64,
    pub seeds: Vec<u64>,
    /// Bisection stops once the bracket is at most this wide.
    pub resolution: f64,
    /// Longest run for a single verdict.
    pub max_cycles: u64,
    /// Bernoulli density for the supercritical test; the table value or 0.3 when unset.
    pub rho0: Option<f64>,
    /// Approximate site counts of the scan and bisection tori.
    pub coarse_sites: usize,
    pub fine_sites: usize,
    pub coarse_grid: Vec<f64>,
    pub execution: Execution,
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol {
            burn_in: 1000,
            window: 500,
            epsilon: 0.02,
            delta: 0.10,
            seeds: vec![1, 2, 3],
            resolution: 0.01,
            max_cycles: 10_000,
            rho0: None,
            coarse_sites: 2_500,
            fine_sites: 40_000,
            coarse_grid: vec![
                0.5, 0.6, 0.7, 0.75, 0.8, 0.85, 0.88, 0.9, 0.92, 0.94, 0.96, 0.97, 0.98, 0.99,
                0.995, 0.999,
            ],
            execution: Execution::default(),
        }
    }
}

impl Protocol {
    fn rho0(&self, spec: &LatticeSpec) -> f64 {
        self.rho0.or(spec.table.rho_pc).unwrap_or(0.3)
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidSpec(format!("protocol: {what}")));
        if self.window == 0 || self.burn_in + self.window > self.max_cycles {
            return bad("need 0 < window and burn_in + window <= max_cycles");
        }
        if self.seeds.is_empty() {
            return bad("no seeds");
        }
        if !(self.resolution > 0.0) {
            return bad("resolution must be positive");
        }
        Ok(())
    }
}

/// Torus with roughly `sites` sites, as square in cells as the class period allows.
pub fn torus_for_sites(spec: &LatticeSpec, sites: usize) -> [usize; 2] {
    let side = (sites as f64 / spec.sites_per_cell() as f64).sqrt();
    spec.class_period.map(|p| ((side / p as f64).round() as usize).max(2) * p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Subcritical,
    Supercritical,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Start {
    ClassFilled,
    Bernoulli,
}

/// Class densities after every cycle of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderRun {
    pub start: Start,
    pub seed: u64,
    /// Per-cycle order parameter.
    pub series: Vec<f64>,
    /// Per-cycle class densities.
    pub class_densities: Vec<Vec<f64>>,
    /// Total density averaged over the last window.
    pub rho_window: f64,
}

impl OrderRun {
    /// Order parameter of the class densities averaged over each window
    /// after burn-in.
    pub fn window_orders(&self, order: &OrderSpec, protocol: &Protocol) -> Vec<f64> {
        window_orders(&self.class_densities, order, protocol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseVerdict {
    pub verdict: Phase,
    pub runs: Vec<OrderRun>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len().max(1) as f64
}

fn window_orders(rows: &[Vec<f64>], order: &OrderSpec, protocol: &Protocol) -> Vec<f64> {
    let start = protocol.burn_in as usize;
    if rows.len() <= start {
        return Vec::new();
    }
    rows[start..]
        .chunks_exact(protocol.window as usize)
        .map(|w| {
            let k = w[0].len();
            let avg: Vec<f64> = (0..k).map(|j| w.iter().map(|r| r[j]).sum::<f64>() / w.len() as f64).collect();
            order_of_densities(&avg, order)
        })
        .collect()
}

fn melted(w: &[f64], protocol: &Protocol) -> bool {
    w.last().is_some_and(|&m| m < protocol.epsilon)
}

/// Window values end above `delta` and never drop by more than `epsilon`.
fn ordered(w: &[f64], protocol: &Protocol) -> bool {
    w.last().is_some_and(|&m| m > protocol.delta) && w.windows(2).all(|p| p[1] >= p[0] - protocol.epsilon)
}

fn majority(votes: impl Iterator<Item = bool>, n: usize) -> bool {
    2 * votes.filter(|&v| v).count() > n
}

/// Verdict from a set of runs. Depends only on the runs and the thresholds.
pub fn verdict_from(runs: &[OrderRun], order: &OrderSpec, protocol: &Protocol) -> Phase {
    let of = |s: Start| runs.iter().filter(move |r| r.start == s);
    let test = |r: &OrderRun| {
        let w = r.window_orders(order, protocol);
        match r.start {
            Start::ClassFilled => melted(&w, protocol),
            Start::Bernoulli => ordered(&w, protocol),
        }
    };
    let n_sub = of(Start::ClassFilled).count();
    let n_sup = of(Start::Bernoulli).count();
    if n_sub > 0 && majority(of(Start::ClassFilled).map(test), n_sub) {
        Phase::Subcritical
    } else if n_sup > 0 && majority(of(Start::Bernoulli).map(test), n_sup) {
        Phase::Supercritical
    } else {
        Phase::Undecided
    }
}

fn order_run(g: &Arc<PeriodicGraph>, pressure: &Pressure, protocol: &Protocol, start: Start, seed: u64) -> OrderRun {
    let spec = g.spec();
    let mut c = match start {
        Start::ClassFilled => {
            let k = match &spec.order {
                OrderSpec::Spread(ks) => ks[0],
                OrderSpec::Contrast(pairs) => pairs[0].0[0],
            };
            Configuration::class_filled(g.clone(), k)
        }
        Start::Bernoulli => Configuration::bernoulli(g.clone(), protocol.rho0(spec), seed),
    };
    let w = protocol.window as usize;
    let mut series = Vec::new();
    let mut class_densities = Vec::new();
    let mut rho = Vec::new();
    for cycle in 0..protocol.max_cycles {
        full_cycle(&mut c, pressure, seed, cycle, protocol.execution);
        let d = c.density();
        series.push(order_parameter(&d, &spec.order));
        class_densities.push(d.class_densities());
        rho.push(d.rho_total());
        let t = series.len() as u64;
        if t >= protocol.burn_in + protocol.window && (t - protocol.burn_in) % protocol.window == 0 {
            let wo = window_orders(&class_densities, &spec.order, protocol);
            let done = match start {
                Start::ClassFilled => melted(&wo, protocol),
                Start::Bernoulli => ordered(&wo, protocol),
            };
            if done {
                break;
            }
        }
    }
    let rho_window = mean(&rho[rho.len().saturating_sub(w)..]);
    OrderRun {
        start,
        seed,
        series,
        class_densities,
        rho_window,
    }
}

fn runs(g: &Arc<PeriodicGraph>, pressure: &Pressure, protocol: &Protocol, start: Start) -> Vec<OrderRun> {
    par::map_slice(&protocol.seeds, protocol.execution.is_parallel(), |&s| {
        order_run(g, pressure, protocol, start, s)
    })
}

/// Subcritical and supercritical tests at one pressure.
///
/// The supercritical runs are skipped when the subcritical test already
/// decides.
pub fn classify_phase(
    spec: &LatticeSpec,
    dims: [usize; 2],
    pressure: &Pressure,
    protocol: &Protocol,
) -> Result<PhaseVerdict> {
    protocol.validate()?;
    let g = Arc::new(PeriodicGraph::new(spec, dims)?);
    pressure.validate(&g)?;
    let mut all = runs(&g, pressure, protocol, Start::ClassFilled);
    if verdict_from(&all, &spec.order, protocol) != Phase::Subcritical {
        all.extend(runs(&g, pressure, protocol, Start::Bernoulli));
    }
    Ok(PhaseVerdict {
        verdict: verdict_from(&all, &spec.order, protocol),
        runs: all,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub p: f64,
    pub verdict: Phase,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalityEstimate {
    pub lattice: String,
    pub dims: [usize; 2],
    pub coarse_dims: [usize; 2],
    pub p_lo: f64,
    pub p_hi: f64,
    /// Whether the bracket reached the protocol resolution.
    pub resolved: bool,
    pub rho_at_pc: f64,
    pub coarse: Vec<ScanPoint>,
    pub fine: Vec<ScanPoint>,
    pub protocol: Protocol,
}

impl CriticalityEstimate {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.p_lo + self.p_hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum BracketReport {
    Bracket(CriticalityEstimate),
    NoTransition {
        lattice: String,
        reason: String,
        coarse: Vec<ScanPoint>,
    },
}

/// Pressure for a lattice with `p` on the high sites and `p4` on the rest.
fn pressure_for(spec: &LatticeSpec, p4: Option<f64>, p: f64) -> Pressure {
    match p4 {
        Some(p4) if spec.is_two_level() => Pressure::TwoLevel { p4, high: p },
        _ => Pressure::Uniform(p),
    }
}

/// Coarse scan on a small torus, then bisection on the large one.
pub fn bracket_pc(spec: &LatticeSpec, protocol: &Protocol) -> Result<BracketReport> {
    if spec.table.packing_type == PackingType::R {
        return Ok(BracketReport::NoTransition {
            lattice: spec.name.clone(),
            reason: "densest packings admit local moves; no sublattice selection".into(),
            coarse: Vec::new(),
        });
    }
    bracket_with(spec, None, protocol)
}

fn bracket_with(spec: &LatticeSpec, p4: Option<f64>, protocol: &Protocol) -> Result<BracketReport> {
    protocol.validate()?;
    let classify = |dims, p| -> Result<Phase> {
        Ok(classify_phase(spec, dims, &pressure_for(spec, p4, p), protocol)?.verdict)
    };
    let coarse_dims = torus_for_sites(spec, protocol.coarse_sites);
    let dims = torus_for_sites(spec, protocol.fine_sites);
    let mut coarse = Vec::new();
    for &p in &protocol.coarse_grid {
        let verdict = classify(coarse_dims, p)?;
        coarse.push(ScanPoint { p, verdict });
        if verdict == Phase::Supercritical {
            break;
        }
    }
    let Some(hi_idx) = coarse.iter().position(|s| s.verdict == Phase::Supercritical) else {
        return Ok(BracketReport::NoTransition {
            lattice: spec.name.clone(),
            reason: format!("no supercritical verdict up to p = {}", coarse.last().map_or(0.0, |s| s.p)),
            coarse,
        });
    };
    let lo_idx = coarse[..hi_idx]
        .iter()
        .rposition(|s| s.verdict == Phase::Subcritical);

    // Confirm the coarse endpoints on the large torus, moving outward on failure.
    let grid = &protocol.coarse_grid;
    let mut fine = Vec::new();
    let mut hi = None;
    for &p in &grid[hi_idx..] {
        let verdict = classify(dims, p)?;
        fine.push(ScanPoint { p, verdict });
        if verdict == Phase::Supercritical {
            hi = Some(p);
            break;
        }
    }
    let mut lo = None;
    for &p in grid[..lo_idx.map_or(0, |i| i + 1)].iter().rev() {
        let verdict = classify(dims, p)?;
        fine.push(ScanPoint { p, verdict });
        if verdict == Phase::Subcritical {
            lo = Some(p);
            break;
        }
    }
    let (Some(mut lo), Some(mut hi)) = (lo, hi) else {
        return Err(Error::Undecidable(PartialBracket {
            p_lo: lo,
            p_hi: hi,
            reason: format!("{}: coarse endpoints not confirmed on {dims:?}", spec.name),
        }));
    };

    // Bisection; an undecided midpoint leaves the bracket as it stands.
    let mut resolved = true;
    while hi - lo > protocol.resolution {
        let mid = 0.5 * (lo + hi);
        let verdict = classify(dims, mid)?;
        fine.push(ScanPoint { p: mid, verdict });
        match verdict {
            Phase::Subcritical => lo = mid,
            Phase::Supercritical => hi = mid,
            Phase::Undecided => {
                resolved = false;
                break;
            }
        }
    }

    let mid = 0.5 * (lo + hi);
    let g = Arc::new(PeriodicGraph::new(spec, dims)?);
    let at_mid = runs(&g, &pressure_for(spec, p4, mid), protocol, Start::Bernoulli);
    let rho_at_pc = mean(&at_mid.iter().map(|r| r.rho_window).collect::<Vec<_>>());
    Ok(BracketReport::Bracket(CriticalityEstimate {
        lattice: spec.name.clone(),
        dims,
        coarse_dims,
        p_lo: lo,
        p_hi: hi,
        resolved,
        rho_at_pc,
        coarse,
        fine,
        protocol: protocol.clone(),
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p4: f64,
    pub p_high_lo: f64,
    pub p_high_hi: f64,
    pub resolved: bool,
}

/// Critical `p_high` as a function of `p4` on a two-level lattice.
pub fn critical_curve(spec: &LatticeSpec, p4_grid: &[f64], protocol: &Protocol) -> Result<Vec<CurvePoint>> {
    if !spec.is_two_level() {
        return Err(Error::Unsupported {
            lattice: spec.name.clone(),
            what: "critical curve".into(),
        });
    }
    let mut out = Vec::new();
    for &p4 in p4_grid {
        if !(0.0..1.0).contains(&p4) {
            return Err(Error::PressureOutOfRange(p4));
        }
        match bracket_with(spec, Some(p4), protocol)? {
            BracketReport::Bracket(e) => out.push(CurvePoint {
                p4,
                p_high_lo: e.p_lo,
                p_high_hi: e.p_hi,
                resolved: e.resolved,
            }),
            BracketReport::NoTransition { reason, .. } => {
                return Err(Error::Undecidable(PartialBracket {
                    p_lo: None,
                    p_hi: None,
                    reason: format!("{} at p4 = {p4}: {reason}", spec.name),
                }))
            }
        }
    }
    Ok(out)
}

/// Curve is non-decreasing in `p4` up to `tolerance`.
pub fn curve_is_monotone(points: &[CurvePoint], tolerance: f64) -> bool {
    points
        .windows(2)
        .all(|w| w[1].p_high_hi >= w[0].p_high_lo - tolerance)
}

/// Bracket state when a search could not decide.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialBracket {
    pub p_lo: Option<f64>,
    pub p_hi: Option<f64>,
    pub reason: String,
}

impl std::fmt::Display for PartialBracket {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (lo {:?}, hi {:?})", self.reason, self.p_lo, self.p_hi)
    }
}
