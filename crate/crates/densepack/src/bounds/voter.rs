use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::lattice::{LatticeSpec, PeriodicGraph};
use crate::pca::{class_pass, Execution, Pressure};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VoterMode {
    /// Every legal support pattern once.
    Exhaustive,
    /// Patterns weighted by how often short `p = 1` runs produce them.
    Empirical { seeds: u64, cycles: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoterCurve {
    pub lattice: String,
    /// `single`, `restricted` or `doublet`.
    pub form: String,
    pub support_size: usize,
    pub mode: VoterMode,
    /// Patterns seen with `k` ones, `k = 0..=support_size`.
    pub patterns: Vec<u64>,
    /// Of those, how many updated to 1.
    pub ones: Vec<u64>,
}

impl VoterCurve {
    fn new(lattice: &str, form: &str, support_size: usize, mode: VoterMode) -> Self {
        VoterCurve {
            lattice: lattice.to_string(),
            form: form.to_string(),
            support_size,
            mode,
            patterns: vec![0; support_size + 1],
            ones: vec![0; support_size + 1],
        }
    }

    fn tally(&mut self, k: usize, one: bool) {
        self.patterns[k] += 1;
        self.ones[k] += u64::from(one);
    }

    /// Fraction updating to 1 for each `k`; `None` where no pattern has `k` ones.
    pub fn fraction(&self) -> Vec<Option<f64>> {
        self.patterns
            .iter()
            .zip(&self.ones)
            .map(|(&n, &o)| (n > 0).then(|| o as f64 / n as f64))
            .collect()
    }

    /// Non-decreasing over the `k` that occur.
    pub fn is_monotone(&self) -> bool {
        let f: Vec<f64> = self.fraction().into_iter().flatten().collect();
        f.windows(2).all(|w| w[0] <= w[1])
    }

    /// `fraction(0) = 0` and `fraction(support_size) = 1`.
    pub fn corners_hold(&self) -> bool {
        let f = self.fraction();
        f[0] == Some(0.0) && f[self.support_size] == Some(1.0)
    }

    pub fn is_voter(&self) -> bool {
        self.is_monotone() && self.corners_hold()
    }
}

/// The two-step update at `p = 1` seen from one site, as a function of the
/// number of 1's among same-class sites within two hops.
pub fn voter_curve(spec: &LatticeSpec, mode: VoterMode) -> Result<VoterCurve> {
    if !matches!(spec.name.as_str(), "4^4" | "6^3" | "3^6") {
        return Err(Error::Unsupported {
            lattice: spec.name.clone(),
            what: "voter curve".into(),
        });
    }
    let passes: Vec<usize> = (1..spec.class_count()).collect();
    singleton_curve(spec, "single", &passes, mode)
}

/// The doublet construction on Z2M with the right half of every doublet
/// held at 0, leaving one of the four sublattices as input.
pub fn restricted_voter_curve(spec: &LatticeSpec, mode: VoterMode) -> Result<VoterCurve> {
    if spec.name != "Z2M" {
        return Err(Error::Unsupported {
            lattice: spec.name.clone(),
            what: "restricted voter curve".into(),
        });
    }
    singleton_curve(spec, "restricted", &[2, 3], mode)
}

fn central_site(g: &PeriodicGraph, class: usize) -> usize {
    let [l1, l2] = g.dims();
    g.class_sites(class)
        .iter()
        .map(|&x| x as usize)
        .min_by_key(|&x| {
            let (cx, cy, _) = g.coords(x);
            cx.abs_diff(l1 / 2) + cy.abs_diff(l2 / 2)
        })
        .expect("class is nonempty")
}

fn unblocked(bits: &[u8], g: &PeriodicGraph, x: usize) -> bool {
    g.neighbors(x).iter().all(|&y| bits[y as usize] == 0)
}

/// Support is the class-0 sites within two hops of a class-0 site `x`; the
/// classes in `passes` are updated in turn, then `x`. Other classes stay 0.
fn singleton_curve(spec: &LatticeSpec, form: &str, passes: &[usize], mode: VoterMode) -> Result<VoterCurve> {
    match mode {
        VoterMode::Exhaustive => {
            let g = PeriodicGraph::with_min_cells(spec, 8)?;
            let x = central_site(&g, 0);
            let region = g.ball(x, 2);
            let support: Vec<usize> = region.iter().copied().filter(|&y| g.class_of(y) == 0).collect();
            let by_class: Vec<Vec<usize>> = passes
                .iter()
                .map(|&k| region.iter().copied().filter(|&y| g.class_of(y) == k).collect())
                .collect();
            let mut curve = VoterCurve::new(&spec.name, form, support.len(), mode);
            let mut bits = vec![0u8; g.site_count()];
            for pattern in 0u32..1 << support.len() {
                bits.iter_mut().for_each(|b| *b = 0);
                for (i, &y) in support.iter().enumerate() {
                    bits[y] = (pattern >> i & 1) as u8;
                }
                let legal = support
                    .iter()
                    .all(|&y| bits[y] == 0 || unblocked(&bits, &g, y));
                if !legal {
                    continue;
                }
                for sites in &by_class {
                    for &y in sites {
                        bits[y] = u8::from(unblocked(&bits, &g, y));
                    }
                }
                curve.tally(pattern.count_ones() as usize, unblocked(&bits, &g, x));
            }
            Ok(curve)
        }
        VoterMode::Empirical { seeds, cycles } => {
            let g = Arc::new(PeriodicGraph::with_min_cells(spec, 24)?);
            let supports: Vec<(usize, Vec<usize>)> = g
                .class_sites(0)
                .iter()
                .map(|&x| {
                    let x = x as usize;
                    let s = g.ball(x, 2).into_iter().filter(|&y| g.class_of(y) == 0).collect();
                    (x, s)
                })
                .collect();
            let size = supports[0].1.len();
            let mut curve = VoterCurve::new(&spec.name, form, size, mode);
            let p1 = Pressure::Uniform(1.0);
            let always = |_: usize| 0.0;
            for seed in 0..seeds {
                let mut c = Configuration::bernoulli(g.clone(), 0.5, seed);
                class_pass(&mut c, 0, &p1, &always, Execution::Sequential);
                for _ in 0..cycles {
                    let ks: Vec<usize> = supports
                        .iter()
                        .map(|(_, s)| s.iter().filter(|&&y| c.get(y)).count())
                        .collect();
                    for &k in passes.iter().chain(&[0]) {
                        class_pass(&mut c, k, &p1, &always, Execution::Sequential);
                    }
                    for ((x, _), k) in supports.iter().zip(ks) {
                        curve.tally(k, c.get(*x));
                    }
                    for k in 1..g.class_count() {
                        if !passes.contains(&k) {
                            class_pass(&mut c, k, &p1, &always, Execution::Sequential);
                        }
                    }
                }
            }
            Ok(curve)
        }
    }
}

/// Z2M two-step update on horizontal doublets.
///
/// The support is the 3 x 3 array of doublets around a central one on the
/// even rows; each doublet holds at most one 1. The outcome is whether the
/// central doublet contains a 1 after the odd rows and then the doublets
/// are updated.
pub fn doublet_voter_curve(spec: &LatticeSpec, mode: VoterMode) -> Result<VoterCurve> {
    if spec.name != "Z2M" {
        return Err(Error::Unsupported {
            lattice: spec.name.clone(),
            what: "doublet voter curve".into(),
        });
    }
    let g = Arc::new(PeriodicGraph::with_min_cells(spec, 8)?);
    let site = |cx: i64, cy: i64| g.index(cx as usize, cy as usize, 0);
    // classes: 0 and 1 are the left and right halves of even-row doublets
    let odd_then_doublets = [2usize, 3, 0, 1];
    match mode {
        VoterMode::Exhaustive => {
            let [l1, l2] = g.dims();
            let (x0, y0) = ((l1 / 2) as i64 & !1, (l2 / 2) as i64 & !1);
            let doublets: Vec<(usize, usize)> = (-1..=1)
                .flat_map(|j| (-1..=1).map(move |i| (i, j)))
                .map(|(i, j)| (site(x0 + 2 * i, y0 + 2 * j), site(x0 + 2 * i + 1, y0 + 2 * j)))
                .collect();
            let patch: Vec<usize> = (-2..=3)
                .flat_map(|dx| (-2..=2).map(move |dy| (dx, dy)))
                .map(|(dx, dy)| site(x0 + dx, y0 + dy))
                .collect();
            let order: Vec<Vec<usize>> = odd_then_doublets
                .iter()
                .map(|&k| patch.iter().copied().filter(|&y| g.class_of(y) == k).collect())
                .collect();
            let center = doublets[4];
            let mut curve = VoterCurve::new(&spec.name, "doublet", 9, mode);
            let mut bits = vec![0u8; g.site_count()];
            let mut states = [0u8; 9];
            loop {
                bits.iter_mut().for_each(|b| *b = 0);
                for (&(l, r), &s) in doublets.iter().zip(&states) {
                    bits[l] = u8::from(s == 1);
                    bits[r] = u8::from(s == 2);
                }
                let legal = doublets
                    .iter()
                    .all(|&(l, r)| (bits[l] == 0 || unblocked(&bits, &g, l)) && (bits[r] == 0 || unblocked(&bits, &g, r)));
                if legal {
                    let k = states.iter().filter(|&&s| s > 0).count();
                    for sites in &order {
                        for &y in sites {
                            bits[y] = u8::from(unblocked(&bits, &g, y));
                        }
                    }
                    curve.tally(k, bits[center.0] == 1 || bits[center.1] == 1);
                }
                // next base-3 pattern
                let Some(i) = states.iter().position(|&s| s < 2) else {
                    break;
                };
                states[i] += 1;
                states[..i].iter_mut().for_each(|s| *s = 0);
            }
            Ok(curve)
        }
        VoterMode::Empirical { seeds, cycles } => {
            let g = Arc::new(PeriodicGraph::with_min_cells(spec, 24)?);
            let [l1, l2] = g.dims();
            let site = |cx: i64, cy: i64| {
                g.index(
                    cx.rem_euclid(l1 as i64) as usize,
                    cy.rem_euclid(l2 as i64) as usize,
                    0,
                )
            };
            let centers: Vec<(i64, i64)> = (0..l1 as i64)
                .step_by(2)
                .flat_map(|x| (0..l2 as i64).step_by(2).map(move |y| (x, y)))
                .collect();
            let supports: Vec<Vec<(usize, usize)>> = centers
                .iter()
                .map(|&(x0, y0)| {
                    (-1..=1)
                        .flat_map(|j| (-1..=1).map(move |i| (i, j)))
                        .map(|(i, j)| (site(x0 + 2 * i, y0 + 2 * j), site(x0 + 2 * i + 1, y0 + 2 * j)))
                        .collect()
                })
                .collect();
            let mut curve = VoterCurve::new(&spec.name, "doublet", 9, mode);
            let p1 = Pressure::Uniform(1.0);
            let always = |_: usize| 0.0;
            for seed in 0..seeds {
                let mut c = Configuration::bernoulli(g.clone(), 0.5, seed);
                for k in [0, 1] {
                    class_pass(&mut c, k, &p1, &always, Execution::Sequential);
                }
                for _ in 0..cycles {
                    let ks: Vec<usize> = supports
                        .iter()
                        .map(|s| s.iter().filter(|&&(l, r)| c.get(l) || c.get(r)).count())
                        .collect();
                    for k in odd_then_doublets {
                        class_pass(&mut c, k, &p1, &always, Execution::Sequential);
                    }
                    for (s, k) in supports.iter().zip(ks) {
                        let (l, r) = s[4];
                        curve.tally(k, c.get(l) || c.get(r));
                    }
                }
            }
            Ok(curve)
        }
    }
}
