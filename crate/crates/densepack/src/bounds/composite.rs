use serde::{Deserialize, Serialize};

use crate::lattice::{LatticeSpec, PeriodicGraph};
use crate::rng::Stream;
use crate::{par, Error, Result};

/// Lower bound on the probability that a high-degree site updates to 1 in
/// the two-step map when its high-degree neighbors are blocked:
/// `p_high (1 - p4)^m`, `m` the number of degree-4 neighbors.
pub fn composite_update_bound(spec: &LatticeSpec, p4: f64, p_high: f64) -> Result<f64> {
    if !spec.is_two_level() {
        return Err(Error::Unsupported {
            lattice: spec.name.clone(),
            what: "two-level update bound".into(),
        });
    }
    for p in [p4, p_high] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::PressureOutOfRange(p));
        }
    }
    let g = PeriodicGraph::with_min_cells(spec, 4)?;
    let x = high_site(&g);
    let m = g.neighbors(x).iter().filter(|&&y| g.degree(y as usize) == 4).count();
    Ok(p_high * (1.0 - p4).powi(m as i32))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositeEstimate {
    pub lattice: String,
    pub p4: f64,
    pub p_high: f64,
    pub bound: f64,
    /// Patterns on the support that block every high-degree neighbor.
    pub patterns: usize,
    pub trials_per_pattern: u64,
    /// Frequency of update 1 pooled over all blocking patterns.
    pub frequency: f64,
    /// Smallest per-pattern frequency.
    pub min_frequency: f64,
}

fn high_site(g: &PeriodicGraph) -> usize {
    g.class_sites(0)[0] as usize
}

/// Monte Carlo companion to [`composite_update_bound`].
///
/// The support is the set of class-0 sites within two hops of a class-0 site
/// `x`. Every support pattern in which each high-degree neighbor of `x` has
/// an occupied support neighbor is run `trials` times through the remaining
/// class passes and then `x`, with everything outside two hops held at 0.
pub fn composite_estimate(
    spec: &LatticeSpec,
    p4: f64,
    p_high: f64,
    trials: u64,
    seed: u64,
) -> Result<CompositeEstimate> {
    let bound = composite_update_bound(spec, p4, p_high)?;
    let g = PeriodicGraph::with_min_cells(spec, 6)?;
    let [l1, l2] = g.dims();
    let x = g
        .class_sites(0)
        .iter()
        .map(|&y| y as usize)
        .min_by_key(|&y| {
            let (cx, cy, _) = g.coords(y);
            cx.abs_diff(l1 / 2) + cy.abs_diff(l2 / 2)
        })
        .expect("class 0 nonempty");
    let region = g.ball(x, 2);
    let support: Vec<usize> = region.iter().copied().filter(|&y| g.class_of(y) == 0).collect();
    let passes: Vec<Vec<usize>> = (1..g.class_count())
        .map(|k| region.iter().copied().filter(|&y| g.class_of(y) == k).collect())
        .collect();
    let high_nbrs: Vec<usize> = g
        .neighbors(x)
        .iter()
        .map(|&y| y as usize)
        .filter(|&y| g.degree(y) != 4)
        .collect();

    let blocking: Vec<u32> = (0u32..1 << support.len())
        .filter(|&pat| {
            high_nbrs.iter().all(|&y| {
                support
                    .iter()
                    .enumerate()
                    .any(|(i, &z)| pat >> i & 1 == 1 && g.is_edge(y, z))
            })
        })
        .collect();

    let p_at = |y: usize| if g.degree(y) == 4 { p4 } else { p_high };
    let counts = par::map_slice(&blocking, par::available(), |&pat| {
        let mut rng = Stream::new(seed, pat as u64);
        let mut bits = vec![0u8; g.site_count()];
        let mut hits = 0u64;
        for _ in 0..trials {
            bits.iter_mut().for_each(|b| *b = 0);
            for (i, &z) in support.iter().enumerate() {
                bits[z] = (pat >> i & 1) as u8;
            }
            for sites in &passes {
                for &y in sites {
                    let free = g.neighbors(y).iter().all(|&z| bits[z as usize] == 0);
                    bits[y] = u8::from(free && rng.uniform() < p_at(y));
                }
            }
            let free = g.neighbors(x).iter().all(|&z| bits[z as usize] == 0);
            hits += u64::from(free && rng.uniform() < p_high);
        }
        hits
    });
    let total: u64 = counts.iter().sum();
    let min = counts.iter().copied().min().unwrap_or(0);
    let t = trials.max(1) as f64;
    Ok(CompositeEstimate {
        lattice: spec.name.clone(),
        p4,
        p_high,
        bound,
        patterns: blocking.len(),
        trials_per_pattern: trials,
        frequency: total as f64 / (t * blocking.len().max(1) as f64),
        min_frequency: min as f64 / t,
    })
}
