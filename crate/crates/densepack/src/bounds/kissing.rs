use serde::{Deserialize, Serialize};

use crate::lattice::{LatticeSpec, PeriodicGraph};
use crate::oracle::{self, default_sizes, Limits};
use crate::{Error, Rational, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KissingStats {
    pub lattice: String,
    /// Vertex degree.
    pub d: usize,
    /// For each neighbor `y` of `x`, the most 1's `y` can see in the second shell.
    pub n_y_max: Vec<usize>,
    /// Largest total `sum_y n_y` over legal shell configurations.
    pub shell_max: usize,
    /// Most 1's that fit in the second shell.
    pub kissing_number: usize,
    pub n: Rational,
    pub rho_bar: Rational,
}

/// Second-shell statistics and the resulting density bound
/// `1 / (1 + d / (n + 1))`.
///
/// On lattices with several site types the largest bound is reported.
pub fn kissing_stats(g: &PeriodicGraph) -> Result<KissingStats> {
    let spec = g.spec();
    if !spec.is_uniform_degree() {
        return Err(Error::NonUniformDegree(spec.name.clone()));
    }
    // room for a radius-two ball without wrap-around
    let big = PeriodicGraph::with_min_cells(spec, 6)?;
    let [l1, l2] = big.dims();
    let mut best: Option<KissingStats> = None;
    for s in 0..big.sites_per_cell() {
        let x = big.index(l1 / 2, l2 / 2, s);
        let stats = shell_stats(&big, x);
        if best.as_ref().is_none_or(|b| stats.rho_bar > b.rho_bar) {
            best = Some(stats);
        }
    }
    Ok(best.expect("lattice has sites"))
}

fn shell_stats(g: &PeriodicGraph, x: usize) -> KissingStats {
    let nx: Vec<usize> = g.neighbors(x).iter().map(|&y| y as usize).collect();
    let shell = g.second_neighbor_shell(x);
    let adj: Vec<u64> = shell
        .iter()
        .map(|&a| {
            shell
                .iter()
                .enumerate()
                .filter(|&(_, &b)| g.is_edge(a, b))
                .fold(0u64, |m, (j, _)| m | 1 << j)
        })
        .collect();
    let weight: Vec<usize> = shell
        .iter()
        .map(|&z| nx.iter().filter(|&&y| g.is_edge(y, z)).count())
        .collect();
    let all = if shell.len() == 64 { u64::MAX } else { (1u64 << shell.len()) - 1 };
    let shell_max = max_weight_independent(&adj, &weight, all);
    let ones = vec![1; shell.len()];
    let kissing_number = max_weight_independent(&adj, &ones, all);
    let n_y_max = nx
        .iter()
        .map(|&y| {
            let near = shell
                .iter()
                .enumerate()
                .filter(|&(_, &z)| g.is_edge(y, z))
                .fold(0u64, |m, (j, _)| m | 1 << j);
            max_weight_independent(&adj, &ones, near)
        })
        .collect();
    let d = nx.len() as i64;
    let n = Rational::new(shell_max as i64, d);
    let rho_bar = Rational::from_integer(1) / (Rational::from_integer(1) + Rational::from_integer(d) / (n + 1));
    KissingStats {
        lattice: g.name().to_string(),
        d: nx.len(),
        n_y_max,
        shell_max,
        kissing_number,
        n,
        rho_bar,
    }
}

/// Exhaustive maximum-weight independent subset of `avail` (bit masks over at
/// most 64 vertices).
fn max_weight_independent(adj: &[u64], weight: &[usize], avail: u64) -> usize {
    if avail == 0 {
        return 0;
    }
    let v = avail.trailing_zeros() as usize;
    let rest = avail & !(1 << v);
    let with = weight[v] + max_weight_independent(adj, weight, rest & !adj[v]);
    let without = max_weight_independent(adj, weight, rest);
    with.max(without)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tightness {
    pub lattice: String,
    pub dims: [usize; 2],
    pub rho_bar: Rational,
    pub max_density: Rational,
    pub tight: bool,
}

/// Torus used for the tightness comparison: the first size of the growth
/// family with at least 36 sites.
pub fn tightness_torus(spec: &LatticeSpec, limits: &Limits) -> Result<PeriodicGraph> {
    let sizes = default_sizes(spec, limits.search_cap);
    let mut last = None;
    for dims in sizes {
        let Ok(g) = PeriodicGraph::new(spec, dims) else {
            continue;
        };
        if g.site_count() >= 36 {
            return Ok(g);
        }
        last = Some(g);
    }
    last.ok_or_else(|| Error::Unsupported {
        lattice: spec.name.clone(),
        what: "torus within the search cap".into(),
    })
}

/// Whether the second-shell bound equals the exact densest packing density.
pub fn bound_tightness(spec: &LatticeSpec, limits: &Limits) -> Result<Tightness> {
    let g = tightness_torus(spec, limits)?;
    let stats = kissing_stats(&g)?;
    let max = oracle::max_occupancy(&g, limits)?;
    let max_density = Rational::new(max as i64, g.site_count() as i64);
    Ok(Tightness {
        lattice: spec.name.clone(),
        dims: g.dims(),
        rho_bar: stats.rho_bar,
        max_density,
        tight: stats.rho_bar == max_density,
    })
}
