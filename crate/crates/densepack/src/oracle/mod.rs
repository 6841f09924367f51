//! Exact enumeration on small tori: legal counts, densest packings, local
//! moves between them and the growth of their number with system size.

mod growth;
mod mask;
mod moves;
mod search;

pub use growth::{classify, default_sizes, growth_fit, GrowthFit, GrowthPoint};
pub use mask::Mask;
pub use moves::{
    find_local_moves, flip_connectivity, hexagon_flip, hexagons, FlipConnectivity, LocalMove,
    MoveKind, MoveSummary,
};

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::lattice::PeriodicGraph;
use crate::pca::Execution;
use crate::{par, Error, Rational, Result};

use search::{Problem, SiteMask};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest torus for the full legal-configuration count.
    pub count_cap: usize,
    /// Largest torus for the densest-packing search.
    pub search_cap: usize,
    /// Most configurations kept when listing maximizers.
    pub solution_cap: usize,
    /// Most search nodes visited before a count is abandoned.
    pub node_budget: u64,
    pub execution: Execution,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            count_cap: 36,
            search_cap: 256,
            solution_cap: 2_000_000,
            node_budget: 50_000_000,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationResult {
    pub lattice: String,
    pub dims: [usize; 2],
    pub site_count: usize,
    pub legal_count: u128,
    pub max_occupancy: usize,
    pub maximizer_count: u128,
    pub max_density: Rational,
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    legal: u128,
    max: usize,
    at_max: u128,
}

impl Tally {
    fn leaf(&mut self, occ: usize) {
        self.legal += 1;
        if occ > self.max {
            self.max = occ;
            self.at_max = 0;
        }
        if occ == self.max {
            self.at_max += 1;
        }
    }

    fn merge(self, o: Tally) -> Tally {
        let (max, at_max) = match self.max.cmp(&o.max) {
            std::cmp::Ordering::Greater => (self.max, self.at_max),
            std::cmp::Ordering::Less => (o.max, o.at_max),
            std::cmp::Ordering::Equal => (self.max, self.at_max + o.at_max),
        };
        Tally {
            legal: self.legal + o.legal,
            max,
            at_max,
        }
    }
}

fn count_dfs(avail: u64, nbr: &[u64], occ: usize, t: &mut Tally) {
    if avail == 0 {
        t.leaf(occ);
        return;
    }
    let v = avail.trailing_zeros() as usize;
    let rest = avail & !(1u64 << v);
    count_dfs(rest & !nbr[v], nbr, occ + 1, t);
    count_dfs(rest, nbr, occ, t);
}

/// Count every legal configuration and the densest ones by depth-first search.
pub fn enumerate(g: &PeriodicGraph, limits: &Limits) -> Result<EnumerationResult> {
    let n = g.site_count();
    let cap = limits.count_cap.min(64);
    if n > cap {
        return Err(Error::TooLarge { sites: n, cap });
    }
    let nbr: Vec<u64> = (0..n)
        .map(|x| g.neighbors(x).iter().fold(0u64, |m, &y| m | 1 << y))
        .collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    let mut frontier = vec![(full, 0usize)];
    for _ in 0..12 {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for (a, occ) in frontier {
            if a == 0 {
                next.push((a, occ));
                continue;
            }
            let v = a.trailing_zeros() as usize;
            let rest = a & !(1u64 << v);
            next.push((rest & !nbr[v], occ + 1));
            next.push((rest, occ));
        }
        frontier = next;
    }
    let parts = par::map_slice(&frontier, limits.execution.is_parallel(), |&(a, occ)| {
        let mut t = Tally::default();
        count_dfs(a, &nbr, occ, &mut t);
        t
    });
    let t = parts.into_iter().fold(Tally::default(), Tally::merge);
    Ok(EnumerationResult {
        lattice: g.name().to_string(),
        dims: g.dims(),
        site_count: n,
        legal_count: t.legal,
        max_occupancy: t.max,
        maximizer_count: t.at_max,
        max_density: Rational::new(t.max as i64, n as i64),
    })
}

/// Brute force over all `2^N` bit patterns; only for `N <= 20`.
pub fn rejection_count(g: &PeriodicGraph) -> Result<EnumerationResult> {
    let n = g.site_count();
    if n > 20 {
        return Err(Error::TooLarge { sites: n, cap: 20 });
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| g.neighbors(x).iter().map(move |&y| (x, y as usize)))
        .filter(|&(x, y)| x < y)
        .collect();
    let mut t = Tally::default();
    for bits in 0u32..(1u32 << n) {
        if edges.iter().all(|&(x, y)| bits >> x & 1 == 0 || bits >> y & 1 == 0) {
            t.leaf(bits.count_ones() as usize);
        }
    }
    Ok(EnumerationResult {
        lattice: g.name().to_string(),
        dims: g.dims(),
        site_count: n,
        legal_count: t.legal,
        max_occupancy: t.max,
        maximizer_count: t.at_max,
        max_density: Rational::new(t.max as i64, n as i64),
    })
}

#[derive(Clone, Debug)]
pub struct MaximizerSet {
    pub max_occupancy: usize,
    pub count: u128,
    /// Sorted by bit pattern; empty when only counting.
    pub configurations: Vec<Configuration>,
}

impl MaximizerSet {
    /// Number of orbits under torus translations (cell shifts).
    pub fn translation_classes(&self) -> usize {
        let Some(first) = self.configurations.first() else {
            return 0;
        };
        let g = first.graph();
        let [l1, l2] = g.dims();
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        for c in &self.configurations {
            let canon = (0..l1 as i64)
                .flat_map(|dx| (0..l2 as i64).map(move |dy| [dx, dy]))
                .map(|d| {
                    let mut b = vec![0u8; g.site_count()];
                    for x in c.occupied_sites() {
                        b[g.translate(x, d)] = 1;
                    }
                    b
                })
                .min()
                .unwrap();
            seen.insert(canon);
        }
        seen.len()
    }
}

fn check_search_size(g: &PeriodicGraph, limits: &Limits) -> Result<()> {
    let cap = limits.search_cap.min(SiteMask::CAPACITY);
    if g.site_count() > cap {
        return Err(Error::TooLarge {
            sites: g.site_count(),
            cap,
        });
    }
    Ok(())
}

/// Largest class size: an achievable occupancy to seed the search with.
fn class_floor(g: &PeriodicGraph) -> usize {
    (0..g.class_count())
        .map(|k| g.class_sites(k).len())
        .max()
        .unwrap_or(0)
}

fn to_configs(graph: &Arc<PeriodicGraph>, sols: Vec<SiteMask>) -> Vec<Configuration> {
    let n = graph.site_count();
    let mut out: Vec<Configuration> = sols
        .into_iter()
        .map(|m| {
            let mut bits = vec![0u8; n];
            for x in m.iter() {
                bits[x] = 1;
            }
            Configuration::from_bits(graph.clone(), bits).expect("sized bits")
        })
        .collect();
    out.sort_by(|a, b| b.bits().cmp(a.bits()));
    out
}

/// All densest packings of the torus.
pub fn maximizers(graph: &Arc<PeriodicGraph>, limits: &Limits) -> Result<MaximizerSet> {
    check_search_size(graph, limits)?;
    let all: Vec<usize> = (0..graph.site_count()).collect();
    let problem = Problem::new(graph, &all);
    let out = problem.solve(
        SiteMask::full(graph.site_count()),
        SiteMask::empty(),
        class_floor(graph),
        true,
        limits.solution_cap,
        limits.node_budget,
        limits.execution.is_parallel(),
    );
    if out.aborted {
        return Err(Error::BudgetExhausted(limits.node_budget));
    }
    if out.count as usize > out.solutions.len() {
        return Err(Error::TooLarge {
            sites: out.count as usize,
            cap: limits.solution_cap,
        });
    }
    Ok(MaximizerSet {
        max_occupancy: out.max,
        count: out.count,
        configurations: to_configs(graph, out.solutions),
    })
}

/// Densest occupancy and the number of densest packings, without listing them.
pub fn count_maximizers(graph: &PeriodicGraph, limits: &Limits) -> Result<(usize, u128)> {
    check_search_size(graph, limits)?;
    let all: Vec<usize> = (0..graph.site_count()).collect();
    let problem = Problem::new(graph, &all);
    let out = problem.solve(
        SiteMask::full(graph.site_count()),
        SiteMask::empty(),
        class_floor(graph),
        false,
        0,
        limits.node_budget,
        limits.execution.is_parallel(),
    );
    if out.aborted {
        return Err(Error::BudgetExhausted(limits.node_budget));
    }
    Ok((out.max, out.count))
}

/// Densest occupancy only; faster than counting when ties are many.
pub fn max_occupancy(graph: &PeriodicGraph, limits: &Limits) -> Result<usize> {
    check_search_size(graph, limits)?;
    let all: Vec<usize> = (0..graph.site_count()).collect();
    let problem = Problem::new(graph, &all);
    Ok(problem.max_only(SiteMask::full(graph.site_count()), SiteMask::empty(), class_floor(graph)))
}

/// Densest completions of `base` when only the `free` sites may change.
pub fn maximizers_within(
    base: &Configuration,
    free: &[usize],
    limits: &Limits,
) -> Result<MaximizerSet> {
    let graph = base.graph_arc().clone();
    check_search_size(&graph, limits)?;
    let mut frozen = SiteMask::empty();
    let mut blocked = SiteMask::empty();
    let is_free: HashSet<usize> = free.iter().copied().collect();
    for x in base.occupied_sites() {
        if !is_free.contains(&x) {
            frozen.insert(x);
            for &y in graph.neighbors(x) {
                blocked.insert(y as usize);
            }
        }
    }
    let mut avail = SiteMask::empty();
    for &x in free {
        avail.insert(x);
    }
    let avail = avail.and_not(&blocked);
    let problem = Problem::new(&graph, free);
    let out = problem.solve(
        avail,
        frozen,
        frozen.len(),
        true,
        limits.solution_cap,
        limits.node_budget,
        limits.execution.is_parallel(),
    );
    if out.aborted {
        return Err(Error::BudgetExhausted(limits.node_budget));
    }
    Ok(MaximizerSet {
        max_occupancy: out.max,
        count: out.count,
        configurations: to_configs(&graph, out.solutions),
    })
}

/// Number of cliques in the bounding partition, for diagnostics.
pub fn clique_bound(graph: &PeriodicGraph) -> usize {
    let all: Vec<usize> = (0..graph.site_count()).collect();
    Problem::new(graph, &all).clique_count()
}
