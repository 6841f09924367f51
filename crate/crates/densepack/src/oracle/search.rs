//! Branch-and-bound for maximum independent sets with tie collection.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use super::mask::Mask;
use crate::lattice::PeriodicGraph;
use crate::par;

pub(crate) const W: usize = 4;
pub(crate) type SiteMask = Mask<W>;

/// Available sites, chosen sites, number chosen.
type Node = (SiteMask, SiteMask, usize);

/// Works on relabelled bits: sites are ordered so that the search sweeps
/// along the longer torus direction, keeping the frontier short.
pub(crate) struct Problem {
    nbr: Vec<SiteMask>,
    /// One or two clique partitions of the free sites.
    partitions: Vec<Vec<SiteMask>>,
    /// bit -> site
    order: Vec<usize>,
    /// site -> bit
    pos: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Outcome {
    pub max: usize,
    pub count: u128,
    pub solutions: Vec<SiteMask>,
    /// Set when the node budget ran out; counts are then incomplete.
    pub aborted: bool,
}

impl Outcome {
    fn merge(mut self, other: Outcome) -> Outcome {
        let aborted = self.aborted || other.aborted;
        if other.max > self.max {
            return Outcome { aborted, ..other };
        }
        self.aborted = aborted;
        if other.max == self.max {
            self.count += other.count;
            self.solutions.extend(other.solutions);
        }
        self
    }
}

struct Ctx<'a> {
    problem: &'a Problem,
    best: &'a AtomicUsize,
    collect: bool,
    solution_cap: usize,
    nodes: AtomicU64,
    node_budget: u64,
    stop: AtomicBool,
}

impl Problem {
    /// Restrict the graph to `free` sites (all sites if `None`).
    pub fn new(g: &PeriodicGraph, free: &[usize]) -> Problem {
        let n = g.site_count();
        assert!(n <= SiteMask::CAPACITY);
        let [l1, l2] = g.dims();
        let mut order: Vec<usize> = (0..n).collect();
        if l2 > l1 {
            order.sort_by_key(|&x| {
                let (cx, cy, s) = g.coords(x);
                (cy, cx, s)
            });
        }
        let mut pos = vec![0; n];
        for (b, &x) in order.iter().enumerate() {
            pos[x] = b;
        }
        let mut nbr = vec![SiteMask::empty(); n];
        for x in 0..n {
            for &y in g.neighbors(x) {
                nbr[pos[x]].insert(pos[y as usize]);
            }
        }
        let partitions = clique_partitions(g, free)
            .iter()
            .map(|part| part.iter().map(|c| relabel(c, &pos)).collect())
            .collect();
        Problem {
            nbr,
            partitions,
            order,
            pos,
        }
    }

    pub fn clique_count(&self) -> usize {
        self.partitions[0].len()
    }

    /// Number of cliques meeting `avail` (an upper bound on what more can be
    /// placed) and the meeting clique with the fewest available sites.
    fn survey(&self, avail: &SiteMask) -> (usize, Option<SiteMask>) {
        let mut bound = usize::MAX;
        let mut pick: Option<(SiteMask, usize)> = None;
        for part in &self.partitions {
            let mut b = 0;
            for c in part {
                let k = c.and(avail).len();
                if k == 0 {
                    continue;
                }
                b += 1;
                if pick.is_none_or(|(_, best)| k < best) {
                    pick = Some((*c, k));
                }
            }
            bound = bound.min(b);
        }
        (bound, pick.map(|(c, _)| c))
    }

    /// Children of a search node: one per available site of the chosen
    /// clique, then the branch that leaves the clique empty.
    fn children(&self, node: Node, clique: SiteMask) -> impl Iterator<Item = Node> + '_ {
        let (avail, chosen, occ) = node;
        let members: Vec<usize> = clique.and(&avail).iter().collect();
        members
            .into_iter()
            .map(move |v| {
                let mut with = chosen;
                with.insert(v);
                let mut rest = avail.and_not(&self.nbr[v]);
                rest.remove(v);
                (rest, with, occ + 1)
            })
            .chain(std::iter::once((avail.and_not(&clique), chosen, occ)))
    }

    /// Maximum independent subsets of `avail`, each united with `base`.
    ///
    /// `floor` is a known achievable size (including `base`); branches whose
    /// bound falls strictly below the running best are cut, so every
    /// maximizer is still counted.
    #[allow(clippy::too_many_arguments)]
    pub fn solve(
        &self,
        avail: SiteMask,
        base: SiteMask,
        floor: usize,
        collect: bool,
        solution_cap: usize,
        node_budget: u64,
        parallel: bool,
    ) -> Outcome {
        let avail = relabel(&avail, &self.pos);
        let base = relabel(&base, &self.pos);
        let best = AtomicUsize::new(floor);
        let ctx = Ctx {
            problem: self,
            best: &best,
            collect,
            solution_cap,
            nodes: AtomicU64::new(0),
            node_budget,
            stop: AtomicBool::new(false),
        };
        // split the top of the tree into independent subtrees, in order
        let mut frontier = vec![(avail, base, base.len())];
        for _ in 0..6 {
            let mut next = Vec::new();
            for node in frontier {
                let (bound, pick) = self.survey(&node.0);
                if node.2 + bound < floor {
                    continue;
                }
                match pick {
                    None => next.push(node),
                    Some(c) => next.extend(self.children(node, c)),
                }
            }
            frontier = next;
        }
        let parts = par::map_slice(&frontier, parallel, |&node| {
            let mut out = Outcome::default();
            ctx.descend(node, &mut out);
            out
        });
        let mut total = parts.into_iter().fold(Outcome::default(), Outcome::merge);
        total.aborted = ctx.stop.load(Ordering::Relaxed);
        if total.max < floor {
            total = Outcome::default();
        }
        for s in &mut total.solutions {
            *s = relabel(s, &self.order);
        }
        total
    }

    /// Size of a maximum independent subset of `avail` plus `base`, or
    /// `floor` if nothing larger exists.
    pub fn max_only(&self, avail: SiteMask, base: SiteMask, floor: usize) -> usize {
        let mut best = floor;
        self.improve((relabel(&avail, &self.pos), base, base.len()), &mut best);
        best
    }

    fn improve(&self, node: Node, best: &mut usize) {
        let (bound, pick) = self.survey(&node.0);
        if node.2 + bound <= *best {
            return;
        }
        let Some(c) = pick else {
            *best = node.2;
            return;
        };
        for child in self.children(node, c) {
            self.improve(child, best);
        }
    }
}

impl Ctx<'_> {
    fn descend(&self, node: Node, out: &mut Outcome) {
        if self.stop.load(Ordering::Relaxed) {
            return;
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.node_budget {
            self.stop.store(true, Ordering::Relaxed);
            return;
        }
        let p = self.problem;
        let (bound, pick) = p.survey(&node.0);
        let (_, chosen, occ) = node;
        if occ + bound < self.best.load(Ordering::Relaxed) {
            return;
        }
        let Some(c) = pick else {
            self.best.fetch_max(occ, Ordering::Relaxed);
            if occ > out.max {
                out.max = occ;
                out.count = 0;
                out.solutions.clear();
            }
            if occ == out.max {
                out.count += 1;
                if self.collect && out.solutions.len() < self.solution_cap {
                    out.solutions.push(chosen);
                }
            }
            return;
        };
        for child in p.children(node, c) {
            self.descend(child, out);
        }
    }
}

/// Partitions of `free` into cliques. The first is a perfect cover by
/// largest cliques if one is found, otherwise the best of several greedy
/// passes. A second perfect cover sharing no clique with the first is added
/// when it exists.
fn clique_partitions(g: &PeriodicGraph, free: &[usize]) -> Vec<Vec<SiteMask>> {
    let cliques = all_cliques(g, free);
    let q = cliques.iter().map(|c| c.len()).max().unwrap_or(1);
    if q > 1 && free.len() % q == 0 {
        let top: Vec<&Vec<usize>> = cliques.iter().filter(|c| c.len() == q).collect();
        if let Some(cover) = exact_cover(g.site_count(), free, &top) {
            let rest: Vec<&Vec<usize>> = top
                .iter()
                .copied()
                .filter(|c| !cover.contains(c))
                .collect();
            let mut out = vec![cover];
            out.extend(exact_cover(g.site_count(), free, &rest));
            return out
                .into_iter()
                .map(|part| part.into_iter().map(|c| to_mask(c)).collect())
                .collect();
        }
    }
    let mut orders: Vec<Vec<usize>> = vec![free.to_vec(), free.iter().rev().copied().collect()];
    let mut by_class = free.to_vec();
    by_class.sort_by_key(|&x| (g.class_of(x), x));
    orders.push(by_class);
    let mut by_type = free.to_vec();
    by_type.sort_by_key(|&x| (x % g.sites_per_cell(), x));
    orders.push(by_type);
    let mut best: Option<Vec<SiteMask>> = None;
    for order in orders {
        let part = greedy_cliques(g, free, &order);
        if best.as_ref().is_none_or(|b| part.len() < b.len()) {
            best = Some(part);
        }
    }
    vec![best.unwrap_or_default()]
}

fn relabel(m: &SiteMask, map: &[usize]) -> SiteMask {
    let mut out = SiteMask::empty();
    for x in m.iter() {
        out.insert(map[x]);
    }
    out
}

fn to_mask(c: &[usize]) -> SiteMask {
    let mut m = SiteMask::empty();
    for &x in c {
        m.insert(x);
    }
    m
}

fn is_clique(g: &PeriodicGraph, pick: &[usize]) -> bool {
    pick.iter()
        .enumerate()
        .all(|(i, &a)| pick[i + 1..].iter().all(|&b| g.is_edge(a, b)))
}

/// Every clique of size >= 2 inside `free`, each listed once (ascending sites).
fn all_cliques(g: &PeriodicGraph, free: &[usize]) -> Vec<Vec<usize>> {
    let mut open = vec![false; g.site_count()];
    for &x in free {
        open[x] = true;
    }
    let mut out = Vec::new();
    for &v in free {
        let higher: Vec<usize> = g
            .neighbors(v)
            .iter()
            .map(|&y| y as usize)
            .filter(|&y| y > v && open[y])
            .collect();
        let m = higher.len().min(12);
        for bits in 1u32..(1 << m) {
            let mut pick = vec![v];
            pick.extend((0..m).filter(|i| bits >> i & 1 == 1).map(|i| higher[i]));
            if is_clique(g, &pick) {
                out.push(pick);
            }
        }
    }
    out
}

/// Cover `free` exactly with the given cliques (Algorithm X with fewest-options
/// column choice), giving up after a fixed number of nodes.
fn exact_cover<'a>(n: usize, free: &[usize], cliques: &[&'a Vec<usize>]) -> Option<Vec<&'a Vec<usize>>> {
    let mut by_site: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, c) in cliques.iter().enumerate() {
        for &x in c.iter() {
            by_site[x].push(i);
        }
    }
    let mut covered = vec![true; n];
    for &x in free {
        covered[x] = false;
    }
    let mut chosen = Vec::new();
    let mut budget = 200_000usize;
    fn rec<'a>(
        free: &[usize],
        cliques: &[&'a Vec<usize>],
        by_site: &[Vec<usize>],
        covered: &mut [bool],
        chosen: &mut Vec<usize>,
        budget: &mut usize,
    ) -> bool {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let mut pick: Option<(usize, usize)> = None;
        for &x in free {
            if covered[x] {
                continue;
            }
            let options = by_site[x]
                .iter()
                .filter(|&&i| cliques[i].iter().all(|&y| !covered[y]))
                .count();
            if pick.is_none_or(|(_, o)| options < o) {
                pick = Some((x, options));
            }
        }
        let Some((x, options)) = pick else {
            return true;
        };
        if options == 0 {
            return false;
        }
        for &i in &by_site[x] {
            if cliques[i].iter().any(|&y| covered[y]) {
                continue;
            }
            for &y in cliques[i].iter() {
                covered[y] = true;
            }
            chosen.push(i);
            if rec(free, cliques, by_site, covered, chosen, budget) {
                return true;
            }
            chosen.pop();
            for &y in cliques[i].iter() {
                covered[y] = false;
            }
        }
        false
    }
    rec(free, cliques, &by_site, &mut covered, &mut chosen, &mut budget)
        .then(|| chosen.iter().map(|&i| cliques[i]).collect())
}

fn greedy_cliques(g: &PeriodicGraph, free: &[usize], order: &[usize]) -> Vec<SiteMask> {
    let n = g.site_count();
    let mut open = vec![false; n];
    for &x in free {
        open[x] = true;
    }
    let mut out = Vec::new();
    for &v in order {
        if !open[v] {
            continue;
        }
        let cand: Vec<usize> = g
            .neighbors(v)
            .iter()
            .map(|&y| y as usize)
            .filter(|&y| open[y])
            .collect();
        let mut best: Vec<usize> = Vec::new();
        let m = cand.len().min(12);
        for bits in 0u32..(1 << m) {
            if (bits.count_ones() as usize) <= best.len() {
                continue;
            }
            let pick: Vec<usize> = (0..m).filter(|i| bits >> i & 1 == 1).map(|i| cand[i]).collect();
            if is_clique(g, &pick) {
                best = pick;
            }
        }
        let mut mask = SiteMask::empty();
        mask.insert(v);
        open[v] = false;
        for y in best {
            mask.insert(y);
            open[y] = false;
        }
        out.push(mask);
    }
    out
}
