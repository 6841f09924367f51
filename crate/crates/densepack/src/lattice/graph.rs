use std::collections::VecDeque;

use super::LatticeSpec;
use crate::{Error, Result};

/// A finite L1 x L2 torus instance of a lattice.
///
/// Site index of `(cx, cy, s)` is `(cx * L2 + cy) * S + s`. Adjacency is
/// stored in CSR form with neighbors sorted ascending.
#[derive(Clone, Debug)]
pub struct PeriodicGraph {
    spec: LatticeSpec,
    dims: [usize; 2],
    offsets: Vec<u32>,
    adjacency: Vec<u32>,
    class_of: Vec<u8>,
    class_sites: Vec<Vec<u32>>,
}

impl PeriodicGraph {
    pub fn new(spec: &LatticeSpec, dims: [usize; 2]) -> Result<Self> {
        let [l1, l2] = dims;
        let [p1, p2] = spec.class_period;
        if l1 == 0 || l2 == 0 || l1 % p1 != 0 || l2 % p2 != 0 {
            return Err(Error::IncommensurateDims {
                lattice: spec.name.clone(),
                dims,
                period: spec.class_period,
            });
        }
        let s = spec.sites_per_cell();
        let n = l1 * l2 * s;
        if n > u32::MAX as usize / 2 {
            return Err(Error::TooLarge {
                sites: n,
                cap: u32::MAX as usize / 2,
            });
        }
        let degenerate = || Error::DegenerateDims {
            lattice: spec.name.clone(),
            dims,
        };

        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        for cx in 0..l1 {
            for cy in 0..l2 {
                for e in &spec.edges {
                    let u = index3(dims, s, cx, cy, e.a);
                    let tx = (cx as i64 + e.offset[0] as i64).rem_euclid(l1 as i64) as usize;
                    let ty = (cy as i64 + e.offset[1] as i64).rem_euclid(l2 as i64) as usize;
                    let v = index3(dims, s, tx, ty, e.b);
                    if u == v {
                        return Err(degenerate());
                    }
                    lists[u].push(v as u32);
                    lists[v].push(u as u32);
                }
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut adjacency = Vec::new();
        offsets.push(0u32);
        for (x, list) in lists.iter_mut().enumerate() {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            if list.len() != before || list.len() != spec.degrees[x % s] {
                return Err(degenerate());
            }
            adjacency.extend_from_slice(list);
            offsets.push(adjacency.len() as u32);
        }

        let k = spec.class_count();
        let mut class_of = vec![0u8; n];
        let mut class_sites = vec![Vec::new(); k];
        for cx in 0..l1 {
            for cy in 0..l2 {
                for si in 0..s {
                    let x = index3(dims, s, cx, cy, si);
                    let c = spec.class_at(cx, cy, si);
                    class_of[x] = c as u8;
                    class_sites[c].push(x as u32);
                }
            }
        }

        Ok(PeriodicGraph {
            spec: spec.clone(),
            dims,
            offsets,
            adjacency,
            class_of,
            class_sites,
        })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    pub fn site_count(&self) -> usize {
        self.class_of.len()
    }

    pub fn sites_per_cell(&self) -> usize {
        self.spec.sites_per_cell()
    }

    pub fn class_count(&self) -> usize {
        self.class_sites.len()
    }

    #[inline]
    pub fn neighbors(&self, x: usize) -> &[u32] {
        &self.adjacency[self.offsets[x] as usize..self.offsets[x + 1] as usize]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.neighbors(x).len()
    }

    #[inline]
    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x] as usize
    }

    pub fn class_sites(&self, k: usize) -> &[u32] {
        &self.class_sites[k]
    }

    pub fn index(&self, cx: usize, cy: usize, s: usize) -> usize {
        index3(self.dims, self.sites_per_cell(), cx, cy, s)
    }

    /// `(cx, cy, s)` of a site index.
    pub fn coords(&self, x: usize) -> (usize, usize, usize) {
        let s = self.sites_per_cell();
        let cell = x / s;
        (cell / self.dims[1], cell % self.dims[1], x % s)
    }

    /// Site reached from `x` by moving `d` cells, wrapping on the torus.
    pub fn translate(&self, x: usize, d: [i64; 2]) -> usize {
        let (cx, cy, s) = self.coords(x);
        let tx = (cx as i64 + d[0]).rem_euclid(self.dims[0] as i64) as usize;
        let ty = (cy as i64 + d[1]).rem_euclid(self.dims[1] as i64) as usize;
        self.index(tx, ty, s)
    }

    pub fn is_edge(&self, x: usize, y: usize) -> bool {
        self.neighbors(x).binary_search(&(y as u32)).is_ok()
    }

    /// Hop distances from `x`, cut off at `radius` (farther sites get `usize::MAX`).
    pub fn hop_distances(&self, x: usize, radius: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.site_count()];
        dist[x] = 0;
        let mut queue = VecDeque::from([x]);
        while let Some(u) = queue.pop_front() {
            if dist[u] == radius {
                continue;
            }
            for &v in self.neighbors(u) {
                let v = v as usize;
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Sites at hop distance at most `radius` from `x`, ascending.
    pub fn ball(&self, x: usize, radius: usize) -> Vec<usize> {
        self.hop_distances(x, radius)
            .iter()
            .enumerate()
            .filter(|(_, &d)| d <= radius)
            .map(|(i, _)| i)
            .collect()
    }

    /// Sites at hop distance exactly two from `x`, ascending.
    pub fn second_neighbor_shell(&self, x: usize) -> Vec<usize> {
        self.hop_distances(x, 2)
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 2)
            .map(|(i, _)| i)
            .collect()
    }

    /// Degree-4 sites on two-level lattices; everything else is high.
    pub fn is_low_site(&self, x: usize) -> bool {
        self.spec.is_two_level() && self.degree(x) == 4
    }

    /// Smallest commensurate torus of at least `min_cells` cells per side.
    pub fn with_min_cells(spec: &LatticeSpec, min_cells: usize) -> Result<Self> {
        let round = |p: usize| min_cells.div_ceil(p).max(1) * p;
        PeriodicGraph::new(spec, [round(spec.class_period[0]), round(spec.class_period[1])])
    }
}

fn index3(dims: [usize; 2], s: usize, cx: usize, cy: usize, si: usize) -> usize {
    (cx * dims[1] + cy) * s + si
}
