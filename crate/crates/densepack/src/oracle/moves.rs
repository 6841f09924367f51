use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::lattice::PeriodicGraph;
use crate::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    /// One particle hops to an empty site within two steps.
    Exchange,
    /// Registered composite move (kagome hexagon rotation).
    Flip,
    /// A whole row or column of cells shifts by one cell.
    Slide,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalMove {
    pub kind: MoveKind,
    pub removed: Vec<usize>,
    pub added: Vec<usize>,
}

impl LocalMove {
    pub fn apply(&self, c: &Configuration) -> Configuration {
        let mut out = c.clone();
        for &x in &self.removed {
            out.set(x, false);
        }
        for &x in &self.added {
            out.set(x, true);
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveSummary {
    pub exchanges: usize,
    pub flips: usize,
    pub slides: usize,
}

impl MoveSummary {
    pub fn of(moves: &[LocalMove]) -> Self {
        let mut s = MoveSummary::default();
        for m in moves {
            match m.kind {
                MoveKind::Exchange => s.exchanges += 1,
                MoveKind::Flip => s.flips += 1,
                MoveKind::Slide => s.slides += 1,
            }
        }
        s
    }

    /// Moves that are local in both directions.
    pub fn local(&self) -> usize {
        self.exchanges + self.flips
    }
}

fn require_densest(c: &Configuration) -> Result<()> {
    if !c.is_legal() {
        return Err(Error::Illegal);
    }
    let d = Rational::new(c.occupied_count() as i64, c.graph().site_count() as i64);
    if d != c.graph().spec().table.density {
        return Err(Error::NotMaximal);
    }
    Ok(())
}

/// Hexagon rings of the torus as site lists in cyclic order.
pub fn hexagons(g: &PeriodicGraph) -> Vec<Vec<usize>> {
    let spec = g.spec();
    let [l1, l2] = g.dims();
    let mut out = Vec::new();
    for cx in 0..l1 {
        for cy in 0..l2 {
            for ring in &spec.flips {
                let base = g.index(cx, cy, 0);
                out.push(
                    ring.iter()
                        .map(|&(s, o)| {
                            let x = base - base % g.sites_per_cell() + s;
                            g.translate(x, [o[0] as i64, o[1] as i64])
                        })
                        .collect(),
                );
            }
        }
    }
    out
}

fn flip_on_ring(c: &Configuration, ring: &[usize]) -> Option<LocalMove> {
    let n = ring.len();
    let occ: Vec<bool> = ring.iter().map(|&x| c.get(x)).collect();
    for parity in 0..2 {
        let on = (0..n).all(|i| occ[i] == (i % 2 == parity));
        if on {
            let removed: Vec<usize> = (0..n).filter(|i| i % 2 == parity).map(|i| ring[i]).collect();
            let added: Vec<usize> = (0..n).filter(|i| i % 2 != parity).map(|i| ring[i]).collect();
            let m = LocalMove {
                kind: MoveKind::Flip,
                removed,
                added,
            };
            return m.apply(c).is_legal().then_some(m);
        }
    }
    None
}

/// Rotate hexagon `id`; fails unless it carries an alternating triple.
pub fn hexagon_flip(c: &Configuration, id: usize) -> Result<Configuration> {
    require_densest(c)?;
    let hexes = hexagons(c.graph());
    let ring = hexes.get(id).ok_or(Error::NotFlippable(id))?;
    flip_on_ring(c, ring)
        .map(|m| m.apply(c))
        .ok_or(Error::NotFlippable(id))
}

/// All legality- and occupancy-preserving moves out of a densest packing.
pub fn find_local_moves(c: &Configuration) -> Result<Vec<LocalMove>> {
    require_densest(c)?;
    let g = c.graph();
    let mut out = Vec::new();

    for x in c.occupied_sites() {
        let dist = g.hop_distances(x, 2);
        for (y, &d) in dist.iter().enumerate() {
            if d == 0 || d > 2 || c.get(y) {
                continue;
            }
            let free = g
                .neighbors(y)
                .iter()
                .all(|&z| z as usize == x || !c.get(z as usize));
            if free {
                out.push(LocalMove {
                    kind: MoveKind::Exchange,
                    removed: vec![x],
                    added: vec![y],
                });
            }
        }
    }

    for ring in hexagons(g) {
        if let Some(m) = flip_on_ring(c, &ring) {
            out.push(m);
        }
    }

    let [l1, l2] = g.dims();
    let s = g.sites_per_cell();
    let mut slide = |cells: Vec<(usize, usize)>, d: [i64; 2]| {
        let sites: Vec<usize> = cells
            .iter()
            .flat_map(|&(cx, cy)| (0..s).map(move |k| (cx, cy, k)))
            .map(|(cx, cy, k)| g.index(cx, cy, k))
            .filter(|&x| c.get(x))
            .collect();
        let moved: Vec<usize> = sites.iter().map(|&x| g.translate(x, d)).collect();
        let mut removed = sites.clone();
        removed.sort_unstable();
        let mut added = moved;
        added.sort_unstable();
        if removed == added || removed.is_empty() {
            return;
        }
        let m = LocalMove {
            kind: MoveKind::Slide,
            removed,
            added,
        };
        if m.apply(c).is_legal() {
            out.push(m);
        }
    };
    for cy in 0..l2 {
        for d in [1, -1] {
            slide((0..l1).map(|cx| (cx, cy)).collect(), [d, 0]);
        }
    }
    for cx in 0..l1 {
        for d in [1, -1] {
            slide((0..l2).map(|cy| (cx, cy)).collect(), [0, d]);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlipConnectivity {
    pub states: usize,
    pub components: usize,
    pub component_sizes: Vec<usize>,
    /// Whether every sector (same count of occupied sites per site type) lies
    /// in one component.
    pub sectors_connected: bool,
    pub sectors: usize,
    pub connected: bool,
}

/// Components of the hexagon-flip graph on a set of densest packings.
pub fn flip_connectivity(states: &[Configuration]) -> Result<FlipConnectivity> {
    let Some(first) = states.first() else {
        return Ok(FlipConnectivity {
            states: 0,
            components: 0,
            component_sizes: Vec::new(),
            sectors_connected: true,
            sectors: 0,
            connected: true,
        });
    };
    let g = first.graph();
    if g.spec().flips.is_empty() {
        return Err(Error::Unsupported {
            lattice: g.name().to_string(),
            what: "hexagon flips".into(),
        });
    }
    let rings = hexagons(g);
    let index: HashMap<&[u8], usize> = states
        .iter()
        .enumerate()
        .map(|(i, c)| (c.bits(), i))
        .collect();
    let mut comp = vec![usize::MAX; states.len()];
    let mut sizes = Vec::new();
    for start in 0..states.len() {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut size = 0;
        comp[start] = id;
        let mut q = VecDeque::from([start]);
        while let Some(i) = q.pop_front() {
            size += 1;
            for ring in &rings {
                if let Some(m) = flip_on_ring(&states[i], ring) {
                    let next = m.apply(&states[i]);
                    if let Some(&j) = index.get(next.bits()) {
                        if comp[j] == usize::MAX {
                            comp[j] = id;
                            q.push_back(j);
                        }
                    }
                }
            }
        }
        sizes.push(size);
    }

    let s = g.sites_per_cell();
    let mut sector_comp: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut sectors_connected = true;
    for (i, c) in states.iter().enumerate() {
        let mut key = vec![0usize; s];
        for x in c.occupied_sites() {
            key[x % s] += 1;
        }
        match sector_comp.get(&key) {
            Some(&k) if k != comp[i] => sectors_connected = false,
            Some(_) => {}
            None => {
                sector_comp.insert(key, comp[i]);
            }
        }
    }
    Ok(FlipConnectivity {
        states: states.len(),
        components: sizes.len(),
        connected: sizes.len() == 1,
        component_sizes: sizes,
        sectors_connected,
        sectors: sector_comp.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::lookup;
    use std::sync::Arc;

    fn graph(name: &str, dims: [usize; 2]) -> Arc<PeriodicGraph> {
        Arc::new(PeriodicGraph::new(lookup(name).unwrap(), dims).unwrap())
    }

    #[test]
    fn square_packing_is_rigid() {
        let c = Configuration::optimal_packing(graph("4^4", [6, 6]), 0).unwrap();
        let moves = find_local_moves(&c).unwrap();
        assert!(moves.is_empty(), "{moves:?}");
    }

    #[test]
    fn kagome_symmetric_packing_has_flips() {
        let c = Configuration::optimal_packing(graph("kagome", [6, 6]), 0).unwrap();
        let moves = find_local_moves(&c).unwrap();
        let s = MoveSummary::of(&moves);
        assert!(s.flips > 0);
        let m = moves.iter().find(|m| m.kind == MoveKind::Flip).unwrap();
        let next = m.apply(&c);
        assert!(next.is_legal());
        assert_eq!(next.occupied_count(), c.occupied_count());
    }

    #[test]
    fn non_densest_rejected() {
        let g = graph("4^4", [4, 4]);
        let mut c = Configuration::optimal_packing(g, 0).unwrap();
        let x = c.occupied_sites()[0];
        c.set(x, false);
        assert!(matches!(find_local_moves(&c), Err(Error::NotMaximal)));
    }

    #[test]
    fn flip_needs_alternating_ring() {
        let g = graph("kagome", [3, 3]);
        let c = Configuration::optimal_packing(g.clone(), 0).unwrap();
        let hexes = hexagons(&g);
        let bad = (0..hexes.len()).find(|&i| hexagon_flip(&c, i).is_err());
        let good = (0..hexes.len()).find(|&i| hexagon_flip(&c, i).is_ok());
        assert!(bad.is_some() && good.is_some());
        assert!(matches!(hexagon_flip(&c, bad.unwrap()), Err(Error::NotFlippable(_))));
    }
}
