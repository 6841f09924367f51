//! Exact counts checked against hand-built adjacency and brute force.

use std::sync::Arc;

use densepack::lattice::{catalog, lookup};
use densepack::oracle::{count_maximizers, enumerate, maximizers, Limits};
use densepack::PeriodicGraph;

/// Independent sets of a graph given as neighbor lists: (total, max size, count at max).
fn brute(adj: &[Vec<usize>]) -> (u128, usize, u128) {
    let n = adj.len();
    let masks: Vec<u32> = adj.iter().map(|ns| ns.iter().fold(0, |m, &y| m | 1 << y)).collect();
    let (mut total, mut best, mut at_best) = (0u128, 0usize, 0u128);
    for s in 0u32..1 << n {
        if (0..n).any(|x| s >> x & 1 == 1 && s & masks[x] != 0) {
            continue;
        }
        total += 1;
        let k = s.count_ones() as usize;
        if k > best {
            best = k;
            at_best = 0;
        }
        if k == best {
            at_best += 1;
        }
    }
    (total, best, at_best)
}

/// Torus `a x b` with the given neighbor offsets.
fn torus(a: usize, b: usize, offsets: &[(i64, i64)]) -> Vec<Vec<usize>> {
    let id = |x: i64, y: i64| (x.rem_euclid(a as i64) as usize) * b + y.rem_euclid(b as i64) as usize;
    (0..a * b)
        .map(|v| {
            let (x, y) = ((v / b) as i64, (v % b) as i64);
            let mut ns: Vec<usize> = offsets.iter().map(|&(dx, dy)| id(x + dx, y + dy)).collect();
            ns.sort_unstable();
            ns.dedup();
            ns
        })
        .collect()
}

const SQUARE: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const TRIANGULAR: [(i64, i64); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];
const MOORE: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

fn check(name: &str, dims: [usize; 2], offsets: &[(i64, i64)]) {
    let g = PeriodicGraph::new(lookup(name).unwrap(), dims).unwrap();
    let cells = dims[0] * dims[1];
    assert_eq!(g.site_count(), cells, "{name} should have one site per cell");
    let (total, best, at_best) = brute(&torus(dims[0], dims[1], offsets));
    let r = enumerate(&g, &Limits::default()).unwrap();
    assert_eq!(r.legal_count, total, "{name} {dims:?}");
    assert_eq!(r.max_occupancy, best, "{name} {dims:?}");
    assert_eq!(r.maximizer_count, at_best, "{name} {dims:?}");
}

#[test]
fn square_torus_matches_brute_force() {
    check("4^4", [4, 4], &SQUARE);
}

#[test]
fn triangular_torus_matches_brute_force() {
    check("3^6", [3, 3], &TRIANGULAR);
}

#[test]
fn moore_torus_matches_brute_force() {
    check("Z2M", [4, 4], &MOORE);
}

#[test]
fn three_counting_routes_agree() {
    let limits = Limits::default();
    for spec in catalog() {
        let [p1, p2] = spec.class_period;
        let g = match PeriodicGraph::new(spec, [p1, p2]) {
            Ok(g) if g.site_count() <= limits.count_cap => Arc::new(g),
            _ => continue,
        };
        let full = enumerate(&g, &limits).unwrap();
        let (max, count) = count_maximizers(&g, &limits).unwrap();
        let set = maximizers(&g, &limits).unwrap();
        assert_eq!(full.max_occupancy, max, "{}", spec.name);
        assert_eq!(full.maximizer_count, count, "{}", spec.name);
        assert_eq!(set.count, count, "{}", spec.name);
        assert_eq!(set.configurations.len() as u128, count, "{}", spec.name);
        assert!(set.configurations.iter().all(|c| c.is_legal() && c.occupied_count() == max));
    }
}

#[test]
fn laminated_counts_on_even_tori() {
    let limits = Limits::default();
    // two checkerboards on the square lattice, two sublattices on the honeycomb,
    // three on the triangular lattice
    for (name, dims, want) in [("4^4", [8, 8], 2u128), ("6^3", [4, 4], 2), ("3^6", [6, 6], 3)] {
        let g = PeriodicGraph::new(lookup(name).unwrap(), dims).unwrap();
        assert_eq!(count_maximizers(&g, &limits).unwrap().1, want, "{name}");
    }
}
