use serde::Serialize;

use super::{LatticeSpec, PeriodicGraph};
use crate::Rational;

const TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub lattice: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }
}

/// Structural and geometric checks of a lattice description.
pub fn validate_spec(spec: &LatticeSpec) -> ValidationReport {
    let mut rep = ValidationReport {
        lattice: spec.name.clone(),
        checks: Vec::new(),
    };
    let s = spec.sites_per_cell();
    let [a1, a2] = spec.basis;
    let det = a1[0] * a2[1] - a1[1] * a2[0];
    rep.push("basis", det.abs() > TOL, format!("det = {det:.6}"));

    let shape_ok = s > 0
        && spec.degrees.len() == s
        && spec.edges.iter().all(|e| e.a < s && e.b < s)
        && spec.class_period[0] > 0
        && spec.class_period[1] > 0
        && spec.class_of.len() == spec.class_period[0] * spec.class_period[1] * s;
    rep.push("shape", shape_ok, format!("{s} sites, {} edges", spec.edges.len()));
    if !shape_ok || det.abs() <= TOL {
        return rep;
    }

    let mut bad_lengths = Vec::new();
    for (i, e) in spec.edges.iter().enumerate() {
        let d = distance(spec, e.a, e.b, e.offset);
        if (d - e.length).abs() > TOL {
            bad_lengths.push(format!("edge {i}: {d:.6} != {:.6}", e.length));
        }
    }
    rep.push("edge lengths", bad_lengths.is_empty(), bad_lengths.join("; "));

    let mut deg = vec![0usize; s];
    for e in &spec.edges {
        deg[e.a] += 1;
        deg[e.b] += 1;
    }
    rep.push(
        "degrees",
        deg == spec.degrees,
        format!("computed {deg:?}, declared {:?}", spec.degrees),
    );

    let lengths_uniform = spec
        .edges
        .windows(2)
        .all(|w| (w[0].length - w[1].length).abs() < TOL);
    if lengths_uniform && !spec.edges.is_empty() {
        let unit = spec.edges[0].length;
        let mut found = 0usize;
        let mut too_close = 0usize;
        for a in 0..s {
            for b in 0..s {
                for dx in -3..=3 {
                    for dy in -3..=3 {
                        if a == b && dx == 0 && dy == 0 {
                            continue;
                        }
                        let d = distance(spec, a, b, [dx, dy]);
                        if (d - unit).abs() < TOL {
                            found += 1;
                        } else if d < unit {
                            too_close += 1;
                        }
                    }
                }
            }
        }
        rep.push(
            "unit-distance pairs are edges",
            found == 2 * spec.edges.len() && too_close == 0,
            format!(
                "{found} directed unit pairs, {} declared, {too_close} closer",
                2 * spec.edges.len()
            ),
        );
    }

    if let Some(expected) = vertex_configuration_of(&spec.name) {
        let got = vertex_configurations(spec);
        let ok = got.iter().all(|c| same_cyclic(c, &expected));
        rep.push(
            "vertex configuration",
            ok,
            format!("faces around sites {got:?}"),
        );
    }

    let dims = [
        spec.class_period[0] * 6usize.div_ceil(spec.class_period[0]),
        spec.class_period[1] * 6usize.div_ceil(spec.class_period[1]),
    ];
    match PeriodicGraph::new(spec, dims) {
        Err(e) => rep.push("torus", false, e.to_string()),
        Ok(g) => {
            let mut clash = 0;
            for x in 0..g.site_count() {
                for &y in g.neighbors(x) {
                    if g.class_of(x) == g.class_of(y as usize) {
                        clash += 1;
                    }
                }
            }
            rep.push("classes independent", clash == 0, format!("{clash} clashes"));
            let k = g.class_count();
            let sizes: Vec<usize> = (0..k).map(|c| g.class_sites(c).len()).collect();
            rep.push(
                "classes nonempty",
                sizes.iter().all(|&n| n > 0),
                format!("sizes {sizes:?}"),
            );
            let opt_ok = !spec.optimal.is_empty()
                && spec.optimal.iter().all(|&c| {
                    c < k
                        && Rational::new(sizes[c] as i64, g.site_count() as i64)
                            == spec.table.density
                });
            rep.push(
                "optimal classes reach table density",
                opt_ok,
                format!("optimal {:?}", spec.optimal),
            );
            let flips_ok = spec.flips.iter().all(|ring| {
                ring.len() >= 4 && (0..ring.len()).all(|i| {
                    let (sa, oa) = ring[i];
                    let (sb, ob) = ring[(i + 1) % ring.len()];
                    let xa = g.index(oa[0].rem_euclid(dims[0] as i32) as usize, oa[1].rem_euclid(dims[1] as i32) as usize, sa);
                    let xb = g.index(ob[0].rem_euclid(dims[0] as i32) as usize, ob[1].rem_euclid(dims[1] as i32) as usize, sb);
                    g.is_edge(xa, xb)
                })
            });
            rep.push("flip rings are cycles", flips_ok, format!("{} rings", spec.flips.len()));
        }
    }
    rep
}

fn position(spec: &LatticeSpec, s: usize, off: [i32; 2]) -> [f64; 2] {
    let f = spec.sites[s];
    spec.cartesian([f[0] + off[0] as f64, f[1] + off[1] as f64])
}

fn distance(spec: &LatticeSpec, a: usize, b: usize, off: [i32; 2]) -> f64 {
    let p = position(spec, a, [0, 0]);
    let q = position(spec, b, off);
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

/// Parse names like `3^2.4.3.4` into the face-size sequence.
fn vertex_configuration_of(name: &str) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    for part in name.split('.') {
        let (base, exp) = match part.split_once('^') {
            Some((b, e)) => (b.parse::<usize>().ok()?, e.parse::<usize>().ok()?),
            None => (part.parse::<usize>().ok()?, 1usize),
        };
        out.extend(std::iter::repeat_n(base, exp));
    }
    (out.len() >= 3).then_some(out)
}

type Node = (usize, [i32; 2]);

fn neighbors_of(spec: &LatticeSpec, (s, o): Node) -> Vec<Node> {
    let mut out = Vec::new();
    for e in &spec.edges {
        if e.a == s {
            out.push((e.b, [o[0] + e.offset[0], o[1] + e.offset[1]]));
        }
        if e.b == s {
            out.push((e.a, [o[0] - e.offset[0], o[1] - e.offset[1]]));
        }
    }
    let p = position(spec, s, o);
    out.sort_by(|u, v| {
        let pu = position(spec, u.0, u.1);
        let pv = position(spec, v.0, v.1);
        let au = (pu[1] - p[1]).atan2(pu[0] - p[0]);
        let av = (pv[1] - p[1]).atan2(pv[0] - p[0]);
        au.partial_cmp(&av).unwrap()
    });
    out
}

/// Size of the face to the left of the directed edge `u -> v`.
fn face_size(spec: &LatticeSpec, u: Node, v: Node) -> usize {
    let (start_u, start_v) = (u, v);
    let (mut u, mut v) = (u, v);
    for n in 1..=24 {
        let nb = neighbors_of(spec, v);
        let i = nb.iter().position(|&w| w == u).unwrap();
        // next clockwise from the reverse edge keeps the face on the left
        let w = nb[(i + nb.len() - 1) % nb.len()];
        u = v;
        v = w;
        if u == start_u && v == start_v {
            return n;
        }
        if u.0 == start_u.0 && v.0 == start_v.0 {
            let du = [u.1[0] - start_u.1[0], u.1[1] - start_u.1[1]];
            let dv = [v.1[0] - start_v.1[0], v.1[1] - start_v.1[1]];
            if du == dv && du != [0, 0] {
                return usize::MAX;
            }
        }
    }
    usize::MAX
}

fn vertex_configurations(spec: &LatticeSpec) -> Vec<Vec<usize>> {
    (0..spec.sites_per_cell())
        .map(|s| {
            let x = (s, [0, 0]);
            neighbors_of(spec, x)
                .into_iter()
                .map(|y| face_size(spec, x, y))
                .collect()
        })
        .collect()
}

fn same_cyclic(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    let rev: Vec<usize> = b.iter().rev().copied().collect();
    (0..n).any(|r| {
        (0..n).all(|i| a[(i + r) % n] == b[i]) || (0..n).all(|i| a[(i + r) % n] == rev[i])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::catalog;
    use std::f64::consts::PI;

    fn angle_sum(config: &[usize]) -> f64 {
        config.iter().map(|&k| PI - 2.0 * PI / k as f64).sum()
    }

    #[test]
    fn catalog_validates() {
        for spec in catalog() {
            let rep = validate_spec(spec);
            for c in &rep.checks {
                assert!(c.passed, "{}: {} ({})", spec.name, c.name, c.detail);
            }
        }
    }

    #[test]
    fn vertex_configurations_fill_the_plane() {
        for spec in catalog() {
            if let Some(cfg) = vertex_configuration_of(&spec.name) {
                assert!((angle_sum(&cfg) - 2.0 * PI).abs() < 1e-9, "{}", spec.name);
            }
        }
    }

    #[test]
    fn parse_configuration_names() {
        assert_eq!(vertex_configuration_of("3^2.4.3.4"), Some(vec![3, 3, 4, 3, 4]));
        assert_eq!(vertex_configuration_of("4.8^2"), Some(vec![4, 8, 8]));
        assert_eq!(vertex_configuration_of("Z2M"), None);
        assert_eq!(vertex_configuration_of("4^4"), Some(vec![4, 4, 4, 4]));
    }

    #[test]
    fn broken_edge_is_reported() {
        let mut spec = crate::lattice::lookup("H").unwrap().clone();
        spec.edges[0].offset = [1, 1];
        let rep = validate_spec(&spec);
        assert!(!rep.ok());
    }
}
