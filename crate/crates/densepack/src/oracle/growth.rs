use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{count_maximizers, Limits};
use crate::lattice::{LatticeSpec, PackingType, PeriodicGraph};
use crate::{Error, Result};

/// Quadratic coefficient (per site) above which growth counts as areal.
pub const AREA_THRESHOLD: f64 = 0.01;
/// Linear coefficient (per sqrt(site)) above which growth counts as linear.
pub const LINEAR_THRESHOLD: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub dims: [usize; 2],
    pub sites: usize,
    pub max_occupancy: usize,
    pub count: u128,
    pub ln_count: f64,
}

/// `ln(count) ~ a n^2 + b n + c` with `n = sqrt(sites)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub lattice: String,
    pub points: Vec<GrowthPoint>,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub packing_type: PackingType,
}

/// Tori `[P, P], [P, 2P], [2P, 2P], [2P, 3P], ...` with `P` the least common
/// multiple of the class periods, up to `max_sites`.
///
/// Both sides stay multiples of `P` so rotated copies of a packing fit
/// whenever the unrotated one does.
pub fn default_sizes(spec: &LatticeSpec, max_sites: usize) -> Vec<[usize; 2]> {
    let [p1, p2] = spec.class_period;
    let p = p1 / num_integer::gcd(p1, p2) * p2;
    let s = spec.sites_per_cell();
    let mut out = Vec::new();
    let mut dims = [p, p];
    let mut grow = 1;
    while dims[0] * dims[1] * s <= max_sites {
        out.push(dims);
        dims[grow] += p;
        grow = 1 - grow;
    }
    out
}

/// Count densest packings on each torus and classify the growth.
///
/// Sizes that are degenerate are skipped; the sequence stops at the first
/// torus that is too large or whose count exhausts the search budget.
pub fn growth_fit(spec: &LatticeSpec, sizes: &[[usize; 2]], limits: &Limits) -> Result<GrowthFit> {
    let mut points = Vec::new();
    for &dims in sizes {
        let g = match PeriodicGraph::new(spec, dims) {
            Ok(g) => Arc::new(g),
            Err(Error::IncommensurateDims { .. }) | Err(Error::DegenerateDims { .. }) => continue,
            Err(e) => return Err(e),
        };
        let (max, count) = match count_maximizers(&g, limits) {
            Ok(r) => r,
            Err(Error::TooLarge { .. }) | Err(Error::BudgetExhausted(_)) => break,
            Err(e) => return Err(e),
        };
        points.push(GrowthPoint {
            dims,
            sites: g.site_count(),
            max_occupancy: max,
            count,
            ln_count: (count as f64).ln(),
        });
    }
    let mut distinct: Vec<usize> = points.iter().map(|p| p.sites).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientSizes {
            needed: 3,
            got: distinct.len(),
        });
    }
    let rows: Vec<([f64; 3], f64)> = points
        .iter()
        .map(|p| {
            let n = (p.sites as f64).sqrt();
            ([n * n, n, 1.0], p.ln_count)
        })
        .collect();
    let [a, b, c] = least_squares3(&rows);
    let packing_type = classify(a, b);
    Ok(GrowthFit {
        lattice: spec.name.clone(),
        points,
        a,
        b,
        c,
        packing_type,
    })
}

pub fn classify(a: f64, b: f64) -> PackingType {
    if a > AREA_THRESHOLD {
        PackingType::R
    } else if b > LINEAR_THRESHOLD {
        PackingType::RL
    } else {
        PackingType::L
    }
}

fn least_squares3(rows: &[([f64; 3], f64)]) -> [f64; 3] {
    let mut m = [[0.0f64; 4]; 3];
    for (x, y) in rows {
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += x[i] * x[j];
            }
            m[i][3] += x[i] * y;
        }
    }
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        m.swap(col, piv);
        let d = m[col][col];
        if d.abs() < 1e-300 {
            continue;
        }
        for k in col..4 {
            m[col][k] /= d;
        }
        for r in 0..3 {
            if r != col {
                let f = m[r][col];
                for k in col..4 {
                    m[r][k] -= f * m[col][k];
                }
            }
        }
    }
    [m[0][3], m[1][3], m[2][3]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_quadratic_recovered() {
        let rows: Vec<([f64; 3], f64)> = [2.0, 3.0, 5.0, 7.0]
            .iter()
            .map(|&n: &f64| ([n * n, n, 1.0], 0.5 * n * n - 2.0 * n + 3.0))
            .collect();
        let [a, b, c] = least_squares3(&rows);
        assert!((a - 0.5).abs() < 1e-9 && (b + 2.0).abs() < 1e-9 && (c - 3.0).abs() < 1e-9);
    }

    #[test]
    fn size_family_alternates() {
        let spec = crate::lattice::lookup("3^2.4.3.4").unwrap();
        assert_eq!(default_sizes(spec, 150), vec![[3, 3], [3, 6], [6, 6]]);
    }

    #[test]
    fn too_few_sizes() {
        let spec = crate::lattice::lookup("4^4").unwrap();
        let err = growth_fit(spec, &[[4, 4], [6, 6]], &Limits::default()).unwrap_err();
        assert!(matches!(err, Error::InsufficientSizes { needed: 3, got: 2 }));
    }
}
