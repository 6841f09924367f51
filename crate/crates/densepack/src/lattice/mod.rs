//! Periodic lattice descriptions, the built-in catalog and finite torus graphs.

mod catalog;
mod graph;
mod text;
mod validate;

pub use catalog::{catalog, lookup, names};
pub use graph::PeriodicGraph;
pub use validate::{validate_spec, ValidationReport};

use serde::{Deserialize, Serialize};

use crate::Rational;

/// An edge from site `a` in cell `(0,0)` to site `b` in cell `offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub a: usize,
    pub b: usize,
    pub offset: [i32; 2],
    pub length: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PackingType {
    /// Laminated: finitely many densest packings.
    L,
    /// Random laminated: rows slide independently.
    RL,
    /// Random: local moves give extensive entropy.
    R,
}

impl PackingType {
    pub fn as_str(self) -> &'static str {
        match self {
            PackingType::L => "L",
            PackingType::RL => "RL",
            PackingType::R => "R",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "L" => Some(PackingType::L),
            "RL" => Some(PackingType::RL),
            "R" => Some(PackingType::R),
            _ => None,
        }
    }
}

/// How the sublattice order parameter is read off class densities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderSpec {
    /// max - min of the listed class densities.
    Spread(Vec<usize>),
    /// max over pairs of |mean(left) - mean(right)|.
    Contrast(Vec<(Vec<usize>, Vec<usize>)>),
}

/// Reference values the catalog carries for each lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub density: Rational,
    pub packing_type: PackingType,
    /// Critical update probability, when known.
    pub pc: Option<f64>,
    /// Density at the critical point, when known.
    pub rho_pc: Option<f64>,
}

/// Complete description of a periodic lattice.
///
/// Sites are given in fractional coordinates of the basis. Update classes
/// are assigned on a supercell of `class_period` cells; supercell site
/// `((px * P2) + py) * S + s` has class `class_of[..]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub name: String,
    pub basis: [[f64; 2]; 2],
    pub sites: Vec<[f64; 2]>,
    pub degrees: Vec<usize>,
    pub edges: Vec<EdgeSpec>,
    pub class_period: [usize; 2],
    pub class_of: Vec<usize>,
    /// Classes whose union is a maximally symmetric densest packing.
    pub optimal: Vec<usize>,
    /// Rings of sites (in cyclic order) that support a hexagon flip.
    pub flips: Vec<Vec<(usize, [i32; 2])>>,
    pub order: OrderSpec,
    pub table: TableEntry,
}

impl LatticeSpec {
    pub fn sites_per_cell(&self) -> usize {
        self.sites.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_of.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Class of site `s` in cell `(cx, cy)`.
    pub fn class_at(&self, cx: usize, cy: usize, s: usize) -> usize {
        let [p1, p2] = self.class_period;
        self.class_of[((cx % p1) * p2 + cy % p2) * self.sites.len() + s]
    }

    pub fn cartesian(&self, frac: [f64; 2]) -> [f64; 2] {
        let [a1, a2] = self.basis;
        [
            frac[0] * a1[0] + frac[1] * a2[0],
            frac[0] * a1[1] + frac[1] * a2[1],
        ]
    }

    pub fn is_uniform_degree(&self) -> bool {
        self.degrees.windows(2).all(|w| w[0] == w[1])
    }

    /// Lattices with two update probabilities (degree-4 sites versus the rest).
    pub fn is_two_level(&self) -> bool {
        !self.is_uniform_degree() && self.degrees.contains(&4)
    }

    pub fn to_text(&self) -> String {
        text::write(self)
    }

    pub fn from_text(src: &str) -> crate::Result<Self> {
        text::read(src)
    }
}
