use std::f64::consts::{PI, SQRT_2};
use std::sync::OnceLock;

use super::{EdgeSpec, LatticeSpec, OrderSpec, PackingType, TableEntry};
use crate::{Error, Rational, Result};

const S3: f64 = 1.732_050_807_568_877_2;
const UNIT: f64 = 1.0;
const DIAG: f64 = SQRT_2;
const HALF_DIAG: f64 = SQRT_2 / 2.0;

/// Names in canonical catalog order.
pub fn names() -> Vec<&'static str> {
    vec![
        "4^4", "6^3", "3^6", "4.8^2", "4.6.12", "3^2.4.3.4", "3^4.6", "3^3.4^2", "3.4.6.4",
        "3.6.3.6", "3.12^2", "Z2M", "UJ", "Q",
    ]
}

pub fn catalog() -> &'static [LatticeSpec] {
    static CATALOG: OnceLock<Vec<LatticeSpec>> = OnceLock::new();
    CATALOG.get_or_init(build_all)
}

/// Look up a lattice by catalog name or a common alias.
pub fn lookup(name: &str) -> Result<&'static LatticeSpec> {
    let key = match name.to_ascii_lowercase().as_str() {
        "z2" | "square" | "4.4.4.4" => "4^4".to_string(),
        "h" | "honeycomb" | "6.6.6" => "6^3".to_string(),
        "t" | "triangular" | "3.3.3.3.3.3" => "3^6".to_string(),
        "k" | "kagome" => "3.6.3.6".to_string(),
        "z2m" => "Z2M".to_string(),
        "uj" | "union-jack" | "[4.8^2]" => "UJ".to_string(),
        "q" | "quilt" => "Q".to_string(),
        _ => name.to_string(),
    };
    catalog()
        .iter()
        .find(|s| s.name == key)
        .ok_or_else(|| Error::UnknownLattice(name.to_string()))
}

fn e(a: usize, b: usize, dx: i32, dy: i32) -> EdgeSpec {
    el(a, b, dx, dy, UNIT)
}

fn el(a: usize, b: usize, dx: i32, dy: i32, length: f64) -> EdgeSpec {
    EdgeSpec {
        a,
        b,
        offset: [dx, dy],
        length,
    }
}

fn polygon(center: [f64; 2], n: usize, radius: f64, phase: f64) -> Vec<[f64; 2]> {
    (0..n)
        .map(|k| {
            let t = phase + 2.0 * PI * k as f64 / n as f64;
            [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
        })
        .collect()
}

/// Cartesian points to fractional coordinates wrapped into [0, 1).
fn fractional(basis: [[f64; 2]; 2], points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let [a1, a2] = basis;
    let det = a1[0] * a2[1] - a2[0] * a1[1];
    points
        .iter()
        .map(|p| {
            let u = (p[0] * a2[1] - a2[0] * p[1]) / det;
            let v = (a1[0] * p[1] - p[0] * a1[1]) / det;
            [wrap(u), wrap(v)]
        })
        .collect()
}

fn wrap(x: f64) -> f64 {
    let w = x - (x + 1e-12).floor();
    if w.abs() < 1e-12 {
        0.0
    } else {
        w
    }
}

fn hex_basis(a: f64) -> [[f64; 2]; 2] {
    [[a, 0.0], [a / 2.0, a * S3 / 2.0]]
}

fn mid(basis: [[f64; 2]; 2], t: f64) -> [f64; 2] {
    [
        t * (basis[0][0] + basis[1][0]),
        t * (basis[0][1] + basis[1][1]),
    ]
}

struct Draft {
    name: &'static str,
    basis: [[f64; 2]; 2],
    points: Vec<[f64; 2]>,
    degrees: Vec<usize>,
    edges: Vec<EdgeSpec>,
    period: [usize; 2],
    class_of: Vec<usize>,
    optimal: Vec<usize>,
    density: (i64, i64),
    packing_type: PackingType,
    pc: Option<f64>,
    rho_pc: Option<f64>,
}

impl Draft {
    fn finish(self) -> LatticeSpec {
        let classes = self.class_of.iter().max().map_or(0, |m| m + 1);
        LatticeSpec {
            name: self.name.to_string(),
            basis: self.basis,
            sites: fractional(self.basis, &self.points),
            degrees: self.degrees,
            edges: self.edges,
            class_period: self.period,
            class_of: self.class_of,
            optimal: self.optimal,
            flips: Vec::new(),
            order: OrderSpec::Spread((0..classes).collect()),
            table: TableEntry {
                density: Rational::new(self.density.0, self.density.1),
                packing_type: self.packing_type,
                pc: self.pc,
                rho_pc: self.rho_pc,
            },
        }
    }
}

fn build_all() -> Vec<LatticeSpec> {
    use PackingType::*;
    let mut out = Vec::new();

    out.push(
        Draft {
            name: "4^4",
            basis: [[1.0, 0.0], [0.0, 1.0]],
            points: vec![[0.0, 0.0]],
            degrees: vec![4],
            edges: vec![e(0, 0, 0, 1), e(0, 0, 1, 0)],
            period: [2, 2],
            class_of: vec![0, 1, 1, 0],
            optimal: vec![0, 1],
            density: (1, 2),
            packing_type: L,
            pc: Some(0.79),
            rho_pc: Some(0.36),
        }
        .finish(),
    );

    out.push(
        Draft {
            name: "6^3",
            basis: [[S3, 0.0], [S3 / 2.0, 1.5]],
            points: vec![[S3 / 2.0, 0.5], [S3, 1.0]],
            degrees: vec![3, 3],
            edges: vec![e(0, 1, -1, 0), e(0, 1, 0, -1), e(0, 1, 0, 0)],
            period: [1, 1],
            class_of: vec![0, 1],
            optimal: vec![0, 1],
            density: (1, 2),
            packing_type: L,
            pc: Some(0.87),
            rho_pc: Some(0.4),
        }
        .finish(),
    );

    out.push(
        Draft {
            name: "3^6",
            basis: [[1.0, 0.0], [0.5, S3 / 2.0]],
            points: vec![[0.0, 0.0]],
            degrees: vec![6],
            edges: vec![e(0, 0, 0, 1), e(0, 0, 1, -1), e(0, 0, 1, 0)],
            period: [3, 3],
            class_of: vec![0, 1, 2, 2, 0, 1, 1, 2, 0],
            optimal: vec![0, 1, 2],
            density: (1, 3),
            packing_type: L,
            pc: Some(0.90),
            rho_pc: Some(0.26),
        }
        .finish(),
    );

    let s = 1.0 + SQRT_2;
    let c = s / 2.0;
    let r = HALF_DIAG;
    out.push(
        Draft {
            name: "4.8^2",
            basis: [[s, 0.0], [0.0, s]],
            points: vec![[c + r, c], [c, c + r], [c - r, c], [c, c - r]],
            degrees: vec![3; 4],
            edges: vec![
                e(0, 1, 0, 0),
                e(0, 2, 1, 0),
                e(0, 3, 0, 0),
                e(1, 2, 0, 0),
                e(1, 3, 0, 1),
                e(2, 3, 0, 0),
            ],
            period: [2, 2],
            class_of: vec![0, 1, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 0, 1, 0, 1],
            optimal: vec![0, 1],
            density: (1, 2),
            packing_type: L,
            pc: Some(0.90),
            rho_pc: Some(0.4),
        }
        .finish(),
    );

    let r12 = 1.0 / (2.0 * (PI / 12.0).sin());
    let b = hex_basis(3.0 + S3);
    out.push(
        Draft {
            name: "4.6.12",
            basis: b,
            points: polygon(mid(b, 0.5), 12, r12, PI / 12.0),
            degrees: vec![3; 12],
            edges: vec![
                e(0, 1, 0, 0),
                e(0, 5, 1, 0),
                e(0, 11, 0, 0),
                e(1, 2, 0, 0),
                e(1, 8, 0, 1),
                e(2, 3, 0, 0),
                e(2, 7, 0, 1),
                e(3, 4, 0, 0),
                e(3, 10, -1, 1),
                e(4, 5, 0, 0),
                e(4, 9, -1, 1),
                e(5, 6, 0, 0),
                e(6, 7, 0, 0),
                e(6, 11, -1, 0),
                e(7, 8, 0, 0),
                e(8, 9, 0, 0),
                e(9, 10, 0, 0),
                e(10, 11, 0, 0),
            ],
            period: [1, 1],
            class_of: vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1],
            optimal: vec![0, 1],
            density: (1, 2),
            packing_type: L,
            pc: Some(0.91),
            rho_pc: Some(0.42),
        }
        .finish(),
    );

    let a = (2.0 + S3).sqrt();
    out.push(
        Draft {
            name: "3^2.4.3.4",
            basis: [[a, 0.0], [0.0, a]],
            points: polygon([a / 2.0, a / 2.0], 4, HALF_DIAG, PI / 6.0),
            degrees: vec![5; 4],
            edges: vec![
                e(0, 1, 0, 0),
                e(0, 1, 1, 0),
                e(0, 2, 1, 0),
                e(0, 3, 0, 0),
                e(0, 3, 0, 1),
                e(1, 2, 0, 0),
                e(1, 2, 0, 1),
                e(1, 3, 0, 1),
                e(2, 3, -1, 0),
                e(2, 3, 0, 0),
            ],
            period: [1, 3],
            class_of: vec![0, 1, 2, 1, 1, 2, 0, 2, 2, 0, 1, 0],
            optimal: vec![0, 1, 2],
            density: (1, 3),
            packing_type: L,
            pc: Some(0.99),
            rho_pc: Some(0.3),
        }
        .finish(),
    );

    // Triangular lattice with the sqrt(7) superlattice (2,1),(-1,3) removed.
    let b = [[2.5, S3 / 2.0], [0.5, 1.5 * S3]];
    out.push(
        Draft {
            name: "3^4.6",
            basis: b,
            points: polygon(mid(b, 0.5), 6, 1.0, 0.0),
            degrees: vec![5; 6],
            edges: vec![
                e(0, 1, 0, 0),
                e(0, 2, 1, -1),
                e(0, 3, 1, 0),
                e(0, 4, 1, 0),
                e(0, 5, 0, 0),
                e(1, 2, 0, 0),
                e(1, 3, 1, 0),
                e(1, 4, 0, 1),
                e(1, 5, 0, 1),
                e(2, 3, 0, 0),
                e(2, 4, 0, 1),
                e(2, 5, -1, 1),
                e(3, 4, 0, 0),
                e(3, 5, -1, 1),
                e(4, 5, 0, 0),
            ],
            period: [3, 3],
            class_of: vec![
                0, 1, 0, 1, 0, 1, 2, 0, 2, 0, 2, 0, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 0, 1, 0,
                1, 0, 1, 2, 0, 2, 0, 2, 0, 2, 0, 2, 0, 2, 0, 1, 2, 1, 2, 1, 2, 0, 1, 0, 1, 0, 1,
            ],
            optimal: vec![0, 1, 2],
            density: (1, 3),
            packing_type: L,
            pc: Some(0.97),
            rho_pc: Some(0.29),
        }
        .finish(),
    );

    out.push(
        Draft {
            name: "3^3.4^2",
            basis: [[1.0, 0.0], [0.5, 1.0 + S3 / 2.0]],
            points: vec![[0.0, 0.0], [1.0, 1.0]],
            degrees: vec![5, 5],
            edges: vec![
                e(0, 0, 1, 0),
                e(0, 1, -1, -1),
                e(0, 1, -1, 0),
                e(0, 1, 0, -1),
                e(1, 1, 1, 0),
            ],
            period: [3, 1],
            class_of: vec![0, 1, 2, 0, 1, 2],
            optimal: vec![0, 1, 2],
            density: (1, 3),
            packing_type: RL,
            pc: None,
            rho_pc: None,
        }
        .finish(),
    );

    let b = hex_basis(1.0 + S3);
    out.push(
        Draft {
            name: "3.4.6.4",
            basis: b,
            points: polygon(mid(b, 0.5), 6, 1.0, PI / 6.0),
            degrees: vec![4; 6],
            edges: vec![
                e(0, 1, 0, 0),
                e(0, 2, 1, 0),
                e(0, 4, 0, 1),
                e(0, 5, 0, 0),
                e(1, 2, 0, 0),
                e(1, 3, 0, 1),
                e(1, 5, -1, 1),
                e(2, 3, 0, 0),
                e(2, 4, -1, 1),
                e(3, 4, 0, 0),
                e(3, 5, -1, 0),
                e(4, 5, 0, 0),
            ],
            period: [1, 1],
            class_of: vec![0, 1, 2, 0, 1, 2],
            optimal: vec![0, 1, 2],
            density: (1, 3),
            packing_type: R,
            pc: None,
            rho_pc: None,
        }
        .finish(),
    );

    let mut kagome = Draft {
        name: "3.6.3.6",
        basis: [[2.0, 0.0], [1.0, S3]],
        points: vec![[0.0, 0.0], [1.0, 0.0], [0.5, S3 / 2.0]],
        degrees: vec![4; 3],
        edges: vec![
            e(0, 1, -1, 0),
            e(0, 1, 0, 0),
            e(0, 2, 0, -1),
            e(0, 2, 0, 0),
            e(1, 2, 0, 0),
            e(1, 2, 1, -1),
        ],
        // Each class is a sqrt(3) kagome sublattice.
        period: [3, 3],
        class_of: vec![
            0, 1, 2, 1, 2, 0, 2, 0, 1, 2, 0, 1, 0, 1, 2, 1, 2, 0, 1, 2, 0, 2, 0, 1, 0, 1, 2,
        ],
        optimal: vec![0, 1, 2],
        density: (1, 3),
        packing_type: R,
        pc: None,
        rho_pc: None,
    }
    .finish();
    kagome.flips = vec![vec![
        (0, [1, 0]),
        (2, [1, 0]),
        (1, [0, 1]),
        (0, [0, 1]),
        (2, [0, 0]),
        (1, [0, 0]),
    ]];
    out.push(kagome);

    let b = hex_basis(2.0 + S3);
    let g1 = mid(b, 1.0 / 3.0);
    let g2 = mid(b, 2.0 / 3.0);
    let mut points = polygon(g1, 3, 1.0 / S3, PI / 6.0);
    points.extend(polygon(g2, 3, 1.0 / S3, PI / 2.0));
    out.push(
        Draft {
            name: "3.12^2",
            basis: b,
            points,
            degrees: vec![3; 6],
            edges: vec![
                e(0, 1, 0, 0),
                e(0, 2, 0, 0),
                e(0, 4, 0, 0),
                e(1, 2, 0, 0),
                e(1, 5, -1, 0),
                e(2, 3, 0, -1),
                e(3, 4, 0, 0),
                e(3, 5, 0, 0),
                e(4, 5, 0, 0),
            ],
            period: [1, 1],
            class_of: vec![0, 1, 2, 0, 1, 2],
            optimal: vec![0, 1, 2],
            density: (1, 3),
            packing_type: R,
            pc: None,
            rho_pc: None,
        }
        .finish(),
    );

    let mut z2m = Draft {
        name: "Z2M",
        basis: [[1.0, 0.0], [0.0, 1.0]],
        points: vec![[0.0, 0.0]],
        degrees: vec![8],
        edges: vec![
            e(0, 0, 0, 1),
            el(0, 0, 1, -1, DIAG),
            e(0, 0, 1, 0),
            el(0, 0, 1, 1, DIAG),
        ],
        period: [2, 2],
        class_of: vec![0, 2, 1, 3],
        optimal: vec![0, 1, 2, 3],
        density: (1, 4),
        packing_type: RL,
        pc: Some(0.98),
        rho_pc: None,
    }
    .finish();
    z2m.order = OrderSpec::Contrast(vec![
        (vec![0, 1], vec![2, 3]),
        (vec![0, 2], vec![1, 3]),
    ]);
    out.push(z2m);

    let mut uj = Draft {
        name: "UJ",
        basis: [[1.0, 0.0], [0.0, 1.0]],
        points: vec![[0.0, 0.0], [0.5, 0.5]],
        degrees: vec![8, 4],
        edges: vec![
            e(0, 0, 0, 1),
            e(0, 0, 1, 0),
            el(0, 1, -1, -1, HALF_DIAG),
            el(0, 1, -1, 0, HALF_DIAG),
            el(0, 1, 0, -1, HALF_DIAG),
            el(0, 1, 0, 0, HALF_DIAG),
        ],
        // Corners split into two checkerboard classes, centers form the third.
        period: [2, 2],
        class_of: vec![0, 2, 1, 2, 1, 2, 0, 2],
        optimal: vec![2],
        density: (1, 2),
        packing_type: L,
        pc: None,
        rho_pc: None,
    }
    .finish();
    uj.order = OrderSpec::Spread(vec![0, 1]);
    out.push(uj);

    let mut q = Draft {
        name: "Q",
        basis: [[1.0, 1.0], [-1.0, 1.0]],
        points: vec![[0.0, 0.0], [0.0, 1.0], [0.5, 0.5]],
        degrees: vec![6, 6, 4],
        edges: vec![
            e(0, 1, -1, -1),
            e(0, 1, -1, 0),
            e(0, 1, 0, -1),
            e(0, 1, 0, 0),
            el(0, 2, -1, 0, HALF_DIAG),
            el(0, 2, 0, 0, HALF_DIAG),
            el(1, 2, 0, 0, HALF_DIAG),
            el(1, 2, 0, 1, HALF_DIAG),
        ],
        period: [1, 1],
        class_of: vec![0, 1, 2],
        optimal: vec![0, 1, 2],
        density: (1, 3),
        packing_type: L,
        pc: None,
        rho_pc: None,
    }
    .finish();
    q.order = OrderSpec::Spread(vec![0, 1]);
    out.push(q);

    out
}
