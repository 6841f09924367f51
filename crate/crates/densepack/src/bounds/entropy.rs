use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyKind {
    /// Per unit length of a laminated stack.
    H1,
    /// Per site.
    H2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyMethod {
    ClosedForm,
    Quadrature,
    GrowthFit,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyUnit {
    #[default]
    Nats,
    Bits,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub lattice: String,
    pub kind: EntropyKind,
    pub value: f64,
    pub unit: EntropyUnit,
    pub method: EntropyMethod,
    /// The value is a lower bound rather than the entropy itself.
    pub lower_bound: bool,
    pub error_estimate: Option<f64>,
}

impl EntropyEstimate {
    pub fn value_nats(&self) -> f64 {
        match self.unit {
            EntropyUnit::Nats => self.value,
            EntropyUnit::Bits => self.value * LN_2,
        }
    }

    pub fn to_unit(&self, unit: EntropyUnit) -> EntropyEstimate {
        let scale = |v: f64| match unit {
            EntropyUnit::Nats => v,
            EntropyUnit::Bits => v / LN_2,
        };
        let nats = self.value_nats();
        let err = self.error_estimate.map(|e| match self.unit {
            EntropyUnit::Nats => e,
            EntropyUnit::Bits => e * LN_2,
        });
        EntropyEstimate {
            value: scale(nats),
            unit,
            error_estimate: err.map(scale),
            ..self.clone()
        }
    }
}

/// Closed-form residual entropies: the slide entropy of the two random
/// laminated lattices and the local-move lower bounds of two random ones.
pub fn entropy_constants(unit: EntropyUnit) -> Vec<EntropyEstimate> {
    let row = |lattice: &str, kind, coef: f64, lower_bound| EntropyEstimate {
        lattice: lattice.to_string(),
        kind,
        value: coef * LN_2,
        unit: EntropyUnit::Nats,
        method: EntropyMethod::ClosedForm,
        lower_bound,
        error_estimate: None,
    };
    vec![
        row("3^3.4^2", EntropyKind::H1, 0.5, false),
        row("Z2M", EntropyKind::H1, 0.5, false),
        row("3.4.6.4", EntropyKind::H2, 3.0 / 16.0, true),
        row("3.12^2", EntropyKind::H2, 1.0 / 18.0, true),
    ]
    .into_iter()
    .map(|e| e.to_unit(unit))
    .collect()
}

/// `log|1 + e^{i theta} + e^{i phi}|`.
pub(crate) fn kagome_integrand(theta: f64, phi: f64) -> f64 {
    let re = 1.0 + theta.cos() + phi.cos();
    let im = theta.sin() + phi.sin();
    0.5 * (re * re + im * im).ln()
}

/// Midpoint rule on an `n x n` grid over the torus `[0, 2 pi)^2`.
///
/// Grid points sit at odd multiples of `pi / n`, so the zeros of the
/// integrand at `(2 pi/3, 4 pi/3)` and its mirror are never sampled. Only
/// `theta <= phi` is evaluated; the rest follows from the swap symmetry.
fn midpoint(n: usize, parallel: bool) -> f64 {
    let h = 2.0 * PI / n as f64;
    let rows = par::map_range(n, parallel, |i| {
        let t = (i as f64 + 0.5) * h;
        let mut s = 0.5 * kagome_integrand(t, t);
        for j in i + 1..n {
            s += kagome_integrand(t, (j as f64 + 0.5) * h);
        }
        s
    });
    2.0 * rows.iter().sum::<f64>() / (n * n) as f64
}

/// The kagome residual entropy `(1/4 pi^2) int int log|1 + e^{i theta} + e^{i phi}|`.
pub fn kagome_entropy() -> EntropyEstimate {
    kagome_entropy_with(512, crate::par::available())
}

/// Quadrature on `n` and `2n` points per side; the finer value is returned and
/// the difference between the two is the error estimate.
pub fn kagome_entropy_with(n: usize, parallel: bool) -> EntropyEstimate {
    let coarse = midpoint(n, parallel);
    let fine = midpoint(2 * n, parallel);
    EntropyEstimate {
        lattice: "3.6.3.6".to_string(),
        kind: EntropyKind::H2,
        value: fine,
        unit: EntropyUnit::Nats,
        method: EntropyMethod::Quadrature,
        lower_bound: false,
        error_estimate: Some((fine - coarse).abs()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrand_symmetries() {
        assert!((kagome_integrand(0.0, 0.0) - 3f64.ln()).abs() < 1e-15);
        for &(t, p) in &[(0.3, 1.7), (2.0, 5.5), (4.0, 0.1)] {
            let a = kagome_integrand(t, p);
            assert!((a - kagome_integrand(p, t)).abs() < 1e-14);
            assert!((a - kagome_integrand(2.0 * PI - t, 2.0 * PI - p)).abs() < 1e-12);
        }
    }

    #[test]
    fn refinement_within_estimate() {
        let e = kagome_entropy_with(128, false);
        let finer = midpoint(512, false);
        assert!((finer - e.value).abs() < e.error_estimate.unwrap());
    }

    #[test]
    fn bits_round_trip() {
        for e in entropy_constants(EntropyUnit::Bits) {
            let back = e.to_unit(EntropyUnit::Nats);
            assert!((back.value - e.value * LN_2).abs() < 1e-15);
        }
        assert_eq!(entropy_constants(EntropyUnit::Bits)[0].value, 0.5);
    }
}
