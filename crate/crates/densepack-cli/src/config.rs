use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use densepack::criticality::Protocol;
use densepack::pca::Pressure;
use serde::{Deserialize, Serialize};

/// Settings read from `--config`; command-line flags override each field.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p4: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_high: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thinning: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p4_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default)]
    pub protocol: ProtocolOverrides,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_cycles: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coarse_sites: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fine_sites: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coarse_grid: Option<Vec<f64>>,
}

/// Marks errors that come from bad user input.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }

    /// Fill every field that `other` sets.
    pub fn overlay(mut self, other: ExperimentConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(lattice, dims, p, p4, p_high, cycles, seed, thinning, init, out, p4_grid, mode, samples);
        let (mut a, b) = (self.protocol, other.protocol);
        macro_rules! take_p {
            ($($f:ident),*) => { $( if b.$f.is_some() { a.$f = b.$f; } )* };
        }
        take_p!(burn_in, window, epsilon, delta, seeds, resolution, max_cycles, rho0, coarse_sites, fine_sites, coarse_grid);
        self.protocol = a;
        self
    }

    pub fn lattice(&self) -> Result<&str> {
        self.lattice.as_deref().ok_or_else(|| invalid("no lattice given"))
    }

    pub fn dims(&self) -> Result<[usize; 2]> {
        self.dims.ok_or_else(|| invalid("no torus dimensions given"))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    /// `p` for one-level lattices, `p4` and `p_high` for two-level ones.
    pub fn pressure(&self, two_level: bool) -> Result<Pressure> {
        let pr = match (two_level, self.p, self.p4, self.p_high) {
            (false, Some(p), None, None) => Pressure::Uniform(p),
            (true, None, Some(p4), Some(high)) => Pressure::TwoLevel { p4, high },
            (false, ..) => return Err(invalid("this lattice takes a single --p")),
            (true, ..) => return Err(invalid("this lattice takes --p4 and --p-high")),
        };
        Ok(pr)
    }

    pub fn protocol(&self) -> Protocol {
        let o = &self.protocol;
        let d = Protocol::default();
        Protocol {
            burn_in: o.burn_in.unwrap_or(d.burn_in),
            window: o.window.unwrap_or(d.window),
            epsilon: o.epsilon.unwrap_or(d.epsilon),
            delta: o.delta.unwrap_or(d.delta),
            seeds: o.seeds.clone().unwrap_or(d.seeds),
            resolution: o.resolution.unwrap_or(d.resolution),
            max_cycles: o.max_cycles.unwrap_or(d.max_cycles),
            rho0: o.rho0.or(d.rho0),
            coarse_sites: o.coarse_sites.unwrap_or(d.coarse_sites),
            fine_sites: o.fine_sites.unwrap_or(d.fine_sites),
            coarse_grid: o.coarse_grid.clone().unwrap_or(d.coarse_grid),
            execution: d.execution,
        }
    }
}
