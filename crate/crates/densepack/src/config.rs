//! Occupation configurations on a torus and their density bookkeeping.

use std::fmt::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::lattice::{lookup, LatticeSpec, PeriodicGraph};
use crate::rng::Stream;
use crate::{Error, Rational, Result};

#[derive(Clone, Debug)]
pub struct Configuration {
    graph: Arc<PeriodicGraph>,
    bits: Vec<u8>,
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        self.graph.name() == other.graph.name()
            && self.graph.dims() == other.graph.dims()
            && self.bits == other.bits
    }
}

impl Eq for Configuration {}

/// Exact occupation counts, overall and per update class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub site_count: usize,
    pub occupied: usize,
    pub class_sizes: Vec<usize>,
    pub class_occupied: Vec<usize>,
}

impl DensityReport {
    pub fn rho_total(&self) -> f64 {
        self.occupied as f64 / self.site_count as f64
    }

    pub fn rho_total_exact(&self) -> Rational {
        Rational::new(self.occupied as i64, self.site_count as i64)
    }

    pub fn rho_class(&self, k: usize) -> f64 {
        self.class_occupied[k] as f64 / self.class_sizes[k] as f64
    }

    pub fn class_densities(&self) -> Vec<f64> {
        (0..self.class_sizes.len()).map(|k| self.rho_class(k)).collect()
    }
}

impl Configuration {
    pub fn empty(graph: Arc<PeriodicGraph>) -> Self {
        let n = graph.site_count();
        Configuration {
            graph,
            bits: vec![0; n],
        }
    }

    pub fn from_bits(graph: Arc<PeriodicGraph>, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != graph.site_count() || bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidSpec(format!(
                "expected {} bits of 0/1",
                graph.site_count()
            )));
        }
        Ok(Configuration { graph, bits })
    }

    /// Every site set, the usual illegal starting point.
    pub fn full(graph: Arc<PeriodicGraph>) -> Self {
        let n = graph.site_count();
        Configuration {
            graph,
            bits: vec![1; n],
        }
    }

    /// All sites of class `k` occupied, everything else empty.
    pub fn class_filled(graph: Arc<PeriodicGraph>, k: usize) -> Self {
        let mut c = Configuration::empty(graph);
        let sites: Vec<u32> = c.graph.class_sites(k).to_vec();
        for x in sites {
            c.bits[x as usize] = 1;
        }
        c
    }

    /// The optimal packing of the given phase (an index into the catalog's optimal classes).
    pub fn optimal_packing(graph: Arc<PeriodicGraph>, phase: usize) -> Result<Self> {
        let opt = &graph.spec().optimal;
        if phase >= opt.len() {
            return Err(Error::InvalidSpec(format!(
                "phase {phase} out of range, {} phases",
                opt.len()
            )));
        }
        let k = opt[phase];
        Ok(Configuration::class_filled(graph, k))
    }

    /// Independent Bernoulli(rho) occupation; generally illegal.
    pub fn bernoulli(graph: Arc<PeriodicGraph>, rho: f64, seed: u64) -> Self {
        let stream = Stream::new(seed, 0xbe51);
        let bits = (0..graph.site_count())
            .map(|i| u8::from(stream.at(i) < rho))
            .collect();
        Configuration { graph, bits }
    }

    pub fn graph(&self) -> &PeriodicGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<PeriodicGraph> {
        &self.graph
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn bits_mut(&mut self) -> &mut [u8] {
        &mut self.bits
    }

    #[inline]
    pub fn get(&self, x: usize) -> bool {
        self.bits[x] != 0
    }

    #[inline]
    pub fn set(&mut self, x: usize, v: bool) {
        self.bits[x] = u8::from(v);
    }

    pub fn occupied_count(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    pub fn occupied_sites(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&x| self.bits[x] != 0).collect()
    }

    /// Edges with both endpoints occupied, each listed once with `x < y`.
    pub fn violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.bits.len() {
            if self.bits[x] == 0 {
                continue;
            }
            for &y in self.graph.neighbors(x) {
                let y = y as usize;
                if y > x && self.bits[y] != 0 {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn is_legal(&self) -> bool {
        (0..self.bits.len()).all(|x| {
            self.bits[x] == 0
                || self
                    .graph
                    .neighbors(x)
                    .iter()
                    .all(|&y| self.bits[y as usize] == 0)
        })
    }

    /// Whether `x` has an occupied neighbor.
    #[inline]
    pub fn blocked(&self, x: usize) -> bool {
        self.graph
            .neighbors(x)
            .iter()
            .any(|&y| self.bits[y as usize] != 0)
    }

    pub fn density(&self) -> DensityReport {
        let k = self.graph.class_count();
        let mut class_occupied = vec![0usize; k];
        let mut class_sizes = vec![0usize; k];
        for x in 0..self.bits.len() {
            let c = self.graph.class_of(x);
            class_sizes[c] += 1;
            class_occupied[c] += self.bits[x] as usize;
        }
        DensityReport {
            site_count: self.bits.len(),
            occupied: class_occupied.iter().sum(),
            class_sizes,
            class_occupied,
        }
    }

    /// Two-line text form: `config <lattice> <L1> <L2>` and a run-length line
    /// `rle <first bit> <run> <run> ...` with alternating bits.
    pub fn to_snapshot(&self) -> String {
        let [l1, l2] = self.graph.dims();
        let mut out = format!("config {} {} {}\n", self.graph.name(), l1, l2);
        let first = self.bits.first().copied().unwrap_or(0);
        let _ = write!(out, "rle {first}");
        let mut cur = first;
        let mut run = 0usize;
        for &b in &self.bits {
            if b == cur {
                run += 1;
            } else {
                let _ = write!(out, " {run}");
                cur = b;
                run = 1;
            }
        }
        let _ = writeln!(out, " {run}");
        out
    }

    /// Parse a snapshot for a catalog lattice. Lines starting with `#` are skipped.
    pub fn from_snapshot(text: &str) -> Result<Self> {
        Self::parse_snapshot(text, |name| lookup(name).cloned())
    }

    /// Parse a snapshot for a lattice described by `spec`.
    pub fn from_snapshot_with(text: &str, spec: &LatticeSpec) -> Result<Self> {
        Self::parse_snapshot(text, |name| {
            if name == spec.name {
                Ok(spec.clone())
            } else {
                Err(Error::UnknownLattice(name.to_string()))
            }
        })
    }

    fn parse_snapshot(
        text: &str,
        resolve: impl Fn(&str) -> Result<LatticeSpec>,
    ) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let perr = |line: usize, msg: &str| Error::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let (i, header) = lines.next().ok_or(perr(0, "empty snapshot"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 4 || h[0] != "config" {
            return Err(perr(i, "expected `config <lattice> <L1> <L2>`"));
        }
        let l1: usize = h[2].parse().map_err(|_| perr(i, "bad L1"))?;
        let l2: usize = h[3].parse().map_err(|_| perr(i, "bad L2"))?;
        let spec = resolve(h[1])?;
        let graph = Arc::new(PeriodicGraph::new(&spec, [l1, l2])?);

        let (j, body) = lines.next().ok_or(perr(i + 1, "missing rle line"))?;
        let mut toks = body.split_whitespace();
        if toks.next() != Some("rle") {
            return Err(perr(j, "expected `rle`"));
        }
        let mut cur: u8 = match toks.next() {
            Some("0") => 0,
            Some("1") => 1,
            _ => return Err(perr(j, "first bit must be 0 or 1")),
        };
        let mut bits = Vec::with_capacity(graph.site_count());
        for t in toks {
            let run: usize = t.parse().map_err(|_| perr(j, "bad run length"))?;
            if run == 0 && !bits.is_empty() {
                return Err(perr(j, "zero-length run"));
            }
            bits.extend(std::iter::repeat_n(cur, run));
            cur ^= 1;
        }
        if bits.len() != graph.site_count() {
            return Err(perr(
                j,
                &format!("{} bits for {} sites", bits.len(), graph.site_count()),
            ));
        }
        if let Some((k, _)) = lines.next() {
            return Err(perr(k, "trailing data"));
        }
        Configuration::from_bits(graph, bits)
    }
}
