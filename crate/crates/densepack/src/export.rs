//! CSV and JSON renderings of results.

use std::fmt::Write;

use serde_json::{json, Value};

use crate::bounds::{EntropyEstimate, VoterCurve};
use crate::config::{Configuration, DensityReport};
use crate::criticality::{order_parameter, CurvePoint};
use crate::lattice::OrderSpec;
use crate::oracle::GrowthFit;
use crate::pca::{Pressure, RunTrace};

fn class_columns(prefix: &str, n: usize) -> String {
    (0..n).map(|k| format!(",{prefix}{k}")).collect()
}

/// `lattice,L1,L2,rho_total,rho_class_0,...`
pub fn density_header(classes: usize) -> String {
    format!("lattice,L1,L2,rho_total{}", class_columns("rho_class_", classes))
}

pub fn density_row(lattice: &str, dims: [usize; 2], d: &DensityReport) -> String {
    let mut s = format!("{lattice},{},{},{}", dims[0], dims[1], d.rho_total());
    for r in d.class_densities() {
        let _ = write!(s, ",{r}");
    }
    s
}

/// `cycle,rho_total,rho_class_0,...,order_param`
pub fn trace_csv(trace: &RunTrace, order: &OrderSpec) -> String {
    let classes = trace.rows.first().map_or(0, |r| r.density.class_sizes.len());
    let mut out = format!("cycle,rho_total{},order_param\n", class_columns("rho_class_", classes));
    for row in &trace.rows {
        let _ = write!(out, "{},{}", row.cycle, row.density.rho_total());
        for r in row.density.class_densities() {
            let _ = write!(out, ",{r}");
        }
        let _ = writeln!(out, ",{}", order_parameter(&row.density, order));
    }
    out
}

pub fn run_metadata(trace: &RunTrace) -> Value {
    let mut v = json!({
        "lattice": trace.lattice,
        "dims": trace.dims,
        "seed": trace.seed,
        "cycles": trace.cycles,
        "schedule": trace.schedule,
    });
    match trace.pressure {
        Pressure::Uniform(p) => v["p"] = json!(p),
        Pressure::TwoLevel { p4, high } => {
            v["p4"] = json!(p4);
            v["p_high"] = json!(high);
        }
    }
    v
}

/// `k,patterns,ones,fraction`; fraction is empty where no pattern has `k` ones.
pub fn voter_csv(curve: &VoterCurve) -> String {
    let mut out = String::from("k,patterns,ones,fraction\n");
    for (k, f) in curve.fraction().iter().enumerate() {
        let frac = f.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{k},{},{},{frac}", curve.patterns[k], curve.ones[k]);
    }
    out
}

pub fn entropy_json(e: &EntropyEstimate) -> Value {
    json!({
        "lattice": e.lattice,
        "kind": e.kind,
        "value_nats": e.value_nats(),
        "value": e.value,
        "unit": e.unit,
        "method": e.method,
        "lower_bound": e.lower_bound,
        "error_estimate": e.error_estimate,
    })
}

/// `n,log_count` with `n = sqrt(sites)`.
pub fn growth_csv(fit: &GrowthFit) -> String {
    let mut out = String::from("n,log_count\n");
    for p in &fit.points {
        let _ = writeln!(out, "{},{}", (p.sites as f64).sqrt(), p.ln_count);
    }
    out
}

/// `p4,p_high_lo,p_high_hi`
pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("p4,p_high_lo,p_high_hi\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", p.p4, p.p_high_lo, p.p_high_hi);
    }
    out
}

/// Snapshots separated by blank lines.
pub fn snapshot_archive(configs: &[Configuration]) -> String {
    configs.iter().map(|c| c.to_snapshot()).collect::<Vec<_>>().join("\n")
}

/// Split an archive written by [`snapshot_archive`] and parse each entry.
pub fn read_snapshot_archive(text: &str) -> crate::Result<Vec<Configuration>> {
    text.split("\n\n")
        .filter(|chunk| !chunk.trim().is_empty())
        .map(Configuration::from_snapshot)
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::lattice::{lookup, PeriodicGraph};
    use crate::pca::{run, RunOptions};

    #[test]
    fn trace_columns() {
        let spec = lookup("4^4").unwrap();
        let g = Arc::new(PeriodicGraph::new(spec, [4, 4]).unwrap());
        let start = Configuration::empty(g);
        let opts = RunOptions {
            cycles: 3,
            ..RunOptions::default()
        };
        let (_, trace) = run(&start, &Pressure::Uniform(0.5), &opts).unwrap();
        let csv = trace_csv(&trace, &spec.order);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("cycle,rho_total,rho_class_0,rho_class_1,order_param"));
        assert_eq!(lines.count(), 4);
        assert_eq!(run_metadata(&trace)["p"], json!(0.5));
    }

    #[test]
    fn archive_round_trip() {
        let g = Arc::new(PeriodicGraph::new(lookup("6^3").unwrap(), [2, 2]).unwrap());
        let configs: Vec<_> = (0..2)
            .map(|k| Configuration::class_filled(g.clone(), k))
            .collect();
        let back = read_snapshot_archive(&snapshot_archive(&configs)).unwrap();
        assert_eq!(back, configs);
    }
}
