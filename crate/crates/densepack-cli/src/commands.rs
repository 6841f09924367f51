use std::sync::Arc;

use anyhow::Result;
use densepack::bounds::{
    doublet_voter_curve, entropy_constants, kagome_entropy, restricted_voter_curve, voter_curve,
    EntropyUnit, VoterCurve, VoterMode,
};
use densepack::criticality::{bracket_pc, critical_curve, curve_is_monotone, BracketReport};
use densepack::export;
use densepack::lattice::{catalog, lookup, validate_spec, LatticeSpec, PeriodicGraph};
use densepack::oracle::{self, default_sizes, growth_fit, Limits};
use densepack::pca::{self, RunOptions};
use densepack::Configuration;
use serde_json::json;

use crate::config::{invalid, ExperimentConfig};
use crate::output::Output;
use crate::Command;

pub fn run(cmd: &Command, cfg: &ExperimentConfig) -> Result<u8> {
    match cmd {
        Command::ListLattices => list_lattices(),
        Command::Validate { lattices, file } => validate(lattices, file.as_deref()),
        Command::ExportLattice { lattice } => export_lattice(lattice, cfg),
        Command::Simulate { snapshot, .. } => simulate(cfg, *snapshot),
        Command::Bracket { .. } => bracket(cfg),
        Command::Curve { .. } => curve(cfg),
        Command::Enumerate {
            maximizers,
            growth,
            max_sites,
            ..
        } => enumerate(cfg, *maximizers, *growth, *max_sites),
        Command::Voter { form, .. } => voter(cfg, form.as_deref()),
        Command::Entropy { target, bits } => entropy(cfg, target.as_deref(), *bits),
    }
}

fn spec_of(cfg: &ExperimentConfig) -> Result<&'static LatticeSpec> {
    Ok(lookup(cfg.lattice()?)?)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| x.to_string())
}

fn list_lattices() -> Result<u8> {
    println!(
        "{:<10} {:>5} {:>8} {:>7} {:>5} {:>5} {:>5} {:>7}",
        "lattice", "sites", "degrees", "classes", "rho", "type", "p_c", "rho(pc)"
    );
    for s in catalog() {
        let mut deg = s.degrees.clone();
        deg.sort_unstable();
        deg.dedup();
        let deg: Vec<String> = deg.iter().map(|d| d.to_string()).collect();
        println!(
            "{:<10} {:>5} {:>8} {:>7} {:>5} {:>5} {:>5} {:>7}",
            s.name,
            s.sites_per_cell(),
            deg.join(","),
            s.class_count(),
            s.table.density.to_string(),
            s.table.packing_type.as_str(),
            fmt_opt(s.table.pc),
            fmt_opt(s.table.rho_pc),
        );
    }
    Ok(0)
}

fn validate(names: &[String], file: Option<&std::path::Path>) -> Result<u8> {
    let mut specs: Vec<LatticeSpec> = Vec::new();
    if let Some(path) = file {
        specs.push(LatticeSpec::from_text(&std::fs::read_to_string(path)?)?);
    }
    for n in names {
        specs.push(lookup(n)?.clone());
    }
    if specs.is_empty() {
        specs = catalog().to_vec();
    }
    let mut all_ok = true;
    for s in &specs {
        let rep = validate_spec(s);
        for c in &rep.checks {
            let mark = if c.passed { "ok" } else { "FAIL" };
            println!("{:<10} {:<4} {:<24} {}", rep.lattice, mark, c.name, c.detail);
        }
        all_ok &= rep.ok();
    }
    Ok(if all_ok { 0 } else { 2 })
}

fn export_lattice(name: &str, cfg: &ExperimentConfig) -> Result<u8> {
    let spec = lookup(name)?;
    let out = Output::new(cfg)?;
    let file = format!("{}.lattice", spec.name.replace('^', "_"));
    out.text(&file, &spec.to_text())?;
    Ok(0)
}

fn initial(g: &Arc<PeriodicGraph>, init: &str, seed: u64) -> Result<Configuration> {
    let (kind, arg) = init.split_once(':').unwrap_or((init, ""));
    let num = |what: &str| -> Result<f64> {
        arg.parse::<f64>()
            .map_err(|_| invalid(format!("init `{init}`: {what} expected")))
    };
    let c = match kind {
        "empty" => Configuration::empty(g.clone()),
        "full" => Configuration::full(g.clone()),
        "class" => {
            let k = num("class index")? as usize;
            if k >= g.class_count() {
                return Err(invalid(format!("class {k} out of range")));
            }
            Configuration::class_filled(g.clone(), k)
        }
        "optimal" => Configuration::optimal_packing(g.clone(), num("phase")? as usize)?,
        "bernoulli" => {
            let rho = num("density")?;
            if !(0.0..=1.0).contains(&rho) {
                return Err(invalid(format!("density {rho} outside [0, 1]")));
            }
            Configuration::bernoulli(g.clone(), rho, seed)
        }
        "snapshot" => {
            let c = Configuration::from_snapshot(&std::fs::read_to_string(arg)?)?;
            if c.graph().name() != g.name() || c.graph().dims() != g.dims() {
                return Err(invalid("snapshot lattice or dims differ from the run"));
            }
            Configuration::from_bits(g.clone(), c.bits().to_vec())?
        }
        _ => return Err(invalid(format!("unknown init `{init}`"))),
    };
    Ok(c)
}

fn simulate(cfg: &ExperimentConfig, snapshot: bool) -> Result<u8> {
    let spec = spec_of(cfg)?;
    let g = Arc::new(PeriodicGraph::new(spec, cfg.dims()?)?);
    let pressure = cfg.pressure(spec.is_two_level())?;
    pressure.validate(&g)?;
    let seed = cfg.seed();
    let start = initial(&g, cfg.init.as_deref().unwrap_or("empty"), seed)?;
    let opts = RunOptions {
        cycles: cfg.cycles.unwrap_or(1000),
        seed,
        start_cycle: 0,
        thinning: cfg.thinning.unwrap_or(1),
        execution: Default::default(),
    };
    let (end, trace) = pca::run(&start, &pressure, &opts)?;
    let out = Output::new(cfg)?;
    out.csv("trace.csv", &export::trace_csv(&trace, &spec.order))?;
    let mut meta = export::run_metadata(&trace);
    meta["final_density"] = json!(end.density().rho_total());
    meta["final_legal"] = json!(end.is_legal());
    out.json("run.json", meta)?;
    if snapshot {
        out.text("final.snapshot", &end.to_snapshot())?;
    }
    Ok(0)
}

fn bracket(cfg: &ExperimentConfig) -> Result<u8> {
    let spec = spec_of(cfg)?;
    let protocol = cfg.protocol();
    let report = bracket_pc(spec, &protocol)?;
    let out = Output::new(cfg)?;
    let code = match &report {
        BracketReport::Bracket(e) => {
            println!(
                "{}: p_c in [{:.4}, {:.4}], rho at midpoint {:.3}{}",
                e.lattice,
                e.p_lo,
                e.p_hi,
                e.rho_at_pc,
                if e.resolved { "" } else { " (undecided inside)" }
            );
            if e.resolved {
                0
            } else {
                3
            }
        }
        BracketReport::NoTransition { lattice, reason, .. } => {
            println!("{lattice}: no transition ({reason})");
            0
        }
    };
    out.json("bracket.json", serde_json::to_value(&report)?)?;
    Ok(code)
}

fn curve(cfg: &ExperimentConfig) -> Result<u8> {
    let spec = spec_of(cfg)?;
    let grid = cfg
        .p4_grid
        .clone()
        .unwrap_or_else(|| vec![0.0, 0.2, 0.4, 0.6, 0.8]);
    let protocol = cfg.protocol();
    let points = critical_curve(spec, &grid, &protocol)?;
    let out = Output::new(cfg)?;
    out.csv("curve.csv", &export::curve_csv(&points))?;
    let monotone = curve_is_monotone(&points, protocol.resolution);
    out.json(
        "curve.json",
        json!({ "lattice": spec.name, "points": points, "monotone": monotone, "protocol": protocol }),
    )?;
    for p in &points {
        println!("p4 = {:.3}: p_high in [{:.4}, {:.4}]", p.p4, p.p_high_lo, p.p_high_hi);
    }
    Ok(if points.iter().all(|p| p.resolved) { 0 } else { 3 })
}

fn enumerate(cfg: &ExperimentConfig, list: bool, growth: bool, max_sites: usize) -> Result<u8> {
    let spec = spec_of(cfg)?;
    let limits = Limits::default();
    let out = Output::new(cfg)?;
    if growth {
        let fit = growth_fit(spec, &default_sizes(spec, max_sites), &limits)?;
        out.csv("growth.csv", &export::growth_csv(&fit))?;
        println!(
            "{}: a = {:.4}, b = {:.4}, c = {:.4} -> {}",
            fit.lattice,
            fit.a,
            fit.b,
            fit.c,
            fit.packing_type.as_str()
        );
        out.json("growth.json", serde_json::to_value(&fit)?)?;
        return Ok(0);
    }
    let g = Arc::new(PeriodicGraph::new(spec, cfg.dims()?)?);
    let mut value = if g.site_count() <= limits.count_cap {
        serde_json::to_value(oracle::enumerate(&g, &limits)?)?
    } else {
        let (max, count) = oracle::count_maximizers(&g, &limits)?;
        json!({
            "lattice": spec.name,
            "dims": g.dims(),
            "site_count": g.site_count(),
            "legal_count": null,
            "max_occupancy": max,
            "maximizer_count": count,
            "max_density": densepack::Rational::new(max as i64, g.site_count() as i64),
        })
    };
    let max = value["max_occupancy"].as_u64().unwrap_or(0) as i64;
    let density = densepack::Rational::new(max, g.site_count() as i64);
    value["max_density_text"] = json!(density.to_string());
    println!(
        "{} {:?}: max density {density}, {} densest",
        spec.name,
        g.dims(),
        value["maximizer_count"]
    );
    if list {
        let set = oracle::maximizers(&g, &limits)?;
        value["translation_classes"] = json!(set.translation_classes());
        out.text("maximizers.snapshots", &export::snapshot_archive(&set.configurations))?;
    }
    out.json("enumerate.json", value)?;
    Ok(0)
}

fn voter(cfg: &ExperimentConfig, form: Option<&str>) -> Result<u8> {
    let spec = spec_of(cfg)?;
    let mode = match cfg.mode.as_deref().unwrap_or("exhaustive") {
        "exhaustive" => VoterMode::Exhaustive,
        "empirical" => VoterMode::Empirical {
            seeds: cfg.samples.unwrap_or(4),
            cycles: 200,
        },
        m => return Err(invalid(format!("unknown voter mode `{m}`"))),
    };
    let curves: Vec<VoterCurve> = match (spec.name.as_str(), form) {
        ("Z2M", None) => vec![doublet_voter_curve(spec, mode)?, restricted_voter_curve(spec, mode)?],
        (_, Some("doublet")) => vec![doublet_voter_curve(spec, mode)?],
        (_, Some("restricted")) => vec![restricted_voter_curve(spec, mode)?],
        (_, None | Some("single")) => vec![voter_curve(spec, mode)?],
        (_, Some(f)) => return Err(invalid(format!("unknown voter form `{f}`"))),
    };
    let out = Output::new(cfg)?;
    for c in &curves {
        out.csv(&format!("voter_{}.csv", c.form), &export::voter_csv(c))?;
        let mut v = serde_json::to_value(c)?;
        v["fraction"] = json!(c.fraction());
        v["monotone"] = json!(c.is_monotone());
        v["corners_hold"] = json!(c.corners_hold());
        out.json(&format!("voter_{}.json", c.form), v)?;
        let f: Vec<String> = c
            .fraction()
            .iter()
            .map(|x| x.map_or("-".into(), |v| format!("{v:.3}")))
            .collect();
        println!("{} {}: [{}]", c.lattice, c.form, f.join(", "));
    }
    Ok(0)
}

fn entropy(cfg: &ExperimentConfig, target: Option<&str>, bits: bool) -> Result<u8> {
    let unit = if bits { EntropyUnit::Bits } else { EntropyUnit::Nats };
    let mut all = entropy_constants(unit);
    let kagome = kagome_entropy().to_unit(unit);
    let chosen: Vec<_> = match target {
        None => {
            all.push(kagome);
            all
        }
        Some(t) => {
            let name = lookup(t)?.name.clone();
            if name == "3.6.3.6" {
                vec![kagome]
            } else {
                let v: Vec<_> = all.into_iter().filter(|e| e.lattice == name).collect();
                if v.is_empty() {
                    return Err(invalid(format!("no entropy value for {name}")));
                }
                v
            }
        }
    };
    let out = Output::new(cfg)?;
    let list: Vec<_> = chosen.iter().map(export::entropy_json).collect();
    for e in &chosen {
        println!("{}: {:?} = {:.6} ({:?})", e.lattice, e.kind, e.value, e.method);
    }
    let body = if list.len() == 1 {
        list.into_iter().next().unwrap()
    } else {
        json!({ "entropies": list })
    };
    out.json("entropy.json", body)?;
    Ok(0)
}
