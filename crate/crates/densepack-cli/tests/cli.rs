use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn densepack(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_densepack"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn lists_every_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let o = densepack(dir.path(), &["list-lattices"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 14);
    let kagome = rows.iter().find(|r| r.starts_with("3.6.3.6")).unwrap();
    assert!(kagome.contains("1/3") && kagome.contains(" R "), "{kagome}");
    let z2m = rows.iter().find(|r| r.starts_with("Z2M")).unwrap();
    assert!(z2m.contains("1/4"), "{z2m}");
}

fn data_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(String::from)
        .collect()
}

#[test]
fn simulate_is_reproducible_and_thread_independent() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["simulate", "H", "--p", "0.859", "--dims", "12", "12", "--cycles", "200", "--snapshot"];
    assert!(densepack(a.path(), &args).status.success());
    let first: Vec<Vec<u8>> = ["trace.csv", "run.json", "final.snapshot"]
        .iter()
        .map(|n| std::fs::read(a.path().join(n)).unwrap())
        .collect();
    assert!(densepack(a.path(), &args).status.success());
    for (name, bytes) in ["trace.csv", "run.json", "final.snapshot"].iter().zip(&first) {
        assert_eq!(&std::fs::read(a.path().join(name)).unwrap(), bytes, "{name}");
    }
    let mut threaded = vec!["--threads", "3"];
    threaded.extend(args);
    assert!(densepack(b.path(), &threaded).status.success());
    for name in ["trace.csv", "final.snapshot"] {
        assert_eq!(data_lines(&a.path().join(name)), data_lines(&b.path().join(name)), "{name}");
    }
    let trace = std::fs::read_to_string(a.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("# config: "));
    assert_eq!(data_lines(&a.path().join("trace.csv")).len(), 1 + 201);
    assert_eq!(json(&a.path().join("run.json"))["config"]["p"].as_f64(), Some(0.859));
}

#[test]
fn invalid_pressure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = densepack(dir.path(), &["simulate", "4^4", "--p", "1.5", "--dims", "4", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = densepack(dir.path(), &["simulate", "UJ", "--p", "0.5", "--dims", "4", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = densepack(dir.path(), &["simulate", "nonesuch", "--p", "0.5", "--dims", "4", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "lattice = \"4^4\"\np = 0.3\ndims = [4, 4]\ncycles = 5\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = densepack(dir.path(), &["--config", cfg, "simulate", "--p", "0.6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let meta = json(&dir.path().join("run.json"));
    assert_eq!(meta["config"]["p"].as_f64(), Some(0.6));
    assert_eq!(meta["config"]["cycles"].as_u64(), Some(5));

    std::fs::write(dir.path().join("bad.toml"), "lattice = \"4^4\"\npee = 0.3\n").unwrap();
    let bad = dir.path().join("bad.toml");
    let o = densepack(dir.path(), &["--config", bad.to_str().unwrap(), "simulate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn enumerate_square_torus() {
    let dir = tempfile::tempdir().unwrap();
    let o = densepack(dir.path(), &["enumerate", "4^4", "4", "4", "--maximizers"]);
    assert!(o.status.success());
    let v = json(&dir.path().join("enumerate.json"));
    assert_eq!(v["max_density_text"], "1/2");
    assert_eq!(v["maximizer_count"], 2);
    let archive = std::fs::read_to_string(dir.path().join("maximizers.snapshots")).unwrap();
    assert_eq!(archive.matches("config 4^4 4 4").count(), 2);
}

#[test]
fn square_voter_curve() {
    let dir = tempfile::tempdir().unwrap();
    assert!(densepack(dir.path(), &["voter", "4^4"]).status.success());
    let v = json(&dir.path().join("voter_single.json"));
    let f1 = v["fraction"][1].as_f64().unwrap();
    assert!((f1 - 1.0 / 9.0).abs() < 1e-12);
    assert_eq!(v["monotone"], true);
}

#[test]
fn kagome_entropy_json() {
    let dir = tempfile::tempdir().unwrap();
    assert!(densepack(dir.path(), &["entropy", "kagome"]).status.success());
    let v = json(&dir.path().join("entropy.json"));
    assert!((v["value"].as_f64().unwrap() - 0.32306).abs() < 1e-4, "{v}");
}

#[test]
fn kagome_has_no_transition() {
    let dir = tempfile::tempdir().unwrap();
    let o = densepack(dir.path(), &["bracket", "kagome"]);
    assert!(o.status.success());
    assert_eq!(json(&dir.path().join("bracket.json"))["outcome"], "no_transition");
}

#[test]
fn truncated_bracket_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = densepack(
        dir.path(),
        &[
            "bracket", "4^4", "--burn-in", "10", "--window", "10", "--max-cycles", "20",
            "--coarse-sites", "64", "--fine-sites", "64", "--epsilon", "1e-9", "--delta", "1e-9",
        ],
    );
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn resolution_flag_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let o = densepack(
        dir.path(),
        &["bracket", "4^4", "--resolution", "0.05", "--fine-sites", "2500", "--max-cycles", "4000"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("bracket.json"));
    let width = v["p_hi"].as_f64().unwrap() - v["p_lo"].as_f64().unwrap();
    assert!(width <= 0.05 + 1e-12 || v["resolved"] == false, "{v}");
    assert_eq!(v["protocol"]["resolution"].as_f64(), Some(0.05));
}
