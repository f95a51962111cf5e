use std::path::{Path, PathBuf};

use relus_core::net::ReluOrder;
use relus_core::rates::{theoretical_exponent, ExponentKind, ExponentQuery};
use relus_core::sphere::{funk_hecke_coeff, SphereDim};
use serde_json::Value;

use super::*;

/// Exit code and stderr text the binary would produce for `args`.
struct Outcome {
    code: u8,
    stderr: String,
}

impl Outcome {
    fn success(&self) -> bool {
        self.code == 0
    }
}

fn run(args: &[&str]) -> Outcome {
    let argv = std::iter::once("relus-lab").chain(args.iter().copied());
    match Cli::try_parse_from(argv) {
        Err(e) => Outcome { code: parse_exit_code(&e), stderr: e.to_string() },
        Ok(cli) => match execute(&cli) {
            Ok(_) => Outcome { code: 0, stderr: String::new() },
            Err(e) => Outcome { code: e.exit_code(), stderr: e.to_string() },
        },
    }
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn svg_metadata(dir: &Path) -> Value {
    let svg = std::fs::read_to_string(dir.join("plot.svg")).unwrap();
    let start = svg.find("<metadata>").unwrap() + "<metadata>".len();
    let end = svg.find("</metadata>").unwrap();
    serde_json::from_str(&svg[start..end]).unwrap()
}

const BAND_LIMITED: &str = r#"{
  "plot": true,
  "experiment": {
    "command": "approx-sphere", "d": 2, "s": 1, "p": 1.5,
    "profile": { "kind": "gegenbauer", "degree": 2, "scale": 1.0 },
    "maxdeg": 64,
    "j_grid": [3, 4, 8, 16]
  }
}"#;

#[test]
fn spectrum_rows_and_reload() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    let o = run(&["spectrum", "--d", "2", "--s", "0", "--maxdeg", "30", "--out", out.to_str().unwrap()]);
    assert!(o.success(), "{}", o.stderr);
    let csv = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "i,N(d,i),lambda_i,closed_form_lambda_i,ratio");
    let spec = funk_hecke_coeff(SphereDim::new(2).unwrap(), ReluOrder(0), 30).unwrap();
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    assert_eq!(rows.len(), 31);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0].parse::<usize>().unwrap(), i);
        let lambda: f64 = row[2].parse().unwrap();
        // reload is lossless
        assert_eq!(lambda, spec.lambdas()[i]);
        if i >= 1 && i % 2 == 0 {
            assert_eq!(lambda, 0.0, "parity row {i}");
        }
    }
    assert!((rows[0][2].parse::<f64>().unwrap() - 0.5).abs() < 1e-10);
    assert!(!csv.contains('\r'));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let out = out.to_str().unwrap();
    assert_eq!(run(&["spectrum", "--d", "1", "--s", "0", "--maxdeg", "5", "--out", out]).code, 2);
    assert_eq!(run(&["spectrum", "--d", "2"]).code, 2);
    assert_eq!(run(&["train", "--out", out]).code, 2);
    assert_eq!(run(&["no-such-command"]).code, 2);

    let cfg = write_config(tmp.path(), "a.json", BAND_LIMITED);
    let o = run(&["train", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(o.code, 2, "subcommand mismatch");
    assert!(o.stderr.contains("approx-sphere"));

    let bad = write_config(tmp.path(), "bad.json", &BAND_LIMITED.replace("\"plot\": true", "\"plot\": true, \"extra\": 1"));
    assert_eq!(run(&["approx-sphere", "--config", bad.to_str().unwrap(), "--out", out]).code, 2);
    let missing = tmp.path().join("missing.json");
    assert_eq!(run(&["approx-sphere", "--config", missing.to_str().unwrap(), "--out", out]).code, 2);

    // j = 1 truncates the degree-2 profile to zero: a runtime failure at a named grid point
    let zero = write_config(tmp.path(), "zero.json", &BAND_LIMITED.replace("[3, 4, 8, 16]", "[1, 4, 8]"));
    let o = run(&["approx-sphere", "--config", zero.to_str().unwrap(), "--out", out]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("j = 1"), "{}", o.stderr);
}

#[test]
fn band_limited_sweep_reports_verdicts_and_plot_metadata() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "a.json", BAND_LIMITED);
    let out = tmp.path().join("o");
    let o = run(&["approx-sphere", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.success(), "{}", o.stderr);
    let r = report(&out);
    assert_eq!(r["tool"], "relus-lab");
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["command"], "approx-sphere");
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
    assert!(r["report"]["verdicts"].as_array().unwrap().iter().any(|v| v["name"] == "calibrated_bound"));
    let header = std::fs::read_to_string(out.join("points.csv")).unwrap();
    assert!(header.starts_with("grid_value,error,stderr,replicate\n"));

    let filtered_rate = theoretical_exponent(&ExponentQuery::new(ExponentKind::FilteredRate, 2, 1).with_p(1.5)).unwrap().value;
    let meta = svg_metadata(&out);
    assert_eq!(meta["reference_slope"].as_f64().unwrap(), -filtered_rate);
    assert_eq!(r["report"]["theoretical_exponent"].as_f64().unwrap(), filtered_rate);
}

#[test]
fn mollify_reruns_are_byte_identical_and_seed_flag_applies() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "m.json",
        r#"{"plot": true, "experiment": {"command": "approx-mollify", "d": 2,
            "function": {"kind": "gaussian_bump", "width": 0.5}, "alpha": 1,
            "eps_grid": [0.4, 0.2, 0.1], "grid_per_axis": 5}}"#,
    );
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        let o = run(&["approx-mollify", "--config", cfg.to_str().unwrap(), "--out", d.to_str().unwrap(), "--jobs", "1", "--seed", "42"]);
        assert!(o.success(), "{}", o.stderr);
    }
    assert_eq!(std::fs::read(a.join("points.csv")).unwrap(), std::fs::read(b.join("points.csv")).unwrap());
    assert_eq!(report(&a)["seed"], 42);
    assert_eq!(svg_metadata(&a)["reference_slope"].as_f64().unwrap(), 1.0);
}

#[test]
fn train_writes_net_and_reaches_small_risk() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "t.json",
        r#"{"seed": 5, "experiment": {"command": "train", "d": 2, "s": 1,
            "target": {"kind": "barron", "atoms": 5, "target_seed": 2024},
            "n": 300, "noise": {"kind": "gaussian", "sigma": 0.0},
            "train": {"m": 20, "restarts": 2, "steps": 1000}, "n_test": 1000,
            "comparator_seeded": true}}"#,
    );
    let out = tmp.path().join("o");
    let o = run(&["train", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.success(), "{}", o.stderr);
    let r = report(&out);
    assert!(r["report"]["empirical_risk"].as_f64().unwrap() < 1e-3);
    let net = relus_core::net::ShallowNet::from_json(&std::fs::read_to_string(out.join("net.json")).unwrap()).unwrap();
    assert_eq!(net.dim(), 2);
    let fit = relus_core::learner::FitResult::from_json(&std::fs::read_to_string(out.join("fit.json")).unwrap()).unwrap();
    assert_eq!(fit.net, net);
}

#[test]
fn rate_n_emits_one_row_per_n_and_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "r.json",
        r#"{"seed": 1, "experiment": {"command": "rate-n", "d": 2, "s": 1,
            "target": {"kind": "sobolev", "function": {"kind": "gaussian_bump", "width": 0.7}},
            "n_grid": [64, 128, 256], "replicates": 3,
            "noise": {"kind": "gaussian", "sigma": 0.1},
            "schedule": {"kind": "sobolev_case", "alpha": 2.0},
            "train": {"restarts": 1, "steps": 100}, "n_test": 500}}"#,
    );
    let out = tmp.path().join("o");
    let o = run(&["rate-n", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.success(), "{}", o.stderr);
    let csv = std::fs::read_to_string(out.join("points.csv")).unwrap();
    let mut rows: Vec<(String, String)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_owned(), f[3].to_owned())
        })
        .collect();
    assert_eq!(rows.len(), 9);
    rows.sort();
    rows.dedup();
    assert_eq!(rows.len(), 9);

    let comp = write_config(tmp.path(), "c.json", &std::fs::read_to_string(&cfg).unwrap().replace("\"n_test\": 500", "\"n_test\": 500, \"comparator_seeded\": true"));
    assert_eq!(run(&["rate-n", "--config", comp.to_str().unwrap(), "--out", out.to_str().unwrap()]).code, 2);
}

#[test]
fn complexity_reports_reference_slope() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"seed": 2, "plot": true, "experiment": {"command": "complexity", "d": 2, "s": 1,
            "path_bound": 1.0, "delta": 0.5, "delta_grid": [0.25],
            "n_grid": [64, 128, 256], "noise": {"kind": "gaussian", "sigma": 1.0}, "trials": 4}}"#,
    );
    let out = tmp.path().join("o");
    let o = run(&["complexity", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.success(), "{}", o.stderr);
    let r = report(&out);
    assert_eq!(r["report"]["reference_slope"].as_f64().unwrap(), -0.5);
    let names: Vec<&str> = r["report"]["verdicts"].as_array().unwrap().iter().map(|v| v["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["slope_within_tolerance", "monotone_in_delta"]);
    assert_eq!(svg_metadata(&out)["reference_slope"].as_f64().unwrap(), -0.5);
}
