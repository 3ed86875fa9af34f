use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn forge(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jsa-forge"))
        .args(args)
        .current_dir(dir)
        .env_remove("JSA_FORGE_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Value {
    let out = forge(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_config(path: impl AsRef<Path>) -> Value {
    let text = std::fs::read_to_string(path).unwrap();
    let line = text
        .lines()
        .find_map(|l| l.strip_prefix("# config: "))
        .expect("config line");
    serde_json::from_str(line).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn sinc_with_gaussian_pump() {
    let tmp = TempDir::new().unwrap();
    let s = ok(
        tmp.path(),
        &[
            "jsa", "--pmf", "sinc", "--pump", "gaussian", "--r", "1", "--s", "-1",
        ],
    );
    assert!((f(&s["purity"]) - 0.77).abs() < 0.01, "{s}");
    let report = read(tmp.path().join("jsa.purity.json"));
    assert_eq!(report["result"]["purity"], s["purity"]);
    let cfg = csv_config(tmp.path().join("jsa.csv"));
    assert_eq!(cfg, report["config"]);
    assert_eq!(cfg["command"], "jsa");
    assert_eq!(cfg["resolved"]["x_grid"]["n_points"], 512);
}

#[test]
fn separable_gaussian() {
    let tmp = TempDir::new().unwrap();
    let doc = ok(tmp.path(), &["gaussian-purity", "--r", "2", "--s", "-0.5"]);
    assert!((f(&doc["result"]["purity"]) - 1.0).abs() < 1e-12);
    assert_eq!(doc["result"]["separable"], true);
    assert_eq!(doc["config"]["version"], env!("CARGO_PKG_VERSION"));
    let entangled = ok(tmp.path(), &["gaussian-purity", "--r", "1", "--s", "-0.3"]);
    assert_eq!(entangled["result"]["separable"], false);
    let grid = ok(
        tmp.path(),
        &["jsa", "--pmf", "gaussian", "--r", "2", "--s", "-0.5"],
    );
    assert!((f(&grid["purity"]) - 1.0).abs() < 1e-6);
}

#[test]
fn equal_velocities_are_a_validation_error() {
    let tmp = TempDir::new().unwrap();
    let out = forge(tmp.path(), &["jsa", "--r", "1", "--s", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("DegenerateGroupVelocities"));
    assert!(!tmp.path().join("jsa.csv").exists());
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    for args in [
        &["jsa", "--s", "-1"][..],
        &["jsa", "--r", "1", "--s", "-1", "--pmf", "lorentz"],
        &["optimize", "--theta", "k/32pi"],
        &["nonsense"],
    ] {
        assert_eq!(forge(tmp.path(), args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn oscillator_map_on_gaussians() {
    let tmp = TempDir::new().unwrap();
    let doc = ok(
        tmp.path(),
        &[
            "map-check",
            "--pmf",
            "gaussian",
            "--r",
            "1",
            "--s",
            "-1",
            "--n-trunc",
            "20",
        ],
    );
    let r = &doc["result"];
    assert!(f(&r["l2_error"]) < 1e-6, "{r}");
    assert!(f(&r["purity_delta"]) < 1e-6);

    let out = forge(tmp.path(), &["map-check", "--r", "1", "--s", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("MappingDomainError"));
}

#[test]
fn purity_reads_what_jsa_writes() {
    let tmp = TempDir::new().unwrap();
    let made = ok(
        tmp.path(),
        &[
            "jsa", "--r", "2", "--s", "-0.7", "--points", "128", "--out", "a.csv",
        ],
    );
    ok(
        tmp.path(),
        &[
            "jsa", "--r", "2", "--s", "-0.7", "--points", "128", "--out", "a.bin",
        ],
    );
    for file in ["a.csv", "a.bin"] {
        let doc = ok(tmp.path(), &["purity", file, "--oracle"]);
        let p = f(&doc["result"]["purity"]);
        assert!((p - f(&made["purity"])).abs() < 1e-12, "{file}");
        assert!(
            (p - f(&doc["result"]["purity_integral"])).abs() < 1e-9,
            "{file}"
        );
    }
    let (j, header) = jsa_forge::io::read_jsa_binary(tmp.path().join("a.bin")).unwrap();
    assert_eq!(j.values.nrows(), 128);
    assert_eq!(header.config["command"], "jsa");
    assert_eq!(header.version, env!("CARGO_PKG_VERSION"));

    let forced = ok(
        tmp.path(),
        &[
            "jsa", "--r", "2", "--s", "-0.7", "--points", "64", "--out", "b.dat", "--format",
            "binary",
        ],
    );
    assert_eq!(forced["matrix"], "b.dat");
    assert!(jsa_forge::io::read_jsa_binary(tmp.path().join("b.dat")).is_ok());
}

#[test]
fn conversion_and_down_conversion_purities_agree() {
    let tmp = TempDir::new().unwrap();
    let s = ok(
        tmp.path(),
        &[
            "fc-convert",
            "--pmf",
            "sech",
            "--r",
            "1.5",
            "--s",
            "-0.4",
            "--points",
            "256",
            "--out",
            "fc.csv",
        ],
    );
    assert!((f(&s["purity"]) - f(&s["spdc_purity"])).abs() < 1e-9, "{s}");
    assert_eq!(
        read(tmp.path().join("fc.purity.json"))["config"]["command"],
        "fc-convert"
    );
}

#[test]
fn optimize_is_reproducible() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = [
        "optimize",
        "--theta",
        "4/32pi",
        "--n-trunc",
        "12",
        "--restarts",
        "3",
        "--seed",
        "5",
        "--out",
        "o.json",
    ];
    ok(a.path(), &args);
    let out = Command::new(env!("CARGO_BIN_EXE_jsa-forge"))
        .args(args)
        .current_dir(b.path())
        .env("JSA_FORGE_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    let (x, y) = (
        std::fs::read(a.path().join("o.json")).unwrap(),
        std::fs::read(b.path().join("o.json")).unwrap(),
    );
    assert!(x == y, "outputs differ");

    let doc = read(a.path().join("o.json"));
    assert_eq!(doc["config"]["seed"], 5);
    assert!((f(&doc["config"]["resolved"]["theta_over_pi"]) - 0.125).abs() < 1e-15);
    assert_eq!(doc["result"]["restart_trace"].as_array().unwrap().len(), 3);
}

#[test]
fn single_restarts_recover_the_full_search() {
    let tmp = TempDir::new().unwrap();
    let common = [
        "optimize",
        "--pmf",
        "sech",
        "--theta",
        "6/32pi",
        "--n-trunc",
        "14",
        "--out",
        "o.json",
    ];
    let run = |extra: &[&str]| {
        let args: Vec<&str> = common.iter().chain(extra).copied().collect();
        f(&ok(tmp.path(), &args)["best_purity"])
    };
    let full = run(&["--restarts", "6"]);
    let best = (0..3)
        .map(|k| run(&["--restarts", "1", "--seed", &k.to_string()]))
        .fold(0.0, f64::max);
    assert!((full - best).abs() < 1e-6, "{full} vs {best}");
}

#[test]
fn theta_forms_agree() {
    let tmp = TempDir::new().unwrap();
    let base = [
        "optimize",
        "--n-trunc",
        "10",
        "--restarts",
        "1",
        "--out",
        "o.json",
    ];
    let theta = |t: &str| {
        let args: Vec<&str> = base.iter().copied().chain(["--theta", t]).collect();
        ok(tmp.path(), &args);
        f(&read(tmp.path().join("o.json"))["config"]["resolved"]["optimizer"]["theta"])
    };
    let a = theta("8/32pi");
    assert!((a - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    assert_eq!(a, theta(&std::f64::consts::FRAC_PI_4.to_string()));
}

#[test]
fn dispersionless_sweep() {
    let tmp = TempDir::new().unwrap();
    let s = ok(
        tmp.path(),
        &[
            "gvd-sweep",
            "--model",
            "dispersionless",
            "--r-values",
            "5,8,12,20",
            "--out",
            "s.csv",
        ],
    );
    assert_eq!(s["rows"], 4);
    let text = std::fs::read_to_string(tmp.path().join("s.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('r'))
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for row in &rows {
        let (r, gvd, linear) = (row[0], row[1], row[2]);
        assert!((gvd - linear).abs() < 1e-8, "r = {r}");
        assert!(
            (linear - (1.0 - 0.5 / (r * r))).abs() < 1e-3,
            "r = {r}: {linear}"
        );
    }
    assert_eq!(csv_config(tmp.path().join("s.csv"))["command"], "gvd-sweep");
}

#[test]
fn custom_model_file() {
    let tmp = TempDir::new().unwrap();
    let model = r#"{
        "0": {"form": "linear", "n_phase": 1.84, "n_group": 1.80, "lambda_ref_um": 0.8, "valid_um": [0.3, 5.0]},
        "1": {"form": "linear", "n_phase": 1.88, "n_group": 1.86, "lambda_ref_um": 1.6, "valid_um": [0.3, 5.0]},
        "2": {"form": "linear", "n_phase": 1.79, "n_group": 1.75, "lambda_ref_um": 1.6, "valid_um": [0.3, 5.0]},
        "source": "test"
    }"#;
    std::fs::write(tmp.path().join("m.json"), model).unwrap();
    let s = ok(
        tmp.path(),
        &[
            "jsa",
            "--model",
            "m.json",
            "--length-m",
            "0.01",
            "--tau-s",
            "1e-12",
            "--pump-nm",
            "800",
            "--points",
            "128",
        ],
    );
    let report = read(tmp.path().join("jsa.purity.json"));
    let (r, sv) = (f(&report["result"]["r"]), f(&report["result"]["s"]));
    // (n_g,pump − n_g,signal) L / (2 c τ)
    let scale = 0.01 / (2.0 * 299_792_458.0 * 1e-12);
    assert!((r - 0.06 * scale).abs() < 1e-9 * scale, "{r}");
    assert!((sv + 0.05 * scale).abs() < 1e-9 * scale, "{sv}");
    let direct = ok(
        tmp.path(),
        &[
            "jsa",
            "--r",
            &r.to_string(),
            "--s",
            &sv.to_string(),
            "--points",
            "128",
        ],
    );
    assert!((f(&s["purity"]) - f(&direct["purity"])).abs() < 1e-8);
}

#[test]
fn thread_cap_must_be_positive() {
    let tmp = TempDir::new().unwrap();
    for bad in ["0", "many", "-2"] {
        let out = Command::new(env!("CARGO_BIN_EXE_jsa-forge"))
            .args(["gaussian-purity", "--r", "1", "--s", "-1"])
            .current_dir(tmp.path())
            .env("JSA_FORGE_THREADS", bad)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(2), "{bad}");
    }
}
