use std::path::Path;
use std::process::{Command, Output};

fn trigapprox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trigapprox")).args(args).output().expect("run trigapprox")
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("trigapprox-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, psi: &str) -> String {
    let path = dir.join("run.toml");
    let text = format!("[psi]\n{psi}\n[class]\nsample_degree = 6\n[experiment]\nn_min = 2\nn_max = 3\nsample_count = 2\n");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn schema_and_usage_errors() {
    let out = trigapprox(&["--print-schema"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[experiment]"));
    assert_eq!(trigapprox(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(trigapprox(&[]).status.code(), Some(64));
}

#[test]
fn inadmissible_generator_is_a_config_error() {
    assert_eq!(trigapprox(&["build-fstar", "--kind", "power", "--r", "2", "--n", "3"]).status.code(), Some(64));
    let dir = scratch("power");
    let cfg = write_config(&dir, "kind = \"power\"\nr = 1.5");
    assert_eq!(trigapprox(&["orders", "--config", &cfg]).status.code(), Some(64));
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn orders_then_plots() {
    let dir = scratch("orders");
    let cfg = write_config(&dir, "kind = \"exp-power\"\nalpha = 1.0\nr = 1.0");
    let out_dir = dir.join("out");
    let out = trigapprox(&["orders", "--config", &cfg, "--s", "inf", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = out_dir.join("orders.csv");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 5);

    let out = trigapprox(&["plots", "--input", csv.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for f in ["orders_bounds.svg", "orders_ratios.svg"] {
        assert!(std::fs::read_to_string(out_dir.join(f)).unwrap().starts_with("<svg"));
    }

    let out = trigapprox(&["chain", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let chain = std::fs::read_to_string(out_dir.join("chain_violations.csv")).unwrap();
    assert_eq!(chain.lines().count(), 1, "header only");
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn single_harmonic_rows_fail_their_checks() {
    let dir = scratch("n1");
    let cfg = write_config(&dir, "kind = \"exp-power\"\nalpha = 1.0\nr = 1.0");
    let out = trigapprox(&["orders", "--config", &cfg, "--n-min", "1", "--n-max", "1", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(dir.join("orders.csv").exists());
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn approx_round_trip() {
    let dir = scratch("approx");
    let input = dir.join("f.csv");
    std::fs::write(&input, "k,re,im\n-1,0.5,0\n1,0.5,0\n3,0.1,0.2\n").unwrap();
    let out = trigapprox(&["approx", "--input", input.to_str().unwrap(), "--m", "2", "--s", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let records = trigapprox::io::read_mterm_results(out.stdout.as_slice()).unwrap();
    assert_eq!(records[0].gamma, vec![-1, 1]);
    let _ = std::fs::remove_dir_all(dir);
}
