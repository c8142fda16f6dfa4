use std::path::Path;
use std::process::{Command, Output};

use conslaw::harness::ExperimentConfig;

fn conslaw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conslaw")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

const SMALL: &str = r#"
name = "small"
ladder = [50, 100]
times = [0.25, 0.5, 0.75, 1.0]
x_range = [-1.0, 3.0]
domain = [-0.5, 0.5]

[flux]
kind = "exp_pair"

[initial]
kind = "riemann"
u_minus = -0.5
u_plus = 0.5

[[methods]]
kind = "godunov"

[[methods]]
kind = "upwind"

[[methods]]
kind = "lax_oleinik"

[tolerances]
max_pairwise_l1 = 0.2
max_principle = 1e-12
"#;

#[test]
fn riemann_reports_burgers_shock() {
    let out = conslaw(&["riemann", "--flux", "burgers", "--u-minus", "1", "--u-plus", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["report"]["speed"].as_f64(), Some(0.0));
    assert_eq!(v["report"]["satisfies_e"], true);
}

#[test]
fn riemann_csv_profile_is_the_fan() {
    let out = conslaw(&[
        "riemann",
        "--flux",
        "burgers",
        "--u-minus",
        "-1",
        "--u-plus",
        "1",
        "--n-cells",
        "8",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (x, u) = l.split_once(',').unwrap();
            (x.parse().unwrap(), u.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 9);
    for (x, u) in rows {
        assert!((u - x.clamp(-1.0, 1.0)).abs() < 1e-12);
    }
}

#[test]
fn bad_flux_exits_with_two() {
    let out = conslaw(&["riemann", "--flux", "quartic", "--u-minus", "0", "--u-plus", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown flux"));
}

#[test]
fn order_exit_code_follows_min() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    std::fs::write(&path, "h,err\n0.1,0.04\n0.05,0.01\n0.025,0.0025\n").unwrap();
    let p = path.to_str().unwrap();
    let ok = conslaw(&["order", "--input", p, "--min", "1.9"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!((stdout_json(&ok)["order"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(conslaw(&["order", "--input", p, "--min", "2.1"]).status.code(), Some(1));
}

#[test]
fn solve_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let out_dir = dir.path().join("out");
    let solve = conslaw(&["solve", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(solve.status.code(), Some(0), "{}", String::from_utf8_lossy(&solve.stderr));
    assert!(out_dir.join("report.json").exists());

    let mut inputs: Vec<String> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_str().unwrap().starts_with("snapshot_godunov_0.04_"))
        .map(|p| p.to_str().unwrap().to_string())
        .collect();
    inputs.sort();
    assert_eq!(inputs.len(), 4);
    let mut args = vec!["verify", "--flux", "exp_pair", "--domain=-0.5,0.5", "--quad-n", "32", "--input"];
    args.extend(inputs.iter().map(String::as_str));
    let verify = conslaw(&args);
    assert_eq!(verify.status.code(), Some(0), "{}", String::from_utf8_lossy(&verify.stderr));
    assert_eq!(stdout_json(&verify)["pass"], true);
}

#[test]
fn compare_fails_on_impossible_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.toml");
    std::fs::write(&cfg, SMALL.replace("max_pairwise_l1 = 0.2", "max_pairwise_l1 = 1e-9")).unwrap();
    let out = conslaw(&["compare", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["pass"], false);
}

#[test]
fn compare_csv_lists_each_pair_once() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL.replace("times = [0.25, 0.5, 0.75, 1.0]", "times = [1.0]")).unwrap();
    let out = conslaw(&["compare", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 3);
    let gu = text.lines().find(|l| l.contains("godunov,upwind")).unwrap();
    assert_eq!(gu.rsplit(',').next().unwrap().parse::<f64>().unwrap(), 0.0);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 3);
}
