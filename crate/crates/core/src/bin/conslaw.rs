use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use conslaw::entropy::{kruzhkov_certificate, CandidateSolution, CertificateConfig};
use conslaw::harness::{
    estimate_order, read_snapshot_csv, run_experiment_with_snapshots, write_artifacts, write_snapshot_csv,
    ExperimentConfig, FluxConfig,
};
use conslaw::riemann::{analyze, solve_riemann_convex, RiemannProblem};
use conslaw::{Error, Grid1D, GridFunction, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(name = "conslaw", version, about = "Generalized solutions of eta(u)_t + phi(u)_x = 0")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shock speed and admissibility of one jump, plus the exact profile for convex fluxes.
    Riemann {
        /// burgers, gelfand_q, exp_pair, power:P, linear:K:C or ph:ALPHA:BETA:MU
        #[arg(long)]
        flux: String,
        #[arg(long, allow_hyphen_values = true)]
        u_minus: f64,
        #[arg(long, allow_hyphen_values = true)]
        u_plus: f64,
        /// State interval `a,b`; defaults to the hull of the two states.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
        domain: Option<(f64, f64)>,
        /// Profile time.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_pair, default_value = "-2,2")]
        x_range: (f64, f64),
        #[arg(long, default_value_t = 400)]
        n_cells: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs every method of a config and writes snapshots plus `report.json`.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Runs a config and prints the pairwise L1 comparison at the finest rung.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Kruzhkov certificate for a snapshot series (`x,u` CSV files, one per time).
    Verify {
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long)]
        flux: String,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
        domain: Option<(f64, f64)>,
        /// Snapshot times; parsed from `..._<t>.csv` file names when absent.
        #[arg(long, num_args = 1..)]
        times: Option<Vec<f64>>,
        #[arg(long, default_value_t = 256)]
        quad_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Least-squares order from an `h,err` CSV.
    Order {
        #[arg(long)]
        input: PathBuf,
        /// Exit non-zero when the order is below this value.
        #[arg(long)]
        min: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a < b {
        Ok((a, b))
    } else {
        Err(format!("need a < b, got {s:?}"))
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))
}

fn write_out(dir: &Path, name: &str, text: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", text.trim_end()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether every declared tolerance passed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Riemann { flux, u_minus, u_plus, domain, t, x_range, n_cells, format, out } => {
            let domain = domain.unwrap_or((u_minus.min(u_plus), u_minus.max(u_plus)));
            let fp = FluxConfig::parse(&flux)?.build(domain)?;
            let rp = RiemannProblem::new(fp, u_minus, u_plus)?;
            let report = analyze(&rp, 200)?;
            let grid = Grid1D::new(x_range.0, x_range.1, n_cells)?;
            let profile = solve_riemann_convex(&rp)
                .ok()
                .map(|sol| GridFunction::from_fn(grid, t, |x| sol.evaluate(t, x)))
                .transpose()?;
            let text = match format {
                Format::Json => to_json(&json!({
                    "flux": flux,
                    "u_minus": u_minus,
                    "u_plus": u_plus,
                    "report": report,
                    "waves": profile.is_some(),
                }))?,
                Format::Csv => {
                    let p =
                        profile.as_ref().ok_or_else(|| Error::NotConvex("no exact profile for this flux".into()))?;
                    let mut s = String::from("x,u\n");
                    for (x, u) in p.grid.nodes().iter().zip(&p.values) {
                        s.push_str(&format!("{x},{u}\n"));
                    }
                    s
                }
            };
            emit(&text)?;
            if let Some(dir) = out {
                write_out(&dir, "riemann.json", &to_json(&report)?)?;
                if let Some(p) = &profile {
                    write_snapshot_csv(&dir.join(format!("snapshot_exact_{}_{t}.csv", grid.dx())), p)?;
                }
            }
            Ok(true)
        }
        Command::Solve { config, out, format } => {
            let cfg = ExperimentConfig::load(&config)?;
            let (report, snaps) = run_experiment_with_snapshots(&cfg)?;
            let dir = out.or(cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
            let files = write_artifacts(&dir, &report, &snaps)?;
            match format {
                Format::Json => emit(&report.to_json()?)?,
                Format::Csv => {
                    let mut s = String::from("file\n");
                    for f in files {
                        s.push_str(&format!("{}\n", f.display()));
                    }
                    emit(&s)?;
                }
            }
            for e in &report.errors {
                eprintln!("{} (n={}): {}", e.method, e.n_cells, e.message);
            }
            Ok(report.pass)
        }
        Command::Compare { config, out, format } => {
            let cfg = ExperimentConfig::load(&config)?;
            let (report, snaps) = run_experiment_with_snapshots(&cfg)?;
            if let Some(dir) = out.or(cfg.out_dir.clone()) {
                write_artifacts(&dir, &report, &snaps)?;
            }
            match format {
                Format::Json => emit(&report.to_json()?)?,
                Format::Csv => {
                    let finest = *report.ladder.last().expect("validated ladder");
                    let mut out = String::from("t,method_a,method_b,l1\n");
                    for s in report.slices.iter().filter(|s| s.n_cells == finest) {
                        for i in 0..report.methods.len() {
                            for j in i + 1..report.methods.len() {
                                let d = s.l1_matrix[i][j].map_or("nan".to_string(), |d| d.to_string());
                                out.push_str(&format!("{},{},{},{d}\n", s.t, report.methods[i], report.methods[j]));
                            }
                        }
                    }
                    emit(&out)?;
                }
            }
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("failed: {} (value {}, tolerance {})", c.name, c.value, c.tolerance);
            }
            Ok(report.pass)
        }
        Command::Verify { input, flux, domain, times, quad_n, out } => {
            let times = match times {
                Some(t) if t.len() == input.len() => t,
                Some(t) => {
                    return Err(Error::Config(format!("{} times for {} inputs", t.len(), input.len())));
                }
                None => input.iter().map(|p| time_from_name(p)).collect::<Result<_>>()?,
            };
            let mut snaps: Vec<GridFunction> =
                input.iter().zip(&times).map(|(p, &t)| read_snapshot_csv(p, t)).collect::<Result<_>>()?;
            snaps.sort_by(|a, b| a.time.total_cmp(&b.time));
            let cand = CandidateSolution::from_snapshots(snaps)?;
            let domain = domain.unwrap_or(if cand.range.1 > cand.range.0 {
                cand.range
            } else {
                (cand.range.0, cand.range.0 + 1.0)
            });
            let fp = FluxConfig::parse(&flux)?.build(domain)?;
            let cfg = CertificateConfig { quad_n, ..CertificateConfig::default() };
            let cert = kruzhkov_certificate(&fp, &cand, &cfg)?;
            let text = to_json(&json!({
                "weak": cert.weak,
                "kruzhkov": cert.kruzhkov,
                "most_negative": cert.most_negative,
                "checks": cert.checks,
                "pass": cert.pass,
            }))?;
            emit(&text)?;
            if let Some(dir) = out {
                write_out(&dir, "verify.json", &text)?;
            }
            Ok(cert.pass)
        }
        Command::Order { input, min, format } => {
            let mut r = csv::Reader::from_path(&input).map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
            let mut pairs = Vec::new();
            for rec in r.records() {
                let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
                let num = |i: usize| -> Result<f64> {
                    rec.get(i)
                        .and_then(|s| s.trim().parse().ok())
                        .ok_or_else(|| Error::Config(format!("{}: bad row {rec:?}", input.display())))
                };
                pairs.push((num(0)?, num(1)?));
            }
            let order = estimate_order(&pairs)?;
            let pass = min.is_none_or(|m| order >= m);
            match format {
                Format::Json => emit(&to_json(&json!({ "order": order, "min": min, "pass": pass }))?)?,
                Format::Csv => emit(&format!("order,pass\n{order},{pass}"))?,
            }
            Ok(pass)
        }
    }
}

/// `t` from a `snapshot_<method>_<h>_<t>.csv` file name.
fn time_from_name(p: &Path) -> Result<f64> {
    p.file_stem()
        .and_then(|s| s.to_str())
        .and_then(|s| s.rsplit('_').next())
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Config(format!("cannot read a time from {}; pass --times", p.display())))
}
