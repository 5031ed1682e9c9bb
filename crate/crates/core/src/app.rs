//! Run orchestration, artifact output and the command-line front end.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::config::{parse_config, preset, RunConfig, Scenario, VariantPolicy, PRESETS};
use crate::diagnostics::{evaluate_gates, GateReport, GateStatus};
use crate::error::{ConfigError, LyapunovError, RunError};
use crate::integrator::{run, Monitor, RunOptions, RunResult, RunStatus};
use crate::lyapunov::{choose_coefficients, quadratic_form_certificate, Certificate, Variant};
use crate::reactions::{sign_profile, SignClass};

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Lyapunov(#[from] LyapunovError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Certificate of one monitor, as written to `certificate.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorCertificate {
    pub label: String,
    pub pair: (usize, usize),
    /// Sign classification the variant was chosen from (`None` if fixed).
    pub probe_sign: Option<SignClass>,
    pub certificate: Certificate,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: RunResult,
    pub gates: GateReport,
    pub certificates: Vec<MonitorCertificate>,
}

impl Outcome {
    /// 0 when every gate passes, 3 on blow-up, 2 on any other failure.
    pub fn exit_code(&self) -> i32 {
        if self.result.status == RunStatus::BlowUp {
            3
        } else if self.gates.pass {
            0
        } else {
            2
        }
    }
}

/// Sign of each balance pair's reaction at the end of a probe over the
/// first 5% of the horizon.
pub fn probe_signs(scenario: &Scenario) -> Result<Vec<SignClass>, RunError> {
    let opts = RunOptions {
        horizon: 0.05 * scenario.options.horizon,
        monitors: Vec::new(),
        cadence: usize::MAX,
        ..scenario.options.clone()
    };
    let probe = run(&scenario.initial, &scenario.spec, &scenario.bc, &opts)?;
    if probe.status == RunStatus::BlowUp {
        return Ok(vec![SignClass::Mixed; scenario.spec.balance_pairs().len()]);
    }
    let s = &probe.final_state;
    Ok(sign_profile(&scenario.spec, s.t, &s.grid, &s.species))
}

/// One monitor per balance pair and chosen variant, with certificates.
pub fn resolve_monitors(
    cfg: &RunConfig,
    scenario: &Scenario,
) -> Result<Vec<(Monitor, MonitorCertificate)>, AppError> {
    if !cfg.lyapunov.enabled {
        return Ok(Vec::new());
    }
    let pairs = scenario.spec.balance_pairs();
    let signs = match cfg.lyapunov.variant {
        VariantPolicy::Auto => Some(probe_signs(scenario)?),
        VariantPolicy::Fixed(_) => None,
    };
    let mut out = Vec::new();
    for (n, &(i, j)) in pairs.iter().enumerate() {
        let sign = signs.as_ref().map(|s| s[n]);
        let variants = match (cfg.lyapunov.variant, sign) {
            (VariantPolicy::Fixed(v), _) => vec![v],
            (VariantPolicy::Auto, Some(s)) => match Variant::for_sign(s) {
                Some(v) => vec![v],
                None => vec![Variant::Decreasing, Variant::Increasing],
            },
            (VariantPolicy::Auto, None) => unreachable!("auto policy always probes"),
        };
        let (a, b) = (scenario.initial.diffusion[i], scenario.initial.diffusion[j]);
        let (dec, inc) = choose_coefficients(a, b, cfg.lyapunov.p, cfg.lyapunov.margin)?;
        for v in &variants {
            let coeffs = match v {
                Variant::Decreasing => dec.clone(),
                Variant::Increasing => inc.clone(),
            };
            let label = if variants.len() == 1 {
                format!("{i}_{j}")
            } else {
                format!("{i}_{j}_{}", &v.label()[..3])
            };
            let certificate = quadratic_form_certificate(a, b, &coeffs);
            out.push((
                Monitor {
                    label: label.clone(),
                    pair: (i, j),
                    coeffs,
                },
                MonitorCertificate {
                    label,
                    pair: (i, j),
                    probe_sign: sign,
                    certificate,
                },
            ));
        }
    }
    Ok(out)
}

/// Builds, monitors, runs and gates one configuration.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, AppError> {
    let mut scenario = cfg.build()?;
    let monitors = resolve_monitors(cfg, &scenario)?;
    let (monitors, certificates): (Vec<_>, Vec<_>) = monitors.into_iter().unzip();
    scenario.options.monitors = monitors;
    let result = run(
        &scenario.initial,
        &scenario.spec,
        &scenario.bc,
        &scenario.options,
    )?;
    let gates = evaluate_gates(&result.record, &cfg.tolerances);
    Ok(Outcome {
        result,
        gates,
        certificates,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), AppError> {
    fs::write(path, contents).map_err(|source| AppError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `record.csv`, `record.json`, `gates.json` and `certificate.json`.
/// The record formats follow `output.formats`.
pub fn write_artifacts(dir: &Path, cfg: &RunConfig, outcome: &Outcome) -> Result<(), AppError> {
    fs::create_dir_all(dir).map_err(|source| AppError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let record = &outcome.result.record;
    if cfg.output.formats.iter().any(|f| f == "csv") {
        write(&dir.join("record.csv"), &record.to_csv())?;
    }
    if cfg.output.formats.iter().any(|f| f == "json") {
        write(
            &dir.join("record.json"),
            &serde_json::to_string_pretty(record)?,
        )?;
    }
    write(
        &dir.join("gates.json"),
        &serde_json::to_string_pretty(&outcome.gates)?,
    )?;
    write(
        &dir.join("certificate.json"),
        &serde_json::to_string_pretty(&outcome.certificates)?,
    )?;
    Ok(())
}

#[derive(Debug, Parser)]
#[command(
    name = "rdlyap",
    version,
    about = "Reaction-diffusion runs with a polynomial Lyapunov monitor"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a configuration and write diagnostics.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a preset configuration, or write it to `<out>/<name>.cfg`.
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the theta sequences and discriminants for diffusions a, b.
    CheckCoefficients {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 2.0)]
        margin: f64,
    },
    /// List scenario presets.
    ListPresets,
}

fn list(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|v| format!("{v:e}")).collect();
    format!("[{}]", items.join(", "))
}

fn check_coefficients(a: f64, b: f64, p: u32, margin: f64) -> Result<i32, AppError> {
    let (dec, inc) = choose_coefficients(a, b, p, margin)?;
    let cd = quadratic_form_certificate(a, b, &dec);
    let ci = quadratic_form_certificate(a, b, &inc);
    println!("a = {a}, b = {b}, p = {p}, margin = {margin}");
    println!("K = {:e}", dec.k());
    println!("c = {:e}", dec.scale());
    println!("C = {:e}", inc.scale());
    println!("theta (decreasing) = {}", list(dec.thetas()));
    println!("theta (increasing) = {}", list(inc.thetas()));
    println!("discriminants (decreasing) = {}", list(&cd.discriminants));
    println!("discriminants (increasing) = {}", list(&ci.discriminants));
    let pass = cd.pass && ci.pass;
    println!("all discriminants negative: {pass}");
    Ok(if pass { 0 } else { 2 })
}

fn run_command(config: &Path, out: Option<PathBuf>) -> Result<i32, AppError> {
    let text = fs::read_to_string(config).map_err(|source| AppError::Io {
        path: config.to_path_buf(),
        source,
    })?;
    let cfg = parse_config(&text)?;
    let outcome = execute(&cfg)?;
    let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    write_artifacts(&dir, &cfg, &outcome)?;

    let r = &outcome.result;
    match r.status {
        RunStatus::Completed => println!(
            "completed: t = {}, {} steps, dt = {:e}",
            r.final_time, r.step_count, r.record.metadata.dt
        ),
        RunStatus::BlowUp => println!(
            "blow-up at t = {} after {} steps (dt = {:e}; re-run at a smaller dt before trusting this)",
            r.final_time, r.step_count, r.record.metadata.dt
        ),
    }
    for g in &outcome.gates.gates {
        let status = match g.status {
            GateStatus::Pass => "pass",
            GateStatus::Fail => "FAIL",
            GateStatus::Skipped => "skip",
        };
        println!("{status:>4}  {}: {}", g.name, g.detail);
    }
    if outcome.gates.sign_unstable {
        println!("note: reaction sign still changing in the second half of the run");
    }
    println!("artifacts in {}", dir.display());
    Ok(outcome.exit_code())
}

fn dispatch(cli: Cli) -> Result<i32, AppError> {
    match cli.command {
        Command::Run { config, out } => run_command(&config, out),
        Command::Preset { name, out } => {
            let text = preset(&name)?.serialize();
            match out {
                None => print!("{text}"),
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(|source| AppError::Io {
                        path: dir.clone(),
                        source,
                    })?;
                    let path = dir.join(format!("{name}.cfg"));
                    write(&path, &text)?;
                    println!("{}", path.display());
                }
            }
            Ok(0)
        }
        Command::CheckCoefficients { a, b, p, margin } => check_coefficients(a, b, p, margin),
        Command::ListPresets => {
            for name in PRESETS {
                println!("{name}");
            }
            Ok(0)
        }
    }
}

/// Entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
