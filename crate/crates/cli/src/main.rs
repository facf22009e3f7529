//! `onebit-cs`: benchmark sweeps, law verification, and one-shot recovery.
//!
//! Exit codes: 0 success, 1 configuration or validation error (including a
//! failed law check), 2 I/O error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use onebit_cs::bench::{aggregate, csv_bytes, run_sweep, Experiment, SweepConfig};
use onebit_cs::history::{history_recover, AlphaMode, HistoryParams};
use onebit_cs::laws::verify_laws;
use onebit_cs::signal_model::{BitMeasurements, MeasurementEnsemble};

#[derive(Parser)]
#[command(
    name = "onebit-cs",
    version,
    about = "1-bit compressed sensing: Hamming support detection with least-squares recovery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded benchmark sweep and write one CSV record per trial.
    Run {
        /// One of: alpha_sda, alpha_time, error_vs_m, error_vs_k,
        /// error_vs_rho, misspecified_k, runtime_table.
        experiment: String,
        /// JSON file mirroring the sweep-config fields; omitted fields
        /// keep the experiment defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Output CSV path (default: <experiment>.csv).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 0 means all cores. The runtime_table experiment
        /// always runs single-threaded.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Monte-Carlo check of the mismatch-probability laws; prints one
    /// PASS/FAIL line per law with the maximum observed deviation.
    VerifyLaws {
        /// Measurement rows for the rate checks (comparison redraws scale
        /// along with it).
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// One-shot recovery from files: a CSV matrix (one measurement row per
    /// line) and a CSV of ±1 bits.
    Recover {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        bits: PathBuf,
        /// Sparsity of the estimate.
        #[arg(long)]
        k: usize,
        /// "adaptive" or a fixed numeric value >= 1.
        #[arg(long, default_value = "adaptive")]
        alpha: String,
        /// Initial redundancy of the adaptive schedule.
        #[arg(long, default_value_t = 4.0)]
        alpha0: f64,
        /// Decay constant of the adaptive schedule.
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        /// Write the recovered vector here (one value per line) instead of
        /// stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Config(String),
    Io(String),
}

impl From<onebit_cs::Error> for CliError {
    fn from(e: onebit_cs::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            let _ = err.print();
            return ExitCode::from(1);
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Run {
            experiment,
            config,
            seed,
            trials,
            out,
            threads,
        } => run_command(&experiment, config.as_deref(), seed, trials, out, threads),
        Command::VerifyLaws { samples, seed } => verify_laws_command(samples, seed),
        Command::Recover {
            matrix,
            bits,
            k,
            alpha,
            alpha0,
            tau,
            out,
        } => recover_command(&matrix, &bits, k, &alpha, alpha0, tau, out.as_deref()),
    }
}

fn run_command(
    experiment: &str,
    config_path: Option<&Path>,
    seed: Option<u64>,
    trials: Option<usize>,
    out: Option<PathBuf>,
    threads: usize,
) -> Result<ExitCode, CliError> {
    let experiment = Experiment::from_id(experiment)?;
    let mut config = match config_path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            SweepConfig::from_json_for(experiment, &text)?
        }
        None => SweepConfig::defaults_for(experiment),
    };
    if let Some(seed) = seed {
        config.base_seed = seed;
    }
    if let Some(trials) = trials {
        config.trials = trials;
    }
    config.validate()?;

    let records = run_sweep(&config, threads)?;
    let out_path = out.unwrap_or_else(|| PathBuf::from(format!("{}.csv", experiment.id())));
    let bytes = csv_bytes(&records);
    fs::write(&out_path, &bytes)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out_path.display())))?;

    let rows = aggregate(&records)?;
    println!(
        "{:<14} {:>6} {:>6} {:>4} {:>5} {:>8} {:<16} {:<8} {:>6} {:>12} {:>9} {:>12}",
        "experiment",
        "m",
        "n",
        "k",
        "rho",
        "k_select",
        "alpha",
        "algo",
        "trials",
        "mean_error",
        "mean_sda",
        "total_time_s"
    );
    for row in &rows {
        println!(
            "{:<14} {:>6} {:>6} {:>4} {:>5} {:>8} {:<16} {:<8} {:>6} {:>12.6} {:>9.3} {:>12.4}",
            row.experiment.id(),
            row.m,
            row.n,
            row.k,
            row.rho,
            row.k_select,
            row.alpha,
            row.algorithm.id(),
            row.trials,
            row.mean_error,
            row.mean_sda,
            row.total_time_s
        );
    }
    eprintln!("wrote {} records to {}", records.len(), out_path.display());
    Ok(ExitCode::SUCCESS)
}

fn verify_laws_command(samples: usize, seed: u64) -> Result<ExitCode, CliError> {
    let report = verify_laws(samples, seed)?;
    for line in report.lines() {
        println!("{line}");
    }
    if report.all_passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(CliError::Config("one or more law checks failed".into()))
    }
}

fn recover_command(
    matrix_path: &Path,
    bits_path: &Path,
    k: usize,
    alpha: &str,
    alpha0: f64,
    tau: f64,
    out: Option<&Path>,
) -> Result<ExitCode, CliError> {
    let matrix_text = fs::read_to_string(matrix_path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", matrix_path.display())))?;
    let bits_text = fs::read_to_string(bits_path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", bits_path.display())))?;

    let a = parse_matrix(&matrix_text)?;
    let y = parse_bits(&bits_text)?;
    let alpha_mode = if alpha == "adaptive" {
        AlphaMode::Adaptive { alpha0, tau }
    } else {
        let value: f64 = alpha.parse().map_err(|_| {
            CliError::Config(format!(
                "--alpha must be 'adaptive' or a number, got '{alpha}'"
            ))
        })?;
        AlphaMode::Fixed { alpha: value }
    };
    let params = HistoryParams::new(k, alpha_mode)?;
    let result = history_recover(&y, &a, &params)?;

    eprintln!("status: {}", result.status.label());
    if let Some(alpha_used) = result.alpha_used {
        eprintln!("alpha_used: {alpha_used}");
    }
    if let Some(candidate) = &result.candidate_support {
        eprintln!("candidate_size: {}", candidate.target_size());
    }
    eprintln!("support: {:?}", result.support);
    eprintln!("time_s: {}", result.wall_time);

    let mut rendered = String::new();
    for v in &result.x_star {
        rendered.push_str(&format!("{v}\n"));
    }
    match out {
        Some(path) => fs::write(path, rendered)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(rendered.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_matrix(text: &str) -> Result<MeasurementEnsemble, CliError> {
    let mut entries = Vec::new();
    let mut n = None;
    let mut m = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| {
                    CliError::Config(format!(
                        "matrix line {}: '{tok}' is not a number",
                        lineno + 1
                    ))
                })
            })
            .collect::<Result<_, _>>()?;
        match n {
            None => n = Some(row.len()),
            Some(width) if width != row.len() => {
                return Err(CliError::Config(format!(
                    "matrix line {} has {} values, expected {width}",
                    lineno + 1,
                    row.len()
                )))
            }
            _ => {}
        }
        entries.extend(row);
        m += 1;
    }
    let n = n.ok_or_else(|| CliError::Config("matrix file is empty".into()))?;
    Ok(MeasurementEnsemble::from_row_major(entries, m, n)?)
}

fn parse_bits(text: &str) -> Result<BitMeasurements, CliError> {
    let mut bits = Vec::new();
    for tok in text.split(|c: char| c == ',' || c.is_whitespace()) {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        match tok {
            "1" | "+1" => bits.push(1i8),
            "-1" => bits.push(-1i8),
            other => {
                return Err(CliError::Config(format!(
                    "bits file entry '{other}' is not +1 or -1"
                )))
            }
        }
    }
    Ok(BitMeasurements::new(bits, 0.0)?)
}
