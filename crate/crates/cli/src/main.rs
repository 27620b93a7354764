//! `bellkit` — command-line interface for the qutrit Bell functional
//! toolkit: quantum predictions, exact polytope bounds, see-saw
//! optimization, coincidence-experiment simulation, and the statistical
//! evaluation pipeline.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use bellkit_core::behavior::BehaviorJson;
use bellkit_core::polytope::bound_certificate;
use bellkit_core::qcore::{canonical_behavior, NoiseModel};
use bellkit_core::seesaw::{optimize, OptimizeOptions, OptimizeReport};
use bellkit_core::simlab::{read_jsonl, simulate, write_jsonl, SimConfig};
use bellkit_core::stats::{analyze, AnalysisReport, AnalyzeOptions};
use bellkit_core::{Error, QUANTUM_MAX};

#[derive(Parser)]
#[command(
    name = "bellkit",
    version,
    about = "Toolkit for the qutrit Bell functional I_a: predictions, exact \
             bounds, see-saw optimization, simulation, and data evaluation",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical quantum behavior and its I_a value
    Predict(PredictArgs),
    /// Print the exact bound certificate (binary max 1, nonsignaling max 4/3)
    Bound,
    /// Run the see-saw search for the quantum maximum
    Optimize(OptimizeArgs),
    /// Simulate the photonic experiment, emitting JSON-lines run records
    Simulate(SimulateArgs),
    /// Evaluate run records: conditions (i)-(iii), I_a, optional MLE fit
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct PredictArgs {
    /// Visibility of the noise model applied to the ideal behavior
    #[arg(long, default_value_t = 1.0)]
    visibility: f64,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Base seed; restart i uses seed + i
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    /// Sweep cap per restart
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    /// Per-sweep improvement threshold for convergence
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Restrict the state to a two-qubit subspace (regression mode)
    #[arg(long)]
    qubit_restricted: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4500)]
    runs: usize,
    /// Collection time per run, seconds
    #[arg(long, default_value_t = 0.5)]
    duration: f64,
    #[arg(long, default_value_t = 0.98)]
    visibility: f64,
    /// Detected pairs per second
    #[arg(long, default_value_t = 33.6)]
    pair_rate: f64,
    /// Stationary relative std of the rate drift
    #[arg(long, default_value_t = 0.05)]
    drift_sigma: f64,
    /// Drift correlation length, in runs
    #[arg(long, default_value_t = 50.0)]
    drift_correlation: f64,
    /// Output file; stdout when omitted
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input JSON-lines file; stdin when omitted
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Analyze only every fifth complete set
    #[arg(long)]
    reduced: bool,
    /// Run the nonsignaling-constrained maximum-likelihood fit
    #[arg(long)]
    mle_fit: bool,
    /// JSON report (default)
    #[arg(long, conflicts_with = "table")]
    json: bool,
    /// Table-2-style plain-text report
    #[arg(long)]
    table: bool,
}

/// Rounds to 9 significant digits so printed reals are stable across
/// platforms and re-parse to the displayed value.
fn sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap()
}

fn sig9_nested(p: &mut Vec<Vec<Vec<Vec<f64>>>>) {
    for x in p.iter_mut() {
        for y in x.iter_mut() {
            for a in y.iter_mut() {
                for b in a.iter_mut() {
                    *b = sig9(*b);
                }
            }
        }
    }
}

#[derive(Serialize)]
struct PredictReport {
    i_a: f64,
    quantum_max: f64,
    visibility: f64,
    behavior: BehaviorJson,
}

fn cmd_predict(args: &PredictArgs) -> Result<(), Error> {
    let noise = NoiseModel::new(args.visibility)?;
    let behavior = noise.apply(&canonical_behavior());
    let mut json = BehaviorJson::from(&behavior);
    sig9_nested(&mut json.p);
    let report = PredictReport {
        i_a: sig9(behavior.i_a()),
        quantum_max: sig9(QUANTUM_MAX),
        visibility: args.visibility,
        behavior: json,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_bound() -> Result<(), Error> {
    let certificate = bound_certificate()?;
    println!("{}", serde_json::to_string_pretty(&certificate)?);
    Ok(())
}

fn cmd_optimize(args: &OptimizeArgs) -> Result<(), Error> {
    let opts = OptimizeOptions {
        seed: args.seed,
        restarts: args.restarts,
        max_iters: args.max_iters,
        tol: args.tol,
        qubit_restricted: args.qubit_restricted,
    };
    let point = optimize(&opts)?;
    let mut report = OptimizeReport::from(&point);
    report.value = sig9(report.value);
    for c in report.state.iter_mut() {
        c[0] = sig9(c[0]);
        c[1] = sig9(c[1]);
    }
    for party in [&mut report.alice, &mut report.bob] {
        for basis in party.iter_mut() {
            for vector in basis.iter_mut() {
                for c in vector.iter_mut() {
                    c[0] = sig9(c[0]);
                    c[1] = sig9(c[1]);
                }
            }
        }
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Error> {
    let config = SimConfig {
        n_runs: args.runs,
        run_duration: args.duration,
        visibility: args.visibility,
        pair_rate: args.pair_rate,
        drift_sigma: args.drift_sigma,
        drift_correlation: args.drift_correlation,
        seed: args.seed,
    };
    let records = simulate(&config)?;
    match &args.output {
        Some(path) => {
            let file = File::create(path)?;
            write_jsonl(&records, BufWriter::new(file))?;
        }
        None => {
            let stdout = io::stdout();
            write_jsonl(&records, BufWriter::new(stdout.lock()))?;
        }
    }
    Ok(())
}

fn round_report(report: &mut AnalysisReport) {
    report.ia_mean = sig9(report.ia_mean);
    report.ia_standard_error = sig9(report.ia_standard_error);
    for c in report.conditions.iter_mut() {
        c.statistic = sig9(c.statistic);
        c.p_value = sig9(c.p_value);
        c.coin_tosses = sig9(c.coin_tosses);
        c.standard_deviations = sig9(c.standard_deviations);
    }
    if let Some(mle) = report.mle.as_mut() {
        mle.ia_fitted = sig9(mle.ia_fitted);
        mle.ia_raw_pooled = sig9(mle.ia_raw_pooled);
    }
}

fn print_table(report: &AnalysisReport) {
    let label = if report.reduced {
        "Reduced data set"
    } else {
        "Full data set"
    };
    println!("{label}: {} complete sets", report.set_count);
    println!(
        "I_a = {:.4} +- {:.4}   ({} runs discarded, {} sets excluded)",
        report.ia_mean, report.ia_standard_error, report.discarded_runs, report.excluded_sets
    );
    println!();
    println!(
        "{:<22} {:>12} {:>12} {:>20}",
        "Condition", "p-value", "Coin tosses", "Standard deviations"
    );
    let names = ["(i) normalization", "(ii) nonsignaling", "(iii) binarity"];
    for (name, c) in names.iter().zip(report.conditions.iter()) {
        println!(
            "{:<22} {:>12.3e} {:>12.1} {:>20.2}",
            name, c.p_value, c.coin_tosses, c.standard_deviations
        );
    }
    if let Some(mle) = &report.mle {
        println!();
        println!(
            "Nonsignaling MLE fit: I_a = {:.4} (raw pooled {:.4}, {})",
            mle.ia_fitted,
            mle.ia_raw_pooled,
            if mle.converged {
                "converged"
            } else {
                "NOT converged"
            }
        );
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), Error> {
    let records = match &args.input {
        Some(path) => read_jsonl(BufReader::new(File::open(path)?))?,
        None => read_jsonl(io::stdin().lock())?,
    };
    let options = AnalyzeOptions {
        reduced: args.reduced,
        mle: args.mle_fit,
    };
    let mut report = analyze(&records, &options)?;
    round_report(&mut report);
    if args.table {
        print_table(&report);
    } else {
        println!("{}", serde_json::to_string_pretty(&report)?);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful exits; anything else
            // is a usage error (exit code 1).
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Predict(args) => cmd_predict(args),
        Command::Bound => cmd_bound(),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Analyze(args) => cmd_analyze(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut stderr = io::stderr().lock();
            let _ = writeln!(stderr, "error: {e}");
            ExitCode::from(2)
        }
    }
}
