//! `mcprofile`: adjusted-profile confidence intervals from the command line.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical error,
//! 3 excessive replicate failure rate in a simulation run.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mcprofile::error::McapError;
use mcprofile::toy::ToySpec;
use mcprofile::{mcap, read_profile_csv, write_fit_table, write_result};

#[derive(Parser)]
#[command(
    name = "mcprofile",
    version,
    about = "Monte Carlo adjusted profile likelihood confidence intervals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit an adjusted profile to a CSV of (parameter, loglik) evaluations.
    Fit {
        /// Input CSV with header `parameter,loglik`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        /// Smoother span: fraction of points in each local fit.
        #[arg(long, default_value_t = 0.75)]
        lambda: f64,
        /// Evaluation grid resolution.
        #[arg(long, default_value_t = 1000)]
        ngrid: usize,
        /// Output JSON path.
        #[arg(long, default_value = "result.json")]
        out: PathBuf,
        /// Optional plot-ready CSV of (parameter, smoothed, quadratic).
        #[arg(long)]
        fit_table: Option<PathBuf>,
    },
    /// Run the lognormal latent-variable coverage study.
    Simulate {
        /// Sample size per replicate.
        #[arg(long, default_value_t = 50)]
        n: usize,
        /// Monte Carlo effort per density evaluation.
        #[arg(long, default_value_t = 3)]
        j: usize,
        /// True log-mean.
        #[arg(long, default_value_t = 0.0)]
        phi0: f64,
        /// True sigma.
        #[arg(long, default_value_t = 1.0)]
        sigma0: f64,
        /// Number of profile points per replicate.
        #[arg(long, default_value_t = 25)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        replications: usize,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        /// Master seed for all random streams.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (default: all cores). Results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        /// Output JSON path.
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
    },
}

fn exit_code_for(err: &McapError) -> ExitCode {
    match err {
        McapError::ReplicateFailureRate { .. } => ExitCode::from(3),
        e if e.is_numerical() => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn run_fit(
    input: &PathBuf,
    confidence: f64,
    lambda: f64,
    ngrid: usize,
    out: &PathBuf,
    fit_table: Option<&PathBuf>,
) -> Result<(), McapError> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(McapError::InvalidConfidence(confidence));
    }
    let points = read_profile_csv(input)?;
    let result = mcap(&points, confidence, lambda, ngrid)?;
    write_result(&result, out)?;
    if let Some(path) = fit_table {
        write_fit_table(&result, path)?;
    }
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "mle={} ci=[{},{}] delta={} se_mc={} se_stat={}",
        result.mle,
        result.ci.0,
        result.ci.1,
        result.budget.delta,
        result.budget.se_mc,
        result.budget.se_stat
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_simulate(
    spec: ToySpec,
    replications: usize,
    confidence: f64,
    threads: Option<usize>,
    out: &PathBuf,
) -> Result<(), McapError> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(McapError::InvalidConfidence(confidence));
    }
    if replications < 100 {
        return Err(McapError::DomainError(format!(
            "replications = {replications}, need at least 100"
        )));
    }
    spec.validate()?;

    let report = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| McapError::DomainError(e.to_string()))?
            .install(|| spec.coverage_study(replications, confidence)),
        None => spec.coverage_study(replications, confidence),
    }?;

    let mut file = File::create(out)?;
    serde_json::to_writer_pretty(&mut file, &report)?;
    writeln!(file)?;
    println!(
        "replications={} mcap_coverage={} exact_coverage={} mean_width_ratio={} failed={}",
        report.replications,
        report.mcap_coverage,
        report.exact_coverage,
        report.mean_width_ratio,
        report.failed_replicates
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fit {
            input,
            confidence,
            lambda,
            ngrid,
            out,
            fit_table,
        } => run_fit(&input, confidence, lambda, ngrid, &out, fit_table.as_ref()),
        Command::Simulate {
            n,
            j,
            phi0,
            sigma0,
            k,
            replications,
            confidence,
            seed,
            threads,
            out,
        } => {
            let spec = ToySpec {
                n,
                j,
                phi0,
                sigma0,
                k,
                master_seed: seed,
            };
            run_simulate(spec, replications, confidence, threads, &out)
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}: {err}", err.name());
            exit_code_for(&err)
        }
    }
}
