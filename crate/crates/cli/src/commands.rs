use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use frac_core::solver::solve;
use frac_core::stability::{verify, StabilityCertificate};
use rayon::prelude::*;

use crate::config::{LoadedProblem, ProblemFile};
use crate::error::{CliError, ExitCode};
use crate::output::{self, float};

/// Solve psi-Hilfer fractional Volterra integro-differential equations and
/// certify their Ulam-type stability bounds.
#[derive(Debug, Parser)]
#[command(name = "frac", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the problem and write the solution grid as CSV.
    Solve(CommonArgs),
    /// Solve, perturb and write a stability certificate (JSON plus CSV).
    Verify(CommonArgs),
    /// Run `verify` for each value of one parameter and write a summary CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Problem file (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output file.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides verify.seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides domain.n.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Alpha,
    Beta,
    #[value(name = "T")]
    Horizon,
    Epsilon,
    N,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Alpha => "alpha",
            SweepParam::Beta => "beta",
            SweepParam::Horizon => "T",
            SweepParam::Epsilon => "epsilon",
            SweepParam::N => "n",
        }
    }

    fn apply(self, file: &mut ProblemFile, raw: &str) -> Result<(), CliError> {
        let value: f64 = raw
            .parse()
            .map_err(|_| CliError::Input(format!("'{raw}' is not a number")))?;
        match self {
            SweepParam::Alpha => file.order.alpha = value,
            SweepParam::Beta => file.order.beta = value,
            SweepParam::Horizon => file.domain.horizon = value,
            SweepParam::Epsilon => {
                if file.functions.phi.is_some() {
                    return Err(CliError::Input(
                        "epsilon cannot be swept on a phi problem".into(),
                    ));
                }
                file.constants.epsilon = Some(value);
            }
            SweepParam::N => {
                if !(value >= 2.0 && value.fract() == 0.0 && value <= 1e7) {
                    return Err(CliError::Input(format!(
                        "n must be an integer >= 2, got {raw}"
                    )));
                }
                file.domain.n = value as usize;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Parameter to vary.
    #[arg(long)]
    pub param: SweepParam,
    /// Comma-separated values, processed in the given order.
    #[arg(long, allow_hyphen_values = true)]
    pub values: String,
}

/// Sizes rayon's global pool from `FRAC_NUM_THREADS` when it is set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("FRAC_NUM_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Input(format!(
            "FRAC_NUM_THREADS must be a positive integer, got '{raw}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Input(format!("cannot configure thread pool: {e}")))
}

fn load(args: &CommonArgs) -> Result<(ProblemFile, LoadedProblem), CliError> {
    let mut file = ProblemFile::load(&args.config)?;
    if let Some(n) = args.n {
        file.domain.n = n;
    }
    let mut problem = file.build()?;
    if let Some(seed) = args.seed {
        problem.verify.seed = seed;
    }
    Ok((file, problem))
}

pub fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Sweep(args) => cmd_sweep(&args),
    }
}

pub fn cmd_solve(args: &CommonArgs) -> Result<ExitCode, CliError> {
    let (_, problem) = load(args)?;
    let report =
        solve(&problem.spec, problem.tol, problem.max_iter).map_err(CliError::from_solver)?;
    output::write_file(
        &args.out,
        &output::solution_csv(&report.solution, report.first_checked_node),
    )?;
    println!("iterations: {}", report.iterations);
    println!("final residual: {:e}", report.final_residual());
    if let Some(q) = report.contraction_estimate {
        println!("observed contraction rate: {q:.6}");
    }
    println!("wrote {}", args.out.display());
    if report.converged {
        Ok(ExitCode::Success)
    } else {
        Err(CliError::Numeric(format!(
            "no convergence to tol = {:e} within {} iterations; the CSV holds the last iterate",
            problem.tol, problem.max_iter
        )))
    }
}

fn certify(problem: &LoadedProblem) -> Result<StabilityCertificate, CliError> {
    verify(&problem.spec, &problem.verify).map_err(CliError::from_stability)
}

pub fn cmd_verify(args: &CommonArgs) -> Result<ExitCode, CliError> {
    let (_, problem) = load(args)?;
    let cert = certify(&problem)?;
    write_certificate(&cert, &args.out)?;
    for w in &cert.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "mode {}: M = {}, q = {}, bound max = {}",
        cert.mode.label(),
        cert.m,
        cert.contraction_q,
        cert.bound_summary.max
    );
    println!(
        "{} perturbations, empirical max deviation {}, max margin {} (slack {})",
        cert.perturbations_tested, cert.empirical_max_deviation, cert.max_margin, cert.slack
    );
    println!("certified: {}", cert.certified);
    Ok(if cert.certified {
        ExitCode::Success
    } else {
        ExitCode::NotCertified
    })
}

fn write_certificate(cert: &StabilityCertificate, out: &Path) -> Result<(), CliError> {
    output::write_file(out, &output::certificate_json(cert))?;
    let csv = output::companion_csv_path(out);
    output::write_file(&csv, &output::certificate_csv(cert))?;
    println!("wrote {} and {}", out.display(), csv.display());
    Ok(())
}

/// Row status of a sweep. Failed rows leave the numeric columns empty.
fn sweep_status(e: &CliError) -> &'static str {
    match e.exit_code() {
        ExitCode::HypothesisFailure => "hypothesis_failure",
        ExitCode::InputError => "invalid_value",
        _ => "numeric_failure",
    }
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode, CliError> {
    let values: Vec<&str> = args
        .values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .collect();
    if values.is_empty() {
        return Err(CliError::Input("--values is empty".into()));
    }
    let (base, _) = load(&args.common)?;
    let rows: Vec<String> = values
        .par_iter()
        .map(|raw| {
            let run = || -> Result<StabilityCertificate, CliError> {
                let mut file = base.clone();
                args.param.apply(&mut file, raw)?;
                let mut problem = file.build()?;
                if let Some(seed) = args.common.seed {
                    problem.verify.seed = seed;
                }
                certify(&problem)
            };
            match run() {
                Ok(c) => format!(
                    "{raw},{},{},{},{},{},ok",
                    float(c.m),
                    float(c.contraction_q),
                    float(c.bound_summary.max),
                    float(c.empirical_max_deviation),
                    c.certified
                ),
                Err(e) => {
                    eprintln!("{} = {raw}: {e}", args.param.name());
                    format!("{raw},,,,,false,{}", sweep_status(&e))
                }
            }
        })
        .collect();
    let mut csv = String::from("param_value,M,q,bound_max,empirical_max,certified,status\n");
    for row in rows {
        csv.push_str(&row);
        csv.push('\n');
    }
    output::write_file(&args.common.out, &csv)?;
    println!(
        "wrote {} ({} rows)",
        args.common.out.display(),
        values.len()
    );
    Ok(ExitCode::Success)
}
