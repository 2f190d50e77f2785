//! Command-line driver for certified sum-of-norms clustering.
//!
//! Verbs:
//!   gen      write a synthetic weighted dataset as CSV
//!   solve    sweep lambda values, certify, persist certificates + report
//!   verify   independently re-check a certificate file
//!   plotdata turn a report CSV into per-figure series
//!
//! Exit codes: 0 success / all lambdas certified, 1 some lambda hit the
//! iteration cap, 2 I/O failure, 3 configuration error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use soncert::certify::ClusterMethod;
use soncert::driver::{
    emit_plot_data, emit_plot_data_rows, read_report_rows, run_sweep, verify_certificate,
    DataSource, RunConfig,
};
use soncert::error::Error;
use soncert::experiments::WeightMode;

#[derive(Parser)]
#[command(name = "soncert", version, about = "Certified sum-of-norms clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset CSV (half moons or Gaussian mixture).
    Gen(GenArgs),
    /// Solve and certify across one or more lambda values.
    Solve(SolveArgs),
    /// Re-verify a certificate from its stored (x, delta) alone.
    Verify(VerifyArgs),
    /// Emit plot series (lambda vs iterations / Rand index / gap) from a report.
    Plotdata(PlotArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Generator: halfmoons | mixture
    kind: String,
    /// Number of points.
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Half-moon noise standard deviation.
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    /// Mixture mean separation in component standard deviations.
    #[arg(long, default_value_t = 4.0)]
    sep: f64,
    /// Mixture weight law: mixture | component.
    #[arg(long, default_value = "mixture")]
    weights: WeightMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Dataset CSV (header x1..xd,weight[,label]).
    #[arg(long, conflicts_with_all = ["halfmoons", "mixture"])]
    data: Option<PathBuf>,
    /// Generate a half-moon dataset with this many points instead.
    #[arg(long)]
    halfmoons: Option<usize>,
    /// Generate a Gaussian-mixture dataset with this many points instead.
    #[arg(long, conflicts_with = "halfmoons")]
    mixture: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 4.0)]
    sep: f64,
    #[arg(long, default_value = "mixture")]
    weights: WeightMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Explicit lambda values (repeat or comma-separate).
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,
    /// Linearly spaced lambdas lo:hi:count.
    #[arg(long)]
    lambda_range: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    nu: f64,
    /// Certification interval in iterations.
    #[arg(long, default_value_t = 8)]
    certify_every: usize,
    #[arg(long, default_value_t = 50_000)]
    max_iters: usize,
    /// Cluster extraction: ball | graph.
    #[arg(long, default_value = "graph")]
    method: ClusterMethod,
    /// Output directory for certificates and the report CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Start each lambda from the previous solution.
    #[arg(long)]
    warm_start: bool,
    /// Wall-clock guard per lambda, in seconds.
    #[arg(long)]
    time_limit_secs: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Certificate JSON file.
    cert: PathBuf,
    /// Optional dataset CSV the certificate must match.
    #[arg(long)]
    data: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Report CSV written by `solve`.
    #[arg(long)]
    report: PathBuf,
    /// Output directory for the series files.
    #[arg(long)]
    out: PathBuf,
}

fn parse_lambda_range(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("--lambda-range wants lo:hi:count, got '{spec}'"));
    }
    let lo: f64 = parts[0].parse().map_err(|_| "bad lo".to_string())?;
    let hi: f64 = parts[1].parse().map_err(|_| "bad hi".to_string())?;
    let count: usize = parts[2].parse().map_err(|_| "bad count".to_string())?;
    if count == 0 {
        return Err("count must be >= 1".into());
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (count - 1) as f64;
    Ok((0..count).map(|k| lo + step * k as f64).collect())
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::Json(_) | Error::Certificate(_) => 2,
        Error::InvalidConfig(_) | Error::InvalidDataset(_) | Error::DimensionMismatch { .. } => 3,
        _ => 1,
    }
}

fn run_gen(args: GenArgs) -> Result<(), Error> {
    let data = match args.kind.as_str() {
        "halfmoons" => soncert::gen_half_moons(args.n, args.noise, args.seed)?,
        "mixture" => soncert::gen_gauss_mixture(args.n, args.sep, args.seed, args.weights)?,
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown generator '{other}' (halfmoons|mixture)"
            )))
        }
    };
    soncert::files::write_dataset_csv(&args.out, &data.points, &data.weights, Some(&data.truth))?;
    println!("wrote {} points to {}", data.points.n(), args.out.display());
    Ok(())
}

fn run_solve(args: SolveArgs) -> Result<bool, Error> {
    let source = if let Some(path) = args.data {
        DataSource::Csv(path)
    } else if let Some(n) = args.halfmoons {
        DataSource::HalfMoons {
            n,
            noise_sd: args.noise,
            seed: args.seed,
        }
    } else if let Some(n) = args.mixture {
        DataSource::GaussMixture {
            n,
            sep_sds: args.sep,
            seed: args.seed,
            mode: args.weights,
        }
    } else {
        return Err(Error::InvalidConfig(
            "need --data, --halfmoons or --mixture".into(),
        ));
    };

    let mut lambdas = args.lambda.clone();
    if let Some(spec) = &args.lambda_range {
        lambdas.extend(parse_lambda_range(spec).map_err(Error::InvalidConfig)?);
    }

    let cfg = RunConfig {
        source,
        lambdas,
        nu: args.nu,
        certify_every: args.certify_every,
        max_iters: args.max_iters,
        method: args.method,
        out_dir: args.out.clone(),
        warm_start: args.warm_start,
        time_limit: args.time_limit_secs.map(Duration::from_secs_f64),
        run_to_cap: false,
    };
    let report = run_sweep(&cfg)?;

    println!("lambda        iters      mu            verdict          clusters  rand");
    for rec in &report.records {
        let rand = rec
            .rand_index
            .map(|v| format!("{v:.4}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:<12.6} {:>7}  {:<12.6e}  {:<15}  {:>5}     {}",
            rec.lambda,
            rec.iterations,
            rec.mu,
            rec.verdict.to_string(),
            rec.certificate.clusters.num_clusters(),
            rand
        );
    }
    if let Some(dir) = &args.out {
        emit_plot_data(&report, dir)?;
        println!("report and certificates under {}", dir.display());
    }
    Ok(report.all_certified())
}

fn run_verify(args: VerifyArgs) -> Result<bool, Error> {
    let outcome = verify_certificate(&args.cert, args.data.as_deref())?;
    if outcome.pass() {
        println!(
            "PASS: certificate re-verified (duality gap {:.6e})",
            outcome.mu.unwrap_or(f64::NAN)
        );
        Ok(true)
    } else {
        println!("FAIL:");
        for f in &outcome.failures {
            println!("  - {f}");
        }
        Ok(false)
    }
}

fn run_plotdata(args: PlotArgs) -> Result<(), Error> {
    let rows = read_report_rows(&args.report)?;
    emit_plot_data_rows(&rows, &args.out)?;
    println!("plot series under {}", args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => run_gen(args).map(|()| true),
        Command::Solve(args) => run_solve(args),
        Command::Verify(args) => run_verify(args),
        Command::Plotdata(args) => run_plotdata(args).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
