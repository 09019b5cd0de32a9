//! Command-line front end: parses JSON experiment specs, dispatches to the
//! library, and writes CSV/JSON artifacts deterministically (same spec and
//! seed give byte-identical outputs at any thread count; cap threads with
//! MINKFIELD_THREADS).
//!
//! Exit codes: 0 success / all checks pass, 1 numeric or verification
//! failure, 2 malformed input.

mod artifacts;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use minkfield::gaussian::{
    cholesky_simulate, plane_wave_simulate, representation_constants, MfBfSpec, SimMethod,
};
use minkfield::geometry::{
    associated_star_body, polar_projection_body, radial_pth_mean_body, DirectionGrid,
};
use minkfield::poisson::simulate as poisson_simulate;
use minkfield::report::Report;
use minkfield::verify::{run_by_name, run_suite, Budgets};

use artifacts::{load_spec_arg, parse_spec, to_json_bytes, write_artifact, Failure};
use config::{
    ExperimentConfig, GaugeSpec, GaussRunSpec, PoissonRunSpec, TransformKind, TransformSpec,
};

#[derive(Parser)]
#[command(
    name = "minkfield",
    version,
    about = "Random fields driven by star-body gauges: simulation, geometry, self-checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the spectral-representation constants for (H, d).
    Constants(ConstantsArgs),
    /// Star-body and convex-body utilities.
    #[command(subcommand)]
    Body(BodyCommand),
    /// Sample the Gaussian field at fixed points.
    SimulateGauss(SimArgs),
    /// Sample the compensated Poisson field at fixed points.
    SimulatePoisson(SimArgs),
    /// Run the self-check suite or a single named check.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ConstantsArgs {
    /// Hurst index in (0, 1).
    #[arg(long = "H")]
    hurst: f64,
    /// Ambient dimension.
    #[arg(long = "d")]
    dim: usize,
    /// Also write constants.json (+ config sidecar) here.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BodyCommand {
    /// Evaluate a star-body gauge at a point.
    Gauge(GaugeArgs),
    /// Derive a star body from a convex body.
    Transform(TransformArgs),
}

#[derive(Args)]
struct GaugeArgs {
    /// Spec JSON {"body": <star body>, "at": [x, ...]} (inline, @file, or
    /// path).
    #[arg(long)]
    spec: String,
}

#[derive(Args)]
struct TransformArgs {
    /// Spec JSON {"body": <convex body>, "transform":
    /// "polar_projection"|"radial_mean"|"associated", "p": ..., "H": ...}.
    #[arg(long)]
    spec: String,
    /// Required for the stochastic transforms (radial_mean, associated).
    #[arg(long)]
    seed: Option<u64>,
    /// Sample-cloud size for the Monte Carlo transforms.
    #[arg(long)]
    n_samples: Option<usize>,
    /// Direction-grid resolution.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value = "out")]
    output_dir: PathBuf,
}

#[derive(Args)]
struct SimArgs {
    /// Spec JSON (inline, @file, or path).
    #[arg(long)]
    spec: String,
    /// Replicate-stream seed; same seed reproduces the CSV byte for byte.
    #[arg(long)]
    seed: u64,
    /// Replicates; overrides the spec's n_paths.
    #[arg(long)]
    n_paths: Option<usize>,
    #[arg(long, default_value = "out")]
    output_dir: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// "suite" or one check name (see `verify --help` listing).
    #[arg(default_value = "suite")]
    target: String,
    /// Seed shared by every check; sub-streams are derived per case.
    #[arg(long)]
    seed: u64,
    /// Override the per-check default replicate count.
    #[arg(long)]
    n_paths: Option<usize>,
    /// Override the per-check default sample-cloud size.
    #[arg(long)]
    n_samples: Option<usize>,
    /// Override the per-check default direction-grid resolution.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value = "out")]
    output_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Constants(args) => cmd_constants(args),
        Command::Body(BodyCommand::Gauge(args)) => cmd_gauge(args),
        Command::Body(BodyCommand::Transform(args)) => cmd_transform(args),
        Command::SimulateGauss(args) => cmd_simulate_gauss(args),
        Command::SimulatePoisson(args) => cmd_simulate_poisson(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn cmd_constants(args: ConstantsArgs) -> Result<u8, Failure> {
    let rc = representation_constants(args.hurst, args.dim)?;
    let d = args.dim as f64;
    let residual =
        (rc.a_hd * rc.a_hd * rc.c_h * (2.0 * std::f64::consts::PI).powf(-d / 2.0) - 0.5).abs();
    println!("H = {}", rc.hurst);
    println!("d = {}", rc.dim);
    println!("a = {}", rc.a_hd);
    match rc.b_hd {
        Some(b) => println!("b = {b}"),
        None => println!("b = undefined (H >= d/2)"),
    }
    println!("c_H = {}", rc.c_h);
    println!("half-identity residual = {residual:e}");

    if let Some(dir) = args.output_dir {
        let value = serde_json::json!({
            "H": rc.hurst,
            "d": rc.dim,
            "a": rc.a_hd,
            "b": rc.b_hd,
            "c_H": rc.c_h,
            "half_identity_residual": residual,
        });
        let config = ExperimentConfig {
            command: "constants".into(),
            spec: serde_json::json!({"H": args.hurst, "d": args.dim}),
            seed: None,
            output_dir: dir.display().to_string(),
            budgets: Budgets::default(),
        };
        write_artifact(&dir, "constants.json", &to_json_bytes(&value)?, &config)?;
    }
    Ok(0)
}

fn cmd_gauge(args: GaugeArgs) -> Result<u8, Failure> {
    let text = load_spec_arg(&args.spec)?;
    let spec: GaugeSpec = parse_spec("body gauge", &text)?;
    spec.body.validate()?;
    let value = spec.body.gauge(&spec.at)?;
    println!("gauge = {value}");
    Ok(0)
}

fn direction_grid(dim: usize, n: Option<usize>) -> Result<DirectionGrid, Failure> {
    let grid = match (dim, n) {
        (_, None) => DirectionGrid::default_for_dim(dim)?,
        (2, Some(n)) => DirectionGrid::half_circle(n)?,
        (3, Some(n)) => DirectionGrid::fibonacci_sphere(n)?,
        (d, Some(_)) => {
            return Err(Failure::input(format!(
                "no direction grid in dimension {d}"
            )))
        }
    };
    Ok(grid)
}

fn cmd_transform(args: TransformArgs) -> Result<u8, Failure> {
    let text = load_spec_arg(&args.spec)?;
    let spec: TransformSpec = parse_spec("body transform", &text)?;
    let grid = direction_grid(spec.body.dim(), args.grid)?;
    let n_samples = args.n_samples.unwrap_or(150_000);
    let seed = if spec.transform.is_stochastic() {
        Some(args.seed.ok_or_else(|| {
            Failure::input(format!(
                "--seed is required for the {} transform",
                spec.transform.label()
            ))
        })?)
    } else {
        args.seed
    };

    let result = match spec.transform {
        TransformKind::PolarProjection => polar_projection_body(&spec.body, &grid)?,
        TransformKind::RadialMean => {
            let p = spec.p.ok_or_else(|| {
                Failure::input("the radial_mean transform needs the spec field \"p\"")
            })?;
            radial_pth_mean_body(&spec.body, p, n_samples, seed.unwrap(), &grid)?
        }
        TransformKind::Associated => {
            let hurst = spec.hurst.ok_or_else(|| {
                Failure::input("the associated transform needs the spec field \"H\"")
            })?;
            associated_star_body(&spec.body, hurst, n_samples, seed.unwrap(), &grid)?
        }
    };

    let config = ExperimentConfig {
        command: "body transform".into(),
        spec: serde_json::to_value(&spec)?,
        seed,
        output_dir: args.output_dir.display().to_string(),
        budgets: Budgets {
            n_paths: None,
            n_samples: Some(n_samples),
            grid: Some(grid.len()),
        },
    };
    let name = format!("body-{}.json", spec.transform.label());
    write_artifact(&args.output_dir, &name, &to_json_bytes(&result)?, &config)?;
    Ok(0)
}

fn cmd_simulate_gauss(args: SimArgs) -> Result<u8, Failure> {
    let text = load_spec_arg(&args.spec)?;
    let mut run: GaussRunSpec = parse_spec("simulate-gauss", &text)?;
    let n_paths = args.n_paths.or(run.n_paths).ok_or_else(|| {
        Failure::input("n_paths is required: pass --n-paths or a spec field \"n_paths\"")
    })?;
    run.n_paths = Some(n_paths);

    let spec = MfBfSpec::new(run.hurst, run.body.clone(), run.variant)?;
    let batch = match run.method {
        SimMethod::Cholesky => cholesky_simulate(&spec, &run.points, n_paths, args.seed)?,
        SimMethod::PlaneWave => plane_wave_simulate(&spec, &run.points, n_paths, args.seed)?,
    };

    let config = ExperimentConfig {
        command: "simulate-gauss".into(),
        spec: serde_json::to_value(&run)?,
        seed: Some(args.seed),
        output_dir: args.output_dir.display().to_string(),
        budgets: Budgets {
            n_paths: Some(n_paths),
            ..Budgets::default()
        },
    };
    write_artifact(
        &args.output_dir,
        "gauss-paths.csv",
        batch.to_csv().as_bytes(),
        &config,
    )?;
    let meta = serde_json::json!({
        "seed": batch.seed,
        "method": batch.method,
        "jitter": batch.jitter,
        "n_paths": n_paths,
        "n_points": batch.points.len(),
    });
    write_artifact(
        &args.output_dir,
        "gauss-meta.json",
        &to_json_bytes(&meta)?,
        &config,
    )?;
    Ok(0)
}

fn cmd_simulate_poisson(args: SimArgs) -> Result<u8, Failure> {
    let text = load_spec_arg(&args.spec)?;
    let mut run: PoissonRunSpec = parse_spec("simulate-poisson", &text)?;
    let n_paths = args.n_paths.or(run.n_paths).ok_or_else(|| {
        Failure::input("n_paths is required: pass --n-paths or a spec field \"n_paths\"")
    })?;
    run.n_paths = Some(n_paths);

    let batch = poisson_simulate(&run.field, &run.points, n_paths, args.seed)?;

    let config = ExperimentConfig {
        command: "simulate-poisson".into(),
        spec: serde_json::to_value(&run)?,
        seed: Some(args.seed),
        output_dir: args.output_dir.display().to_string(),
        budgets: Budgets {
            n_paths: Some(n_paths),
            ..Budgets::default()
        },
    };
    write_artifact(
        &args.output_dir,
        "poisson-paths.csv",
        batch.to_csv().as_bytes(),
        &config,
    )?;
    let c = &batch.counters;
    let meta = serde_json::json!({
        "seed": batch.seed,
        "n_paths": n_paths,
        "n_points": batch.points.len(),
        "proposals": c.proposals,
        "kept": c.kept,
        "acceptance_rate": if c.proposals > 0 {
            c.kept as f64 / c.proposals as f64
        } else {
            0.0
        },
        "mean_kept_per_path": c.kept as f64 / n_paths.max(1) as f64,
        "mean_contributing": c.mean_contributing,
    });
    write_artifact(
        &args.output_dir,
        "poisson-meta.json",
        &to_json_bytes(&meta)?,
        &config,
    )?;
    Ok(0)
}

#[derive(serde::Serialize)]
struct VerifySummary {
    pass: bool,
    reports: Vec<Report>,
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let budgets = Budgets {
        n_paths: args.n_paths,
        n_samples: args.n_samples,
        grid: args.grid,
    };
    let reports = if args.target == "suite" {
        run_suite(args.seed, &budgets)?
    } else {
        run_by_name(&args.target, args.seed, &budgets)?
    };

    for r in &reports {
        println!(
            "{}: {} ({:.2}s)",
            r.name,
            if r.pass { "pass" } else { "FAIL" },
            r.runtime_s
        );
    }
    let n_pass = reports.iter().filter(|r| r.pass).count();
    let pass = n_pass == reports.len();
    println!("{}: {}/{} pass", args.target, n_pass, reports.len());

    let summary = VerifySummary { pass, reports };
    let config = ExperimentConfig {
        command: "verify".into(),
        spec: serde_json::json!({"target": args.target}),
        seed: Some(args.seed),
        output_dir: args.output_dir.display().to_string(),
        budgets,
    };
    let name = format!("verify-{}.json", args.target);
    write_artifact(&args.output_dir, &name, &to_json_bytes(&summary)?, &config)?;
    Ok(if pass { 0 } else { 1 })
}
