use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use jlfeas::bench::{emit_report, run_experiment, BenchConfig, Mode, Report, ReportFormat};
use jlfeas::bounds::{
    cone_distance_bound, convhull_bound, pair_distortion_bound, pointed_cone_bound, rlm_finite_bound, DEFAULT_C,
};
use jlfeas::cone::{a_norm, dist_to_convhull, mu_a_lower_bound, project_onto_cone, scp_solve};
use jlfeas::gen::{generate, Distribution, GenSpec, Target};
use jlfeas::instance_file::{InstanceFile, ProjectionInfo};
use jlfeas::mc::{calibrate_c, estimate_distortion, estimate_infeasibility_preservation, estimate_kernel_avoidance};
use jlfeas::projector::{apply_to_instance, sample_projector, ProjectorFamily};
use jlfeas::solver::solve;
use jlfeas::{DenseVector, Error, SolverOptions, Status};

#[derive(Parser)]
#[command(name = "jlfeas", version, about = "Random-projection feasibility testing for Ax = b, x >= 0")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance with a certified label.
    Gen(GenArgs),
    /// Decide feasibility of an instance file.
    Solve(SolveArgs),
    /// Sketch an instance with a random projector.
    Project(ProjectArgs),
    /// Cone and hull geometry of an instance.
    Geometry(GeometryArgs),
    /// Evaluate a success-probability lower bound.
    Bounds(BoundsArgs),
    /// Monte Carlo checks of projection behaviour.
    Verify(VerifyArgs),
    /// Run projected-versus-original experiments from a config file.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Lp,
    Ip,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = parse_from_str::<Distribution>)]
    dist: Distribution,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "lp")]
    mode: ModeArg,
    #[arg(long, value_parser = parse_from_str::<Target>)]
    target: Target,
    /// Scale columns of A and b to unit norm.
    #[arg(long)]
    normalize: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Relative feasibility tolerance.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
}

#[derive(Args)]
struct ProjectArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "gaussian", value_parser = parse_from_str::<ProjectorFamily>)]
    family: ProjectorFamily,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeometryOp {
    /// Separating hyperplane with maximal margin.
    Scp,
    /// Projection of b onto cone(A).
    ProjectCone,
    /// Distance from b to conv(A).
    HullDist,
    /// A-norm of a point of cone(A).
    Anorm,
    /// Sampled lower bound on mu_A.
    Mua,
}

#[derive(Args)]
struct GeometryArgs {
    #[arg(value_enum)]
    op: GeometryOp,
    #[arg(long = "in")]
    input: PathBuf,
    /// Point for `anorm` (comma separated); defaults to b.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
    /// Random cone points sampled by `mua`.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKindArg {
    Pair,
    Rlm,
    Pointed,
    Hull,
    Cone,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_enum)]
    kind: BoundKindArg,
    /// Number of points (`pair`).
    #[arg(long)]
    points: Option<usize>,
    /// Number of generators (`pointed`, `hull`, `cone`).
    #[arg(long)]
    n: Option<usize>,
    /// Cardinality of the restriction set (`rlm`).
    #[arg(long)]
    card: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    k: f64,
    #[arg(long = "C", default_value_t = DEFAULT_C)]
    c: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(subcommand)]
    check: VerifyCommand,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Rate of (1 - eps) <= ||Tx|| <= (1 + eps) for unit x.
    Distortion {
        #[arg(long, default_value = "gaussian", value_parser = parse_from_str::<ProjectorFamily>)]
        family: ProjectorFamily,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rate of Tx != 0 for nonzero x.
    Kernel {
        #[arg(long, default_value = "gaussian", value_parser = parse_from_str::<ProjectorFamily>)]
        family: ProjectorFamily,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rate at which sketches of an instance keep its verdict.
    Preservation {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "gaussian", value_parser = parse_from_str::<ProjectorFamily>)]
        family: ProjectorFamily,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        projectors: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fit the constant C of 1 - 2 exp(-C eps^2 k) to empirical rates.
    Calibrate {
        #[arg(long, default_value = "gaussian", value_parser = parse_from_str::<ProjectorFamily>)]
        family: ProjectorFamily,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.5")]
        eps_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "50,200")]
        k_grid: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Markdown,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Report destination; `-` writes to standard output.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

fn parse_from_str<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

// A closed pipe (`| head`) is not an error worth reporting.
fn print_json(v: &Value) {
    let _ = writeln!(io::stdout().lock(), "{}", serde_json::to_string_pretty(v).expect("json value"));
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn run_gen(args: GenArgs) -> jlfeas::Result<()> {
    let spec = GenSpec {
        domain: match args.mode {
            ModeArg::Lp => Mode::Lp.domain(),
            ModeArg::Ip => Mode::Ip.domain(),
        },
        normalize_columns: args.normalize,
        ..GenSpec::new(args.dist, args.m, args.n, args.target, args.seed)
    };
    let g = generate(&spec)?;
    InstanceFile::from_generated(&g).write(&args.out)?;
    print_json(&json!({
        "out": args.out.display().to_string(),
        "m": args.m,
        "n": args.n,
        "label": g.label,
    }));
    Ok(())
}

fn run_solve(args: SolveArgs) -> jlfeas::Result<()> {
    let file = InstanceFile::read(&args.input)?;
    let opts = SolverOptions {
        feas_tol: args.tol,
        ..SolverOptions::default()
    };
    print_json(&to_json(&solve(&file.instance, &opts)?));
    Ok(())
}

fn run_project(args: ProjectArgs) -> jlfeas::Result<()> {
    let file = InstanceFile::read(&args.input)?;
    let t = sample_projector(args.family, args.k, file.instance.m(), args.seed)?;
    let projected = apply_to_instance(&t, &file.instance)?;
    // A witness survives any linear map; a certificate and an infeasible
    // label do not.
    let feasible = file.label == Some(Target::Feasible);
    let out = InstanceFile {
        instance: projected,
        label: if feasible { file.label } else { None },
        witness: file.witness.clone(),
        certificate: None,
        provenance: file.provenance.clone(),
        projection: Some(ProjectionInfo {
            family: args.family,
            k: args.k,
            seed: args.seed,
            source_m: file.instance.m(),
        }),
    };
    out.write(&args.out)?;
    print_json(&json!({
        "out": args.out.display().to_string(),
        "k": args.k,
        "family": args.family,
        "seed": args.seed,
    }));
    Ok(())
}

fn run_geometry(args: GeometryArgs) -> jlfeas::Result<()> {
    let file = InstanceFile::read(&args.input)?;
    let (a, b) = (file.instance.a(), file.instance.b());
    let opts = SolverOptions::default();
    let value = match args.op {
        GeometryOp::Scp => to_json(&scp_solve(a, b, &opts)?),
        GeometryOp::ProjectCone => to_json(&project_onto_cone(a, b)?),
        GeometryOp::HullDist => to_json(&dist_to_convhull(a, b)?),
        GeometryOp::Anorm => {
            let x = match args.x {
                Some(v) => DenseVector::new(v)?,
                None => b.clone(),
            };
            to_json(&a_norm(a, &x, &opts)?)
        }
        GeometryOp::Mua => json!({
            "mu_a_lower_bound": mu_a_lower_bound(a, args.samples, args.seed, &opts)?,
            "samples": args.samples,
            "seed": args.seed,
        }),
    };
    print_json(&value);
    Ok(())
}

fn need<T>(v: Option<T>, flag: &str, kind: &str) -> jlfeas::Result<T> {
    v.ok_or_else(|| Error::Usage(format!("--{flag} is required for --kind {kind}")))
}

fn run_bounds(args: BoundsArgs) -> jlfeas::Result<()> {
    let report = match args.kind {
        BoundKindArg::Pair => pair_distortion_bound(need(args.points, "points", "pair")?, need(args.eps, "eps", "pair")?, args.k, args.c),
        BoundKindArg::Rlm => rlm_finite_bound(need(args.card, "card", "rlm")?, args.k, args.c),
        BoundKindArg::Pointed => pointed_cone_bound(need(args.n, "n", "pointed")?, need(args.eps, "eps", "pointed")?, args.k, args.c),
        BoundKindArg::Hull => convhull_bound(need(args.n, "n", "hull")?, need(args.eps, "eps", "hull")?, args.k, args.c),
        BoundKindArg::Cone => cone_distance_bound(need(args.n, "n", "cone")?, need(args.eps, "eps", "cone")?, args.k, args.c),
    };
    print_json(&to_json(&report));
    Ok(())
}

fn run_verify(args: VerifyArgs) -> jlfeas::Result<()> {
    let value = match args.check {
        VerifyCommand::Distortion { family, k, m, eps, trials, seed } => {
            to_json(&estimate_distortion(family, k, m, eps, trials, seed)?)
        }
        VerifyCommand::Kernel { family, k, m, trials, seed } => {
            to_json(&estimate_kernel_avoidance(family, k, m, trials, seed)?)
        }
        VerifyCommand::Preservation { input, family, k, projectors, seed } => {
            let file = InstanceFile::read(&input)?;
            let report = estimate_infeasibility_preservation(&file.instance, family, k, projectors, seed, &SolverOptions::default())?;
            json!({
                "estimate": report.estimate,
                "original_status": report.original_status,
                "wrong_direction": report.wrong_direction,
                "unknown": report.projected.iter().filter(|&&s| s == Status::Unknown).count(),
            })
        }
        VerifyCommand::Calibrate { family, eps_grid, k_grid, trials, seed } => {
            to_json(&calibrate_c(family, &eps_grid, &k_grid, trials, seed)?)
        }
    };
    print_json(&value);
    Ok(())
}

fn write_output(path: &Path, text: &str) -> jlfeas::Result<()> {
    if path.as_os_str() == "-" {
        let _ = io::stdout().lock().write_all(text.as_bytes());
    } else {
        fs::write(path, text)?;
    }
    Ok(())
}

fn run_bench(args: BenchArgs) -> jlfeas::Result<()> {
    let experiments = BenchConfig::from_json(&fs::read_to_string(&args.config)?)?;
    let opts = SolverOptions::default();
    let mut report = Report::default();
    for cfg in &experiments {
        report.rows.extend(run_experiment(cfg, &opts)?.report.rows);
    }
    let format = match args.format {
        FormatArg::Csv => ReportFormat::Csv,
        FormatArg::Markdown => ReportFormat::Markdown,
    };
    write_output(&args.out, &emit_report(&report, format))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Solve(a) => run_solve(a),
        Command::Project(a) => run_project(a),
        Command::Geometry(a) => run_geometry(a),
        Command::Bounds(a) => run_bounds(a),
        Command::Verify(a) => run_verify(a),
        Command::Bench(a) => run_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
