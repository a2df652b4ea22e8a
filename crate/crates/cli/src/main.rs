//! cfslab: experiment driver for the Dirac-sea correlation library.
//!
//! `cfslab <experiment> --config <file> [--out <dir>] [--seed N]`
//!
//! Exit codes: 0 ok, 2 invalid input, 3 numerical failure, 4 assertion
//! failure. Reports are byte-stable for identical inputs; CFSLAB_THREADS
//! caps internal parallelism.

mod config;
mod experiments;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;
use experiments::RunError;

#[derive(Parser)]
#[command(name = "cfslab", version, about = "Dirac-sea correlation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (reports go to stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized experiments
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CorrelationArgs {
    /// JSON experiment configuration (may be assembled from the file
    /// overrides below)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Family description file: {"family": [...]}
    #[arg(long)]
    family: Option<PathBuf>,
    /// Point grid file: {"points": [[t,x1,x2,x3], ...]}
    #[arg(long)]
    points: Option<PathBuf>,
    /// Cutoff file: {"kind": "...", "epsilon": ...}
    #[arg(long)]
    cutoff: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Diagonal kernel quadrature against the norm assembly and spectrum
    KernelDiag(CommonArgs),
    /// Kernel entries over a xi grid, emitted as CSV
    KernelGrid(CommonArgs),
    /// Correlation matrices, ranks and signatures over a point grid
    Correlation(CorrelationArgs),
    /// Vacuum regularity of the four special solutions
    Regularity(CommonArgs),
    /// Hole projection machinery and regularity with holes
    Holes(CommonArgs),
    /// Random particle/antiparticle perturbations of the diagonal kernel
    Perturbation(CommonArgs),
    /// Pairwise separation of correlation operators over a grid
    Injectivity(CommonArgs),
    /// Decay of a packet along a ray, plus spatial-norm invariance
    Decay(CommonArgs),
    /// Momentum-lattice basis sums against the quadrature kernel
    RepresentationSum(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::KernelDiag(a) => run_common("kernel-diag", a),
        Command::KernelGrid(a) => run_common("kernel-grid", a),
        Command::Correlation(a) => run_correlation(a),
        Command::Regularity(a) => run_common("regularity", a),
        Command::Holes(a) => run_common("holes", a),
        Command::Perturbation(a) => run_common("perturbation", a),
        Command::Injectivity(a) => run_common("injectivity", a),
        Command::Decay(a) => run_common("decay", a),
        Command::RepresentationSum(a) => run_common("representation-sum", a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("cfslab: {e}");
            match e {
                RunError::Invalid(_) => ExitCode::from(2),
                RunError::Numerical(_) => ExitCode::from(3),
            }
        }
    }
}

fn run_common(expected: &str, args: CommonArgs) -> Result<ExitCode, RunError> {
    let cfg = load_config(&args.config, expected)?;
    finish(&cfg, args.out.as_deref(), args.seed)
}

fn run_correlation(args: CorrelationArgs) -> Result<ExitCode, RunError> {
    let mut merged = if let Some(path) = &args.config {
        load_config(path, "correlation")?
    } else {
        ExperimentConfig::from_str_checked(r#"{"experiment": "correlation"}"#)
            .map_err(|e| RunError::Invalid(e.to_string()))?
    };
    if let Some(f) = &args.family {
        let fragment = read_fragment(f)?;
        if let Some(list) = fragment.get("family") {
            let specs: Vec<config::PacketSpec> = serde_json::from_value(list.clone())
                .map_err(|e| RunError::Invalid(format!("family file: {e}")))?;
            merged.family = specs;
        } else {
            return Err(RunError::Invalid(
                "family file must contain a \"family\" array".into(),
            ));
        }
    }
    if let Some(p) = &args.points {
        let fragment = read_fragment(p)?;
        if let Some(list) = fragment.get("points") {
            merged.points = serde_json::from_value(list.clone())
                .map_err(|e| RunError::Invalid(format!("points file: {e}")))?;
        } else {
            return Err(RunError::Invalid(
                "points file must contain a \"points\" array".into(),
            ));
        }
    }
    if let Some(c) = &args.cutoff {
        let text = std::fs::read_to_string(c)
            .map_err(|e| RunError::Invalid(format!("cutoff file: {e}")))?;
        let spec: config::CutoffSpec = serde_json::from_str(&text)
            .map_err(|e| RunError::Invalid(format!("cutoff file: {e}")))?;
        merged.cutoff = Some(spec);
    }
    merged
        .validate()
        .map_err(|e| RunError::Invalid(e.to_string()))?;
    finish(&merged, args.out.as_deref(), args.seed)
}

fn read_fragment(path: &std::path::Path) -> Result<serde_json::Value, RunError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| RunError::Invalid(format!("{path:?}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| RunError::Invalid(format!("{path:?}: {e}")))
}

fn load_config(path: &std::path::Path, expected: &str) -> Result<ExperimentConfig, RunError> {
    let cfg = ExperimentConfig::from_path(path).map_err(|e| RunError::Invalid(e.to_string()))?;
    if cfg.experiment != expected {
        return Err(RunError::Invalid(format!(
            "config declares experiment \"{}\" but the subcommand is \"{}\"",
            cfg.experiment, expected
        )));
    }
    Ok(cfg)
}

fn finish(
    cfg: &ExperimentConfig,
    out: Option<&std::path::Path>,
    seed: u64,
) -> Result<ExitCode, RunError> {
    let outcome = experiments::run(cfg, seed)?;
    let json = outcome.report.render();
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| RunError::Invalid(format!("cannot create {dir:?}: {e}")))?;
            let json_path = dir.join(format!("{}.json", cfg.experiment));
            std::fs::write(&json_path, &json)
                .map_err(|e| RunError::Invalid(format!("cannot write {json_path:?}: {e}")))?;
            if let Some(csv) = &outcome.csv {
                let csv_path = dir.join(format!("{}.csv", cfg.experiment));
                std::fs::write(&csv_path, csv.render())
                    .map_err(|e| RunError::Invalid(format!("cannot write {csv_path:?}: {e}")))?;
            }
        }
        None => {
            print!("{json}");
            if let Some(csv) = &outcome.csv {
                print!("{}", csv.render());
            }
        }
    }
    if outcome.report.all_pass() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("cfslab: one or more report assertions failed");
        Ok(ExitCode::from(4))
    }
}
