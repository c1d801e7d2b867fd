use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ude3::problems::{by_name, catalog};
use ude3::{EngineConfig, Mode, ProblemSpec};
use ude3_cli::campaign::{
    run_campaign, CampaignOutput, CampaignPlan, CompareOutput, EngineConfigPatch,
};
use ude3_cli::external::subprocess_evaluator;
use ude3_cli::output::{csv_document, json_document, render_comparison, render_table};
use ude3_cli::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

/// Constrained differential-evolution benchmark harness.
#[derive(Debug, Parser)]
#[command(name = "ude3", version, about)]
struct Args {
    /// Built-in problem name (see --list-problems).
    #[arg(long, conflicts_with = "problem_file")]
    problem: Option<String>,
    /// JSON declaration of an external problem evaluated over a subprocess
    /// line protocol.
    #[arg(long)]
    problem_file: Option<PathBuf>,
    /// Print the built-in problem catalog and exit.
    #[arg(long)]
    list_problems: bool,
    /// Decision-space dimension; defaults to the problem's natural one.
    #[arg(long)]
    dimension: Option<usize>,
    /// Number of independent runs; run i uses seed `seed + i`.
    #[arg(long, default_value_t = 25)]
    runs: usize,
    /// Base seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Evaluation budget per run (default: 20000 x dimension).
    #[arg(long)]
    max_fes: Option<usize>,
    /// Algorithm variant: ude3 or ude2.
    #[arg(long)]
    mode: Option<String>,
    /// JSON file overriding engine configuration fields (snake_case names).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write machine-readable results to this file.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Format of --output.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Record a per-generation trace in the JSON output.
    #[arg(long)]
    trace: bool,
    /// Run both modes on the same seeds and print a comparison.
    #[arg(long)]
    compare: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn execute(args: Args) -> Result<(), CliError> {
    if args.list_problems {
        for entry in catalog::<f64>() {
            let dims = match entry.dimensionality {
                ude3::problems::Dimensionality::Fixed(d) => format!("D = {d}"),
                ude3::problems::Dimensionality::AtLeast(d) => format!("D >= {d}"),
            };
            let optimum = entry
                .known_optimum
                .as_ref()
                .map(|o| format!("f* = {}", o.f_star))
                .unwrap_or_else(|| "f* unknown".to_string());
            println!("{:<16} {:<10} {}", entry.name, dims, optimum);
        }
        return Ok(());
    }

    let (problem_name, dimension, eq_tol, spec) = resolve_problem(&args)?;
    let config = resolve_config(&args, dimension)?;
    if args.runs == 0 {
        return Err(CliError::Config("--runs must be at least 1".into()));
    }
    let threads = campaign_threads()?;

    let plan = CampaignPlan {
        problem: problem_name,
        dimension,
        runs: args.runs,
        seed0: args.seed,
        trace: args.trace,
        config,
    };

    if args.compare {
        let compare = run_compare(&spec, &plan, eq_tol, threads)?;
        print!("{}", render_table(&compare.ude3));
        println!();
        print!("{}", render_table(&compare.ude2));
        println!();
        print!("{}", render_comparison(&compare));
        if let Some(path) = &args.output {
            let document = match args.format {
                OutputFormat::Json => json_document(&compare),
                OutputFormat::Csv => csv_document(&[&compare.ude3, &compare.ude2]),
            };
            write_output(path, &document)?;
        }
    } else {
        let reports = run_campaign(&spec, &plan, threads).map_err(CliError::from)?;
        let output = CampaignOutput::new(&plan, eq_tol, reports);
        print!("{}", render_table(&output));
        if let Some(path) = &args.output {
            let document = match args.format {
                OutputFormat::Json => json_document(&output),
                OutputFormat::Csv => csv_document(&[&output]),
            };
            write_output(path, &document)?;
        }
    }
    Ok(())
}

fn resolve_problem(args: &Args) -> Result<(String, usize, f64, ProblemSpec<f64>), CliError> {
    match (&args.problem, &args.problem_file) {
        (Some(name), None) => {
            let entry = by_name::<f64>(name)?;
            let dimension = args
                .dimension
                .unwrap_or_else(|| entry.dimensionality.default_dimension());
            let spec = entry.build(dimension)?;
            Ok((name.clone(), dimension, spec.eq_tol(), spec))
        }
        (None, Some(path)) => {
            let spec = subprocess_evaluator(path)?;
            if let Some(d) = args.dimension {
                if d != spec.dimension() {
                    return Err(CliError::Config(format!(
                        "--dimension {d} conflicts with the problem file's dimension {}",
                        spec.dimension()
                    )));
                }
            }
            let name = path.display().to_string();
            Ok((name, spec.dimension(), spec.eq_tol(), spec))
        }
        (None, None) => Err(CliError::Config(
            "one of --problem or --problem-file is required".into(),
        )),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    }
}

fn resolve_config(args: &Args, dimension: usize) -> Result<EngineConfig, CliError> {
    let mut config = EngineConfig::for_dimension(dimension);
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let patch: EngineConfigPatch = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))?;
        patch.apply(&mut config);
    }
    // Explicit flags take precedence over the config file.
    if let Some(max_fes) = args.max_fes {
        config.max_fes = max_fes;
    }
    if let Some(mode) = &args.mode {
        config.mode = mode.parse::<Mode>().map_err(CliError::from)?;
    }
    config.validate().map_err(CliError::from)?;
    Ok(config)
}

fn run_compare(
    spec: &ProblemSpec<f64>,
    plan: &CampaignPlan,
    eq_tol: f64,
    threads: usize,
) -> Result<CompareOutput, CliError> {
    let mut outputs = Vec::with_capacity(2);
    for mode in [Mode::Ude3, Mode::Ude2] {
        let mut mode_plan = plan.clone();
        mode_plan.config.mode = mode;
        mode_plan.config.validate().map_err(CliError::from)?;
        let reports = run_campaign(spec, &mode_plan, threads).map_err(CliError::from)?;
        outputs.push(CampaignOutput::new(&mode_plan, eq_tol, reports));
    }
    let ude2 = outputs.pop().expect("two campaigns");
    let ude3 = outputs.pop().expect("two campaigns");
    Ok(CompareOutput { ude3, ude2 })
}

/// Campaign parallelism cap from UDE3_THREADS (default 1).
fn campaign_threads() -> Result<usize, CliError> {
    match std::env::var("UDE3_THREADS") {
        Ok(raw) => raw
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| {
                CliError::Config(format!(
                    "UDE3_THREADS must be a positive integer, got {raw:?}"
                ))
            }),
        Err(_) => Ok(1),
    }
}

fn write_output(path: &PathBuf, document: &str) -> Result<(), CliError> {
    std::fs::write(path, document)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}
