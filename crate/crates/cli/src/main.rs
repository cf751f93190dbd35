use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use slowent_cli::{init_threads, run, CliError, ConfigFile, Experiment, ExperimentConfig, EXIT_ERROR, EXIT_FAILED};

/// Runs one experiment and writes report.json, checks.csv and its data files.
#[derive(Parser)]
#[command(name = "slowent", version)]
struct Args {
    /// complexity, cover, dbar, vwb, dominance_gap or lemma_suite
    experiment: Experiment,
    /// JSON config; omitted fields take the experiment's defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory [default: results/<experiment>]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the resolved config and exit
    #[arg(long)]
    dry_run: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED as u8),
        Err(e) => {
            eprintln!("slowent: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}

fn execute(args: &Args) -> Result<bool, CliError> {
    init_threads()?;
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let cfg = ExperimentConfig::resolve(args.experiment, file, args.seed)?;
    if args.dry_run {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return Ok(true);
    }
    let report = run(&cfg)?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("results").join(cfg.experiment.as_str()));
    report.write_to(&out)?;
    for c in &report.checks {
        let bound = c
            .bound
            .map(|b| format!(" {} {b}", c.relation.symbol()))
            .unwrap_or_default();
        let tag = match (c.asserted, c.verdict.passed()) {
            (_, true) => "pass",
            (true, false) => "FAIL",
            (false, false) => "fail (not asserted)",
        };
        println!("{:<40} {}{bound}  {tag}", c.name, c.value);
    }
    println!(
        "{}: {} in {} ms, written to {}",
        cfg.experiment,
        if report.verdict.passed() { "pass" } else { "FAIL" },
        report.wall_clock_ms,
        out.display()
    );
    Ok(report.verdict.passed())
}
