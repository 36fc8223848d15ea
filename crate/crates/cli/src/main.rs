mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

/// Altitude-adaptive resizing pipeline for bird's-eye-view aerial imagery.
#[derive(Parser)]
#[command(name = "adares", version, about, max_term_width = 100)]
struct Cli {
    /// Worker threads for per-image stages (0 = one per core).
    #[arg(long, global = true, env = "ADARES_JOBS", default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic BEV corpus with exact ground truth.
    Synth(commands::synth::SynthArgs),
    /// Plan per-image resizes from camera geometry and altitudes.
    Plan(commands::plan::PlanArgs),
    /// Apply resize plans to the corpus images.
    Resize(commands::resize::ResizeArgs),
    /// Estimate missing altitudes from ground-truth box sizes.
    AnnotateAltitude(commands::annotate::AnnotateArgs),
    /// Partition a manifest into altitude-band train/holdout splits.
    Split(commands::split::SplitArgs),
    /// Resize, run the reference detector, and map detections back.
    Detect(commands::detect::DetectArgs),
    /// Evaluate detections against ground truth (AP at IoU thresholds).
    Eval(commands::eval::EvalArgs),
    /// Model the inference speedup of the planned sizes over a baseline.
    Bench(commands::bench::BenchArgs),
    /// Summarize planned target sizes as a histogram (CSV, optional SVG).
    Stats(commands::stats::StatsArgs),
}

/// Exit codes: 0 ok, 1 usage error, 2 data/validation error, 3 I/O error.
fn error_exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<adares_core::Error>() {
            return if core.is_io() { 3 } else { 2 };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 3;
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("error[1]: invalid usage");
            let _ = err.print();
            return ExitCode::from(1);
        }
    };

    if cli.jobs > 0 {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("error[2]: could not configure {} worker threads: {err}", cli.jobs);
            return ExitCode::from(2);
        }
    }

    let result = match cli.command {
        Command::Synth(args) => commands::synth::run(args),
        Command::Plan(args) => commands::plan::run(args),
        Command::Resize(args) => commands::resize::run(args),
        Command::AnnotateAltitude(args) => commands::annotate::run(args),
        Command::Split(args) => commands::split::run(args),
        Command::Detect(args) => commands::detect::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Bench(args) => commands::bench::run(args),
        Command::Stats(args) => commands::stats::run(args),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = error_exit_code(&err);
            eprintln!("error[{code}]: {err:#}");
            ExitCode::from(code)
        }
    }
}
