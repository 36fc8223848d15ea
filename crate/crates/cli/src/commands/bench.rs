use std::path::PathBuf;

use adares_core::perf::{bench_resize, speedup_report, LatencyModel};
use anyhow::{Context, Result};
use clap::Args;

use super::util;

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_name = "PATH")]
    pub plans: PathBuf,

    /// Baseline longer-edge size the plans are compared against.
    #[arg(long, default_value_t = 2048)]
    pub baseline: u32,

    /// Modeled cost in seconds per megapixel.
    #[arg(long, default_value_t = 0.01)]
    pub spmp: f64,

    /// Modeled fixed per-image overhead in seconds.
    #[arg(long, default_value_t = 0.0)]
    pub overhead: f64,

    /// Per-level feature-pyramid downscale factors.
    #[arg(long, default_value = "1,2,4,8,16")]
    pub fpn_levels: String,

    /// Keep the feature pyramid on the adaptive side too.
    #[arg(long)]
    pub keep_fpn: bool,

    /// Also measure wall-clock resize time over this corpus directory
    /// (expects manifest.jsonl plus the images it references).
    #[arg(long, value_name = "DIR")]
    pub measure: Option<PathBuf>,

    /// Repetitions per image for --measure.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,

    #[arg(long, short = 'o', value_name = "PATH")]
    pub output: PathBuf,
}

pub fn run(args: BenchArgs) -> Result<()> {
    let plans = util::load_plans(&args.plans)?;
    let model = LatencyModel {
        fixed_overhead_s: args.overhead,
        seconds_per_megapixel: args.spmp,
        fpn_levels_downscale: util::parse_float_list(&args.fpn_levels, "FPN level")?,
    };

    let mut report = speedup_report(&plans, args.baseline, &model, !args.keep_fpn)
        .context("building speedup report")?;
    if let Some(corpus) = &args.measure {
        let stats = bench_resize(corpus, &plans, args.reps)
            .with_context(|| format!("measuring resize over {}", corpus.display()))?;
        println!(
            "measured resize: min {:.6}s median {:.6}s mean {:.6}s over {} images",
            stats.min_s, stats.median_s, stats.mean_s, stats.images
        );
        report.measured_resize_seconds = Some(stats);
    }

    println!(
        "mean estimated speedup over {} images vs baseline @{}: {:.3}x (mean adaptive size {:.0} px)",
        report.per_image_speedups.len(),
        report.baseline_long_side_px,
        report.mean_estimated_speedup,
        report.mean_adaptive_pixels
    );
    util::write_json_pretty(&report, &args.output)?;
    Ok(())
}
