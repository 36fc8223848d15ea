use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use super::util;

#[derive(Args)]
pub struct EvalArgs {
    /// Detections JSONL in original-image coordinates.
    #[arg(long, value_name = "PATH")]
    pub dets: PathBuf,

    #[arg(long, value_name = "PATH")]
    pub manifest: PathBuf,

    /// Comma-separated IoU thresholds, e.g. `0.5,0.7`.
    #[arg(long, default_value = "0.5")]
    pub iou: String,

    /// Also write the report as JSON.
    #[arg(long, short = 'o', value_name = "PATH")]
    pub output: Option<PathBuf>,
}

pub fn run(args: EvalArgs) -> Result<()> {
    let manifest = util::load_manifest(&args.manifest)?;
    let detections = util::load_detections(&args.dets)?;
    let thresholds = util::parse_float_list(&args.iou, "IoU threshold")?;
    for &t in &thresholds {
        anyhow::ensure!((0.0..=1.0).contains(&t), "IoU threshold {t} outside [0, 1]");
    }

    let report =
        adares_core::evaluate(&detections, &manifest, &thresholds).context("evaluating")?;
    print!("{}", report.to_text_table());
    if let Some(path) = &args.output {
        util::write_json_pretty(&report, path)?;
    }
    Ok(())
}
