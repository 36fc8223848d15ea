use std::path::PathBuf;

use adares_core::resize::{plan_dataset, plan_fixed_long_side, ReferenceSpec, ResizePolicy};
use anyhow::{Context, Result};
use clap::Args;

use super::util;

#[derive(Args)]
pub struct PlanArgs {
    #[arg(long, value_name = "PATH")]
    pub manifest: PathBuf,

    /// Camera profile JSON (required for adaptive planning).
    #[arg(long, value_name = "PATH", required_unless_present = "fixed_long_side")]
    pub camera: Option<PathBuf>,

    /// Metric long side of the reference class (adaptive mode).
    #[arg(long, requires = "ref_px", conflicts_with = "fixed_long_side")]
    pub ref_m: Option<f64>,

    /// Target pixel long side of the reference class (adaptive mode).
    #[arg(long, requires = "ref_m")]
    pub ref_px: Option<u32>,

    /// Class id the reference size refers to.
    #[arg(long, default_value_t = 0)]
    pub ref_class: u32,

    /// Baseline mode: resize every image so its longer edge equals this.
    #[arg(long, conflicts_with_all = ["ref_m", "ref_px"])]
    pub fixed_long_side: Option<u32>,

    /// Round target dimensions to a multiple of this.
    #[arg(long, default_value_t = 1)]
    pub stride: u32,

    #[arg(long, default_value_t = 2.0)]
    pub max_upscale: f64,

    #[arg(long, default_value_t = 4096)]
    pub max_long_side: u32,

    #[arg(long, default_value_t = 32)]
    pub min_long_side: u32,

    /// Output plans JSONL.
    #[arg(long, short = 'o', value_name = "PATH")]
    pub output: PathBuf,
}

pub fn run(args: PlanArgs) -> Result<()> {
    let manifest = util::load_manifest(&args.manifest)?;

    let plans = if let Some(long_side) = args.fixed_long_side {
        manifest
            .records
            .iter()
            .map(|r| {
                plan_fixed_long_side::<f64>((r.width_px, r.height_px), long_side)
                    .with_image_id(r.image_id.clone())
            })
            .collect()
    } else {
        let camera = args.camera.as_deref().expect("clap enforces --camera");
        let profile = util::load_camera(camera)?;
        let spec = ReferenceSpec::new(
            args.ref_class,
            args.ref_m.expect("clap enforces --ref-m"),
            args.ref_px.expect("clap enforces --ref-px"),
        )
        .context("reference spec")?;
        let policy = ResizePolicy {
            stride: args.stride,
            max_upscale: args.max_upscale,
            max_long_side_px: args.max_long_side,
            min_long_side_px: args.min_long_side,
        };
        let (plans, _histogram) =
            plan_dataset(&manifest, &profile, &spec, &policy).context("planning dataset")?;
        plans
    };

    util::save_plans(&plans, &args.output)?;
    let clamped = plans.iter().filter(|p| p.clamped).count();
    println!(
        "planned {} images ({} clamped) -> {}",
        plans.len(),
        clamped,
        args.output.display()
    );
    Ok(())
}
