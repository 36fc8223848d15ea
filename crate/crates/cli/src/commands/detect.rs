use std::path::PathBuf;

use adares_core::synth::{Connectivity, DetectorConfig};
use adares_core::{apply_resize, inverse_transform_boxes, reference_detector, Detection, Raster};
use anyhow::{Context, Result};
use clap::Args;
use rayon::prelude::*;

use super::util;

#[derive(Args)]
pub struct DetectArgs {
    #[arg(long, value_name = "PATH")]
    pub manifest: PathBuf,

    #[arg(long, value_name = "PATH")]
    pub plans: PathBuf,

    /// Directory holding the images; defaults to the manifest's directory.
    #[arg(long, value_name = "DIR")]
    pub images_root: Option<PathBuf>,

    /// Intensity threshold separating objects from background.
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,

    /// Smallest component long side kept, in resized pixels.
    #[arg(long, default_value_t = 16)]
    pub min: u32,

    /// Largest component long side kept, in resized pixels.
    #[arg(long, default_value_t = 64)]
    pub max: u32,

    /// Component connectivity: 4 or 8.
    #[arg(long, default_value = "4")]
    pub connectivity: Connectivity,

    /// Output detections JSONL (original-image coordinates).
    #[arg(long, short = 'o', value_name = "PATH")]
    pub output: PathBuf,
}

pub fn run(args: DetectArgs) -> Result<()> {
    let manifest = util::load_manifest(&args.manifest)?;
    let plans = util::load_plans(&args.plans)?;
    let by_image = util::plans_by_image(&plans)?;
    let root = util::images_root(&args.manifest, args.images_root.as_deref());
    let config = DetectorConfig::new(args.threshold, args.min, args.max, args.connectivity)
        .context("detector configuration")?;

    // resize -> detect -> map back, per image, emitted in manifest order
    let per_image: Vec<Vec<Detection>> = manifest
        .records
        .par_iter()
        .map(|record| -> Result<Vec<Detection>> {
            let plan = by_image
                .get(record.image_id.as_str())
                .with_context(|| format!("no plan for image '{}'", record.image_id))?;
            let source: Raster<f32> = Raster::read_pgm(&root.join(&record.file_path))
                .with_context(|| format!("reading {}", record.file_path))?;
            let resized = apply_resize(&source, plan)
                .with_context(|| format!("resizing '{}'", record.image_id))?;
            let found = reference_detector(&resized, &config);
            Ok(found
                .into_iter()
                .map(|det| {
                    let bbox = inverse_transform_boxes(&[det.bbox], plan).remove(0);
                    Detection::new(record.image_id.clone(), bbox, det.score)
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let detections: Vec<Detection> = per_image.into_iter().flatten().collect();
    util::save_detections(&detections, &args.output)?;
    println!(
        "detected {} objects over {} images -> {}",
        detections.len(),
        manifest.records.len(),
        args.output.display()
    );
    Ok(())
}
