use std::path::PathBuf;

use adares_core::{apply_resize, Raster};
use anyhow::{Context, Result};
use clap::Args;
use rayon::prelude::*;

use super::util;

#[derive(Args)]
pub struct ResizeArgs {
    #[arg(long, value_name = "PATH")]
    pub manifest: PathBuf,

    #[arg(long, value_name = "PATH")]
    pub plans: PathBuf,

    /// Directory holding the images; defaults to the manifest's directory.
    #[arg(long, value_name = "DIR")]
    pub images_root: Option<PathBuf>,

    /// Output directory; images keep their manifest-relative paths.
    #[arg(long, short = 'o', value_name = "DIR")]
    pub out: PathBuf,
}

pub fn run(args: ResizeArgs) -> Result<()> {
    let manifest = util::load_manifest(&args.manifest)?;
    let plans = util::load_plans(&args.plans)?;
    let by_image = util::plans_by_image(&plans)?;
    let root = util::images_root(&args.manifest, args.images_root.as_deref());

    manifest
        .records
        .par_iter()
        .try_for_each(|record| -> Result<()> {
            let plan = by_image
                .get(record.image_id.as_str())
                .with_context(|| format!("no plan for image '{}'", record.image_id))?;
            let source: Raster<f32> = Raster::read_pgm(&root.join(&record.file_path))
                .with_context(|| format!("reading {}", record.file_path))?;
            let resized = apply_resize(&source, plan)
                .with_context(|| format!("resizing '{}'", record.image_id))?;
            let target = args.out.join(&record.file_path);
            if let Some(parent) = target.parent() {
                std::fs::create_dir_all(parent)?;
            }
            resized
                .write_pgm(&target)
                .with_context(|| format!("writing {}", target.display()))?;
            Ok(())
        })?;

    println!(
        "resized {} images -> {}",
        manifest.records.len(),
        args.out.display()
    );
    Ok(())
}
