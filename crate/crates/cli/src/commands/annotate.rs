use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use adares_core::annotate_dataset;
use anyhow::{Context, Result};
use clap::Args;

use super::util;

#[derive(Args)]
pub struct AnnotateArgs {
    #[arg(long, value_name = "PATH")]
    pub manifest: PathBuf,

    #[arg(long, value_name = "PATH")]
    pub camera: PathBuf,

    /// JSON array of class-size priors: [{"class": 0, "meters": 4.5}, ...].
    #[arg(long, value_name = "PATH")]
    pub priors: PathBuf,

    /// Re-estimate altitudes even where the manifest already has them.
    #[arg(long)]
    pub overwrite: bool,

    #[arg(long, short = 'o', value_name = "PATH")]
    pub output: PathBuf,
}

pub fn run(args: AnnotateArgs) -> Result<()> {
    let manifest = util::load_manifest(&args.manifest)?;
    let profile = util::load_camera(&args.camera)?;
    let file = File::open(&args.priors)
        .with_context(|| format!("opening priors {}", args.priors.display()))?;
    let priors = adares_core::altitude::read_priors::<f64, _>(BufReader::new(file))
        .with_context(|| format!("reading priors {}", args.priors.display()))?;

    let (annotated, report) = annotate_dataset(&manifest, &profile, &priors, args.overwrite);
    util::save_manifest(&annotated, &args.output)?;

    println!(
        "altitudes: {} estimated, {} retained, {} not estimable",
        report.filled,
        report.retained,
        report.skipped.len()
    );
    for image_id in &report.skipped {
        eprintln!("warning: no prior-covered box in '{image_id}'");
    }
    Ok(())
}
