use std::path::PathBuf;

use adares_core::{build_split, SplitKind};
use anyhow::{Context, Result};
use clap::Args;

use super::util;

#[derive(Args)]
pub struct SplitArgs {
    #[arg(long, value_name = "PATH")]
    pub manifest: PathBuf,

    /// below25, below50, above50, or above75.
    #[arg(long)]
    pub kind: SplitKindArg,

    #[arg(long, value_name = "PATH")]
    pub train_out: PathBuf,

    #[arg(long, value_name = "PATH")]
    pub holdout_out: PathBuf,
}

#[derive(Debug, Clone, Copy)]
pub struct SplitKindArg(pub SplitKind);

impl std::str::FromStr for SplitKindArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(SplitKindArg)
    }
}

pub fn run(args: SplitArgs) -> Result<()> {
    let manifest = util::load_manifest(&args.manifest)?;
    let split = build_split(&manifest, args.kind.0).context("building split")?;
    util::save_manifest(&split.train, &args.train_out)?;
    util::save_manifest(&split.holdout, &args.holdout_out)?;
    println!(
        "{}: {} train / {} holdout, threshold altitude {:.3} m",
        args.kind.0,
        split.train.records.len(),
        split.holdout.records.len(),
        split.threshold_altitude_m.meters()
    );
    Ok(())
}
