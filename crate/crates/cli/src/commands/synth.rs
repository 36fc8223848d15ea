use std::path::PathBuf;
use std::str::FromStr;

use adares_core::synth::{AltitudeSampler, ObjectSpec, SceneConfig};
use anyhow::{bail, Context, Result};
use clap::Args;

use super::util;

/// Altitude distribution: `uniform:LO:HI` or `fixed:A,B,...` (meters).
#[derive(Debug, Clone)]
pub struct AltSpec(AltitudeSampler);

impl FromStr for AltSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(rest) = s.strip_prefix("uniform:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 2 {
                return Err("expected uniform:LO:HI".to_string());
            }
            let low: f64 = parts[0].parse().map_err(|_| "bad lower bound".to_string())?;
            let high: f64 = parts[1].parse().map_err(|_| "bad upper bound".to_string())?;
            return Ok(AltSpec(AltitudeSampler::Uniform { low, high }));
        }
        if let Some(rest) = s.strip_prefix("fixed:") {
            let list: Result<Vec<f64>, _> = rest.split(',').map(|p| p.trim().parse()).collect();
            let list = list.map_err(|_| "bad fixed altitude list".to_string())?;
            return Ok(AltSpec(AltitudeSampler::Fixed(list)));
        }
        Err(format!("unknown altitude spec '{s}' (use uniform:LO:HI or fixed:A,B,...)"))
    }
}

#[derive(Args)]
pub struct SynthArgs {
    /// Output directory (receives images/, manifest.jsonl, camera.json).
    #[arg(long, short = 'o', alias = "out-dir", value_name = "DIR")]
    pub out: PathBuf,

    /// Number of scenes; defaults to the length of a fixed altitude list.
    #[arg(long)]
    pub n: Option<usize>,

    /// Altitude sampler, `uniform:LO:HI` or `fixed:A,B,...` (meters).
    #[arg(long, default_value = "uniform:10:110")]
    pub alt: AltSpec,

    /// Seed for altitudes, placement, and noise.
    #[arg(long, env = "ADARES_SEED", default_value_t = 7)]
    pub seed: u64,

    /// Camera profile JSON; defaults to the built-in synthetic camera.
    #[arg(long, value_name = "PATH")]
    pub camera: Option<PathBuf>,

    /// Objects per scene, inclusive `LO:HI`.
    #[arg(long, default_value = "1:4", value_name = "LO:HI")]
    pub objects: String,

    /// Metric long side of the object class.
    #[arg(long, default_value_t = 4.5)]
    pub object_long_m: f64,

    /// Metric short side of the object class.
    #[arg(long, default_value_t = 1.8)]
    pub object_short_m: f64,

    /// Name of the single object class (id 0).
    #[arg(long, default_value = "car")]
    pub class_name: String,

    /// Background intensity in [0, 1].
    #[arg(long, default_value_t = 0.1)]
    pub background: f64,

    /// Object intensity in [0, 1].
    #[arg(long, default_value_t = 0.9)]
    pub level: f64,

    /// Additive Gaussian noise sigma.
    #[arg(long, default_value_t = 0.02)]
    pub noise: f64,
}

pub fn run(args: SynthArgs) -> Result<()> {
    let (lo, hi) = parse_object_range(&args.objects)?;
    let profile = match &args.camera {
        Some(path) => util::load_camera(path)?,
        None => SceneConfig::synthetic_camera(),
    };

    let n = match (&args.n, &args.alt.0) {
        (Some(n), _) => *n,
        (None, AltitudeSampler::Fixed(list)) => list.len(),
        (None, AltitudeSampler::Uniform { .. }) => {
            bail!("--n is required with a uniform altitude sampler")
        }
    };

    let config = SceneConfig {
        image_dims: (profile.native_width_px, profile.native_height_px),
        profile,
        object_classes: [(
            0u32,
            ObjectSpec {
                name: args.class_name.clone(),
                long_m: args.object_long_m,
                short_m: args.object_short_m,
            },
        )]
        .into(),
        objects_per_image: (lo, hi),
        background_level: args.background,
        object_level: args.level,
        noise_sigma: args.noise,
        seed: args.seed,
    };

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let manifest = adares_core::generate_corpus(&config, &args.alt.0, n, &args.out)
        .context("generating corpus")?;
    util::write_json_pretty(&config.profile, &args.out.join("camera.json"))?;

    let total_boxes: usize = manifest.records.iter().map(|r| r.boxes.len()).sum();
    println!(
        "wrote {} scenes ({} objects) under {}",
        manifest.records.len(),
        total_boxes,
        args.out.display()
    );
    Ok(())
}

fn parse_object_range(text: &str) -> Result<(u32, u32)> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        bail!("--objects expects LO:HI, got '{text}'");
    }
    let lo = parts[0].parse().context("bad object count lower bound")?;
    let hi = parts[1].parse().context("bad object count upper bound")?;
    Ok((lo, hi))
}
