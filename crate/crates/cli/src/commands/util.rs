//! File-format plumbing shared by the subcommands.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use adares_core::{CameraProfile, DatasetManifest, Detection, ResizePlan};
use anyhow::{Context, Result};

pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let file = File::open(path).with_context(|| format!("opening manifest {}", path.display()))?;
    let parsed = adares_core::parse_manifest::<f64, _>(BufReader::new(file))
        .with_context(|| format!("parsing manifest {}", path.display()))?;
    for warning in &parsed.warnings {
        eprintln!(
            "warning: {} line {} ({}): {}",
            path.display(),
            warning.line,
            warning.image_id,
            warning.message
        );
    }
    Ok(parsed.manifest)
}

pub fn save_manifest(manifest: &DatasetManifest, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut writer = BufWriter::new(file);
    adares_core::write_manifest(manifest, &mut writer)
        .with_context(|| format!("writing manifest {}", path.display()))?;
    writer.flush()?;
    Ok(())
}

pub fn load_camera(path: &Path) -> Result<CameraProfile> {
    let file = File::open(path).with_context(|| format!("opening camera {}", path.display()))?;
    adares_core::camera::read_profile(BufReader::new(file))
        .with_context(|| format!("reading camera profile {}", path.display()))
}

pub fn load_plans(path: &Path) -> Result<Vec<ResizePlan>> {
    let file = File::open(path).with_context(|| format!("opening plans {}", path.display()))?;
    adares_core::resize::read_plans(BufReader::new(file))
        .with_context(|| format!("parsing plans {}", path.display()))
}

pub fn save_plans(plans: &[ResizePlan], path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut writer = BufWriter::new(file);
    adares_core::resize::write_plans(plans, &mut writer)
        .with_context(|| format!("writing plans {}", path.display()))?;
    writer.flush()?;
    Ok(())
}

pub fn load_detections(path: &Path) -> Result<Vec<Detection>> {
    let file = File::open(path).with_context(|| format!("opening detections {}", path.display()))?;
    adares_core::eval::read_detections(BufReader::new(file))
        .with_context(|| format!("parsing detections {}", path.display()))
}

pub fn save_detections(dets: &[Detection], path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut writer = BufWriter::new(file);
    adares_core::eval::write_detections(dets, &mut writer)
        .with_context(|| format!("writing detections {}", path.display()))?;
    writer.flush()?;
    Ok(())
}

/// Image paths in a manifest are relative to the manifest's directory.
pub fn images_root(manifest_path: &Path, override_root: Option<&Path>) -> PathBuf {
    match override_root {
        Some(root) => root.to_path_buf(),
        None => manifest_path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
    }
}

/// Index plans by image id, rejecting duplicates.
pub fn plans_by_image(plans: &[ResizePlan]) -> Result<HashMap<&str, &ResizePlan>> {
    let mut map = HashMap::with_capacity(plans.len());
    for plan in plans {
        if map.insert(plan.image_id.as_str(), plan).is_some() {
            anyhow::bail!("duplicate plan for image '{}'", plan.image_id);
        }
    }
    Ok(map)
}

pub fn write_json_pretty<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, value)
        .with_context(|| format!("writing {}", path.display()))?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

/// Parses a comma-separated list of floats.
pub fn parse_float_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid {what} entry '{part}'"))
        })
        .collect()
}
