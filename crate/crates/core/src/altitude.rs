//! De-facto GSD and altitude estimation from ground-truth boxes.
//!
//! When flight logs are missing or too coarse, the per-image GSD can be
//! recovered from annotated boxes and a metric size prior per class: each
//! covered box votes `real_long_side_m / box_long_side_px`, and the lower
//! median of the votes is the image's GSD. Inverting the GSD formula then
//! yields the altitude.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::camera::{altitude_from_gsd, AltitudeM, CameraProfile, Gsd};
use crate::error::{Error, Result};
use crate::manifest::{BoundingBox, DatasetManifest, ImageRecord};
use crate::scalar::Scalar;

/// Metric long side of an average instance of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSizePrior<T = f64> {
    #[serde(rename = "class")]
    pub class_id: u32,
    #[serde(rename = "meters")]
    pub real_long_side_m: T,
}

impl<T: Scalar> ClassSizePrior<T> {
    pub fn new(class_id: u32, real_long_side_m: T) -> Result<Self> {
        if !real_long_side_m.is_finite() || real_long_side_m <= T::zero() {
            return Err(Error::InvalidConfig(format!(
                "prior for class {class_id} must be positive"
            )));
        }
        Ok(ClassSizePrior {
            class_id,
            real_long_side_m,
        })
    }
}

/// Reads a JSON array of `{"class": id, "meters": value}` priors.
pub fn read_priors<T, R>(reader: R) -> Result<Vec<ClassSizePrior<T>>>
where
    T: Scalar + serde::de::DeserializeOwned,
    R: Read,
{
    let priors: Vec<ClassSizePrior<T>> =
        serde_json::from_reader(reader).map_err(|e| Error::Parse {
            line: e.line(),
            message: format!("priors: {e}"),
        })?;
    for prior in &priors {
        if !prior.real_long_side_m.is_finite() || prior.real_long_side_m <= T::zero() {
            return Err(Error::InvalidConfig(format!(
                "prior for class {} must be positive",
                prior.class_id
            )));
        }
    }
    Ok(priors)
}

/// Lower median: for even counts, the smaller of the two middle values.
fn lower_median<T: Scalar>(values: &mut Vec<T>) -> T {
    values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite GSD votes"));
    values[(values.len() - 1) / 2]
}

/// Estimates the image GSD as the lower median of per-box votes
/// `prior / max(width, height)` over all prior-covered boxes.
pub fn estimate_gsd_from_boxes<T: Scalar>(
    boxes: &[BoundingBox<T>],
    priors: &[ClassSizePrior<T>],
) -> Result<Gsd<T>> {
    let mut votes: Vec<T> = Vec::new();
    for bbox in boxes {
        if let Some(prior) = priors.iter().find(|p| p.class_id == bbox.class_id) {
            votes.push(prior.real_long_side_m / bbox.long_side());
        }
    }
    if votes.is_empty() {
        return Err(Error::NoPriorCoveredBox);
    }
    Ok(Gsd::vertical(lower_median(&mut votes)))
}

/// Estimates the capture altitude of a record from its boxes.
pub fn estimate_altitude<T: Scalar>(
    record: &ImageRecord<T>,
    profile: &CameraProfile<T>,
    priors: &[ClassSizePrior<T>],
) -> Result<AltitudeM<T>> {
    let gsd = estimate_gsd_from_boxes(&record.boxes, priors)?;
    Ok(altitude_from_gsd(profile, gsd, record.width_px))
}

/// Outcome of [`annotate_dataset`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AnnotateReport {
    /// Records whose altitude was estimated and written.
    pub filled: usize,
    /// Records whose existing altitude was kept.
    pub retained: usize,
    /// Records left without an altitude, in manifest order.
    pub skipped: Vec<String>,
}

/// Fills missing altitudes from box-size estimates. With `overwrite`, every
/// estimable record is re-annotated. Records with no prior-covered box are
/// left untouched and listed in the report.
pub fn annotate_dataset<T: Scalar>(
    manifest: &DatasetManifest<T>,
    profile: &CameraProfile<T>,
    priors: &[ClassSizePrior<T>],
    overwrite: bool,
) -> (DatasetManifest<T>, AnnotateReport) {
    let mut out = manifest.clone();
    let mut report = AnnotateReport::default();
    for record in &mut out.records {
        if record.altitude_m.is_some() && !overwrite {
            report.retained += 1;
            continue;
        }
        match estimate_altitude(record, profile, priors) {
            Ok(altitude) => {
                record.altitude_m = Some(altitude);
                report.filled += 1;
            }
            Err(_) => report.skipped.push(record.image_id.clone()),
        }
    }
    (out, report)
}
