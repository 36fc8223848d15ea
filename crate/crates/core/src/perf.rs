//! Analytic inference-latency model and resize benchmarking.
//!
//! Inference cost is modeled as affine in pixel count with a multiplicative
//! factor for dropping all but the first feature-pyramid level. The model
//! reproduces the mechanism of the speedup (smaller planned images, no
//! pyramid), not any particular hardware constant. Wall-clock resize timings
//! are measured separately and never mixed into the model.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::parse_manifest;
use crate::raster::Raster;
use crate::resize::{apply_resize, ResizePlan};
use crate::scalar::{count, num, Scalar};

/// Pixel-proportional latency model with a feature-pyramid on/off factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyModel<T = f64> {
    pub fixed_overhead_s: T,
    pub seconds_per_megapixel: T,
    /// Per-level input downscale factors; level one is always 1.
    pub fpn_levels_downscale: Vec<T>,
}

impl<T: Scalar> Default for LatencyModel<T> {
    fn default() -> Self {
        LatencyModel {
            fixed_overhead_s: T::zero(),
            seconds_per_megapixel: num(0.01),
            fpn_levels_downscale: default_fpn_levels(),
        }
    }
}

/// The usual five pyramid levels: factors 1, 2, 4, 8, 16, which detect
/// objects around sizes 32, 64, 128, 256, 512.
pub fn default_fpn_levels<T: Scalar>() -> Vec<T> {
    [1.0, 2.0, 4.0, 8.0, 16.0].into_iter().map(num).collect()
}

impl<T: Scalar> LatencyModel<T> {
    pub fn validate(&self) -> Result<()> {
        if self.fixed_overhead_s < T::zero() || !self.fixed_overhead_s.is_finite() {
            return Err(Error::InvalidConfig("fixed overhead must be >= 0".into()));
        }
        if self.seconds_per_megapixel < T::zero() || !self.seconds_per_megapixel.is_finite() {
            return Err(Error::InvalidConfig(
                "seconds per megapixel must be >= 0".into(),
            ));
        }
        if self.fpn_levels_downscale.is_empty() {
            return Err(Error::InvalidConfig("need at least one FPN level".into()));
        }
        if self.fpn_levels_downscale[0] != T::one() {
            return Err(Error::InvalidConfig(
                "first FPN downscale factor must be 1".into(),
            ));
        }
        for pair in self.fpn_levels_downscale.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::InvalidConfig(
                    "FPN downscale factors must be strictly increasing".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Fraction of forward-pass time saved by keeping only the first pyramid
/// level: `1 - 1 / sum(1 / d^2)` over the level downscale factors.
///
/// Each deeper level processes `1/d^2` of the pixels, so the pyramid costs
/// `sum(1/d^2)` relative to the first level alone.
pub fn fpn_elimination_factor<T: Scalar>(downscales: &[T]) -> T {
    let total = downscales
        .iter()
        .fold(T::zero(), |acc, &d| acc + T::one() / (d * d));
    T::one() - T::one() / total
}

/// Modeled forward-pass time for an image of `pixels` total pixels.
pub fn latency_estimate<T: Scalar>(pixels: T, model: &LatencyModel<T>, with_fpn: bool) -> T {
    let megapixels = pixels / num::<T>(1e6);
    let fpn_factor = if with_fpn {
        T::one()
    } else {
        T::one() - fpn_elimination_factor(&model.fpn_levels_downscale)
    };
    model.fixed_overhead_s + model.seconds_per_megapixel * megapixels * fpn_factor
}

/// Wall-clock resize timing summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredResizeStats {
    pub images: usize,
    pub repetitions: usize,
    pub min_s: f64,
    pub median_s: f64,
    pub mean_s: f64,
}

impl MeasuredResizeStats {
    /// Aggregates per-image times (seconds) into min/median/mean.
    pub fn from_times(times: &[f64], repetitions: usize) -> MeasuredResizeStats {
        assert!(!times.is_empty(), "need at least one timing");
        let mut sorted = times.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
        MeasuredResizeStats {
            images: times.len(),
            repetitions,
            min_s: sorted[0],
            median_s: sorted[sorted.len() / 2],
            mean_s: sorted.iter().sum::<f64>() / sorted.len() as f64,
        }
    }
}

/// Dataset-level modeled speedup of the adaptive pipeline over a
/// fixed-long-side baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupReport<T = f64> {
    pub baseline_long_side_px: u32,
    pub mean_adaptive_pixels: T,
    pub mean_estimated_speedup: T,
    pub per_image_speedups: Vec<T>,
    pub measured_resize_seconds: Option<MeasuredResizeStats>,
}

/// Per image, the baseline runs the pyramid at
/// `baseline_long_side^2 * aspect` pixels while the adaptive side runs the
/// planned target size, without the pyramid when `fpn_eliminated` is set.
/// The report's speedups are the latency ratios; the mean is arithmetic.
pub fn speedup_report<T: Scalar>(
    plans: &[ResizePlan<T>],
    baseline_long_side_px: u32,
    model: &LatencyModel<T>,
    fpn_eliminated: bool,
) -> Result<SpeedupReport<T>> {
    if plans.is_empty() {
        return Err(Error::EmptyPlans);
    }
    model.validate()?;
    if baseline_long_side_px == 0 {
        return Err(Error::InvalidConfig("baseline long side must be >= 1".into()));
    }

    let baseline_long = count::<T>(u64::from(baseline_long_side_px));
    let mut per_image_speedups = Vec::with_capacity(plans.len());
    let mut pixel_sum = T::zero();
    for plan in plans {
        let long = count::<T>(u64::from(plan.source_width_px.max(plan.source_height_px)));
        let short = count::<T>(u64::from(plan.source_width_px.min(plan.source_height_px)));
        let baseline_pixels = baseline_long * baseline_long * (short / long);
        let adaptive_pixels = count::<T>(plan.target_pixels());
        pixel_sum = pixel_sum + adaptive_pixels;

        let baseline_time = latency_estimate(baseline_pixels, model, true);
        let adaptive_time = latency_estimate(adaptive_pixels, model, !fpn_eliminated);
        per_image_speedups.push(baseline_time / adaptive_time);
    }

    let n = count::<T>(plans.len() as u64);
    let mean_estimated_speedup =
        per_image_speedups.iter().fold(T::zero(), |acc, &s| acc + s) / n;
    Ok(SpeedupReport {
        baseline_long_side_px,
        mean_adaptive_pixels: pixel_sum / n,
        mean_estimated_speedup,
        per_image_speedups,
        measured_resize_seconds: None,
    })
}

/// Times [`apply_resize`] over the corpus under `corpus_dir` (expects
/// `manifest.jsonl` plus the image files it references).
///
/// Per image: one warm-up pass, then `repetitions` timed passes (at least
/// five); the per-image time is the minimum. Runs single-threaded.
pub fn bench_resize(
    corpus_dir: &Path,
    plans: &[ResizePlan<f64>],
    repetitions: usize,
) -> Result<MeasuredResizeStats> {
    let repetitions = repetitions.max(5);
    let manifest_path = corpus_dir.join("manifest.jsonl");
    let file = std::fs::File::open(&manifest_path)?;
    let parsed = parse_manifest::<f64, _>(std::io::BufReader::new(file))?;
    if parsed.manifest.records.is_empty() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("no images in corpus {}", corpus_dir.display()),
        )));
    }

    let mut times = Vec::with_capacity(parsed.manifest.records.len());
    for record in &parsed.manifest.records {
        let plan = plans
            .iter()
            .find(|p| p.image_id == record.image_id)
            .ok_or_else(|| {
                Error::InvalidConfig(format!("no plan for image '{}'", record.image_id))
            })?;
        let image: Raster<f32> = Raster::read_pgm(&corpus_dir.join(&record.file_path))?;

        let _ = apply_resize(&image, plan)?; // warm-up
        let mut best = f64::INFINITY;
        for _ in 0..repetitions {
            let start = Instant::now();
            let out = apply_resize(&image, plan)?;
            let elapsed = start.elapsed().as_secs_f64();
            std::hint::black_box(&out);
            best = best.min(elapsed);
        }
        times.push(best);
    }
    Ok(MeasuredResizeStats::from_times(&times, repetitions))
}
