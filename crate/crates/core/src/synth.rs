//! Deterministic synthetic BEV scenes and a single-scale reference detector.
//!
//! Scenes place high-contrast axis-aligned rectangles whose pixel size
//! follows the altitude-derived GSD, so a corpus rendered across an altitude
//! range reproduces the scale spread of real BEV data with exact ground
//! truth. The reference detector is deliberately scale-narrow (a threshold,
//! connected components, and a size filter): it only sees objects near the
//! reference size, which is what makes adaptive resizing measurable.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::camera::{gsd_from_altitude, AltitudeM, CameraProfile};
use crate::error::{Error, Result};
use crate::manifest::{write_manifest, BoundingBox, DatasetManifest, ImageRecord, View};
use crate::raster::Raster;
use crate::scalar::{num, Scalar};

/// Placement attempts per object before giving up.
pub const PLACEMENT_ATTEMPTS: usize = 1000;

/// Minimum object-background contrast for a usable scene.
pub const MIN_CONTRAST: f64 = 0.3;

/// Metric footprint and display name of one synthetic object class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec<T = f64> {
    pub name: String,
    pub long_m: T,
    pub short_m: T,
}

/// Everything a corpus generation run needs besides the altitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneConfig<T = f64> {
    pub profile: CameraProfile<T>,
    pub image_dims: (u32, u32),
    pub object_classes: BTreeMap<u32, ObjectSpec<T>>,
    /// Inclusive range of objects per scene.
    pub objects_per_image: (u32, u32),
    pub background_level: T,
    pub object_level: T,
    pub noise_sigma: T,
    pub seed: u64,
}

impl<T: Scalar> SceneConfig<T> {
    /// The synthetic camera used throughout: 10.24 x 7.68 mm sensor, 10 mm
    /// focal length, 1024 x 768 px. Its GSD is `0.001 * altitude`, so a
    /// 4.5 m car spans 100 px at 45 m.
    pub fn synthetic_camera() -> CameraProfile<T> {
        CameraProfile {
            sensor_width_mm: num(10.24),
            sensor_height_mm: num(7.68),
            focal_length_mm: num(10.0),
            native_width_px: 1024,
            native_height_px: 768,
            name: "synthetic".to_string(),
        }
    }

    /// Default single-class car corpus configuration.
    pub fn default_cars(seed: u64) -> Self {
        SceneConfig {
            profile: Self::synthetic_camera(),
            image_dims: (1024, 768),
            object_classes: BTreeMap::from([(
                0,
                ObjectSpec {
                    name: "car".to_string(),
                    long_m: num(4.5),
                    short_m: num(1.8),
                },
            )]),
            objects_per_image: (1, 4),
            background_level: num(0.1),
            object_level: num(0.9),
            noise_sigma: num(0.02),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let contrast = self.object_level - self.background_level;
        if contrast < num(MIN_CONTRAST) {
            return Err(Error::InvalidConfig(format!(
                "object/background contrast {contrast} below {MIN_CONTRAST}"
            )));
        }
        if self.image_dims.0 < 64 || self.image_dims.1 < 64 {
            return Err(Error::InvalidConfig(
                "image dimensions must be at least 64 px".into(),
            ));
        }
        if self.object_classes.is_empty() {
            return Err(Error::InvalidConfig("no object classes".into()));
        }
        for (id, spec) in &self.object_classes {
            if !spec.long_m.is_finite()
                || !spec.short_m.is_finite()
                || spec.long_m <= T::zero()
                || spec.short_m <= T::zero()
            {
                return Err(Error::InvalidConfig(format!(
                    "class {id} has non-positive real dimensions"
                )));
            }
        }
        if self.objects_per_image.0 > self.objects_per_image.1 {
            return Err(Error::InvalidConfig(
                "objects_per_image range is inverted".into(),
            ));
        }
        let unit = T::zero()..=T::one();
        if !unit.contains(&self.background_level) || !unit.contains(&self.object_level) {
            return Err(Error::InvalidConfig(
                "intensity levels must lie in [0, 1]".into(),
            ));
        }
        if self.noise_sigma < T::zero() || !self.noise_sigma.is_finite() {
            return Err(Error::InvalidConfig("noise sigma must be >= 0".into()));
        }
        Ok(())
    }

    pub fn class_names(&self) -> BTreeMap<u32, String> {
        self.object_classes
            .iter()
            .map(|(&id, spec)| (id, spec.name.clone()))
            .collect()
    }
}

/// How corpus altitudes are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum AltitudeSampler<T = f64> {
    /// Uniform in `[low, high)` meters.
    Uniform { low: T, high: T },
    /// Cycles through the given altitudes.
    Fixed(Vec<T>),
}

/// The RNG stream for one scene. Streams are derived from the corpus seed
/// and the scene index, so per-scene generation parallelizes without
/// changing output.
pub fn scene_rng(seed: u64, scene_index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(scene_index.wrapping_add(1));
    rng
}

fn altitude_rng(seed: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

struct PlacedRect {
    x: u32,
    y: u32,
    w: u32,
    h: u32,
    class_id: u32,
}

/// Separation margin in source pixels. Scales with the object so the gap
/// survives downscaling to the reference size.
fn separation_margin(long_px: u32) -> i64 {
    i64::from(long_px) / 8 + 2
}

fn rects_conflict(a: &PlacedRect, b: &PlacedRect, margin: i64) -> bool {
    let (ax0, ay0) = (i64::from(a.x) - margin, i64::from(a.y) - margin);
    let (ax1, ay1) = (
        i64::from(a.x) + i64::from(a.w) + margin,
        i64::from(a.y) + i64::from(a.h) + margin,
    );
    let (bx0, by0) = (i64::from(b.x), i64::from(b.y));
    let (bx1, by1) = (i64::from(b.x) + i64::from(b.w), i64::from(b.y) + i64::from(b.h));
    ax0 < bx1 && bx0 < ax1 && ay0 < by1 && by0 < ay1
}

/// Renders one scene at the given altitude.
///
/// Objects are axis-aligned rectangles at `object_level`, sized
/// `real_dims / gsd` pixels, rotated 0 or 90 degrees, placed fully inside
/// the frame and non-overlapping by rejection sampling. Gaussian noise is
/// added when `noise_sigma > 0`. Output is a pure function of
/// `(config.seed, altitude, scene_index)`.
pub fn generate_scene<T: Scalar>(
    config: &SceneConfig<T>,
    altitude: AltitudeM<T>,
    scene_index: u64,
) -> Result<(Raster<T>, ImageRecord<T>)> {
    config.validate()?;
    let (frame_w, frame_h) = config.image_dims;
    let gsd = gsd_from_altitude(&config.profile, altitude, frame_w).meters_per_pixel;
    if !(gsd > T::zero()) {
        return Err(Error::InvalidConfig(
            "scene altitude must be positive".into(),
        ));
    }

    // integer pixel dims per class at this altitude
    let class_ids: Vec<u32> = config.object_classes.keys().copied().collect();
    let mut px_dims: BTreeMap<u32, (u32, u32)> = BTreeMap::new();
    for (&id, spec) in &config.object_classes {
        let long = (spec.long_m / gsd).round().to_u32().unwrap_or(u32::MAX).max(1);
        let short = (spec.short_m / gsd).round().to_u32().unwrap_or(u32::MAX).max(1);
        if long > frame_w.max(frame_h) || short > frame_w.min(frame_h) {
            return Err(Error::ObjectTooLargeForFrame {
                object_w: long,
                object_h: short,
                frame_w,
                frame_h,
            });
        }
        px_dims.insert(id, (long, short));
    }

    let mut rng = scene_rng(config.seed, scene_index);
    let n_objects = rng.random_range(config.objects_per_image.0..=config.objects_per_image.1);

    let mut placed: Vec<PlacedRect> = Vec::with_capacity(n_objects as usize);
    for object_index in 0..n_objects as usize {
        let class_id = class_ids[rng.random_range(0..class_ids.len())];
        let (long, short) = px_dims[&class_id];
        let mut done = false;
        for _attempt in 0..PLACEMENT_ATTEMPTS {
            let (w, h) = if rng.random_bool(0.5) {
                (long, short)
            } else {
                (short, long)
            };
            if w > frame_w || h > frame_h {
                continue;
            }
            let candidate = PlacedRect {
                x: rng.random_range(0..=frame_w - w),
                y: rng.random_range(0..=frame_h - h),
                w,
                h,
                class_id,
            };
            let margin = separation_margin(long);
            if placed.iter().all(|p| !rects_conflict(p, &candidate, margin)) {
                placed.push(candidate);
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::PlacementOverflow {
                object_index,
                attempts: PLACEMENT_ATTEMPTS,
            });
        }
    }

    let mut raster = Raster::filled(frame_w, frame_h, config.background_level);
    for rect in &placed {
        raster.fill_rect(rect.x, rect.y, rect.w, rect.h, config.object_level);
    }
    if config.noise_sigma > T::zero() {
        let normal = Normal::new(0.0f64, config.noise_sigma.to_f64().unwrap())
            .expect("validated sigma");
        raster.map_pixels(|v| {
            (v + num::<T>(normal.sample(&mut rng)))
                .max(T::zero())
                .min(T::one())
        });
    }

    let boxes = placed
        .iter()
        .map(|r| {
            BoundingBox::new(
                r.class_id,
                num::<T>(f64::from(r.x)),
                num::<T>(f64::from(r.y)),
                num::<T>(f64::from(r.w)),
                num::<T>(f64::from(r.h)),
            )
        })
        .collect();

    let record = ImageRecord {
        image_id: format!("scene_{scene_index:05}"),
        file_path: format!("images/scene_{scene_index:05}.pgm"),
        width_px: frame_w,
        height_px: frame_h,
        altitude_m: Some(altitude),
        view: View::Bev,
        boxes,
    };
    Ok((raster, record))
}

/// Draws the altitude for every scene up front, so scene generation can run
/// in any order.
pub fn sample_altitudes<T: Scalar>(
    sampler: &AltitudeSampler<T>,
    n_images: usize,
    seed: u64,
) -> Result<Vec<AltitudeM<T>>> {
    match sampler {
        AltitudeSampler::Uniform { low, high } => {
            let (lo, hi) = (low.to_f64().unwrap(), high.to_f64().unwrap());
            if !(lo > 0.0) || !(hi > lo) {
                return Err(Error::InvalidConfig(format!(
                    "uniform altitude range ({lo}, {hi}) must satisfy 0 < low < high"
                )));
            }
            let mut rng = altitude_rng(seed);
            (0..n_images)
                .map(|_| AltitudeM::new(num::<T>(rng.random_range(lo..hi))))
                .collect()
        }
        AltitudeSampler::Fixed(list) => {
            if list.is_empty() {
                return Err(Error::InvalidConfig("fixed altitude list is empty".into()));
            }
            (0..n_images)
                .map(|i| AltitudeM::new(list[i % list.len()]))
                .collect()
        }
    }
}

/// Generates `n_images` scenes, writes `images/*.pgm` and `manifest.jsonl`
/// under `out_dir`, and returns the manifest. Fully reproducible from the
/// config seed; scenes render in parallel.
pub fn generate_corpus<T: Scalar + Serialize>(
    config: &SceneConfig<T>,
    sampler: &AltitudeSampler<T>,
    n_images: usize,
    out_dir: &Path,
) -> Result<DatasetManifest<T>> {
    if n_images == 0 {
        return Err(Error::InvalidConfig("n_images must be >= 1".into()));
    }
    config.validate()?;
    let altitudes = sample_altitudes(sampler, n_images, config.seed)?;

    let image_dir = out_dir.join("images");
    std::fs::create_dir_all(&image_dir)?;

    let records: Vec<ImageRecord<T>> = altitudes
        .par_iter()
        .enumerate()
        .map(|(index, &altitude)| {
            let (raster, record) = generate_scene(config, altitude, index as u64)?;
            raster.write_pgm(&out_dir.join(&record.file_path))?;
            Ok(record)
        })
        .collect::<Result<_>>()?;

    let manifest = DatasetManifest {
        records,
        class_names: config.class_names(),
    };
    let file = std::fs::File::create(out_dir.join("manifest.jsonl"))?;
    write_manifest(&manifest, std::io::BufWriter::new(file))?;
    Ok(manifest)
}

/// Pixel connectivity for component labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Connectivity {
    Four,
    Eight,
}

impl std::str::FromStr for Connectivity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "4" => Ok(Connectivity::Four),
            "8" => Ok(Connectivity::Eight),
            other => Err(format!("connectivity must be 4 or 8, got '{other}'")),
        }
    }
}

/// Single-scale blob detector: threshold, connected components, size filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig<T = f64> {
    pub intensity_threshold: T,
    pub min_long_side_px: u32,
    pub max_long_side_px: u32,
    pub connectivity: Connectivity,
}

impl<T: Scalar> DetectorConfig<T> {
    pub fn new(
        intensity_threshold: T,
        min_long_side_px: u32,
        max_long_side_px: u32,
        connectivity: Connectivity,
    ) -> Result<Self> {
        if !intensity_threshold.is_finite()
            || intensity_threshold < T::zero()
            || intensity_threshold > T::one()
        {
            return Err(Error::InvalidConfig(
                "intensity threshold must lie in [0, 1]".into(),
            ));
        }
        if min_long_side_px > max_long_side_px {
            return Err(Error::InvalidConfig(
                "detector min long side exceeds max".into(),
            ));
        }
        Ok(DetectorConfig {
            intensity_threshold,
            min_long_side_px,
            max_long_side_px,
            connectivity,
        })
    }
}

/// Detects bright components whose long side lies inside the detector's
/// size band. The score peaks at the band center:
/// `max(0.01, 1 - |long - mid| / mid)`. Detections carry an empty
/// `image_id` and class 0; the caller assigns both as needed.
pub fn reference_detector<P: Scalar, T: Scalar>(
    image: &Raster<P>,
    config: &DetectorConfig<T>,
) -> Vec<crate::eval::Detection<T>> {
    let width = image.width() as usize;
    let height = image.height() as usize;
    let threshold = config.intensity_threshold.to_f64().unwrap();

    let mask: Vec<bool> = image
        .data()
        .iter()
        .map(|v| v.to_f64().unwrap_or(0.0) >= threshold)
        .collect();
    let mut visited = vec![false; mask.len()];

    let neighbors: &[(i64, i64)] = match config.connectivity {
        Connectivity::Four => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
        Connectivity::Eight => &[
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ],
    };

    let mid = f64::from(config.min_long_side_px + config.max_long_side_px) / 2.0;
    let mut detections = Vec::new();
    let mut stack = Vec::new();

    for start in 0..mask.len() {
        if !mask[start] || visited[start] {
            continue;
        }
        // flood fill in scan order keeps component discovery deterministic
        let (mut min_x, mut max_x) = (start % width, start % width);
        let (mut min_y, mut max_y) = (start / width, start / width);
        visited[start] = true;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let x = (idx % width) as i64;
            let y = (idx / width) as i64;
            min_x = min_x.min(idx % width);
            max_x = max_x.max(idx % width);
            min_y = min_y.min(idx / width);
            max_y = max_y.max(idx / width);
            for (dx, dy) in neighbors {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                    continue;
                }
                let nidx = ny as usize * width + nx as usize;
                if mask[nidx] && !visited[nidx] {
                    visited[nidx] = true;
                    stack.push(nidx);
                }
            }
        }

        let w = (max_x - min_x + 1) as u32;
        let h = (max_y - min_y + 1) as u32;
        let long = w.max(h);
        if long < config.min_long_side_px || long > config.max_long_side_px {
            continue;
        }
        let score = (1.0 - (f64::from(long) - mid).abs() / mid).max(0.01);
        detections.push(crate::eval::Detection {
            image_id: String::new(),
            bbox: BoundingBox::new(
                0,
                num::<T>(min_x as f64),
                num::<T>(min_y as f64),
                num::<T>(f64::from(w)),
                num::<T>(f64::from(h)),
            ),
            score: num::<T>(score),
        });
    }
    detections
}
