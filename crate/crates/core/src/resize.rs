//! Altitude-adaptive resize planning.
//!
//! Every image is rescaled so that an average instance of the reference
//! class lands at a fixed pixel size: the target scale is the ratio of the
//! image's altitude-derived GSD to the desired GSD implied by the reference
//! size. Also provides the fixed-long-side baseline convention, box
//! transforms between source and target space, raster resampling, and the
//! dataset-level size histogram.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::camera::{gsd_from_altitude, AltitudeM, CameraProfile, Gsd};
use crate::error::{Error, Result};
use crate::manifest::{BoundingBox, DatasetManifest};
use crate::raster::Raster;
use crate::scalar::{count, num, Scalar};

/// Histogram bin width used by [`plan_dataset`].
pub const DEFAULT_HISTOGRAM_BIN_WIDTH: u32 = 128;

/// The reference class and the pixel size its average instance should have
/// after resizing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSpec<T = f64> {
    pub anchor_class: u32,
    pub real_long_side_m: T,
    pub reference_px: u32,
}

impl<T: Scalar> ReferenceSpec<T> {
    pub fn new(anchor_class: u32, real_long_side_m: T, reference_px: u32) -> Result<Self> {
        if !real_long_side_m.is_finite() || real_long_side_m <= T::zero() {
            return Err(Error::InvalidConfig(
                "reference real long side must be positive".into(),
            ));
        }
        if reference_px == 0 {
            return Err(Error::InvalidConfig("reference_px must be >= 1".into()));
        }
        Ok(ReferenceSpec {
            anchor_class,
            real_long_side_m,
            reference_px,
        })
    }
}

/// Rounding and clamping rules applied to planned target sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResizePolicy<T = f64> {
    /// Target dimensions are rounded to the nearest multiple of this.
    pub stride: u32,
    /// Upper bound on the planned scale factor.
    pub max_upscale: T,
    pub max_long_side_px: u32,
    pub min_long_side_px: u32,
}

impl<T: Scalar> Default for ResizePolicy<T> {
    fn default() -> Self {
        ResizePolicy {
            stride: 1,
            max_upscale: num(2.0),
            max_long_side_px: 4096,
            min_long_side_px: 32,
        }
    }
}

impl<T: Scalar> ResizePolicy<T> {
    pub fn validate(&self) -> Result<()> {
        if self.stride == 0 {
            return Err(Error::InvalidConfig("stride must be >= 1".into()));
        }
        if !(self.max_upscale >= T::one()) {
            return Err(Error::InvalidConfig("max_upscale must be >= 1".into()));
        }
        if self.min_long_side_px > self.max_long_side_px {
            return Err(Error::InvalidConfig(
                "min_long_side_px must not exceed max_long_side_px".into(),
            ));
        }
        Ok(())
    }
}

/// Per-image resize decision. `scale` is the intended real-valued factor;
/// the integer target dimensions match it up to rounding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResizePlan<T = f64> {
    pub image_id: String,
    pub scale: T,
    #[serde(rename = "target_w")]
    pub target_width_px: u32,
    #[serde(rename = "target_h")]
    pub target_height_px: u32,
    #[serde(rename = "source_w")]
    pub source_width_px: u32,
    #[serde(rename = "source_h")]
    pub source_height_px: u32,
    pub clamped: bool,
}

impl<T: Scalar> ResizePlan<T> {
    pub fn identity(image_id: impl Into<String>, width_px: u32, height_px: u32) -> Self {
        ResizePlan {
            image_id: image_id.into(),
            scale: T::one(),
            target_width_px: width_px,
            target_height_px: height_px,
            source_width_px: width_px,
            source_height_px: height_px,
            clamped: false,
        }
    }

    pub fn with_image_id(mut self, image_id: impl Into<String>) -> Self {
        self.image_id = image_id.into();
        self
    }

    /// Exact horizontal factor from source to target coordinates.
    pub fn scale_x(&self) -> T {
        count::<T>(u64::from(self.target_width_px)) / count::<T>(u64::from(self.source_width_px))
    }

    /// Exact vertical factor from source to target coordinates.
    pub fn scale_y(&self) -> T {
        count::<T>(u64::from(self.target_height_px)) / count::<T>(u64::from(self.source_height_px))
    }

    pub fn target_long_side(&self) -> u32 {
        self.target_width_px.max(self.target_height_px)
    }

    pub fn target_pixels(&self) -> u64 {
        u64::from(self.target_width_px) * u64::from(self.target_height_px)
    }
}

/// The GSD at which an average reference-class instance measures exactly
/// `reference_px` pixels.
pub fn desired_gsd<T: Scalar>(spec: &ReferenceSpec<T>) -> Gsd<T> {
    Gsd::vertical(spec.real_long_side_m / count::<T>(u64::from(spec.reference_px)))
}

/// Rounds to the nearest multiple of `stride` (ties up), at least one stride.
fn round_to_stride(raw: u64, stride: u32) -> u64 {
    let stride = u64::from(stride);
    let multiple = (2 * raw + stride) / (2 * stride) * stride;
    multiple.max(stride)
}

fn scaled_dim<T: Scalar>(source: u32, scale: T) -> u64 {
    let raw = (count::<T>(u64::from(source)) * scale).round();
    raw.to_u64().unwrap_or(u64::from(u32::MAX))
}

/// Plans the resize that maps the image's native GSD onto `desired`.
///
/// The scale is capped at `policy.max_upscale`, target dimensions are
/// rounded to the policy stride, and the longer target edge is clamped into
/// `[min_long_side_px, max_long_side_px]`. `clamped` records whether any
/// bound fired. The returned plan carries an empty `image_id`.
pub fn plan_resize<T: Scalar>(
    profile: &CameraProfile<T>,
    altitude: AltitudeM<T>,
    source_dims: (u32, u32),
    desired: &Gsd<T>,
    policy: &ResizePolicy<T>,
) -> Result<ResizePlan<T>> {
    let (source_w, source_h) = source_dims;
    assert!(source_w > 0 && source_h > 0, "source dimensions must be positive");
    assert!(
        desired.meters_per_pixel > T::zero(),
        "desired GSD must be positive"
    );
    policy.validate()?;
    if altitude.meters() <= T::zero() {
        return Err(Error::ZeroAltitude);
    }

    let native = gsd_from_altitude(profile, altitude, source_w);
    let mut scale = native.meters_per_pixel / desired.meters_per_pixel;
    let mut clamped = false;
    if scale > policy.max_upscale {
        scale = policy.max_upscale;
        clamped = true;
    }

    let mut target_w = round_to_stride(scaled_dim(source_w, scale), policy.stride);
    let mut target_h = round_to_stride(scaled_dim(source_h, scale), policy.stride);

    let long = target_w.max(target_h);
    let long_src = source_w.max(source_h);
    let side_bound = if long > u64::from(policy.max_long_side_px) {
        Some(policy.max_long_side_px)
    } else if long < u64::from(policy.min_long_side_px) {
        Some(policy.min_long_side_px)
    } else {
        None
    };
    if let Some(bound) = side_bound {
        scale = count::<T>(u64::from(bound)) / count::<T>(u64::from(long_src));
        target_w = scaled_dim(source_w, scale);
        target_h = scaled_dim(source_h, scale);
        clamped = true;
        if target_w == 0 || target_h == 0 {
            return Err(Error::DegenerateTarget);
        }
    }

    Ok(ResizePlan {
        image_id: String::new(),
        scale,
        target_width_px: u32::try_from(target_w).map_err(|_| Error::DegenerateTarget)?,
        target_height_px: u32::try_from(target_h).map_err(|_| Error::DegenerateTarget)?,
        source_width_px: source_w,
        source_height_px: source_h,
        clamped,
    })
}

/// Baseline convention: resize so the longer edge equals `long_side_px`,
/// aspect preserved, no clamping.
pub fn plan_fixed_long_side<T: Scalar>(source_dims: (u32, u32), long_side_px: u32) -> ResizePlan<T> {
    let (source_w, source_h) = source_dims;
    assert!(source_w > 0 && source_h > 0, "source dimensions must be positive");
    assert!(long_side_px > 0, "long side must be positive");
    let scale = count::<T>(u64::from(long_side_px)) / count::<T>(u64::from(source_w.max(source_h)));
    ResizePlan {
        image_id: String::new(),
        scale,
        target_width_px: scaled_dim(source_w, scale).max(1) as u32,
        target_height_px: scaled_dim(source_h, scale).max(1) as u32,
        source_width_px: source_w,
        source_height_px: source_h,
        clamped: false,
    }
}

/// Distribution of the longer target edge over a set of plans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeHistogram {
    pub bin_width_px: u32,
    /// Non-empty bins only, ascending by lower bound.
    pub bins: Vec<HistogramBin>,
    pub total_images: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub long_side_lower_px: u32,
    pub count: u64,
}

impl SizeHistogram {
    pub fn from_plans<T: Scalar>(plans: &[ResizePlan<T>], bin_width_px: u32) -> Self {
        assert!(bin_width_px > 0, "bin width must be positive");
        let mut bins = std::collections::BTreeMap::new();
        for plan in plans {
            let lower = plan.target_long_side() / bin_width_px * bin_width_px;
            *bins.entry(lower).or_insert(0u64) += 1;
        }
        SizeHistogram {
            bin_width_px,
            bins: bins
                .into_iter()
                .map(|(long_side_lower_px, count)| HistogramBin {
                    long_side_lower_px,
                    count,
                })
                .collect(),
            total_images: plans.len() as u64,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lower_px,count\n");
        for bin in &self.bins {
            out.push_str(&format!("{},{}\n", bin.long_side_lower_px, bin.count));
        }
        out
    }
}

/// One plan per record, in manifest order, plus the size histogram over the
/// longer target edge (bin width [`DEFAULT_HISTOGRAM_BIN_WIDTH`]).
pub fn plan_dataset<T: Scalar>(
    manifest: &DatasetManifest<T>,
    profile: &CameraProfile<T>,
    spec: &ReferenceSpec<T>,
    policy: &ResizePolicy<T>,
) -> Result<(Vec<ResizePlan<T>>, SizeHistogram)> {
    let desired = desired_gsd(spec);
    let mut plans = Vec::with_capacity(manifest.records.len());
    for record in &manifest.records {
        let altitude = record
            .altitude_m
            .ok_or_else(|| Error::MissingAltitude(record.image_id.clone()))?;
        let plan = plan_resize(
            profile,
            altitude,
            (record.width_px, record.height_px),
            &desired,
            policy,
        )
        .map_err(|e| e.for_image(record.image_id.clone()))?;
        plans.push(plan.with_image_id(record.image_id.clone()));
    }
    let histogram = SizeHistogram::from_plans(&plans, DEFAULT_HISTOGRAM_BIN_WIDTH);
    Ok((plans, histogram))
}

/// Bilinear-resamples `image` to the plan's target dimensions.
pub fn apply_resize<T: Scalar, P: Scalar>(
    image: &Raster<T>,
    plan: &ResizePlan<P>,
) -> Result<Raster<T>> {
    if image.width() != plan.source_width_px || image.height() != plan.source_height_px {
        return Err(Error::DimensionMismatch {
            actual_w: image.width(),
            actual_h: image.height(),
            expected_w: plan.source_width_px,
            expected_h: plan.source_height_px,
        });
    }
    Ok(image.resize_bilinear(plan.target_width_px, plan.target_height_px))
}

/// Maps boxes from source to target coordinates using the plan's exact
/// per-axis factors. Coordinates stay continuous; nothing is snapped.
pub fn transform_boxes<T: Scalar>(
    boxes: &[BoundingBox<T>],
    plan: &ResizePlan<T>,
) -> Vec<BoundingBox<T>> {
    let sx = plan.scale_x();
    let sy = plan.scale_y();
    boxes
        .iter()
        .map(|b| BoundingBox {
            class_id: b.class_id,
            x_min: b.x_min * sx,
            y_min: b.y_min * sy,
            width: b.width * sx,
            height: b.height * sy,
        })
        .collect()
}

/// Exact inverse of [`transform_boxes`]: maps boxes from target back to
/// source coordinates.
pub fn inverse_transform_boxes<T: Scalar>(
    boxes: &[BoundingBox<T>],
    plan: &ResizePlan<T>,
) -> Vec<BoundingBox<T>> {
    let sx = plan.scale_x();
    let sy = plan.scale_y();
    boxes
        .iter()
        .map(|b| BoundingBox {
            class_id: b.class_id,
            x_min: b.x_min / sx,
            y_min: b.y_min / sy,
            width: b.width / sx,
            height: b.height / sy,
        })
        .collect()
}

/// Reads plans from JSON Lines, one object per image.
pub fn read_plans<T, R>(reader: R) -> Result<Vec<ResizePlan<T>>>
where
    T: Scalar + serde::de::DeserializeOwned,
    R: BufRead,
{
    let mut plans = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let plan: ResizePlan<T> = serde_json::from_str(trimmed).map_err(|e| Error::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?;
        if plan.source_width_px == 0
            || plan.source_height_px == 0
            || plan.target_width_px == 0
            || plan.target_height_px == 0
            || !plan.scale.is_finite()
            || plan.scale <= T::zero()
        {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("invalid plan for image '{}'", plan.image_id),
            });
        }
        plans.push(plan);
    }
    Ok(plans)
}

/// Writes plans as JSON Lines.
pub fn write_plans<T, W>(plans: &[ResizePlan<T>], mut writer: W) -> Result<()>
where
    T: Scalar + Serialize,
    W: Write,
{
    for plan in plans {
        serde_json::to_writer(&mut writer, plan)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::validate_profile;
    use crate::manifest::{ImageRecord, View};

    fn p0() -> CameraProfile<f64> {
        validate_profile(CameraProfile {
            sensor_width_mm: 10.0,
            sensor_height_mm: 7.5,
            focal_length_mm: 10.0,
            native_width_px: 1000,
            native_height_px: 750,
            name: "p0".to_string(),
        })
        .unwrap()
    }

    fn alt(m: f64) -> AltitudeM<f64> {
        AltitudeM::new(m).unwrap()
    }

    fn car_spec() -> ReferenceSpec<f64> {
        ReferenceSpec::new(0, 4.5, 32).unwrap()
    }

    #[test]
    fn desired_gsd_examples() {
        assert_eq!(desired_gsd(&car_spec()).meters_per_pixel, 0.140625);
        assert_eq!(
            desired_gsd(&ReferenceSpec::new(0, 32.0, 32).unwrap()).meters_per_pixel,
            1.0
        );
        assert_eq!(
            desired_gsd(&ReferenceSpec::new(1, 0.5, 32).unwrap()).meters_per_pixel,
            0.015625
        );
    }

    #[test]
    fn plan_at_60m() {
        let plan = plan_resize(
            &p0(),
            alt(60.0),
            (1000, 750),
            &desired_gsd(&car_spec()),
            &ResizePolicy::default(),
        )
        .unwrap();
        assert!((plan.scale - 0.426667).abs() < 1e-6);
        assert_eq!(plan.target_width_px, 427);
        assert_eq!(plan.target_height_px, 320);
        assert!(!plan.clamped);
    }

    #[test]
    fn plan_identity_altitude() {
        // native GSD equals the desired GSD at 140.625 m
        let plan = plan_resize(
            &p0(),
            alt(140.625),
            (1000, 750),
            &desired_gsd(&car_spec()),
            &ResizePolicy::default(),
        )
        .unwrap();
        assert!((plan.scale - 1.0).abs() < 1e-12);
        assert_eq!(plan.target_width_px, 1000);
        assert_eq!(plan.target_height_px, 750);
    }

    #[test]
    fn plan_at_10m_downscales_hard() {
        let plan = plan_resize(
            &p0(),
            alt(10.0),
            (1000, 750),
            &desired_gsd(&car_spec()),
            &ResizePolicy::default(),
        )
        .unwrap();
        assert!((plan.scale - 0.071111).abs() < 1e-6);
        assert_eq!(plan.target_width_px, 71);
        assert_eq!(plan.target_height_px, 53);
    }

    #[test]
    fn zero_altitude_is_an_error() {
        assert!(matches!(
            plan_resize(
                &p0(),
                alt(0.0),
                (1000, 750),
                &desired_gsd(&car_spec()),
                &ResizePolicy::default(),
            ),
            Err(Error::ZeroAltitude)
        ));
    }

    #[test]
    fn stride_rounds_to_nearest_multiple_ties_up() {
        assert_eq!(round_to_stride(427, 32), 416);
        assert_eq!(round_to_stride(48, 32), 64); // tie rounds up
        assert_eq!(round_to_stride(15, 32), 32); // at least one stride
        assert_eq!(round_to_stride(5, 1), 5);
        assert_eq!(round_to_stride(0, 1), 1);
    }

    #[test]
    fn stride_policy_applies_to_both_dims() {
        let policy = ResizePolicy {
            stride: 32,
            ..ResizePolicy::default()
        };
        let plan = plan_resize(
            &p0(),
            alt(60.0),
            (1000, 750),
            &desired_gsd(&car_spec()),
            &policy,
        )
        .unwrap();
        assert_eq!(plan.target_width_px % 32, 0);
        assert_eq!(plan.target_height_px % 32, 0);
        assert_eq!(plan.target_width_px, 416);
        assert_eq!(plan.target_height_px, 320);
    }

    #[test]
    fn upscale_is_capped() {
        let plan = plan_resize(
            &p0(),
            alt(300.0),
            (1000, 750),
            &desired_gsd(&car_spec()),
            &ResizePolicy::default(),
        )
        .unwrap();
        assert_eq!(plan.scale, 2.0);
        assert_eq!(plan.target_width_px, 2000);
        assert!(plan.clamped);
    }

    #[test]
    fn long_side_bounds_clamp() {
        let policy = ResizePolicy {
            max_long_side_px: 500,
            ..ResizePolicy::default()
        };
        let plan = plan_resize(
            &p0(),
            alt(140.625),
            (1000, 750),
            &desired_gsd(&car_spec()),
            &policy,
        )
        .unwrap();
        assert_eq!(plan.target_width_px, 500);
        assert_eq!(plan.target_height_px, 375);
        assert!(plan.clamped);

        let plan = plan_resize(
            &p0(),
            alt(1.0),
            (1000, 750),
            &desired_gsd(&car_spec()),
            &ResizePolicy::default(),
        )
        .unwrap();
        assert_eq!(plan.target_long_side(), 32);
        assert!(plan.clamped);
    }

    #[test]
    fn degenerate_aspect_errors() {
        let policy = ResizePolicy {
            max_long_side_px: 32,
            min_long_side_px: 1,
            ..ResizePolicy::default()
        };
        // 4096:1 aspect: clamping the long side to 32 pushes the short side to 0
        let result = plan_resize(
            &p0(),
            alt(140.625),
            (4096, 1),
            &desired_gsd(&car_spec()),
            &policy,
        );
        assert!(matches!(result, Err(Error::DegenerateTarget)));
    }

    #[test]
    fn scale_monotone_in_altitude_until_clamped() {
        let profile = p0();
        let desired = desired_gsd(&car_spec());
        let policy = ResizePolicy::default();
        let mut last = 0.0;
        for a in (5..=280).step_by(5) {
            let plan =
                plan_resize(&profile, alt(a as f64), (1000, 750), &desired, &policy).unwrap();
            if plan.clamped {
                assert!(plan.scale >= last);
            } else {
                assert!(plan.scale > last);
            }
            last = plan.scale;
        }
    }

    #[test]
    fn dataset_plan_and_histogram() {
        let records = vec![
            rec("a", 10.0),
            rec("b", 60.0),
            rec("c", 140.625),
        ];
        let manifest = DatasetManifest {
            records,
            class_names: std::collections::BTreeMap::from([(0, "car".to_string())]),
        };
        let (plans, histogram) = plan_dataset(
            &manifest,
            &p0(),
            &car_spec(),
            &ResizePolicy::default(),
        )
        .unwrap();
        let long: Vec<u32> = plans.iter().map(|p| p.target_long_side()).collect();
        assert_eq!(long, vec![71, 427, 1000]);
        assert_eq!(plans[0].image_id, "a");
        assert_eq!(histogram.bin_width_px, 128);
        assert_eq!(histogram.total_images, 3);
        assert_eq!(
            histogram.bins,
            vec![
                HistogramBin { long_side_lower_px: 0, count: 1 },
                HistogramBin { long_side_lower_px: 384, count: 1 },
                HistogramBin { long_side_lower_px: 896, count: 1 },
            ]
        );
    }

    #[test]
    fn empty_dataset_plans_to_nothing() {
        let manifest = DatasetManifest::<f64>::default();
        let (plans, histogram) =
            plan_dataset(&manifest, &p0(), &car_spec(), &ResizePolicy::default()).unwrap();
        assert!(plans.is_empty());
        assert_eq!(histogram.total_images, 0);
        assert!(histogram.bins.is_empty());
    }

    #[test]
    fn identical_records_fill_a_single_bin() {
        let manifest = DatasetManifest {
            records: vec![rec("a", 60.0), rec("b", 60.0), rec("c", 60.0)],
            class_names: Default::default(),
        };
        let (plans, histogram) =
            plan_dataset(&manifest, &p0(), &car_spec(), &ResizePolicy::default()).unwrap();
        assert!(plans.windows(2).all(|w| {
            w[0].scale == w[1].scale && w[0].target_width_px == w[1].target_width_px
        }));
        assert_eq!(histogram.bins.len(), 1);
        assert_eq!(histogram.bins[0].count, 3);
    }

    fn rec(id: &str, altitude: f64) -> ImageRecord {
        ImageRecord {
            image_id: id.to_string(),
            file_path: format!("{id}.pgm"),
            width_px: 1000,
            height_px: 750,
            altitude_m: Some(AltitudeM::new(altitude).unwrap()),
            view: View::Bev,
            boxes: vec![],
        }
    }

    #[test]
    fn missing_altitude_names_the_record() {
        let mut record = rec("a", 1.0);
        record.altitude_m = None;
        let manifest = DatasetManifest {
            records: vec![record],
            class_names: Default::default(),
        };
        assert!(matches!(
            plan_dataset(&manifest, &p0(), &car_spec(), &ResizePolicy::default()),
            Err(Error::MissingAltitude(id)) if id == "a"
        ));
    }

    #[test]
    fn per_record_plan_errors_carry_the_image_id() {
        let manifest = DatasetManifest {
            records: vec![rec("grounded", 0.0)],
            class_names: Default::default(),
        };
        match plan_dataset(&manifest, &p0(), &car_spec(), &ResizePolicy::default()) {
            Err(Error::WithImage { image_id, source }) => {
                assert_eq!(image_id, "grounded");
                assert!(matches!(*source, Error::ZeroAltitude));
            }
            other => panic!("expected annotated error, got {other:?}"),
        }
    }

    #[test]
    fn apply_resize_checks_dimensions() {
        let image = Raster::<f32>::filled(10, 10, 0.5);
        let plan = ResizePlan::<f64>::identity("x", 20, 20);
        assert!(matches!(
            apply_resize(&image, &plan),
            Err(Error::DimensionMismatch { .. })
        ));
        let plan = ResizePlan::<f64>::identity("x", 10, 10);
        assert_eq!(apply_resize(&image, &plan).unwrap(), image);
    }

    #[test]
    fn box_transform_examples() {
        let plan = plan_resize(
            &p0(),
            alt(60.0),
            (1000, 750),
            &desired_gsd(&car_spec()),
            &ResizePolicy::default(),
        )
        .unwrap();
        let boxes = vec![BoundingBox::new(0, 100.0, 100.0, 45.0, 30.0)];
        let out = transform_boxes(&boxes, &plan);
        assert!((out[0].x_min - 42.7).abs() < 1e-9);
        assert!((out[0].y_min - 42.666667).abs() < 1e-6);
        assert!((out[0].width - 19.215).abs() < 1e-9);
        assert!((out[0].height - 12.8).abs() < 1e-9);

        let back = inverse_transform_boxes(&out, &plan);
        assert!((back[0].x_min - 100.0).abs() < 1e-9);
        assert!((back[0].width - 45.0).abs() < 1e-9);

        // identity plan leaves boxes unchanged; empty lists stay empty
        let id_plan = ResizePlan::<f64>::identity("x", 1000, 750);
        assert_eq!(transform_boxes(&boxes, &id_plan), boxes);
        assert!(transform_boxes(&[], &plan).is_empty());
        assert!(inverse_transform_boxes(&[], &plan).is_empty());
    }

    #[test]
    fn fixed_long_side_baseline() {
        let plan = plan_fixed_long_side::<f64>((1000, 750), 2048);
        assert_eq!(plan.target_width_px, 2048);
        assert_eq!(plan.target_height_px, 1536);
        assert!((plan.scale - 2.048).abs() < 1e-12);
    }

    #[test]
    fn plans_jsonl_round_trip() {
        let plans = vec![
            plan_resize(
                &p0(),
                alt(60.0),
                (1000, 750),
                &desired_gsd(&car_spec()),
                &ResizePolicy::default(),
            )
            .unwrap()
            .with_image_id("a"),
            ResizePlan::identity("b", 640, 480),
        ];
        let mut buf = Vec::new();
        write_plans(&plans, &mut buf).unwrap();
        let back = read_plans::<f64, _>(buf.as_slice()).unwrap();
        assert_eq!(back, plans);
    }

    #[test]
    fn histogram_csv_shape() {
        let plans = vec![ResizePlan::<f64>::identity("a", 300, 200)];
        let histogram = SizeHistogram::from_plans(&plans, 128);
        assert_eq!(histogram.to_csv(), "bin_lower_px,count\n256,1\n");
    }
}
