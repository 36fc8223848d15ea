//! Altitude-adaptive image resizing for bird's-eye-view aerial imagery.
//!
//! In nadir drone footage the pixel size of an object is fixed by the
//! camera intrinsics and the flight altitude alone. This crate turns that
//! observation into a preprocessing pipeline: compute the per-image ground
//! sample distance, derive the scale that puts a reference class at a fixed
//! pixel size, resize images and annotations accordingly, and measure the
//! effect with an AP evaluator, a synthetic scene harness, and an
//! inference-throughput model.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); every
//! public type defaults to `f64` for geometry and `f32` for raster pixels.

pub mod altitude;
pub mod camera;
pub mod error;
pub mod eval;
pub mod manifest;
pub mod perf;
pub mod raster;
pub mod resize;
pub mod scalar;
pub mod split;
pub mod synth;

pub use altitude::{annotate_dataset, estimate_altitude, estimate_gsd_from_boxes, ClassSizePrior};
pub use camera::{
    altitude_from_gsd, gsd_from_altitude, validate_profile, AltitudeM, CameraProfile, Gsd, GsdAxis,
};
pub use error::{Error, Result};
pub use eval::{average_precision, evaluate, iou, match_detections, Detection, EvalReport};
pub use manifest::{
    filter_view, merge_classes, parse_manifest, write_manifest, BoundingBox, DatasetManifest,
    ImageRecord, View,
};
pub use perf::{
    bench_resize, fpn_elimination_factor, latency_estimate, speedup_report, LatencyModel,
    SpeedupReport,
};
pub use raster::Raster;
pub use resize::{
    apply_resize, desired_gsd, inverse_transform_boxes, plan_dataset, plan_fixed_long_side,
    plan_resize, transform_boxes, ReferenceSpec, ResizePlan, ResizePolicy, SizeHistogram,
};
pub use scalar::Scalar;
pub use split::{build_split, SplitKind, SplitResult};
pub use synth::{
    generate_corpus, generate_scene, reference_detector, AltitudeSampler, Connectivity,
    DetectorConfig, SceneConfig,
};

/// Geometry types pinned to `f32`, for callers that want single precision
/// end to end.
pub mod f32_types {
    pub type CameraProfile = crate::camera::CameraProfile<f32>;
    pub type AltitudeM = crate::camera::AltitudeM<f32>;
    pub type Gsd = crate::camera::Gsd<f32>;
    pub type BoundingBox = crate::manifest::BoundingBox<f32>;
    pub type ImageRecord = crate::manifest::ImageRecord<f32>;
    pub type DatasetManifest = crate::manifest::DatasetManifest<f32>;
    pub type ResizePlan = crate::resize::ResizePlan<f32>;
    pub type Detection = crate::eval::Detection<f32>;
}

/// Raster pinned to `f64` pixels; the default raster uses `f32`.
pub type Raster64 = raster::Raster<f64>;
