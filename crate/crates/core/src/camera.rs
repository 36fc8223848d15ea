//! Pinhole ground-sample-distance arithmetic.
//!
//! For a nadir image the ground footprint of a pixel is fixed by the sensor
//! size, focal length, image resolution, and flight altitude:
//! `gsd = sensor_width / (focal_length * image_width) * altitude`. Everything
//! downstream (resize planning, altitude estimation) is built on this formula
//! and its inverse.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{num, Scalar};

/// Relative tolerance on the pixel-pitch mismatch between the two axes.
///
/// Within this bound the width-based and height-based GSD agree closely
/// enough that planning can use the width-based value alone.
pub const SQUARE_PIXEL_TOLERANCE: f64 = 1e-3;

/// Fixed camera intrinsics: physical sensor size, focal length, and the
/// native capture resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraProfile<T = f64> {
    pub sensor_width_mm: T,
    pub sensor_height_mm: T,
    pub focal_length_mm: T,
    pub native_width_px: u32,
    pub native_height_px: u32,
    #[serde(default)]
    pub name: String,
}

/// Flight altitude above ground in meters. Always finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AltitudeM<T = f64>(T);

impl<T: Scalar> AltitudeM<T> {
    pub fn new(meters: T) -> Result<Self> {
        if !meters.is_finite() || meters < T::zero() {
            return Err(Error::InvalidAltitude(
                meters.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(AltitudeM(meters))
    }

    pub fn meters(self) -> T {
        self.0
    }
}

/// Image axis a GSD value was derived from. The width-based value is the
/// vertical GSD; with square pixels the horizontal value agrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GsdAxis {
    Vertical,
    Horizontal,
}

/// Ground sample distance: meters of ground covered by one pixel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gsd<T = f64> {
    pub meters_per_pixel: T,
    pub axis: GsdAxis,
}

impl<T: Scalar> Gsd<T> {
    pub fn vertical(meters_per_pixel: T) -> Self {
        Gsd {
            meters_per_pixel,
            axis: GsdAxis::Vertical,
        }
    }

    pub fn horizontal(meters_per_pixel: T) -> Self {
        Gsd {
            meters_per_pixel,
            axis: GsdAxis::Horizontal,
        }
    }
}

/// Checks the profile invariants and returns the profile unchanged.
///
/// All lengths must be strictly positive, pixel counts strictly positive,
/// and the per-axis pixel pitches must agree within
/// [`SQUARE_PIXEL_TOLERANCE`].
pub fn validate_profile<T: Scalar>(profile: CameraProfile<T>) -> Result<CameraProfile<T>> {
    let lengths = [
        ("sensor_width_mm", profile.sensor_width_mm),
        ("sensor_height_mm", profile.sensor_height_mm),
        ("focal_length_mm", profile.focal_length_mm),
    ];
    for (name, value) in lengths {
        if !value.is_finite() || value <= T::zero() {
            return Err(Error::NonPositiveIntrinsic {
                name,
                value: value.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let counts = [
        ("native_width_px", profile.native_width_px),
        ("native_height_px", profile.native_height_px),
    ];
    for (name, value) in counts {
        if value == 0 {
            return Err(Error::NonPositiveIntrinsic { name, value: 0.0 });
        }
    }

    let pitch_w = profile.sensor_width_mm / num::<T>(f64::from(profile.native_width_px));
    let pitch_h = profile.sensor_height_mm / num::<T>(f64::from(profile.native_height_px));
    let relative = ((pitch_w - pitch_h) / pitch_w).abs();
    if relative > num::<T>(SQUARE_PIXEL_TOLERANCE) {
        return Err(Error::NonSquarePixels {
            relative_error: relative.to_f64().unwrap_or(f64::NAN),
            tolerance: SQUARE_PIXEL_TOLERANCE,
        });
    }
    Ok(profile)
}

/// Width-based (vertical) GSD at the given altitude for an image of
/// `image_width_px` pixels.
///
/// Linear in altitude and inversely proportional to the pixel width.
/// Expects a validated profile and `image_width_px > 0`.
pub fn gsd_from_altitude<T: Scalar>(
    profile: &CameraProfile<T>,
    altitude: AltitudeM<T>,
    image_width_px: u32,
) -> Gsd<T> {
    assert!(image_width_px > 0, "image width must be positive");
    let width = num::<T>(f64::from(image_width_px));
    let mpp = profile.sensor_width_mm / (profile.focal_length_mm * width) * altitude.meters();
    Gsd::vertical(mpp)
}

/// Inverts [`gsd_from_altitude`]: the altitude at which an image of
/// `image_width_px` pixels has the given GSD.
pub fn altitude_from_gsd<T: Scalar>(
    profile: &CameraProfile<T>,
    gsd: Gsd<T>,
    image_width_px: u32,
) -> AltitudeM<T> {
    assert!(image_width_px > 0, "image width must be positive");
    let width = num::<T>(f64::from(image_width_px));
    let meters =
        gsd.meters_per_pixel * profile.focal_length_mm * width / profile.sensor_width_mm;
    AltitudeM::new(meters).expect("finite non-negative altitude from valid GSD")
}

/// Reads and validates a camera profile from JSON.
pub fn read_profile<T, R>(reader: R) -> Result<CameraProfile<T>>
where
    T: Scalar + serde::de::DeserializeOwned,
    R: Read,
{
    let profile: CameraProfile<T> = serde_json::from_reader(reader).map_err(|e| Error::Parse {
        line: e.line(),
        message: format!("camera profile: {e}"),
    })?;
    validate_profile(profile)
}
