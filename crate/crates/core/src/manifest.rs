//! Dataset manifests: ground-truth boxes, per-image metadata, class tables,
//! and the JSON Lines ingest/writer.
//!
//! One record per line:
//! `{"image_id":…,"file":…,"width":…,"height":…,"altitude_m":…,"view":…,"boxes":[{"cls":…,"x":…,"y":…,"w":…,"h":…}]}`
//! with an optional leading `{"classes":{"0":"car",…}}` header line.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::camera::AltitudeM;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Axis-aligned box with a top-left origin and continuous pixel units.
/// `width`/`height` are extents, so `area = width * height`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox<T = f64> {
    #[serde(rename = "cls")]
    pub class_id: u32,
    #[serde(rename = "x")]
    pub x_min: T,
    #[serde(rename = "y")]
    pub y_min: T,
    #[serde(rename = "w")]
    pub width: T,
    #[serde(rename = "h")]
    pub height: T,
}

impl<T: Scalar> BoundingBox<T> {
    pub fn new(class_id: u32, x_min: T, y_min: T, width: T, height: T) -> Self {
        BoundingBox {
            class_id,
            x_min,
            y_min,
            width,
            height,
        }
    }

    pub fn x_max(&self) -> T {
        self.x_min + self.width
    }

    pub fn y_max(&self) -> T {
        self.y_min + self.height
    }

    pub fn area(&self) -> T {
        self.width * self.height
    }

    /// The longer of the two box sides.
    pub fn long_side(&self) -> T {
        self.width.max(self.height)
    }
}

/// Capture viewpoint tag. Membership is ingest metadata, not computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum View {
    Bev,
    Oblique,
    Front,
    Unknown,
}

impl std::fmt::Display for View {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            View::Bev => "bev",
            View::Oblique => "oblique",
            View::Front => "front",
            View::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for View {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "bev" => Ok(View::Bev),
            "oblique" => Ok(View::Oblique),
            "front" => Ok(View::Front),
            "unknown" => Ok(View::Unknown),
            other => Err(format!("unknown view tag '{other}'")),
        }
    }
}

/// One image with its metadata and ground-truth boxes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord<T = f64> {
    pub image_id: String,
    #[serde(rename = "file")]
    pub file_path: String,
    #[serde(rename = "width")]
    pub width_px: u32,
    #[serde(rename = "height")]
    pub height_px: u32,
    pub altitude_m: Option<AltitudeM<T>>,
    pub view: View,
    pub boxes: Vec<BoundingBox<T>>,
}

/// Ordered set of image records plus the class-id table.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DatasetManifest<T = f64> {
    pub records: Vec<ImageRecord<T>>,
    pub class_names: BTreeMap<u32, String>,
}

impl<T> DatasetManifest<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// A box adjusted during ingest, kept out of the manifest itself.
#[derive(Debug, Clone, PartialEq)]
pub struct IngestWarning {
    pub line: usize,
    pub image_id: String,
    pub message: String,
}

/// Parse result: the validated manifest plus any clip warnings.
#[derive(Debug, Clone)]
pub struct ParsedManifest<T = f64> {
    pub manifest: DatasetManifest<T>,
    pub warnings: Vec<IngestWarning>,
}

#[derive(Deserialize)]
struct ClassHeader {
    classes: BTreeMap<u32, String>,
}

/// Parses a JSON Lines manifest.
///
/// Boxes are clipped to the image bounds (recorded as warnings); malformed
/// lines, boxes fully outside the image, zero-extent boxes, and non-finite
/// values are rejected with their line number.
pub fn parse_manifest<T, R>(reader: R) -> Result<ParsedManifest<T>>
where
    T: Scalar + serde::de::DeserializeOwned,
    R: BufRead,
{
    let mut records: Vec<ImageRecord<T>> = Vec::new();
    let mut warnings = Vec::new();
    let mut header: Option<BTreeMap<u32, String>> = None;
    let mut seen_ids: HashSet<String> = HashSet::new();
    let mut seen_record = false;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }

        // A `classes` header is only honored before the first record.
        if !seen_record && header.is_none() {
            let value: serde_json::Value =
                serde_json::from_str(trimmed).map_err(|e| Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                })?;
            if value.get("classes").is_some() {
                let parsed: ClassHeader =
                    serde_json::from_value(value).map_err(|e| Error::Parse {
                        line: line_no,
                        message: format!("class header: {e}"),
                    })?;
                header = Some(parsed.classes);
                continue;
            }
            let record: ImageRecord<T> =
                serde_json::from_value(value).map_err(|e| Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                })?;
            seen_record = true;
            ingest_record(record, line_no, &header, &mut seen_ids, &mut warnings)
                .map(|r| records.push(r))?;
            continue;
        }

        let record: ImageRecord<T> = serde_json::from_str(trimmed).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        seen_record = true;
        ingest_record(record, line_no, &header, &mut seen_ids, &mut warnings)
            .map(|r| records.push(r))?;
    }

    let class_names = match header {
        Some(names) => names,
        None => records
            .iter()
            .flat_map(|r| r.boxes.iter().map(|b| b.class_id))
            .map(|id| (id, id.to_string()))
            .collect(),
    };

    Ok(ParsedManifest {
        manifest: DatasetManifest {
            records,
            class_names,
        },
        warnings,
    })
}

fn ingest_record<T: Scalar>(
    mut record: ImageRecord<T>,
    line: usize,
    header: &Option<BTreeMap<u32, String>>,
    seen_ids: &mut HashSet<String>,
    warnings: &mut Vec<IngestWarning>,
) -> Result<ImageRecord<T>> {
    let parse_err = |message: String| Error::Parse { line, message };

    if record.image_id.is_empty() {
        return Err(parse_err("empty image_id".to_string()));
    }
    if !seen_ids.insert(record.image_id.clone()) {
        return Err(Error::DuplicateImageId(record.image_id));
    }
    if record.width_px == 0 || record.height_px == 0 {
        return Err(parse_err(format!(
            "image '{}' has zero dimension",
            record.image_id
        )));
    }
    if let Some(alt) = record.altitude_m {
        let meters = alt.meters();
        if !meters.is_finite() || meters < T::zero() {
            return Err(parse_err(format!(
                "image '{}' has invalid altitude {meters}",
                record.image_id
            )));
        }
    }

    let img_w = crate::scalar::count::<T>(u64::from(record.width_px));
    let img_h = crate::scalar::count::<T>(u64::from(record.height_px));
    for bbox in &mut record.boxes {
        if let Some(names) = header {
            if !names.contains_key(&bbox.class_id) {
                return Err(Error::UnknownClassId {
                    class_id: bbox.class_id,
                    line,
                });
            }
        }
        for (name, v) in [
            ("x", bbox.x_min),
            ("y", bbox.y_min),
            ("w", bbox.width),
            ("h", bbox.height),
        ] {
            if !v.is_finite() {
                return Err(parse_err(format!("box field '{name}' is not finite")));
            }
        }
        if bbox.width <= T::zero() || bbox.height <= T::zero() {
            return Err(parse_err(format!(
                "box has non-positive extent {}x{}",
                bbox.width, bbox.height
            )));
        }

        let x0 = bbox.x_min.max(T::zero()).min(img_w);
        let y0 = bbox.y_min.max(T::zero()).min(img_h);
        let x1 = bbox.x_max().max(T::zero()).min(img_w);
        let y1 = bbox.y_max().max(T::zero()).min(img_h);
        if x1 <= x0 || y1 <= y0 {
            return Err(parse_err(format!(
                "box ({}, {}, {}, {}) lies entirely outside the {}x{} image",
                bbox.x_min, bbox.y_min, bbox.width, bbox.height, record.width_px, record.height_px
            )));
        }
        let clipped = BoundingBox {
            class_id: bbox.class_id,
            x_min: x0,
            y_min: y0,
            width: x1 - x0,
            height: y1 - y0,
        };
        if clipped != *bbox {
            warnings.push(IngestWarning {
                line,
                image_id: record.image_id.clone(),
                message: format!(
                    "box ({}, {}, {}, {}) clipped to image bounds",
                    bbox.x_min, bbox.y_min, bbox.width, bbox.height
                ),
            });
            *bbox = clipped;
        }
    }

    Ok(record)
}

/// Writes a manifest as JSON Lines: the class header first, then every
/// record in order, with canonical field ordering.
pub fn write_manifest<T, W>(manifest: &DatasetManifest<T>, mut writer: W) -> Result<()>
where
    T: Scalar + Serialize,
    W: Write,
{
    let header = serde_json::json!({ "classes": manifest.class_names });
    serde_json::to_writer(&mut writer, &header).map_err(io_err)?;
    writer.write_all(b"\n")?;
    for record in &manifest.records {
        serde_json::to_writer(&mut writer, record).map_err(io_err)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

fn io_err(e: serde_json::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Rewrites box classes through `mapping`; unmapped ids pass through.
/// Names of ids that were merged away are dropped from the class table.
pub fn merge_classes<T: Scalar>(
    manifest: &DatasetManifest<T>,
    mapping: &BTreeMap<u32, u32>,
) -> DatasetManifest<T> {
    let records = manifest
        .records
        .iter()
        .map(|record| {
            let mut record = record.clone();
            for bbox in &mut record.boxes {
                if let Some(&target) = mapping.get(&bbox.class_id) {
                    bbox.class_id = target;
                }
            }
            record
        })
        .collect();

    let mut class_names = manifest.class_names.clone();
    for (&source, &target) in mapping {
        if source != target {
            class_names.remove(&source);
        }
        class_names
            .entry(target)
            .or_insert_with(|| target.to_string());
    }

    DatasetManifest {
        records,
        class_names,
    }
}

/// Keeps only records captured with the given view, in the original order.
pub fn filter_view<T: Scalar>(manifest: &DatasetManifest<T>, view: View) -> DatasetManifest<T> {
    DatasetManifest {
        records: manifest
            .records
            .iter()
            .filter(|r| r.view == view)
            .cloned()
            .collect(),
        class_names: manifest.class_names.clone(),
    }
}
