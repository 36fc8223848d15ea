//! Average-precision evaluation of scored detections against ground truth.
//!
//! Matching is greedy by descending score: a detection is a true positive
//! when its best-IoU unmatched ground-truth box clears the IoU threshold,
//! which consumes that box. Flags are pooled across images per class,
//! sorted globally by score, and integrated with all-point interpolation
//! (the area under the precision envelope). The mean AP is the unweighted
//! mean over classes that have at least one ground-truth instance.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::{BoundingBox, DatasetManifest};
use crate::scalar::{count, Scalar};

/// A scored box in original-image coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection<T = f64> {
    pub image_id: String,
    pub bbox: BoundingBox<T>,
    pub score: T,
}

impl<T: Scalar> Detection<T> {
    pub fn new(image_id: impl Into<String>, bbox: BoundingBox<T>, score: T) -> Self {
        Detection {
            image_id: image_id.into(),
            bbox,
            score,
        }
    }

    pub fn with_image_id(mut self, image_id: impl Into<String>) -> Self {
        self.image_id = image_id.into();
        self
    }
}

/// Outcome of matching one detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchFlag {
    Tp,
    Fp,
}

/// Intersection over union of two boxes, in `[0, 1]`.
pub fn iou<T: Scalar>(a: &BoundingBox<T>, b: &BoundingBox<T>) -> T {
    let zero = T::zero();
    let ix = (a.x_max().min(b.x_max()) - a.x_min.max(b.x_min)).max(zero);
    let iy = (a.y_max().min(b.y_max()) - a.y_min.max(b.y_min)).max(zero);
    let inter = ix * iy;
    let union = a.area() + b.area() - inter;
    if union <= zero {
        zero
    } else {
        inter / union
    }
}

/// Greedy flags over `(original_index, detection)` pairs belonging to one
/// image and class. Output order follows descending score (ties by index).
fn greedy_flags<T: Scalar>(
    dets: &[(usize, &Detection<T>)],
    gts: &[BoundingBox<T>],
    iou_threshold: T,
) -> Vec<(usize, MatchFlag)> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| {
        let (ia, da) = &dets[a];
        let (ib, db) = &dets[b];
        db.score
            .partial_cmp(&da.score)
            .expect("finite scores")
            .then_with(|| da.image_id.cmp(&db.image_id))
            .then_with(|| ia.cmp(ib))
    });

    let mut gt_taken = vec![false; gts.len()];
    let mut out = Vec::with_capacity(dets.len());
    for &pos in &order {
        let (orig_idx, det) = &dets[pos];
        let mut best: Option<(usize, T)> = None;
        for (g, gt) in gts.iter().enumerate() {
            if gt_taken[g] {
                continue;
            }
            let overlap = iou(&det.bbox, gt);
            let better = match best {
                None => true,
                Some((_, current)) => overlap > current,
            };
            if better {
                best = Some((g, overlap));
            }
        }
        let flag = match best {
            Some((g, overlap)) if overlap >= iou_threshold => {
                gt_taken[g] = true;
                MatchFlag::Tp
            }
            _ => MatchFlag::Fp,
        };
        out.push((*orig_idx, flag));
    }
    out
}

/// Matches detections of one image and class against its ground truth.
/// Returned pairs are in descending-score order.
pub fn match_detections<T: Scalar>(
    dets: &[Detection<T>],
    gts: &[BoundingBox<T>],
    iou_threshold: T,
) -> Vec<(Detection<T>, MatchFlag)> {
    let indexed: Vec<(usize, &Detection<T>)> = dets.iter().enumerate().collect();
    greedy_flags(&indexed, gts, iou_threshold)
        .into_iter()
        .map(|(idx, flag)| (dets[idx].clone(), flag))
        .collect()
}

/// All-point interpolated AP over a descending-score TP/FP sequence.
///
/// With no ground truth the AP is defined as zero.
pub fn average_precision<T: Scalar>(flags: &[MatchFlag], n_gt: usize) -> T {
    if n_gt == 0 || flags.is_empty() {
        return T::zero();
    }
    let total_gt = count::<T>(n_gt as u64);
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut precision = Vec::with_capacity(flags.len());
    let mut recall = Vec::with_capacity(flags.len());
    for flag in flags {
        match flag {
            MatchFlag::Tp => tp += 1,
            MatchFlag::Fp => fp += 1,
        }
        precision.push(count::<T>(tp) / count::<T>(tp + fp));
        recall.push(count::<T>(tp) / total_gt);
    }
    // precision envelope: at recall r, the max precision at recall >= r
    for i in (0..precision.len() - 1).rev() {
        precision[i] = precision[i].max(precision[i + 1]);
    }
    let mut ap = T::zero();
    let mut prev_recall = T::zero();
    for (p, r) in precision.iter().zip(&recall) {
        ap = ap + (*r - prev_recall) * *p;
        prev_recall = *r;
    }
    ap
}

/// AP and counts for one class at one IoU threshold. Counts are taken over
/// the full detection list (no score cutoff).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEval<T = f64> {
    pub iou_threshold: T,
    pub ap: T,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEval<T = f64> {
    pub class_id: u32,
    pub name: String,
    pub gt_count: u64,
    pub by_threshold: Vec<ThresholdEval<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanAp<T = f64> {
    pub iou_threshold: T,
    pub ap: T,
}

/// Per-class and mean AP at each requested IoU threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport<T = f64> {
    pub thresholds: Vec<T>,
    pub classes: Vec<ClassEval<T>>,
    pub mean_ap: Vec<MeanAp<T>>,
}

impl<T: Scalar> EvalReport<T> {
    pub fn class_ap(&self, class_id: u32, iou_threshold: T) -> Option<T> {
        let class = self.classes.iter().find(|c| c.class_id == class_id)?;
        class
            .by_threshold
            .iter()
            .find(|t| t.iou_threshold == iou_threshold)
            .map(|t| t.ap)
    }

    pub fn mean(&self, iou_threshold: T) -> Option<T> {
        self.mean_ap
            .iter()
            .find(|m| m.iou_threshold == iou_threshold)
            .map(|m| m.ap)
    }

    /// Aligned text rendering, one row per class and threshold.
    pub fn to_text_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<8} {:<16} {:>6} {:>9} {:>7} {:>7} {:>7}\n",
            "class", "name", "iou", "ap", "tp", "fp", "fn"
        ));
        for class in &self.classes {
            for row in &class.by_threshold {
                out.push_str(&format!(
                    "{:<8} {:<16} {:>6.2} {:>9.4} {:>7} {:>7} {:>7}\n",
                    class.class_id,
                    class.name,
                    row.iou_threshold.to_f64().unwrap_or(f64::NAN),
                    row.ap.to_f64().unwrap_or(f64::NAN),
                    row.true_positives,
                    row.false_positives,
                    row.false_negatives,
                ));
            }
        }
        for mean in &self.mean_ap {
            out.push_str(&format!(
                "{:<8} {:<16} {:>6.2} {:>9.4}\n",
                "mean",
                "",
                mean.iou_threshold.to_f64().unwrap_or(f64::NAN),
                mean.ap.to_f64().unwrap_or(f64::NAN),
            ));
        }
        out
    }
}

/// Evaluates detections against the manifest's ground truth.
///
/// Detections must be in original-image coordinates and reference known
/// image ids. Classes with no ground truth get AP 0 and are excluded from
/// the mean.
pub fn evaluate<T: Scalar>(
    dets: &[Detection<T>],
    manifest: &DatasetManifest<T>,
    thresholds: &[T],
) -> Result<EvalReport<T>> {
    let record_ids: BTreeSet<&str> = manifest
        .records
        .iter()
        .map(|r| r.image_id.as_str())
        .collect();
    for det in dets {
        if !record_ids.contains(det.image_id.as_str()) {
            return Err(Error::UnknownImageId(det.image_id.clone()));
        }
    }

    let mut classes: BTreeSet<u32> = BTreeSet::new();
    // ground truth per (class, image)
    let mut gt_by_class: HashMap<u32, BTreeMap<&str, Vec<BoundingBox<T>>>> = HashMap::new();
    for record in &manifest.records {
        for bbox in &record.boxes {
            classes.insert(bbox.class_id);
            gt_by_class
                .entry(bbox.class_id)
                .or_default()
                .entry(record.image_id.as_str())
                .or_default()
                .push(bbox.clone());
        }
    }
    // detections per (class, image), keeping original indices for tie-breaks
    let mut det_by_class: HashMap<u32, BTreeMap<&str, Vec<(usize, &Detection<T>)>>> =
        HashMap::new();
    for (idx, det) in dets.iter().enumerate() {
        classes.insert(det.bbox.class_id);
        det_by_class
            .entry(det.bbox.class_id)
            .or_default()
            .entry(det.image_id.as_str())
            .or_default()
            .push((idx, det));
    }

    let empty_gts: BTreeMap<&str, Vec<BoundingBox<T>>> = BTreeMap::new();
    let empty_dets: BTreeMap<&str, Vec<(usize, &Detection<T>)>> = BTreeMap::new();

    let mut class_evals = Vec::new();
    for &class_id in &classes {
        let gts = gt_by_class.get(&class_id).unwrap_or(&empty_gts);
        let class_dets = det_by_class.get(&class_id).unwrap_or(&empty_dets);
        let n_gt: usize = gts.values().map(Vec::len).sum();

        let mut by_threshold = Vec::with_capacity(thresholds.len());
        for &threshold in thresholds {
            // match per image, then pool globally by (score, image_id, index)
            let mut pooled: Vec<(usize, MatchFlag)> = Vec::new();
            for (image_id, image_dets) in class_dets {
                let image_gts = gts.get(image_id).map(Vec::as_slice).unwrap_or(&[]);
                pooled.extend(greedy_flags(image_dets, image_gts, threshold));
            }
            pooled.sort_by(|&(a, _), &(b, _)| {
                let da = &dets[a];
                let db = &dets[b];
                db.score
                    .partial_cmp(&da.score)
                    .expect("finite scores")
                    .then_with(|| da.image_id.cmp(&db.image_id))
                    .then_with(|| a.cmp(&b))
            });
            let flags: Vec<MatchFlag> = pooled.iter().map(|&(_, f)| f).collect();
            let tp = flags.iter().filter(|&&f| f == MatchFlag::Tp).count() as u64;
            let fp = flags.len() as u64 - tp;
            by_threshold.push(ThresholdEval {
                iou_threshold: threshold,
                ap: average_precision(&flags, n_gt),
                true_positives: tp,
                false_positives: fp,
                false_negatives: n_gt as u64 - tp,
            });
        }

        class_evals.push(ClassEval {
            class_id,
            name: manifest
                .class_names
                .get(&class_id)
                .cloned()
                .unwrap_or_else(|| class_id.to_string()),
            gt_count: n_gt as u64,
            by_threshold,
        });
    }

    let mean_ap = thresholds
        .iter()
        .enumerate()
        .map(|(t_idx, &threshold)| {
            let with_gt: Vec<T> = class_evals
                .iter()
                .filter(|c| c.gt_count > 0)
                .map(|c| c.by_threshold[t_idx].ap)
                .collect();
            let ap = if with_gt.is_empty() {
                T::zero()
            } else {
                with_gt.iter().fold(T::zero(), |acc, &v| acc + v)
                    / count::<T>(with_gt.len() as u64)
            };
            MeanAp {
                iou_threshold: threshold,
                ap,
            }
        })
        .collect();

    Ok(EvalReport {
        thresholds: thresholds.to_vec(),
        classes: class_evals,
        mean_ap,
    })
}

#[derive(Serialize, Deserialize)]
struct DetectionRow<T> {
    image_id: String,
    cls: u32,
    x: T,
    y: T,
    w: T,
    h: T,
    score: T,
}

/// Reads detections from JSON Lines rows
/// `{"image_id":…,"cls":…,"x":…,"y":…,"w":…,"h":…,"score":…}`.
pub fn read_detections<T, R>(reader: R) -> Result<Vec<Detection<T>>>
where
    T: Scalar + serde::de::DeserializeOwned,
    R: BufRead,
{
    let mut dets = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let row: DetectionRow<T> = serde_json::from_str(trimmed).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let finite = row.x.is_finite() && row.y.is_finite() && row.w.is_finite() && row.h.is_finite();
        if !finite || row.w <= T::zero() || row.h <= T::zero() {
            return Err(Error::Parse {
                line: line_no,
                message: "detection box must be finite with positive extent".into(),
            });
        }
        if !row.score.is_finite() || row.score < T::zero() || row.score > T::one() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("score {} outside [0, 1]", row.score),
            });
        }
        dets.push(Detection {
            image_id: row.image_id,
            bbox: BoundingBox::new(row.cls, row.x, row.y, row.w, row.h),
            score: row.score,
        });
    }
    Ok(dets)
}

/// Writes detections as JSON Lines.
pub fn write_detections<T, W>(dets: &[Detection<T>], mut writer: W) -> Result<()>
where
    T: Scalar + Serialize,
    W: Write,
{
    for det in dets {
        let row = DetectionRow {
            image_id: det.image_id.clone(),
            cls: det.bbox.class_id,
            x: det.bbox.x_min,
            y: det.bbox.y_min,
            w: det.bbox.width,
            h: det.bbox.height,
            score: det.score,
        };
        serde_json::to_writer(&mut writer, &row)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Brute-force reference matcher used by the verification suites.
///
/// Enumerates every injective detection-to-ground-truth assignment whose
/// matched pairs clear the IoU threshold and picks the assignment that is
/// lexicographically best in detection order (higher IoU first, lower
/// ground-truth index on ties). Exponential; only for small instances.
pub mod oracle {
    use std::cmp::Ordering;

    /// TP count of the best assignment. `iou_matrix[d][g]` holds the IoU of
    /// detection `d` (in descending-score order) with ground truth `g`.
    pub fn exhaustive_match_tp_count(iou_matrix: &[Vec<f64>], iou_threshold: f64) -> usize {
        let n_det = iou_matrix.len();
        let n_gt = iou_matrix.first().map_or(0, Vec::len);

        let mut assignments: Vec<Vec<Option<usize>>> = vec![Vec::new()];
        for d in 0..n_det {
            let mut extended = Vec::new();
            for partial in &assignments {
                let mut skip = partial.clone();
                skip.push(None);
                extended.push(skip);
                for g in 0..n_gt {
                    if iou_matrix[d][g] >= iou_threshold && !partial.contains(&Some(g)) {
                        let mut hit = partial.clone();
                        hit.push(Some(g));
                        extended.push(hit);
                    }
                }
            }
            assignments = extended;
        }

        let compare = |a: &Vec<Option<usize>>, b: &Vec<Option<usize>>| -> Ordering {
            for d in 0..n_det {
                let ord = match (a[d], b[d]) {
                    (None, None) => Ordering::Equal,
                    (Some(_), None) => Ordering::Greater,
                    (None, Some(_)) => Ordering::Less,
                    (Some(ga), Some(gb)) => iou_matrix[d][ga]
                        .partial_cmp(&iou_matrix[d][gb])
                        .expect("finite IoU")
                        .then(gb.cmp(&ga)),
                };
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            Ordering::Equal
        };

        let best = assignments
            .into_iter()
            .max_by(compare)
            .expect("at least the all-unmatched assignment");
        best.iter().flatten().count()
    }
}
