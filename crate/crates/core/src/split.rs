//! Altitude-ordered dataset partitions for domain-transfer experiments.

use serde::{Deserialize, Serialize};

use crate::camera::AltitudeM;
use crate::error::{Error, Result};
use crate::manifest::DatasetManifest;
use crate::scalar::Scalar;

/// Which altitude band forms the training side of the split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitKind {
    Below25,
    Below50,
    Above50,
    Above75,
}

impl SplitKind {
    pub const ALL: [SplitKind; 4] = [
        SplitKind::Below25,
        SplitKind::Below50,
        SplitKind::Above50,
        SplitKind::Above75,
    ];
}

impl std::fmt::Display for SplitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SplitKind::Below25 => "below25",
            SplitKind::Below50 => "below50",
            SplitKind::Above50 => "above50",
            SplitKind::Above75 => "above75",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for SplitKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "below25" => Ok(SplitKind::Below25),
            "below50" => Ok(SplitKind::Below50),
            "above50" => Ok(SplitKind::Above50),
            "above75" => Ok(SplitKind::Above75),
            other => Err(format!(
                "unknown split kind '{other}' (expected below25, below50, above50, above75)"
            )),
        }
    }
}

/// A disjoint train/holdout partition of a manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult<T = f64> {
    pub train: DatasetManifest<T>,
    pub holdout: DatasetManifest<T>,
    /// Altitude of the train record adjacent to the holdout boundary.
    pub threshold_altitude_m: AltitudeM<T>,
}

/// Partitions the manifest by altitude order.
///
/// Records are sorted ascending by `(altitude, image_id)`; the BELOW kinds
/// take the first `floor(q * n)` records as the training set, the ABOVE
/// kinds the last `floor(q * n)` (at least one record either way), and the
/// holdout is the complement. Both output manifests are in sorted order, so
/// the result is invariant under permutations of the input.
pub fn build_split<T: Scalar>(
    manifest: &DatasetManifest<T>,
    kind: SplitKind,
) -> Result<SplitResult<T>> {
    if manifest.records.is_empty() {
        return Err(Error::EmptyManifest);
    }
    for record in &manifest.records {
        if record.altitude_m.is_none() {
            return Err(Error::MissingAltitude(record.image_id.clone()));
        }
    }

    let mut order: Vec<usize> = (0..manifest.records.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = &manifest.records[a];
        let rb = &manifest.records[b];
        let alt_a = ra.altitude_m.unwrap().meters();
        let alt_b = rb.altitude_m.unwrap().meters();
        alt_a
            .partial_cmp(&alt_b)
            .expect("finite altitudes")
            .then_with(|| ra.image_id.cmp(&rb.image_id))
    });

    let n = order.len();
    let take = match kind {
        SplitKind::Below25 | SplitKind::Above75 => (n / 4).max(1),
        SplitKind::Below50 | SplitKind::Above50 => (n / 2).max(1),
    };
    let (train_idx, holdout_idx, boundary) = match kind {
        SplitKind::Below25 | SplitKind::Below50 => {
            (&order[..take], &order[take..], order[take - 1])
        }
        SplitKind::Above50 | SplitKind::Above75 => {
            (&order[n - take..], &order[..n - take], order[n - take])
        }
    };

    let pick = |indices: &[usize]| DatasetManifest {
        records: indices
            .iter()
            .map(|&i| manifest.records[i].clone())
            .collect(),
        class_names: manifest.class_names.clone(),
    };

    Ok(SplitResult {
        train: pick(train_idx),
        holdout: pick(holdout_idx),
        threshold_altitude_m: manifest.records[boundary].altitude_m.unwrap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::{ImageRecord, View};

    fn manifest_with_altitudes(altitudes: &[f64]) -> DatasetManifest {
        DatasetManifest {
            records: altitudes
                .iter()
                .enumerate()
                .map(|(i, &a)| ImageRecord {
                    image_id: format!("img_{i:03}"),
                    file_path: format!("img_{i:03}.pgm"),
                    width_px: 100,
                    height_px: 75,
                    altitude_m: Some(AltitudeM::new(a).unwrap()),
                    view: View::Bev,
                    boxes: vec![],
                })
                .collect(),
            class_names: Default::default(),
        }
    }

    fn altitudes(m: &DatasetManifest) -> Vec<f64> {
        m.records
            .iter()
            .map(|r| r.altitude_m.unwrap().meters())
            .collect()
    }

    #[test]
    fn below25_takes_the_lowest_quarter() {
        let manifest = manifest_with_altitudes(&[10., 20., 30., 40., 50., 60., 70., 80.]);
        let split = build_split(&manifest, SplitKind::Below25).unwrap();
        assert_eq!(altitudes(&split.train), vec![10., 20.]);
        assert_eq!(split.holdout.records.len(), 6);
        assert_eq!(split.threshold_altitude_m.meters(), 20.0);
    }

    #[test]
    fn above50_takes_the_highest_half() {
        let manifest = manifest_with_altitudes(&[10., 20., 30., 40., 50., 60., 70., 80.]);
        let split = build_split(&manifest, SplitKind::Above50).unwrap();
        assert_eq!(altitudes(&split.train), vec![50., 60., 70., 80.]);
        assert_eq!(altitudes(&split.holdout), vec![10., 20., 30., 40.]);
        assert_eq!(split.threshold_altitude_m.meters(), 50.0);
    }

    #[test]
    fn tiny_manifest_keeps_at_least_one_train_record() {
        let manifest = manifest_with_altitudes(&[5., 4., 3., 2., 1.]);
        let split = build_split(&manifest, SplitKind::Below25).unwrap();
        assert_eq!(altitudes(&split.train), vec![1.0]);
        assert_eq!(split.holdout.records.len(), 4);
    }

    #[test]
    fn partition_property_for_all_kinds() {
        for n in 1..=9usize {
            let alts: Vec<f64> = (0..n).map(|i| 10.0 + i as f64).collect();
            let manifest = manifest_with_altitudes(&alts);
            for kind in SplitKind::ALL {
                let split = build_split(&manifest, kind).unwrap();
                let mut ids: Vec<&str> = split
                    .train
                    .records
                    .iter()
                    .chain(&split.holdout.records)
                    .map(|r| r.image_id.as_str())
                    .collect();
                ids.sort_unstable();
                ids.dedup();
                assert_eq!(ids.len(), n, "kind {kind}, n {n}");
            }
        }
    }

    #[test]
    fn membership_is_permutation_invariant() {
        let manifest = manifest_with_altitudes(&[30., 10., 70., 50., 20., 60., 40., 80.]);
        let mut shuffled = manifest.clone();
        shuffled.records.reverse();
        for kind in SplitKind::ALL {
            let a = build_split(&manifest, kind).unwrap();
            let b = build_split(&shuffled, kind).unwrap();
            assert_eq!(a.train, b.train, "kind {kind}");
            assert_eq!(a.holdout, b.holdout, "kind {kind}");
        }
    }

    #[test]
    fn ties_break_by_image_id() {
        let manifest = manifest_with_altitudes(&[50., 50., 50., 50.]);
        let split = build_split(&manifest, SplitKind::Below25).unwrap();
        assert_eq!(split.train.records[0].image_id, "img_000");
    }

    #[test]
    fn below50_contains_below25() {
        let manifest = manifest_with_altitudes(&[10., 20., 30., 40., 50., 60., 70., 80.]);
        let q = build_split(&manifest, SplitKind::Below25).unwrap();
        let h = build_split(&manifest, SplitKind::Below50).unwrap();
        for record in &q.train.records {
            assert!(h.train.records.contains(record));
        }
        let q = build_split(&manifest, SplitKind::Above75).unwrap();
        let h = build_split(&manifest, SplitKind::Above50).unwrap();
        for record in &q.train.records {
            assert!(h.train.records.contains(record));
        }
    }

    #[test]
    fn errors_on_empty_and_missing_altitude() {
        assert!(matches!(
            build_split(&DatasetManifest::<f64>::default(), SplitKind::Below25),
            Err(Error::EmptyManifest)
        ));

        let mut manifest = manifest_with_altitudes(&[10., 20.]);
        manifest.records[1].altitude_m = None;
        assert!(matches!(
            build_split(&manifest, SplitKind::Below25),
            Err(Error::MissingAltitude(id)) if id == "img_001"
        ));
    }
}
