//! Supports of dimensions of variation, their sizes, alignment, and the
//! four-way diversity/alignment classification of a target/co-training pair.

mod profile;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{is_covered, union_measure, Aabb, Box2, Box3};

pub use profile::{profile_dataset, DatasetProfile, Dv, ProfileConfig, DEFAULT_ANGULAR_CELL_DEG, DEFAULT_SPATIAL_CELL};

/// Default diversity ratio threshold.
pub const DEFAULT_RHO: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DvError {
    #[error("support kinds differ: {0} vs {1}")]
    KindMismatch(&'static str, &'static str),
    #[error("diversity ratio must be greater than 1, got {0}")]
    InvalidRho(String),
    #[error("cannot profile an empty dataset")]
    EmptyDataset,
    #[error("profiles were built with different cell sizes")]
    CellMismatch,
}

/// Measured support of one dimension of variation.
///
/// Angular boxes hold `[theta, phi]` windows in degrees; their size is the
/// product of the angular spans (deg^2), not a solid angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "elements", rename_all = "lowercase")]
pub enum DvSupport {
    #[serde(rename = "interval2d")]
    Planar(Vec<Box2>),
    #[serde(rename = "interval3d")]
    Volumetric(Vec<Box3>),
    Angular(Vec<Box2>),
    Discrete(BTreeSet<String>),
}

impl DvSupport {
    pub fn kind(&self) -> &'static str {
        match self {
            DvSupport::Planar(_) => "interval2d",
            DvSupport::Volumetric(_) => "interval3d",
            DvSupport::Angular(_) => "angular",
            DvSupport::Discrete(_) => "discrete",
        }
    }

    pub fn empty_like(&self) -> DvSupport {
        match self {
            DvSupport::Planar(_) => DvSupport::Planar(Vec::new()),
            DvSupport::Volumetric(_) => DvSupport::Volumetric(Vec::new()),
            DvSupport::Angular(_) => DvSupport::Angular(Vec::new()),
            DvSupport::Discrete(_) => DvSupport::Discrete(BTreeSet::new()),
        }
    }

    pub fn discrete<I, S>(labels: I) -> DvSupport
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        DvSupport::Discrete(labels.into_iter().map(Into::into).collect())
    }

    /// Number of stored elements (boxes or labels).
    pub fn element_count(&self) -> usize {
        match self {
            DvSupport::Planar(b) | DvSupport::Angular(b) => b.len(),
            DvSupport::Volumetric(b) => b.len(),
            DvSupport::Discrete(s) => s.len(),
        }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            DvSupport::Planar(b) | DvSupport::Angular(b) => b.iter().all(Aabb::is_valid),
            DvSupport::Volumetric(b) => b.iter().all(Aabb::is_valid),
            DvSupport::Discrete(_) => true,
        }
    }

    /// Union with another support of the same kind.
    pub fn union(&self, other: &DvSupport) -> Result<DvSupport, DvError> {
        let mut out = self.clone();
        out.extend(other)?;
        Ok(out)
    }

    pub fn extend(&mut self, other: &DvSupport) -> Result<(), DvError> {
        match (self, other) {
            (DvSupport::Planar(a), DvSupport::Planar(b)) | (DvSupport::Angular(a), DvSupport::Angular(b)) => {
                a.extend_from_slice(b)
            }
            (DvSupport::Volumetric(a), DvSupport::Volumetric(b)) => a.extend_from_slice(b),
            (DvSupport::Discrete(a), DvSupport::Discrete(b)) => a.extend(b.iter().cloned()),
            (a, b) => return Err(DvError::KindMismatch(a.kind(), b.kind())),
        }
        Ok(())
    }
}

/// Angular window of spans `d_theta` x `d_phi` degrees centered on
/// `(theta, phi)`. Windows crossing the +-180 deg azimuth seam are split in
/// two so every stored box lies in [-180, 180].
pub fn angular_window(theta: f64, phi: f64, d_theta: f64, d_phi: f64) -> Vec<Box2> {
    let t0 = (theta - d_theta / 2.0).max(0.0);
    let t1 = (theta + d_theta / 2.0).min(180.0);
    let (p0, p1) = (phi - d_phi / 2.0, phi + d_phi / 2.0);
    if d_phi >= 360.0 {
        return vec![Box2::new([t0, -180.0], [t1, 180.0])];
    }
    if p0 < -180.0 {
        vec![
            Box2::new([t0, -180.0], [t1, p1]),
            Box2::new([t0, p0 + 360.0], [t1, 180.0]),
        ]
    } else if p1 > 180.0 {
        vec![
            Box2::new([t0, p0], [t1, 180.0]),
            Box2::new([t0, -180.0], [t1, p1 - 360.0]),
        ]
    } else {
        vec![Box2::new([t0, p0], [t1, p1])]
    }
}

/// Union measure for box kinds, cardinality for discrete supports.
pub fn support_size(s: &DvSupport) -> f64 {
    match s {
        DvSupport::Planar(b) | DvSupport::Angular(b) => union_measure(b),
        DvSupport::Volumetric(b) => union_measure(b),
        DvSupport::Discrete(set) => set.len() as f64,
    }
}

/// True iff the target support is contained in the co-training support.
pub fn is_aligned(target: &DvSupport, cotrain: &DvSupport) -> Result<bool, DvError> {
    Ok(match (target, cotrain) {
        (DvSupport::Planar(t), DvSupport::Planar(c)) | (DvSupport::Angular(t), DvSupport::Angular(c)) => {
            t.iter().all(|b| is_covered(b, c))
        }
        (DvSupport::Volumetric(t), DvSupport::Volumetric(c)) => t.iter().all(|b| is_covered(b, c)),
        (DvSupport::Discrete(t), DvSupport::Discrete(c)) => t.is_subset(c),
        (a, b) => return Err(DvError::KindMismatch(a.kind(), b.kind())),
    })
}

/// The four target/co-training relationships, numbered 1 to 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    NotDiverseMisaligned,
    DiverseMisaligned,
    DiverseAligned,
    NotDiverseAligned,
}

impl CaseLabel {
    pub fn from_flags(diverse: bool, aligned: bool) -> CaseLabel {
        match (diverse, aligned) {
            (false, false) => CaseLabel::NotDiverseMisaligned,
            (true, false) => CaseLabel::DiverseMisaligned,
            (true, true) => CaseLabel::DiverseAligned,
            (false, true) => CaseLabel::NotDiverseAligned,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            CaseLabel::NotDiverseMisaligned => 1,
            CaseLabel::DiverseMisaligned => 2,
            CaseLabel::DiverseAligned => 3,
            CaseLabel::NotDiverseAligned => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::NotDiverseMisaligned => "not_diverse_misaligned",
            CaseLabel::DiverseMisaligned => "diverse_misaligned",
            CaseLabel::DiverseAligned => "diverse_aligned",
            CaseLabel::NotDiverseAligned => "not_diverse_aligned",
        }
    }

    pub fn is_diverse(self) -> bool {
        matches!(self, CaseLabel::DiverseMisaligned | CaseLabel::DiverseAligned)
    }

    pub fn is_aligned(self) -> bool {
        matches!(self, CaseLabel::DiverseAligned | CaseLabel::NotDiverseAligned)
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sizes and verdict behind a [`CaseLabel`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub label: CaseLabel,
    pub target_size: f64,
    pub cotrain_size: f64,
    pub rho: f64,
    pub diverse: bool,
    pub aligned: bool,
}

/// Diverse iff `|S_C| >= rho * |S_T|`. A zero-size target against a
/// non-empty co-training support counts as diverse; two empty supports do not.
pub fn classify(target: &DvSupport, cotrain: &DvSupport, rho: f64) -> Result<Classification, DvError> {
    if rho.is_nan() || rho <= 1.0 || rho.is_infinite() {
        return Err(DvError::InvalidRho(rho.to_string()));
    }
    let aligned = is_aligned(target, cotrain)?;
    let target_size = support_size(target);
    let cotrain_size = support_size(cotrain);
    let diverse = if target_size == 0.0 {
        cotrain_size > 0.0
    } else {
        cotrain_size >= rho * target_size
    };
    Ok(Classification {
        label: CaseLabel::from_flags(diverse, aligned),
        target_size,
        cotrain_size,
        rho,
        diverse,
        aligned,
    })
}

pub fn classify_case(target: &DvSupport, cotrain: &DvSupport, rho: f64) -> Result<CaseLabel, DvError> {
    classify(target, cotrain, rho).map(|c| c.label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sq(x0: f64, y0: f64, x1: f64, y1: f64) -> Box2 {
        Box2::new([x0, y0], [x1, y1])
    }

    fn planar(b: &[Box2]) -> DvSupport {
        DvSupport::Planar(b.to_vec())
    }

    #[test]
    fn sizes() {
        let one = planar(&[sq(-0.1, -0.1, 0.1, 0.1)]);
        assert!((support_size(&one) - 0.04).abs() < 1e-12);
        let twice = planar(&[sq(-0.1, -0.1, 0.1, 0.1), sq(-0.1, -0.1, 0.1, 0.1)]);
        assert_eq!(support_size(&twice), support_size(&one));
        let bins = DvSupport::discrete(["shoulder-left", "shoulder-right", "agent-left", "agent-right", "agent-front"]);
        assert_eq!(support_size(&bins), 5.0);
        assert_eq!(support_size(&DvSupport::discrete(["a", "a"])), 1.0);
    }

    #[test]
    fn alignment() {
        let t = planar(&[sq(0.0, 0.0, 0.1, 0.1)]);
        assert!(is_aligned(&t, &planar(&[sq(-0.2, -0.2, 0.2, 0.2)])).unwrap());
        assert!(!is_aligned(&t, &planar(&[sq(0.2, 0.2, 0.3, 0.3)])).unwrap());
        let halves = planar(&[sq(0.0, 0.0, 0.05, 0.1), sq(0.05, 0.0, 0.1, 0.1)]);
        assert!(is_aligned(&t, &halves).unwrap());
        assert!(is_aligned(&planar(&[]), &planar(&[])).unwrap());
        assert_eq!(
            is_aligned(&t, &DvSupport::discrete(["x"])),
            Err(DvError::KindMismatch("interval2d", "discrete"))
        );
    }

    #[test]
    fn abutting_cover_agrees_with_grid_oracle() {
        let target = sq(0.0, 0.0, 0.1, 0.1);
        let cover = [sq(-0.05, -0.05, 0.04, 0.2), sq(0.04, -0.01, 0.12, 0.11)];
        let step = 0.1 / 200.0;
        let mut all_in = true;
        for i in 0..=200 {
            for j in 0..=200 {
                let p = [i as f64 * step, j as f64 * step];
                all_in &= cover.iter().any(|b| b.contains_point(&p));
            }
        }
        assert!(all_in);
        assert!(is_aligned(&planar(&[target]), &planar(&cover)).unwrap());
    }

    #[test]
    fn four_cases() {
        let small = planar(&[sq(0.0, 0.0, 0.1, 0.1)]);
        let big = planar(&[sq(-0.2, -0.2, 0.3, 0.3)]);
        let medium = planar(&[sq(-0.05, -0.05, 0.15, 0.15)]);
        assert_eq!(classify_case(&small, &big, DEFAULT_RHO).unwrap(), CaseLabel::DiverseAligned);
        assert_eq!(classify_case(&small, &medium, DEFAULT_RHO).unwrap(), CaseLabel::NotDiverseAligned);
        let elsewhere = planar(&[sq(1.0, 1.0, 1.1, 1.1)]);
        assert_eq!(classify_case(&small, &elsewhere, DEFAULT_RHO).unwrap(), CaseLabel::NotDiverseMisaligned);
        let big_elsewhere = planar(&[sq(1.0, 1.0, 1.5, 1.5)]);
        assert_eq!(classify_case(&small, &big_elsewhere, DEFAULT_RHO).unwrap(), CaseLabel::DiverseMisaligned);
        assert_eq!(
            [1, 2, 3, 4].map(|n| [
                CaseLabel::NotDiverseMisaligned,
                CaseLabel::DiverseMisaligned,
                CaseLabel::DiverseAligned,
                CaseLabel::NotDiverseAligned
            ][n - 1]
                .number()),
            [1, 2, 3, 4]
        );
    }

    #[test]
    fn zero_target() {
        let point = planar(&[sq(0.0, 0.0, 0.0, 0.0)]);
        let big = planar(&[sq(-1.0, -1.0, 1.0, 1.0)]);
        let c = classify(&point, &big, 5.0).unwrap();
        assert_eq!(c.label, CaseLabel::DiverseAligned);
        let empty = DvSupport::discrete(Vec::<String>::new());
        assert_eq!(classify_case(&empty, &empty, 5.0).unwrap(), CaseLabel::NotDiverseAligned);
        assert!(matches!(classify(&point, &big, 1.0), Err(DvError::InvalidRho(_))));
    }

    #[test]
    fn angular_seam_split() {
        let w = angular_window(45.0, 175.0, 2.0, 30.0);
        assert_eq!(w.len(), 2);
        let s = DvSupport::Angular(w);
        assert!((support_size(&s) - 60.0).abs() < 1e-9);
        assert!(s.is_valid());
    }

    #[test]
    fn serde_shape() {
        let s = DvSupport::discrete(["b", "a"]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"kind":"discrete","elements":["a","b"]}"#);
        let p = planar(&[sq(0.0, 0.0, 1.0, 1.0)]);
        let back: DvSupport = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    fn label_set() -> impl Strategy<Value = BTreeSet<String>> {
        prop::collection::btree_set(prop::sample::select(vec!["a", "b", "c", "d", "e", "f"]).prop_map(String::from), 0..6)
    }

    fn grid_boxes() -> impl Strategy<Value = Vec<Box2>> {
        prop::collection::vec((0i32..6, 0i32..6, 1i32..4, 1i32..4), 0..5).prop_map(|v| {
            v.into_iter()
                .map(|(x, y, w, h)| sq(x as f64 / 10.0, y as f64 / 10.0, (x + w) as f64 / 10.0, (y + h) as f64 / 10.0))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn discrete_matches_brute_force(t in label_set(), c in label_set(), rho in 1.5f64..8.0) {
            let aligned = t.iter().all(|x| c.contains(x));
            let diverse = if t.is_empty() { !c.is_empty() } else { c.len() as f64 >= rho * t.len() as f64 };
            let got = classify_case(&DvSupport::Discrete(t), &DvSupport::Discrete(c), rho).unwrap();
            prop_assert_eq!(got, CaseLabel::from_flags(diverse, aligned));
        }

        #[test]
        fn box_order_invariance(t in grid_boxes(), c in grid_boxes()) {
            let a = classify_case(&planar(&t), &planar(&c), DEFAULT_RHO).unwrap();
            let (mut tr, mut cr) = (t.clone(), c.clone());
            tr.reverse();
            cr.rotate_left(c.len().min(1));
            prop_assert_eq!(a, classify_case(&planar(&tr), &planar(&cr), DEFAULT_RHO).unwrap());
        }

        #[test]
        fn self_alignment(b in grid_boxes()) {
            prop_assert!(is_aligned(&planar(&b), &planar(&b)).unwrap());
        }

        #[test]
        fn union_never_shrinks(a in grid_boxes(), b in grid_boxes()) {
            let u = planar(&a).union(&planar(&b)).unwrap();
            prop_assert!(support_size(&u) + 1e-12 >= support_size(&planar(&a)));
            prop_assert!(is_aligned(&planar(&a), &u).unwrap());
        }
    }
}
