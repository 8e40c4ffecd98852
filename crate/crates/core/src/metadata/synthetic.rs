//! Seeded synthetic annotated corpora for tests, benchmarks, and load checks.

use std::collections::BTreeSet;

use rand::Rng;

use super::camera::{from_spherical, BinTable};
use super::record::{Annotations, CameraExtrinsics, DemoRecord, Step};
use crate::retrieval::{CamPoseFilter, ObjSpatFilter, ObjectFilter, RetrievalQuery};
use crate::rng::{self, uniform};

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub objects: Vec<String>,
    pub colors: Vec<String>,
    pub labs: usize,
    pub motions: Vec<Vec<String>>,
    /// Camera radius range about the table center (m).
    pub camera_radius: (f64, f64),
    /// Object positions are uniform in `[lo, hi]` per axis.
    pub object_lo: [f64; 3],
    pub object_hi: [f64; 3],
    pub steps: usize,
}

impl Default for SyntheticCorpus {
    fn default() -> Self {
        let words = |w: &[&str]| w.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        SyntheticCorpus {
            objects: words(&["mug", "carrot", "marker", "bowl", "cup", "sponge", "spoon", "banana", "lid", "towel"]),
            colors: words(&["red", "blue", "green", "yellow", "white", "black"]),
            labs: 8,
            motions: vec![
                words(&["pick", "place"]),
                words(&["pick", "placeBin"]),
                words(&["open"]),
                words(&["close"]),
                words(&["push"]),
                words(&["pick", "place", "close"]),
            ],
            camera_radius: (0.6, 1.2),
            object_lo: [-0.4, -0.4, 0.0],
            object_hi: [0.4, 0.4, 0.2],
            steps: 3,
        }
    }
}

const PLANTED_OBJECT: &str = "planted-widget";

impl SyntheticCorpus {
    /// Record `i` of the corpus for `seed`. Each record draws from its own
    /// RNG stream, so records can be produced in any order.
    pub fn record(&self, seed: u64, i: u64) -> DemoRecord {
        let mut r = rng::stream(seed, i);
        let object = self.objects[r.random_range(0..self.objects.len())].clone();
        let color = self.colors[r.random_range(0..self.colors.len())].clone();
        let motion = self.motions[r.random_range(0..self.motions.len())].clone();
        let lab = format!("lab{}", 1 + r.random_range(0..self.labs.max(1)));
        let radius = uniform(&mut r, self.camera_radius.0, self.camera_radius.1);
        let theta = uniform(&mut r, 20.0, 80.0);
        let phi = uniform(&mut r, -180.0, 180.0);
        let cam = from_spherical(radius, theta, phi, [0.0; 3]);
        let obj: [f64; 3] = std::array::from_fn(|k| uniform(&mut r, self.object_lo[k], self.object_hi[k]));
        let n = self.steps.max(2);
        let steps = (0..n)
            .map(|t| Step {
                t: t as i64,
                ee_pos: [obj[0], obj[1], obj[2] + 0.1 * (n - 1 - t) as f64],
                ee_quat: [1.0, 0.0, 0.0, 0.0],
                gripper: if t + 1 == n { 1.0 } else { 0.0 },
            })
            .collect();
        let bin = BinTable::default()
            .bin_camera_pose(cam, [0.0; 3])
            .expect("camera is off-center");
        DemoRecord {
            id: format!("syn-{seed}-{i:07}"),
            lab,
            instructions: vec![format!("pick up the {object} and put it away")],
            camera_extrinsics: CameraExtrinsics {
                pos: cam,
                quat: [1.0, 0.0, 0.0, 0.0],
            },
            steps,
            annotations: Some(Annotations {
                target_object: Some(object),
                object_position: Some(obj),
                object_color: Some(color),
                camera_bin: Some(bin),
                primitives: Some(motion),
                ..Default::default()
            }),
        }
    }

    pub fn records(&self, n: u64, seed: u64) -> impl Iterator<Item = DemoRecord> + '_ {
        (0..n).map(move |i| self.record(seed, i))
    }

    pub fn generate(&self, n: usize, seed: u64) -> Vec<DemoRecord> {
        self.records(n as u64, seed).collect()
    }

    /// A corpus of `n` records and a four-filter query matched by exactly
    /// `k` of them. The planted object occurs in `3k` records; `k` of those
    /// have a distant camera, `k/2` a distant object and `k - k/2` the wrong
    /// color, so stage counts run `3k, 2k, 2k - k/2, k`.
    pub fn generate_planted(&self, n: usize, k: usize, seed: u64) -> (Vec<DemoRecord>, RetrievalQuery) {
        assert!(3 * k <= n, "corpus too small for the planted set");
        let cam = [0.3, 0.5, 0.7];
        let center = [0.1, 0.1, 0.1];
        let color = self.colors[0].clone();
        let other_color = self.colors[1].clone();
        let mut records = self.generate(n, seed);
        // spread the planted records through the corpus
        let stride = n / (3 * k);
        for j in 0..3 * k {
            let rec = &mut records[j * stride];
            let ann = rec.annotations.as_mut().unwrap();
            ann.target_object = Some(PLANTED_OBJECT.into());
            rec.camera_extrinsics.pos = [cam[0] + 0.05, cam[1] - 0.05, cam[2]];
            ann.object_position = Some([center[0] + 0.1, center[1], center[2] - 0.05]);
            ann.object_color = Some(color.clone());
            if j >= k && j < 2 * k {
                rec.camera_extrinsics.pos = [cam[0] + 1.0, cam[1], cam[2]];
            } else if j >= 2 * k && j < 2 * k + k / 2 {
                ann.object_position = Some([center[0] + 1.0, center[1], center[2]]);
            } else if j >= 2 * k {
                ann.object_color = Some(other_color.clone());
            }
        }
        let query = RetrievalQuery {
            object: Some(ObjectFilter::Include(PLANTED_OBJECT.into())),
            campose: Some(CamPoseFilter::new(cam)),
            objspat: Some(ObjSpatFilter::new(center)),
            color: Some(color),
            motion: None,
        };
        (records, query)
    }
}

/// Random query anchored on a random record, mixing default and custom
/// tolerances, include/exclude object filters, and any subset of filters.
pub fn random_query(r: &mut impl Rng, records: &[DemoRecord]) -> RetrievalQuery {
    loop {
        let anchor = &records[r.random_range(0..records.len())];
        let ann = anchor.annotations.clone().unwrap_or_default();
        let mut q = RetrievalQuery::default();
        if r.random_bool(0.5) {
            if let Some(o) = ann.target_object.clone() {
                q.object = Some(if r.random_bool(0.7) {
                    ObjectFilter::Include(o)
                } else {
                    ObjectFilter::Exclude(o)
                });
            }
        }
        if r.random_bool(0.5) {
            let mut c = CamPoseFilter::new(anchor.camera_extrinsics.pos);
            if r.random_bool(0.5) {
                c.tol = std::array::from_fn(|_| uniform(r, 0.05, 0.6));
            }
            q.campose = Some(c);
        }
        if r.random_bool(0.5) {
            if let Some(p) = ann.object_position {
                let mut s = ObjSpatFilter::new(p);
                if r.random_bool(0.5) {
                    s.extent = std::array::from_fn(|_| uniform(r, 0.05, 1.0));
                }
                q.objspat = Some(s);
            }
        }
        if r.random_bool(0.4) {
            q.color = ann.object_color.clone();
        }
        if r.random_bool(0.3) {
            if let Some(m) = &ann.primitives {
                let pick: BTreeSet<String> = m.iter().filter(|_| r.random_bool(0.6)).cloned().collect();
                if !pick.is_empty() {
                    q.motion = Some(pick);
                }
            }
        }
        if q.filter_count() > 0 {
            return q;
        }
    }
}
