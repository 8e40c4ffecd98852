use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use super::{angular_window, support_size, DvError, DvSupport};
use crate::geometry::Box2;
use crate::metadata::camera::{to_spherical, BinTable, UNBINNED};
use crate::metadata::DemoRecord;

/// Side of the square cell placed around each observed position (m).
pub const DEFAULT_SPATIAL_CELL: f64 = 0.02;
/// Side of the angular window placed around each observed camera direction (deg).
pub const DEFAULT_ANGULAR_CELL_DEG: f64 = 2.0;

/// Dimensions of variation tracked in a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dv {
    #[serde(rename = "camPose")]
    CamPose,
    #[serde(rename = "objTex")]
    ObjTex,
    #[serde(rename = "tableTex")]
    TableTex,
    #[serde(rename = "objSpat")]
    ObjSpat,
    #[serde(rename = "recepSpat")]
    RecepSpat,
    #[serde(rename = "motion")]
    Motion,
    #[serde(rename = "scene")]
    Scene,
}

impl Dv {
    pub const ALL: [Dv; 7] = [Dv::CamPose, Dv::ObjTex, Dv::TableTex, Dv::ObjSpat, Dv::RecepSpat, Dv::Motion, Dv::Scene];

    pub fn name(self) -> &'static str {
        match self {
            Dv::CamPose => "camPose",
            Dv::ObjTex => "objTex",
            Dv::TableTex => "tableTex",
            Dv::ObjSpat => "objSpat",
            Dv::RecepSpat => "recepSpat",
            Dv::Motion => "motion",
            Dv::Scene => "scene",
        }
    }

    pub fn from_name(name: &str) -> Option<Dv> {
        Dv::ALL.into_iter().find(|d| d.name() == name)
    }

    fn empty_support(self) -> DvSupport {
        match self {
            Dv::ObjSpat | Dv::RecepSpat => DvSupport::Planar(Vec::new()),
            _ => DvSupport::Discrete(BTreeSet::new()),
        }
    }
}

impl fmt::Display for Dv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub spatial_cell: f64,
    pub angular_cell_deg: f64,
    pub table_center: [f64; 3],
    /// Used for records whose camera bin is not annotated.
    pub bins: BinTable,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            spatial_cell: DEFAULT_SPATIAL_CELL,
            angular_cell_deg: DEFAULT_ANGULAR_CELL_DEG,
            table_center: [0.0; 3],
            bins: BinTable::default(),
        }
    }
}

/// Per-DV supports measured over a dataset.
///
/// `camPose` is the set of occupied camera bins; `campose_angles` keeps the
/// continuous `(theta, phi)` windows of the same cameras.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetProfile {
    pub demo_count: u64,
    pub spatial_cell: f64,
    pub angular_cell_deg: f64,
    pub supports: BTreeMap<Dv, DvSupport>,
    pub campose_angles: DvSupport,
}

impl DatasetProfile {
    fn empty(config: &ProfileConfig) -> Self {
        DatasetProfile {
            demo_count: 0,
            spatial_cell: config.spatial_cell,
            angular_cell_deg: config.angular_cell_deg,
            supports: Dv::ALL.into_iter().map(|d| (d, d.empty_support())).collect(),
            campose_angles: DvSupport::Angular(Vec::new()),
        }
    }

    pub fn support(&self, dv: Dv) -> &DvSupport {
        &self.supports[&dv]
    }

    /// Per-DV union. Both profiles must have been built with the same cells.
    pub fn merge(&self, other: &DatasetProfile) -> Result<DatasetProfile, DvError> {
        if self.spatial_cell != other.spatial_cell || self.angular_cell_deg != other.angular_cell_deg {
            return Err(DvError::CellMismatch);
        }
        let mut out = self.clone();
        out.demo_count += other.demo_count;
        for (dv, s) in &other.supports {
            match out.supports.get_mut(dv) {
                Some(mine) => mine.extend(s)?,
                None => {
                    out.supports.insert(*dv, s.clone());
                }
            }
        }
        out.campose_angles.extend(&other.campose_angles)?;
        out.normalize();
        Ok(out)
    }

    fn normalize(&mut self) {
        for s in self.supports.values_mut().chain(std::iter::once(&mut self.campose_angles)) {
            if let DvSupport::Planar(b) | DvSupport::Angular(b) = s {
                dedup_boxes(b);
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Human-readable summary, one line per DV.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "demo_count {}", self.demo_count);
        let _ = writeln!(out, "spatial_cell_m {}", self.spatial_cell);
        let _ = writeln!(out, "angular_cell_deg {}", self.angular_cell_deg);
        let rows = self
            .supports
            .iter()
            .map(|(dv, s)| (dv.name(), s))
            .chain(std::iter::once(("camPose.angles", &self.campose_angles)));
        for (name, s) in rows {
            let _ = write!(out, "{name:<15} {:<10} size {:<12.6} elements {}", s.kind(), support_size(s), s.element_count());
            if let DvSupport::Discrete(labels) = s {
                let joined: Vec<&str> = labels.iter().map(String::as_str).collect();
                let _ = write!(out, " [{}]", joined.join(", "));
            }
            out.push('\n');
        }
        out
    }
}

fn dedup_boxes(b: &mut Vec<Box2>) {
    b.sort_by(|x, y| {
        x.min
            .iter()
            .chain(&x.max)
            .zip(y.min.iter().chain(&y.max))
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    b.dedup();
}

/// Measure every DV over annotated records. Positions become squares of side
/// `spatial_cell` in the x-y plane; camera directions become angular windows.
pub fn profile_dataset(records: &[DemoRecord], config: &ProfileConfig) -> Result<DatasetProfile, DvError> {
    if records.is_empty() {
        return Err(DvError::EmptyDataset);
    }
    let mut p = DatasetProfile::empty(config);
    p.demo_count = records.len() as u64;
    let mut labels: BTreeMap<Dv, BTreeSet<String>> = BTreeMap::new();
    let mut cells: BTreeMap<Dv, Vec<Box2>> = BTreeMap::new();
    let mut angles = Vec::new();
    for r in records {
        let ann = r.annotations.clone().unwrap_or_default();
        labels.entry(Dv::Scene).or_default().insert(r.lab.clone());
        let bin = match ann.camera_bin {
            Some(b) => Some(b),
            None => config.bins.bin_camera_pose(r.camera_extrinsics.pos, config.table_center).ok(),
        };
        if let Some(b) = bin.filter(|b| b != UNBINNED) {
            labels.entry(Dv::CamPose).or_default().insert(b);
        }
        if let Ok((_, theta, phi)) = to_spherical(r.camera_extrinsics.pos, config.table_center) {
            angles.extend(angular_window(theta, phi, config.angular_cell_deg, config.angular_cell_deg));
        }
        if let Some(c) = ann.object_color {
            labels.entry(Dv::ObjTex).or_default().insert(c);
        }
        if let Some(c) = ann.table_color {
            labels.entry(Dv::TableTex).or_default().insert(c);
        }
        if let Some(prims) = ann.primitives {
            labels.entry(Dv::Motion).or_default().extend(prims);
        }
        if let Some(pos) = ann.object_position {
            cells.entry(Dv::ObjSpat).or_default().push(Box2::around([pos[0], pos[1]], config.spatial_cell));
        }
        if let Some(pos) = ann.receptacle_position {
            cells.entry(Dv::RecepSpat).or_default().push(Box2::around([pos[0], pos[1]], config.spatial_cell));
        }
    }
    for (dv, set) in labels {
        p.supports.insert(dv, DvSupport::Discrete(set));
    }
    for (dv, boxes) in cells {
        p.supports.insert(dv, DvSupport::Planar(boxes));
    }
    p.campose_angles = DvSupport::Angular(angles);
    p.normalize();
    Ok(p)
}
