//! Task specifications: the `.mlspec` s-expression format, its canonical
//! writer, and seeded sampling of concrete task instances.
//!
//! A spec fixes the goal (an ordered sequence of motion primitives) and the
//! generative range of every varied factor: object and receptacle placement
//! as unions of table-top boxes, camera placement as unions of spherical
//! ranges about the table center, and object/table appearance as HSV ranges.

mod parse;
mod sample;
mod write;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::sexpr::SyntaxError;
pub use parse::parse;
pub(crate) use parse::parse_primitive;
pub use sample::{sample_instance, SampleError};
pub use write::serialize;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("range error in `{field}` at {line}:{col}: {reason}")]
    Range {
        field: String,
        line: usize,
        col: usize,
        reason: String,
    },
}

impl SpecError {
    /// Source position carried by every parse error.
    pub fn position(&self) -> (usize, usize) {
        match self {
            SpecError::Syntax(e) => (e.line, e.col),
            SpecError::Range { line, col, .. } => (*line, *col),
        }
    }
}

/// Motion primitive labels usable in a goal sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Primitive {
    Pick,
    Place,
    Push,
    Pull,
    Open,
    Close,
    PlaceBin,
    PickPlaceTopDrawer,
    PickPlaceBasket,
    Custom(String),
}

impl Primitive {
    pub const BUILTIN: [Primitive; 9] = [
        Primitive::Pick,
        Primitive::Place,
        Primitive::Push,
        Primitive::Pull,
        Primitive::Open,
        Primitive::Close,
        Primitive::PlaceBin,
        Primitive::PickPlaceTopDrawer,
        Primitive::PickPlaceBasket,
    ];

    /// Built-in primitive for a bare symbol.
    pub fn from_symbol(s: &str) -> Option<Primitive> {
        Primitive::BUILTIN.into_iter().find(|p| p.label() == s)
    }

    pub fn label(&self) -> &str {
        match self {
            Primitive::Pick => "pick",
            Primitive::Place => "place",
            Primitive::Push => "push",
            Primitive::Pull => "pull",
            Primitive::Open => "open",
            Primitive::Close => "close",
            Primitive::PlaceBin => "placeBin",
            Primitive::PickPlaceTopDrawer => "pickPlaceTopDrawer",
            Primitive::PickPlaceBasket => "pickPlaceBasket",
            Primitive::Custom(s) => s,
        }
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl From<Primitive> for String {
    fn from(p: Primitive) -> String {
        p.label().to_string()
    }
}

impl TryFrom<String> for Primitive {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        if s.is_empty() {
            return Err("empty primitive label".into());
        }
        Ok(Primitive::from_symbol(&s).unwrap_or(Primitive::Custom(s)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateSequence {
    pub primitives: Vec<Primitive>,
}

/// Table-top box `(x0, y0, x1, y1)` in meters, robot base frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl RegionBox {
    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.x0 <= x && x <= self.x1 && self.y0 <= y && y <= self.y1
    }

    pub fn is_valid(&self) -> bool {
        [self.x0, self.y0, self.x1, self.y1].iter().all(|v| v.is_finite())
            && self.x0 <= self.x1
            && self.y0 <= self.y1
    }
}

/// Union of table-top boxes. Overlaps are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialRegion {
    pub boxes: Vec<RegionBox>,
}

impl SpatialRegion {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.boxes.iter().any(|b| b.contains(x, y))
    }

    /// Sum of box areas, overlaps counted per box.
    pub fn raw_area(&self) -> f64 {
        self.boxes.iter().map(RegionBox::area).sum()
    }

    pub fn to_boxes(&self) -> Vec<crate::geometry::Box2> {
        self.boxes
            .iter()
            .map(|b| crate::geometry::Box2::new([b.x0, b.y0], [b.x1, b.y1]))
            .collect()
    }
}

/// Spherical range about the table center: r in meters, polar and azimuth in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalRange {
    pub r_min: f64,
    pub r_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub phi_min: f64,
    pub phi_max: f64,
}

impl SphericalRange {
    pub fn contains(&self, r: f64, theta: f64, phi: f64) -> bool {
        self.r_min <= r
            && r <= self.r_max
            && self.theta_min <= theta
            && theta <= self.theta_max
            && self.phi_min <= phi
            && phi <= self.phi_max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraPoseRange {
    pub ranges: Vec<SphericalRange>,
}

impl CameraPoseRange {
    pub fn contains(&self, r: f64, theta: f64, phi: f64) -> bool {
        self.ranges.iter().any(|s| s.contains(r, theta, phi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextureMode {
    /// Generated fractal noise; bounds are absolute HSV values.
    Fractal,
    /// Jitter of a named base texture; bounds are signed HSV offsets.
    Jitter,
}

/// HSV range. For fractal textures `h_min > h_max` denotes a range that
/// wraps through hue 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextureSpec {
    pub mode: TextureMode,
    pub base_name: Option<String>,
    pub h_min: f64,
    pub h_max: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl TextureSpec {
    pub fn fractal(h: (f64, f64), s: (f64, f64), v: (f64, f64)) -> Self {
        TextureSpec {
            mode: TextureMode::Fractal,
            base_name: None,
            h_min: h.0,
            h_max: h.1,
            s_min: s.0,
            s_max: s.1,
            v_min: v.0,
            v_max: v.1,
        }
    }

    pub fn hue_wraps(&self) -> bool {
        self.mode == TextureMode::Fractal && self.h_min > self.h_max
    }

    /// Width of the hue interval, accounting for wrap.
    pub fn hue_span(&self) -> f64 {
        if self.hue_wraps() {
            1.0 - self.h_min + self.h_max
        } else {
            self.h_max - self.h_min
        }
    }

    pub fn contains_hue(&self, h: f64) -> bool {
        if self.hue_wraps() {
            (self.h_min <= h && h < 1.0) || (0.0 <= h && h <= self.h_max)
        } else {
            self.h_min <= h && h <= self.h_max
        }
    }

    pub fn contains(&self, hsv: [f64; 3]) -> bool {
        self.contains_hue(hsv[0])
            && self.s_min <= hsv[1]
            && hsv[1] <= self.s_max
            && self.v_min <= hsv[2]
            && hsv[2] <= self.v_max
    }

    /// Map unit coordinates `u` in `[0,1]^3` affinely into the range, wrapping hue.
    pub fn map_unit(&self, u: [f64; 3]) -> [f64; 3] {
        let lerp = |lo: f64, hi: f64, t: f64| (lo + t * (hi - lo)).clamp(lo, hi);
        let h = if self.hue_wraps() {
            let h = self.h_min + u[0] * self.hue_span();
            if h >= 1.0 {
                (h - 1.0).clamp(0.0, self.h_max)
            } else {
                h
            }
        } else {
            lerp(self.h_min, self.h_max, u[0])
        };
        [
            h,
            lerp(self.s_min, self.s_max, u[1]),
            lerp(self.v_min, self.v_max, u[2]),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub name: String,
    pub lab: String,
    pub goal: PredicateSequence,
    pub object_name: String,
    pub object_texture: TextureSpec,
    pub object_region: SpatialRegion,
    pub receptacle_name: Option<String>,
    pub receptacle_region: Option<SpatialRegion>,
    pub camera_range: CameraPoseRange,
    pub table_texture: TextureSpec,
    pub instruction: String,
}

/// One concrete draw from a [`TaskSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub spec_name: String,
    pub object_pose: [f64; 2],
    pub receptacle_pose: Option<[f64; 2]>,
    /// `(r, theta, phi)`, meters and degrees.
    pub camera_pose: [f64; 3],
    pub object_hsv: [f64; 3],
    /// Absolute HSV for fractal table textures, offsets for jitter textures.
    pub table_hsv: [f64; 3],
    pub seed: u64,
}

impl TaskInstance {
    /// True iff every sampled value lies inside the corresponding range of `spec`.
    pub fn within(&self, spec: &TaskSpec) -> bool {
        let [x, y] = self.object_pose;
        let receptacle_ok = match (&self.receptacle_pose, &spec.receptacle_region) {
            (Some([rx, ry]), Some(region)) => region.contains(*rx, *ry),
            (None, None) => true,
            _ => false,
        };
        let [r, theta, phi] = self.camera_pose;
        spec.object_region.contains(x, y)
            && receptacle_ok
            && spec.camera_range.contains(r, theta, phi)
            && spec.object_texture.contains(self.object_hsv)
            && spec.table_texture.contains(self.table_hsv)
    }
}
