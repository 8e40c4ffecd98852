//! Camera-pose bins: angular windows about the table center.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Polar-angle extent of one camera bin, degrees.
pub const BIN_POLAR_WIDTH_DEG: f64 = 15.0;
/// Azimuthal extent of one camera bin, degrees.
pub const BIN_AZIMUTH_WIDTH_DEG: f64 = 30.0;
pub const UNBINNED: &str = "unbinned";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CameraError {
    #[error("camera position coincides with the table center")]
    DegeneratePose,
    #[error("invalid bin table: {0}")]
    BadTable(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraBin {
    pub label: String,
    pub theta_center: f64,
    pub phi_center: f64,
    #[serde(default = "default_theta_width")]
    pub theta_width: f64,
    #[serde(default = "default_phi_width")]
    pub phi_width: f64,
}

fn default_theta_width() -> f64 {
    BIN_POLAR_WIDTH_DEG
}

fn default_phi_width() -> f64 {
    BIN_AZIMUTH_WIDTH_DEG
}

impl CameraBin {
    pub fn contains(&self, theta: f64, phi: f64) -> bool {
        (theta - self.theta_center).abs() <= self.theta_width / 2.0
            && azimuth_delta(phi, self.phi_center).abs() <= self.phi_width / 2.0
    }
}

/// Signed azimuth difference `a - b` wrapped into `(-180, 180]`.
pub fn azimuth_delta(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}

/// Ordered bin windows; the first window containing a pose wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinTable {
    pub bins: Vec<CameraBin>,
}

impl Default for BinTable {
    /// Five bins at polar 45 deg; azimuths agent-front 0, agent-left +60,
    /// agent-right -60, shoulder-left +120, shoulder-right -120.
    fn default() -> Self {
        let bin = |label: &str, phi: f64| CameraBin {
            label: label.to_string(),
            theta_center: 45.0,
            phi_center: phi,
            theta_width: BIN_POLAR_WIDTH_DEG,
            phi_width: BIN_AZIMUTH_WIDTH_DEG,
        };
        BinTable {
            bins: vec![
                bin("agent-front", 0.0),
                bin("agent-left", 60.0),
                bin("agent-right", -60.0),
                bin("shoulder-left", 120.0),
                bin("shoulder-right", -120.0),
            ],
        }
    }
}

impl BinTable {
    pub fn from_json(text: &str) -> Result<Self, CameraError> {
        let table: BinTable = serde_json::from_str(text).map_err(|e| CameraError::BadTable(e.to_string()))?;
        if table.bins.is_empty() {
            return Err(CameraError::BadTable("no bins".into()));
        }
        for b in &table.bins {
            if b.label.is_empty() || b.label == UNBINNED {
                return Err(CameraError::BadTable(format!("bad label `{}`", b.label)));
            }
            if !(b.theta_width > 0.0 && b.phi_width > 0.0) {
                return Err(CameraError::BadTable(format!("bin `{}` has non-positive width", b.label)));
            }
        }
        Ok(table)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.bins.iter().map(|b| b.label.as_str())
    }

    pub fn bin_angles(&self, theta: f64, phi: f64) -> Option<&CameraBin> {
        self.bins.iter().find(|b| b.contains(theta, phi))
    }

    /// Bin label for a camera at `position`, or [`UNBINNED`].
    pub fn bin_camera_pose(&self, position: [f64; 3], table_center: [f64; 3]) -> Result<String, CameraError> {
        let (_, theta, phi) = to_spherical(position, table_center)?;
        Ok(self
            .bin_angles(theta, phi)
            .map_or_else(|| UNBINNED.to_string(), |b| b.label.clone()))
    }
}

/// `(r, theta, phi)` about `center`, physics convention, angles in degrees:
/// theta is measured from +z, phi from +x towards +y.
pub fn to_spherical(position: [f64; 3], center: [f64; 3]) -> Result<(f64, f64, f64), CameraError> {
    let d = [position[0] - center[0], position[1] - center[1], position[2] - center[2]];
    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if r == 0.0 {
        return Err(CameraError::DegeneratePose);
    }
    let theta = (d[2] / r).clamp(-1.0, 1.0).acos().to_degrees();
    let phi = d[1].atan2(d[0]).to_degrees();
    Ok((r, theta, phi))
}

pub fn from_spherical(r: f64, theta_deg: f64, phi_deg: f64, center: [f64; 3]) -> [f64; 3] {
    let (t, p) = (theta_deg.to_radians(), phi_deg.to_radians());
    [
        center[0] + r * t.sin() * p.cos(),
        center[1] + r * t.sin() * p.sin(),
        center[2] + r * t.cos(),
    ]
}
