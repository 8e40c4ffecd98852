use serde::{Deserialize, Serialize};

/// One demonstration trajectory as stored in line-delimited dataset files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoRecord {
    pub id: String,
    pub lab: String,
    pub instructions: Vec<String>,
    pub camera_extrinsics: CameraExtrinsics,
    pub steps: Vec<Step>,
    #[serde(default)]
    pub annotations: Option<Annotations>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraExtrinsics {
    pub pos: [f64; 3],
    /// `[w, x, y, z]`
    pub quat: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub t: i64,
    pub ee_pos: [f64; 3],
    /// `[w, x, y, z]`
    pub ee_quat: [f64; 4],
    /// 0 = open, 1 = closed.
    pub gripper: f64,
}

/// Derived per-demo metadata. Absent fields mean "not annotated".
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Annotations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_object: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object_position: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object_color: Option<String>,
    /// Bin label or `"unbinned"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub camera_bin: Option<String>,
    /// Receptacle placement, when the source corpus records it (simulated data).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receptacle_position: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_color: Option<String>,
    /// Motion primitive labels of the demonstrated task, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primitives: Option<Vec<String>>,
}

impl DemoRecord {
    pub fn annotations(&self) -> Option<&Annotations> {
        self.annotations.as_ref()
    }

    pub fn target_object(&self) -> Option<&str> {
        self.annotations.as_ref()?.target_object.as_deref()
    }

    pub fn object_position(&self) -> Option<[f64; 3]> {
        self.annotations.as_ref()?.object_position
    }

    pub fn object_color(&self) -> Option<&str> {
        self.annotations.as_ref()?.object_color.as_deref()
    }

    pub fn camera_bin(&self) -> Option<&str> {
        self.annotations.as_ref()?.camera_bin.as_deref()
    }

    pub fn primitives(&self) -> Option<&[String]> {
        self.annotations.as_ref()?.primitives.as_deref()
    }

    pub fn gripper_signal(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.gripper).collect()
    }
}
