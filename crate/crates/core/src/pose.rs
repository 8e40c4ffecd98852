//! Rigid poses with the `[x,y,z]` / `[w,x,y,z]` array layout used in record files.

use nalgebra::{Isometry3, Quaternion, Translation3, UnitQuaternion, Vector3};

/// Tolerance on |q| - 1 accepted for stored unit quaternions.
pub const QUAT_NORM_TOL: f64 = 1e-6;

pub fn quat_norm_ok(q: &[f64; 4]) -> bool {
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    n.is_finite() && (n - 1.0).abs() <= QUAT_NORM_TOL
}

/// `[w,x,y,z]` -> unit quaternion (renormalized).
pub fn quat_from_wxyz(q: &[f64; 4]) -> UnitQuaternion<f64> {
    UnitQuaternion::from_quaternion(Quaternion::new(q[0], q[1], q[2], q[3]))
}

pub fn quat_to_wxyz(q: &UnitQuaternion<f64>) -> [f64; 4] {
    [q.w, q.i, q.j, q.k]
}

pub fn isometry(pos: &[f64; 3], quat: &[f64; 4]) -> Isometry3<f64> {
    Isometry3::from_parts(
        Translation3::new(pos[0], pos[1], pos[2]),
        quat_from_wxyz(quat),
    )
}

pub fn split_isometry(iso: &Isometry3<f64>) -> ([f64; 3], [f64; 4]) {
    let t = iso.translation.vector;
    ([t.x, t.y, t.z], quat_to_wxyz(&iso.rotation))
}

/// Chordal distance between orientations, insensitive to the q / -q sign ambiguity.
pub fn quat_chordal(a: &UnitQuaternion<f64>, b: &UnitQuaternion<f64>) -> f64 {
    let (a, b) = (a.as_ref().coords, b.as_ref().coords);
    (a - b).norm().min((a + b).norm())
}

/// Position plus `[w,x,y,z]` orientation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Pose {
    pub pos: [f64; 3],
    pub quat: [f64; 4],
}

impl Pose {
    pub const IDENTITY: Pose = Pose {
        pos: [0.0; 3],
        quat: [1.0, 0.0, 0.0, 0.0],
    };

    pub fn new(pos: [f64; 3], quat: [f64; 4]) -> Self {
        Pose { pos, quat }
    }

    pub fn to_isometry(&self) -> Isometry3<f64> {
        isometry(&self.pos, &self.quat)
    }

    pub fn from_isometry(iso: &Isometry3<f64>) -> Self {
        let (pos, quat) = split_isometry(iso);
        Pose { pos, quat }
    }

    pub fn is_unit(&self) -> bool {
        quat_norm_ok(&self.quat) && self.pos.iter().all(|v| v.is_finite())
    }
}

pub fn dist3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (Vector3::from(*a) - Vector3::from(*b)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_check() {
        assert!(quat_norm_ok(&[1.0, 0.0, 0.0, 0.0]));
        assert!(quat_norm_ok(&[1.0 + 5e-7, 0.0, 0.0, 0.0]));
        assert!(!quat_norm_ok(&[1.01, 0.0, 0.0, 0.0]));
        assert!(!quat_norm_ok(&[f64::NAN, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn chordal_ignores_sign() {
        let q = quat_from_wxyz(&[0.5, 0.5, 0.5, 0.5]);
        let neg = UnitQuaternion::new_unchecked(-q.into_inner());
        assert!(quat_chordal(&q, &neg) < 1e-15);
    }

    #[test]
    fn isometry_round_trip() {
        let (p, q) = ([0.1, -0.2, 0.3], [0.5, 0.5, 0.5, 0.5]);
        let (p2, q2) = split_isometry(&isometry(&p, &q));
        assert_eq!(p, p2);
        assert!(quat_chordal(&quat_from_wxyz(&q), &quat_from_wxyz(&q2)) < 1e-15);
    }
}
