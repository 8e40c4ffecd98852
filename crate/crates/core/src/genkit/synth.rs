//! Object-centric segmentation of a source demo and re-anchored stitching.
//!
//! A demo splits after every smoothed gripper transition except the first,
//! so with transitions `t_0 < t_1 < ...` segment 0 spans `[0, t_1]`, segment
//! `k` spans `(t_k, t_{k+1}]`, and the last runs to the end. Segment `k` is
//! anchored at the end-effector pose at `t_k`: the grasp pose for the first
//! segment and the pose where the previous interaction ended for later ones.

use nalgebra::{Isometry3, UnitQuaternion, Vector3};
use thiserror::Error;

use crate::metadata::gripper::transitions;
use crate::metadata::{extract_object_position, Annotations, DemoRecord, Step};
use crate::pose::{dist3, quat_from_wxyz, quat_to_wxyz, Pose};
use crate::taskspec::Primitive;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("demo has {transitions} gripper transitions but the goal has {primitives} primitives")]
    SegmentationMismatch { transitions: usize, primitives: usize },
    #[error("goal has no primitives")]
    EmptyGoal,
    #[error("anchor {0} is not a finite pose with a unit quaternion")]
    DegenerateAnchor(usize),
    #[error("{anchors} anchors given for {segments} segments")]
    AnchorCount { anchors: usize, segments: usize },
    #[error("bridge step must be positive and finite, got {0}")]
    BadBridgeStep(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub object_anchor: Pose,
    pub steps: Vec<Step>,
    pub primitive: Primitive,
}

pub fn decompose(demo: &DemoRecord, goal: &[Primitive]) -> Result<Vec<Segment>, SynthError> {
    if goal.is_empty() {
        return Err(SynthError::EmptyGoal);
    }
    let events = transitions(&demo.gripper_signal());
    if events.len() != goal.len() {
        return Err(SynthError::SegmentationMismatch {
            transitions: events.len(),
            primitives: goal.len(),
        });
    }
    let n = demo.steps.len();
    let mut bounds: Vec<usize> = events.iter().skip(1).map(|(i, _)| i + 1).collect();
    bounds.insert(0, 0);
    bounds.push(n);
    Ok(goal
        .iter()
        .enumerate()
        .map(|(k, prim)| {
            let at = &demo.steps[events[k].0];
            Segment {
                object_anchor: Pose::new(at.ee_pos, at.ee_quat),
                steps: demo.steps[bounds[k]..bounds[k + 1]].to_vec(),
                primitive: prim.clone(),
            }
        })
        .collect())
}

fn transform_step(t: &Isometry3<f64>, s: &Step) -> Step {
    let ee = t * Pose::new(s.ee_pos, s.ee_quat).to_isometry();
    let p = Pose::from_isometry(&ee);
    Step {
        t: s.t,
        ee_pos: p.pos,
        ee_quat: p.quat,
        gripper: s.gripper,
    }
}

/// Points strictly between `a` and `b`, at most `step` apart.
fn bridge(a: &Step, b: &Step, step: f64) -> Vec<Step> {
    let d = dist3(&a.ee_pos, &b.ee_pos);
    if d <= step {
        return Vec::new();
    }
    let mut n = (d / step).ceil() as usize;
    while d / n as f64 > step {
        n += 1;
    }
    let (qa, qb) = (quat_from_wxyz(&a.ee_quat), quat_from_wxyz(&b.ee_quat));
    (1..n)
        .map(|k| {
            let f = k as f64 / n as f64;
            let q = qa.try_slerp(&qb, f, 1e-12).unwrap_or(qa);
            Step {
                t: 0,
                ee_pos: std::array::from_fn(|i| a.ee_pos[i] + f * (b.ee_pos[i] - a.ee_pos[i])),
                ee_quat: quat_to_wxyz(&q),
                gripper: a.gripper,
            }
        })
        .collect()
}

/// Map every segment by `new_anchor * old_anchor^-1`, join consecutive
/// segments with straight-line / slerp bridges no coarser than
/// `bridge_step`, and renumber timesteps from 0.
pub fn synthesize(segments: &[Segment], new_anchors: &[Pose], bridge_step: f64) -> Result<Vec<Step>, SynthError> {
    if !(bridge_step > 0.0 && bridge_step.is_finite()) {
        return Err(SynthError::BadBridgeStep(bridge_step.to_string()));
    }
    if segments.len() != new_anchors.len() {
        return Err(SynthError::AnchorCount {
            anchors: new_anchors.len(),
            segments: segments.len(),
        });
    }
    let mut out: Vec<Step> = Vec::new();
    for (k, (seg, anchor)) in segments.iter().zip(new_anchors).enumerate() {
        if !anchor.is_unit() || !seg.object_anchor.is_unit() {
            return Err(SynthError::DegenerateAnchor(k));
        }
        let t = anchor.to_isometry() * seg.object_anchor.to_isometry().inverse();
        let mapped: Vec<Step> = seg.steps.iter().map(|s| transform_step(&t, s)).collect();
        if let (Some(last), Some(first)) = (out.last(), mapped.first()) {
            let b = bridge(last, first, bridge_step);
            out.extend(b);
        }
        out.extend(mapped);
    }
    for (i, s) in out.iter_mut().enumerate() {
        s.t = i as i64;
    }
    Ok(out)
}

/// New demo from `source` re-anchored to `new_anchors`. Camera, lab,
/// instructions, and non-positional annotations carry over; the object
/// position is re-extracted from the new trajectory.
pub fn synthesize_demo(
    source: &DemoRecord,
    segments: &[Segment],
    new_anchors: &[Pose],
    bridge_step: f64,
    id: String,
) -> Result<DemoRecord, SynthError> {
    let steps = synthesize(segments, new_anchors, bridge_step)?;
    let mut ann: Annotations = source.annotations.clone().unwrap_or_default();
    ann.object_position = extract_object_position(&steps);
    ann.receptacle_position = None;
    if ann.primitives.is_none() {
        ann.primitives = Some(segments.iter().map(|s| s.primitive.label().to_string()).collect());
    }
    Ok(DemoRecord {
        id,
        lab: source.lab.clone(),
        instructions: source.instructions.clone(),
        camera_extrinsics: source.camera_extrinsics,
        steps,
        annotations: Some(ann),
    })
}

/// Shift each segment anchor uniformly within `+-translate` meters in x and y
/// and rotate it within `+-yaw_deg` about z. Draw `i` uses stream `i`.
pub fn jitter_anchors(segments: &[Segment], translate: f64, yaw_deg: f64, seed: u64, i: u64) -> Vec<Pose> {
    let mut r = crate::rng::stream(seed, i);
    segments
        .iter()
        .map(|s| {
            let dx = crate::rng::uniform(&mut r, -translate, translate);
            let dy = crate::rng::uniform(&mut r, -translate, translate);
            let yaw = crate::rng::uniform(&mut r, -yaw_deg, yaw_deg).to_radians();
            let q = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), yaw) * quat_from_wxyz(&s.object_anchor.quat);
            let p = s.object_anchor.pos;
            Pose::new([p[0] + dx, p[1] + dy, p[2]], quat_to_wxyz(&q))
        })
        .collect()
}

/// Largest position change between consecutive steps.
pub fn max_jump(steps: &[Step]) -> f64 {
    steps
        .windows(2)
        .map(|w| dist3(&w[0].ee_pos, &w[1].ee_pos))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metadata::CameraExtrinsics;
    use crate::pose::quat_chordal;
    use crate::rng;
    use nalgebra::{UnitQuaternion, Vector3};
    use rand::Rng;

    fn demo(gripper: impl Fn(usize) -> f64, n: usize) -> DemoRecord {
        let steps = (0..n)
            .map(|i| {
                let a = i as f64 * 0.05;
                let q = UnitQuaternion::from_euler_angles(0.1 * a, -0.2 * a, 0.3 * a);
                Step {
                    t: i as i64 * 2,
                    ee_pos: [0.3 + 0.2 * a.cos(), 0.1 * a.sin(), 0.2 + 0.001 * i as f64],
                    ee_quat: quat_to_wxyz(&q),
                    gripper: gripper(i),
                }
            })
            .collect();
        DemoRecord {
            id: "src".into(),
            lab: "lab1".into(),
            instructions: vec!["pick the mug and place it on the plate".into()],
            camera_extrinsics: CameraExtrinsics {
                pos: [1.0, 0.0, 1.0],
                quat: [1.0, 0.0, 0.0, 0.0],
            },
            steps,
            annotations: None,
        }
    }

    fn pick_place() -> DemoRecord {
        demo(|i| if (30..80).contains(&i) { 1.0 } else { 0.0 }, 120)
    }

    fn random_pose(r: &mut impl Rng) -> Pose {
        let q = UnitQuaternion::from_euler_angles(
            r.random_range(-3.0..3.0),
            r.random_range(-1.5..1.5),
            r.random_range(-3.0..3.0),
        );
        Pose::new(std::array::from_fn(|_| r.random_range(-0.5..0.5)), quat_to_wxyz(&q))
    }

    #[test]
    fn single_pick_is_one_segment() {
        let d = demo(|i| if i >= 40 { 1.0 } else { 0.0 }, 100);
        let segs = decompose(&d, &[Primitive::Pick]).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].steps, d.steps);
        assert_eq!(segs[0].object_anchor.pos, d.steps[40].ee_pos);
    }

    #[test]
    fn pick_place_splits_after_release() {
        let d = pick_place();
        let segs = decompose(&d, &[Primitive::Pick, Primitive::Place]).unwrap();
        assert_eq!(segs[0].steps.len(), 81);
        assert_eq!(segs[0].steps.last().unwrap().t, d.steps[80].t);
        assert_eq!(segs[1].steps[0].t, d.steps[81].t);
        assert_eq!(segs[0].primitive, Primitive::Pick);
        assert_eq!(segs[1].primitive, Primitive::Place);
        assert_eq!(segs[1].object_anchor.pos, d.steps[80].ee_pos);
    }

    #[test]
    fn mismatch() {
        let d = demo(|i| if (20..50).contains(&i) || i >= 80 { 1.0 } else { 0.0 }, 120);
        assert_eq!(
            decompose(&d, &[Primitive::Pick, Primitive::Place]),
            Err(SynthError::SegmentationMismatch {
                transitions: 3,
                primitives: 2
            })
        );
    }

    #[test]
    fn identity_anchors_reproduce_source() {
        let d = pick_place();
        let segs = decompose(&d, &[Primitive::Pick, Primitive::Place]).unwrap();
        let anchors: Vec<Pose> = segs.iter().map(|s| s.object_anchor).collect();
        let out = synthesize(&segs, &anchors, max_jump(&d.steps)).unwrap();
        assert_eq!(out.len(), d.steps.len());
        for (i, (a, b)) in out.iter().zip(&d.steps).enumerate() {
            assert_eq!(a.t, i as i64);
            assert!(dist3(&a.ee_pos, &b.ee_pos) < 1e-12);
            assert!(quat_chordal(&quat_from_wxyz(&a.ee_quat), &quat_from_wxyz(&b.ee_quat)) < 1e-12);
            assert_eq!(a.gripper, b.gripper);
        }
    }

    #[test]
    fn pure_translation_shifts_positions() {
        let d = pick_place();
        let segs = decompose(&d, &[Primitive::Pick, Primitive::Place]).unwrap();
        let anchors: Vec<Pose> = segs
            .iter()
            .map(|s| {
                let mut p = s.object_anchor;
                p.pos[0] += 0.1;
                p
            })
            .collect();
        let out = synthesize(&segs, &anchors, 1.0).unwrap();
        for (a, b) in out.iter().zip(&d.steps) {
            assert!((a.ee_pos[0] - b.ee_pos[0] - 0.1).abs() < 1e-12);
            assert!((a.ee_pos[1] - b.ee_pos[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn relative_pose_and_continuity() {
        let d = pick_place();
        let segs = decompose(&d, &[Primitive::Pick, Primitive::Place]).unwrap();
        let mut r = rng::stream(3, 0);
        for _ in 0..50 {
            let anchors: Vec<Pose> = (0..2).map(|_| random_pose(&mut r)).collect();
            let step = r.random_range(0.005..0.05);
            let out = synthesize(&segs, &anchors, step).unwrap();
            assert!(max_jump(&out) <= max_jump(&d.steps).max(step) + 1e-12);
            // locate each segment in the output: the first one starts at 0,
            // the second ends at the last step
            let ranges = [(0, segs[0].steps.len()), (out.len() - segs[1].steps.len(), out.len())];
            for (k, (lo, hi)) in ranges.into_iter().enumerate() {
                let new_a = anchors[k].to_isometry().inverse();
                let old_a = segs[k].object_anchor.to_isometry().inverse();
                for (o, s) in out[lo..hi].iter().zip(&segs[k].steps) {
                    let rel_new = new_a * Pose::new(o.ee_pos, o.ee_quat).to_isometry();
                    let rel_old = old_a * Pose::new(s.ee_pos, s.ee_quat).to_isometry();
                    let dp: Vector3<f64> = rel_new.translation.vector - rel_old.translation.vector;
                    assert!(dp.norm() < 1e-9);
                    assert!(quat_chordal(&rel_new.rotation, &rel_old.rotation) < 1e-9);
                }
            }
        }
    }

    #[test]
    fn degenerate_anchor() {
        let d = pick_place();
        let segs = decompose(&d, &[Primitive::Pick, Primitive::Place]).unwrap();
        let bad = [segs[0].object_anchor, Pose::new([0.0; 3], [1.0, 1.0, 0.0, 0.0])];
        assert_eq!(synthesize(&segs, &bad, 0.01), Err(SynthError::DegenerateAnchor(1)));
        assert!(matches!(synthesize(&segs, &bad[..1], 0.01), Err(SynthError::AnchorCount { .. })));
        assert!(matches!(synthesize(&segs, &bad, 0.0), Err(SynthError::BadBridgeStep(_))));
    }

    #[test]
    fn synthesized_demo_is_valid_record() {
        let d = pick_place();
        let segs = decompose(&d, &[Primitive::Pick, Primitive::Place]).unwrap();
        let anchors: Vec<Pose> = segs
            .iter()
            .map(|s| Pose::new([s.object_anchor.pos[0] + 0.05, s.object_anchor.pos[1], s.object_anchor.pos[2]], s.object_anchor.quat))
            .collect();
        let out = synthesize_demo(&d, &segs, &anchors, 0.01, "gen-1".into()).unwrap();
        crate::metadata::ingest::validate(&out, 1).unwrap();
        assert_eq!(out.primitives().unwrap(), ["pick", "place"]);
        let pos = out.object_position().unwrap();
        assert!((pos[0] - d.steps[30].ee_pos[0] - 0.05).abs() < 1e-9);
    }
}
