use rand::Rng;
use thiserror::Error;

use super::*;
use crate::rng::{self, uniform};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("region `{field}` has zero total area and {boxes} distinct degenerate boxes")]
    DegenerateRegion { field: &'static str, boxes: usize },
}

/// Draw one concrete instance from `spec`.
///
/// Boxes are chosen with probability proportional to their raw area (so
/// overlapping boxes weigh double), then positions are uniform inside the
/// box. Camera ranges are chosen uniformly and each spherical coordinate is
/// uniform on its interval. Equal seeds give equal instances.
pub fn sample_instance(spec: &TaskSpec, seed: u64) -> Result<TaskInstance, SampleError> {
    let mut rng = rng::stream(seed, 0);
    let object_pose = sample_region(&spec.object_region, "object_region", &mut rng)?;
    let receptacle_pose = spec
        .receptacle_region
        .as_ref()
        .map(|r| sample_region(r, "receptacle_region", &mut rng))
        .transpose()?;
    let camera_pose = sample_camera(&spec.camera_range, &mut rng);
    let object_hsv = sample_hsv(&spec.object_texture, &mut rng);
    let table_hsv = sample_hsv(&spec.table_texture, &mut rng);
    Ok(TaskInstance {
        spec_name: spec.name.clone(),
        object_pose,
        receptacle_pose,
        camera_pose,
        object_hsv,
        table_hsv,
        seed,
    })
}

fn sample_region(region: &SpatialRegion, field: &'static str, rng: &mut impl Rng) -> Result<[f64; 2], SampleError> {
    let total = region.raw_area();
    let chosen = if total > 0.0 {
        let mut pick = uniform(rng, 0.0, total);
        let mut chosen = None;
        for b in &region.boxes {
            let a = b.area();
            if a > 0.0 {
                chosen = Some(b);
                if pick <= a {
                    break;
                }
                pick -= a;
            }
        }
        chosen.expect("positive total area implies a positive-area box")
    } else {
        let first = &region.boxes[0];
        let distinct = region.boxes.iter().filter(|b| *b != first).count();
        if distinct > 0 {
            return Err(SampleError::DegenerateRegion {
                field,
                boxes: distinct + 1,
            });
        }
        first
    };
    Ok([uniform(rng, chosen.x0, chosen.x1), uniform(rng, chosen.y0, chosen.y1)])
}

fn sample_camera(range: &CameraPoseRange, rng: &mut impl Rng) -> [f64; 3] {
    let s = &range.ranges[rng.random_range(0..range.ranges.len())];
    [
        uniform(rng, s.r_min, s.r_max),
        uniform(rng, s.theta_min, s.theta_max),
        uniform(rng, s.phi_min, s.phi_max),
    ]
}

fn sample_hsv(tex: &TextureSpec, rng: &mut impl Rng) -> [f64; 3] {
    let u = [rng.random(), rng.random(), rng.random()];
    tex.map_unit(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taskspec::parse;
    use proptest::prelude::*;

    fn spec_with(region: &str, hue: &str) -> TaskSpec {
        let src = format!(
            r#"(task :name "t" :lab "lab1" :goal (sequence pick)
              :object "mug" :object-texture (fractal :h {hue} :s 0 1 :v 0 1)
              :object-region {region}
              :camera (sph :r 0.8 1.0 :theta 37.5 52.5 :phi -15 15)
              :table-texture (jitter :base "wood" :h -0.02 0.02 :s -0.1 0.1 :v -0.1 0.1)
              :instruction "pick the mug")"#
        );
        parse(&src).unwrap()
    }

    #[test]
    fn point_region_always_yields_the_point() {
        let spec = spec_with("(bbox 0.12 -0.05 0.12 -0.05)", "0 0.1");
        for seed in 0..50 {
            assert_eq!(sample_instance(&spec, seed).unwrap().object_pose, [0.12, -0.05]);
        }
    }

    #[test]
    fn conflicting_degenerate_boxes() {
        let spec = spec_with("(union (bbox 0 0 0 0) (bbox 0.1 0.1 0.1 0.1))", "0 0.1");
        assert!(matches!(sample_instance(&spec, 1), Err(SampleError::DegenerateRegion { .. })));
        let spec = spec_with("(union (bbox 0 0 0 0) (bbox 0 0 0 0))", "0 0.1");
        assert_eq!(sample_instance(&spec, 1).unwrap().object_pose, [0.0, 0.0]);
    }

    #[test]
    fn zero_area_box_beside_real_box_is_never_chosen() {
        let spec = spec_with("(union (bbox 5 5 5 5) (bbox 0 0 0.1 0.1))", "0 0.1");
        for seed in 0..200 {
            let [x, y] = sample_instance(&spec, seed).unwrap().object_pose;
            assert!(x <= 0.1 && y <= 0.1);
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let spec = spec_with("(bbox -0.1 -0.1 0.1 0.1)", "0 0.1");
        assert_eq!(sample_instance(&spec, 42).unwrap(), sample_instance(&spec, 42).unwrap());
        assert_ne!(sample_instance(&spec, 42).unwrap(), sample_instance(&spec, 43).unwrap());
    }

    #[test]
    fn mean_of_uniform_box_is_its_center() {
        // 20cm box: per-axis sd = 0.2/sqrt(12) = 0.0577; the sd of a
        // 10k-sample mean is 0.000577, so 3 sd = 0.0017 < 0.005.
        let spec = spec_with("(bbox -0.10 -0.10 0.10 0.10)", "0 0.1");
        let n = 10_000;
        let (mut sx, mut sy) = (0.0, 0.0);
        for seed in 0..n {
            let [x, y] = sample_instance(&spec, seed).unwrap().object_pose;
            sx += x;
            sy += y;
        }
        assert!((sx / n as f64).abs() <= 0.005);
        assert!((sy / n as f64).abs() <= 0.005);
    }

    #[test]
    fn wrapped_hue_stays_in_both_arcs() {
        let spec = spec_with("(bbox 0 0 0.1 0.1)", "0.95 0.05");
        let mut low = 0;
        for seed in 0..2000 {
            let h = sample_instance(&spec, seed).unwrap().object_hsv[0];
            assert!((0.95..1.0).contains(&h) || (0.0..=0.05).contains(&h), "{h}");
            if h <= 0.05 {
                low += 1;
            }
        }
        // both arcs have width 0.05, so roughly half land on each side
        assert!((800..1200).contains(&low), "{low}");
    }

    fn arb_box() -> impl Strategy<Value = String> {
        (-0.5f64..0.5, -0.5f64..0.5, 0.0f64..0.3, 0.0f64..0.3)
            .prop_map(|(x, y, w, h)| format!("(bbox {x} {y} {} {})", x + w, y + h))
    }

    proptest! {
        #[test]
        fn sampled_values_lie_in_their_ranges(
            boxes in prop::collection::vec(arb_box(), 1..4),
            h0 in 0.0f64..1.0, h1 in 0.0f64..1.0,
            seed in any::<u64>(),
        ) {
            let region = format!("(union {})", boxes.join(" "));
            let spec = spec_with(&region, &format!("{h0} {h1}"));
            match sample_instance(&spec, seed) {
                Ok(inst) => prop_assert!(inst.within(&spec), "{inst:?}"),
                Err(SampleError::DegenerateRegion { .. }) => prop_assert!(spec.object_region.raw_area() == 0.0),
            }
        }
    }
}
