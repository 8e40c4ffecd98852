//! Closed axis-aligned boxes and exact measure / coverage over finite unions of them.
//!
//! Both operations decompose space along the first axis at every box boundary
//! and recurse on the remaining axes, so results are exact up to the float
//! arithmetic of the final length products. Coverage uses only comparisons.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb<const D: usize> {
    #[serde(with = "serde_arrays")]
    pub min: [f64; D],
    #[serde(with = "serde_arrays")]
    pub max: [f64; D],
}

pub type Box2 = Aabb<2>;
pub type Box3 = Aabb<3>;

impl<const D: usize> Aabb<D> {
    pub fn new(min: [f64; D], max: [f64; D]) -> Self {
        Aabb { min, max }
    }

    /// Box of side `cell` centered on `p`.
    pub fn around(p: [f64; D], cell: f64) -> Self {
        let h = cell / 2.0;
        Aabb {
            min: p.map(|v| v - h),
            max: p.map(|v| v + h),
        }
    }

    pub fn is_valid(&self) -> bool {
        (0..D).all(|i| self.min[i].is_finite() && self.max[i].is_finite() && self.min[i] <= self.max[i])
    }

    pub fn volume(&self) -> f64 {
        (0..D).map(|i| self.max[i] - self.min[i]).product()
    }

    pub fn contains_point(&self, p: &[f64; D]) -> bool {
        (0..D).all(|i| self.min[i] <= p[i] && p[i] <= self.max[i])
    }

    pub fn contains_box(&self, other: &Self) -> bool {
        (0..D).all(|i| self.min[i] <= other.min[i] && other.max[i] <= self.max[i])
    }
}

/// Measure of the union of `boxes`, overlaps counted once.
pub fn union_measure<const D: usize>(boxes: &[Aabb<D>]) -> f64 {
    let views: Vec<(&[f64], &[f64])> = boxes
        .iter()
        .map(|b| (&b.min[..], &b.max[..]))
        .collect();
    measure_rec(&views, 0, D)
}

fn measure_rec(boxes: &[(&[f64], &[f64])], axis: usize, dims: usize) -> f64 {
    if boxes.is_empty() {
        return 0.0;
    }
    if axis + 1 == dims {
        // 1-D union length by sorted sweep
        let mut spans: Vec<(f64, f64)> = boxes.iter().map(|(lo, hi)| (lo[axis], hi[axis])).collect();
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut total = 0.0;
        let (mut cur_lo, mut cur_hi) = spans[0];
        for &(lo, hi) in &spans[1..] {
            if lo > cur_hi {
                total += cur_hi - cur_lo;
                cur_lo = lo;
                cur_hi = hi;
            } else if hi > cur_hi {
                cur_hi = hi;
            }
        }
        return total + (cur_hi - cur_lo);
    }
    let cuts = sorted_cuts(boxes.iter().flat_map(|(lo, hi)| [lo[axis], hi[axis]]));
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let slab: Vec<(&[f64], &[f64])> = boxes
            .iter()
            .filter(|(lo, hi)| lo[axis] <= a && b <= hi[axis])
            .copied()
            .collect();
        if !slab.is_empty() {
            total += (b - a) * measure_rec(&slab, axis + 1, dims);
        }
    }
    total
}

/// True iff every point of `target` lies in the union of `cover` (closed sets).
pub fn is_covered<const D: usize>(target: &Aabb<D>, cover: &[Aabb<D>]) -> bool {
    let views: Vec<(&[f64], &[f64])> = cover
        .iter()
        .filter(|b| (0..D).all(|i| b.min[i] <= target.max[i] && target.min[i] <= b.max[i]))
        .map(|b| (&b.min[..], &b.max[..]))
        .collect();
    covered_rec(&target.min, &target.max, &views, 0, D)
}

fn covered_rec(tmin: &[f64], tmax: &[f64], cover: &[(&[f64], &[f64])], axis: usize, dims: usize) -> bool {
    if axis == dims {
        return !cover.is_empty();
    }
    let (lo, hi) = (tmin[axis], tmax[axis]);
    if lo == hi {
        // degenerate along this axis: the target is the single coordinate `lo`
        let sub: Vec<_> = cover
            .iter()
            .filter(|(bl, bh)| bl[axis] <= lo && lo <= bh[axis])
            .copied()
            .collect();
        return covered_rec(tmin, tmax, &sub, axis + 1, dims);
    }
    let mut cuts = sorted_cuts(
        cover
            .iter()
            .flat_map(|(bl, bh)| [bl[axis], bh[axis]])
            .filter(|v| *v > lo && *v < hi),
    );
    cuts.insert(0, lo);
    cuts.push(hi);
    // Closed boxes spanning an open slab also cover its closure, so checking
    // open slabs is enough when the target has positive extent on this axis.
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let slab: Vec<_> = cover
            .iter()
            .filter(|(bl, bh)| bl[axis] <= a && b <= bh[axis])
            .copied()
            .collect();
        if slab.is_empty() || !covered_rec(tmin, tmax, &slab, axis + 1, dims) {
            return false;
        }
    }
    true
}

fn sorted_cuts(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    v
}

/// True iff `a` and `b` share at least one point.
pub fn boxes_intersect<const D: usize>(a: &Aabb<D>, b: &Aabb<D>) -> bool {
    (0..D).all(|i| a.min[i] <= b.max[i] && b.min[i] <= a.max[i])
}

mod serde_arrays {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const D: usize>(v: &[f64; D], s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, De: Deserializer<'de>, const D: usize>(d: De) -> Result<[f64; D], De::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        v.try_into()
            .map_err(|v: Vec<f64>| serde::de::Error::invalid_length(v.len(), &"fixed-size coordinate array"))
    }
}
