use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use super::query::{within, ObjectFilter, RetrievalQuery};
use crate::metadata::DemoRecord;

/// Cell size of the uniform spatial grids (m).
pub const GRID_CELL: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("duplicate demo id `{0}`")]
    DuplicateId(String),
}

/// Annotation fields a filter depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationField {
    TargetObject,
    ObjectPosition,
    ObjectColor,
    Primitives,
}

impl AnnotationField {
    pub fn name(self) -> &'static str {
        match self {
            AnnotationField::TargetObject => "target_object",
            AnnotationField::ObjectPosition => "object_position",
            AnnotationField::ObjectColor => "object_color",
            AnnotationField::Primitives => "primitives",
        }
    }
}

fn cell_of(v: f64) -> i64 {
    (v / GRID_CELL).floor() as i64
}

#[derive(Debug, Default)]
struct Grid {
    cells: HashMap<[i64; 3], Vec<u32>>,
}

impl Grid {
    fn insert(&mut self, p: [f64; 3], idx: u32) {
        self.cells.entry(p.map(cell_of)).or_default().push(idx);
    }

    /// Cells overlapping the closed box `[lo, hi]`.
    fn visit<'a>(&'a self, lo: &[f64; 3], hi: &[f64; 3], mut f: impl FnMut(&'a [u32])) {
        let (a, b) = (lo.map(cell_of), hi.map(cell_of));
        let span: i128 = (0..3).map(|i| (b[i] - a[i] + 1).max(0) as i128).product();
        if span > self.cells.len() as i128 {
            for (k, v) in &self.cells {
                if (0..3).all(|i| a[i] <= k[i] && k[i] <= b[i]) {
                    f(v);
                }
            }
            return;
        }
        for x in a[0]..=b[0] {
            for y in a[1]..=b[1] {
                for z in a[2]..=b[2] {
                    if let Some(v) = self.cells.get(&[x, y, z]) {
                        f(v);
                    }
                }
            }
        }
    }

    fn estimate(&self, lo: &[f64; 3], hi: &[f64; 3]) -> usize {
        let mut n = 0;
        self.visit(lo, hi, |v| n += v.len());
        n
    }

    fn candidates(&self, lo: &[f64; 3], hi: &[f64; 3]) -> Vec<u32> {
        let mut out = Vec::new();
        self.visit(lo, hi, |v| out.extend_from_slice(v));
        out
    }
}

#[derive(Debug, Clone, Default)]
struct Bitmap(Vec<u64>);

impl Bitmap {
    fn set(&mut self, i: u32) {
        let w = (i / 64) as usize;
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1 << (i % 64);
    }

    fn get(&self, i: u32) -> bool {
        self.0.get((i / 64) as usize).is_some_and(|w| w & (1 << (i % 64)) != 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn ones(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (wi, &w) in self.0.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(wi as u32 * 64 + w.trailing_zeros());
                w &= w - 1;
            }
        }
        out
    }
}

/// Immutable index over annotated demos. Stored order is insertion order.
#[derive(Debug, Default)]
pub struct DemoIndex {
    ids: Vec<String>,
    by_id: HashMap<String, u32>,
    object: Vec<Option<String>>,
    color: Vec<Option<String>>,
    object_postings: HashMap<String, Vec<u32>>,
    color_postings: HashMap<String, Vec<u32>>,
    cam_pos: Vec<[f64; 3]>,
    obj_pos: Vec<Option<[f64; 3]>>,
    cam_grid: Grid,
    obj_grid: Grid,
    motion: BTreeMap<String, Bitmap>,
    has_motion: Bitmap,
    missing: BTreeMap<AnnotationField, Vec<u32>>,
}

enum Source<'a> {
    Sorted(&'a [u32]),
    Owned(Vec<u32>),
}

impl DemoIndex {
    pub fn build(records: &[DemoRecord]) -> Result<DemoIndex, BuildError> {
        let mut ix = DemoIndex::default();
        for r in records {
            ix.push(r)?;
        }
        Ok(ix)
    }

    fn push(&mut self, r: &DemoRecord) -> Result<(), BuildError> {
        let idx = self.ids.len() as u32;
        if self.by_id.insert(r.id.clone(), idx).is_some() {
            return Err(BuildError::DuplicateId(r.id.clone()));
        }
        self.ids.push(r.id.clone());
        let ann = r.annotations.as_ref();

        let object = ann.and_then(|a| a.target_object.clone());
        match &object {
            Some(o) => self.object_postings.entry(o.clone()).or_default().push(idx),
            None => self.mark_missing(AnnotationField::TargetObject, idx),
        }
        self.object.push(object);

        let color = ann.and_then(|a| a.object_color.clone());
        match &color {
            Some(c) => self.color_postings.entry(c.clone()).or_default().push(idx),
            None => self.mark_missing(AnnotationField::ObjectColor, idx),
        }
        self.color.push(color);

        self.cam_pos.push(r.camera_extrinsics.pos);
        self.cam_grid.insert(r.camera_extrinsics.pos, idx);

        let obj_pos = ann.and_then(|a| a.object_position);
        match obj_pos {
            Some(p) => self.obj_grid.insert(p, idx),
            None => self.mark_missing(AnnotationField::ObjectPosition, idx),
        }
        self.obj_pos.push(obj_pos);

        match ann.and_then(|a| a.primitives.as_ref()) {
            Some(prims) => {
                self.has_motion.set(idx);
                for p in prims {
                    self.motion.entry(p.clone()).or_default().set(idx);
                }
            }
            None => self.mark_missing(AnnotationField::Primitives, idx),
        }
        Ok(())
    }

    fn mark_missing(&mut self, field: AnnotationField, idx: u32) {
        self.missing.entry(field).or_default().push(idx);
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, idx: u32) -> &str {
        &self.ids[idx as usize]
    }

    /// `(id, field)` for every record lacking an annotation some filter needs.
    pub fn missing_annotations(&self) -> Vec<(&str, AnnotationField)> {
        let mut out: Vec<(u32, AnnotationField)> = self
            .missing
            .iter()
            .flat_map(|(f, ids)| ids.iter().map(move |i| (*i, *f)))
            .collect();
        out.sort();
        out.into_iter().map(|(i, f)| (self.id(i), f)).collect()
    }

    pub fn missing_count(&self, field: AnnotationField) -> usize {
        self.missing.get(&field).map_or(0, Vec::len)
    }

    /// Full predicate check for one record.
    fn matches(&self, i: u32, q: &RetrievalQuery) -> bool {
        let u = i as usize;
        if let Some(f) = &q.object {
            let ok = match (f, &self.object[u]) {
                (ObjectFilter::Include(o), Some(x)) => x == o,
                (ObjectFilter::Exclude(o), Some(x)) => x != o,
                (_, None) => false,
            };
            if !ok {
                return false;
            }
        }
        if let Some(c) = &q.campose {
            let (lo, hi) = c.bounds();
            if !within(&self.cam_pos[u], &lo, &hi) {
                return false;
            }
        }
        if let Some(s) = &q.objspat {
            let (lo, hi) = s.bounds();
            match &self.obj_pos[u] {
                Some(p) if within(p, &lo, &hi) => {}
                _ => return false,
            }
        }
        if let Some(c) = &q.color {
            if self.color[u].as_ref() != Some(c) {
                return false;
            }
        }
        if let Some(m) = &q.motion {
            if !self.has_motion.get(i) || !m.iter().all(|p| self.motion.get(p).is_some_and(|b| b.get(i))) {
                return false;
            }
        }
        true
    }

    /// Smallest candidate list among the indexed positive filters.
    fn driver(&self, q: &RetrievalQuery) -> Option<Source<'_>> {
        const EMPTY: &[u32] = &[];
        #[derive(Clone, Copy)]
        enum Pick {
            Object,
            Color,
            Cam,
            Obj,
            Motion,
        }
        let object_list = match &q.object {
            Some(ObjectFilter::Include(o)) => Some(self.object_postings.get(o).map_or(EMPTY, Vec::as_slice)),
            _ => None,
        };
        let color_list = q
            .color
            .as_ref()
            .map(|c| self.color_postings.get(c).map_or(EMPTY, Vec::as_slice));
        // the rarest primitive bounds the intersection
        let rarest = q.motion.as_ref().map(|m| {
            m.iter()
                .map(|p| self.motion.get(p))
                .min_by_key(|b| b.map_or(0, Bitmap::count))
                .flatten()
        });

        let mut options: Vec<(usize, Pick)> = Vec::new();
        if let Some(l) = object_list {
            options.push((l.len(), Pick::Object));
        }
        if let Some(l) = color_list {
            options.push((l.len(), Pick::Color));
        }
        if let Some(c) = &q.campose {
            let (lo, hi) = c.bounds();
            options.push((self.cam_grid.estimate(&lo, &hi), Pick::Cam));
        }
        if let Some(s) = &q.objspat {
            let (lo, hi) = s.bounds();
            options.push((self.obj_grid.estimate(&lo, &hi), Pick::Obj));
        }
        if let Some(b) = rarest {
            options.push((b.map_or(0, Bitmap::count), Pick::Motion));
        }
        let (_, pick) = options.into_iter().min_by_key(|(n, _)| *n)?;
        Some(match pick {
            Pick::Object => Source::Sorted(object_list.unwrap_or(EMPTY)),
            Pick::Color => Source::Sorted(color_list.unwrap_or(EMPTY)),
            Pick::Cam => {
                let (lo, hi) = q.campose.as_ref().map(|c| c.bounds())?;
                Source::Owned(self.cam_grid.candidates(&lo, &hi))
            }
            Pick::Obj => {
                let (lo, hi) = q.objspat.as_ref().map(|s| s.bounds())?;
                Source::Owned(self.obj_grid.candidates(&lo, &hi))
            }
            Pick::Motion => Source::Owned(rarest.flatten().map_or_else(Vec::new, Bitmap::ones)),
        })
    }

    /// Indices of matching records in insertion order.
    pub fn retrieve_indices(&self, q: &RetrievalQuery) -> Vec<u32> {
        match self.driver(q) {
            Some(Source::Sorted(list)) => list.iter().copied().filter(|&i| self.matches(i, q)).collect(),
            Some(Source::Owned(mut list)) => {
                list.retain(|&i| self.matches(i, q));
                list.sort_unstable();
                list
            }
            None => (0..self.ids.len() as u32).filter(|&i| self.matches(i, q)).collect(),
        }
    }

    pub fn retrieve(&self, q: &RetrievalQuery) -> Vec<&str> {
        self.retrieve_indices(q).into_iter().map(|i| self.id(i)).collect()
    }
}

pub fn build_index(records: &[DemoRecord]) -> Result<DemoIndex, BuildError> {
    DemoIndex::build(records)
}

pub fn retrieve<'a>(index: &'a DemoIndex, query: &RetrievalQuery) -> Vec<&'a str> {
    index.retrieve(query)
}
