//! Retrieval queries and their s-expression form.
//!
//! ```text
//! (query :object (include "marker")
//!        :campose (:pos 0.4 -0.3 0.6 :tol 0.20 0.20 0.10)
//!        :objspat (:center 0.5 0.0 0.1 :extent 0.60 0.60 0.30)
//!        :color "red"
//!        :motion (pick place))
//! ```
//! `:tol` and `:extent` may be omitted and then take their defaults.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sexpr::{self, numeric_groups_with, number, quote, Fields, Sexp, SyntaxError};
use crate::taskspec::{parse_primitive, SpecError};

/// Camera position tolerance per axis (m).
pub const DEFAULT_CAMPOSE_TOL: [f64; 3] = [0.20, 0.20, 0.10];
/// Full edge lengths of the object-position cuboid (m).
pub const DEFAULT_OBJSPAT_EXTENT: [f64; 3] = [0.60, 0.60, 0.30];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueryError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{line}:{col}: {message}")]
    Invalid { line: usize, col: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectFilter {
    Include(String),
    /// Counterfactual retrieval: everything except demos of this object.
    Exclude(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CamPoseFilter {
    pub pos: [f64; 3],
    pub tol: [f64; 3],
}

impl CamPoseFilter {
    pub fn new(pos: [f64; 3]) -> Self {
        CamPoseFilter {
            pos,
            tol: DEFAULT_CAMPOSE_TOL,
        }
    }

    /// Closed bounds `[pos - tol, pos + tol]` per axis.
    pub fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        (
            std::array::from_fn(|i| self.pos[i] - self.tol[i]),
            std::array::from_fn(|i| self.pos[i] + self.tol[i]),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjSpatFilter {
    pub center: [f64; 3],
    pub extent: [f64; 3],
}

impl ObjSpatFilter {
    pub fn new(center: [f64; 3]) -> Self {
        ObjSpatFilter {
            center,
            extent: DEFAULT_OBJSPAT_EXTENT,
        }
    }

    /// Closed bounds `[center - extent/2, center + extent/2]` per axis.
    pub fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        (
            std::array::from_fn(|i| self.center[i] - self.extent[i] / 2.0),
            std::array::from_fn(|i| self.center[i] + self.extent[i] / 2.0),
        )
    }
}

/// Conjunction of the present filters.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RetrievalQuery {
    pub object: Option<ObjectFilter>,
    pub campose: Option<CamPoseFilter>,
    pub objspat: Option<ObjSpatFilter>,
    pub color: Option<String>,
    /// Demos must carry every listed primitive.
    pub motion: Option<BTreeSet<String>>,
}

pub(crate) fn within(v: &[f64; 3], lo: &[f64; 3], hi: &[f64; 3]) -> bool {
    (0..3).all(|i| lo[i] <= v[i] && v[i] <= hi[i])
}

impl RetrievalQuery {
    pub fn filter_count(&self) -> usize {
        [
            self.object.is_some(),
            self.campose.is_some(),
            self.objspat.is_some(),
            self.color.is_some(),
            self.motion.is_some(),
        ]
        .iter()
        .filter(|b| **b)
        .count()
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.filter_count() == 0 {
            return Err("query has no filters".into());
        }
        if let Some(c) = &self.campose {
            if !c.tol.iter().all(|t| *t > 0.0 && t.is_finite()) || !c.pos.iter().all(|v| v.is_finite()) {
                return Err("campose tolerances must be positive and finite".into());
            }
        }
        if let Some(s) = &self.objspat {
            if !s.extent.iter().all(|t| *t > 0.0 && t.is_finite()) || !s.center.iter().all(|v| v.is_finite()) {
                return Err("objspat extents must be positive and finite".into());
            }
        }
        if matches!(&self.motion, Some(m) if m.is_empty()) {
            return Err("motion filter lists no primitives".into());
        }
        Ok(())
    }

    /// Canonical one-line form with every default written out.
    pub fn to_sexpr(&self) -> String {
        let nums = |v: &[f64; 3]| v.map(number).join(" ");
        let mut out = String::from("(query");
        match &self.object {
            Some(ObjectFilter::Include(o)) => {
                let _ = write!(out, " :object (include {})", quote(o));
            }
            Some(ObjectFilter::Exclude(o)) => {
                let _ = write!(out, " :object (exclude {})", quote(o));
            }
            None => {}
        }
        if let Some(c) = &self.campose {
            let _ = write!(out, " :campose (:pos {} :tol {})", nums(&c.pos), nums(&c.tol));
        }
        if let Some(s) = &self.objspat {
            let _ = write!(out, " :objspat (:center {} :extent {})", nums(&s.center), nums(&s.extent));
        }
        if let Some(c) = &self.color {
            let _ = write!(out, " :color {}", quote(c));
        }
        if let Some(m) = &self.motion {
            let items: Vec<String> = m.iter().map(|p| motion_item(p)).collect();
            let _ = write!(out, " :motion ({})", items.join(" "));
        }
        out.push(')');
        out
    }
}

fn motion_item(label: &str) -> String {
    use crate::taskspec::Primitive;
    match Primitive::from_symbol(label) {
        Some(p) if !matches!(p, Primitive::Custom(_)) => label.to_string(),
        _ => format!("(custom {})", quote(label)),
    }
}

fn invalid(pos: sexpr::Pos, message: impl Into<String>) -> QueryError {
    QueryError::Invalid {
        line: pos.line,
        col: pos.col,
        message: message.into(),
    }
}

fn triple(v: &[f64]) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

fn parse_form(form: &Sexp) -> Result<RetrievalQuery, QueryError> {
    let items = form.as_form("query")?;
    let fields = Fields::parse(items, form.pos(), &["object", "campose", "objspat", "color", "motion"])?;
    let mut q = RetrievalQuery::default();

    if let Some(v) = fields.get("object") {
        let (mode, rest) = match v.head() {
            Some("include") => ("include", v.as_form("include")?),
            Some("exclude") => ("exclude", v.as_form("exclude")?),
            _ => return Err(SyntaxError::at(v.pos(), "expected (include \"...\") or (exclude \"...\")").into()),
        };
        let [name] = rest else {
            return Err(SyntaxError::at(v.pos(), format!("`{mode}` takes exactly one string")).into());
        };
        let name = name.as_str()?.to_lowercase();
        if name.is_empty() {
            return Err(invalid(v.pos(), "object name is empty"));
        }
        q.object = Some(if mode == "include" {
            ObjectFilter::Include(name)
        } else {
            ObjectFilter::Exclude(name)
        });
    }
    if let Some(v) = fields.get("campose") {
        let groups = numeric_groups_with(v.as_list()?, v.pos(), &[("pos", 3), ("tol", 3)], &["pos"])?;
        let mut c = CamPoseFilter::new([0.0; 3]);
        for (key, vals, pos) in groups {
            match key {
                "pos" => c.pos = triple(&vals),
                _ => {
                    if vals.iter().any(|t| *t <= 0.0) {
                        return Err(invalid(pos, "campose tolerances must be positive"));
                    }
                    c.tol = triple(&vals);
                }
            }
        }
        q.campose = Some(c);
    }
    if let Some(v) = fields.get("objspat") {
        let groups = numeric_groups_with(v.as_list()?, v.pos(), &[("center", 3), ("extent", 3)], &["center"])?;
        let mut s = ObjSpatFilter::new([0.0; 3]);
        for (key, vals, pos) in groups {
            match key {
                "center" => s.center = triple(&vals),
                _ => {
                    if vals.iter().any(|t| *t <= 0.0) {
                        return Err(invalid(pos, "objspat extents must be positive"));
                    }
                    s.extent = triple(&vals);
                }
            }
        }
        q.objspat = Some(s);
    }
    if let Some(v) = fields.get("color") {
        let c = v.as_str()?.to_lowercase();
        if c.is_empty() {
            return Err(invalid(v.pos(), "color is empty"));
        }
        q.color = Some(c);
    }
    if let Some(v) = fields.get("motion") {
        let list = v.as_list()?;
        if list.is_empty() {
            return Err(invalid(v.pos(), "motion filter lists no primitives"));
        }
        let mut set = BTreeSet::new();
        for item in list {
            let p = parse_primitive(item).map_err(|e| match e {
                SpecError::Syntax(s) => QueryError::Syntax(s),
                SpecError::Range { line, col, reason, .. } => QueryError::Invalid {
                    line,
                    col,
                    message: reason,
                },
            })?;
            set.insert(p.label().to_string());
        }
        q.motion = Some(set);
    }
    if q.filter_count() == 0 {
        return Err(invalid(form.pos(), "query has no filters"));
    }
    Ok(q)
}

/// Parse every `(query ...)` form in `source`.
pub fn parse_queries(source: &str) -> Result<Vec<RetrievalQuery>, QueryError> {
    sexpr::read_all(source)?.iter().map(parse_form).collect()
}

/// Parse exactly one query.
pub fn parse_query(source: &str) -> Result<RetrievalQuery, QueryError> {
    parse_form(&sexpr::read_one(source)?)
}
