//! Indexed retrieval of demos aligned with a target along chosen dimensions.

mod index;
mod query;

use std::fmt::Write as _;

use serde::Serialize;

pub use index::{build_index, retrieve, AnnotationField, BuildError, DemoIndex, GRID_CELL};
pub use query::{
    parse_queries, parse_query, CamPoseFilter, ObjSpatFilter, ObjectFilter, QueryError, RetrievalQuery,
    DEFAULT_CAMPOSE_TOL, DEFAULT_OBJSPAT_EXTENT,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    /// Filter added at this stage.
    pub filter: &'static str,
    /// Matches of the conjunction of this and all earlier stages.
    pub count: usize,
}

/// Match counts as filters are conjoined in the fixed order object, campose,
/// objspat, color, motion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievalReport {
    /// Canonical query text with every default written out.
    pub query: String,
    pub records: usize,
    pub stages: Vec<Stage>,
    /// Records lacking an annotation needed by one of the query's filters.
    pub missing: Vec<(&'static str, usize)>,
}

impl RetrievalReport {
    pub fn final_count(&self) -> usize {
        self.stages.last().map_or(0, |s| s.count)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "query {}", self.query);
        let _ = writeln!(out, "records {}", self.records);
        for s in &self.stages {
            let _ = writeln!(out, "stage {:<8} {}", s.filter, s.count);
        }
        for (field, n) in &self.missing {
            let _ = writeln!(out, "missing {field} {n}");
        }
        out
    }
}

pub fn retrieval_report(index: &DemoIndex, query: &RetrievalQuery) -> RetrievalReport {
    let mut partial = RetrievalQuery::default();
    let mut stages = Vec::new();
    let mut missing = Vec::new();
    let mut note = |field: AnnotationField| {
        let n = index.missing_count(field);
        if n > 0 && !missing.iter().any(|(f, _)| *f == field.name()) {
            missing.push((field.name(), n));
        }
    };
    if let Some(o) = &query.object {
        partial.object = Some(o.clone());
        note(AnnotationField::TargetObject);
        stages.push(Stage {
            filter: "object",
            count: index.retrieve_indices(&partial).len(),
        });
    }
    if let Some(c) = &query.campose {
        partial.campose = Some(*c);
        stages.push(Stage {
            filter: "campose",
            count: index.retrieve_indices(&partial).len(),
        });
    }
    if let Some(s) = &query.objspat {
        partial.objspat = Some(*s);
        note(AnnotationField::ObjectPosition);
        stages.push(Stage {
            filter: "objspat",
            count: index.retrieve_indices(&partial).len(),
        });
    }
    if let Some(c) = &query.color {
        partial.color = Some(c.clone());
        note(AnnotationField::ObjectColor);
        stages.push(Stage {
            filter: "color",
            count: index.retrieve_indices(&partial).len(),
        });
    }
    if let Some(m) = &query.motion {
        partial.motion = Some(m.clone());
        note(AnnotationField::Primitives);
        stages.push(Stage {
            filter: "motion",
            count: index.retrieve_indices(&partial).len(),
        });
    }
    RetrievalReport {
        query: query.to_sexpr(),
        records: index.len(),
        stages,
        missing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metadata::synthetic::{random_query, SyntheticCorpus};
    use crate::metadata::DemoRecord;
    use crate::rng;

    /// Definitional scan straight over the records.
    fn oracle(records: &[DemoRecord], q: &RetrievalQuery) -> Vec<String> {
        records
            .iter()
            .filter(|r| {
                let a = r.annotations.clone().unwrap_or_default();
                let obj_ok = match &q.object {
                    None => true,
                    Some(ObjectFilter::Include(o)) => a.target_object.as_deref() == Some(o.as_str()),
                    Some(ObjectFilter::Exclude(o)) => a.target_object.as_ref().is_some_and(|x| x != o),
                };
                let cam_ok = q.campose.is_none_or(|c| {
                    (0..3).all(|i| {
                        let v = r.camera_extrinsics.pos[i];
                        c.pos[i] - c.tol[i] <= v && v <= c.pos[i] + c.tol[i]
                    })
                });
                let spat_ok = q.objspat.is_none_or(|s| {
                    a.object_position.is_some_and(|p| {
                        (0..3).all(|i| s.center[i] - s.extent[i] / 2.0 <= p[i] && p[i] <= s.center[i] + s.extent[i] / 2.0)
                    })
                });
                let color_ok = q.color.as_ref().is_none_or(|c| a.object_color.as_ref() == Some(c));
                let motion_ok = q.motion.as_ref().is_none_or(|m| {
                    a.primitives.as_ref().is_some_and(|p| m.iter().all(|x| p.contains(x)))
                });
                obj_ok && cam_ok && spat_ok && color_ok && motion_ok
            })
            .map(|r| r.id.clone())
            .collect()
    }

    #[test]
    fn empty_corpus() {
        let ix = build_index(&[]).unwrap();
        let q = parse_query("(query :color \"red\")").unwrap();
        assert!(ix.is_empty() && retrieve(&ix, &q).is_empty());
    }

    #[test]
    fn duplicate_ids() {
        let mut recs = SyntheticCorpus::default().generate(3, 1);
        recs[2].id = recs[0].id.clone();
        assert_eq!(build_index(&recs).unwrap_err(), BuildError::DuplicateId(recs[0].id.clone()));
    }

    #[test]
    fn oracle_equivalence() {
        let recs = SyntheticCorpus::default().generate(3000, 11);
        let ix = build_index(&recs).unwrap();
        let mut r = rng::stream(5, 0);
        for _ in 0..100 {
            let q = random_query(&mut r, &recs);
            let got: Vec<String> = retrieve(&ix, &q).into_iter().map(String::from).collect();
            assert_eq!(got, oracle(&recs, &q), "{}", q.to_sexpr());
            let report = retrieval_report(&ix, &q);
            assert!(report.stages.windows(2).all(|w| w[0].count >= w[1].count));
            assert_eq!(report.final_count(), got.len());
        }
    }

    #[test]
    fn camera_boundary_inclusive() {
        let mut recs = SyntheticCorpus::default().generate(2, 3);
        let target = [0.1, -0.3, 0.6];
        recs[0].camera_extrinsics.pos = [target[0] + 0.20, target[1], target[2]];
        recs[1].camera_extrinsics.pos = [target[0] + 0.201, target[1], target[2]];
        let ix = build_index(&recs).unwrap();
        let q = RetrievalQuery {
            campose: Some(CamPoseFilter::new(target)),
            ..Default::default()
        };
        assert_eq!(retrieve(&ix, &q), vec![recs[0].id.as_str()]);
    }

    #[test]
    fn cuboid_boundary_inclusive() {
        let mut recs = SyntheticCorpus::default().generate(2, 3);
        let c = [0.5, 0.0, 0.1];
        recs[0].annotations.as_mut().unwrap().object_position = Some([c[0], c[1], c[2] + 0.15]);
        recs[1].annotations.as_mut().unwrap().object_position = Some([c[0], c[1], c[2] + 0.151]);
        let ix = build_index(&recs).unwrap();
        let q = RetrievalQuery {
            objspat: Some(ObjSpatFilter::new(c)),
            ..Default::default()
        };
        assert_eq!(retrieve(&ix, &q), vec![recs[0].id.as_str()]);
    }

    #[test]
    fn missing_annotations_are_reported_not_matched() {
        let mut recs = SyntheticCorpus::default().generate(4, 9);
        recs[1].annotations.as_mut().unwrap().target_object = None;
        let obj = recs[0].target_object().unwrap().to_string();
        let ix = build_index(&recs).unwrap();
        assert_eq!(ix.missing_annotations(), vec![(recs[1].id.as_str(), AnnotationField::TargetObject)]);
        let q = RetrievalQuery {
            object: Some(ObjectFilter::Exclude(format!("not-{obj}"))),
            ..Default::default()
        };
        assert_eq!(retrieve(&ix, &q).len(), 3);
        let report = retrieval_report(&ix, &q);
        assert_eq!(report.missing, vec![("target_object", 1)]);
    }

    #[test]
    fn planted_matches_are_counted() {
        let corpus = SyntheticCorpus::default();
        let (recs, q) = corpus.generate_planted(2000, 120, 4);
        let ix = build_index(&recs).unwrap();
        let report = retrieval_report(&ix, &q);
        assert_eq!(report.final_count(), 120, "{}", report.to_text());
        assert_eq!(report.stages.len(), 4);
    }
}
