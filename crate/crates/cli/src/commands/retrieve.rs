use std::io::Write;

use dvc_core::retrieval::{build_index, parse_queries, retrieval_report};

use super::{load_records, output, read_text, triple};
use crate::args::{Format, RetrieveArgs};
use crate::failure::{Failure, Outcome, Tag};

pub fn run(a: RetrieveArgs) -> Outcome {
    let (source, origin) = match (&a.query, &a.query_text) {
        (Some(p), _) => (read_text(p)?, p.display().to_string()),
        (None, Some(t)) => (t.clone(), "--query-text".to_string()),
        (None, None) => return Err(Failure::usage("one of '--query' or '--query-text' is required")),
    };
    let mut queries = parse_queries(&source).tag_with("query", origin)?;
    let tol = triple(&a.campose_tol);
    let extent = triple(&a.objspat_extent);
    for (name, v) in [("--campose-tol", tol), ("--objspat-extent", extent)] {
        if let Some(v) = v {
            if v.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
                return Err(Failure::usage(format!(
                    "invalid value '{} {} {}' for '{name}': must be non-negative",
                    v[0], v[1], v[2]
                )));
            }
        }
    }
    for q in &mut queries {
        if let (Some(t), Some(f)) = (tol, q.campose.as_mut()) {
            f.tol = t;
        }
        if let (Some(e), Some(f)) = (extent, q.objspat.as_mut()) {
            f.extent = e;
        }
    }

    let records = load_records(&a.corpus)?;
    let index = build_index(&records).tag("index")?;
    let mut out = output(None)?;
    let many = queries.len() > 1;
    match (a.report, a.format) {
        (true, Format::Text) => {
            for (i, q) in queries.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                write!(out, "{}", retrieval_report(&index, q).to_text())?;
            }
        }
        (true, Format::Json) => {
            let reports: Vec<_> = queries.iter().map(|q| retrieval_report(&index, q)).collect();
            let v = if many { serde_json::to_value(&reports) } else { serde_json::to_value(&reports[0]) };
            writeln!(out, "{}", serde_json::to_string_pretty(&v.tag("io")?).tag("io")?)?;
        }
        (false, Format::Text) => {
            for (i, q) in queries.iter().enumerate() {
                if many {
                    writeln!(out, "# {}", q.to_sexpr())?;
                }
                for id in index.retrieve(q) {
                    writeln!(out, "{id}")?;
                }
                if many && i + 1 < queries.len() {
                    writeln!(out)?;
                }
            }
        }
        (false, Format::Json) => {
            let all: Vec<_> = queries
                .iter()
                .map(|q| serde_json::json!({ "query": q.to_sexpr(), "ids": index.retrieve(q) }))
                .collect();
            let v = if many { serde_json::Value::Array(all) } else { all.into_iter().next().unwrap_or_default() };
            writeln!(out, "{}", serde_json::to_string_pretty(&v).tag("io")?)?;
        }
    }
    out.flush()?;
    Ok(())
}
