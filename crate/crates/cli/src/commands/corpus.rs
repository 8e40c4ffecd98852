use std::collections::HashMap;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use dvc_core::dvalgebra::{self, profile_dataset, DatasetProfile, Dv, ProfileConfig, DEFAULT_RHO};
use dvc_core::metadata::{
    write_records, Annotator, BinTable, ColorAnnotator, HttpColorAnnotator, OfflineColorTable, WordVectors,
};

use super::{load_records, output, read_text, triple};
use crate::args::{AnnotateArgs, ClassifyArgs, Format, IngestArgs, ProfileArgs, ProfileOpts};
use crate::failure::{Failure, Outcome, Tag};

pub fn ingest_cmd(a: IngestArgs) -> Outcome {
    let records = load_records(&a.file)?;
    let steps: usize = records.iter().map(|r| r.steps.len()).sum();
    let annotated = records.iter().filter(|r| r.annotations.is_some()).count();
    if let Some(p) = &a.out {
        write_records(output(Some(p))?, &records)?;
    }
    println!("{} records, {steps} steps, {annotated} annotated", records.len());
    Ok(())
}

pub fn annotate(a: AnnotateArgs) -> Outcome {
    let mut annotator = Annotator::default();
    if let Some(p) = &a.bins {
        annotator.bins = BinTable::from_json(&read_text(p)?).tag_with("config", p.display())?;
    }
    if let Some(c) = triple(&a.table_center) {
        annotator.table_center = c;
    }
    if let Some(p) = &a.vectors {
        annotator.embeddings = Arc::new(WordVectors::from_tsv(&read_text(p)?).tag_with("config", p.display())?);
    }
    if let Some(cut) = a.cluster_cut {
        if !(cut >= 0.0 && cut.is_finite()) {
            return Err(Failure::usage(format!("invalid value '{cut}' for '--cluster-cut': must be non-negative")));
        }
        annotator.cluster_cut = cut;
    }
    let colors: Option<Arc<dyn ColorAnnotator>> = match &a.colors {
        Some(p) => {
            let table: HashMap<String, String> = serde_json::from_str(&read_text(p)?).tag_with("config", p.display())?;
            Some(Arc::new(OfflineColorTable::new(table)))
        }
        None => HttpColorAnnotator::from_env().map(|h| Arc::new(h) as Arc<dyn ColorAnnotator>),
    };
    annotator.colors = colors;

    let mut records = load_records(&a.file)?;
    let issues = annotator.annotate_all(&mut records);
    write_records(output(a.out.as_ref())?, &records)?;
    for (i, issue) in &issues {
        eprintln!("{}: {issue}", records[*i].id);
    }
    let c = annotator.table_center;
    eprintln!(
        "annotated {} records, {} issues (table center {} {} {}, cluster cut {}, {} camera bins, colors {})",
        records.len(),
        issues.len(),
        c[0],
        c[1],
        c[2],
        annotator.cluster_cut,
        annotator.bins.bins.len(),
        if annotator.colors.is_some() { "on" } else { "off" }
    );
    Ok(())
}

fn profile_config(opts: &ProfileOpts) -> Result<ProfileConfig, Failure> {
    let mut config = ProfileConfig::default();
    if let Some(cell) = opts.cell {
        if !(cell > 0.0 && cell.is_finite()) {
            return Err(Failure::usage(format!("invalid value '{cell}' for '--cell': must be positive")));
        }
        config.spatial_cell = cell;
    }
    if let Some(cell) = opts.angular_cell {
        if !(cell > 0.0 && cell.is_finite()) {
            return Err(Failure::usage(format!("invalid value '{cell}' for '--angular-cell': must be positive")));
        }
        config.angular_cell_deg = cell;
    }
    if let Some(c) = triple(&opts.table_center) {
        config.table_center = c;
    }
    Ok(config)
}

/// A `.json` file is read as a saved profile, anything else as records.
fn load_profile(path: &Path, config: &ProfileConfig) -> Result<DatasetProfile, Failure> {
    if path.extension().is_some_and(|e| e == "json") {
        return DatasetProfile::from_json(&read_text(path)?).tag_with("profile", path.display());
    }
    let records = load_records(path)?;
    profile_dataset(&records, config).tag_with("profile", path.display())
}

pub fn profile(a: ProfileArgs) -> Outcome {
    let config = profile_config(&a.opts)?;
    let p = load_profile(&a.file, &config)?;
    let mut out = output(None)?;
    match a.format {
        Format::Json => writeln!(out, "{}", p.to_json())?,
        Format::Text => write!(out, "{}", p.report())?,
    }
    out.flush()?;
    Ok(())
}

pub fn classify(a: ClassifyArgs) -> Outcome {
    let dv = Dv::from_name(&a.dv).ok_or_else(|| {
        let names: Vec<&str> = Dv::ALL.iter().map(|d| d.name()).collect();
        Failure::usage(format!("invalid value '{}' for '--dv': expected one of {}", a.dv, names.join(", ")))
    })?;
    let rho = a.rho.unwrap_or(DEFAULT_RHO);
    if !(rho > 1.0 && rho.is_finite()) {
        return Err(Failure::usage(format!("invalid value '{rho}' for '--rho': must be greater than 1")));
    }
    if a.angular && dv != Dv::CamPose {
        return Err(Failure::usage(format!("'--angular' only applies to camPose, not {}", dv.name())));
    }
    let config = profile_config(&a.opts)?;
    let target = load_profile(&a.target, &config)?;
    let cotrain = load_profile(&a.cotrain, &config)?;
    let (t, c) = if a.angular {
        (&target.campose_angles, &cotrain.campose_angles)
    } else {
        (target.support(dv), cotrain.support(dv))
    };
    let result = dvalgebra::classify(t, c, rho).tag("classify")?;
    let mut out = output(None)?;
    match a.format {
        Format::Json => {
            let v = serde_json::json!({
                "dv": dv.name(),
                "angular": a.angular,
                "case": result.label.number(),
                "result": result,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).tag("io")?)?;
        }
        Format::Text => {
            writeln!(out, "dv {}{}", dv.name(), if a.angular { " (angular)" } else { "" })?;
            writeln!(out, "rho {rho}")?;
            writeln!(out, "target_size {:.6}", result.target_size)?;
            writeln!(out, "cotrain_size {:.6}", result.cotrain_size)?;
            writeln!(out, "diverse {}", result.diverse)?;
            writeln!(out, "aligned {}", result.aligned)?;
            writeln!(out, "case {} {}", result.label.number(), result.label)?;
        }
    }
    out.flush()?;
    Ok(())
}
