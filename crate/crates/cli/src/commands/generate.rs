use std::fs::File;
use std::io::{BufWriter, Write};

use dvc_core::genkit::{
    decompose, default_labs, enumerate_instances, fractal_texture, jitter_anchors, synthesize_demo, LabConfig,
};
use dvc_core::metadata::write_records;
use dvc_core::taskspec::{parse, Primitive};

use super::{load_records, output, read_text};
use crate::args::{Format, GenCmd, SynthArgs, TextureField};
use crate::failure::{Failure, Outcome, Tag};

pub fn run(cmd: GenCmd) -> Outcome {
    match cmd {
        GenCmd::Instances { labs, list, format } => instances(labs, list, format),
        GenCmd::Texture {
            spec,
            field,
            width,
            height,
            seed,
            out,
            ppm,
        } => {
            let spec = parse(&read_text(&spec)?).tag_with("spec", spec.display())?;
            let tex = match field {
                TextureField::Object => &spec.object_texture,
                TextureField::Table => &spec.table_texture,
            };
            let raster = fractal_texture(tex, width, height, seed).tag("texture")?;
            let create = |p: &std::path::Path| File::create(p).tag_with("io", format!("cannot create {}", p.display()));
            raster.write_raw(BufWriter::new(create(&out)?))?;
            if let Some(p) = &ppm {
                raster.write_ppm(BufWriter::new(create(p)?))?;
            }
            println!("wrote {width}x{height} texture (seed {seed}) to {}", out.display());
            Ok(())
        }
        GenCmd::Synth(a) => synth(a),
    }
}

fn instances(labs: Option<std::path::PathBuf>, list: bool, format: Format) -> Outcome {
    let labs: Vec<LabConfig> = match &labs {
        Some(p) => serde_json::from_str(&read_text(p)?).tag_with("config", p.display())?,
        None => default_labs(),
    };
    let e = enumerate_instances(&labs).tag("config")?;
    let mut out = output(None)?;
    match format {
        Format::Json => {
            let value = if list {
                serde_json::json!({ "labs": e.labs, "total_base": e.total_base, "total_varied": e.total_varied, "instances": e.base })
            } else {
                serde_json::json!({ "labs": e.labs, "total_base": e.total_base, "total_varied": e.total_varied })
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&value).tag("io")?)?;
        }
        Format::Text => {
            for (lab, counts) in labs.iter().zip(&e.labs) {
                let per: Vec<String> = counts.per_template.iter().map(|(t, n)| format!("{t}={n}")).collect();
                writeln!(
                    out,
                    "{} {} base={} varied={} ({} camera bins x {} spatial)",
                    counts.lab,
                    per.join(" "),
                    counts.base,
                    counts.varied,
                    lab.camera_bins.len(),
                    lab.spatial_combinations
                )?;
            }
            writeln!(out, "total_base {}", e.total_base)?;
            writeln!(out, "total_varied {}", e.total_varied)?;
            if list {
                for d in &e.base {
                    writeln!(out, "{}\t{}\t{}", d.lab, d.template, d.instruction)?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn synth(a: SynthArgs) -> Outcome {
    if a.bridge_step.is_nan() || a.bridge_step <= 0.0 {
        return Err(Failure::usage(format!("invalid value '{}' for '--bridge-step': must be positive", a.bridge_step)));
    }
    let records = load_records(&a.demos)?;
    let source = match &a.id {
        Some(id) => records
            .iter()
            .find(|r| &r.id == id)
            .ok_or_else(|| Failure::domain("synth", format!("no demo with id `{id}`")))?,
        None => records
            .first()
            .ok_or_else(|| Failure::domain("synth", "record file is empty"))?,
    };
    let goal: Vec<Primitive> = a
        .goal
        .split_whitespace()
        .map(|s| {
            Primitive::from_symbol(s)
                .ok_or_else(|| Failure::usage(format!("invalid value '{s}' for '--goal': unknown primitive")))
        })
        .collect::<Result<_, _>>()?;
    let segments = decompose(source, &goal).tag("synth")?;
    let mut demos = Vec::new();
    for i in 0..a.count {
        let anchors = jitter_anchors(&segments, a.translate, a.yaw, a.seed, i);
        let id = format!("{}-syn-{}-{i}", source.id, a.seed);
        demos.push(synthesize_demo(source, &segments, &anchors, a.bridge_step, id).tag("synth")?);
    }
    let mut out = output(a.out.as_ref())?;
    write_records(&mut out, &demos)?;
    Ok(())
}
