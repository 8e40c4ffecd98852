use std::fmt::Write as _;

use super::*;
use crate::sexpr::{number, quote};

/// Canonical `.mlspec` text. Field order, spacing and number formatting are
/// fixed, so specs that differ only in layout serialize to identical bytes.
pub fn serialize(spec: &TaskSpec) -> String {
    let mut out = String::new();
    // writes into a String cannot fail
    let _ = write_spec(&mut out, spec);
    out
}

fn write_spec(out: &mut String, spec: &TaskSpec) -> std::fmt::Result {
    writeln!(out, "(task :name {} :lab {}", quote(&spec.name), quote(&spec.lab))?;
    writeln!(out, "  :goal {}", goal(&spec.goal))?;
    writeln!(out, "  :object {}", quote(&spec.object_name))?;
    writeln!(out, "  :object-texture {}", texture(&spec.object_texture))?;
    writeln!(out, "  :object-region {}", region(&spec.object_region))?;
    if let Some(name) = &spec.receptacle_name {
        writeln!(out, "  :receptacle {}", quote(name))?;
    }
    if let Some(r) = &spec.receptacle_region {
        writeln!(out, "  :receptacle-region {}", region(r))?;
    }
    writeln!(out, "  :camera {}", camera(&spec.camera_range))?;
    writeln!(out, "  :table-texture {}", texture(&spec.table_texture))?;
    writeln!(out, "  :instruction {})", quote(&spec.instruction))
}

pub(crate) fn primitive(p: &Primitive) -> String {
    match p {
        Primitive::Custom(label) => format!("(custom {})", quote(label)),
        other => other.label().to_string(),
    }
}

fn goal(g: &PredicateSequence) -> String {
    let mut s = String::from("(sequence");
    for p in &g.primitives {
        s.push(' ');
        s.push_str(&primitive(p));
    }
    s.push(')');
    s
}

fn region(r: &SpatialRegion) -> String {
    let boxes: Vec<String> = r
        .boxes
        .iter()
        .map(|b| {
            format!(
                "(bbox {} {} {} {})",
                number(b.x0),
                number(b.y0),
                number(b.x1),
                number(b.y1)
            )
        })
        .collect();
    format!("(union {})", boxes.join(" "))
}

fn camera(c: &CameraPoseRange) -> String {
    let ranges: Vec<String> = c
        .ranges
        .iter()
        .map(|s| {
            format!(
                "(sph :r {} {} :theta {} {} :phi {} {})",
                number(s.r_min),
                number(s.r_max),
                number(s.theta_min),
                number(s.theta_max),
                number(s.phi_min),
                number(s.phi_max)
            )
        })
        .collect();
    format!("(union {})", ranges.join(" "))
}

fn texture(t: &TextureSpec) -> String {
    let head = match (&t.mode, &t.base_name) {
        (TextureMode::Jitter, Some(base)) => format!("jitter :base {}", quote(base)),
        (TextureMode::Jitter, None) => "jitter".to_string(),
        (TextureMode::Fractal, _) => "fractal".to_string(),
    };
    format!(
        "({head} :h {} {} :s {} {} :v {} {})",
        number(t.h_min),
        number(t.h_max),
        number(t.s_min),
        number(t.s_max),
        number(t.v_min),
        number(t.v_max)
    )
}
