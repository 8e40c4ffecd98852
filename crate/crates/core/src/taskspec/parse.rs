use super::*;
use crate::sexpr::{self, numeric_groups, Fields, Pos, Sexp};

const TASK_FIELDS: &[&str] = &[
    "name",
    "lab",
    "goal",
    "object",
    "object-texture",
    "object-region",
    "receptacle",
    "receptacle-region",
    "camera",
    "table-texture",
    "instruction",
];

fn range_err(field: &str, pos: Pos, reason: impl Into<String>) -> SpecError {
    SpecError::Range {
        field: field.to_string(),
        line: pos.line,
        col: pos.col,
        reason: reason.into(),
    }
}

/// Parse one `(task ...)` form from `.mlspec` source text.
pub fn parse(source: &str) -> Result<TaskSpec, SpecError> {
    let form = sexpr::read_one(source)?;
    let items = form.as_form("task")?;
    let fields = Fields::parse(items, form.pos(), TASK_FIELDS)?;

    let name_sexp = fields.require("name")?;
    let name = name_sexp.as_str()?.to_string();
    if name.is_empty() {
        return Err(range_err("name", name_sexp.pos(), "task name is empty"));
    }
    let lab = fields.require("lab")?.as_str()?.to_string();
    let goal = parse_goal(fields.require("goal")?)?;
    let object_name = fields.require("object")?.as_str()?.to_string();
    let object_texture = parse_texture(fields.require("object-texture")?, "object_texture")?;
    let object_region = parse_region(fields.require("object-region")?, "object_region")?;

    let receptacle_name = fields
        .get("receptacle")
        .map(|s| s.as_str().map(str::to_string))
        .transpose()?;
    let receptacle_region = fields
        .get("receptacle-region")
        .map(|s| parse_region(s, "receptacle_region"))
        .transpose()?;

    let camera_range = parse_camera(fields.require("camera")?)?;
    let table_texture = parse_texture(fields.require("table-texture")?, "table_texture")?;
    let instruction = fields.require("instruction")?.as_str()?.to_string();

    Ok(TaskSpec {
        name,
        lab,
        goal,
        object_name,
        object_texture,
        object_region,
        receptacle_name,
        receptacle_region,
        camera_range,
        table_texture,
        instruction,
    })
}

pub(crate) fn parse_primitive(item: &Sexp) -> Result<Primitive, SpecError> {
    match item {
        Sexp::Symbol(s, pos) => Primitive::from_symbol(s).ok_or_else(|| {
            SpecError::Syntax(SyntaxError::at(
                *pos,
                format!("unknown primitive `{s}`; use (custom \"...\") for other labels"),
            ))
        }),
        Sexp::List(..) => {
            let rest = item.as_form("custom")?;
            let [label] = rest else {
                return Err(SyntaxError::at(item.pos(), "`custom` takes exactly one string").into());
            };
            let text = label.as_str()?;
            if text.is_empty() {
                return Err(range_err("goal", label.pos(), "custom primitive label is empty"));
            }
            Ok(Primitive::Custom(text.to_string()))
        }
        other => Err(SyntaxError::at(
            other.pos(),
            format!("expected primitive, found {}", other.describe()),
        )
        .into()),
    }
}

fn parse_goal(sexp: &Sexp) -> Result<PredicateSequence, SpecError> {
    let items = sexp.as_form("sequence")?;
    if items.is_empty() {
        return Err(range_err("goal", sexp.pos(), "goal sequence is empty"));
    }
    let primitives = items.iter().map(parse_primitive).collect::<Result<_, _>>()?;
    Ok(PredicateSequence { primitives })
}

/// `(union (bbox ...) ...)` or a bare `(bbox ...)`.
fn parse_region(sexp: &Sexp, field: &str) -> Result<SpatialRegion, SpecError> {
    let members: Vec<&Sexp> = if sexp.head() == Some("union") {
        sexp.as_form("union")?.iter().collect()
    } else {
        vec![sexp]
    };
    if members.is_empty() {
        return Err(range_err(field, sexp.pos(), "region union is empty"));
    }
    let mut boxes = Vec::with_capacity(members.len());
    for m in members {
        let nums = m.as_form("bbox")?;
        if nums.len() != 4 {
            return Err(SyntaxError::at(
                m.pos(),
                format!("`bbox` takes 4 numbers (x0 y0 x1 y1), found {}", nums.len()),
            )
            .into());
        }
        let v: Vec<f64> = nums.iter().map(Sexp::as_number).collect::<Result<_, _>>()?;
        let b = RegionBox {
            x0: v[0],
            y0: v[1],
            x1: v[2],
            y1: v[3],
        };
        if !b.is_valid() {
            return Err(range_err(
                field,
                m.pos(),
                format!("box requires x0 <= x1 and y0 <= y1, got ({} {} {} {})", b.x0, b.y0, b.x1, b.y1),
            ));
        }
        boxes.push(b);
    }
    Ok(SpatialRegion { boxes })
}

fn parse_camera(sexp: &Sexp) -> Result<CameraPoseRange, SpecError> {
    let members: Vec<&Sexp> = if sexp.head() == Some("union") {
        sexp.as_form("union")?.iter().collect()
    } else {
        vec![sexp]
    };
    if members.is_empty() {
        return Err(range_err("camera", sexp.pos(), "camera union is empty"));
    }
    let mut ranges = Vec::with_capacity(members.len());
    for m in members {
        let items = m.as_form("sph")?;
        let groups = numeric_groups(items, m.pos(), &[("r", 2), ("theta", 2), ("phi", 2)])?;
        let get = |k: &str| {
            groups
                .iter()
                .find(|(key, _, _)| *key == k)
                .map(|(_, v, p)| (v[0], v[1], *p))
                .expect("numeric_groups checks presence")
        };
        let (r_min, r_max, rp) = get("r");
        let (theta_min, theta_max, tp) = get("theta");
        let (phi_min, phi_max, pp) = get("phi");
        if !(r_min > 0.0 && r_min <= r_max && r_max.is_finite()) {
            return Err(range_err("camera", rp, format!("radius needs 0 < r_min <= r_max, got {r_min} {r_max}")));
        }
        if !(0.0 <= theta_min && theta_min <= theta_max && theta_max <= 90.0) {
            return Err(range_err(
                "camera",
                tp,
                format!("polar angle needs 0 <= min <= max <= 90, got {theta_min} {theta_max}"),
            ));
        }
        if !(-180.0 <= phi_min && phi_min <= phi_max && phi_max <= 180.0) {
            return Err(range_err(
                "camera",
                pp,
                format!("azimuth needs -180 <= min <= max <= 180, got {phi_min} {phi_max}"),
            ));
        }
        ranges.push(SphericalRange {
            r_min,
            r_max,
            theta_min,
            theta_max,
            phi_min,
            phi_max,
        });
    }
    Ok(CameraPoseRange { ranges })
}

fn parse_texture(sexp: &Sexp, field: &str) -> Result<TextureSpec, SpecError> {
    let items = sexp.as_list()?;
    let (mode, rest) = match items.first() {
        Some(Sexp::Symbol(s, _)) if s == "fractal" => (TextureMode::Fractal, &items[1..]),
        Some(Sexp::Symbol(s, _)) if s == "jitter" => (TextureMode::Jitter, &items[1..]),
        Some(other) => {
            return Err(SyntaxError::at(other.pos(), "expected `(fractal ...)` or `(jitter ...)`").into())
        }
        None => return Err(SyntaxError::at(sexp.pos(), "empty texture form").into()),
    };

    let (base_name, rest) = match mode {
        TextureMode::Jitter => match rest {
            [Sexp::Keyword(k, _), Sexp::Str(base, bpos), tail @ ..] if k == "base" => {
                if base.is_empty() {
                    return Err(range_err(field, *bpos, "jitter base texture name is empty"));
                }
                (Some(base.clone()), tail)
            }
            _ => {
                return Err(range_err(
                    field,
                    sexp.pos(),
                    "jitter texture requires `:base \"name\"` as its first field",
                ))
            }
        },
        TextureMode::Fractal => (None, rest),
    };

    let groups = numeric_groups(rest, sexp.pos(), &[("h", 2), ("s", 2), ("v", 2)])?;
    let get = |k: &str| {
        groups
            .iter()
            .find(|(key, _, _)| *key == k)
            .map(|(_, v, p)| (v[0], v[1], *p))
            .expect("numeric_groups checks presence")
    };
    let (h_min, h_max, hp) = get("h");
    let (s_min, s_max, sp) = get("s");
    let (v_min, v_max, vp) = get("v");

    match mode {
        TextureMode::Fractal => {
            let unit_hue = |h: f64| (0.0..1.0).contains(&h);
            if !(unit_hue(h_min) && unit_hue(h_max)) {
                return Err(range_err(field, hp, format!("hue bounds must lie in [0,1), got {h_min} {h_max}")));
            }
            for (lo, hi, p, ch) in [(s_min, s_max, sp, "saturation"), (v_min, v_max, vp, "value")] {
                if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                    return Err(range_err(field, p, format!("{ch} needs 0 <= min <= max <= 1, got {lo} {hi}")));
                }
            }
        }
        TextureMode::Jitter => {
            if !(-0.5 <= h_min && h_min <= h_max && h_max <= 0.5) {
                return Err(range_err(
                    field,
                    hp,
                    format!("hue jitter needs -0.5 <= min <= max <= 0.5, got {h_min} {h_max}"),
                ));
            }
            for (lo, hi, p, ch) in [(s_min, s_max, sp, "saturation"), (v_min, v_max, vp, "value")] {
                if !(-1.0 <= lo && lo <= hi && hi <= 1.0) {
                    return Err(range_err(
                        field,
                        p,
                        format!("{ch} jitter needs -1 <= min <= max <= 1, got {lo} {hi}"),
                    ));
                }
            }
        }
    }

    Ok(TextureSpec {
        mode,
        base_name,
        h_min,
        h_max,
        s_min,
        s_max,
        v_min,
        v_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const BIN_CARROT: &str = r#"
(task :name "bin-carrot" :lab "lab3"
  :goal (sequence pick placeBin)
  :object "carrot"
  :object-texture (fractal :h 0.00 0.08 :s 0.60 1.00 :v 0.40 1.00)
  :object-region (union (bbox -0.30 -0.10 -0.10 0.10))
  :receptacle "bin"
  :receptacle-region (union (bbox 0.10 -0.10 0.30 0.10))
  :camera (union (sph :r 0.80 1.00 :theta 37.5 52.5 :phi -15 15))
  :table-texture (jitter :base "wood" :h -0.02 0.02 :s -0.10 0.10 :v -0.10 0.10)
  :instruction "pick the carrot and place it in the bin")
"#;

    fn with_region(region: &str) -> String {
        BIN_CARROT.replace("(union (bbox -0.30 -0.10 -0.10 0.10))", region)
    }

    #[test]
    fn parses_reference_spec() {
        let spec = parse(BIN_CARROT).unwrap();
        assert_eq!(spec.name, "bin-carrot");
        assert_eq!(spec.goal.primitives, vec![Primitive::Pick, Primitive::PlaceBin]);
        assert_eq!(spec.receptacle_name.as_deref(), Some("bin"));
        assert_eq!(spec.camera_range.ranges[0].theta_max, 52.5);
        assert_eq!(spec.table_texture.base_name.as_deref(), Some("wood"));
        assert_eq!(spec.table_texture.h_min, -0.02);
    }

    #[test]
    fn bare_bbox_is_a_single_box_region() {
        let spec = parse(&with_region("(bbox -0.10 -0.10 0.10 0.10)")).unwrap();
        assert_eq!(spec.object_region.boxes.len(), 1);
        let b = spec.object_region.boxes[0];
        assert!(((b.x1 - b.x0) - 0.20).abs() < 1e-12);
        assert!(((b.y1 - b.y0) - 0.20).abs() < 1e-12);
    }

    #[test]
    fn inverted_box_is_a_range_error() {
        let err = parse(&with_region("(bbox 0.10 0.0 -0.10 0.0)")).unwrap_err();
        match err {
            SpecError::Range { field, .. } => assert_eq!(field, "object_region"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_input_is_syntax_error_on_line_one() {
        let err = parse("").unwrap_err();
        assert!(matches!(err, SpecError::Syntax(SyntaxError { line: 1, .. })));
    }

    #[test]
    fn missing_field_and_unknown_field() {
        let err = parse(&BIN_CARROT.replace(":lab \"lab3\"", "")).unwrap_err();
        assert!(err.to_string().contains(":lab"), "{err}");
        let err = parse(&BIN_CARROT.replace(":lab \"lab3\"", ":lab \"lab3\" :color 3")).unwrap_err();
        assert!(err.to_string().contains("unknown field"), "{err}");
    }

    #[test]
    fn unknown_primitive_points_at_symbol() {
        let err = parse(&BIN_CARROT.replace("placeBin", "teleport")).unwrap_err();
        let (line, col) = err.position();
        assert_eq!(line, 3);
        assert_eq!(col, 24);
    }

    #[test]
    fn custom_primitive() {
        let spec = parse(&BIN_CARROT.replace("placeBin", "(custom \"turn on\")")).unwrap();
        assert_eq!(spec.goal.primitives[1], Primitive::Custom("turn on".into()));
        assert!(parse(&BIN_CARROT.replace("placeBin", "(custom \"\")")).is_err());
    }

    #[test]
    fn camera_bounds_are_checked() {
        for bad in [":r 0 1.0", ":r 1.2 1.0"] {
            let src = BIN_CARROT.replace(":r 0.80 1.00", bad);
            assert!(matches!(parse(&src), Err(SpecError::Range { .. })), "{bad}");
        }
        let src = BIN_CARROT.replace(":theta 37.5 52.5", ":theta 80 95");
        assert!(matches!(parse(&src), Err(SpecError::Range { .. })));
        let src = BIN_CARROT.replace(":phi -15 15", ":phi -190 15");
        assert!(matches!(parse(&src), Err(SpecError::Range { .. })));
    }

    #[test]
    fn texture_bounds_are_checked() {
        let src = BIN_CARROT.replace(":s 0.60 1.00", ":s 0.9 0.2");
        assert!(matches!(parse(&src), Err(SpecError::Range { ref field, .. }) if field == "object_texture"));
        let src = BIN_CARROT.replace(":h 0.00 0.08", ":h 0.95 0.05");
        assert!(parse(&src).unwrap().object_texture.hue_wraps());
        let src = BIN_CARROT.replace(":h 0.00 0.08", ":h 0.5 1.0");
        assert!(parse(&src).is_err());
        let src = BIN_CARROT.replace("(jitter :base \"wood\"", "(jitter");
        assert!(matches!(parse(&src), Err(SpecError::Range { ref field, .. }) if field == "table_texture"));
    }

    #[test]
    fn receptacle_is_optional() {
        let src = BIN_CARROT
            .replace(":receptacle \"bin\"", "")
            .replace(":receptacle-region (union (bbox 0.10 -0.10 0.30 0.10))", "");
        let spec = parse(&src).unwrap();
        assert!(spec.receptacle_name.is_none() && spec.receptacle_region.is_none());
    }
}
