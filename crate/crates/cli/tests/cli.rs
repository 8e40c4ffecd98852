//! End-to-end runs of the `dvc` binary against checked-in fixtures.
//!
//! Report outputs are compared with files under `golden/`. Set
//! `DVC_UPDATE_GOLDEN=1` to rewrite them after an intended change.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn dvc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dvc"))
        .args(args)
        .current_dir(fixtures())
        .env_remove("DVC_ANNOTATOR_URL")
        .output()
        .expect("spawn dvc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[track_caller]
fn ok(args: &[&str]) -> String {
    let o = dvc(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}\nstderr: {}", stderr(&o));
    stdout(&o)
}

#[track_caller]
fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("DVC_UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden file {name} differs");
}

#[test]
fn spec_validate_good_file() {
    assert_eq!(ok(&["spec", "validate", "good.mlspec"]), "ok good.mlspec (bin-carrot)\n");
}

#[test]
fn spec_validate_reports_position_and_fails() {
    let o = dvc(&["spec", "validate", "good.mlspec", "bad.mlspec"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("bad.mlspec: range error in `receptacle_region` at 8:"), "{err}");
    assert!(err.contains("error[spec]: 1 of 2 files invalid"), "{err}");
}

#[test]
fn spec_fmt_is_a_fixed_point() {
    let once = ok(&["spec", "fmt", "good.mlspec"]);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("canon.mlspec");
    fs::write(&p, &once).unwrap();
    assert_eq!(ok(&["spec", "fmt", p.to_str().unwrap()]), once);
    golden("spec_fmt.txt", &once);
}

#[test]
fn spec_sample_is_seeded() {
    let a = ok(&["spec", "sample", "good.mlspec", "--seed", "3", "--count", "4"]);
    assert_eq!(a, ok(&["spec", "sample", "good.mlspec", "--seed", "3", "--count", "4"]));
    assert_ne!(a, ok(&["spec", "sample", "good.mlspec", "--seed", "4", "--count", "4"]));
    assert_eq!(a.lines().count(), 4);
    let first: serde_json::Value = serde_json::from_str(a.lines().next().unwrap()).unwrap();
    assert_eq!(first["spec_name"], "bin-carrot");
}

#[test]
fn seed_is_required_for_randomized_commands() {
    for args in [
        &["spec", "sample", "good.mlspec"][..],
        &["gen", "texture", "--spec", "good.mlspec", "--out", "x"],
        &["gen", "synth", "--demos", "raw.jsonl", "--goal", "pick place"],
        &["sample-batches", "--target", "target.ids", "--cotrain", "cotrain.ids"],
    ] {
        let o = dvc(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains("--seed"), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn gen_instances_counts() {
    let out = ok(&["gen", "instances"]);
    assert!(out.contains("total_varied 3600\n"), "{out}");
    golden("gen_instances.txt", &out);
}

#[test]
fn gen_texture_is_seeded_and_in_range() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.hsvr");
    let b = dir.path().join("b.hsvr");
    let ppm = dir.path().join("a.ppm");
    for (p, extra) in [(&a, Some(&ppm)), (&b, None)] {
        let mut args = vec!["gen", "texture", "--spec", "good.mlspec", "--seed", "9", "--width", "16", "--height", "8"];
        args.extend(["--out", p.to_str().unwrap()]);
        if let Some(x) = extra {
            args.extend(["--ppm", x.to_str().unwrap()]);
        }
        ok(&args);
    }
    let raw = fs::read(&a).unwrap();
    assert_eq!(raw, fs::read(&b).unwrap());
    assert_eq!(&raw[..4], b"HSVR");
    assert_eq!(raw.len(), 4 + 8 + 16 * 8 * 12);
    assert!(fs::read(&ppm).unwrap().starts_with(b"P6\n16 8\n255\n"));
}

#[test]
fn gen_synth_round_trips_through_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("syn.jsonl");
    let args = ["gen", "synth", "--demos", "raw.jsonl", "--goal", "pick place", "--seed", "5", "--count", "3"];
    let mut with_out = args.to_vec();
    with_out.extend(["--out", out.to_str().unwrap()]);
    ok(&with_out);
    assert_eq!(ok(&args), fs::read_to_string(&out).unwrap());
    assert!(ok(&["ingest", out.to_str().unwrap()]).starts_with("3 records"));
}

#[test]
fn gen_synth_rejects_goal_mismatch() {
    let o = dvc(&["gen", "synth", "--demos", "raw.jsonl", "--goal", "pick", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[synth]:"), "{}", stderr(&o));
}

#[test]
fn ingest_reports_size() {
    assert_eq!(ok(&["ingest", "raw.jsonl"]), "20 records, 800 steps, 0 annotated\n");
}

#[test]
fn ingest_rejects_bad_line_with_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.jsonl");
    let mut text = fs::read_to_string(fixtures().join("raw.jsonl")).unwrap();
    text.push_str("{\"id\": 3}\n");
    fs::write(&p, text).unwrap();
    let o = dvc(&["ingest", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("21"), "{}", stderr(&o));
}

#[test]
fn annotate_with_offline_colors() {
    let o = dvc(&["annotate", "raw.jsonl", "--colors", "colors.json"]);
    assert_eq!(o.status.code(), Some(0));
    let err = stderr(&o);
    assert!(err.contains("annotated 20 records, 0 issues"), "{err}");
    assert!(err.contains("cluster cut 0.35"), "{err}");
    let out = stdout(&o);
    let first: serde_json::Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
    assert_eq!(first["annotations"]["target_object"], "mug");
    assert_eq!(first["annotations"]["object_color"], "red");
    assert_eq!(first["annotations"]["camera_bin"], "agent-front");
    golden("annotate.jsonl", &out);
}

#[test]
fn profile_report() {
    golden("profile.txt", &ok(&["profile", "corpus.jsonl"]));
    let json = ok(&["profile", "corpus.jsonl", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["demo_count"], 20);
}

#[test]
fn classify_constructed_pair() {
    let out = ok(&[
        "classify", "--target", "target_10cm.jsonl", "--cotrain", "cotrain_50cm.jsonl", "--dv", "objSpat", "--rho", "5",
    ]);
    assert!(out.ends_with("case 3 diverse_aligned\n"), "{out}");
    golden("classify_objspat.txt", &out);
}

#[test]
fn classify_accepts_saved_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    let c = dir.path().join("c.json");
    fs::write(&t, ok(&["profile", "target_10cm.jsonl", "--format", "json"])).unwrap();
    fs::write(&c, ok(&["profile", "cotrain_50cm.jsonl", "--format", "json"])).unwrap();
    let out = ok(&[
        "classify", "--target", t.to_str().unwrap(), "--cotrain", c.to_str().unwrap(), "--dv", "objSpat",
    ]);
    assert!(out.ends_with("case 3 diverse_aligned\n"), "{out}");
    // reversed roles: the narrow set cannot cover the wide one
    let out = ok(&[
        "classify", "--target", c.to_str().unwrap(), "--cotrain", t.to_str().unwrap(), "--dv", "objSpat",
    ]);
    assert!(out.ends_with("case 1 not_diverse_misaligned\n"), "{out}");
}

#[test]
fn usage_errors_echo_the_flag() {
    let cases: [(&[&str], &str); 4] = [
        (&["classify", "--target", "a", "--cotrain", "b", "--dv", "nope"], "--dv"),
        (&["classify", "--target", "a", "--cotrain", "b", "--dv", "scene", "--rho", "1"], "--rho"),
        (&["sample-batches", "--target", "t.ids", "--cotrain", "c.ids", "--seed", "1", "--omega", "2"], "--omega"),
        (&["retrieve", "corpus.jsonl", "--query-text", "(query :color \"red\")", "--campose-tol", "-1", "0", "0"], "--campose-tol"),
    ];
    for (args, flag) in cases {
        let o = dvc(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(flag), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn retrieve_ids_and_default_tolerances() {
    assert_eq!(ok(&["retrieve", "corpus.jsonl", "--query-text", "(query :object (include \"mug\"))"]), "d000\nd005\nd010\nd015\n");
    let report = ok(&["retrieve", "corpus.jsonl", "--query-text", "(query :campose (:pos 0.636 0 0.636))", "--report"]);
    assert!(report.contains(":tol 0.2 0.2 0.1"), "{report}");
}

#[test]
fn retrieve_tolerance_override() {
    let q = "(query :campose (:pos 0.636 0 0.636))";
    let wide = ok(&["retrieve", "corpus.jsonl", "--query-text", q, "--campose-tol", "5", "5", "5"]);
    assert_eq!(wide.lines().count(), 20);
}

#[test]
fn retrieve_report_golden() {
    let out = ok(&["retrieve", "corpus.jsonl", "--query", "queries.txt", "--report"]);
    golden("retrieve_report.txt", &out);
    let json = ok(&["retrieve", "corpus.jsonl", "--query", "queries.txt", "--report", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
}

#[test]
fn retrieve_bad_query_is_domain_error() {
    let o = dvc(&["retrieve", "corpus.jsonl", "--query-text", "(query :bogus 1)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[query]:"), "{}", stderr(&o));
}

#[test]
fn sample_batches_are_reproducible() {
    let args = ["sample-batches", "--target", "target.ids", "--cotrain", "cotrain.ids", "--batch", "8", "--n", "5", "--seed", "7"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    assert_eq!(a.lines().count(), 5);
    assert!(a.lines().all(|l| l.split(' ').count() == 8));
    golden("sample_batches.txt", &a);
}

#[test]
fn sample_batches_stats() {
    let out = ok(&[
        "sample-batches", "--target", "target.ids", "--cotrain", "cotrain.ids", "--omega", "0.5", "--batch", "32", "--n", "100",
        "--seed", "7", "--stats",
    ]);
    golden("sample_stats.txt", &out);
}

#[test]
fn missing_file_is_domain_error() {
    let o = dvc(&["ingest", "does-not-exist.jsonl"]);
    assert_eq!(o.status.code(), Some(1));
}
