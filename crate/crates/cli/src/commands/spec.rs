use std::io::Write;

use dvc_core::taskspec::{parse, sample_instance, serialize};

use super::{output, read_text};
use crate::args::SpecCmd;
use crate::failure::{Failure, Outcome, Tag};

pub fn run(cmd: SpecCmd) -> Outcome {
    match cmd {
        SpecCmd::Validate { files } => {
            let mut out = output(None)?;
            let mut failed = 0;
            for f in &files {
                match parse(&read_text(f)?) {
                    Ok(spec) => writeln!(out, "ok {} ({})", f.display(), spec.name)?,
                    Err(e) => {
                        failed += 1;
                        out.flush()?;
                        eprintln!("{}: {e}", f.display());
                    }
                }
            }
            out.flush()?;
            if failed > 0 {
                return Err(Failure::domain("spec", format!("{failed} of {} files invalid", files.len())));
            }
            Ok(())
        }
        SpecCmd::Fmt { file } => {
            let spec = parse(&read_text(&file)?).tag_with("spec", file.display())?;
            let mut out = output(None)?;
            out.write_all(serialize(&spec).as_bytes())?;
            out.flush()?;
            Ok(())
        }
        SpecCmd::Sample { file, seed, count } => {
            let spec = parse(&read_text(&file)?).tag_with("spec", file.display())?;
            let mut out = output(None)?;
            for i in 0..count {
                let inst = sample_instance(&spec, seed.wrapping_add(i)).tag("sample")?;
                serde_json::to_writer(&mut out, &inst).tag("io")?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
            Ok(())
        }
    }
}
