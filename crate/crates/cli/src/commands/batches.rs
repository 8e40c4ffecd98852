use std::io::Write;
use std::path::Path;

use dvc_core::sampler::{stream_stats, SampleStream, DEFAULT_OMEGA};

use super::{output, read_text};
use crate::args::{Format, SampleArgs};
use crate::failure::{Failure, Outcome, Tag};

/// One id per line; blank lines and `#` comments are skipped.
fn read_ids(path: &Path) -> Result<Vec<String>, Failure> {
    Ok(read_text(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

pub fn run(a: SampleArgs) -> Outcome {
    let omega = a.omega.unwrap_or(DEFAULT_OMEGA);
    if !(0.0..=1.0).contains(&omega) {
        return Err(Failure::usage(format!("invalid value '{omega}' for '--omega': must lie in [0, 1]")));
    }
    if a.batch == 0 {
        return Err(Failure::usage("invalid value '0' for '--batch': must be positive"));
    }
    let stream = SampleStream::new(read_ids(&a.target)?, read_ids(&a.cotrain)?, omega, a.seed, a.batch).tag("sampler")?;
    let mut out = output(None)?;
    if a.stats {
        let stats = stream_stats(&stream, a.n);
        match a.format {
            Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&stats).tag("io")?)?,
            Format::Text => {
                writeln!(out, "omega {} seed {} batch {} batches {}", stats.omega, stats.seed, stats.batch_size, stats.batches)?;
                writeln!(out, "draws {}", stats.draws)?;
                writeln!(out, "target_fraction {:.6}", stats.target_fraction)?;
                writeln!(out, "cotrain_fraction {:.6}", stats.cotrain_fraction)?;
            }
        }
    } else {
        for i in 0..a.n {
            let batch = stream.batch(i);
            match a.format {
                Format::Json => writeln!(out, "{}", serde_json::to_string(&batch).tag("io")?)?,
                Format::Text => writeln!(out, "{}", batch.join(" "))?,
            }
        }
    }
    out.flush()?;
    Ok(())
}
