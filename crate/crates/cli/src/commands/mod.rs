mod batches;
mod corpus;
mod generate;
mod retrieve;
mod spec;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use dvc_core::metadata::{ingest, DemoRecord};

use crate::args::{Cli, Command};
use crate::failure::{Failure, Outcome, Tag};

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Spec(cmd) => spec::run(cmd),
        Command::Gen(cmd) => generate::run(cmd),
        Command::Ingest(a) => corpus::ingest_cmd(a),
        Command::Annotate(a) => corpus::annotate(a),
        Command::Profile(a) => corpus::profile(a),
        Command::Classify(a) => corpus::classify(a),
        Command::Retrieve(a) => retrieve::run(a),
        Command::SampleBatches(a) => batches::run(a),
    }
}

/// Buffered writer to `path`, or to stdout when absent.
pub(crate) fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).tag_with("io", format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub(crate) fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).tag_with("io", format!("cannot read {}", path.display()))
}

pub(crate) fn load_records(path: &Path) -> Result<Vec<DemoRecord>, Failure> {
    ingest(path).map_err(|e| Failure::domain("ingest", format!("{}: {e}", path.display())))
}

pub(crate) fn triple(v: &Option<Vec<f64>>) -> Option<[f64; 3]> {
    v.as_ref().map(|v| [v[0], v[1], v[2]])
}
