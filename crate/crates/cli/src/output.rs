//! CSV tables and the JSON run document.

use std::io::{Read, Write};

use crsnoma_core::SystemConfig;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::sweep::{Row, SweepSpec};
use crate::CliError;

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<Row>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<Result<Vec<Row>, _>>()?;
    Ok(rows)
}

/// Written explicitly so an empty table still has a header line.
const HEADER: [&str; 15] = [
    "variant",
    "q_db",
    "scheme",
    "combiner",
    "n_r",
    "n_d",
    "method",
    "metric",
    "value",
    "uncertainty",
    "a2",
    "n_trials",
    "seed",
    "asymptote",
    "error",
];

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub tool_version: &'static str,
    pub core_version: &'static str,
    pub preset: Option<String>,
    pub spec_hash: String,
    pub seed: u64,
    pub variants: Vec<(String, SystemConfig)>,
    pub sweep: SweepSpec,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunDocument<'a> {
    pub metadata: RunMetadata,
    pub rows: &'a [Row],
}

/// SHA-256 of the canonical JSON of the variants and the sweep.
pub fn spec_hash(
    variants: &[(String, SystemConfig)],
    spec: &SweepSpec,
) -> Result<String, CliError> {
    let bytes = serde_json::to_vec(&(variants, spec))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn run_metadata(
    preset: Option<&str>,
    variants: &[(String, SystemConfig)],
    spec: &SweepSpec,
) -> Result<RunMetadata, CliError> {
    Ok(RunMetadata {
        tool_version: env!("CARGO_PKG_VERSION"),
        core_version: crsnoma_core::VERSION,
        preset: preset.map(str::to_string),
        spec_hash: spec_hash(variants, spec)?,
        seed: spec.seed,
        variants: variants.to_vec(),
        sweep: spec.clone(),
    })
}

pub fn write_json<W: Write>(doc: &RunDocument, out: W) -> Result<(), CliError> {
    serde_json::to_writer_pretty(out, doc)?;
    Ok(())
}
