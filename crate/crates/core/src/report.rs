//! JSON and CSV output for batches of certificates.

use std::io::{Read, Write};

use serde::Serialize;

use crate::caselib::Certificate;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 8] = [
    "family",
    "rank",
    "q",
    "anisotropic",
    "torus_order",
    "wtk_order",
    "general_position",
    "verdict",
];

#[derive(Serialize)]
struct CsvRow<'a> {
    family: String,
    rank: usize,
    q: u64,
    anisotropic: bool,
    torus_order: &'a str,
    wtk_order: usize,
    general_position: bool,
    verdict: String,
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Inconsistent(format!("report i/o: {e}"))
}

pub fn write_csv<W: Write>(out: W, certs: &[Certificate]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if certs.is_empty() {
        w.write_record(CSV_HEADER).map_err(io_err)?;
    }
    for c in certs {
        w.serialize(CsvRow {
            family: c.family.to_string(),
            rank: c.rank,
            q: c.q,
            anisotropic: c.anisotropic,
            torus_order: &c.torus_order,
            wtk_order: c.rational_weyl_group.order,
            general_position: c.general_position,
            verdict: c.verdict.to_string(),
        })
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn to_csv(certs: &[Certificate]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, certs)?;
    String::from_utf8(buf).map_err(io_err)
}

pub fn write_json<W: Write>(out: W, certs: &[Certificate]) -> Result<()> {
    serde_json::to_writer_pretty(out, certs).map_err(io_err)
}

pub fn to_json(certs: &[Certificate]) -> Result<String> {
    serde_json::to_string_pretty(certs).map_err(io_err)
}

pub fn read_json<R: Read>(input: R) -> Result<Vec<Certificate>> {
    serde_json::from_reader(input).map_err(io_err)
}

pub fn from_json(s: &str) -> Result<Vec<Certificate>> {
    serde_json::from_str(s).map_err(io_err)
}

/// Clears wall-clock fields so that two runs can be compared byte for byte.
pub fn strip_timestamps(certs: &mut [Certificate]) {
    for c in certs {
        c.timestamp.clear();
    }
}
