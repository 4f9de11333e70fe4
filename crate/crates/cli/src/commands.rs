use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use cuspcert_core::caselib::{certify_range, prepare_case, Certificate};
use cuspcert_core::genpos::QuotientOracle;
use cuspcert_core::intlinalg::big_vec;
use cuspcert_core::report::{write_csv, write_json};
use cuspcert_core::torus::{build_family, twist};
use cuspcert_core::weyl::twisted_conjugacy_classes;
use cuspcert_core::{Error, Family, SignedPermutation};
use num_bigint::BigInt;
use serde::Serialize;

use crate::args::{parse_qs, Common, Format};

pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_THRESHOLD: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TooLarge { .. } => EXIT_THRESHOLD,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    usage(format!("cannot write {}: {e}", path.display()))
}

fn write_report<T: Serialize>(
    path: &Path,
    format: Format,
    json: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
    rows: &[T],
) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut out = BufWriter::new(file);
    match format {
        Format::Json => json(&mut out)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            for row in rows {
                w.serialize(row).map_err(|e| io_error(path, e))?;
            }
            w.flush().map_err(|e| io_error(path, e))?;
        }
    }
    out.flush().map_err(|e| io_error(path, e))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn require_selection(common: &Common) -> Result<(Vec<Family>, Vec<usize>), CliError> {
    if common.families.is_empty() {
        return Err(usage("--family is required"));
    }
    let ranks = common
        .rank
        .map(|(lo, hi)| (lo..=hi).collect())
        .ok_or_else(|| usage("--rank is required"))?;
    Ok((common.families(), ranks))
}

pub fn certify(common: &Common) -> Result<u8, CliError> {
    let qs = parse_qs(&common.q).map_err(usage)?;
    let opts = common.options().map_err(usage)?;
    let certs = certify_range(&common.families(), &common.ranks((1, 8)), &qs, &opts)?;
    if certs.is_empty() {
        return Err(usage("no valid (family, rank) in the selection"));
    }

    let stdout = io::stdout();
    let mut out = stdout.lock();
    let _ = writeln!(
        out,
        "{:<6} {:>4} {:>4}  {:<11} {:>22} {:>8}  {:<16} verdict",
        "family", "rank", "q", "anisotropic", "|T(k)|", "|W_T(k)|", "general position"
    );
    for c in &certs {
        let _ = writeln!(
            out,
            "{:<6} {:>4} {:>4}  {:<11} {:>22} {:>8}  {:<16} {}",
            c.family.to_string(),
            c.rank,
            c.q,
            yes(c.anisotropic),
            c.torus_order,
            c.rational_weyl_group.order,
            yes(c.general_position),
            c.verdict
        );
        for f in &c.failures {
            let _ = writeln!(out, "    {f}");
        }
    }
    let passed = certs.iter().filter(|c| c.passed()).count();
    let _ = writeln!(
        out,
        "{} case(s): {} PASS, {} FAIL",
        certs.len(),
        passed,
        certs.len() - passed
    );

    if let Some(path) = &common.out {
        match common.format {
            Format::Json => {
                let file = File::create(path).map_err(|e| io_error(path, e))?;
                write_json(BufWriter::new(file), &certs)?;
            }
            Format::Csv => {
                let file = File::create(path).map_err(|e| io_error(path, e))?;
                write_csv(BufWriter::new(file), &certs)?;
            }
        }
    }
    Ok(exit_status(&certs))
}

/// 0 iff every certificate passes.
pub fn exit_status(certs: &[Certificate]) -> u8 {
    if certs.iter().all(Certificate::passed) {
        0
    } else {
        EXIT_FAIL
    }
}

#[derive(Serialize)]
struct ClassOrder {
    q: u64,
    torus_order: String,
}

#[derive(Serialize)]
struct ClassReport {
    family: Family,
    rank: usize,
    index: usize,
    representative: SignedPermutation,
    size: String,
    anisotropic: bool,
    torus_orders: Vec<ClassOrder>,
}

#[derive(Serialize)]
struct ClassCsvRow {
    family: String,
    rank: usize,
    index: usize,
    representative: String,
    size: String,
    anisotropic: bool,
    q: u64,
    torus_order: String,
}

pub fn classify(common: &Common) -> Result<u8, CliError> {
    let (families, ranks) = require_selection(common)?;
    let qs = parse_qs(&common.q).map_err(usage)?;
    let mut report = Vec::new();
    for family in families {
        for &rank in &ranks {
            if rank < family.min_rank() {
                continue;
            }
            let spec = build_family(family, rank)?;
            let table = twisted_conjugacy_classes(&spec.weyl, &spec.f0, common.group_threshold)?;
            let mut rows = Vec::new();
            for (index, class) in table.classes.iter().enumerate() {
                let mut anisotropic = false;
                let mut torus_orders = Vec::new();
                for &q in &qs {
                    let t = twist(&spec, &class.representative, q)?;
                    anisotropic = t.is_anisotropic();
                    torus_orders.push(ClassOrder {
                        q,
                        torus_order: t.torus_order().to_string(),
                    });
                }
                rows.push(ClassReport {
                    family,
                    rank,
                    index,
                    representative: class.representative.clone(),
                    size: class.size.to_string(),
                    anisotropic,
                    torus_orders,
                });
            }
            let count = rows.iter().filter(|r| r.anisotropic).count();
            println!(
                "{family} rank {rank}: {} twisted classes of W({}{}), {count} anisotropic",
                rows.len(),
                spec.weyl.kind(),
                spec.weyl.rank()
            );
            let qs_header: Vec<String> = qs.iter().map(|q| format!("q={q}")).collect();
            println!(
                "  {:>3}  {:<28} {:>10}  {:<11} |T(k)| at {}",
                "#",
                "representative",
                "size",
                "anisotropic",
                qs_header.join(", ")
            );
            for r in &rows {
                let orders: Vec<&str> = r
                    .torus_orders
                    .iter()
                    .map(|o| o.torus_order.as_str())
                    .collect();
                println!(
                    "  {:>3}  {:<28} {:>10}  {:<11} {}",
                    r.index,
                    r.representative.to_string(),
                    r.size,
                    yes(r.anisotropic),
                    orders.join(", ")
                );
            }
            report.extend(rows);
        }
    }
    if report.is_empty() {
        return Err(usage("no valid (family, rank) in the selection"));
    }
    if let Some(path) = &common.out {
        let csv_rows: Vec<ClassCsvRow> = report
            .iter()
            .flat_map(|r| {
                r.torus_orders.iter().map(move |o| ClassCsvRow {
                    family: r.family.to_string(),
                    rank: r.rank,
                    index: r.index,
                    representative: r.representative.to_string(),
                    size: r.size.clone(),
                    anisotropic: r.anisotropic,
                    q: o.q,
                    torus_order: o.torus_order.clone(),
                })
            })
            .collect();
        write_report(
            path,
            common.format,
            |w| serde_json::to_writer_pretty(w, &report).map_err(|e| io_error(path, e)),
            &csv_rows,
        )?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct SearchReport {
    family: Family,
    rank: usize,
    q: u64,
    twist: SignedPermutation,
    torus_order: String,
    wtk_order: usize,
    general_position_count: String,
    orbits: String,
    /// Smallest member of each free orbit, as ambient lattice vectors.
    representatives: Vec<Vec<String>>,
    witness: Vec<i64>,
    witness_orbit: Vec<String>,
    witness_general_position: bool,
}

#[derive(Serialize)]
struct SearchCsvRow {
    family: String,
    rank: usize,
    q: u64,
    torus_order: String,
    wtk_order: usize,
    general_position_count: String,
    orbits: String,
    witness_general_position: bool,
}

pub fn search(common: &Common, limit: usize) -> Result<u8, CliError> {
    let (families, ranks) = require_selection(common)?;
    let qs = parse_qs(&common.q).map_err(usage)?;
    let opts = common.options().map_err(usage)?;
    let mut report = Vec::new();
    for family in families {
        for &rank in &ranks {
            if rank < family.min_rank() {
                continue;
            }
            let case = prepare_case(family, rank, &opts)?;
            for &q in &qs {
                let torus = twist(&case.spec, &case.w, q)?;
                let oracle = QuotientOracle::new(&torus, &case.group, opts.oracle_threshold)?;
                let count = oracle.count_free();
                let (reps, orbits) = oracle.free_orbit_representatives(limit);
                let ambient = |rep: &[i128]| -> Vec<String> {
                    let coords: Vec<BigInt> = rep.iter().map(|&x| BigInt::from(x)).collect();
                    torus
                        .lattice()
                        .to_ambient(&coords)
                        .iter()
                        .map(ToString::to_string)
                        .collect()
                };
                let canon = oracle.canonical(&torus.coordinates(&big_vec(&case.witness))?);
                let witness_gp = oracle.stabilizer(&canon).len() == 1;
                let witness_orbit = oracle.orbit_min(&canon);

                println!(
                    "({family}, {rank}, q={q}): |T(k)| = {}, |W_T(k)| = {}, {count} characters in general position in {orbits} orbit(s)",
                    oracle.order(),
                    case.group.order()
                );
                for rep in &reps {
                    let marker = if *rep == witness_orbit {
                        "  <- witness"
                    } else {
                        ""
                    };
                    println!("    [{}]{marker}", ambient(rep).join(", "));
                }
                if (reps.len() as u128) < orbits {
                    println!("    ... {} more", orbits - reps.len() as u128);
                }
                println!(
                    "    witness {:?}: {}",
                    case.witness,
                    if witness_gp {
                        "in general position"
                    } else {
                        "NOT in general position"
                    }
                );
                report.push(SearchReport {
                    family,
                    rank,
                    q,
                    twist: case.w.clone(),
                    torus_order: oracle.order().to_string(),
                    wtk_order: case.group.order(),
                    general_position_count: count.to_string(),
                    orbits: orbits.to_string(),
                    representatives: reps.iter().map(|r| ambient(r)).collect(),
                    witness: case.witness.clone(),
                    witness_orbit: ambient(&witness_orbit),
                    witness_general_position: witness_gp,
                });
            }
        }
    }
    if report.is_empty() {
        return Err(usage("no valid (family, rank) in the selection"));
    }
    if let Some(path) = &common.out {
        let csv_rows: Vec<SearchCsvRow> = report
            .iter()
            .map(|r| SearchCsvRow {
                family: r.family.to_string(),
                rank: r.rank,
                q: r.q,
                torus_order: r.torus_order.clone(),
                wtk_order: r.wtk_order,
                general_position_count: r.general_position_count.clone(),
                orbits: r.orbits.clone(),
                witness_general_position: r.witness_general_position,
            })
            .collect();
        write_report(
            path,
            common.format,
            |w| serde_json::to_writer_pretty(w, &report).map_err(|e| io_error(path, e)),
            &csv_rows,
        )?;
    }
    Ok(0)
}
