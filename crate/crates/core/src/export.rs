//! JSON and CSV writers for atlas cells, scatter points, fits, couplings and
//! frustration censuses.
//!
//! Every export carries an [`ExportMeta`] block: a `meta` object in JSON, and
//! `# key=value` comment lines ahead of the column header in CSV. Floats use
//! the shortest representation that round-trips, so identical inputs give
//! byte-identical files.

use std::io::{self, Write};

use serde::Serialize;

use crate::atlas::{AtlasCell, FitResult, ScatterPoint};
use crate::hamiltonian::{CouplingMatrix, FrustrationCensus};
use crate::state::BasisState;

pub const TOOL: &str = "qss";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const PHASE_CONVENTION: &str =
    "PM: |m|<1e-9 and q_ea<1e-9; SG: |m|<1e-9 and q_ea>=1e-9; FM: m>=1e-9; AFM: m<=-1e-9";
pub const BASIS_CONVENTION: &str = "site 0 leftmost = most significant bit; e=1, g=0";
pub const MAGNETIZATION_CONVENTION: &str = "m_i = spin_scale * <sigma^z_i>";
pub const ENERGY_CONVENTION: &str = "H = -sum_{i<k} J_ik s_i s_k with Pauli s = +-1";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExportMeta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub n: usize,
    pub spin_scale: f64,
    pub seed: u64,
    pub basis: &'static str,
    pub magnetization: &'static str,
    pub energy: &'static str,
    pub phases: &'static str,
}

impl ExportMeta {
    pub fn new(command: &str, n: usize, spin_scale: f64, seed: u64) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command: command.to_owned(),
            n,
            spin_scale,
            seed,
            basis: BASIS_CONVENTION,
            magnetization: MAGNETIZATION_CONVENTION,
            energy: ENERGY_CONVENTION,
            phases: PHASE_CONVENTION,
        }
    }

    pub fn write_csv_header<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# tool={} version={}", self.tool, self.version)?;
        writeln!(w, "# command={}", self.command)?;
        writeln!(w, "# n={}", self.n)?;
        writeln!(w, "# spin_scale={}", self.spin_scale)?;
        writeln!(w, "# seed={}", self.seed)?;
        writeln!(w, "# basis={}", self.basis)?;
        writeln!(w, "# magnetization={}", self.magnetization)?;
        writeln!(w, "# energy={}", self.energy)?;
        writeln!(w, "# phases={}", self.phases)
    }
}

fn json_err(e: serde_json::Error) -> io::Error {
    io::Error::other(e)
}

/// JSON array rows streamed one per line inside `{"meta": .., <extra>, "<key>": [..]}`.
fn write_json_stream<W, T, I>(
    w: &mut W,
    meta: &ExportMeta,
    extra: &[(&str, serde_json::Value)],
    key: &str,
    rows: I,
) -> io::Result<usize>
where
    W: Write,
    T: Serialize,
    I: IntoIterator<Item = T>,
{
    w.write_all(b"{\"meta\":")?;
    serde_json::to_writer(&mut *w, meta).map_err(json_err)?;
    for (k, v) in extra {
        write!(w, ",{}:", serde_json::to_string(k).map_err(json_err)?)?;
        serde_json::to_writer(&mut *w, v).map_err(json_err)?;
    }
    write!(w, ",{}:[", serde_json::to_string(key).map_err(json_err)?)?;
    let mut count = 0usize;
    for row in rows {
        w.write_all(if count == 0 { b"\n" } else { b",\n" })?;
        serde_json::to_writer(&mut *w, &row).map_err(json_err)?;
        count += 1;
    }
    w.write_all(b"\n]}\n")?;
    Ok(count)
}

#[derive(Serialize)]
struct AtlasRow {
    row: u64,
    col: u64,
    b1: String,
    b2: String,
    k: usize,
    q_ea: f64,
    m: f64,
    neg: f64,
    phase: String,
}

fn basis_label(n: usize, index: u64) -> String {
    BasisState::new(n, index).map(|b| b.to_string()).unwrap_or_default()
}

/// `{meta, n, spin_scale, cells: [{row, col, b1, b2, k, q_ea, m, neg, phase}]}`.
/// Returns the number of cells written.
pub fn write_atlas_json<W: Write>(
    w: &mut W,
    meta: &ExportMeta,
    cells: impl IntoIterator<Item = AtlasCell>,
) -> io::Result<usize> {
    let n = meta.n;
    let rows = cells.into_iter().map(|c| AtlasRow {
        row: c.row,
        col: c.col,
        b1: basis_label(n, c.row),
        b2: basis_label(n, c.col),
        k: c.k,
        q_ea: c.q_ea,
        m: c.m,
        neg: c.neg,
        phase: c.phase.to_string(),
    });
    let extra = [("n", serde_json::json!(n)), ("spin_scale", serde_json::json!(meta.spin_scale))];
    write_json_stream(w, meta, &extra, "cells", rows)
}

/// Columns `n,row,col,b1,b2,k,q_ea,m,neg,phase`.
pub fn write_atlas_csv<W: Write>(
    w: &mut W,
    meta: &ExportMeta,
    cells: impl IntoIterator<Item = AtlasCell>,
) -> io::Result<usize> {
    meta.write_csv_header(w)?;
    writeln!(w, "n,row,col,b1,b2,k,q_ea,m,neg,phase")?;
    let n = meta.n;
    let mut count = 0;
    for c in cells {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            n,
            c.row,
            c.col,
            basis_label(n, c.row),
            basis_label(n, c.col),
            c.k,
            c.q_ea,
            c.m,
            c.neg,
            c.phase
        )?;
        count += 1;
    }
    Ok(count)
}

/// Columns `n,row,col,p,m,q_ea`.
pub fn write_scatter_csv<W: Write>(
    w: &mut W,
    meta: &ExportMeta,
    points: impl IntoIterator<Item = ScatterPoint>,
) -> io::Result<usize> {
    meta.write_csv_header(w)?;
    writeln!(w, "n,row,col,p,m,q_ea")?;
    let mut count = 0;
    for p in points {
        writeln!(w, "{},{},{},{},{},{}", p.n, p.row, p.col, p.p, p.m, p.q_ea)?;
        count += 1;
    }
    Ok(count)
}

pub fn write_scatter_json<W: Write>(
    w: &mut W,
    meta: &ExportMeta,
    points: impl IntoIterator<Item = ScatterPoint>,
) -> io::Result<usize> {
    write_json_stream(w, meta, &[], "points", points)
}

/// `{meta, n, slope, intercept, max_residual, excluded_k1_count, ...}`.
pub fn write_fit_json<W: Write>(w: &mut W, meta: &ExportMeta, fit: &FitResult) -> io::Result<()> {
    #[derive(Serialize)]
    struct Doc<'a> {
        meta: &'a ExportMeta,
        #[serde(flatten)]
        fit: &'a FitResult,
    }
    serde_json::to_writer_pretty(&mut *w, &Doc { meta, fit }).map_err(json_err)?;
    writeln!(w)
}

pub fn write_fit_csv<W: Write>(w: &mut W, meta: &ExportMeta, fit: &FitResult) -> io::Result<()> {
    meta.write_csv_header(w)?;
    writeln!(w, "n,slope,intercept,max_residual,included_count,excluded_k1_count,k1_max_deviation")?;
    writeln!(
        w,
        "{},{},{},{},{},{},{}",
        fit.n,
        fit.slope,
        fit.intercept,
        fit.max_residual,
        fit.included_count,
        fit.excluded_k1_count,
        fit.k1_max_deviation
    )
}

/// Columns `i,k,j_ik` over the upper triangle, header recording `j_scale`.
pub fn write_couplings_csv<W: Write>(w: &mut W, meta: &ExportMeta, j: &CouplingMatrix) -> io::Result<()> {
    meta.write_csv_header(w)?;
    writeln!(w, "# j_scale={}", j.j_scale())?;
    writeln!(w, "i,k,j_ik")?;
    for (i, k, v) in j.bonds() {
        writeln!(w, "{i},{k},{v}")?;
    }
    Ok(())
}

pub fn write_couplings_json<W: Write>(w: &mut W, meta: &ExportMeta, j: &CouplingMatrix) -> io::Result<()> {
    #[derive(Serialize)]
    struct Bond {
        i: usize,
        k: usize,
        j_ik: f64,
    }
    let extra = [("j_scale", serde_json::json!(j.j_scale()))];
    write_json_stream(w, meta, &extra, "couplings", j.bonds().map(|(i, k, j_ik)| Bond { i, k, j_ik }))?;
    Ok(())
}

pub fn write_census_json<W: Write>(
    w: &mut W,
    meta: &ExportMeta,
    census: &FrustrationCensus,
) -> io::Result<()> {
    #[derive(Serialize)]
    struct Doc<'a> {
        meta: &'a ExportMeta,
        #[serde(flatten)]
        census: &'a FrustrationCensus,
    }
    serde_json::to_writer_pretty(&mut *w, &Doc { meta, census }).map_err(json_err)?;
    writeln!(w)
}

pub fn write_census_csv<W: Write>(
    w: &mut W,
    meta: &ExportMeta,
    census: &FrustrationCensus,
) -> io::Result<()> {
    meta.write_csv_header(w)?;
    writeln!(w, "n,total_triangles,frustrated,fraction")?;
    writeln!(w, "{},{},{},{}", meta.n, census.total_triangles, census.frustrated, census.fraction)
}

/// Serializes any record (observables, negativity report, ...) next to `meta`.
pub fn write_record_json<W: Write, T: Serialize>(w: &mut W, meta: &ExportMeta, record: &T) -> io::Result<()> {
    #[derive(Serialize)]
    struct Doc<'a, T> {
        meta: &'a ExportMeta,
        #[serde(flatten)]
        record: &'a T,
    }
    serde_json::to_writer_pretty(&mut *w, &Doc { meta, record }).map_err(json_err)?;
    writeln!(w)
}
