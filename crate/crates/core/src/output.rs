//! CSV and JSON emission.
//!
//! Every number is rounded to 9 significant digits and then printed as the
//! shortest decimal that reads back to the same double, so CSV and JSON
//! carry the same values and reruns are byte-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::bb84::Bb84Point;
use crate::error::{Error, Result};
use crate::gmcs::GmcsPoint;
use crate::noise::NoiseBudget;
use crate::scenario::{SweepResult, SweepRow};

pub const SWEEP_CSV_HEADER: &str =
    "z_km,ase_window,leak_window,sasrs_window,total_window,eps_in,eps_out,rate";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Argument(format!("unknown output format `{other}`"))),
        }
    }
}

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

pub fn format_number(x: f64) -> String {
    let x = round_sig(x);
    if x.is_finite() {
        ryu::Buffer::new().format_finite(x).to_string()
    } else {
        x.to_string()
    }
}

/// One line of sweep output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutputRow {
    pub z_km: f64,
    pub ase_window: f64,
    pub leak_window: f64,
    pub sasrs_window: f64,
    pub total_window: f64,
    pub eps_in: f64,
    pub eps_out: f64,
    pub rate: f64,
    pub protocol: &'static str,
}

impl OutputRow {
    pub fn new(row: &SweepRow, protocol: &'static str) -> OutputRow {
        let b = &row.budget;
        OutputRow {
            z_km: round_sig(row.z_km),
            ase_window: round_sig(b.window.ase),
            leak_window: round_sig(b.window.leak),
            sasrs_window: round_sig(b.window.sasrs),
            total_window: round_sig(b.n_spd_window),
            eps_in: round_sig(b.eps_in),
            eps_out: round_sig(b.eps_out),
            rate: round_sig(row.rate),
            protocol,
        }
    }

    fn values(&self) -> [f64; 8] {
        [
            self.z_km,
            self.ase_window,
            self.leak_window,
            self.sasrs_window,
            self.total_window,
            self.eps_in,
            self.eps_out,
            self.rate,
        ]
    }
}

#[derive(Serialize)]
struct SweepDocument<'a> {
    scenario: &'a str,
    protocol: &'static str,
    secure_distance_km: f64,
    secure_distance_censored: bool,
    secure_distance_multiple_roots: bool,
    noise_crossover_km: Option<f64>,
    rows: Vec<OutputRow>,
}

pub fn emit<W: Write>(sweep: &SweepResult, format: Format, mut out: W) -> Result<()> {
    let protocol = sweep.protocol.tag();
    let rows: Vec<OutputRow> = sweep
        .rows
        .iter()
        .map(|r| OutputRow::new(r, protocol))
        .collect();
    match format {
        Format::Csv => {
            writeln!(out, "{SWEEP_CSV_HEADER}")?;
            for row in &rows {
                let line: Vec<String> = row.values().iter().map(|&v| format_number(v)).collect();
                writeln!(out, "{}", line.join(","))?;
            }
        }
        Format::Json => {
            let doc = SweepDocument {
                scenario: &sweep.scenario,
                protocol,
                secure_distance_km: round_sig(sweep.secure_distance.km),
                secure_distance_censored: sweep.secure_distance.censored,
                secure_distance_multiple_roots: sweep.secure_distance.multiple_roots(),
                noise_crossover_km: sweep.noise_crossover_km.map(round_sig),
                rows,
            };
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn emit_to_path(sweep: &SweepResult, format: Format, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    emit(sweep, format, BufWriter::new(file))
}

/// A flat named-number record, used for single-point results.
pub trait Record {
    fn fields(&self) -> Vec<(&'static str, f64)>;
}

impl Record for NoiseBudget {
    fn fields(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("z_km", self.z_km),
            ("eta_ch", self.eta_ch),
            ("gain", self.gain),
            ("n_ase_per_mode_at_a", self.n_ase_per_mode_at_a),
            ("n_leak_per_s_at_c", self.n_leak_per_s_at_c),
            ("n_sasrs_per_mode_at_c", self.n_sasrs_per_mode_at_c),
            ("ase_window", self.window.ase),
            ("leak_window", self.window.leak),
            ("sasrs_window", self.window.sasrs),
            ("total_window", self.n_spd_window),
            ("n_gmcs_matched", self.n_gmcs_matched),
            ("n_gmcs_unmatched", self.n_gmcs_unmatched),
            ("eps_in", self.eps_in),
            ("eps_out", self.eps_out),
        ]
    }
}

impl Record for Bb84Point {
    fn fields(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("z_km", self.z_km),
            ("mu", self.mu),
            ("eta", self.eta),
            ("y0", self.y0),
            ("q_mu", self.q_mu),
            ("e_mu", self.e_mu),
            ("q1", self.q1),
            ("e1", self.e1),
            ("rate", self.rate),
        ]
    }
}

impl Record for GmcsPoint {
    fn fields(&self) -> Vec<(&'static str, f64)> {
        let s = &self.spectrum;
        vec![
            ("z_km", self.z_km),
            ("eta_ch", self.eta_ch),
            ("eps", self.eps),
            ("chi_line", self.chi_line),
            ("chi_hom", self.chi_hom),
            ("chi_tot", self.chi_tot),
            ("i_ab", self.i_ab),
            ("chi_be", self.chi_be),
            ("a", s.a),
            ("b", s.b),
            ("c", s.c),
            ("d", s.d),
            ("sigma1", s.sigma[0]),
            ("sigma2", s.sigma[1]),
            ("sigma3", s.sigma[2]),
            ("sigma4", s.sigma[3]),
            ("rate", self.rate),
        ]
    }
}

pub fn emit_record<R: Record, W: Write>(record: &R, format: Format, mut out: W) -> Result<()> {
    let fields = record.fields();
    match format {
        Format::Csv => {
            let names: Vec<&str> = fields.iter().map(|(n, _)| *n).collect();
            let values: Vec<String> = fields.iter().map(|(_, v)| format_number(*v)).collect();
            writeln!(out, "{}", names.join(","))?;
            writeln!(out, "{}", values.join(","))?;
        }
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = fields
                .iter()
                .map(|(n, v)| (n.to_string(), serde_json::Value::from(round_sig(*v))))
                .collect();
            serde_json::to_writer_pretty(&mut out, &map)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}
