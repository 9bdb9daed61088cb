//! CSV emission and parsing.
//!
//! Columns are fixed: `x,analytical,sim_sc,ci_sc,sim_mrc,ci_mrc,bits`. `x` is
//! written with two decimals, probabilities with six significant digits, and
//! missing Monte Carlo values as empty fields. Parsing an emitted file gives
//! back the emitted values exactly; see [`BerPoint::quantized`].

use super::curves::{BerPoint, OutageRow, SweepCurve};
use crate::error::{Error, Result};
use std::io::{Read, Write};

pub const BER_HEADER: [&str; 7] = ["x", "analytical", "sim_sc", "ci_sc", "sim_mrc", "ci_mrc", "bits"];
pub const OUTAGE_HEADER: [&str; 8] =
    ["power_db", "q", "amplification", "gamma_th", "outage", "mc_outage", "mc_se", "draws"];

pub fn format_x(x: f64) -> String {
    format!("{x:.2}")
}

pub fn format_prob(p: f64) -> String {
    format!("{p:.5e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(format_prob).unwrap_or_default()
}

fn roundtrip(s: String) -> f64 {
    s.parse().expect("formatted float parses")
}

impl BerPoint {
    /// The values this point takes after a write/read cycle.
    pub fn quantized(&self) -> Self {
        let q = |v: Option<f64>| v.map(|v| roundtrip(format_prob(v)));
        Self {
            x: roundtrip(format_x(self.x)),
            analytical_ber: roundtrip(format_prob(self.analytical_ber)),
            simulated_ber_sc: q(self.simulated_ber_sc),
            ci_halfwidth_sc: q(self.ci_halfwidth_sc),
            simulated_ber_mrc: q(self.simulated_ber_mrc),
            ci_halfwidth_mrc: q(self.ci_halfwidth_mrc),
            bits_simulated: self.bits_simulated,
        }
    }

    fn fields(&self) -> [String; 7] {
        [
            format_x(self.x),
            format_prob(self.analytical_ber),
            opt(self.simulated_ber_sc),
            opt(self.ci_halfwidth_sc),
            opt(self.simulated_ber_mrc),
            opt(self.ci_halfwidth_mrc),
            self.bits_simulated.map(|b| b.to_string()).unwrap_or_default(),
        ]
    }
}

pub fn write_ber_points<W: Write>(out: W, points: &[BerPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BER_HEADER)?;
    for p in points {
        w.write_record(p.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn ber_points_to_string(points: &[BerPoint]) -> Result<String> {
    let mut buf = Vec::new();
    write_ber_points(&mut buf, points)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

fn parse_field<T: std::str::FromStr>(s: &str, column: &str, row: usize) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("row {row}, column {column}: cannot parse '{s}'")))
}

fn parse_opt<T: std::str::FromStr>(s: &str, column: &str, row: usize) -> Result<Option<T>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse_field(s, column, row).map(Some)
    }
}

pub fn read_ber_points<R: Read>(input: R) -> Result<Vec<BerPoint>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != BER_HEADER {
        return Err(Error::Config(format!("unexpected header {header:?}")));
    }
    let mut points = Vec::new();
    for (i, record) in r.records().enumerate() {
        let rec = record?;
        let row = i + 2;
        let f = |k: usize| rec.get(k).unwrap_or("");
        points.push(BerPoint {
            x: parse_field(f(0), BER_HEADER[0], row)?,
            analytical_ber: parse_field(f(1), BER_HEADER[1], row)?,
            simulated_ber_sc: parse_opt(f(2), BER_HEADER[2], row)?,
            ci_halfwidth_sc: parse_opt(f(3), BER_HEADER[3], row)?,
            simulated_ber_mrc: parse_opt(f(4), BER_HEADER[4], row)?,
            ci_halfwidth_mrc: parse_opt(f(5), BER_HEADER[5], row)?,
            bits_simulated: parse_opt(f(6), BER_HEADER[6], row)?,
        });
    }
    Ok(points)
}

/// Sweep tables carry a leading `power_db` column, with `x` holding `q`.
pub fn write_sweep<W: Write>(out: W, sweep: &[SweepCurve]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(std::iter::once("power_db").chain(BER_HEADER))?;
    for s in sweep {
        for p in &s.curve.points {
            w.write_record(std::iter::once(format_x(s.power_db)).chain(p.fields()))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_outage<W: Write>(out: W, rows: &[OutageRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(OUTAGE_HEADER)?;
    for r in rows {
        let mc = r.monte_carlo;
        w.write_record([
            format_x(r.profile.total_power_db()),
            format!("{}", r.profile.q()),
            format_prob(r.profile.amplification()),
            format_prob(r.gamma_th),
            format_prob(r.outage),
            opt(mc.map(|m| m.outage)),
            opt(mc.map(|m| m.standard_error)),
            mc.map(|m| m.draws.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
