//! Report rows and their CSV / JSON encodings.

use std::io::{Read, Write};

use conelab_core::ExponentPair;
use serde::{Deserialize, Serialize};

use crate::error::LabResult;

pub const REPORT_VERSION: &str = "1";

/// One line of a report. Per-`q` rows carry measurements; summary rows
/// leave `q` empty and carry the fitted slope and verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub check_id: String,
    pub p: Option<u32>,
    pub e: Option<u32>,
    pub d: usize,
    pub q: Option<u32>,
    pub pair_inv_p: String,
    pub pair_inv_r: String,
    pub family: String,
    pub ratio: Option<f64>,
    pub constant: Option<f64>,
    pub slope: Option<f64>,
    pub verdict: String,
}

impl ReportRow {
    pub fn new(check_id: &str, d: usize) -> Self {
        ReportRow {
            check_id: check_id.to_string(),
            p: None,
            e: None,
            d,
            q: None,
            pair_inv_p: String::new(),
            pair_inv_r: String::new(),
            family: String::new(),
            ratio: None,
            constant: None,
            slope: None,
            verdict: String::new(),
        }
    }

    pub fn with_field(mut self, p: u32, e: u32) -> Self {
        self.p = Some(p);
        self.e = Some(e);
        self.q = Some(p.pow(e));
        self
    }

    pub fn with_pair(mut self, pair: &ExponentPair) -> Self {
        self.pair_inv_p = pair.inv_p.to_string();
        self.pair_inv_r = pair.inv_r.to_string();
        self
    }

    pub fn is_summary(&self) -> bool {
        self.q.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldInfo {
    pub q: u32,
    pub p: u32,
    pub e: u32,
    /// Coefficients of the defining polynomial, constant term first.
    pub modulus: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub seed: u64,
    pub threshold: f64,
    pub fields: Vec<FieldInfo>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub metadata: Metadata,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn write_csv<W: Write>(&self, w: W) -> LabResult<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in &self.rows {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> LabResult<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> LabResult<Self> {
        Ok(serde_json::from_reader(r)?)
    }

    pub fn read_csv_rows<R: Read>(r: R) -> LabResult<Vec<ReportRow>> {
        let mut rd = csv::Reader::from_reader(r);
        let rows: Result<Vec<ReportRow>, _> = rd.deserialize().collect();
        Ok(rows?)
    }

    /// True when any summary row has a failing verdict.
    pub fn has_failure(&self) -> bool {
        self.rows.iter().any(|r| {
            r.is_summary()
                && crate::slope::Verdict::from_tag(&r.verdict).is_some_and(|v| v.is_failure())
        })
    }
}

pub const CSV_HEADER: &str =
    "check_id,p,e,d,q,pair_inv_p,pair_inv_r,family,ratio,constant,slope,verdict";
