//! Side-by-side comparison of several runs on one instance.

use std::fmt;

use crate::graph::Length;
use crate::io::{ratio, to_f64, ResultRecord};
use crate::oracle::OracleResult;
use crate::pipeline::ledger_bound;

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub algorithm: String,
    pub length: Length,
    pub feasible: bool,
    pub ratio: Option<f64>,
    /// Largest length the algorithm's guarantee allows.
    pub bound: Option<f64>,
    pub within_bound: Option<bool>,
    pub wall_time_secs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub instance: String,
    pub opt: Option<Length>,
    pub rows: Vec<ReportRow>,
}

pub fn report(instance: &str, results: &[ResultRecord], oracle: Option<&OracleResult>) -> Report {
    let opt = oracle.map(|o| o.opt).or_else(|| results.iter().find_map(|r| r.oracle_opt));
    let rows = results
        .iter()
        .map(|r| {
            let bound = opt.and_then(|o| ledger_bound(r, o));
            ReportRow {
                algorithm: r.algorithm.clone(),
                length: r.total_length,
                feasible: r.feasible,
                ratio: opt.map(|o| ratio(r.total_length, o)),
                bound,
                within_bound: bound.map(|b| to_f64(r.total_length) <= b + 1e-9),
                wall_time_secs: r.wall_time_secs,
            }
        })
        .collect();
    Report { instance: instance.to_string(), opt, rows }
}

impl Report {
    /// Every row is feasible and inside its bound wherever one applies.
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.feasible && r.within_bound != Some(false))
    }

    pub fn row(&self, algorithm: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.algorithm == algorithm)
    }
}

fn opt_f64(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = self.opt.map_or_else(|| "unknown".to_string(), |o| o.to_string());
        writeln!(f, "instance {}  OPT = {opt}", self.instance)?;
        writeln!(
            f,
            "{:<11} {:>12} {:>8} {:>8} {:>10} {:>6} {:>10}",
            "algorithm", "length", "feasible", "ratio", "bound", "ok", "time[s]"
        )?;
        for r in &self.rows {
            let ok = match r.within_bound {
                Some(true) => "yes",
                Some(false) => "NO",
                None => "-",
            };
            writeln!(
                f,
                "{:<11} {:>12} {:>8} {:>8} {:>10} {:>6} {:>10.4}",
                r.algorithm,
                r.length.to_string(),
                r.feasible,
                opt_f64(r.ratio),
                opt_f64(r.bound),
                ok,
                r.wall_time_secs
            )?;
        }
        Ok(())
    }
}
