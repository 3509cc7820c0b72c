//! Grid sweeps of the three inverse-information quantities and their CSV
//! form.

use std::io::Write;

use hpqfim::hybrid::{evaluate_with_prior_fisher, HybridBoundReport};
use hpqfim::priors::prior_fisher;
use hpqfim::{InverseForm, WeightMatrix};
use rayon::prelude::*;

use crate::config::SweepConfig;
use crate::error::{CliError, CliResult};

pub const CSV_HEADER: [&str; 5] = ["theta_I", "inv_L", "inv_M", "inv_U", "flags"];

/// Slack allowed in the row ordering `inv_U ≥ inv_M ≥ inv_L`.
pub const ORDER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta_i: f64,
    /// `Tr[W (E_π[J_II])⁻¹]`.
    pub inv_l: f64,
    /// `Tr[W (hpQFIM)⁻¹]`.
    pub inv_m: f64,
    /// `Tr[W (E_π[J_{I|N}])⁻¹]`.
    pub inv_u: f64,
    pub flags: Vec<String>,
}

impl SweepRow {
    pub fn from_report(rep: &HybridBoundReport, w: &WeightMatrix) -> CliResult<Self> {
        let scalar = |f: &InverseForm| f.weighted_trace(w);
        let inv_l = scalar(&rep.inv_l)?;
        let inv_m = scalar(&rep.inv_m)?;
        let inv_u = scalar(&rep.inv_u)?;
        let mut flags = Vec::new();
        if !rep.inv_l.is_finite() {
            flags.push("high_singular".to_string());
        }
        if !rep.inv_m.is_finite() {
            flags.push("hpqfim_singular".to_string());
        }
        if !rep.inv_u.is_finite() {
            flags.push("low_singular".to_string());
        }
        if rep.hpqfim_pinv {
            flags.push("hpqfim_pinv".to_string());
        }
        if rep.pinv_nodes > 0 {
            flags.push(format!("pinv_nodes={}", rep.pinv_nodes));
        }
        let mut row = Self {
            theta_i: rep.theta_i[0],
            inv_l,
            inv_m,
            inv_u,
            flags,
        };
        if !row.ordered() {
            row.flags.push("order_violation".to_string());
        }
        Ok(row)
    }

    /// `inv_U ≥ inv_M ≥ inv_L − ORDER_TOL`, with `inf` above everything.
    pub fn ordered(&self) -> bool {
        let geq = |a: f64, b: f64| a == f64::INFINITY || a >= b - ORDER_TOL * b.abs().max(1.0);
        geq(self.inv_u, self.inv_m) && geq(self.inv_m, self.inv_l)
    }
}

/// One row per grid point, in grid order.
pub fn compute_rows(cfg: &SweepConfig) -> CliResult<Vec<SweepRow>> {
    let (prior, rule) = match (&cfg.prior, &cfg.rule) {
        (Some(p), Some(r)) => (p, r),
        _ => return Err(CliError::Config("sweep requires prior.kind".into())),
    };
    let j_pi = prior_fisher(prior, rule)?;
    cfg.grid()
        .par_iter()
        .map(|theta| {
            let rep = evaluate_with_prior_fisher(&cfg.model, prior, rule, theta, &cfg.weight, j_pi.clone())
                .map_err(|source| CliError::Numerical {
                    theta: theta.clone(),
                    source,
                })?;
            SweepRow::from_report(&rep, &cfg.weight)
        })
        .collect()
}

fn fmt_value(v: f64) -> String {
    // Display for f64 is the shortest string that parses back to the same
    // value and prints infinity as `inf`.
    format!("{v}")
}

pub fn to_csv(rows: &[SweepRow]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Csv(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            fmt_value(r.theta_i),
            fmt_value(r.inv_l),
            fmt_value(r.inv_m),
            fmt_value(r.inv_u),
            r.flags.join(";"),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Csv(e.to_string()))
}

pub fn parse_csv(text: &str) -> CliResult<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| CliError::Csv(e.to_string()))?
        .clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(CliError::Csv(format!("unexpected header {header:?}")));
    }
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| CliError::Csv(format!("`{s}` is not a number")))
    };
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(|e| CliError::Csv(e.to_string()))?;
            Ok(SweepRow {
                theta_i: num(&rec[0])?,
                inv_l: num(&rec[1])?,
                inv_m: num(&rec[2])?,
                inv_u: num(&rec[3])?,
                flags: rec[4]
                    .split(';')
                    .filter(|f| !f.is_empty())
                    .map(str::to_string)
                    .collect(),
            })
        })
        .collect()
}

/// Computes the sweep, writes the CSV to `cfg.output_path` and a short
/// summary to `out`.
pub fn run_sweep(cfg: &SweepConfig, out: &mut impl Write) -> CliResult<Vec<SweepRow>> {
    let rows = compute_rows(cfg)?;
    let text = to_csv(&rows)?;
    std::fs::write(&cfg.output_path, text).map_err(|source| CliError::Io {
        path: cfg.output_path.clone(),
        source,
    })?;
    let flagged = rows.iter().filter(|r| !r.flags.is_empty()).count();
    let io = |source| CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    writeln!(
        out,
        "model {} | prior {} | {} grid points on ({}, {})",
        cfg.model.kind(),
        cfg.prior.as_ref().map_or("none", |p| p.kind().name()),
        cfg.grid_points,
        cfg.theta_min,
        cfg.theta_max
    )
    .map_err(io)?;
    let finite = |f: fn(&SweepRow) -> f64| {
        rows.iter()
            .map(f)
            .filter(|v| v.is_finite())
            .fold(None, |acc: Option<(f64, f64)>, v| {
                Some(acc.map_or((v, v), |(lo, hi)| (lo.min(v), hi.max(v))))
            })
    };
    for (name, range) in [
        ("inv_L", finite(|r| r.inv_l)),
        ("inv_M", finite(|r| r.inv_m)),
        ("inv_U", finite(|r| r.inv_u)),
    ] {
        match range {
            Some((lo, hi)) => writeln!(out, "  {name}: [{lo}, {hi}]").map_err(io)?,
            None => writeln!(out, "  {name}: inf").map_err(io)?,
        }
    }
    writeln!(
        out,
        "wrote {} rows ({flagged} flagged) to {}",
        rows.len(),
        cfg.output_path.display()
    )
    .map_err(io)?;
    Ok(rows)
}
