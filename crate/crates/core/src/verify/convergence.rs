use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use super::{error_norms, ManufacturedProblem};
use crate::error::{invalid, Error, Result};
use crate::mesh::PolygonalMesh;
use crate::schemes::{self, SchemeConfig};

/// Errors below this are treated as exact and get no rate.
pub const EXACT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub h: f64,
    pub dofs_total: usize,
    pub dofs_trace: usize,
    pub err_l2_u: f64,
    pub rate_l2_u: Option<f64>,
    pub err_energy: f64,
    pub rate_energy: Option<f64>,
    pub err_l2_q: f64,
    pub rate_l2_q: Option<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FittedRates {
    pub l2_u: Option<f64>,
    pub energy: Option<f64>,
    pub l2_q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub scheme: String,
    pub problem: String,
    pub coefficient: String,
    pub levels: Vec<ErrorReport>,
    pub fitted: FittedRates,
}

fn pair_rate(e0: f64, e1: f64, h0: f64, h1: f64) -> Option<f64> {
    if !(e0.is_finite() && e1.is_finite()) || e0 <= EXACT_TOL || e1 <= EXACT_TOL {
        return None;
    }
    Some((e0 / e1).ln() / (h0 / h1).ln())
}

/// Least-squares slope of `log e` against `log h` over the last
/// `ceil(n/2)` levels (at least two).
pub fn fitted_rate(h: &[f64], e: &[f64]) -> Option<f64> {
    let n = h.len();
    if n < 2 {
        return None;
    }
    let m = n.div_ceil(2).max(2);
    let (hs, es) = (&h[n - m..], &e[n - m..]);
    if es.iter().any(|&v| !v.is_finite() || v <= EXACT_TOL) {
        return None;
    }
    let xs: Vec<f64> = hs.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = es.iter().map(|v| v.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / m as f64, ys.iter().sum::<f64>() / m as f64);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Solves on one mesh and measures the errors.
pub fn run_level(mesh: &PolygonalMesh, config: &SchemeConfig, problem: &ManufacturedProblem) -> Result<ErrorReport> {
    let start = Instant::now();
    let f = |p| problem.source(p);
    let sol = schemes::solve(mesh, config, &problem.coeff, &f)?;
    let err = error_norms(mesh, &sol, problem)?;
    Ok(ErrorReport {
        h: mesh.h_max(),
        dofs_total: sol.total_dofs,
        dofs_trace: sol.trace_dofs,
        err_l2_u: err.l2_u,
        rate_l2_u: None,
        err_energy: err.energy,
        rate_energy: None,
        err_l2_q: err.l2_q,
        rate_l2_q: None,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs every mesh in order; failures carry the level index.
pub fn run_levels(meshes: &[PolygonalMesh], config: &SchemeConfig, problem: &ManufacturedProblem) -> Result<ConvergenceReport> {
    let mut levels = Vec::with_capacity(meshes.len());
    for (i, mesh) in meshes.iter().enumerate() {
        let mut r = run_level(mesh, config, problem).map_err(|e| Error::AtLevel { level: i, source: Box::new(e) })?;
        if let Some(prev) = levels.last() {
            let prev: &ErrorReport = prev;
            r.rate_l2_u = pair_rate(prev.err_l2_u, r.err_l2_u, prev.h, r.h);
            r.rate_energy = pair_rate(prev.err_energy, r.err_energy, prev.h, r.h);
            r.rate_l2_q = pair_rate(prev.err_l2_q, r.err_l2_q, prev.h, r.h);
        }
        levels.push(r);
    }
    let h: Vec<f64> = levels.iter().map(|l| l.h).collect();
    let fit = |get: fn(&ErrorReport) -> f64| fitted_rate(&h, &levels.iter().map(get).collect::<Vec<_>>());
    let fitted = FittedRates {
        l2_u: fit(|l| l.err_l2_u),
        energy: fit(|l| l.err_energy),
        l2_q: fit(|l| l.err_l2_q),
    };
    Ok(ConvergenceReport {
        scheme: config.scheme.to_string(),
        problem: problem.name.clone(),
        coefficient: problem.coeff.to_string(),
        levels,
        fitted,
    })
}

/// Convergence study; needs at least two meshes with decreasing `h`.
pub fn run_convergence(meshes: &[PolygonalMesh], config: &SchemeConfig, problem: &ManufacturedProblem) -> Result<ConvergenceReport> {
    if meshes.len() < 2 {
        return invalid("a convergence study needs at least two meshes");
    }
    if meshes.windows(2).any(|w| w[1].h_max() >= w[0].h_max()) {
        return invalid("meshes must have strictly decreasing h");
    }
    run_levels(meshes, config, problem)
}

fn fmt_err(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.6e}")
    }
}

fn fmt_rate(rate: Option<f64>, err: f64, first: bool) -> String {
    match rate {
        Some(r) => format!("{r:.4}"),
        None if first || err.is_nan() => "NaN".into(),
        None => "exact".into(),
    }
}

impl ConvergenceReport {
    pub const COLUMNS: [&'static str; 10] = [
        "h", "dofs_total", "dofs_trace", "err_l2_u", "rate_l2_u", "err_energy", "rate_energy", "err_l2_q",
        "rate_l2_q", "seconds",
    ];

    /// Zeroes the wall times so that output is reproducible.
    pub fn without_timing(mut self) -> Self {
        self.levels.iter_mut().for_each(|l| l.seconds = 0.0);
        self
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(Self::COLUMNS).map_err(csv_err)?;
        for (i, l) in self.levels.iter().enumerate() {
            let first = i == 0;
            w.write_record([
                format!("{:.6e}", l.h),
                l.dofs_total.to_string(),
                l.dofs_trace.to_string(),
                fmt_err(l.err_l2_u),
                fmt_rate(l.rate_l2_u, l.err_l2_u, first),
                fmt_err(l.err_energy),
                fmt_rate(l.rate_energy, l.err_energy, first),
                fmt_err(l.err_l2_q),
                fmt_rate(l.rate_l2_q, l.err_l2_q, first),
                format!("{:.3}", l.seconds),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// JSON with NaN errors and missing rates as `null`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }
}
