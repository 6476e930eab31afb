//! Squeezing traces, peak search and CSV output.

use super::integrate::Sample;
use serde::Serialize;
use std::io::Write;

/// Reciprocal squeezing in dB, `-10 log₁₀ ξ²`.
pub fn xi_inv2_db(xi2: f64) -> f64 {
    -10.0 * xi2.log10()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingTrace {
    /// γ_op t
    pub times: Vec<f64>,
    pub xi2: Vec<f64>,
    /// `⟨F_x⟩/(N f)`
    pub fx_per_naf: Vec<f64>,
    /// `⟨ΔF_z²⟩/(N f/2)`
    pub var_fz_norm: Vec<f64>,
    /// `⟨Δf_z⁽¹⁾Δf_z⁽²⁾⟩`
    pub two_body_cov: Vec<f64>,
    /// Standard deviation of ξ⁻² (dB) across trajectories, if averaged.
    pub xi_inv2_db_spread: Option<Vec<f64>>,
    pub trajectories: usize,
}

impl SqueezingTrace {
    pub(crate) fn from_runs(runs: &[Vec<Sample>], averaged: bool) -> Self {
        let n = runs.len() as f64;
        let len = runs.iter().map(Vec::len).min().unwrap_or(0);
        let mean = |f: &dyn Fn(&Sample) -> f64| -> Vec<f64> {
            (0..len).map(|k| runs.iter().map(|r| f(&r[k])).sum::<f64>() / n).collect()
        };
        let spread = averaged.then(|| {
            (0..len)
                .map(|k| {
                    let v: Vec<f64> = runs.iter().map(|r| xi_inv2_db(r[k].xi2)).collect();
                    let m = v.iter().sum::<f64>() / n;
                    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt()
                })
                .collect()
        });
        SqueezingTrace {
            times: runs.first().map(|r| r[..len].iter().map(|s| s.t).collect()).unwrap_or_default(),
            xi2: mean(&|s| s.xi2),
            fx_per_naf: mean(&|s| s.fx_per_f),
            var_fz_norm: mean(&|s| s.var_fz_norm),
            two_body_cov: mean(&|s| s.two_body),
            xi_inv2_db_spread: spread,
            trajectories: runs.len(),
        }
    }

    pub fn xi_inv2_db(&self) -> Vec<f64> {
        self.xi2.iter().map(|&x| xi_inv2_db(x)).collect()
    }

    pub fn peak(&self) -> Peak {
        find_peak(&self.times, &self.xi_inv2_db())
    }

    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "gamma_op_t,xi2,xi_inv2_dB,Fx_per_NAf,varFz_per_NAf_half,two_body_cov")?;
        for k in 0..self.times.len() {
            writeln!(
                w,
                "{:.6},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                self.times[k],
                self.xi2[k],
                xi_inv2_db(self.xi2[k]),
                self.fx_per_naf[k],
                self.var_fz_norm[k],
                self.two_body_cov[k]
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    /// γ_op t*
    pub t: f64,
    pub value_db: f64,
    /// The maximum sat on an end point (run too short or no squeezing).
    pub at_boundary: bool,
}

/// Global maximum with a parabolic fit through the neighbouring samples.
pub fn find_peak(times: &[f64], values: &[f64]) -> Peak {
    assert!(!times.is_empty() && times.len() == values.len(), "empty trace");
    let k = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    if k == 0 || k + 1 == values.len() {
        log::warn!("squeezing trace is monotone; peak taken at the end point t = {}", times[k]);
        return Peak { t: times[k], value_db: values[k], at_boundary: true };
    }
    let (t0, t1, t2) = (times[k - 1], times[k], times[k + 1]);
    let (y0, y1, y2) = (values[k - 1], values[k], values[k + 1]);
    // Lagrange parabola through three (possibly non-uniform) points
    let d0 = (t0 - t1) * (t0 - t2);
    let d1 = (t1 - t0) * (t1 - t2);
    let d2 = (t2 - t0) * (t2 - t1);
    let a = y0 / d0 + y1 / d1 + y2 / d2;
    let b = -(y0 * (t1 + t2) / d0 + y1 * (t0 + t2) / d1 + y2 * (t0 + t1) / d2);
    let c = y0 * t1 * t2 / d0 + y1 * t0 * t2 / d1 + y2 * t0 * t1 / d2;
    if !(a < 0.0) {
        return Peak { t: t1, value_db: y1, at_boundary: false };
    }
    let t = (-b / (2.0 * a)).clamp(t0, t2);
    Peak { t, value_db: a * t * t + b * t + c, at_boundary: false }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub axis_value: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    pub peak_db: f64,
    pub peak_time: f64,
}

pub fn write_scan_csv(rows: &[ScanRow], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "axis_value,C1,peak_xi_inv2_dB,peak_time_gamma_op_t")?;
    for r in rows {
        writeln!(w, "{},{:.12e},{:.12e},{:.12e}", r.axis_value, r.c1, r.peak_db, r.peak_time)?;
    }
    Ok(())
}
