//! Straight-line least squares in log space, for exponential and power-law
//! trends in scan output.

use crate::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    /// Standard errors from the residual scatter.
    pub intercept_err: f64,
    pub slope_err: f64,
    /// Euclidean norm of the residuals (log space).
    pub residual_norm: f64,
}

fn line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n != ys.len() {
        return Err(Error::FitInput(format!("{} abscissae but {} ordinates", n, ys.len())));
    }
    if n < 4 {
        return Err(Error::FitInput(format!("need at least 4 points, got {n}")));
    }
    if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
        return Err(Error::FitInput(format!("non-finite abscissa {x}")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::FitInput("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let s2 = ss / (nf - 2.0);
    Ok(LineFit {
        intercept,
        slope,
        intercept_err: (s2 * (1.0 / nf + mx * mx / sxx)).sqrt(),
        slope_err: (s2 / sxx).sqrt(),
        residual_norm: ss.sqrt(),
    })
}

fn logs(ys: &[f64]) -> Result<Vec<f64>> {
    ys.iter()
        .map(|&y| {
            if y > 0.0 && y.is_finite() {
                Ok(y.ln())
            } else {
                Err(Error::FitInput(format!("ordinate {y} is not positive")))
            }
        })
        .collect()
}

/// `y = A e^{-β x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpFit {
    pub amplitude: f64,
    pub beta: f64,
    pub beta_err: f64,
    pub residual_norm: f64,
}

pub fn fit_exponential(xs: &[f64], ys: &[f64]) -> Result<ExpFit> {
    let l = line(xs, &logs(ys)?)?;
    Ok(ExpFit { amplitude: l.intercept.exp(), beta: -l.slope, beta_err: l.slope_err, residual_norm: l.residual_norm })
}

/// `y = c x^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    pub prefactor: f64,
    pub exponent: f64,
    pub exponent_err: f64,
    pub residual_norm: f64,
}

pub fn fit_powerlaw(xs: &[f64], ys: &[f64]) -> Result<PowerFit> {
    let lx = logs(xs)?;
    let l = line(&lx, &logs(ys)?)?;
    Ok(PowerFit {
        prefactor: l.intercept.exp(),
        exponent: l.slope,
        exponent_err: l.slope_err,
        residual_norm: l.residual_norm,
    })
}
