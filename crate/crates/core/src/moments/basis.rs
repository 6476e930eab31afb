//! Qutrit truncation of a spin-f hyperfine manifold along x.
//!
//! Levels are ordered ↑, ↓, T with `m_x = f, f-1, f-2`.

use crate::{Error, Result};
use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;

pub type Op3 = Matrix3<Complex64>;

pub const UP: usize = 0;
pub const DOWN: usize = 1;
pub const TRANSFER: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct QutritBasis {
    pub f: f64,
    pub fx: Op3,
    pub fy: Op3,
    pub fz: Op3,
}

impl QutritBasis {
    /// `f_+ = f_z + i f_y`, raising `m_x`.
    pub fn f_plus(&self) -> Op3 {
        self.fz + self.fy * Complex64::i()
    }

    pub fn f_minus(&self) -> Op3 {
        self.fz - self.fy * Complex64::i()
    }
}

/// Spin-f operators on the full `2f+1` manifold in the `m_x` eigenbasis,
/// ordered `m_x = f, f-1, …, -f`. Returns `(f_x, f_y, f_z)`.
pub fn full_spin_matrices(f: f64) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>, DMatrix<Complex64>)> {
    let dim2 = 2.0 * f;
    if !(f >= 0.5 && (dim2 - dim2.round()).abs() < 1e-12) {
        return Err(Error::InvalidSpin(f));
    }
    let d = dim2.round() as usize + 1;
    let m = |k: usize| f - k as f64;
    let fx = DMatrix::from_fn(d, d, |r, c| if r == c { Complex64::from(m(r)) } else { Complex64::default() });
    // raising: <m+1|F+|m> = sqrt(f(f+1) - m(m+1)); index k-1 has m+1
    let fp = DMatrix::from_fn(d, d, |r, c| {
        if r + 1 == c {
            let mm = m(c);
            Complex64::from((f * (f + 1.0) - mm * (mm + 1.0)).sqrt())
        } else {
            Complex64::default()
        }
    });
    let fm = fp.adjoint();
    let fz = (&fp + &fm) * Complex64::from(0.5);
    let fy = (&fp - &fm) * Complex64::new(0.0, -0.5);
    Ok((fx, fy, fz))
}

/// Qutrit spin operators, truncated from the full manifold.
pub fn build_spin_matrices(f: f64) -> Result<QutritBasis> {
    if !(f >= 2.0) {
        return Err(Error::InvalidSpin(f));
    }
    let (fx, fy, fz) = full_spin_matrices(f)?;
    let trunc = |m: &DMatrix<Complex64>| Op3::from_fn(|r, c| m[(r, c)]);
    Ok(QutritBasis { f, fx: trunc(&fx), fy: trunc(&fy), fz: trunc(&fz) })
}
