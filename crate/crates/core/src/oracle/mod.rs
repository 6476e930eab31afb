//! Brute-force density-matrix integrations used to validate the moment
//! hierarchy: one atom under pumping (rotating and lab frame) and a pair of
//! atoms under the full stochastic master equation.

mod lab_frame;
mod pair;
mod report;
mod single_atom;

pub use lab_frame::{exact_lab_frame_pumping, rwa_deviation, LabFrameRun};
pub use pair::{exact_pair_sme, moment_pair, PairSample, PairSmeParams};
pub use report::{ComparisonReport, Deviation};
pub use single_atom::{exact_single_atom_pumping, MeansSample};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub(crate) type CMat = DMatrix<Complex64>;

/// Classic fourth-order Runge–Kutta step for a linear matrix ODE.
pub(crate) fn rk4(rho: &CMat, t: f64, dt: f64, rhs: &impl Fn(f64, &CMat) -> CMat) -> CMat {
    let half = Complex64::from(0.5 * dt);
    let k1 = rhs(t, rho);
    let k2 = rhs(t + 0.5 * dt, &(rho + &k1 * half));
    let k3 = rhs(t + 0.5 * dt, &(rho + &k2 * half));
    let k4 = rhs(t + dt, &(rho + &k3 * Complex64::from(dt)));
    rho + (k1 + k2 * Complex64::from(2.0) + k3 * Complex64::from(2.0) + k4) * Complex64::from(dt / 6.0)
}

/// `⟨σ_ba⟩ = ρ[a, b]` for the 3×3 block, indexed `3b + a`.
pub(crate) fn means_of(rho: &CMat) -> [Complex64; 9] {
    let mut m = [Complex64::default(); 9];
    for b in 0..3 {
        for a in 0..3 {
            m[3 * b + a] = rho[(a, b)];
        }
    }
    m
}
