//! Group index by centred differences of β(ω).

use super::{check_wavelength, Geometry, RectOptions, TransverseGrid};
use crate::consts::{angular_frequency, SPEED_OF_LIGHT};
use crate::Result;

/// Relative wavelength step for the centred difference.
pub const DEFAULT_GROUP_INDEX_STEP: f64 = 1e-3;

/// `n_g = c dβ/dω` from a propagation-constant solver `beta_of(λ_nm)` (rad/m),
/// using λ(1 ± δ).
pub fn group_index_with(
    mut beta_of: impl FnMut(f64) -> Result<f64>,
    wavelength_nm: f64,
    delta: f64,
) -> Result<f64> {
    check_wavelength(wavelength_nm)?;
    let (lo, hi) = (wavelength_nm * (1.0 - delta), wavelength_nm * (1.0 + delta));
    let (b_lo, b_hi) = (beta_of(lo)?, beta_of(hi)?);
    let dw = angular_frequency(lo) - angular_frequency(hi);
    Ok(SPEED_OF_LIGHT * (b_lo - b_hi) / dw)
}

/// Group index of the fundamental mode. Uses the analytic dispersion relation
/// for a cylinder and the finite-difference solver on the default grid for a
/// rectangle.
pub fn group_index(geom: &Geometry, wavelength_nm: f64, delta: Option<f64>) -> Result<f64> {
    let delta = delta.unwrap_or(DEFAULT_GROUP_INDEX_STEP);
    match geom {
        Geometry::Cylinder { .. } => {
            group_index_with(|l| super::solve_cylinder_dispersion(geom, l), wavelength_nm, delta)
        }
        Geometry::Rectangle { .. } => {
            let grid = TransverseGrid::default_for(geom, wavelength_nm);
            let opts = RectOptions { convergence_check: false, ..RectOptions::default() };
            group_index_with(
                |l| super::rect::solve_beta(geom, l, &grid, &opts, None).map(|(b, _)| b),
                wavelength_nm,
                delta,
            )
        }
    }
}
