//! Physical constants (SI, CODATA 2018 exact values where defined).

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const HBAR: f64 = 1.054_571_817e-34;

pub const NM: f64 = 1e-9;

/// Angular frequency (rad/s) of light with vacuum wavelength `wavelength_nm`.
pub fn angular_frequency(wavelength_nm: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / (wavelength_nm * NM)
}

/// Vacuum wavenumber (rad/m).
pub fn wavenumber(wavelength_nm: f64) -> f64 {
    2.0 * std::f64::consts::PI / (wavelength_nm * NM)
}
