//! Position-dependent Faraday coupling of a single atom to a pair of
//! degenerate guided modes.
//!
//! The H mode is the probe input; the V mode receives the scattered photons.
//! All rates are in s⁻¹, areas in m², positions in nm.

use crate::consts::{angular_frequency, HBAR, NM};
use crate::waveguide::{Geometry, GuidedMode, Polarization};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Line {
    D1,
    D2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicSpecies {
    pub name: String,
    /// Hyperfine spin of the probed ground manifold.
    pub f: f64,
    /// Natural linewidth Γ, rad/s.
    pub linewidth: f64,
    pub wavelength_nm: f64,
    pub line: Line,
}

impl AtomicSpecies {
    /// Cs 6S½ f = 4 on the D2 line.
    pub fn cesium_d2() -> Self {
        AtomicSpecies {
            name: "Cs".into(),
            f: 4.0,
            linewidth: 2.0 * PI * 5.2e6,
            wavelength_nm: 852.35,
            line: Line::D2,
        }
    }

    /// Vector polarizability coefficient relative to the characteristic one.
    pub fn c_f(&self) -> f64 {
        match self.line {
            Line::D1 => -1.0 / (3.0 * self.f),
            Line::D2 => 1.0 / (3.0 * self.f),
        }
    }

    /// Resonant cross section `6π/k²`, m².
    pub fn sigma0(&self) -> f64 {
        let k = 2.0 * PI / (self.wavelength_nm * NM);
        6.0 * PI / (k * k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeConfig {
    pub power_w: f64,
    /// Signed detuning from the atomic line, rad/s.
    pub detuning: f64,
    pub wavelength_nm: f64,
}

impl ProbeConfig {
    pub fn omega(&self) -> f64 {
        angular_frequency(self.wavelength_nm)
    }
}

/// H and V fundamental modes of one guide at one wavelength.
#[derive(Debug, Clone)]
pub struct ModePair {
    pub h: GuidedMode,
    pub v: GuidedMode,
    floor: f64,
}

impl ModePair {
    pub fn new(h: GuidedMode, v: GuidedMode) -> Result<Self> {
        if h.polarization != Polarization::H || v.polarization != Polarization::V {
            return Err(Error::InvalidParameter("mode pair must be (H, V)".into()));
        }
        if h.geometry != v.geometry || h.wavelength_nm != v.wavelength_nm {
            return Err(Error::InvalidParameter("modes differ in geometry or wavelength".into()));
        }
        let peak = intensity(&h.field_at(0.0, 0.0));
        Ok(ModePair { h, v, floor: 1e-18 * peak })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.h.geometry
    }

    pub fn n_g(&self) -> f64 {
        self.h.n_g
    }

    fn singular(&self, x_nm: f64, y_nm: f64) -> Error {
        Error::SingularPosition { x_nm, y_nm }
    }
}

fn intensity(u: &[Complex64; 3]) -> f64 {
    u.iter().map(|c| c.norm_sqr()).sum()
}

/// `|Re(u_V* × u_H)|` at a point.
pub fn faraday_overlap(pair: &ModePair, x_nm: f64, y_nm: f64) -> f64 {
    let a = pair.v.field_at(x_nm, y_nm).map(|c| c.conj());
    let b = pair.h.field_at(x_nm, y_nm);
    let cross = [
        (a[1] * b[2] - a[2] * b[1]).re,
        (a[2] * b[0] - a[0] * b[2]).re,
        (a[0] * b[1] - a[1] * b[0]).re,
    ];
    cross.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Effective Faraday area `1/(n_g |Re(u_V* × u_H)|)`.
pub fn faraday_area(pair: &ModePair, x_nm: f64, y_nm: f64) -> Result<f64> {
    let o = faraday_overlap(pair, x_nm, y_nm);
    if !(o > pair.floor) {
        return Err(pair.singular(x_nm, y_nm));
    }
    Ok(1.0 / (pair.n_g() * o))
}

/// Effective input area `1/(n_g |u_H|²)`.
pub fn input_area(pair: &ModePair, x_nm: f64, y_nm: f64) -> Result<f64> {
    let i = intensity(&pair.h.field_at(x_nm, y_nm));
    if !(i > pair.floor) {
        return Err(pair.singular(x_nm, y_nm));
    }
    Ok(1.0 / (pair.n_g() * i))
}

fn check_detuning(detuning: f64) -> Result<()> {
    if detuning == 0.0 || !detuning.is_finite() {
        return Err(Error::ZeroDetuning);
    }
    if detuning.abs() < 2.0 * PI * 1e9 {
        log::warn!(
            "|Δ| = 2π×{:.3} GHz is not large compared with the excited hyperfine splitting",
            detuning.abs() / (2.0 * PI * 1e9)
        );
    }
    Ok(())
}

/// Faraday rotation angle per unit collective spin, rad.
pub fn chi3(pair: &ModePair, species: &AtomicSpecies, detuning: f64, x_nm: f64, y_nm: f64) -> Result<f64> {
    check_detuning(detuning)?;
    let a_far = faraday_area(pair, x_nm, y_nm)?;
    Ok(chi3_from_area(species, detuning, a_far))
}

fn chi3_from_area(species: &AtomicSpecies, detuning: f64, a_far: f64) -> f64 {
    -species.c_f() * (species.sigma0() / a_far) * species.linewidth / (2.0 * detuning)
}

/// Measurement strength `κ = χ₃² P/(ħω)`, s⁻¹.
pub fn measurement_strength(chi3: f64, power_w: f64, omega: f64) -> f64 {
    chi3 * chi3 * power_w / (HBAR * omega)
}

/// Optical pumping rate at the atom, s⁻¹.
pub fn pumping_rate(
    pair: &ModePair,
    species: &AtomicSpecies,
    probe: &ProbeConfig,
    x_nm: f64,
    y_nm: f64,
) -> Result<f64> {
    check_detuning(probe.detuning)?;
    let a_in = input_area(pair, x_nm, y_nm)?;
    Ok(pumping_from_area(species, probe, a_in))
}

fn pumping_from_area(species: &AtomicSpecies, probe: &ProbeConfig, a_in: f64) -> f64 {
    let g = species.linewidth;
    let intensity = probe.power_w / a_in;
    (2.0 / 9.0) * species.sigma0() * (g * g / (4.0 * probe.detuning * probe.detuning)) * intensity
        / (HBAR * probe.omega())
}

fn cooperativity_from_areas(species: &AtomicSpecies, a_far: f64, a_in: f64) -> f64 {
    species.sigma0() * a_in / (2.0 * species.f * species.f * a_far * a_far)
}

/// Single-atom cooperativity `κ/γ_op`, independent of probe power and detuning.
pub fn cooperativity(pair: &ModePair, species: &AtomicSpecies, x_nm: f64, y_nm: f64) -> Result<f64> {
    let a_far = faraday_area(pair, x_nm, y_nm)?;
    let a_in = input_area(pair, x_nm, y_nm)?;
    Ok(cooperativity_from_areas(species, a_far, a_in))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingSummary {
    pub x_nm: f64,
    pub y_nm: f64,
    pub a_far_m2: f64,
    pub a_in_m2: f64,
    pub chi3_rad: f64,
    pub kappa_per_s: f64,
    pub gamma_op_per_s: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
}

pub fn coupling_summary(
    pair: &ModePair,
    species: &AtomicSpecies,
    probe: &ProbeConfig,
    x_nm: f64,
    y_nm: f64,
) -> Result<CouplingSummary> {
    check_detuning(probe.detuning)?;
    let a_far = faraday_area(pair, x_nm, y_nm)?;
    let a_in = input_area(pair, x_nm, y_nm)?;
    let chi3 = chi3_from_area(species, probe.detuning, a_far);
    Ok(CouplingSummary {
        x_nm,
        y_nm,
        a_far_m2: a_far,
        a_in_m2: a_in,
        chi3_rad: chi3,
        kappa_per_s: measurement_strength(chi3, probe.power_w, probe.omega()),
        gamma_op_per_s: pumping_from_area(species, probe, a_in),
        c1: cooperativity_from_areas(species, a_far, a_in),
    })
}

/// Scalar maps on a rectangular lattice of points. Points inside the core or
/// at field nulls are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMap {
    pub xs_nm: Vec<f64>,
    pub ys_nm: Vec<f64>,
    /// Row-major with x the slow index.
    pub inv_a_far: Vec<Option<f64>>,
    pub inv_a_in: Vec<Option<f64>>,
    pub c1: Vec<Option<f64>>,
}

impl CouplingMap {
    pub fn get(&self, i: usize, j: usize) -> (Option<f64>, Option<f64>, Option<f64>) {
        let k = i * self.ys_nm.len() + j;
        (self.inv_a_far[k], self.inv_a_in[k], self.c1[k])
    }

    /// CSV with columns `x_nm,y_nm,inv_A_Far_per_m2,inv_A_in_per_m2,C1`;
    /// absent values are empty fields.
    pub fn write_csv(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "x_nm,y_nm,inv_A_Far_per_m2,inv_A_in_per_m2,C1")?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.10e}")).unwrap_or_default();
        for (i, x) in self.xs_nm.iter().enumerate() {
            for (j, y) in self.ys_nm.iter().enumerate() {
                let (a, b, c) = self.get(i, j);
                writeln!(w, "{x},{y},{},{},{}", opt(a), opt(b), opt(c))?;
            }
        }
        Ok(())
    }
}

pub fn coupling_map(pair: &ModePair, species: &AtomicSpecies, xs_nm: &[f64], ys_nm: &[f64]) -> CouplingMap {
    let geom = *pair.geometry();
    let points: Vec<[Option<f64>; 3]> = xs_nm
        .par_iter()
        .flat_map_iter(|&x| {
            ys_nm.iter().map(move |&y| {
                if geom.contains(x, y) {
                    return [None; 3];
                }
                let a_far = faraday_area(pair, x, y).ok();
                let a_in = input_area(pair, x, y).ok();
                let c1 = a_far.zip(a_in).map(|(f, i)| cooperativity_from_areas(species, f, i));
                [a_far.map(f64::recip), a_in.map(f64::recip), c1]
            })
        })
        .collect();
    CouplingMap {
        xs_nm: xs_nm.to_vec(),
        ys_nm: ys_nm.to_vec(),
        inv_a_far: points.iter().map(|p| p[0]).collect(),
        inv_a_in: points.iter().map(|p| p[1]).collect(),
        c1: points.iter().map(|p| p[2]).collect(),
    }
}

/// Linearised Stokes rotation about the 3 axis: `S₂ → S₂ + χ₃ F_z S₁`.
pub fn stokes_output(s_in: [f64; 3], chi3: f64, f_z: f64) -> [f64; 3] {
    [s_in[0], s_in[1] + chi3 * f_z * s_in[0], s_in[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn species_constants() {
        let cs = AtomicSpecies::cesium_d2();
        let k = 2.0 * PI / 852.35e-9;
        assert!((cs.sigma0() / (6.0 * PI / (k * k)) - 1.0).abs() < 1e-14);
        assert!((cs.c_f() - 1.0 / 12.0).abs() < 1e-15);
        let d1 = AtomicSpecies { line: Line::D1, ..cs };
        assert!((d1.c_f() + 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn measurement_strength_scaling() {
        let w = angular_frequency(852.35);
        assert_eq!(measurement_strength(1e-3, 0.0, w), 0.0);
        let k1 = measurement_strength(1e-3, 1e-9, w);
        assert!((measurement_strength(1e-3, 2e-9, w) - 2.0 * k1).abs() < 1e-12 * k1);
        assert!((measurement_strength(0.5e-3, 1e-9, w) - 0.25 * k1).abs() < 1e-12 * k1);
    }

    #[test]
    fn stokes_rotation() {
        let s = [1.0, 0.0, 0.0];
        assert_eq!(stokes_output(s, 1e-6, 0.0), s);
        let d1 = stokes_output(s, 1e-6, 100.0)[1];
        let d2 = stokes_output(s, 1e-6, 200.0)[1];
        assert!((d2 - 2.0 * d1).abs() < 1e-18);
    }
}
