//! Analytic HE11 mode of a step-index cylinder.

use super::{check_wavelength, Geometry, Polarization};
use crate::consts::{wavenumber, NM};
use crate::quadrature::GaussLegendre;
use crate::special::{bessel_j01, bessel_j2, bessel_k01_scaled, bessel_k_scaled};
use crate::{Error, Result};
use num_complex::Complex64;

/// First zero of J_0: the LP11/TE01/TM01 cutoff.
pub const SINGLE_MODE_CUTOFF: f64 = 2.404_825_557_695_773;

/// Solved HE11 mode; evaluates either polarization.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderMode {
    pub radius: f64,
    pub n_core: f64,
    pub n_clad: f64,
    pub k0: f64,
    pub beta: f64,
    /// Core transverse wavenumber, 1/m.
    pub h: f64,
    /// Cladding decay constant, 1/m.
    pub q: f64,
    /// HE11 field parameter.
    pub s: f64,
    scale: f64,
}

fn params(geom: &Geometry) -> Result<(f64, f64, f64)> {
    geom.validate()?;
    match *geom {
        Geometry::Cylinder { radius_nm, n_core, n_clad } => Ok((radius_nm * NM, n_core, n_clad)),
        Geometry::Rectangle { .. } => Err(Error::GeometryMismatch {
            expected: "cylinder".into(),
            found: "rectangle".into(),
        }),
    }
}

/// `J1'(U) / (U J1(U))`
fn j_ratio(u: f64) -> f64 {
    let (j0, j1) = bessel_j01(u);
    (j0 / j1 - 1.0 / u) / u
}

/// `K1'(W) / (W K1(W))`
fn k_ratio(w: f64) -> f64 {
    let (k0, k1) = bessel_k01_scaled(w);
    (-k0 / k1 - 1.0 / w) / w
}

/// Normalised residual of the HE11 characteristic equation at core parameter `u`
/// for fiber parameter `v`.
fn residual_u(u: f64, v: f64, n1: f64, n2: f64) -> f64 {
    let w = (v * v - u * u).sqrt();
    let (jr, kr) = (j_ratio(u), k_ratio(w));
    let lhs = (jr + kr) * (jr + (n2 / n1).powi(2) * kr);
    // (β/(n1 k0))² = 1 - U²(1 - n2²/n1²)/V²
    let b2 = 1.0 - u * u * (1.0 - (n2 / n1).powi(2)) / (v * v);
    let t = 1.0 / (u * u) + 1.0 / (w * w);
    let rhs = b2 * t * t;
    (lhs - rhs) / rhs
}

/// Residual of the characteristic equation for a given propagation constant
/// (rad/m), normalised by its right-hand side.
pub fn characteristic_residual(geom: &Geometry, wavelength_nm: f64, beta: f64) -> Result<f64> {
    let (a, n1, n2) = params(geom)?;
    let k0 = wavenumber(wavelength_nm);
    let u = a * (n1 * n1 * k0 * k0 - beta * beta).sqrt();
    let v = k0 * a * (n1 * n1 - n2 * n2).sqrt();
    Ok(residual_u(u, v, n1, n2))
}

/// Propagation constant (rad/m) of the HE11 mode.
pub fn solve_cylinder_dispersion(geom: &Geometry, wavelength_nm: f64) -> Result<f64> {
    check_wavelength(wavelength_nm)?;
    let (a, n1, n2) = params(geom)?;
    let k0 = wavenumber(wavelength_nm);
    let v = k0 * a * (n1 * n1 - n2 * n2).sqrt();
    if v >= SINGLE_MODE_CUTOFF {
        log::warn!("fiber is not single-mode: V = {v:.4} >= {SINGLE_MODE_CUTOFF:.4}");
    }
    let hi = v.min(SINGLE_MODE_CUTOFF) * (1.0 - 1e-9);
    let f = |u: f64| residual_u(u, v, n1, n2);
    let samples = 4000;
    let mut prev_u = hi * 1e-6;
    let mut prev_f = f(prev_u);
    for i in 1..=samples {
        let u = hi * i as f64 / samples as f64;
        let fu = f(u);
        if fu.is_finite() && prev_f.is_finite() && fu.signum() != prev_f.signum() {
            let u_root = brent(f, prev_u, u, 1e-15)?;
            let beta = (n1 * n1 * k0 * k0 - (u_root / a).powi(2)).sqrt();
            return Ok(beta);
        }
        prev_u = u;
        prev_f = fu;
    }
    Err(Error::NoGuidedMode { v_number: v })
}

/// Brent's method on a bracketing interval.
fn brent(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> Result<f64> {
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.signum() == fb.signum() {
        return Err(Error::Domain { what: "root bracket", value: a });
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut bisected = true;
    for _ in 0..200 {
        if fb == 0.0 || (b - a).abs() < xtol * b.abs().max(1.0) {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let out_of_range = !((s > lo.min(b)) && (s < lo.max(b)));
        let slow = if bisected {
            (s - b).abs() >= (b - c).abs() / 2.0
        } else {
            (s - b).abs() >= (c - d).abs() / 2.0
        };
        if out_of_range || slow {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa.signum() != fs.signum() {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Ok(b)
}

impl CylinderMode {
    pub fn solve(geom: &Geometry, wavelength_nm: f64) -> Result<Self> {
        let beta = solve_cylinder_dispersion(geom, wavelength_nm)?;
        Self::from_beta(geom, wavelength_nm, beta)
    }

    pub fn from_beta(geom: &Geometry, wavelength_nm: f64, beta: f64) -> Result<Self> {
        let (a, n1, n2) = params(geom)?;
        let k0 = wavenumber(wavelength_nm);
        let h = (n1 * n1 * k0 * k0 - beta * beta).sqrt();
        let q = (beta * beta - n2 * n2 * k0 * k0).sqrt();
        let (u, w) = (h * a, q * a);
        let s = (1.0 / (u * u) + 1.0 / (w * w)) / (j_ratio(u) + k_ratio(w));
        let mut mode = CylinderMode { radius: a, n_core: n1, n_clad: n2, k0, beta, h, q, s, scale: 1.0 };
        let norm = mode.raw_norm_squared();
        mode.scale = 1.0 / norm.sqrt();
        // Gauge: dominant transverse component positive at the intensity peak.
        let mut best = (0.0, 0.0);
        for i in 0..=60 {
            let r = 2.0 * a * i as f64 / 60.0;
            for k in 0..8 {
                let phi = std::f64::consts::FRAC_PI_4 * k as f64;
                let e = mode.raw_h(r, phi);
                let mag = e.iter().map(|c| c.norm_sqr()).sum::<f64>();
                if mag > best.0 {
                    let dom = if e[0].re.abs() >= e[1].re.abs() { e[0].re } else { e[1].re };
                    best = (mag, dom);
                }
            }
        }
        if best.1 < 0.0 {
            mode.scale = -mode.scale;
        }
        Ok(mode)
    }

    pub fn u(&self) -> f64 {
        self.h * self.radius
    }

    pub fn w(&self) -> f64 {
        self.q * self.radius
    }

    pub fn v_number(&self) -> f64 {
        self.k0 * self.radius * (self.n_core.powi(2) - self.n_clad.powi(2)).sqrt()
    }

    /// Cylindrical profiles `(e_r, e_φ, e_z)` before normalisation.
    fn profiles(&self, r: f64) -> (f64, f64, f64) {
        let (b, s) = (self.beta, self.s);
        if r < self.radius {
            let hr = self.h * r;
            let (j0, j1) = bessel_j01(hr);
            let j2 = bessel_j2(hr);
            let c = b / (2.0 * self.h);
            (c * ((1.0 - s) * j0 - (1.0 + s) * j2), -c * ((1.0 - s) * j0 + (1.0 + s) * j2), j1)
        } else {
            let (qa, qr) = (self.w(), self.q * r);
            let j1a = bessel_j01(self.u()).1;
            // K_n(qr)/K_1(qa) with exponential scaling
            let damp = (qa - qr).exp() / bessel_k_scaled(1, qa);
            let (k0, k1, k2) = (
                bessel_k_scaled(0, qr) * damp,
                bessel_k_scaled(1, qr) * damp,
                bessel_k_scaled(2, qr) * damp,
            );
            let c = j1a * b / (2.0 * self.q);
            (c * ((1.0 - s) * k0 + (1.0 + s) * k2), -c * ((1.0 - s) * k0 - (1.0 + s) * k2), j1a * k1)
        }
    }

    /// Unnormalised H-polarized Cartesian field at polar position.
    fn raw_h(&self, r: f64, phi: f64) -> [Complex64; 3] {
        let (er, ep, ez) = self.profiles(r);
        let (sp, cp) = phi.sin_cos();
        let e_r = er * cp;
        let e_p = ep * sp;
        [
            Complex64::new(e_r * cp - e_p * sp, 0.0),
            Complex64::new(e_r * sp + e_p * cp, 0.0),
            Complex64::new(0.0, -ez * cp),
        ]
    }

    fn raw_norm_squared(&self) -> f64 {
        let gl = GaussLegendre::new(24);
        let a = self.radius;
        let dens = |r: f64| {
            let (er, ep, ez) = self.profiles(r);
            (er * er + ep * ep + ez * ez) * r
        };
        let inner = gl.integrate(0.0, a, 8, dens);
        let outer = gl.integrate(a, a + 60.0 / self.q, 120, dens);
        std::f64::consts::PI * (inner + outer)
    }

    /// Normalisation integral of the stored (normalised) field.
    pub fn norm_squared(&self) -> f64 {
        self.raw_norm_squared() * self.scale * self.scale
    }

    /// Normalised field (m⁻¹) at a position in nm.
    pub fn field(&self, pol: Polarization, x_nm: f64, y_nm: f64) -> [Complex64; 3] {
        let (x, y) = (x_nm * NM, y_nm * NM);
        let e = match pol {
            Polarization::H => self.raw_h(x.hypot(y), y.atan2(x)),
            Polarization::V => {
                // u_V(x, y) = R(90°) u_H(y, -x)
                let (xs, ys) = (y, -x);
                let h = self.raw_h(xs.hypot(ys), ys.atan2(xs));
                [-h[1], h[0], h[2]]
            }
        };
        e.map(|c| c * self.scale)
    }
}
