use super::{rk4, single_atom::exact_single_atom_pumping, CMat};
use crate::moments::full_spin_matrices;
use crate::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Cycle-averaged qutrit populations from the lab-frame pumping equation,
/// next to the rotating-wave result at the same time.
#[derive(Debug, Clone, PartialEq)]
pub struct LabFrameRun {
    pub omega0: f64,
    pub gamma: f64,
    pub t_eval: f64,
    /// ↑, ↓, T populations in the rotating frame, averaged over one Larmor period.
    pub lab: [f64; 3],
    pub rwa: [f64; 3],
}

impl LabFrameRun {
    pub fn deviation(&self) -> f64 {
        rwa_deviation(&self.lab, &self.rwa)
    }
}

/// Largest population error relative to the largest RWA population.
pub fn rwa_deviation(lab: &[f64; 3], rwa: &[f64; 3]) -> f64 {
    let scale = rwa.iter().fold(0.0f64, |a, p| a.max(p.abs()));
    lab.iter().zip(rwa).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale
}

/// Zeeman rotation `U(t) = exp(-i Ω₀ t f_z)` on the full manifold.
struct Rotation {
    vecs: DMatrix<f64>,
    vals: Vec<f64>,
}

impl Rotation {
    fn new(fz: &CMat) -> Self {
        let re = fz.map(|z| z.re);
        let e = SymmetricEigen::new(re);
        Rotation { vecs: e.eigenvectors, vals: e.eigenvalues.iter().copied().collect() }
    }

    fn at(&self, phase: f64) -> CMat {
        let d = self.vals.len();
        let v = self.vecs.map(Complex64::from);
        let diag = CMat::from_fn(d, d, |r, c| {
            if r == c {
                Complex64::from_polar(1.0, -phase * self.vals[r])
            } else {
                Complex64::default()
            }
        });
        &v * diag * v.transpose()
    }
}

/// One atom in the full `2f+1` manifold under the lab-frame pumping
/// generator with Zeeman precession at `omega0` about z:
///
/// `dρ/dt = -i Ω₀ [f_z, ρ] - γ ρ + γ/(8f²) (f₊ ρ f₋ + f₋ ρ f₊)`.
///
/// The equation is integrated in the interaction picture of the Zeeman
/// term, which is exactly the rotating frame, with RK4 and at least 40 steps
/// per Larmor period. Populations of `m_x = f, f-1, f-2` are averaged over
/// the period centered on `t_eval`.
pub fn exact_lab_frame_pumping(omega0: f64, gamma: f64, f: f64, t_eval: f64) -> Result<LabFrameRun> {
    if !(omega0 >= 0.0 && gamma > 0.0 && t_eval > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lab-frame run needs Ω₀ >= 0, γ > 0, t > 0 (got {omega0}, {gamma}, {t_eval})"
        )));
    }
    let (_, fy, fz) = full_spin_matrices(f)?;
    let d = fz.nrows();
    let rot = Rotation::new(&fz);
    let w = Complex64::from(gamma / (8.0 * f * f));
    let i = Complex64::i();
    // f₊ρf₋ + f₋ρf₊ = 2 (f_z ρ f_z + f_y ρ f_y); only f_y rotates.
    let rhs = |t: f64, r: &CMat| {
        let u = rot.at(omega0 * t);
        let fy_t = u.adjoint() * &fy * &u;
        let fp = &fz + &fy_t * i;
        let fm = &fz - &fy_t * i;
        r * Complex64::from(-gamma) + (&fp * r * &fm + &fm * r * &fp) * w
    };
    let mut rho = CMat::zeros(d, d);
    rho[(0, 0)] = Complex64::from(1.0);
    let pops = |r: &CMat| [r[(0, 0)].re, r[(1, 1)].re, r[(2, 2)].re];

    // Step ceiling keeps the slow dynamics resolved when Ω₀ is small.
    let dt_max = 1e-3 / gamma;
    let lab = if omega0 == 0.0 {
        let n = (t_eval / dt_max).ceil() as usize;
        let dt = t_eval / n as f64;
        for k in 0..n {
            rho = rk4(&rho, k as f64 * dt, dt, &rhs);
        }
        pops(&rho)
    } else {
        let period = 2.0 * PI / omega0;
        let per = ((period / dt_max).ceil() as usize).max(40).next_multiple_of(2);
        let dt = period / per as f64;
        let start = t_eval - 0.5 * period;
        let mut t = 0.0;
        if start > 0.0 {
            let n = (start / dt).ceil() as usize;
            let h = start / n as f64;
            for k in 0..n {
                rho = rk4(&rho, k as f64 * h, h, &rhs);
            }
            t = start;
        }
        // Averaging window; clipped at zero when the period exceeds 2 t_eval.
        let n = ((t_eval + 0.5 * period - t) / dt).round() as usize;
        let mut acc = [0.0; 3];
        let mut prev = pops(&rho);
        for k in 0..n {
            rho = rk4(&rho, t + k as f64 * dt, dt, &rhs);
            let cur = pops(&rho);
            for a in 0..3 {
                acc[a] += 0.5 * (prev[a] + cur[a]) * dt;
            }
            prev = cur;
        }
        let span = n as f64 * dt;
        acc.map(|x| x / span)
    };

    let dt_rwa = dt_max.min(t_eval / 100.0);
    let n = (t_eval / dt_rwa).ceil();
    let run = exact_single_atom_pumping(gamma, f, t_eval, t_eval / n)?;
    let m = run.last().expect("nonempty").means;
    let rwa = [m[0].re, m[4].re, m[8].re];
    Ok(LabFrameRun { omega0, gamma, t_eval, lab, rwa })
}
