use super::{means_of, rk4, CMat};
use crate::moments::basis::Op3;
use crate::moments::build_spin_matrices;
use crate::Result;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct MeansSample {
    pub t: f64,
    /// `⟨σ_ba⟩` at index `3b + a`.
    pub means: [Complex64; 9],
}

/// Rotating-frame pumping of one atom, integrated with RK4 on the qutrit
/// density matrix starting in ↑. Time in units of 1/γ_op when `gamma = 1`.
pub fn exact_single_atom_pumping(gamma: f64, f: f64, t_max: f64, dt: f64) -> Result<Vec<MeansSample>> {
    let b = build_spin_matrices(f)?;
    let to_d = |m: &Op3| CMat::from_fn(3, 3, |r, c| m[(r, c)]);
    let (fx, fy, fz) = (to_d(&b.fx), to_d(&b.fy), to_d(&b.fz));
    let w = Complex64::from(gamma / (8.0 * f * f));
    let rhs = |_t: f64, r: &CMat| {
        let feed = &fx * r * &fx + &fy * r * &fy + &fz * r * &fz * Complex64::from(2.0);
        r * Complex64::from(-gamma) + feed * w
    };
    let mut rho = CMat::zeros(3, 3);
    rho[(0, 0)] = Complex64::from(1.0);
    let steps = (t_max / dt).round() as usize;
    let mut out = vec![MeansSample { t: 0.0, means: means_of(&rho) }];
    for k in 0..steps {
        rho = rk4(&rho, k as f64 * dt, dt, &rhs);
        out.push(MeansSample { t: (k + 1) as f64 * dt, means: means_of(&rho) });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_is_frozen() {
        let run = exact_single_atom_pumping(0.0, 4.0, 1.0, 0.1).unwrap();
        assert_eq!(run.first().unwrap().means, run.last().unwrap().means);
    }

    #[test]
    fn initial_decay_rate() {
        let dt = 1e-6;
        let run = exact_single_atom_pumping(1.0, 4.0, dt, dt).unwrap();
        let rate = (run[1].means[0].re - 1.0) / dt;
        assert!((rate + 7.0 / 8.0).abs() < 1e-5, "{rate}");
    }
}
