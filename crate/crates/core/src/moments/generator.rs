//! Linear maps on the nine one-body means, built from 3×3 operator algebra.
//!
//! Means are stored as `m[3b + a] = ⟨σ_ba⟩` with `σ_ba = |b⟩⟨a|`, so an
//! operator `X` has expectation `Σ X[b,a] m[3b+a]`.

use super::basis::{Op3, QutritBasis};
use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

pub type Mat9 = SMatrix<Complex64, 9, 9>;
pub type Vec9 = SVector<Complex64, 9>;

pub(crate) fn unit(b: usize, a: usize) -> Op3 {
    let mut x = Op3::zeros();
    x[(b, a)] = Complex64::from(1.0);
    x
}

/// Coefficient vector of an operator: `⟨X⟩ = coeffs(X) · m`.
pub fn coeffs(x: &Op3) -> Vec9 {
    Vec9::from_fn(|k, _| x[(k / 3, k % 3)])
}

/// Matrix `M` of a Heisenberg-picture map `S`: `⟨S[σ_ba]⟩ = Σ M[ba, dc] ⟨σ_dc⟩`.
pub fn heisenberg_matrix(s: impl Fn(&Op3) -> Op3) -> Mat9 {
    let mut m = Mat9::zeros();
    for b in 0..3 {
        for a in 0..3 {
            let y = s(&unit(b, a));
            for d in 0..3 {
                for c in 0..3 {
                    m[(3 * b + a, 3 * d + c)] = y[(d, c)];
                }
            }
        }
    }
    m
}

/// Adjoint of the rotating-frame pumping dissipator, rate γ:
/// `D†[X] = -γX + (γ/8f²)(f_x X f_x + f_y X f_y + 2 f_z X f_z)`.
pub fn pumping_adjoint(basis: &QutritBasis, gamma: f64, x: &Op3) -> Op3 {
    let f = basis.f;
    let (fx, fy, fz) = (&basis.fx, &basis.fy, &basis.fz);
    let feed = fx * x * fx + fy * x * fy + fz * x * fz * Complex64::from(2.0);
    x * Complex64::from(-gamma) + feed * Complex64::from(gamma / (8.0 * f * f))
}

/// Adjoint of the measurement decoherence `L†[X] = f_z X f_z - ½{f_z², X}`.
pub fn qnd_adjoint(basis: &QutritBasis, x: &Op3) -> Op3 {
    let fz = &basis.fz;
    let fz2 = fz * fz;
    fz * x * fz - (fz2 * x + x * fz2) * Complex64::from(0.5)
}

/// Precomputed maps for a given spin.
#[derive(Debug, Clone)]
pub struct Generators {
    /// Pumping at unit rate.
    pub pumping: Mat9,
    /// `L†` (local part of the collective measurement dissipator).
    pub qnd: Mat9,
    /// `X ↦ ½{f_z, X}`
    pub anticomm: Mat9,
    /// `X ↦ [f_z, X]`
    pub comm: Mat9,
    pub fz: Vec9,
    pub fz2: Vec9,
    pub fx: Vec9,
}

impl Generators {
    pub fn new(basis: &QutritBasis) -> Self {
        let fz = basis.fz;
        Generators {
            pumping: heisenberg_matrix(|x| pumping_adjoint(basis, 1.0, x)),
            qnd: heisenberg_matrix(|x| qnd_adjoint(basis, x)),
            anticomm: heisenberg_matrix(|x| (fz * x + x * fz) * Complex64::from(0.5)),
            comm: heisenberg_matrix(|x| fz * x - x * fz),
            fz: coeffs(&fz),
            fz2: coeffs(&(fz * fz)),
            fx: coeffs(&basis.fx),
        }
    }
}
