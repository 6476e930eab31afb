//! One- and two-body moments of a permutation-symmetric qutrit ensemble.

use super::basis::UP;
use super::generator::{Generators, Mat9, Vec9};
use crate::{Error, Result};
use num_complex::Complex64;

/// Number of independent symmetric two-body covariances.
pub const N_COV: usize = 45;

/// Position of `(p, q)` with `p <= q` in the packed upper triangle.
pub fn packed_index(p: usize, q: usize) -> usize {
    let (p, q) = if p <= q { (p, q) } else { (q, p) };
    9 * p - p * p.saturating_sub(1) / 2 + (q - p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentState {
    /// Time in units of 1/γ_op.
    pub t: f64,
    pub n_atoms: u64,
    pub f: f64,
    /// `⟨σ_ba⟩` at index `3b + a`.
    pub means: [Complex64; 9],
    /// `⟨Δσ_p⁽¹⁾ Δσ_q⁽²⁾⟩` for `p <= q`, packed by [`packed_index`].
    pub cov: [Complex64; N_COV],
}

impl MomentState {
    /// Every atom in the fiducial state ↑, no correlations.
    pub fn coherent(n_atoms: u64, f: f64) -> Result<Self> {
        if n_atoms < 2 {
            return Err(Error::TooFewAtoms(n_atoms));
        }
        if !(f >= 2.0) {
            return Err(Error::InvalidSpin(f));
        }
        let mut means = [Complex64::default(); 9];
        means[3 * UP + UP] = Complex64::from(1.0);
        Ok(MomentState { t: 0.0, n_atoms, f, means, cov: [Complex64::default(); N_COV] })
    }

    pub fn mean_vec(&self) -> Vec9 {
        Vec9::from_column_slice(&self.means)
    }

    pub fn cov_matrix(&self) -> Mat9 {
        Mat9::from_fn(|p, q| self.cov[packed_index(p, q)])
    }

    pub(crate) fn from_parts(t: f64, n_atoms: u64, f: f64, m: &Vec9, c: &Mat9) -> Self {
        let mut means = [Complex64::default(); 9];
        means.copy_from_slice(m.as_slice());
        let mut cov = [Complex64::default(); N_COV];
        for p in 0..9 {
            for q in p..9 {
                cov[packed_index(p, q)] = 0.5 * (c[(p, q)] + c[(q, p)]);
            }
        }
        MomentState { t, n_atoms, f, means, cov }
    }

    pub fn population(&self, a: usize) -> f64 {
        self.means[4 * a].re
    }

    /// Largest violation of `⟨σ_ba⟩ = ⟨σ_ab⟩*` and its two-body analogue.
    pub fn hermiticity_error(&self) -> f64 {
        let conj = |k: usize| 3 * (k % 3) + k / 3;
        let mut err: f64 = 0.0;
        for k in 0..9 {
            err = err.max((self.means[k] - self.means[conj(k)].conj()).norm());
        }
        for p in 0..9 {
            for q in p..9 {
                let a = self.cov[packed_index(p, q)];
                let b = self.cov[packed_index(conj(p), conj(q))];
                err = err.max((a - b.conj()).norm());
            }
        }
        err
    }

    /// Per-atom `⟨O⟩` for an operator with coefficient vector `c`.
    pub fn expect(&self, c: &Vec9) -> Complex64 {
        c.dot(&self.mean_vec())
    }

    /// Two-body `⟨ΔA⁽¹⁾ΔB⁽²⁾⟩`.
    pub fn two_body(&self, a: &Vec9, b: &Vec9) -> Complex64 {
        a.dot(&(self.cov_matrix() * b))
    }

    /// Collective `⟨ΔF_z²⟩ = N⟨Δf_z²⟩ + N(N-1)⟨Δf_z⁽¹⁾Δf_z⁽²⁾⟩`.
    pub fn collective_variance_fz(&self, g: &Generators) -> f64 {
        let n = self.n_atoms as f64;
        let one = self.expect(&g.fz2).re - self.expect(&g.fz).re.powi(2);
        n * one + n * (n - 1.0) * self.two_body(&g.fz, &g.fz).re
    }

    /// `ξ² = 2Nf ⟨ΔF_z²⟩ / ⟨F_x⟩²`.
    pub fn squeezing_parameter(&self, g: &Generators) -> Result<f64> {
        let n = self.n_atoms as f64;
        let fx = n * self.expect(&g.fx).re;
        if fx.abs() < 1e-9 * n * self.f {
            return Err(Error::DegenerateMean(fx));
        }
        Ok(2.0 * n * self.f * self.collective_variance_fz(g) / (fx * fx))
    }
}
