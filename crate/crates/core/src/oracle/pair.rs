use super::report::{ComparisonReport, Deviation};
use super::{rk4, CMat};
use crate::moments::basis::Op3;
use crate::moments::{build_spin_matrices, Generators, Mat9, MomentDynamics, MomentState, Vec9};
use crate::{Error, Result};
use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Two atoms under pumping and continuous measurement of `F_z = f_z⁽¹⁾ + f_z⁽²⁾`.
/// Rates are in units of γ_op.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSmeParams {
    /// `κ/γ_op`.
    pub c1: f64,
    pub f: f64,
    /// Pumping rate; 0 switches pumping off.
    pub pumping: f64,
    pub dt: f64,
    pub t_max: f64,
    pub seed: u64,
    /// Most negative eigenvalue of ρ tolerated before failing. Euler–Maruyama
    /// does not preserve positivity; violations of order `κ dt` are expected.
    pub positivity_tol: f64,
}

impl PairSmeParams {
    pub fn new(c1: f64, f: f64) -> Self {
        PairSmeParams { c1, f, pumping: 1.0, dt: 1e-4, t_max: 1.0, seed: 0, positivity_tol: 1e-3 }
    }

    pub fn steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    /// Wiener increments shared by the exact and moment integrations.
    pub fn increments(&self) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let s = self.dt.sqrt();
        (0..self.steps())
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                s * z
            })
            .collect()
    }
}

/// Exact pair state and its moments at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSample {
    pub t: f64,
    /// Total trace including the absorbing levels; 1 up to round-off.
    pub trace: f64,
    /// Means and symmetric two-body covariances read off ρ.
    pub moments: MomentState,
}

const D: usize = 4;
const SINK: usize = 3;

/// Applies a one-atom map to atom `which` of a two-atom operator with
/// basis index `4·i₁ + i₂`.
fn on_atom(x: &CMat, which: usize, map: &impl Fn(&CMat) -> CMat) -> CMat {
    let idx = |i: usize, c: usize| if which == 0 { D * i + c } else { D * c + i };
    let mut out = CMat::zeros(D * D, D * D);
    for c in 0..D {
        for d in 0..D {
            let sub = CMat::from_fn(D, D, |i, j| x[(idx(i, c), idx(j, d))]);
            let y = map(&sub);
            for i in 0..D {
                for j in 0..D {
                    out[(idx(i, c), idx(j, d))] = y[(i, j)];
                }
            }
        }
    }
    out
}

/// Moments of the pair state restricted to the qutrit levels.
fn moments_of(rho: &CMat, t: f64, f: f64) -> MomentState {
    let r = |a: usize, c: usize, b: usize, d: usize| rho[(D * a + c, D * b + d)];
    // ⟨σ_ba ⊗ 1⟩ = Σ_c ρ[(a,c),(b,c)] and ⟨σ_ba ⊗ σ_dc⟩ = ρ[(a,c),(b,d)]
    let m1 = Vec9::from_fn(|k, _| {
        let (b, a) = (k / 3, k % 3);
        (0..D).map(|c| r(a, c, b, c)).sum()
    });
    let m2 = Vec9::from_fn(|k, _| {
        let (d, c) = (k / 3, k % 3);
        (0..D).map(|a| r(a, c, a, d)).sum()
    });
    let m = (m1 + m2) * Complex64::from(0.5);
    let c = Mat9::from_fn(|p, q| {
        let (b, a) = (p / 3, p % 3);
        let (d, cc) = (q / 3, q % 3);
        r(a, cc, b, d) - m[p] * m[q]
    });
    MomentState::from_parts(t, 2, f, &m, &c)
}

/// Integration of the two-atom stochastic master equation
///
/// `dρ = Σₙ Dₙ[ρ] dt + (C₁/4) L[ρ] dt + √(C₁/4) (ΔF_z ρ + ρ ΔF_z) dW`,
///
/// with `L[ρ] = F_z ρ F_z - ½{F_z², ρ}` and `ΔF_z = F_z - ⟨F_z⟩`. Each atom
/// carries a fourth, absorbing level collecting the population that pumping
/// moves out of the qutrit, so ρ stays normalized and the one-body means are
/// the same objects as in the moment equations. The drift takes a
/// fourth-order step and the noise an explicit (Itô) one. A plain Euler
/// drift would not factor over the atoms and would seed spurious O(dt)
/// correlations. One sample is returned per increment plus the initial state.
pub fn exact_pair_sme(p: &PairSmeParams, dw: &[f64]) -> Result<Vec<PairSample>> {
    let b = build_spin_matrices(p.f)?;
    let to_d = |m: &Op3| CMat::from_fn(3, 3, |r, c| m[(r, c)]);
    let (fx, fy, fz) = (to_d(&b.fx), to_d(&b.fy), to_d(&b.fz));
    let gamma = p.pumping;
    let w = gamma / (8.0 * p.f * p.f);
    let feed_op = (&fx * &fx + &fy * &fy + &fz * &fz * Complex64::from(2.0)) * Complex64::from(w);
    // Rate operator of the leak out of the qutrit.
    let leak = CMat::identity(3, 3) * Complex64::from(gamma) - &feed_op;
    let pump = |x: &CMat| {
        let q = x.view((0, 0), (3, 3)).into_owned();
        let feed = (&fx * &q * &fx + &fy * &q * &fy + &fz * &q * &fz * Complex64::from(2.0)) * Complex64::from(w);
        let mut out = x * Complex64::from(-0.5 * gamma);
        out.view_mut((0, 0), (3, 3)).copy_from(&(q * Complex64::from(-gamma) + feed));
        out[(SINK, SINK)] = (&leak * x.view((0, 0), (3, 3))).trace();
        out
    };
    let mut fz4 = CMat::zeros(D, D);
    fz4.view_mut((0, 0), (3, 3)).copy_from(&fz);
    let id = CMat::identity(D, D);
    let big_fz = fz4.kronecker(&id) + id.kronecker(&fz4);
    let big_fz2 = &big_fz * &big_fz;
    let eta = 0.25 * p.c1;
    let half = Complex64::from(0.5);
    let drift = |r: &CMat| {
        on_atom(r, 0, &pump) + on_atom(r, 1, &pump)
            + (&big_fz * r * &big_fz - (&big_fz2 * r + r * &big_fz2) * half) * Complex64::from(eta)
    };

    let mut rho = CMat::zeros(D * D, D * D);
    rho[(0, 0)] = Complex64::from(1.0);
    let mut t = 0.0;
    let mut out = Vec::with_capacity(dw.len() + 1);
    out.push(PairSample { t, trace: 1.0, moments: moments_of(&rho, t, p.f) });
    for &dw in dw {
        let mean = (&big_fz * &rho).trace();
        let shifted = &big_fz - CMat::identity(D * D, D * D) * mean;
        let noise = &shifted * &rho + &rho * &shifted;
        rho = rk4(&rho, t, p.dt, &|_, r| drift(r)) + noise * Complex64::from(eta.sqrt() * dw);
        t += p.dt;
        check_positive(&rho, t, p.positivity_tol)?;
        out.push(PairSample { t, trace: rho.trace().re, moments: moments_of(&rho, t, p.f) });
    }
    Ok(out)
}

fn check_positive(rho: &CMat, t: f64, tol: f64) -> Result<()> {
    let herm = (rho + rho.adjoint()) * Complex64::from(0.5);
    let min = SymmetricEigen::new(herm).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(Error::PositivityViolation { t, eigenvalue: min });
    }
    Ok(())
}

/// The moment equations for `N = 2` driven by the same increments, with the
/// drift integrated by the midpoint rule.
pub fn moment_pair(p: &PairSmeParams, dw: &[f64]) -> Result<Vec<MomentState>> {
    let mut dynamics = MomentDynamics::new(p.c1, 2, p.f)?;
    dynamics.pumping = p.pumping;
    let mut s = MomentState::coherent(2, p.f)?;
    let mut out = Vec::with_capacity(dw.len() + 1);
    out.push(s.clone());
    for &w in dw {
        s = dynamics.step_split(&s, p.dt, w)?;
        out.push(s.clone());
    }
    Ok(out)
}

impl ComparisonReport {
    /// Runs both integrations on one noise realization and tabulates the
    /// per-observable deviations up to `t_end` (whole run if `None`).
    pub fn pair(p: &PairSmeParams, t_end: Option<f64>) -> Result<Self> {
        let dw = p.increments();
        let exact = exact_pair_sme(p, &dw)?;
        let approx = moment_pair(p, &dw)?;
        let t_end = t_end.unwrap_or(f64::INFINITY);
        let mut rows = Vec::new();
        let names = ["↑", "↓", "T"];
        let n = exact.iter().take_while(|s| s.t <= t_end + 1e-12).count();
        for b in 0..3 {
            for a in 0..3 {
                let k = 3 * b + a;
                let e: Vec<Complex64> = exact[..n].iter().map(|s| s.moments.means[k]).collect();
                let m: Vec<Complex64> = approx[..n].iter().map(|s| s.means[k]).collect();
                rows.push(Deviation::between(format!("mean σ_{}{}", names[b], names[a]), &e, &m));
            }
        }
        let e: Vec<Vec<Complex64>> = exact[..n].iter().map(|s| s.moments.cov.to_vec()).collect();
        let m: Vec<Vec<Complex64>> = approx[..n].iter().map(|s| s.cov.to_vec()).collect();
        rows.push(Deviation::between_sets("covariances".into(), &e, &m));
        let g = Generators::new(&build_spin_matrices(p.f)?);
        let xi = |s: &MomentState| s.squeezing_parameter(&g).map(Complex64::from);
        let e: Vec<Complex64> = exact[..n].iter().map(|s| xi(&s.moments)).collect::<Result<_>>()?;
        let m: Vec<Complex64> = approx[..n].iter().map(xi).collect::<Result<_>>()?;
        rows.push(Deviation::between("xi2".into(), &e, &m));
        Ok(ComparisonReport { rows })
    }
}
