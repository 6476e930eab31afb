//! Time stepping of the moment hierarchy. Time is measured in units of
//! 1/γ_op, so the only rate left is the cooperativity `C₁ = κ/γ_op`.

use super::basis::build_spin_matrices;
use super::generator::{Generators, Mat9, Vec9};
use super::state::MomentState;
use super::trace::{find_peak, Peak, ScanRow, SqueezingTrace};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Drift only (dW ≡ 0), midpoint rule.
    Deterministic,
    /// Euler–Maruyama with independent Wiener increments per trajectory.
    Stochastic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    /// Measurement strength, s⁻¹.
    pub kappa: f64,
    /// Optical pumping rate, s⁻¹.
    pub gamma_op: f64,
    pub n_atoms: u64,
    pub f: f64,
    /// Step in units of 1/γ_op.
    pub dt: f64,
    pub t_max: f64,
    pub mode: Mode,
    pub trajectories: usize,
    pub seed: u64,
    /// Record every `stride` steps.
    pub stride: usize,
}

impl SimParams {
    /// Deterministic run with `κ/γ_op = c1`, rates expressed per γ_op.
    pub fn from_cooperativity(c1: f64, n_atoms: u64, f: f64) -> Self {
        SimParams {
            kappa: c1,
            gamma_op: 1.0,
            n_atoms,
            f,
            dt: 1e-4,
            t_max: 1.0,
            mode: Mode::Deterministic,
            trajectories: 1,
            seed: 0,
            stride: 10,
        }
    }

    pub fn cooperativity(&self) -> f64 {
        self.kappa / self.gamma_op
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.gamma_op > 0.0) || !(self.kappa >= 0.0) {
            return bad(format!("rates must be positive: κ = {}, γ_op = {}", self.kappa, self.gamma_op));
        }
        if !(self.dt > 0.0 && self.dt <= 1e-3) {
            return bad(format!("dt = {} must lie in (0, 1e-3] (units of 1/γ_op)", self.dt));
        }
        if !(self.t_max > 0.0) {
            return bad(format!("t_max = {} must be positive", self.t_max));
        }
        if self.trajectories < 1 || self.stride < 1 {
            return bad("trajectories and stride must be at least 1".into());
        }
        if self.n_atoms < 2 {
            return Err(Error::TooFewAtoms(self.n_atoms));
        }
        if !(self.f >= 2.0) {
            return Err(Error::InvalidSpin(self.f));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }
}

/// Right-hand side of the moment equations for rates in units of γ_op.
#[derive(Debug, Clone)]
pub struct MomentDynamics {
    pub generators: Generators,
    pub c1: f64,
    pub n_atoms: u64,
    pub f: f64,
    /// Optical pumping rate in units of γ_op (1 in production, 0 to isolate QND).
    pub pumping: f64,
}

impl MomentDynamics {
    pub fn new(c1: f64, n_atoms: u64, f: f64) -> Result<Self> {
        let basis = build_spin_matrices(f)?;
        Ok(MomentDynamics { generators: Generators::new(&basis), c1, n_atoms, f, pumping: 1.0 })
    }

    /// `⟨Δσ⁽¹⁾ ΔF_z⟩_s` per atom for each basis operator.
    pub fn fz_correlation(&self, m: &Vec9, c: &Mat9) -> Vec9 {
        let g = &self.generators;
        let n1 = Complex64::from((self.n_atoms - 1) as f64);
        let mean_fz = g.fz.dot(m);
        g.anticomm * m - m * mean_fz + c * g.fz * n1
    }

    /// Deterministic part of `(dm, dC)/dt`.
    pub fn drift(&self, m: &Vec9, c: &Mat9) -> (Vec9, Mat9) {
        let g = &self.generators;
        let pump = g.pumping * Complex64::from(self.pumping);
        let dm = pump * m + g.qnd * m * Complex64::from(0.25 * self.c1);
        let v = self.fz_correlation(m, c);
        let dc = pump * c + c * pump.transpose() - v * v.transpose() * Complex64::from(self.c1)
            + self.qnd_covariance(m, c) * Complex64::from(0.25 * self.c1);
        (dm, dc)
    }

    /// Two-body part of `L` for the collective `F_z`, per unit `κ/4`:
    /// the local terms plus the cross term `-⟨[f_z, σ⁽¹⁾][f_z, σ⁽²⁾]⟩`.
    /// Its contraction with `f_z` vanishes, so it never reaches `⟨ΔF_z²⟩`.
    pub fn qnd_covariance(&self, m: &Vec9, c: &Mat9) -> Mat9 {
        let g = &self.generators;
        let k = g.comm * m;
        g.qnd * c + c * g.qnd.transpose() - g.comm * c * g.comm.transpose() - k * k.transpose()
    }

    /// Noise coefficient on the means, multiplying dW.
    pub fn diffusion(&self, m: &Vec9, c: &Mat9) -> Vec9 {
        self.fz_correlation(m, c) * Complex64::from(self.c1.sqrt())
    }

    /// Euler–Maruyama step with increment `dw` (zero for pure drift).
    pub fn step_euler(&self, s: &MomentState, dt: f64, dw: f64) -> Result<MomentState> {
        let (m, c) = (s.mean_vec(), s.cov_matrix());
        let (dm, dc) = self.drift(&m, &c);
        let mut m1 = m + dm * Complex64::from(dt);
        if dw != 0.0 {
            m1 += self.diffusion(&m, &c) * Complex64::from(dw);
        }
        let c1 = c + dc * Complex64::from(dt);
        checked(MomentState::from_parts(s.t + dt, s.n_atoms, s.f, &m1, &c1))
    }

    /// Explicit midpoint step of the drift.
    pub fn step_midpoint(&self, s: &MomentState, dt: f64) -> Result<MomentState> {
        self.step_split(s, dt, 0.0)
    }

    /// Midpoint step of the drift plus an explicit noise kick evaluated at the
    /// start of the step.
    pub fn step_split(&self, s: &MomentState, dt: f64, dw: f64) -> Result<MomentState> {
        let (m, c) = (s.mean_vec(), s.cov_matrix());
        let h = Complex64::from(0.5 * dt);
        let (dm, dc) = self.drift(&m, &c);
        let (mm, cm) = (m + dm * h, c + dc * h);
        let (dm, dc) = self.drift(&mm, &cm);
        let d = Complex64::from(dt);
        let mut m1 = m + dm * d;
        if dw != 0.0 {
            m1 += self.diffusion(&m, &c) * Complex64::from(dw);
        }
        checked(MomentState::from_parts(s.t + dt, s.n_atoms, s.f, &m1, &(c + dc * d)))
    }
}

/// Noise can push a near-empty population slightly negative; only larger
/// excursions count as instability.
const POPULATION_SLACK: f64 = 1e-3;

fn checked(s: MomentState) -> Result<MomentState> {
    for a in 0..3 {
        let p = s.population(a);
        if !(-POPULATION_SLACK..=1.0 + POPULATION_SLACK).contains(&p) {
            return Err(Error::StepInstability { t: s.t, population: p });
        }
    }
    Ok(s)
}

/// One step of the full dynamics per `params.mode`; `dw` is ignored in
/// deterministic mode.
pub fn step(dyn_: &MomentDynamics, s: &MomentState, params: &SimParams, dw: f64) -> Result<MomentState> {
    match params.mode {
        Mode::Deterministic => dyn_.step_midpoint(s, params.dt),
        Mode::Stochastic => dyn_.step_euler(s, params.dt, dw),
    }
}

/// Observables recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub xi2: f64,
    pub fx_per_f: f64,
    pub var_fz_norm: f64,
    pub two_body: f64,
}

impl Sample {
    pub fn of(s: &MomentState, g: &Generators) -> Result<Self> {
        let n = s.n_atoms as f64;
        Ok(Sample {
            t: s.t,
            xi2: s.squeezing_parameter(g)?,
            fx_per_f: s.expect(&g.fx).re / s.f,
            var_fz_norm: s.collective_variance_fz(g) / (0.5 * n * s.f),
            two_body: s.two_body(&g.fz, &g.fz).re,
        })
    }
}

fn trajectory_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Integrate one trajectory. Increments are drawn from stream `index` of the
/// seeded generator in stochastic mode.
pub fn run_trajectory(params: &SimParams, index: usize) -> Result<Vec<Sample>> {
    params.validate()?;
    let dynamics = MomentDynamics::new(params.cooperativity(), params.n_atoms, params.f)?;
    let g = &dynamics.generators;
    let mut s = MomentState::coherent(params.n_atoms, params.f)?;
    let mut rng = trajectory_rng(params.seed, index);
    let sqrt_dt = params.dt.sqrt();
    let steps = params.steps();
    let mut out = Vec::with_capacity(steps / params.stride + 2);
    out.push(Sample::of(&s, g)?);
    for k in 1..=steps {
        let dw = match params.mode {
            Mode::Stochastic => {
                let z: f64 = StandardNormal.sample(&mut rng);
                sqrt_dt * z
            }
            Mode::Deterministic => 0.0,
        };
        s = step(&dynamics, &s, params, dw)?;
        // keep the clock exact rather than accumulated
        s.t = k as f64 * params.dt;
        if k % params.stride == 0 || k == steps {
            out.push(Sample::of(&s, g)?);
        }
    }
    Ok(out)
}

/// Run all trajectories (in parallel) and average them by index.
pub fn simulate(params: &SimParams) -> Result<SqueezingTrace> {
    params.validate()?;
    let runs = match params.mode {
        Mode::Deterministic => vec![run_trajectory(params, 0)?],
        Mode::Stochastic => (0..params.trajectories)
            .into_par_iter()
            .map(|i| run_trajectory(params, i))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(SqueezingTrace::from_runs(&runs, params.mode == Mode::Stochastic))
}

/// Peak of the (trajectory-mean) reciprocal squeezing.
pub fn simulate_peak(params: &SimParams) -> Result<Peak> {
    let trace = simulate(params)?;
    Ok(find_peak(&trace.times, &trace.xi_inv2_db()))
}

/// Peak squeezing at `dt` and `dt/2` in deterministic mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub dt: f64,
    pub peak_db: f64,
    pub peak_db_half_step: f64,
    pub difference_db: f64,
}

pub fn convergence_report(params: &SimParams) -> Result<ConvergenceReport> {
    let mut p = SimParams { mode: Mode::Deterministic, trajectories: 1, ..*params };
    let a = simulate_peak(&p)?;
    p.dt *= 0.5;
    p.stride *= 2;
    let b = simulate_peak(&p)?;
    Ok(ConvergenceReport {
        dt: params.dt,
        peak_db: a.value_db,
        peak_db_half_step: b.value_db,
        difference_db: (a.value_db - b.value_db).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanAxis {
    AtomNumber,
    /// Atom distance from the guide axis; needs a cooperativity provider.
    Radius,
}

/// One simulation and peak search per value. For an atom-number scan the
/// cooperativity of `base` is used; for a radius scan `c1_of` supplies it.
pub fn scan(
    base: &SimParams,
    axis: ScanAxis,
    values: &[f64],
    c1_of: &(dyn Fn(f64) -> Result<f64> + Sync),
) -> Result<Vec<ScanRow>> {
    values
        .par_iter()
        .map(|&v| {
            let mut p = *base;
            match axis {
                ScanAxis::AtomNumber => {
                    if !(v >= 2.0 && v.fract() == 0.0) {
                        return Err(Error::InvalidParameter(format!("atom number {v}")));
                    }
                    p.n_atoms = v as u64;
                }
                ScanAxis::Radius => {
                    p.kappa = c1_of(v)? * p.gamma_op;
                }
            }
            let peak = simulate_peak(&p)?;
            Ok(ScanRow { axis_value: v, c1: p.cooperativity(), peak_db: peak.value_db, peak_time: peak.t })
        })
        .collect()
}
