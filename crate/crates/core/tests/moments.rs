//! Moment-hierarchy invariants, a closed-form QND limit and regression pins.

use nanoqnd_core::moments::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Product state built from an arbitrary 3×3 density matrix.
fn product_state(entries: &[f64], n: u64) -> MomentState {
    let a: Vec<Complex64> = entries.chunks(2).map(|p| c(p[0], p[1])).collect();
    let mut rho = [[Complex64::default(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            rho[i][j] = (0..3).map(|k| a[3 * i + k] * a[3 * j + k].conj()).sum();
        }
    }
    let tr = (rho[0][0] + rho[1][1] + rho[2][2]).re;
    let mut s = MomentState::coherent(n, 4.0).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            s.means[3 * j + i] = rho[i][j] / tr;
        }
    }
    s
}

fn trace(s: &MomentState) -> f64 {
    (0..3).map(|a| s.population(a)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn moments_stay_hermitian(c1 in 0.0f64..0.05, n in 2u64..5000, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let d = MomentDynamics::new(c1, n, 4.0).unwrap();
        let mut s = MomentState::coherent(n, 4.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            let dw = 1e-2 * (rng.random::<f64>() - 0.5);
            s = d.step_euler(&s, 1e-4, dw).unwrap();
        }
        prop_assert!(s.hermiticity_error() < 1e-9);
    }

    #[test]
    fn pumping_never_increases_the_trace(entries in prop::collection::vec(-1.0f64..1.0, 18), c1 in 0.0f64..0.1) {
        let s = product_state(&entries, 100);
        prop_assume!(trace(&s).is_finite());
        let d = MomentDynamics::new(c1, 100, 4.0).unwrap();
        let (dm, _) = d.drift(&s.mean_vec(), &s.cov_matrix());
        let dtr = dm[0].re + dm[4].re + dm[8].re;
        prop_assert!(dtr <= 1e-12, "{}", dtr);
    }

    #[test]
    fn covariance_update_ignores_the_increment(dw1 in -0.1f64..0.1, dw2 in -0.1f64..0.1) {
        let d = MomentDynamics::new(0.01, 500, 4.0).unwrap();
        let mut s = MomentState::coherent(500, 4.0).unwrap();
        for _ in 0..50 {
            s = d.step_midpoint(&s, 1e-3).unwrap();
        }
        let a = d.step_euler(&s, 1e-4, dw1).unwrap();
        let b = d.step_euler(&s, 1e-4, dw2).unwrap();
        prop_assert_eq!(a.cov, b.cov);
    }
}

#[test]
fn qnd_only_variance_follows_riccati_solution() {
    let (n, f, c1) = (1000u64, 4.0, 0.005);
    let mut d = MomentDynamics::new(c1, n, f).unwrap();
    d.pumping = 0.0;
    let g = d.generators.clone();
    let mut s = MomentState::coherent(n, f).unwrap();
    let v0 = s.collective_variance_fz(&g);
    let dt = 1e-4;
    let mut worst: f64 = 0.0;
    for k in 1..=10_000 {
        s = d.step_midpoint(&s, dt).unwrap();
        let t = k as f64 * dt;
        let want = v0 / (1.0 + c1 * (n - 1) as f64 / n as f64 * v0 * t);
        worst = worst.max((s.collective_variance_fz(&g) / want - 1.0).abs());
    }
    // κ V₀ t reaches about 10 at the end
    assert!(c1 * (n - 1) as f64 / n as f64 * v0 > 9.9);
    assert!(worst < 1e-3, "{worst}");
}

#[test]
fn only_the_ratio_of_rates_matters() {
    let mut a = SimParams::from_cooperativity(0.0, 2500, 4.0);
    a.kappa = 0.2995;
    a.gamma_op = 43.07;
    let b = SimParams { kappa: a.kappa * 7.0, gamma_op: a.gamma_op * 7.0, ..a };
    let (ta, tb) = (simulate(&a).unwrap(), simulate(&b).unwrap());
    assert_eq!(ta.times, tb.times);
    for (x, y) in ta.xi2.iter().zip(&tb.xi2) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn runs_are_reproducible() {
    let p = SimParams { t_max: 0.3, ..SimParams::from_cooperativity(0.00728, 2500, 4.0) };
    assert_eq!(simulate(&p).unwrap(), simulate(&p).unwrap());
    let q = SimParams { mode: Mode::Stochastic, trajectories: 4, seed: 9, ..p };
    assert_eq!(simulate(&q).unwrap(), simulate(&q).unwrap());
    let r = SimParams { seed: 10, ..q };
    assert_ne!(simulate(&q).unwrap().xi2, simulate(&r).unwrap().xi2);
}

#[test]
fn squeezing_starts_at_unity_and_comes_with_anticorrelation() {
    let p = SimParams::from_cooperativity(0.00728, 2500, 4.0);
    let tr = simulate(&p).unwrap();
    assert!((tr.xi2[0] - 1.0).abs() < 1e-12);
    assert!((tr.var_fz_norm[0] - 1.0).abs() < 1e-12);
    assert!((tr.fx_per_naf[0] - 1.0).abs() < 1e-12);
    let squeezed: Vec<usize> = (0..tr.xi2.len()).filter(|&k| tr.xi2[k] < 1.0).collect();
    assert!(!squeezed.is_empty());
    for k in squeezed {
        assert!(tr.two_body_cov[k] < 0.0, "t = {}", tr.times[k]);
    }
}

#[test]
fn peak_grows_with_atom_number() {
    let base = SimParams::from_cooperativity(0.00728, 2, 4.0);
    let ns: Vec<f64> = [100.0, 250.0, 500.0, 1000.0, 1500.0, 2000.0, 2500.0].to_vec();
    let rows = scan(&base, ScanAxis::AtomNumber, &ns, &|_| unreachable!()).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].peak_db > w[0].peak_db, "{:?}", w);
    }
}

#[test]
fn design_peak_regression() {
    // Pinned from `examples/pin_constants.rs`.
    let peak = simulate_peak(&SimParams::from_cooperativity(0.00728, 2500, 4.0)).unwrap();
    assert!(!peak.at_boundary);
    assert!((peak.value_db - 6.719776398655469).abs() < 1e-9);
    assert!((peak.t - 0.23930448407274896).abs() < 1e-9);
}

#[test]
fn step_halving_changes_the_peak_very_little() {
    let r = convergence_report(&SimParams::from_cooperativity(0.00728, 2500, 4.0)).unwrap();
    assert!(r.difference_db < 1e-4, "{r:?}");
}

#[test]
fn stochastic_mean_tracks_the_deterministic_run() {
    let p = SimParams::from_cooperativity(0.00728, 2500, 4.0);
    let det = simulate_peak(&p).unwrap();
    let q = SimParams { mode: Mode::Stochastic, trajectories: 16, seed: 3, ..p };
    let tr = simulate(&q).unwrap();
    assert!((tr.peak().value_db - det.value_db).abs() < 1e-2);
    assert_eq!(tr.trajectories, 16);
    assert!(tr.xi_inv2_db_spread.is_some());
}

#[test]
fn invalid_parameters_are_rejected() {
    let p = SimParams::from_cooperativity(0.00728, 2500, 4.0);
    assert!(simulate(&SimParams { dt: -1e-4, ..p }).is_err());
    assert!(simulate(&SimParams { n_atoms: 1, ..p }).is_err());
    assert!(simulate(&SimParams { f: 1.0, ..p }).is_err());
}
