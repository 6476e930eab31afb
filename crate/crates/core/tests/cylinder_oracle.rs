//! Nanofiber dispersion against an independent bisection on the textbook
//! form of the HE₁₁ eigenvalue equation.

mod common;

use common::{j_integral, k_scaled_integral};
use nanoqnd_core::waveguide::{
    characteristic_residual, solve_cylinder_dispersion, solve_mode_pair, CylinderMode, Geometry, Polarization,
};
use std::f64::consts::PI;

const LAMBDA: f64 = 852.35;

/// `J₀(ha)/(ha J₁(ha)) - RHS(β)` for HE₁₁.
fn he11(beta: f64, a: f64, n1: f64, n2: f64, k: f64) -> f64 {
    let u = a * (n1 * n1 * k * k - beta * beta).sqrt();
    let w = a * (beta * beta - n2 * n2 * k * k).sqrt();
    let lhs = j_integral(0, u) / (u * j_integral(1, u));
    let (k0, k1) = (k_scaled_integral(0, w), k_scaled_integral(1, w));
    let kp = (-k0 - k1 / w) / (w * k1);
    let d = (n1 * n1 - n2 * n2) / (2.0 * n1 * n1);
    let r = ((d * kp).powi(2) + (beta / (n1 * k)).powi(2) * (1.0 / (w * w) + 1.0 / (u * u)).powi(2)).sqrt();
    lhs - (-(n1 * n1 + n2 * n2) / (2.0 * n1 * n1) * kp + 1.0 / (u * u) - r)
}

fn bisect(a: f64, n1: f64, n2: f64, k: f64) -> f64 {
    let (mut lo, mut hi) = (n2 * k * (1.0 + 1e-12), n1 * k * (1.0 - 1e-12));
    let f_lo = he11(lo, a, n1, n2, k);
    assert!(f_lo * he11(hi, a, n1, n2, k) < 0.0);
    while hi - lo > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        if he11(mid, a, n1, n2, k) * f_lo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn design_fiber_matches_bisection() {
    let g = Geometry::nanofiber(225.0, 1.4469);
    let beta = solve_cylinder_dispersion(&g, LAMBDA).unwrap();
    let k = 2.0 * PI / (LAMBDA * 1e-9);
    let oracle = bisect(225e-9, 1.4469, 1.0, k);
    assert!(((beta - oracle) / oracle).abs() < 1e-8, "{beta} vs {oracle}");
    assert!(characteristic_residual(&g, LAMBDA, beta).unwrap().abs() < 1e-10);
    let n_eff = beta / k;
    assert!(n_eff > 1.0 && n_eff < 1.4469);
}

#[test]
fn other_radii_match_bisection() {
    for (a, n1) in [(150.0, 1.4469), (250.0, 1.4469), (200.0, 1.6)] {
        let g = Geometry::nanofiber(a, n1);
        let beta = solve_cylinder_dispersion(&g, LAMBDA).unwrap();
        let oracle = bisect(a * 1e-9, n1, 1.0, 2.0 * PI / (LAMBDA * 1e-9));
        assert!(((beta - oracle) / oracle).abs() < 1e-8, "a = {a}: {beta} vs {oracle}");
    }
}

#[test]
fn design_fiber_is_single_mode() {
    let g = Geometry::nanofiber(225.0, 1.4469);
    let m = CylinderMode::solve(&g, LAMBDA).unwrap();
    let v = 2.0 * PI * 225.0 / LAMBDA * (1.4469f64.powi(2) - 1.0).sqrt();
    assert!((m.v_number() - v).abs() < 1e-12);
    assert!(v < 2.405);
}

#[test]
fn exterior_decays_along_rays() {
    let g = Geometry::nanofiber(225.0, 1.4469);
    let (h, _) = solve_mode_pair(&g, LAMBDA, None).unwrap();
    for k in 0..12 {
        let phi = k as f64 * PI / 12.0;
        let mut prev = f64::INFINITY;
        let mut r = 225.0 + LAMBDA;
        while r < 225.0 + 4.0 * LAMBDA {
            let u = h.field_at(r * phi.cos(), r * phi.sin());
            let mag: f64 = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            assert!(mag < prev, "not decreasing at r = {r}, φ = {phi}");
            prev = mag;
            r += 10.0;
        }
    }
}

#[test]
fn degenerate_pair_is_orthonormal() {
    let g = Geometry::nanofiber(225.0, 1.4469);
    let (h, v) = solve_mode_pair(&g, LAMBDA, None).unwrap();
    assert_eq!(h.beta, v.beta);
    assert!((h.norm_squared() - 1.0).abs() < 1e-6);
    assert!((v.norm_squared() - 1.0).abs() < 1e-6);
    // ∫ u_H* · u_V dA on a polar grid
    let (nr, nphi) = (4000, 64);
    let r_max = 225.0 + 3000.0;
    let dr = r_max / nr as f64;
    let mut s = num_complex::Complex64::default();
    for i in 0..nr {
        let r = (i as f64 + 0.5) * dr;
        for j in 0..nphi {
            let phi = 2.0 * PI * j as f64 / nphi as f64;
            let (x, y) = (r * phi.cos(), r * phi.sin());
            let (a, b) = (h.field_at(x, y), v.field_at(x, y));
            for c in 0..3 {
                s += a[c].conj() * b[c] * r;
            }
        }
    }
    let overlap = s.norm() * dr * 1e-18 * 2.0 * PI / nphi as f64;
    assert!(overlap < 1e-6, "{overlap}");
    assert_eq!(h.polarization, Polarization::H);
}
