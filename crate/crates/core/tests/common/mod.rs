//! Independent special-function oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// `(1/π) ∫₀^π cos(nτ - x sin τ) dτ`, trapezoid on a periodic integrand.
pub fn j_integral(n: i32, x: f64) -> f64 {
    let m = 2000;
    let h = PI / m as f64;
    let f = |t: f64| (n as f64 * t - x * t.sin()).cos();
    let mut s = 0.5 * (f(0.0) + f(PI));
    for k in 1..m {
        s += f(k as f64 * h);
    }
    s * h / PI
}

/// `e^x K_n(x) = ∫₀^∞ e^{-x (cosh t - 1)} cosh(nt) dt`.
pub fn k_scaled_integral(n: i32, x: f64) -> f64 {
    let h = 0.01;
    let mut s = 0.5;
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let v = (-x * (t.cosh() - 1.0)).exp() * (n as f64 * t).cosh();
        s += v;
        if v < 1e-20 * s {
            break;
        }
        k += 1;
    }
    s * h
}
