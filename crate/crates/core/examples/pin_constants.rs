//! Prints the design-point regression constants asserted by the coupling and
//! dynamics tests. Run with
//! `cargo run --release -p nanoqnd-core --example pin_constants`.

use nanoqnd_core::coupling::*;
use nanoqnd_core::fit::{fit_exponential, fit_powerlaw};
use nanoqnd_core::moments::{scan, simulate_peak, ScanAxis, SimParams};
use nanoqnd_core::waveguide::{solve_mode_pair, Geometry};
use std::f64::consts::PI;

fn main() {
    let species = AtomicSpecies::cesium_d2();
    let probe = ProbeConfig { power_w: 1e-9, detuning: -2.0 * PI * 4e9, wavelength_nm: 852.35 };
    for (name, geom, size) in [
        ("nanofiber", Geometry::nanofiber(225.0, 1.4469), 225.0),
        ("square", Geometry::square(300.0, 2.0), 150.0),
    ] {
        let (h, v) = solve_mode_pair(&geom, 852.35, None).unwrap();
        println!("{name}: n_eff {:.10} n_g {:.10}", h.n_eff(), h.n_g);
        let pair = ModePair::new(h, v).unwrap();
        let d = if name == "nanofiber" { 200.0 } else { 150.0 };
        let y = size + d;
        let s = coupling_summary(&pair, &species, &probe, 0.0, y).unwrap();
        println!("  design y = {y}: {s:?}");
        if name == "nanofiber" {
            let s = coupling_summary(&pair, &species, &probe, 0.0, 1.8 * 225.0).unwrap();
            println!("  1.8a: {s:?}");
            let rot = s.chi3_rad * 2500.0 * 4.0;
            println!("  stokes rotation angle for N f = 1e4: {rot:e}");
        }
        let r = y;
        let mut vals = Vec::new();
        for k in 0..=72 {
            let phi = 2.0 * PI * k as f64 / 72.0;
            let (x, yy) = (r * phi.cos(), r * phi.sin());
            vals.push((phi, faraday_area(&pair, x, yy).unwrap(), input_area(&pair, x, yy).unwrap(), cooperativity(&pair, &species, x, yy).unwrap()));
        }
        let af: Vec<f64> = vals.iter().map(|v| v.1).collect();
        let c: Vec<f64> = vals.iter().map(|v| v.3).collect();
        let amax = af.iter().cloned().fold(0.0, f64::max);
        let amin = af.iter().cloned().fold(f64::INFINITY, f64::min);
        let cmax = c.iter().cloned().fold(0.0, f64::max);
        let cmin = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let arg = vals.iter().max_by(|a, b| a.3.partial_cmp(&b.3).unwrap()).unwrap().0;
        println!("  circle r={r}: A_Far var {:.4} C1 max/min {:.4} argmax phi {:.4}", (amax - amin) / amin, cmax / cmin, arg);
        let (lo, hi) = if name == "nanofiber" { (1.4, 2.4) } else { (0.7, 1.2) };
        let scale = if name == "nanofiber" { 225.0 } else { 300.0 };
        let xs: Vec<f64> = (0..=20).map(|k| (lo + (hi - lo) * k as f64 / 20.0) * scale).collect();
        let ys: Vec<f64> = xs.iter().map(|&y| cooperativity(&pair, &species, 0.0, y).unwrap()).collect();
        let fit = fit_exponential(&xs.iter().map(|x| x / scale).collect::<Vec<_>>(), &ys).unwrap();
        println!("  radial fit beta*{scale} = {:.4} ± {:.4} resid {:.3e}", fit.beta, fit.beta_err, fit.residual_norm);
    }
    for (name, c1) in [("reference C1", 0.00728), ("nanofiber preset", 0.006953836581058737), ("square preset", 0.017324184779543575)] {
        let p = SimParams::from_cooperativity(c1, 2500, 4.0);
        println!("peak, {name} (C1 = {c1}): {:?}", simulate_peak(&p).unwrap());
    }
    // Radius-scan presets of the command-line tool: 11 radii, t_max = 1.5.
    for (name, geom, size, lo, hi) in [
        ("nanofiber", Geometry::nanofiber(225.0, 1.4469), 225.0, 315.0, 540.0),
        ("square", Geometry::square(300.0, 2.0), 300.0, 210.0, 360.0),
    ] {
        let (h, v) = solve_mode_pair(&geom, 852.35, None).unwrap();
        let pair = ModePair::new(h, v).unwrap();
        let radii: Vec<f64> = (0..11).map(|k| lo + (hi - lo) / 10.0 * k as f64).collect();
        let base = SimParams { t_max: 1.5, ..SimParams::from_cooperativity(0.01, 2500, 4.0) };
        let c1_of = |r: f64| cooperativity(&pair, &species, 0.0, r);
        let rows = scan(&base, ScanAxis::Radius, &radii, &c1_of).unwrap();
        let c1: Vec<f64> = rows.iter().map(|r| r.c1).collect();
        let beta = fit_exponential(&radii, &c1).unwrap().beta * size;
        let od: Vec<f64> = c1.iter().map(|c| 2500.0 * c).collect();
        let gain: Vec<f64> = rows.iter().map(|r| 10f64.powf(r.peak_db / 10.0)).collect();
        let exponent = fit_powerlaw(&od, &gain).unwrap().exponent;
        println!("radius scan {name}: beta*size {beta:?} od exponent {exponent:?}");
    }
}
