//! Bessel functions against exact rational series and independent integral
//! representations.

mod common;

use common::{j_integral, k_scaled_integral};
use nanoqnd_core::special::{bessel_eval, bessel_j01, bessel_j2, bessel_k01_scaled, bessel_k_scaled, BesselFamily};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;

/// Σ (-1)^k (x/2)^{2k+n} / (k! (k+n)!) summed exactly until the terms are
/// far below the f64 resolution of the result.
fn j_exact(n: u32, num: i64, den: i64) -> f64 {
    let half_x = BigRational::new(BigInt::from(num), BigInt::from(2 * den));
    let x2 = &half_x * &half_x;
    let mut term = BigRational::from_integer(BigInt::from(1));
    for k in 1..=n {
        term = term * &half_x / BigRational::from_integer(BigInt::from(k));
    }
    let mut sum = BigRational::zero();
    let cutoff = BigRational::new(BigInt::from(1), BigInt::from(10).pow(40));
    let xf = num as f64 / den as f64;
    let mut k: u64 = 0;
    loop {
        sum += &term;
        k += 1;
        term = -term * &x2 / BigRational::from_integer(BigInt::from(k * (k + n as u64)));
        if (k as f64) > xf && term.abs() < cutoff {
            break;
        }
    }
    to_f64(&sum)
}

fn to_f64(r: &BigRational) -> f64 {
    // scale so that the integer quotient carries ~180 significant bits
    let shift = 200usize;
    let q: BigInt = (r.numer() << shift) / r.denom();
    q.to_f64().unwrap() / 2f64.powi(shift as i32)
}

#[test]
fn j_matches_exact_series() {
    for &(num, den) in &[(1, 8), (1, 1), (5, 2), (6, 1), (15, 2), (8, 1), (17, 2), (12, 1), (25, 1), (39, 1), (81, 2), (55, 1)] {
        let x = num as f64 / den as f64;
        let (j0, j1) = bessel_j01(x);
        for (n, got) in [(0, j0), (1, j1)] {
            let want = j_exact(n, num, den);
            let err = (got - want).abs();
            assert!(err <= 1e-12 * want.abs() + 1e-15, "J{n}({x}) = {got}, exact {want}");
        }
    }
}

#[test]
fn order_two_is_rejected_by_the_generic_entry() {
    assert!(bessel_eval(BesselFamily::J, 2, 1.0).is_err());
    assert!(bessel_eval(BesselFamily::K, 0, 0.0).is_err());
}

#[test]
fn first_zero_of_j0() {
    let x = 2.404825557695773;
    assert!(bessel_eval(BesselFamily::J, 0, x).unwrap().abs() < 1e-12);
}

#[test]
fn k_matches_integral_representation() {
    for &x in &[0.05, 0.3, 1.0, 1.9, 2.0, 2.1, 3.7, 8.0, 20.0, 60.0] {
        let (k0, k1) = bessel_k01_scaled(x);
        for (n, got) in [(0, k0), (1, k1)] {
            let want = k_scaled_integral(n, x);
            assert!((got - want).abs() <= 1e-12 * want, "e^x K{n}({x}) = {got}, integral {want}");
        }
    }
}

proptest! {
    #[test]
    fn j_matches_integral(x in 0.0f64..80.0) {
        let (j0, j1) = bessel_j01(x);
        prop_assert!((j0 - j_integral(0, x)).abs() < 1e-13);
        prop_assert!((j1 - j_integral(1, x)).abs() < 1e-13);
    }

    #[test]
    fn k_recurrence(x in 0.01f64..50.0) {
        // K₂ = K₀ + (2/x) K₁
        let k2 = bessel_k_scaled(2, x);
        let (k0, k1) = bessel_k01_scaled(x);
        let want = k0 + 2.0 / x * k1;
        prop_assert!((k2 - want).abs() <= 1e-12 * want.abs());
    }

    #[test]
    fn j_recurrence(x in 0.1f64..60.0) {
        let j2 = bessel_j2(x);
        let (j0, j1) = bessel_j01(x);
        prop_assert!((j2 - (2.0 / x * j1 - j0)).abs() < 1e-13 * (1.0 + 2.0 / x));
    }
}
