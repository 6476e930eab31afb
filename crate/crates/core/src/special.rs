//! Bessel functions of the first kind (J) and modified second kind (K) of
//! integer order, as needed by the analytic HE11 fiber mode.
//!
//! J uses the power series below x = 8, Miller's backward recurrence up to
//! x = 40 and the Hankel asymptotic expansion beyond. K uses the power series
//! up to x = 2 and Steed's continued fraction (CF2) above. The exponentially
//! scaled `e^x K_n(x)` is available for evaluating evanescent tails without
//! underflow.

use crate::{Error, Result};
use std::f64::consts::{FRAC_PI_2, PI};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const EPS: f64 = 1e-17;

const J_SERIES_MAX: f64 = 8.0;
const J_MILLER_MAX: f64 = 40.0;
const K_SERIES_MAX: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselFamily {
    J,
    K,
}

/// Evaluate `J_n(x)` or `K_n(x)` for order 0 or 1.
pub fn bessel_eval(family: BesselFamily, order: u32, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain { what: "Bessel argument", value: x });
    }
    match (family, order) {
        (BesselFamily::J, 0) => Ok(bessel_j0(x)),
        (BesselFamily::J, 1) => Ok(bessel_j1(x)),
        (BesselFamily::K, 0 | 1) => {
            if x <= 0.0 {
                return Err(Error::Domain { what: "K_n (requires x > 0)", value: x });
            }
            let (k0, k1) = bessel_k01_scaled(x);
            let k = if order == 0 { k0 } else { k1 };
            Ok(k * (-x).exp())
        }
        _ => Err(Error::Domain { what: "Bessel order (0 or 1 supported)", value: order as f64 }),
    }
}

pub fn bessel_j0(x: f64) -> f64 {
    bessel_j01(x.abs()).0
}

pub fn bessel_j1(x: f64) -> f64 {
    let j1 = bessel_j01(x.abs()).1;
    if x < 0.0 {
        -j1
    } else {
        j1
    }
}

/// `J_2(x)`; the series is used at small argument where the upward
/// recurrence cancels.
pub fn bessel_j2(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1.0 {
        return j_series(2, ax);
    }
    let (j0, j1) = bessel_j01(ax);
    2.0 * j1 / ax - j0
}

/// `(J_0(x), J_1(x))` for `x >= 0`.
pub fn bessel_j01(x: f64) -> (f64, f64) {
    debug_assert!(x >= 0.0);
    if x < J_SERIES_MAX {
        (j_series(0, x), j_series(1, x))
    } else if x < J_MILLER_MAX {
        j01_miller(x)
    } else {
        (j_hankel(0, x), j_hankel(1, x))
    }
}

/// Power series of `J_n` about the origin.
fn j_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < EPS * sum.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    sum
}

/// Miller's backward recurrence normalised by `J_0 + 2 Σ J_2k = 1`.
fn j01_miller(x: f64) -> (f64, f64) {
    let start = 2 * ((x + 30.0 + 6.0 * x.cbrt()) as usize / 2 + 1);
    let mut jp1 = 0.0;
    let mut j = 1e-300_f64.sqrt();
    let mut norm = 0.0;
    let (mut j0, mut j1) = (0.0, 0.0);
    for k in (1..=start).rev() {
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        // j now holds J_{k-1}
        if k - 1 == 1 {
            j1 = j;
        }
        if k - 1 == 0 {
            j0 = j;
        } else if (k - 1) % 2 == 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e150 {
            let s = 1e-150;
            j *= s;
            jp1 *= s;
            norm *= s;
            j1 *= s;
        }
    }
    norm += j0;
    (j0 / norm, j1 / norm)
}

/// Hankel asymptotic expansion, used only for large argument.
fn j_hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < EPS {
            break;
        }
    }
    let chi = x - (0.5 * n as f64 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `(e^x K_0(x), e^x K_1(x))` for `x > 0`.
pub fn bessel_k01_scaled(x: f64) -> (f64, f64) {
    debug_assert!(x > 0.0);
    if x <= K_SERIES_MAX {
        let (k0, k1) = k01_series(x);
        let e = x.exp();
        (k0 * e, k1 * e)
    } else {
        k01_steed(x)
    }
}

/// `e^x K_n(x)` for n = 0, 1, 2.
pub fn bessel_k_scaled(n: u32, x: f64) -> f64 {
    let (k0, k1) = bessel_k01_scaled(x);
    match n {
        0 => k0,
        1 => k1,
        2 => k0 + 2.0 * k1 / x,
        _ => unreachable!("only orders 0..=2 are used"),
    }
}

fn k01_series(x: f64) -> (f64, f64) {
    let half = 0.5 * x;
    let q = half * half;
    let ln_half = half.ln();

    // K_0 = -(ln(x/2) + γ) I_0 + Σ H_k (x²/4)^k / (k!)²
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut i0 = 1.0;
    let mut tail0 = 0.0;
    for k in 1..100 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail0 += harmonic * term;
        if term < EPS * i0 {
            break;
        }
    }
    let k0 = -(ln_half + EULER_GAMMA) * i0 + tail0;

    // K_1 = 1/x + ln(x/2) I_1 - (x/4) Σ [ψ(k+1) + ψ(k+2)] (x²/4)^k / (k!(k+1)!)
    let mut term = 1.0;
    let mut psi_k1 = -EULER_GAMMA; // ψ(k+1)
    let mut psi_k2 = 1.0 - EULER_GAMMA; // ψ(k+2)
    let mut i1_sum = 1.0;
    let mut tail1 = psi_k1 + psi_k2;
    for k in 1..100 {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        psi_k1 += 1.0 / kf;
        psi_k2 += 1.0 / (kf + 1.0);
        i1_sum += term;
        tail1 += (psi_k1 + psi_k2) * term;
        if term < EPS * i1_sum {
            break;
        }
    }
    let i1 = half * i1_sum;
    let k1 = 1.0 / x + ln_half * i1 - 0.5 * half * tail1;
    (k0, k1)
}

/// Steed's continued fraction for `K_0`, `K_1` (Thompson & Barnett), x > 2.
fn k01_steed(x: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..100_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (FRAC_PI_2 / x).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_at_origin() {
        assert_eq!(bessel_eval(BesselFamily::J, 0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_eval(BesselFamily::J, 1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn first_zero_of_j0() {
        let v = bessel_eval(BesselFamily::J, 0, 2.404825557695773).unwrap();
        assert!(v.abs() < 1e-12, "{v}");
    }

    #[test]
    fn k_rejects_nonpositive() {
        for x in [0.0, -1.0] {
            for n in [0, 1] {
                assert!(matches!(
                    bessel_eval(BesselFamily::K, n, x),
                    Err(Error::Domain { .. })
                ));
            }
        }
        assert!(bessel_eval(BesselFamily::J, 2, 1.0).is_err());
        assert!(bessel_eval(BesselFamily::J, 0, f64::NAN).is_err());
    }

    #[test]
    fn branches_agree_at_switchover() {
        // J: series vs Miller at 8, Miller vs Hankel at 40.
        for x in [J_SERIES_MAX, J_SERIES_MAX - 0.5] {
            let (a0, a1) = (j_series(0, x), j_series(1, x));
            let (b0, b1) = j01_miller(x);
            assert!((a0 - b0).abs() < 1e-13 && (a1 - b1).abs() < 1e-13, "x={x}");
        }
        let x = J_MILLER_MAX;
        let (b0, b1) = j01_miller(x);
        assert!((b0 - j_hankel(0, x)).abs() < 1e-15);
        assert!((b1 - j_hankel(1, x)).abs() < 1e-15);
        // K: series vs continued fraction at 2.
        let (s0, s1) = k01_series(K_SERIES_MAX);
        let (c0, c1) = k01_steed(K_SERIES_MAX + 1e-12);
        let e = (-K_SERIES_MAX).exp();
        assert!(((s0 - c0 * e) / s0).abs() < 1e-12);
        assert!(((s1 - c1 * e) / s1).abs() < 1e-12);
    }

    #[test]
    fn wronskian_style_identities() {
        // J_0' = -J_1 checked by central differences; J_2 via recurrence.
        for x in [0.3, 1.7, 5.0, 9.0, 20.0] {
            let h = 1e-5;
            let d = (bessel_j0(x + h) - bessel_j0(x - h)) / (2.0 * h);
            assert!((d + bessel_j1(x)).abs() < 1e-9, "x={x}");
        }
        assert!((bessel_j2(0.5) - (2.0 * bessel_j1(0.5) / 0.5 - bessel_j0(0.5))).abs() < 1e-15);
    }

    #[test]
    fn j_parity() {
        assert_eq!(bessel_j0(-3.2), bessel_j0(3.2));
        assert_eq!(bessel_j1(-3.2), -bessel_j1(3.2));
    }
}
