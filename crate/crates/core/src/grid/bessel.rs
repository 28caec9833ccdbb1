//! Bessel function of the first kind of order zero.
//!
//! Three regimes, each accurate to a few ulp of 1:
//! * `x <= 4`: the Taylor series, which has no significant cancellation there.
//! * `4 < x <= 25`: the trapezoidal rule on the periodic integral
//!   `J0(x) = (1/2pi) int_0^{2pi} cos(x sin t) dt`, exact up to `2 J_n(x)` for n nodes.
//! * `x > 25`: Hankel's asymptotic expansion, truncated at its smallest term.

use std::f64::consts::{FRAC_PI_4, PI};

const SERIES_LIMIT: f64 = 4.0;
const QUADRATURE_LIMIT: f64 = 25.0;
const QUADRATURE_NODES: usize = 96;

/// `J0(x)`. Even in `x`, so negative arguments are accepted.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        series(x)
    } else if x <= QUADRATURE_LIMIT {
        periodic_trapezoid(x)
    } else {
        hankel_asymptotic(x)
    }
}

fn series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

fn periodic_trapezoid(x: f64) -> f64 {
    // cos(x sin t) has the symmetry of a quarter period, but the full sum is cheap
    // enough and avoids endpoint weights.
    let n = QUADRATURE_NODES;
    let dt = 2.0 * PI / n as f64;
    let sum: f64 = (0..n).map(|j| (x * (j as f64 * dt).sin()).cos()).sum();
    sum / n as f64
}

fn hankel_asymptotic(x: f64) -> f64 {
    let eight_x = 8.0 * x;
    // b_k = prod_{i<=k} (-(2i-1)^2) / (k! (8x)^k)
    let mut p = 1.0;
    let mut q = 0.0;
    let mut b = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..80 {
        let odd = (2 * k - 1) as f64;
        b *= -odd * odd / (k as f64 * eight_x);
        if b.abs() >= last {
            break;
        }
        last = b.abs();
        let m = k / 2;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * b;
        } else {
            q += sign * b;
        }
        if b.abs() < 1e-18 {
            break;
        }
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}
