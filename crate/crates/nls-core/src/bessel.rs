//! Bessel functions of the first kind and their zeros, for the orders the
//! radial transform needs: nu = d/2 - 1 with integer dimension d >= 2, so
//! integer and half-integer orders only.
//!
//! Integer orders delegate to libm's `jn` (full double precision). Half
//! integers use the closed spherical forms J_{1/2}, J_{3/2} plus upward
//! recurrence, except near the origin where the ascending series is used to
//! dodge the cancellation in `sin x / x - cos x`-type expressions.

use std::f64::consts::{FRAC_2_PI, PI};

/// Below this argument half-integer orders switch to the ascending series.
const SERIES_CUTOFF: f64 = 0.5;

/// J_nu(x) for x >= 0 and nu a nonnegative integer or half-integer.
///
/// Callers pass orders derived from a dimension (`nu = d/2 - 1`), so anything
/// else is a programming error and panics.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    debug_assert!(x >= 0.0, "bessel_j expects x >= 0, got {x}");
    let twice = 2.0 * nu;
    assert!(
        nu >= 0.0 && (twice - twice.round()).abs() < 1e-12,
        "order must be a nonnegative integer or half-integer, got {nu}"
    );
    if (nu - nu.round()).abs() < 1e-12 {
        return libm::jn(nu.round() as i32, x);
    }
    if x < SERIES_CUTOFF {
        return series(nu, x);
    }
    // J_{1/2}(x) = sqrt(2/(pi x)) sin x,  J_{3/2}(x) = sqrt(2/(pi x)) (sin x / x - cos x),
    // then J_{k+1} = (2k/x) J_k - J_{k-1} upward; stable here because x >= 1/2
    // keeps the subtraction mild for the small orders we ever use.
    let pre = (FRAC_2_PI / x).sqrt();
    let mut lo = pre * x.sin();
    if nu == 0.5 {
        return lo;
    }
    let mut hi = pre * (x.sin() / x - x.cos());
    let mut k = 1.5;
    while k < nu - 1e-9 {
        let next = (2.0 * k / x) * hi - lo;
        lo = hi;
        hi = next;
        k += 1.0;
    }
    hi
}

/// Derivative J_nu'(x) = (J_{nu-1}(x) - J_{nu+1}(x)) / 2.
pub fn bessel_j_prime(nu: f64, x: f64) -> f64 {
    let lower = if nu == 0.5 {
        // J_{-1/2}(x) = sqrt(2/(pi x)) cos x
        (FRAC_2_PI / x).sqrt() * x.cos()
    } else if nu == 0.0 {
        -libm::j1(x)
    } else {
        bessel_j(nu - 1.0, x)
    };
    0.5 * (lower - bessel_j(nu + 1.0, x))
}

/// Ascending series sum_k (-1)^k (x/2)^{nu+2k} / (k! Gamma(nu+k+1)).
fn series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powf(nu) / libm::tgamma(nu + 1.0);
    let mut sum = term;
    let q = half * half;
    for k in 1..30 {
        let kf = k as f64;
        term *= -q / (kf * (nu + kf));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// First `count` positive zeros of J_nu, ascending.
///
/// McMahon's asymptotic expansion seeds a Newton iteration; for the orders
/// and counts used here every zero converges in a handful of steps and the
/// result is accurate to machine precision.
pub fn bessel_zeros(nu: f64, count: usize) -> Vec<f64> {
    let mu = 4.0 * nu * nu;
    let mut zeros = Vec::with_capacity(count);
    for k in 1..=count {
        let beta = (k as f64 + 0.5 * nu - 0.25) * PI;
        let mut x = beta - (mu - 1.0) / (8.0 * beta)
            - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * beta).powi(3));
        for _ in 0..60 {
            let f = bessel_j(nu, x);
            let fp = bessel_j_prime(nu, x);
            let step = f / fp;
            x -= step;
            if step.abs() < 1e-14 * x {
                break;
            }
        }
        zeros.push(x);
    }
    for w in zeros.windows(2) {
        assert!(
            w[1] > w[0] + 1.0,
            "zero ordering broke down: {} then {}",
            w[0],
            w[1]
        );
    }
    zeros
}
