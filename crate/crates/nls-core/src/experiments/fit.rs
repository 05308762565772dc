//! Least-squares slope extraction.
//!
//! Everything is ordinary one-regressor least squares in closed form; the
//! only care taken is to refuse inputs on which a slope is meaningless
//! (too few points, non-positive values in log coordinates, or abscissae
//! with no spread).

use crate::error::CoreError;
use crate::Result;

/// Slope, intercept, and coefficient of determination of a log-log fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// One-regressor ordinary least squares: returns (slope, intercept, ssr,
/// ss_tot) of y against x.
fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        cov += (a - mx) * (b - my);
        var += (a - mx) * (a - mx);
    }
    let slope = cov / var;
    let intercept = my - slope * mx;
    let mut ssr = 0.0;
    let mut ss_tot = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let pred = intercept + slope * a;
        ssr += (b - pred) * (b - pred);
        ss_tot += (b - my) * (b - my);
    }
    (slope, intercept, ssr, ss_tot)
}

/// Fit `value = C * abscissa^slope` by least squares in log-log coordinates.
///
/// Requires at least 4 samples, all coordinates positive and finite, and at
/// least 3 distinct abscissae (with only 2 the "fit" is an interpolation
/// with no redundancy to expose curvature).
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<PowerLawFit> {
    if samples.len() < 4 {
        return Err(CoreError::FitDegenerate(format!(
            "power-law fit needs at least 4 samples, got {}",
            samples.len()
        )));
    }
    fit_power_law_core(samples)
}

/// The same regression with the minimum sample count lowered to 3, for the
/// dyadic octave sweeps whose scale count is pinned at three by the frozen
/// run definitions.  Only suite-internal fits use this entry point.
pub(crate) fn fit_power_law_relaxed(samples: &[(f64, f64)]) -> Result<PowerLawFit> {
    if samples.len() < 3 {
        return Err(CoreError::FitDegenerate(format!(
            "power-law fit needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    fit_power_law_core(samples)
}

fn fit_power_law_core(samples: &[(f64, f64)]) -> Result<PowerLawFit> {
    for &(t, v) in samples {
        if !(t > 0.0) || !(v > 0.0) || !t.is_finite() || !v.is_finite() {
            return Err(CoreError::FitDegenerate(format!(
                "power-law fit needs positive finite samples, got ({t}, {v})"
            )));
        }
    }
    let mut distinct: Vec<f64> = samples.iter().map(|s| s.0).collect();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(CoreError::FitDegenerate(format!(
            "insufficient abscissa spread: only {} distinct values",
            distinct.len()
        )));
    }
    let lx: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ly: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let (slope, intercept, ssr, ss_tot) = ols(&lx, &ly);
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ssr / ss_tot };
    Ok(PowerLawFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Slope of `value` against `ln(abscissa)` (semi-log trend): the boundedness
/// diagnostic for quantities that should neither grow nor decay across a
/// dyadic sweep.  Values may be any sign; abscissae must be positive with
/// some spread.
pub fn fit_semilog_trend(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(CoreError::FitDegenerate(
            "semi-log trend needs at least 2 samples".into(),
        ));
    }
    for &(t, _) in samples {
        if !(t > 0.0) || !t.is_finite() {
            return Err(CoreError::FitDegenerate(format!(
                "semi-log trend needs positive abscissae, got {t}"
            )));
        }
    }
    let lx: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.1).collect();
    if lx.iter().all(|&x| x == lx[0]) {
        return Err(CoreError::FitDegenerate(
            "semi-log trend needs abscissa spread".into(),
        ));
    }
    Ok(ols(&lx, &y).0)
}

/// Affine fit `y = c0 + c1 t`; returns (c0, c1, sum of squared residuals).
pub fn fit_affine(times: &[f64], values: &[f64]) -> Result<(f64, f64, f64)> {
    fit_scaled_power(times, values, 1.0)
}

/// Fit `y = c0 + c1 t^power`; returns (c0, c1, sum of squared residuals).
/// Used to test whether a superlinear model explains growth data better
/// than the affine one.
pub fn fit_scaled_power(times: &[f64], values: &[f64], power: f64) -> Result<(f64, f64, f64)> {
    if times.len() != values.len() || times.len() < 3 {
        return Err(CoreError::FitDegenerate(format!(
            "affine fit needs matching lists of at least 3 points, got {} and {}",
            times.len(),
            values.len()
        )));
    }
    let x: Vec<f64> = times.iter().map(|&t| t.powf(power)).collect();
    if x.iter().all(|&v| v == x[0]) {
        return Err(CoreError::FitDegenerate(
            "affine fit needs abscissa spread".into(),
        ));
    }
    let (slope, intercept, ssr, _) = ols(&x, values);
    Ok((intercept, slope, ssr))
}
