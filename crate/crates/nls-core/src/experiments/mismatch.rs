//! Frequency/space mismatch measurement.
//!
//! A low-frequency projection (optionally smoothed by a positive power of
//! the gradient) of data supported in a small ball is sampled on annuli far
//! from that support.  The sampled mass must decay in the separation like
//! `A^{-sigma - d/r + d/q}`; with equal Lebesgue exponents on both sides the
//! rate is `A^{-sigma}`.  The suite fits the separation slope and checks it
//! against that rate as an upper bound on the exponent.

use super::{describe_setup, fmt_f64, DecayFit, ExperimentReport, FitKind};
use crate::cutoff::{apply_cutoff, project, BandSpec, CutoffSpec};
use crate::data::truncated_gaussian;
use crate::error::CoreError;
use crate::grid::{to_frequency, to_space, RadialGrid};
use crate::norms::{apply_fractional, lebesgue_norm};
use crate::solver::EquationParams;
use crate::Result;
use std::sync::Arc;

#[derive(Clone)]
pub struct MismatchConfig {
    pub params: EquationParams,
    pub grid: Arc<RadialGrid>,
    /// Source profile `exp(-a r^2/2) chi_{<=cut}`; its support ends at
    /// `1.1 * source_cut`.
    pub source_width: f64,
    pub source_cut: f64,
    /// Smoothing exponent sigma > 0 applied as `|nabla|^sigma` before the
    /// low-pass.
    pub sigma: f64,
    /// Low-pass threshold; at most 1 (the estimate concerns unit-scale
    /// projections).
    pub low_cutoff: f64,
    /// Separation sweep; the sampling annulus for separation A is
    /// (A + inner offset, A + outer offset) in physical space.
    pub separations: Vec<f64>,
    pub band_inner_offset: f64,
    pub band_outer_offset: f64,
    /// Lebesgue exponents of the sampled and source norms; the realized
    /// rate requires them equal.
    pub lebesgue_q: f64,
    pub lebesgue_r: f64,
    /// Slope tolerance (the fitted slope may undershoot the theory rate by
    /// this much and still pass).
    pub tolerance: f64,
}

pub fn run_mismatch(cfg: &MismatchConfig) -> Result<ExperimentReport> {
    if !(cfg.sigma > 0.0) {
        return Err(CoreError::InvalidParam(format!(
            "smoothing exponent must be positive, got {}",
            cfg.sigma
        )));
    }
    if !(cfg.low_cutoff > 0.0) || cfg.low_cutoff > 1.0 {
        return Err(CoreError::InvalidParam(format!(
            "low-pass threshold must lie in (0, 1], got {}",
            cfg.low_cutoff
        )));
    }
    if (cfg.lebesgue_q - cfg.lebesgue_r).abs() > 1e-12 {
        return Err(CoreError::InvalidParam(format!(
            "the realized mismatch rate needs equal Lebesgue exponents, got q = {} and r = {}",
            cfg.lebesgue_q, cfg.lebesgue_r
        )));
    }
    if cfg.separations.len() < 4 {
        return Err(CoreError::InvalidParam(format!(
            "separation sweep needs at least 4 values, got {}",
            cfg.separations.len()
        )));
    }
    if !(cfg.band_outer_offset > cfg.band_inner_offset) {
        return Err(CoreError::InvalidParam(
            "sampling annulus needs outer offset > inner offset".into(),
        ));
    }
    // The sampling annulus begins where chi_{<=A+inner} starts to decay,
    // i.e. at radius A + inner offset; it must clear the source support.
    let support_end = 1.1 * cfg.source_cut;
    let min_sep = cfg.separations.iter().cloned().fold(f64::MAX, f64::min);
    if min_sep + cfg.band_inner_offset < support_end {
        return Err(CoreError::InvalidParam(format!(
            "sampling annulus at separation {min_sep} overlaps the source support (ends at {support_end})"
        )));
    }

    let mut report = ExperimentReport::new("run_mismatch");
    describe_setup(&mut report, &cfg.params, &cfg.grid);
    report.params.insert("sigma".into(), fmt_f64(cfg.sigma));
    report
        .params
        .insert("low_cutoff".into(), fmt_f64(cfg.low_cutoff));
    report
        .params
        .insert("source_cut".into(), fmt_f64(cfg.source_cut));
    report
        .params
        .insert("lebesgue_q".into(), fmt_f64(cfg.lebesgue_q));

    // chi_{<= M} |nabla|^sigma source, back on the physical side.
    let src = truncated_gaussian(&cfg.grid, cfg.source_width, cfg.source_cut)?;
    let smoothed_hat = project(
        &apply_fractional(&to_frequency(&src)?, cfg.sigma)?,
        &BandSpec::low(cfg.low_cutoff),
    )?;
    let smoothed = to_space(&smoothed_hat)?;
    report
        .scalars
        .insert("source_norm".into(), lebesgue_norm(&src, cfg.lebesgue_r)?);

    let mut samples = Vec::with_capacity(cfg.separations.len());
    for &a in &cfg.separations {
        let band = CutoffSpec::band(a + cfg.band_inner_offset, a + cfg.band_outer_offset);
        let sampled = apply_cutoff(&smoothed, &band)?;
        samples.push((a, lebesgue_norm(&sampled, cfg.lebesgue_q)?));
    }

    // With q = r the theory exponent -sigma - d/r + d/q collapses to -sigma.
    let theory_slope = -cfg.sigma;
    report.fits.push(DecayFit::against_theory(
        "mismatch-separation-decay",
        format!("far-sampling decay A^{{-sigma-d/r+d/q}} = A^{theory_slope}"),
        samples,
        theory_slope,
        cfg.tolerance,
        FitKind::UpperBound,
    )?);
    Ok(report)
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::grid::build_grid;

    fn config(grid_n: usize, radius: f64) -> MismatchConfig {
        MismatchConfig {
            params: EquationParams::new(4, 0.9, 1.0).unwrap(),
            grid: build_grid(4, grid_n, radius).unwrap(),
            source_width: 1.0,
            source_cut: 2.0,
            sigma: 1.0,
            low_cutoff: 1.0,
            separations: vec![4.0, 8.0, 16.0, 32.0],
            band_inner_offset: 2.0,
            band_outer_offset: 12.0,
            lebesgue_q: 2.0,
            lebesgue_r: 2.0,
            tolerance: 0.3,
        }
    }

    #[test]
    fn separation_decay_beats_the_rate() {
        let cfg = config(1024, 64.0);
        let report = run_mismatch(&cfg).unwrap();
        assert_eq!(report.fits.len(), 1);
        let fit = &report.fits[0];
        assert_eq!(fit.theory_slope, -1.0);
        assert!(
            fit.verdict,
            "slope {} r2 {}",
            fit.fitted_slope, fit.r_squared
        );
        // The sampled values must decrease strictly across the sweep.
        for pair in fit.samples.windows(2) {
            assert!(pair[1].1 < pair[0].1);
        }
    }

    #[test]
    fn half_power_smoothing() {
        let mut cfg = config(1024, 64.0);
        cfg.sigma = 0.5;
        let report = run_mismatch(&cfg).unwrap();
        let fit = &report.fits[0];
        assert_eq!(fit.theory_slope, -0.5);
        assert!(fit.verdict, "slope {}", fit.fitted_slope);
    }

    #[test]
    fn preconditions_rejected() {
        // Overlapping supports: a separation of 0 puts the annulus inside
        // the source ball.
        let mut cfg = config(512, 64.0);
        cfg.separations = vec![0.0, 8.0, 16.0, 32.0];
        assert!(matches!(
            run_mismatch(&cfg),
            Err(CoreError::InvalidParam(msg)) if msg.contains("overlap")
        ));
        // Mismatched Lebesgue exponents.
        let mut cfg = config(512, 64.0);
        cfg.lebesgue_q = 4.0;
        assert!(run_mismatch(&cfg).is_err());
        // Non-positive smoothing.
        let mut cfg = config(512, 64.0);
        cfg.sigma = 0.0;
        assert!(run_mismatch(&cfg).is_err());
        // Low-pass beyond the unit scale.
        let mut cfg = config(512, 64.0);
        cfg.low_cutoff = 2.0;
        assert!(run_mismatch(&cfg).is_err());
    }
}
