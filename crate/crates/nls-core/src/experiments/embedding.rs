//! Radial weighted Sobolev embedding checks.
//!
//! For admissible parameter tuples the inequality
//! `|| |x|^alpha u ||_{L^q}  <~  || |nabla|^s u ||_{L^p}` holds for radial
//! functions.  Both sides scale identically under dilation exactly when
//! `alpha + s = d(1/p - 1/q)`, so the measured ratio must be
//! scale-invariant; the suite verifies that invariance across a dilation
//! sweep and records the finite ratios on a small function set.
//!
//! Tuple admissibility:
//!
//! ```text
//!     alpha > -d/q,   1/q <= 1/p <= 1/q + s,   1 <= p, q <= inf,
//!     0 < s < d,      alpha + s = d (1/p - 1/q),
//! ```
//!
//! with at most one boundary equality among
//! `p = 1`, `p = inf`, `q = 1`, `q = inf`, `1/p = 1/q + s`.

use super::{describe_setup, ExperimentReport};
use crate::data::{ball_bump, gaussian, truncated_gaussian};
use crate::error::CoreError;
use crate::grid::{sample_radial, to_frequency, to_space, RadialField, RadialGrid, Side};
use crate::norms::{apply_fractional, lebesgue_norm, radial_weight_norm};
use crate::solver::EquationParams;
use crate::Result;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingTuple {
    /// Lebesgue exponent of the derivative side.
    pub p: f64,
    /// Lebesgue exponent of the weighted side.
    pub q: f64,
    /// Derivative order.
    pub s: f64,
    /// Spatial weight power.
    pub alpha: f64,
}

/// Check a tuple against the admissibility constraints; exact comparisons
/// use a 1e-9 margin so that configuration round trips don't flip verdicts.
pub fn validate_embedding_tuple(t: &EmbeddingTuple, dim: usize) -> Result<()> {
    let d = dim as f64;
    let eps = 1e-9;
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    if !(t.p >= 1.0) || !(t.q >= 1.0) {
        return Err(CoreError::InvalidParam(format!(
            "Lebesgue exponents must be at least 1, got p={}, q={}",
            t.p, t.q
        )));
    }
    if !(t.s > 0.0) || !(t.s < d) {
        return Err(CoreError::InvalidParam(format!(
            "derivative order must lie in (0, d), got s={}",
            t.s
        )));
    }
    if t.alpha <= -d * inv(t.q) + eps {
        return Err(CoreError::InvalidParam(format!(
            "weight power alpha={} must exceed -d/q={}",
            t.alpha,
            -d * inv(t.q)
        )));
    }
    if inv(t.q) > inv(t.p) + eps || inv(t.p) > inv(t.q) + t.s + eps {
        return Err(CoreError::InvalidParam(format!(
            "need 1/q <= 1/p <= 1/q + s, got 1/p={}, 1/q={}, s={}",
            inv(t.p),
            inv(t.q),
            t.s
        )));
    }
    let scaling = t.alpha + t.s - d * (inv(t.p) - inv(t.q));
    if scaling.abs() > eps {
        return Err(CoreError::InvalidParam(format!(
            "scaling balance violated: alpha + s - d(1/p - 1/q) = {scaling}"
        )));
    }
    let equalities = [
        (t.p - 1.0).abs() <= eps,
        t.p.is_infinite(),
        (t.q - 1.0).abs() <= eps,
        t.q.is_infinite(),
        (inv(t.p) - inv(t.q) - t.s).abs() <= eps,
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    if equalities > 1 {
        return Err(CoreError::InvalidParam(format!(
            "{equalities} boundary equalities hold simultaneously; at most one is admissible"
        )));
    }
    Ok(())
}

#[derive(Clone)]
pub struct EmbeddingConfig {
    pub params: EquationParams,
    pub grid: Arc<RadialGrid>,
    pub tuples: Vec<EmbeddingTuple>,
    /// Dilation factors of the invariance sweep.
    pub scales: Vec<f64>,
    /// Allowed relative spread of the ratio across the sweep.
    pub tolerance: f64,
}

/// Ratio `|| |x|^alpha u ||_{L^q} / || |nabla|^s u ||_{L^p}` of a physical
/// field.
fn embedding_ratio(u: &RadialField, t: &EmbeddingTuple) -> Result<f64> {
    let weighted = radial_weight_norm(u, t.alpha, t.q)?;
    let derivative = to_space(&apply_fractional(&to_frequency(u)?, t.s)?)?;
    let den = lebesgue_norm(&derivative, t.p)?;
    if den == 0.0 {
        return Err(CoreError::InvalidParam(
            "embedding ratio undefined for zero data".into(),
        ));
    }
    Ok(weighted / den)
}

pub fn run_embedding(cfg: &EmbeddingConfig) -> Result<ExperimentReport> {
    if cfg.tuples.is_empty() || cfg.scales.is_empty() {
        return Err(CoreError::InvalidParam(
            "embedding run needs tuples and a dilation sweep".into(),
        ));
    }
    for t in &cfg.tuples {
        validate_embedding_tuple(t, cfg.params.dim)?;
    }
    let mut report = ExperimentReport::new("run_embedding");
    describe_setup(&mut report, &cfg.params, &cfg.grid);
    report
        .params
        .insert("scales".into(), format!("{:?}", cfg.scales));

    // Dilation sweep on the Gaussian reference profile: both sides scale
    // like lambda^{d/q + alpha} (given the balance constraint), so their
    // ratio must not move.
    for (i, t) in cfg.tuples.iter().enumerate() {
        report.params.insert(
            format!("tuple_{i}"),
            format!("p={}, q={}, s={}, alpha={}", t.p, t.q, t.s, t.alpha),
        );
        let mut lo = f64::MAX;
        let mut hi = f64::MIN;
        for &lambda in &cfg.scales {
            let u = sample_radial(
                &cfg.grid,
                |r| (-(r / lambda) * (r / lambda) / 2.0).exp(),
                Side::Physical,
            )?;
            let ratio = embedding_ratio(&u, t)?;
            report
                .scalars
                .insert(format!("ratio_tuple{i}_lambda{lambda}"), ratio);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        let spread = hi / lo - 1.0;
        report
            .scalars
            .insert(format!("invariance_spread_tuple{i}"), spread);
    }

    // Finiteness on a fixed 5-function set at unit scale, first tuple.
    let t0 = &cfg.tuples[0];
    let functions: Vec<(&str, RadialField)> = vec![
        ("gauss", gaussian(&cfg.grid, 1.0)?),
        ("wide_gauss", gaussian(&cfg.grid, 0.25)?),
        ("bump", ball_bump(&cfg.grid, 1.0)?),
        ("truncated", truncated_gaussian(&cfg.grid, 1.0, 2.0)?),
        (
            "ring",
            sample_radial(
                &cfg.grid,
                |r| (-(r - 3.0) * (r - 3.0)).exp(),
                Side::Physical,
            )?,
        ),
    ];
    for (name, u) in &functions {
        let ratio = embedding_ratio(u, t0)?;
        if !ratio.is_finite() {
            return Err(CoreError::InvalidParam(format!(
                "embedding ratio diverged on test function {name}"
            )));
        }
        report.scalars.insert(format!("ratio_fn_{name}"), ratio);
    }
    Ok(report)
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::grid::build_grid;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tuple_validation() {
        // Plain L² with half a derivative and a compensating weight.
        let ok = EmbeddingTuple {
            p: 2.0,
            q: 2.0,
            s: 0.5,
            alpha: -0.5,
        };
        validate_embedding_tuple(&ok, 4).unwrap();
        // One full derivative into L⁴ in d = 4 needs no weight.
        let strauss = EmbeddingTuple {
            p: 2.0,
            q: 4.0,
            s: 1.0,
            alpha: 0.0,
        };
        validate_embedding_tuple(&strauss, 4).unwrap();
        // Two boundary equalities at once: p = 1 plus q = inf.
        let double = EmbeddingTuple {
            p: 1.0,
            q: f64::INFINITY,
            s: 4.0 - 1e-9, // keep s < d
            alpha: 0.0,
        };
        // Force the scaling balance: alpha + s = d(1 - 0) => alpha = d - s.
        let double = EmbeddingTuple {
            alpha: 4.0 - double.s,
            ..double
        };
        assert!(validate_embedding_tuple(&double, 4).is_err());
        // q = inf together with the sharp derivative equality 1/p = 1/q + s.
        let sharp = EmbeddingTuple {
            p: 2.0,
            q: f64::INFINITY,
            s: 0.5,
            alpha: 4.0 * 0.5 - 0.5,
        };
        assert!(validate_embedding_tuple(&sharp, 4).is_err());
        // Broken scaling balance.
        let unbalanced = EmbeddingTuple {
            p: 2.0,
            q: 2.0,
            s: 0.5,
            alpha: 0.0,
        };
        assert!(validate_embedding_tuple(&unbalanced, 4).is_err());
    }

    #[test]
    fn ratios_are_scale_invariant() {
        let grid = build_grid(4, 1024, 64.0).unwrap();
        let cfg = EmbeddingConfig {
            params: EquationParams::new(4, 0.9, 1.0).unwrap(),
            grid,
            tuples: vec![
                EmbeddingTuple {
                    p: 2.0,
                    q: 2.0,
                    s: 0.5,
                    alpha: -0.5,
                },
                EmbeddingTuple {
                    p: 2.0,
                    q: 4.0,
                    s: 1.0,
                    alpha: 0.0,
                },
            ],
            scales: vec![0.5, 1.0, 2.0],
            tolerance: 0.02,
        };
        let report = run_embedding(&cfg).unwrap();
        assert!(report.scalars["invariance_spread_tuple0"] < 0.02);
        assert!(report.scalars["invariance_spread_tuple1"] < 0.02);
        // Frozen reference ratios for the Gaussian at unit scale.
        assert_abs_diff_eq!(
            report.scalars["ratio_tuple0_lambda1"],
            0.8165,
            epsilon = 5e-4
        );
        // The d = 4 derivative-to-L4 ratio of the Gaussian is 1/(2 sqrt(pi)).
        assert_abs_diff_eq!(
            report.scalars["ratio_tuple1_lambda1"],
            0.5 / std::f64::consts::PI.sqrt(),
            epsilon = 1e-4
        );
        for name in ["gauss", "wide_gauss", "bump", "truncated", "ring"] {
            assert!(report.scalars[&format!("ratio_fn_{name}")].is_finite());
        }
    }

    #[test]
    fn invalid_tuple_rejected_before_measurement() {
        let grid = build_grid(4, 256, 32.0).unwrap();
        let cfg = EmbeddingConfig {
            params: EquationParams::new(4, 0.9, 1.0).unwrap(),
            grid,
            tuples: vec![EmbeddingTuple {
                p: 1.0,
                q: f64::INFINITY,
                s: 2.0,
                alpha: 2.0,
            }],
            scales: vec![1.0],
            tolerance: 0.02,
        };
        assert!(run_embedding(&cfg).is_err());
    }
}
