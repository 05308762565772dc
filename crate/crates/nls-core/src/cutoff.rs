//! Smooth radial cutoffs and dyadic frequency projectors.
//!
//! The basic profile is the low-pass cutoff chi_{<=a}: identically 1 for
//! x <= a, identically 0 for x >= 1.1 a, and in between the C^∞ partition
//! step built from the bump psi(s) = e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)}).
//! Everything else is assembled from it: chi_{>=a} = 1 - chi_{<=a}, the
//! annulus chi_a = chi_{<=2a} - chi_{<=a}, bands chi_{<=b} - chi_{<=a}, and
//! the frequency projectors P_{<=N}, P_{>=N} = 1 - P_{<=N}, and
//! P_N = (chi_{<=2N} - chi_{<=N})(|xi|), with dyadic N = 2^k.

use crate::error::CoreError;
use crate::grid::{to_frequency, to_space, RadialField, RadialGrid, Side};
use crate::Result;

/// The smooth step: 0 for s <= 0, 1 for s >= 1, strictly increasing between.
/// Written in logistic form 1/(1 + e^{1/s - 1/(1-s)}), which handles the
/// endpoint limits through clean overflow/underflow.
pub fn smoothstep(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        1.0 / (1.0 + (1.0 / s - 1.0 / (1.0 - s)).exp())
    }
}

/// chi_{<=a}(x): 1 on [0, a], 0 on [1.1 a, ∞), smooth monotone between.
pub fn low_pass_profile(x: f64, a: f64) -> f64 {
    debug_assert!(a > 0.0);
    1.0 - smoothstep((x - a) / (0.1 * a))
}

/// Smooth cutoff profile in the radial variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    pub threshold: f64,
    pub kind: CutoffKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffKind {
    /// chi_{<=a}
    Below,
    /// chi_{>=a} = 1 - chi_{<=a}
    Above,
    /// chi_a = chi_{<=2a} - chi_{<=a}
    Annulus,
    /// chi_{<=b} - chi_{<=a}, the smooth indicator of a <~ x <~ b
    Band { upper: f64 },
}

impl CutoffSpec {
    pub fn below(a: f64) -> Self {
        assert!(a > 0.0, "cutoff threshold must be positive");
        CutoffSpec { threshold: a, kind: CutoffKind::Below }
    }

    pub fn above(a: f64) -> Self {
        assert!(a > 0.0, "cutoff threshold must be positive");
        CutoffSpec { threshold: a, kind: CutoffKind::Above }
    }

    pub fn annulus(a: f64) -> Self {
        assert!(a > 0.0, "cutoff threshold must be positive");
        CutoffSpec { threshold: a, kind: CutoffKind::Annulus }
    }

    pub fn band(a: f64, b: f64) -> Self {
        assert!(a > 0.0 && b > a, "band needs 0 < a < b");
        CutoffSpec { threshold: a, kind: CutoffKind::Band { upper: b } }
    }

    /// Evaluate the profile at one point.
    pub fn profile(&self, x: f64) -> f64 {
        let a = self.threshold;
        match self.kind {
            CutoffKind::Below => low_pass_profile(x, a),
            CutoffKind::Above => 1.0 - low_pass_profile(x, a),
            CutoffKind::Annulus => low_pass_profile(x, 2.0 * a) - low_pass_profile(x, a),
            CutoffKind::Band { upper } => low_pass_profile(x, upper) - low_pass_profile(x, a),
        }
    }
}

/// Multiply a physical-side field pointwise by the cutoff profile.
pub fn apply_cutoff(f: &RadialField, spec: &CutoffSpec) -> Result<RadialField> {
    f.ensure_side(Side::Physical)?;
    let profile: Vec<f64> = f.grid.r_nodes.iter().map(|&r| spec.profile(r)).collect();
    Ok(f.mul_real(&profile))
}

/// The same smooth profile in time: chi_{<=threshold}(|t|).
pub fn apply_time_cutoff(t: f64, threshold: f64) -> f64 {
    assert!(threshold > 0.0, "time cutoff threshold must be positive");
    low_pass_profile(t.abs(), threshold)
}

/// Dyadic frequency 2^k.
pub fn dyadic(k: i32) -> f64 {
    2f64.powi(k)
}

/// Littlewood-Paley projector specification at cutoff frequency N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSpec {
    pub cutoff_freq: f64,
    pub kind: BandKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandKind {
    /// P_{<=N}
    Low,
    /// P_{>=N} = 1 - P_{<=N}
    High,
    /// P_N, supported in N < |xi| < 2.2 N
    Band,
}

impl BandSpec {
    pub fn low(n: f64) -> Self {
        BandSpec { cutoff_freq: n, kind: BandKind::Low }
    }

    pub fn high(n: f64) -> Self {
        BandSpec { cutoff_freq: n, kind: BandKind::High }
    }

    pub fn band(n: f64) -> Self {
        BandSpec { cutoff_freq: n, kind: BandKind::Band }
    }

    /// The frequency multiplier at one frequency.
    pub fn multiplier(&self, rho: f64) -> f64 {
        let n = self.cutoff_freq;
        match self.kind {
            BandKind::Low => low_pass_profile(rho, n),
            BandKind::High => 1.0 - low_pass_profile(rho, n),
            BandKind::Band => low_pass_profile(rho, 2.0 * n) - low_pass_profile(rho, n),
        }
    }
}

/// The multiplier evaluated on a grid's frequency nodes.
pub fn band_multiplier(grid: &RadialGrid, spec: &BandSpec) -> Vec<f64> {
    grid.rho_nodes.iter().map(|&rho| spec.multiplier(rho)).collect()
}

/// Apply a frequency projector. Accepts either side; the result comes back on
/// the side the input was on.
pub fn project(f: &RadialField, spec: &BandSpec) -> Result<RadialField> {
    if !(spec.cutoff_freq > 0.0) {
        return Err(CoreError::InvalidParam(format!(
            "projector frequency must be positive, got {}",
            spec.cutoff_freq
        )));
    }
    let mult = band_multiplier(&f.grid, spec);
    match f.side {
        Side::Frequency => Ok(f.mul_real(&mult)),
        Side::Physical => {
            let fhat = to_frequency(f)?;
            to_space(&fhat.mul_real(&mult))
        }
    }
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::grid::{build_grid, sample_radial};
    use approx::assert_abs_diff_eq;

    #[test]
    fn profile_plateau_tail_and_transition() {
        let chi = CutoffSpec::below(1.0);
        assert_eq!(chi.profile(0.3), 1.0);
        assert_eq!(chi.profile(1.0), 1.0);
        assert_eq!(chi.profile(1.1), 0.0);
        assert_eq!(chi.profile(2.0), 0.0);
        // Transition values of the partition step (midpoint is exactly 1/2).
        assert_abs_diff_eq!(chi.profile(1.05), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(chi.profile(1.025), 1.0 - 6.4969169128664045e-02, epsilon = 1e-15);
        assert_abs_diff_eq!(chi.profile(1.075), 6.4969169128664045e-02, epsilon = 1e-15);
        // Monotone decreasing across the transition.
        let mut prev = 1.0;
        for i in 0..=100 {
            let x = 1.0 + 0.1 * i as f64 / 100.0;
            let v = chi.profile(x);
            assert!(v <= prev + 1e-15, "profile not monotone at x={x}");
            prev = v;
        }
    }

    #[test]
    fn above_and_annulus_are_complements_and_differences() {
        let a = 2.5;
        for x in [0.1, 2.4, 2.6, 2.74, 2.76, 5.0, 5.4, 7.0] {
            let lo = CutoffSpec::below(a).profile(x);
            let hi = CutoffSpec::above(a).profile(x);
            assert_abs_diff_eq!(lo + hi, 1.0, epsilon = 1e-15);
            let ann = CutoffSpec::annulus(a).profile(x);
            let expect = CutoffSpec::below(2.0 * a).profile(x) - lo;
            assert_abs_diff_eq!(ann, expect, epsilon = 1e-15);
        }
        let band = CutoffSpec::band(1.0, 4.0);
        assert_eq!(band.profile(0.5), 0.0);
        assert_eq!(band.profile(2.0), 1.0);
        assert_eq!(band.profile(4.5), 0.0);
    }

    #[test]
    fn time_cutoff_examples() {
        assert_eq!(apply_time_cutoff(0.5, 1.0), 1.0);
        assert_eq!(apply_time_cutoff(-0.5, 1.0), 1.0);
        assert_eq!(apply_time_cutoff(1.2, 1.0), 0.0);
        let v = apply_time_cutoff(1.05, 1.0);
        assert!(v > 0.0 && v < 1.0);
        assert!(apply_time_cutoff(1.06, 1.0) < v);
    }

    #[test]
    fn spatial_partition_is_exact() {
        let g = build_grid(4, 64, 8.0).unwrap();
        let f = sample_radial(&g, |r| (-0.3 * r * r).exp() * (1.0 + r), Side::Physical).unwrap();
        let lo = apply_cutoff(&f, &CutoffSpec::below(3.0)).unwrap();
        let hi = apply_cutoff(&f, &CutoffSpec::above(3.0)).unwrap();
        let sum = lo.add(&hi).unwrap();
        for (s, v) in sum.values.iter().zip(&f.values) {
            assert_abs_diff_eq!(s.re, v.re, epsilon = 1e-15);
            assert_abs_diff_eq!(s.im, v.im, epsilon = 1e-15);
        }
        // chi_{<=10} leaves samples at r <= 5 untouched: that is the plateau.
        let wide = apply_cutoff(&f, &CutoffSpec::below(10.0)).unwrap();
        for ((s, v), r) in wide.values.iter().zip(&f.values).zip(&g.r_nodes) {
            if *r <= 5.0 {
                assert_eq!(s, v);
            }
        }
    }

    #[test]
    fn projectors_partition_and_compose() {
        let g = build_grid(4, 256, 16.0).unwrap();
        let f = sample_radial(&g, |r| (-0.4 * r * r).exp() * (1.0 - r + r * r), Side::Physical)
            .unwrap();
        let lo = project(&f, &BandSpec::low(4.0)).unwrap();
        let hi = project(&f, &BandSpec::high(4.0)).unwrap();
        let err = lo.add(&hi).unwrap().distance_l2(&f).unwrap();
        assert!(err <= 1e-12 * f.norm_l2(), "partition defect {err}");

        // P_N twice equals the chi_N^2 multiplier applied once.
        let band = BandSpec::band(2.0);
        let twice = project(&project(&f, &band).unwrap(), &band).unwrap();
        let sq: Vec<f64> = band_multiplier(&g, &band).iter().map(|m| m * m).collect();
        let fhat = crate::grid::to_frequency(&f).unwrap();
        let direct = crate::grid::to_space(&fhat.mul_real(&sq)).unwrap();
        assert!(twice.distance_l2(&direct).unwrap() <= 1e-12 * f.norm_l2());
    }

    #[test]
    fn high_projector_mass_decreases_in_cutoff() {
        let g = build_grid(4, 256, 16.0).unwrap();
        let f = sample_radial(&g, |r| (-0.5 * r * r).exp(), Side::Physical).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..5 {
            let n = dyadic(k);
            let hi = project(&f, &BandSpec::high(n)).unwrap();
            let m = hi.norm_l2();
            assert!(m <= prev + 1e-14, "high-frequency mass grew at N={n}");
            prev = m;
        }
    }

    #[test]
    fn band_projector_is_local_in_frequency() {
        let g = build_grid(4, 512, 32.0).unwrap();
        let f = sample_radial(&g, |r| (1.0 + r).recip(), Side::Physical).unwrap();
        let n = 4.0;
        let pf = project(&f, &BandSpec::band(n)).unwrap();
        let phat = crate::grid::to_frequency(&pf).unwrap();
        let mut inside = 0.0;
        let mut total = 0.0;
        for ((v, w), rho) in phat.values.iter().zip(phat.weights()).zip(phat.nodes()) {
            let m = w * v.norm_sqr();
            total += m;
            if *rho >= 0.9 * n && *rho <= 2.2 * n {
                inside += m;
            }
        }
        assert!(inside / total >= 1.0 - 1e-10, "locality ratio {}", inside / total);
    }

    #[test]
    fn invalid_projector_frequency_is_rejected() {
        let g = build_grid(4, 64, 8.0).unwrap();
        let f = RadialField::zeros(g, Side::Physical);
        let r = project(&f, &BandSpec::low(0.0));
        assert!(matches!(r, Err(CoreError::InvalidParam(_))));
    }
}
