//! The free Schrödinger flow S(t) = e^{itΔ}.
//!
//! Fast path: under the fixed transform convention the flow is the frequency
//! multiplier e^{-it rho^2}. Oracle path: direct quadrature of the radial
//! reduction of the explicit kernel
//!
//! ```text
//! S(t)φ(x) = (4 pi i t)^{-d/2} ∫ e^{i|x-y|^2/(4t)} φ(y) dy,
//! ```
//!
//! whose angular integral collapses, for radial φ and every dimension, to
//!
//! ```text
//! S(t)φ(r) = e^{-i pi d/4} (2t)^{-1} r^{-nu} ∫_0^∞ e^{i(r^2+s^2)/(4t)}
//!            J_nu(r s / 2t) φ(s) s^{nu+1} ds,        t > 0,
//! ```
//!
//! with t < 0 recovered from S(-t)φ = conj(S(t) conj(φ)). The two paths are
//! numerically independent — the oracle never touches the transform kernel —
//! which is what makes the cross-check in the tests meaningful.

use crate::bessel::bessel_j;
use crate::error::CoreError;
use crate::grid::{to_frequency, to_space, RadialField, Side};
use crate::{Result, C64};

/// Fraction of the radius past which the oracle considers data "at the
/// boundary": the kernel integral needs the support comfortably inside.
const ORACLE_SUPPORT_FRACTION: f64 = 0.8;
const ORACLE_SUPPORT_TOL: f64 = 1e-8;

/// Apply the free flow for time `t` (either sign). Accepts either side and
/// returns the result on the side the input was on.
pub fn evolve_free(f: &RadialField, t: f64) -> Result<RadialField> {
    if !t.is_finite() {
        return Err(CoreError::InvalidParam(format!("non-finite time {t}")));
    }
    f.ensure_finite()?;
    match f.side {
        Side::Frequency => Ok(free_phase(f, t)),
        Side::Physical => {
            let fhat = to_frequency(f)?;
            to_space(&free_phase(&fhat, t))
        }
    }
}

// Multiply a frequency-side field by e^{-i t rho^2}.
fn free_phase(fhat: &RadialField, t: f64) -> RadialField {
    let values = fhat
        .values
        .iter()
        .zip(&fhat.grid.rho_nodes)
        .map(|(v, rho)| v * C64::from_polar(1.0, -t * rho * rho))
        .collect();
    RadialField {
        grid: fhat.grid.clone(),
        side: Side::Frequency,
        values,
    }
}

/// Direct oscillatory-kernel quadrature of S(t), for cross-validating the
/// multiplier path. Requires t ≠ 0 and data supported well inside the grid.
pub fn kernel_evolve_oracle(f: &RadialField, t: f64) -> Result<RadialField> {
    f.ensure_side(Side::Physical)?;
    f.ensure_finite()?;
    if t == 0.0 || !t.is_finite() {
        return Err(CoreError::InvalidParam(format!(
            "kernel quadrature needs finite t != 0, got {t}"
        )));
    }
    let tail = f.tail_mass_fraction(ORACLE_SUPPORT_FRACTION);
    if tail > ORACLE_SUPPORT_TOL {
        return Err(CoreError::GuardTripped {
            time: t,
            fraction: tail,
            threshold: ORACLE_SUPPORT_TOL,
        });
    }
    if t < 0.0 {
        // S(-|t|)φ = conj(S(|t|) conj(φ)).
        let conj = RadialField {
            grid: f.grid.clone(),
            side: f.side,
            values: f.values.iter().map(|v| v.conj()).collect(),
        };
        let fwd = kernel_evolve_oracle(&conj, -t)?;
        return Ok(RadialField {
            grid: fwd.grid,
            side: fwd.side,
            values: fwd.values.iter().map(|v| v.conj()).collect(),
        });
    }

    let g = &f.grid;
    let nu = g.order;
    let omega = crate::grid::sphere_area(g.dim);
    let pref = C64::from_polar(1.0 / (2.0 * t), -std::f64::consts::FRAC_PI_4 * g.dim as f64);

    // Source samples with everything that does not depend on the output node:
    // φ(s) e^{i s^2/4t} s^{-nu} w_space / omega  (the s^{nu+1} measure and the
    // bare radial weight combine to s^{-nu} w_space / omega).
    let source: Vec<C64> = f
        .values
        .iter()
        .zip(&g.r_nodes)
        .zip(&g.quad_weights_space)
        .map(|((v, s), w)| {
            v * C64::from_polar(1.0, s * s / (4.0 * t)) * (s.powf(-nu) * w / omega)
        })
        .collect();

    let mut out = Vec::with_capacity(g.node_count);
    for &r in &g.r_nodes {
        let mut acc = C64::new(0.0, 0.0);
        for (src, &s) in source.iter().zip(&g.r_nodes) {
            acc += src * bessel_j(nu, r * s / (2.0 * t));
        }
        let phase = C64::from_polar(1.0, r * r / (4.0 * t));
        out.push(pref * phase * acc * r.powf(-nu));
    }
    RadialField::new(f.grid.clone(), Side::Physical, out)
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::grid::{build_grid, sample_radial};
    use approx::assert_abs_diff_eq;

    fn gaussian_field(n: usize, radius: f64) -> RadialField {
        let g = build_grid(4, n, radius).unwrap();
        sample_radial(&g, |r| (-0.5 * r * r).exp(), Side::Physical).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let f = gaussian_field(256, 16.0);
        let u = evolve_free(&f, 0.0).unwrap();
        assert!(u.distance_l2(&f).unwrap() < 1e-13 * f.norm_l2());
    }

    #[test]
    fn unitary_over_a_wide_time_range() {
        let f = gaussian_field(256, 16.0);
        let base = f.norm_l2();
        for t in [-100.0, -31.4, -1.0, 0.3, 7.7, 42.0, 100.0] {
            let u = evolve_free(&f, t).unwrap();
            assert!(
                (u.norm_l2() - base).abs() <= 1e-10 * base,
                "norm drift at t={t}: {}",
                (u.norm_l2() - base).abs() / base
            );
        }
    }

    #[test]
    fn group_law() {
        let f = gaussian_field(256, 16.0);
        for (s, t) in [(0.5, 1.7), (-2.0, 3.0), (10.0, -10.0)] {
            let two_step = evolve_free(&evolve_free(&f, s).unwrap(), t).unwrap();
            let one_step = evolve_free(&f, s + t).unwrap();
            let err = two_step.distance_l2(&one_step).unwrap();
            assert!(err <= 1e-10 * f.norm_l2(), "group law defect {err} at ({s},{t})");
        }
    }

    #[test]
    fn time_reversal_symmetry() {
        let g = build_grid(4, 128, 12.0).unwrap();
        let f = sample_radial(&g, |r| C64::new((-r * r).exp(), 0.3 * (-0.5 * r * r).exp()),
            Side::Physical)
        .unwrap();
        let conj_f = RadialField {
            grid: f.grid.clone(),
            side: f.side,
            values: f.values.iter().map(|v| v.conj()).collect(),
        };
        let lhs = evolve_free(&conj_f, 2.0).unwrap();
        let rhs = evolve_free(&f, -2.0).unwrap();
        for (a, b) in lhs.values.iter().zip(&rhs.values) {
            assert_abs_diff_eq!(a.re, b.conj().re, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, b.conj().im, epsilon = 1e-12);
        }
    }

    #[test]
    fn gaussian_spreads_in_closed_form() {
        // e^{-a r^2/2} evolves to (1+2iat)^{-d/2} e^{-a r^2 / (2(1+2iat))}.
        let g = build_grid(4, 1024, 32.0).unwrap();
        let a = 1.0;
        let f = sample_radial(&g, |r| (-0.5 * a * r * r).exp(), Side::Physical).unwrap();
        let t = 2.0;
        let u = evolve_free(&f, t).unwrap();
        let b = C64::new(1.0, 2.0 * a * t);
        let pref = b.powf(-(g.dim as f64) / 2.0);
        // Spot value of the prefactor: (1+4i)^{-2}.
        assert_abs_diff_eq!(pref.re, -5.1903114186851215e-02, epsilon = 1e-15);
        assert_abs_diff_eq!(pref.im, -2.7681660899653980e-02, epsilon = 1e-15);
        let mut worst = 0.0f64;
        for (v, &r) in u.values.iter().zip(&g.r_nodes) {
            let exact = pref * (-(a * r * r) / (2.0 * b)).exp();
            worst = worst.max((v - exact).norm());
        }
        assert!(worst < 1e-10, "Gaussian evolution off by {worst}");
    }

    #[test]
    fn kernel_oracle_matches_multiplier_path() {
        let g = build_grid(4, 1024, 32.0).unwrap();
        // Smooth compact bump: e^{-8 r^2} (1-r^2)_+^2, supported in r <= 1.
        let f = sample_radial(
            &g,
            |r| {
                let c = (1.0 - r * r).max(0.0);
                (-8.0 * r * r).exp() * c * c
            },
            Side::Physical,
        )
        .unwrap();
        for t in [0.25, 0.5, -0.25] {
            let fast = evolve_free(&f, t).unwrap();
            let slow = kernel_evolve_oracle(&f, t).unwrap();
            let rel = fast.distance_l2(&slow).unwrap() / f.norm_l2();
            assert!(rel <= 1e-4, "kernel oracle mismatch {rel} at t={t}");
            assert!(rel <= 1e-5, "kernel oracle looser than expected: {rel} at t={t}");
        }
    }

    #[test]
    fn kernel_oracle_rejects_bad_inputs() {
        let g = build_grid(4, 64, 8.0).unwrap();
        let bump = sample_radial(
            &g,
            |r| {
                let c = (1.0 - r * r).max(0.0);
                c * c
            },
            Side::Physical,
        )
        .unwrap();
        assert!(matches!(
            kernel_evolve_oracle(&bump, 0.0),
            Err(CoreError::InvalidParam(_))
        ));
        // Data reaching the boundary trips the support guard.
        let wide = sample_radial(&g, |_| 1.0, Side::Physical).unwrap();
        assert!(matches!(
            kernel_evolve_oracle(&wide, 1.0),
            Err(CoreError::GuardTripped { .. })
        ));
        // Zero maps to zero.
        let z = RadialField::zeros(g, Side::Physical);
        let out = kernel_evolve_oracle(&z, 1.0).unwrap();
        assert_eq!(out.norm_l2(), 0.0);
    }
}
