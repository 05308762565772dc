//! Free-flow invariants at the library level: unitarity over a wide signed
//! time range, the group law, time-reversal symmetry, and the dispersive
//! decay law ‖S(t)φ‖_{L^r} ~ t^{-d(1/2-1/r)}.

use nls_core::data::truncated_gaussian;
use nls_core::experiments::fit_power_law;
use nls_core::norms::lebesgue_norm;
use nls_core::propagator::evolve_free;
use nls_core::{build_grid, sample_radial, RadialField, Side};

fn test_datum(n: usize, radius: f64) -> RadialField {
    let grid = build_grid(4, n, radius).unwrap();
    sample_radial(&grid, |r| (-r * r / 2.0) .exp(), Side::Physical).unwrap()
}

#[test]
fn free_flow_is_unitary_across_signed_times() {
    let f = test_datum(1024, 64.0);
    let mass = f.norm_l2();
    for t in [-100.0, -10.0, -1.0, -0.1, 0.0, 0.1, 1.0, 10.0, 100.0] {
        let moved = evolve_free(&f, t).unwrap();
        let rel = (moved.norm_l2() - mass).abs() / mass;
        assert!(rel <= 1e-10, "t={t}: norm drift {rel:.3e}");
    }
}

#[test]
fn free_flow_satisfies_group_law() {
    let f = test_datum(1024, 64.0);
    for (s, t) in [(0.3, 0.7), (-2.0, 5.0), (11.0, -4.0)] {
        let two_step = evolve_free(&evolve_free(&f, s).unwrap(), t).unwrap();
        let one_step = evolve_free(&f, s + t).unwrap();
        let gap = two_step.distance_l2(&one_step).unwrap() / f.norm_l2();
        assert!(gap <= 1e-10, "s={s} t={t}: group-law gap {gap:.3e}");
    }
}

#[test]
fn conjugation_reverses_time() {
    let grid = build_grid(4, 1024, 64.0).unwrap();
    // Complex datum so that conjugation is not a no-op.
    let f = sample_radial(&grid, |r| (-r * r / 2.0).exp(), Side::Physical)
        .unwrap()
        .add(
            &sample_radial(&grid, |r| (-(r - 2.0) * (r - 2.0)).exp(), Side::Physical)
                .unwrap()
                .scaled(nls_core::C64::new(0.0, 0.6)),
        )
        .unwrap();
    let conj = |g: &RadialField| {
        RadialField::new(
            g.grid.clone(),
            g.side,
            g.values.iter().map(|v| v.conj()).collect(),
        )
        .unwrap()
    };
    for t in [0.4, 3.0, -7.5] {
        let lhs = evolve_free(&conj(&f), t).unwrap();
        let rhs = conj(&evolve_free(&f, -t).unwrap());
        let worst = lhs
            .values
            .iter()
            .zip(&rhs.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(worst <= 1e-12, "t={t}: pointwise gap {worst:.3e}");
    }
}

/// For smooth compact data the free flow decays like t^{-d(1/2-1/r)} in
/// L^r: slope -1 at r=4 and -4/3 at r=6 in dimension four. The domain is
/// deep (R=512) so the wave train stays clear of the boundary over the
/// whole fit window t ∈ [1, 50].
#[test]
fn dispersive_decay_exponents_match_theory() {
    let grid = build_grid(4, 2048, 512.0).unwrap();
    let phi = truncated_gaussian(&grid, 1.0, 8.0).unwrap();
    let phat = nls_core::grid::to_frequency(&phi).unwrap();
    let times = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 50.0];
    for (r, theory) in [(4.0, -1.0), (6.0, -4.0 / 3.0)] {
        let mut samples = Vec::new();
        for &t in &times {
            let ut = nls_core::grid::to_space(&evolve_free(&phat, t).unwrap()).unwrap();
            samples.push((t, lebesgue_norm(&ut, r).unwrap()));
        }
        let fit = fit_power_law(&samples).unwrap();
        assert!(
            (fit.slope - theory).abs() <= 0.1,
            "r={r}: slope {:.4} vs theory {theory}",
            fit.slope
        );
        assert!(fit.r_squared >= 0.99, "r={r}: r^2 {:.4}", fit.r_squared);
    }
}
