//! Deterministic initial-data constructors.
//!
//! Every experiment draws its data from this module so that a run is fully
//! determined by its configuration: smooth reference profiles (Gaussians,
//! compact bumps), frequency-localized shell profiles for decay studies, and
//! a seeded rough-data generator producing random-sign superpositions of
//! unit-energy dyadic annulus bumps,
//!
//! ```text
//!     u_0 = amp * chi_{<=1}(r) * Sum_M  eps_M  M^w  phi_M,
//! ```
//!
//! where `phi_M` is the inverse transform of the dyadic band multiplier on
//! (M, 2.2 M), normalized to unit energy, and the signs `eps_M` come from a
//! small hand-rolled PRNG.  A library generator would work just as well, but
//! a fixed 20-line implementation guarantees the byte-level reproducibility
//! contract across toolchain updates.

use crate::cutoff::{band_multiplier, low_pass_profile, BandSpec};
use crate::error::CoreError;
use crate::grid::{sample_radial, to_space, RadialField, RadialGrid, Side};
use crate::{Result, C64};
use std::sync::Arc;

/// SplitMix64 pseudo-random generator (Steele, Lea & Flood 2014).
///
/// Tiny, splittable, and passes BigCrush; we use it only for Rademacher
/// signs and uniform variates, so statistical quality is far beyond what is
/// needed.  The point is determinism: the output stream for a given seed is
/// frozen by the tests below.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    /// Create a generator from a seed; equal seeds give equal streams.
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Next raw 64-bit word.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform variate in [0, 1) with 53 random mantissa bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Rademacher sign: +1.0 or -1.0 with equal probability (top bit).
    pub fn sign(&mut self) -> f64 {
        if self.next_u64() >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Gaussian profile `exp(-a r^2 / 2)` on the physical grid.
pub fn gaussian(grid: &Arc<RadialGrid>, a: f64) -> Result<RadialField> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(CoreError::InvalidParam(format!(
            "gaussian width parameter must be positive and finite, got {a}"
        )));
    }
    sample_radial(grid, |r| (-a * r * r / 2.0).exp(), Side::Physical)
}

/// Gaussian smoothly truncated to a ball: `exp(-a r^2 / 2) chi_{<=cut}(r)`.
///
/// The truncation makes the profile exactly compactly supported (radius
/// `1.1 cut`), which keeps long free evolutions honest about where their
/// mass can travel.
pub fn truncated_gaussian(grid: &Arc<RadialGrid>, a: f64, cut: f64) -> Result<RadialField> {
    if !(a > 0.0) || !(cut > 0.0) {
        return Err(CoreError::InvalidParam(format!(
            "truncated gaussian needs a > 0 and cut > 0, got a={a}, cut={cut}"
        )));
    }
    sample_radial(
        grid,
        |r| (-a * r * r / 2.0).exp() * low_pass_profile(r, cut),
        Side::Physical,
    )
}

/// Polynomial bump `amp (1 - r^2)_+^2`, supported exactly on the unit ball.
///
/// Its energy is known in closed form in four dimensions,
/// `||bump||_{L^2} = amp * pi / sqrt(30)`, which the tests pin.
pub fn ball_bump(grid: &Arc<RadialGrid>, amp: f64) -> Result<RadialField> {
    if !amp.is_finite() {
        return Err(CoreError::InvalidParam(format!(
            "bump amplitude must be finite, got {amp}"
        )));
    }
    sample_radial(
        grid,
        |r| {
            let q = (1.0 - r * r).max(0.0);
            amp * q * q
        },
        Side::Physical,
    )
}

/// High-frequency shell: a Gaussian ridge in frequency centered at
/// `center_factor * n`, high-passed at `n` (frequency side).
///
/// The ridge width grows like `base_width * sqrt(n / 8)` so that the shell
/// occupies a fixed number of grid cells' worth of oscillation across a
/// dyadic sweep; the high-pass guarantees the profile is genuinely
/// frequency-`>= n` data for projection-decay studies.
pub fn spectral_shell(
    grid: &Arc<RadialGrid>,
    n: f64,
    center_factor: f64,
    base_width: f64,
) -> Result<RadialField> {
    if !(n > 0.0) || !(center_factor >= 1.0) || !(base_width > 0.0) {
        return Err(CoreError::InvalidParam(format!(
            "spectral shell needs n > 0, center_factor >= 1, base_width > 0, \
             got n={n}, center_factor={center_factor}, base_width={base_width}"
        )));
    }
    if center_factor * n >= grid.freq_max {
        return Err(CoreError::InvalidParam(format!(
            "spectral shell center {} exceeds the grid frequency range {}",
            center_factor * n,
            grid.freq_max
        )));
    }
    let sigma = base_width * (n / 8.0).sqrt();
    sample_radial(
        grid,
        |rho| {
            let ridge = (-(rho - center_factor * n).powi(2) / (2.0 * sigma * sigma)).exp();
            ridge * (1.0 - low_pass_profile(rho, n))
        },
        Side::Frequency,
    )
}

/// Polynomially weighted annulus `(1 + rho)^{-decay}` restricted to the
/// dyadic band (m, 2.2 m) (frequency side).
pub fn weighted_annulus(grid: &Arc<RadialGrid>, m: f64, decay: f64) -> Result<RadialField> {
    if !(m > 0.0) || !decay.is_finite() {
        return Err(CoreError::InvalidParam(format!(
            "weighted annulus needs m > 0 and finite decay, got m={m}, decay={decay}"
        )));
    }
    let band = band_multiplier(grid, &BandSpec::band(m));
    sample_radial(grid, |rho| (1.0 + rho).powf(-decay), Side::Frequency)
        .map(|f| f.mul_real(&band))
}

/// Unit-energy dyadic annulus bump: the band multiplier on (m, 2.2 m)
/// normalized to unit norm (frequency side).
pub fn annulus_shell(grid: &Arc<RadialGrid>, m: f64) -> Result<RadialField> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(CoreError::InvalidParam(format!(
            "annulus shell scale must be positive and finite, got {m}"
        )));
    }
    let band = band_multiplier(grid, &BandSpec::band(m));
    let shell = RadialField::new(
        grid.clone(),
        Side::Frequency,
        band.iter().map(|&x| C64::new(x, 0.0)).collect(),
    )?;
    let norm = shell.norm_l2();
    if norm <= 0.0 {
        return Err(CoreError::InvalidParam(format!(
            "annulus at scale {m} is not resolved by the grid (empty band)"
        )));
    }
    Ok(shell.scaled(C64::new(1.0 / norm, 0.0)))
}

/// Random-sign dyadic superposition `Sum_M eps_M M^{weight_exp} phi_M` on the
/// frequency side, with `phi_M` the unit-energy annulus bumps and the signs
/// drawn from [`SplitMix64`] seeded with `seed` (one draw per octave, in the
/// given order).
pub fn rough_frequency_data(
    grid: &Arc<RadialGrid>,
    octaves: &[f64],
    weight_exp: f64,
    seed: u64,
) -> Result<RadialField> {
    if octaves.is_empty() {
        return Err(CoreError::InvalidParam(
            "rough data needs at least one octave".into(),
        ));
    }
    if !weight_exp.is_finite() {
        return Err(CoreError::InvalidParam(format!(
            "octave weight exponent must be finite, got {weight_exp}"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let mut sum = RadialField::zeros(grid.clone(), Side::Frequency);
    for &m in octaves {
        let eps = rng.sign();
        let shell = annulus_shell(grid, m)?;
        sum = sum.add(&shell.scaled(C64::new(eps * m.powf(weight_exp), 0.0)))?;
    }
    Ok(sum)
}

/// Rough initial data on the physical side: the inverse transform of
/// [`rough_frequency_data`], truncated to the unit ball by `chi_{<=1}(r)`
/// and scaled by `amp`.
///
/// With `weight_exp = -s_c - d/2` the octaves carry equal weight in the
/// critical norm while the full sum has unbounded regularity content as
/// octaves are added — the generator of choice for supercritical-looking
/// large data.  Experiments expose the exponent so flat-energy (`0`) and
/// critical-flat (`-s_c`) populations come from the same code path.
pub fn rough_data(
    grid: &Arc<RadialGrid>,
    octaves: &[f64],
    weight_exp: f64,
    amp: f64,
    seed: u64,
) -> Result<RadialField> {
    if amp == 0.0 || !amp.is_finite() {
        return Err(CoreError::InvalidParam(format!(
            "rough data amplitude must be nonzero and finite, got {amp}"
        )));
    }
    let hat = rough_frequency_data(grid, octaves, weight_exp, seed)?;
    let field = to_space(&hat)?;
    let truncation: Vec<f64> = grid
        .nodes(Side::Physical)
        .iter()
        .map(|&r| low_pass_profile(r, 1.0))
        .collect();
    Ok(field
        .mul_real(&truncation)
        .scaled(C64::new(amp, 0.0)))
}

/// The octave-weight exponent that equalizes the critical-norm content of
/// the octaves: `-s_c - d/2`.
pub fn critical_weight_exp(dim: usize, s_c: f64) -> f64 {
    -s_c - dim as f64 / 2.0
}
