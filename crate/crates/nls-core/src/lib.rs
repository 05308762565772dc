//! Radial pseudo-spectral toolbox for dispersive equations.
//!
//! Everything here operates on radial functions of `d`-dimensional space,
//! sampled on Bessel-zero collocation grids. The discrete Hankel transform
//! realizes the d-dimensional Fourier transform restricted to radial
//! functions; on top of it sit smooth cutoffs and dyadic frequency
//! projectors, the free Schrödinger flow, Sobolev/Lebesgue/mixed space-time
//! norms, a split-step integrator for the mass-subcritical nonlinear
//! Schrödinger equation, and a set of experiment suites that fit measured
//! decay exponents against their theoretical values.
//!
//! Transform convention: the forward transform of a radial profile `f(r)` is
//!
//! ```text
//! F(rho) = rho^{-nu} ∫_0^∞ f(r) J_nu(r rho) r^{nu+1} dr,   nu = d/2 - 1,
//! ```
//!
//! which is the d-dimensional unitary Fourier transform with `e^{-ix·xi}`
//! phase, written on the radial profile. It is self-reciprocal, so the
//! inverse has the same shape with `r` and `rho` exchanged. All multiplier
//! sign conventions downstream (free propagator `e^{-it rho^2}`, fractional
//! derivatives, spectral weights) derive from this choice.

pub mod bessel;
pub mod cutoff;
pub mod data;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod norms;
pub mod propagator;
pub mod solver;

pub use error::CoreError;
pub use grid::{build_grid, sample_radial, RadialField, RadialGrid, Side};

/// Shorthand used throughout: all fallible operations return this.
pub type Result<T> = std::result::Result<T, CoreError>;

/// Complex sample type used by every field.
pub type C64 = num_complex::Complex64;
