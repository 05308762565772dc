//! Bessel-zero collocation grids and the discrete Hankel transform.
//!
//! A radial function on R^d is reduced to one dimension through
//!
//! ```text
//! F(rho) = rho^{-nu} ∫_0^∞ f(r) J_nu(r rho) r^{nu+1} dr,    nu = d/2 - 1,
//! ```
//!
//! which is the d-dimensional Fourier transform (unitary, e^{-ix·xi} phase)
//! restricted to radial functions, divided by the constant (2pi)^{d/2}-free
//! normalization so that the map is self-reciprocal: applying it twice gives
//! the identity. Discretizing on the scaled zeros of J_nu (Fisk Johnson's
//! quadrature) makes the discrete version unitary for band-limited data.
//!
//! With j_1 < j_2 < ... the positive zeros of J_nu and S = j_{N+1}:
//!
//! ```text
//! r_k = j_k R / S,   rho_k = j_k / R,   K = S / R,
//! T_mk = (2/S) J_nu(j_m j_k / S) / (|J_{nu+1}(j_m)| |J_{nu+1}(j_k)|),
//! ```
//!
//! and both transform directions are diagonal rescalings of the same
//! symmetric kernel T. Quadrature weights absorb the surface measure
//! omega_{d-1} r^{d-1}, so sum(w |f|^2) approximates the full L^2(R^d) norm.

use std::sync::Arc;

use ndarray::Array2;

use crate::bessel::{bessel_j, bessel_zeros};
use crate::error::CoreError;
use crate::{Result, C64};

/// Smallest node count accepted; below this the quadrature is too coarse to
/// mean anything.
pub const MIN_NODE_COUNT: usize = 16;

/// Which side of the transform a field's samples live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Physical,
    Frequency,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Physical => "physical",
            Side::Frequency => "frequency",
        }
    }
}

/// Collocation grid for dimension `dim`, immutable after construction and
/// shared by reference among the fields living on it.
pub struct RadialGrid {
    pub dim: usize,
    /// Bessel order nu = d/2 - 1.
    pub order: f64,
    pub node_count: usize,
    /// Physical truncation radius R.
    pub radius_max: f64,
    /// Frequency truncation K = S/R ~ pi * node_count / R.
    pub freq_max: f64,
    /// Physical nodes, strictly increasing in (0, R).
    pub r_nodes: Vec<f64>,
    /// Frequency nodes, strictly increasing in (0, K).
    pub rho_nodes: Vec<f64>,
    /// Weights for sum(w |f(r_k)|^2) ~ ∫ |f|^2 omega_{d-1} r^{d-1} dr.
    pub quad_weights_space: Vec<f64>,
    /// Same on the frequency side.
    pub quad_weights_freq: Vec<f64>,
    /// The symmetric transform kernel T (dense; both directions use it).
    pub kernel: Array2<f64>,
    // Diagonal scalings applied before/after the kernel in each direction.
    fwd_in: Vec<f64>,
    fwd_out: Vec<f64>,
    inv_in: Vec<f64>,
    inv_out: Vec<f64>,
}

/// Surface area of the unit sphere in R^d: omega_{d-1} = 2 pi^{d/2} / Gamma(d/2).
pub fn sphere_area(dim: usize) -> f64 {
    let half = dim as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / libm::tgamma(half)
}

/// Build a collocation grid. `node_count >= 16`, `dim >= 2`, `radius_max > 0`.
pub fn build_grid(dim: usize, node_count: usize, radius_max: f64) -> Result<Arc<RadialGrid>> {
    if dim < 2 {
        return Err(CoreError::GridConfig(format!(
            "dimension must be at least 2, got {dim}"
        )));
    }
    if node_count < MIN_NODE_COUNT {
        return Err(CoreError::GridConfig(format!(
            "node_count must be at least {MIN_NODE_COUNT}, got {node_count}"
        )));
    }
    if !(radius_max > 0.0) || !radius_max.is_finite() {
        return Err(CoreError::GridConfig(format!(
            "radius_max must be positive and finite, got {radius_max}"
        )));
    }

    let order = dim as f64 / 2.0 - 1.0;
    let n = node_count;
    let zeros = bessel_zeros(order, n + 1);
    let s = zeros[n];
    let freq_max = s / radius_max;

    let r_nodes: Vec<f64> = zeros[..n].iter().map(|j| j * radius_max / s).collect();
    let rho_nodes: Vec<f64> = zeros[..n].iter().map(|j| j / radius_max).collect();

    // |J_{nu+1}| at the collocation zeros; never vanishes there.
    let jabs: Vec<f64> = zeros[..n]
        .iter()
        .map(|&j| bessel_j(order + 1.0, j).abs())
        .collect();

    let omega = sphere_area(dim);
    let quad_weights_space: Vec<f64> = (0..n)
        .map(|k| omega * r_nodes[k].powf(2.0 * order) * 2.0 / (freq_max.powi(2) * jabs[k].powi(2)))
        .collect();
    let quad_weights_freq: Vec<f64> = (0..n)
        .map(|k| omega * rho_nodes[k].powf(2.0 * order) * 2.0 / (radius_max.powi(2) * jabs[k].powi(2)))
        .collect();

    // Symmetric kernel; fill the upper triangle and mirror.
    let mut kernel = Array2::<f64>::zeros((n, n));
    for m in 0..n {
        for k in m..n {
            let val = (2.0 / s) * bessel_j(order, zeros[m] * zeros[k] / s) / (jabs[m] * jabs[k]);
            kernel[[m, k]] = val;
            kernel[[k, m]] = val;
        }
    }

    // Forward: F = fwd_out .* (T @ (fwd_in .* f)); the inverse mirrors it
    // with R and K exchanged (S/K^2 = R^2/S on the way out, S/R^2 = K^2/S back).
    let fwd_in: Vec<f64> = (0..n).map(|k| r_nodes[k].powf(order) / jabs[k]).collect();
    let fwd_out: Vec<f64> = (0..n)
        .map(|m| rho_nodes[m].powf(-order) * jabs[m] * s / freq_max.powi(2))
        .collect();
    let inv_in: Vec<f64> = (0..n).map(|k| rho_nodes[k].powf(order) / jabs[k]).collect();
    let inv_out: Vec<f64> = (0..n)
        .map(|m| r_nodes[m].powf(-order) * jabs[m] * s / radius_max.powi(2))
        .collect();

    Ok(Arc::new(RadialGrid {
        dim,
        order,
        node_count: n,
        radius_max,
        freq_max,
        r_nodes,
        rho_nodes,
        quad_weights_space,
        quad_weights_freq,
        kernel,
        fwd_in,
        fwd_out,
        inv_in,
        inv_out,
    }))
}

impl RadialGrid {
    /// Nodes on the given side.
    pub fn nodes(&self, side: Side) -> &[f64] {
        match side {
            Side::Physical => &self.r_nodes,
            Side::Frequency => &self.rho_nodes,
        }
    }

    /// Quadrature weights on the given side.
    pub fn weights(&self, side: Side) -> &[f64] {
        match side {
            Side::Physical => &self.quad_weights_space,
            Side::Frequency => &self.quad_weights_freq,
        }
    }

    // One kernel application on complex data, staged through a real (n, 2)
    // matrix so the dense product runs on the optimized f64 path.
    fn apply_kernel(&self, scaled: &[C64]) -> Vec<C64> {
        let n = self.node_count;
        let mut packed = Array2::<f64>::zeros((n, 2));
        for (i, z) in scaled.iter().enumerate() {
            packed[[i, 0]] = z.re;
            packed[[i, 1]] = z.im;
        }
        let out = self.kernel.dot(&packed);
        (0..n).map(|i| C64::new(out[[i, 0]], out[[i, 1]])).collect()
    }

    fn transform(&self, values: &[C64], scale_in: &[f64], scale_out: &[f64]) -> Vec<C64> {
        let scaled: Vec<C64> = values
            .iter()
            .zip(scale_in)
            .map(|(v, s)| v * s)
            .collect();
        let mut out = self.apply_kernel(&scaled);
        for (o, s) in out.iter_mut().zip(scale_out) {
            *o *= *s;
        }
        out
    }
}

/// Complex samples of a radial function on one side of a grid.
#[derive(Clone)]
pub struct RadialField {
    pub grid: Arc<RadialGrid>,
    pub side: Side,
    pub values: Vec<C64>,
}

impl RadialField {
    /// Wrap a sample vector, checking length and finiteness.
    pub fn new(grid: Arc<RadialGrid>, side: Side, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.node_count {
            return Err(CoreError::GridConfig(format!(
                "value vector has length {}, grid has {} nodes",
                values.len(),
                grid.node_count
            )));
        }
        let field = RadialField { grid, side, values };
        field.ensure_finite()?;
        Ok(field)
    }

    /// The zero field on the given side.
    pub fn zeros(grid: Arc<RadialGrid>, side: Side) -> Self {
        let n = grid.node_count;
        RadialField {
            grid,
            side,
            values: vec![C64::new(0.0, 0.0); n],
        }
    }

    pub fn ensure_side(&self, expected: Side) -> Result<()> {
        if self.side != expected {
            return Err(CoreError::WrongSide {
                expected: expected.name(),
                found: self.side.name(),
            });
        }
        Ok(())
    }

    pub fn ensure_finite(&self) -> Result<()> {
        for (index, v) in self.values.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(CoreError::NonFinite { index });
            }
        }
        Ok(())
    }

    pub fn ensure_same_grid(&self, other: &RadialField) -> Result<()> {
        if !Arc::ptr_eq(&self.grid, &other.grid) || self.side != other.side {
            return Err(CoreError::GridMismatch);
        }
        Ok(())
    }

    /// Quadrature weights matching this field's side.
    pub fn weights(&self) -> &[f64] {
        self.grid.weights(self.side)
    }

    /// Nodes matching this field's side.
    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes(self.side)
    }

    /// L^2(R^d) norm by the grid quadrature.
    pub fn norm_l2(&self) -> f64 {
        self.values
            .iter()
            .zip(self.weights())
            .map(|(v, w)| w * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn add(&self, other: &RadialField) -> Result<RadialField> {
        self.ensure_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(RadialField {
            grid: self.grid.clone(),
            side: self.side,
            values,
        })
    }

    pub fn sub(&self, other: &RadialField) -> Result<RadialField> {
        self.ensure_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(RadialField {
            grid: self.grid.clone(),
            side: self.side,
            values,
        })
    }

    pub fn scaled(&self, c: C64) -> RadialField {
        RadialField {
            grid: self.grid.clone(),
            side: self.side,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Multiply pointwise by a real profile given on this side's nodes.
    pub fn mul_real(&self, profile: &[f64]) -> RadialField {
        assert_eq!(profile.len(), self.values.len(), "profile length mismatch");
        RadialField {
            grid: self.grid.clone(),
            side: self.side,
            values: self
                .values
                .iter()
                .zip(profile)
                .map(|(v, p)| v * p)
                .collect(),
        }
    }

    /// L^2 distance to another field on the same grid and side.
    pub fn distance_l2(&self, other: &RadialField) -> Result<f64> {
        Ok(self.sub(other)?.norm_l2())
    }

    /// Fraction of the squared L^2 mass at radii beyond `fraction * R` (or
    /// beyond `fraction * K` on the frequency side); the boundary guard reads
    /// this.
    pub fn tail_mass_fraction(&self, fraction: f64) -> f64 {
        let cut = fraction
            * match self.side {
                Side::Physical => self.grid.radius_max,
                Side::Frequency => self.grid.freq_max,
            };
        let mut tail = 0.0;
        let mut total = 0.0;
        for ((v, w), x) in self.values.iter().zip(self.weights()).zip(self.nodes()) {
            let m = w * v.norm_sqr();
            total += m;
            if *x > cut {
                tail += m;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }
}

/// Forward transform, physical samples to frequency samples.
pub fn to_frequency(f: &RadialField) -> Result<RadialField> {
    f.ensure_side(Side::Physical)?;
    f.ensure_finite()?;
    let values = f.grid.transform(&f.values, &f.grid.fwd_in, &f.grid.fwd_out);
    Ok(RadialField {
        grid: f.grid.clone(),
        side: Side::Frequency,
        values,
    })
}

/// Inverse transform, frequency samples back to physical samples.
pub fn to_space(f: &RadialField) -> Result<RadialField> {
    f.ensure_side(Side::Frequency)?;
    f.ensure_finite()?;
    let values = f.grid.transform(&f.values, &f.grid.inv_in, &f.grid.inv_out);
    Ok(RadialField {
        grid: f.grid.clone(),
        side: Side::Physical,
        values,
    })
}

/// Evaluate a scalar profile at the side's nodes. The profile may return real
/// or complex values; a non-finite value at any node is rejected.
pub fn sample_radial<T, F>(grid: &Arc<RadialGrid>, profile: F, side: Side) -> Result<RadialField>
where
    T: Into<C64>,
    F: Fn(f64) -> T,
{
    let values: Vec<C64> = grid.nodes(side).iter().map(|&x| profile(x).into()).collect();
    RadialField::new(grid.clone(), side, values)
}
