//! Spatial, Sobolev, weighted, and mixed space-time norms, plus the
//! admissibility check for smoothing Strichartz triples.
//!
//! All spatial integrals use the grid quadrature with the surface measure
//! already folded into the weights; L^∞ is the node-wise maximum and is
//! documented as a lower bound of the true sup. Fractional derivatives are
//! the frequency multiplier |xi|^s under the crate's transform convention,
//! and the dispersive weight <t^a |∇|>^b is the multiplier
//! (1 + t^{2a} rho^2)^{b/2}.

use crate::error::CoreError;
use crate::grid::{to_frequency, RadialField, Side};
use crate::solver::EquationParams;
use crate::Result;

/// L^r(R^d) norm of a physical-side field, r in [1, ∞].
pub fn lebesgue_norm(f: &RadialField, r: f64) -> Result<f64> {
    f.ensure_side(Side::Physical)?;
    radial_weight_norm(f, 0.0, r)
}

/// Weighted norm ‖ |x|^alpha f ‖_{L^q} on the field's own side; alpha = 0
/// recovers the plain Lebesgue norm. q = ∞ takes the node-wise maximum.
pub fn radial_weight_norm(f: &RadialField, alpha: f64, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(CoreError::InvalidParam(format!(
            "Lebesgue exponent must be >= 1, got {q}"
        )));
    }
    f.ensure_finite()?;
    let nodes = f.nodes();
    if q.is_infinite() {
        let mut best = 0.0f64;
        for (v, &x) in f.values.iter().zip(nodes) {
            best = best.max(x.powf(alpha) * v.norm());
        }
        return Ok(best);
    }
    // The weights are plain measure weights (cell measure including the
    // surface factor), so the same vector integrates |f|^q for every q.
    let mut acc = 0.0;
    for ((v, w), &x) in f.values.iter().zip(f.weights()).zip(nodes) {
        acc += w * (x.powf(alpha) * v.norm()).powf(q);
    }
    Ok(acc.powf(1.0 / q))
}

/// Fractional derivative |∇|^s: frequency multiplier rho^s. Returns on the
/// side the input was on. Requires s > -d/2 so the multiplier stays
/// quadrature-integrable near rho = 0.
pub fn apply_fractional(f: &RadialField, s: f64) -> Result<RadialField> {
    let d = f.grid.dim as f64;
    if !(s > -d / 2.0) {
        return Err(CoreError::InvalidParam(format!(
            "fractional order s = {s} must exceed -d/2 = {}",
            -d / 2.0
        )));
    }
    if s == 0.0 {
        return Ok(f.clone());
    }
    let mult: Vec<f64> = f.grid.rho_nodes.iter().map(|rho| rho.powf(s)).collect();
    match f.side {
        Side::Frequency => Ok(f.mul_real(&mult)),
        Side::Physical => {
            let fhat = to_frequency(f)?;
            crate::grid::to_space(&fhat.mul_real(&mult))
        }
    }
}

/// Homogeneous Sobolev norm ‖f‖_{Ḣ^s} = ‖ rho^s f̂ ‖_{L^2}, evaluated on the
/// frequency side regardless of the input side.
pub fn sobolev_norm(f: &RadialField, s: f64) -> Result<f64> {
    let d = f.grid.dim as f64;
    if !(s > -d / 2.0) {
        return Err(CoreError::InvalidParam(format!(
            "Sobolev order s = {s} must exceed -d/2 = {}",
            -d / 2.0
        )));
    }
    let owned;
    let fhat = match f.side {
        Side::Frequency => f,
        Side::Physical => {
            owned = to_frequency(f)?;
            &owned
        }
    };
    let mut acc = 0.0;
    for ((v, w), rho) in fhat
        .values
        .iter()
        .zip(&f.grid.quad_weights_freq)
        .zip(&f.grid.rho_nodes)
    {
        acc += w * rho.powf(2.0 * s) * v.norm_sqr();
    }
    Ok(acc.sqrt())
}

/// The dispersive weight <t^alpha |∇|>^beta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub alpha: f64,
    pub beta: f64,
}

impl WeightSpec {
    /// alpha >= 1; beta >= 0 (beta = 0 degenerates to the identity weight).
    pub fn new(alpha: f64, beta: f64) -> Self {
        assert!(alpha >= 1.0, "weight exponent alpha must be >= 1");
        assert!(beta >= 0.0, "weight exponent beta must be >= 0");
        WeightSpec { alpha, beta }
    }

    /// The product alpha * beta; the smoothing experiments constrain it
    /// below 1/2.
    pub fn product(&self) -> f64 {
        self.alpha * self.beta
    }

    /// Multiplier value at one frequency.
    pub fn multiplier(&self, t: f64, rho: f64) -> f64 {
        (1.0 + t.abs().powf(2.0 * self.alpha) * rho * rho).powf(self.beta / 2.0)
    }
}

/// Frequency multiplication by (1 + t^{2 alpha} rho^2)^{beta/2}; same side
/// out as in.
pub fn apply_weight(f: &RadialField, t: f64, w: &WeightSpec) -> Result<RadialField> {
    // Both t = 0 and beta = 0 make the multiplier identically 1.
    if w.beta == 0.0 || t == 0.0 {
        return Ok(f.clone());
    }
    let mult: Vec<f64> = f
        .grid
        .rho_nodes
        .iter()
        .map(|&rho| w.multiplier(t, rho))
        .collect();
    match f.side {
        Side::Frequency => Ok(f.mul_real(&mult)),
        Side::Physical => {
            let fhat = to_frequency(f)?;
            crate::grid::to_space(&fhat.mul_real(&mult))
        }
    }
}

/// Time-ordered snapshots of a radial field, the substrate for mixed norms.
#[derive(Clone)]
pub struct Trajectory {
    pub params: EquationParams,
    pub times: Vec<f64>,
    pub snapshots: Vec<RadialField>,
}

impl Trajectory {
    pub fn new(
        params: EquationParams,
        times: Vec<f64>,
        snapshots: Vec<RadialField>,
    ) -> Result<Self> {
        if times.len() != snapshots.len() {
            return Err(CoreError::InvalidParam(format!(
                "{} times vs {} snapshots",
                times.len(),
                snapshots.len()
            )));
        }
        if times.is_empty() {
            return Err(CoreError::InvalidParam("empty trajectory".into()));
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(CoreError::InvalidParam(format!(
                    "times not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        for s in &snapshots[1..] {
            snapshots[0].ensure_same_grid(s)?;
        }
        Ok(Trajectory {
            params,
            times,
            snapshots,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Mixed space-time norm L^q_t L^r_x over the trajectory's time window:
/// trapezoid quadrature of ‖f(t)‖_{L^r}^q on the (possibly nonuniform) time
/// grid, or the max over snapshots for q = ∞.
pub fn mixed_norm(traj: &Trajectory, q: f64, r: f64) -> Result<f64> {
    if traj.snapshots.is_empty() {
        return Err(CoreError::InvalidParam("empty trajectory".into()));
    }
    if !(q >= 1.0) {
        return Err(CoreError::InvalidParam(format!(
            "time exponent must be >= 1, got {q}"
        )));
    }
    let spatial: Vec<f64> = traj
        .snapshots
        .iter()
        .map(|f| lebesgue_norm(f, r))
        .collect::<Result<_>>()?;
    if q.is_infinite() {
        return Ok(spatial.iter().cloned().fold(0.0, f64::max));
    }
    if traj.len() < 2 {
        return Err(CoreError::InvalidParam(
            "time quadrature needs at least two snapshots".into(),
        ));
    }
    let mut acc = 0.0;
    for i in 1..traj.len() {
        let dt = traj.times[i] - traj.times[i - 1];
        acc += 0.5 * dt * (spatial[i].powf(q) + spatial[i - 1].powf(q));
    }
    Ok(acc.powf(1.0 / q))
}

/// A smoothing Strichartz triple (q, r, gamma).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrichartzTriple {
    pub q: f64,
    pub r: f64,
    pub gamma: f64,
}

impl StrichartzTriple {
    pub fn new(q: f64, r: f64, gamma: f64) -> Self {
        StrichartzTriple { q, r, gamma }
    }
}

/// Outcome of the admissibility check; `Violated` names the first broken
/// condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleVerdict {
    Admissible,
    Violated { condition: &'static str },
}

/// Check the radial admissibility conditions for dimension `d`:
/// q >= 2, r > 2, 2/q + (2d-1)/r < (2d-1)/2, and 2/q + d/r = d/2 + gamma.
pub fn validate_triple(tr: &StrichartzTriple, d: usize) -> TripleVerdict {
    let df = d as f64;
    let inv_q = if tr.q.is_infinite() { 0.0 } else { 1.0 / tr.q };
    if !(tr.q >= 2.0) {
        return TripleVerdict::Violated { condition: "q >= 2" };
    }
    if !(tr.r > 2.0) {
        return TripleVerdict::Violated { condition: "r > 2" };
    }
    let lhs = 2.0 * inv_q + (2.0 * df - 1.0) / tr.r;
    if !(lhs < (2.0 * df - 1.0) / 2.0) {
        return TripleVerdict::Violated {
            condition: "2/q + (2d-1)/r < (2d-1)/2",
        };
    }
    let scaling = 2.0 * inv_q + df / tr.r - (df / 2.0 + tr.gamma);
    if scaling.abs() > 1e-9 {
        return TripleVerdict::Violated {
            condition: "2/q + d/r = d/2 + gamma",
        };
    }
    TripleVerdict::Admissible
}
