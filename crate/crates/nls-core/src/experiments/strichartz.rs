//! Weighted space-time boundedness of free and cutoff-nonlinear flows.
//!
//! Two claims share the weight family `<t^alpha |∇|>^beta` and one report:
//!
//! * **linear**: for high-pass rough data `g`, the weighted mixed norm of
//!   `|∇|^{s_c+gamma} e^{itΔ} chi_{<=loc} P_{>=N} g` stays controlled by
//!   `‖P_{>=N} g‖_{Ḣ^{s_c}}` as N doubles — the ratio sweep must not trend
//!   upward and must stay within 2x its first value;
//! * **nonlinear**: for the cutoff-nonlinearity solution v launched from
//!   normalized high-frequency data, the dyadic-band norms
//!   `‖ <t^alpha|∇|>^beta |∇|^{s_c} P_M v ‖_{L^2_t L^{2d/(d-2)}_x}`
//!   must be uniform in M (max/min ratio and trend bars).
//!
//! "Bounded uniformly" over an infinite range is not testable literally;
//! both parts operationalize it as a max/min threshold plus a non-positive
//! trend slope over the swept dyadic range, computed per scanned
//! `(alpha, beta)` pair.

use super::fit::fit_semilog_trend;
use super::{describe_setup, ensure_guard, fmt_f64, ExperimentReport};
use crate::cutoff::{apply_cutoff, project, BandSpec, CutoffSpec};
use crate::data::rough_frequency_data;
use crate::error::CoreError;
use crate::grid::{to_frequency, to_space, RadialGrid};
use crate::norms::{
    apply_fractional, apply_weight, mixed_norm, sobolev_norm, validate_triple, StrichartzTriple,
    Trajectory, TripleVerdict, WeightSpec,
};
use crate::propagator::evolve_free;
use crate::solver::{simulate_with_guard, EquationParams};
use crate::{Result, C64};
use std::sync::Arc;

/// Free-flow half of the suite: an N-doubling sweep of weighted
/// Strichartz-to-Sobolev ratios.
#[derive(Clone)]
pub struct StrichartzLinearPart {
    /// Dyadic octaves of the rough data generator.
    pub octaves: Vec<f64>,
    /// Octave weight exponent of the generator.
    pub weight_exp: f64,
    pub seed: u64,
    /// High-pass thresholds N of the sweep.
    pub freq_values: Vec<f64>,
    /// Spatial truncation radius applied after the high-pass.
    pub loc_radius: f64,
    pub horizon: f64,
    /// Number of uniform time samples on [0, horizon].
    pub time_samples: usize,
}

/// Cutoff-nonlinearity half: dyadic-band weighted norms of the v-flow.
#[derive(Clone)]
pub struct StrichartzNonlinearPart {
    pub octaves: Vec<f64>,
    pub weight_exp: f64,
    pub seed: u64,
    /// Dyadic bands M of the per-band norm sweep.
    pub band_values: Vec<f64>,
    /// Spatial truncation radius of the initial data.
    pub loc_radius: f64,
    /// High-pass threshold defining the rough initial data.
    pub high_pass: f64,
    /// Time-cutoff threshold of the nonlinearity; the flow is free beyond
    /// 1.1x this value.
    pub cutoff: f64,
    pub dt: f64,
    pub horizon: f64,
    /// Number of quadratically graded time samples on [0, horizon]
    /// (dense near 0 where the weight varies fastest).
    pub time_samples: usize,
}

#[derive(Clone)]
pub struct StrichartzConfig {
    pub params: EquationParams,
    pub grid: Arc<RadialGrid>,
    pub triple: StrichartzTriple,
    /// Scanned (alpha, beta) weight exponent pairs.
    pub weight_scan: Vec<(f64, f64)>,
    pub linear: Option<StrichartzLinearPart>,
    pub nonlinear: Option<StrichartzNonlinearPart>,
    pub guard_tol: f64,
}

/// Uniform-in-sweep bars shared by both parts: max/min ratio <= 10 and
/// semi-log trend slope <= 0.1.
const MAXMIN_BAR: f64 = 10.0;
const TREND_BAR: f64 = 0.1;

fn scan_tag(alpha: f64, beta: f64) -> String {
    format!("a{alpha}_b{beta}")
}

pub fn run_weighted_strichartz(cfg: &StrichartzConfig) -> Result<ExperimentReport> {
    if let TripleVerdict::Violated { condition } = validate_triple(&cfg.triple, cfg.params.dim) {
        return Err(CoreError::InvalidParam(format!(
            "inadmissible triple (q={}, r={}, gamma={}): violates {condition}",
            cfg.triple.q, cfg.triple.r, cfg.triple.gamma
        )));
    }
    if cfg.weight_scan.is_empty() {
        return Err(CoreError::InvalidParam("empty weight scan".into()));
    }
    for &(alpha, beta) in &cfg.weight_scan {
        if !(alpha >= 1.0) || !(beta >= 0.0) {
            return Err(CoreError::InvalidParam(format!(
                "weight exponents need alpha >= 1 and beta >= 0, got ({alpha}, {beta})"
            )));
        }
        if alpha * beta > 0.5 {
            return Err(CoreError::InvalidParam(format!(
                "weight product alpha*beta = {} exceeds the smallness budget 1/2",
                alpha * beta
            )));
        }
    }
    if cfg.linear.is_none() && cfg.nonlinear.is_none() {
        return Err(CoreError::InvalidParam(
            "nothing to run: neither part configured".into(),
        ));
    }

    let mut report = ExperimentReport::new("run_weighted_strichartz");
    describe_setup(&mut report, &cfg.params, &cfg.grid);
    report.params.insert(
        "triple".into(),
        format!(
            "q={}, r={}, gamma={}",
            cfg.triple.q, cfg.triple.r, cfg.triple.gamma
        ),
    );
    report
        .params
        .insert("weight_scan".into(), format!("{:?}", cfg.weight_scan));

    // Per-(alpha, beta) pass flags of each configured part.
    let mut linear_pass = vec![true; cfg.weight_scan.len()];
    let mut nonlinear_pass = vec![true; cfg.weight_scan.len()];

    if let Some(lin) = &cfg.linear {
        run_linear_part(cfg, lin, &mut report, &mut linear_pass)?;
    }
    if let Some(nl) = &cfg.nonlinear {
        run_nonlinear_part(cfg, nl, &mut report, &mut nonlinear_pass)?;
    }

    let mut any_pass = false;
    for (i, &(alpha, beta)) in cfg.weight_scan.iter().enumerate() {
        let pass = linear_pass[i] && nonlinear_pass[i];
        report.scalars.insert(
            format!("pass_{}", scan_tag(alpha, beta)),
            if pass { 1.0 } else { 0.0 },
        );
        any_pass |= pass;
    }
    report
        .scalars
        .insert("any_pass".into(), if any_pass { 1.0 } else { 0.0 });
    Ok(report)
}

fn run_linear_part(
    cfg: &StrichartzConfig,
    lin: &StrichartzLinearPart,
    report: &mut ExperimentReport,
    pass: &mut [bool],
) -> Result<()> {
    if lin.freq_values.len() < 2 {
        return Err(CoreError::InvalidParam(
            "linear sweep needs at least two high-pass thresholds".into(),
        ));
    }
    if lin.time_samples < 2 || !(lin.horizon > 0.0) {
        return Err(CoreError::InvalidParam(
            "linear part needs a positive horizon with at least two samples".into(),
        ));
    }
    report
        .params
        .insert("linear_seed".into(), format!("{}", lin.seed));
    report
        .params
        .insert("linear_octaves".into(), format!("{:?}", lin.octaves));
    let g = rough_frequency_data(&cfg.grid, &lin.octaves, lin.weight_exp, lin.seed)?;
    let times: Vec<f64> = (0..lin.time_samples)
        .map(|k| lin.horizon * k as f64 / (lin.time_samples - 1) as f64)
        .collect();

    // Per N: high-pass, spatially truncate, and keep the critical Sobolev
    // size of the untruncated high part as the denominator.
    let mut prepped = Vec::new();
    for &n in &lin.freq_values {
        let hi = project(&g, &BandSpec::high(n))?;
        let denom = sobolev_norm(&hi, cfg.params.s_c)?;
        if denom == 0.0 {
            return Err(CoreError::InvalidParam(format!(
                "high-pass at N = {n} left no data; raise the octave range"
            )));
        }
        let loc = apply_cutoff(&to_space(&hi)?, &CutoffSpec::below(lin.loc_radius))?;
        prepped.push((n, to_frequency(&loc)?, denom));
        report
            .scalars
            .insert(format!("linear_denom_n{n}"), denom);
    }

    // Boundary guard on the unweighted flow at the final time.
    let mut worst = 0.0f64;
    for (_, floc, _) in &prepped {
        let end = to_space(&evolve_free(floc, lin.horizon)?)?;
        worst = worst.max(ensure_guard(&end, lin.horizon, cfg.guard_tol)?);
    }
    report.scalars.insert("linear_guard".into(), worst);

    for (i, &(alpha, beta)) in cfg.weight_scan.iter().enumerate() {
        let w = WeightSpec::new(alpha, beta);
        let tag = scan_tag(alpha, beta);
        let mut sweep = Vec::new();
        for (n, floc, denom) in &prepped {
            let mut snaps = Vec::with_capacity(times.len());
            for &t in &times {
                let evolved = evolve_free(floc, t)?;
                let weighted = apply_weight(&evolved, t, &w)?;
                let smoothed =
                    apply_fractional(&weighted, cfg.params.s_c + cfg.triple.gamma)?;
                snaps.push(to_space(&smoothed)?);
            }
            let traj = Trajectory::new(cfg.params.clone(), times.clone(), snaps)?;
            let ratio = mixed_norm(&traj, cfg.triple.q, cfg.triple.r)? / denom;
            report
                .scalars
                .insert(format!("linear_ratio_{tag}_n{n}"), ratio);
            sweep.push((*n, ratio));
        }
        let trend = fit_semilog_trend(&sweep)?;
        let first = sweep[0].1;
        let max = sweep.iter().map(|s| s.1).fold(f64::MIN, f64::max);
        let min = sweep.iter().map(|s| s.1).fold(f64::MAX, f64::min);
        report
            .scalars
            .insert(format!("linear_trend_{tag}"), trend);
        report
            .scalars
            .insert(format!("linear_maxmin_{tag}"), max / min);
        report
            .scalars
            .insert(format!("linear_max_over_first_{tag}"), max / first);
        pass[i] = max <= 2.0 * first && max / min <= MAXMIN_BAR && trend <= TREND_BAR;
    }
    Ok(())
}

fn run_nonlinear_part(
    cfg: &StrichartzConfig,
    nl: &StrichartzNonlinearPart,
    report: &mut ExperimentReport,
    pass: &mut [bool],
) -> Result<()> {
    if nl.band_values.len() < 2 {
        return Err(CoreError::InvalidParam(
            "nonlinear sweep needs at least two dyadic bands".into(),
        ));
    }
    if nl.time_samples < 2 || !(nl.horizon > 0.0) {
        return Err(CoreError::InvalidParam(
            "nonlinear part needs a positive horizon with at least two samples".into(),
        ));
    }
    report
        .params
        .insert("nonlinear_seed".into(), format!("{}", nl.seed));
    report
        .params
        .insert("nonlinear_octaves".into(), format!("{:?}", nl.octaves));
    report
        .params
        .insert("nonlinear_dt".into(), fmt_f64(nl.dt));

    // Normalized high-frequency compactly supported initial data.
    let g = rough_frequency_data(&cfg.grid, &nl.octaves, nl.weight_exp, nl.seed)?;
    let hi = project(&g, &BandSpec::high(nl.high_pass))?;
    let raw = apply_cutoff(&to_space(&hi)?, &CutoffSpec::below(nl.loc_radius))?;
    let size = raw.norm_l2();
    if size == 0.0 {
        return Err(CoreError::InvalidParam(
            "high-pass data vanished after truncation".into(),
        ));
    }
    let v0 = raw.scaled(C64::new(1.0 / size, 0.0));

    // Quadratically graded sample times: dense where the weight turns on.
    let times: Vec<f64> = (0..nl.time_samples)
        .map(|k| {
            let s = k as f64 / (nl.time_samples - 1) as f64;
            nl.horizon * s * s
        })
        .collect();

    // Integrate the cutoff nonlinearity to the time it switches off, then
    // advance by exact free phases.
    let vparams = cfg.params.clone().with_time_cutoff(nl.cutoff)?;
    let free_start = 1.1 * nl.cutoff;
    if *times.last().unwrap() < free_start {
        return Err(CoreError::InvalidParam(format!(
            "horizon {} ends before the nonlinearity switches off at {free_start}",
            nl.horizon
        )));
    }
    let mut schedule: Vec<f64> = times.iter().cloned().filter(|&t| t < free_start).collect();
    schedule.push(free_start);
    let traj = simulate_with_guard(&v0, &vparams, free_start, &schedule, nl.dt, cfg.guard_tol)?;
    let hat_free = to_frequency(traj.snapshots.last().unwrap())?;

    let mut hats = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        if t < free_start {
            hats.push(to_frequency(&traj.snapshots[k])?);
        } else {
            hats.push(evolve_free(&hat_free, t - free_start)?);
        }
    }
    let end = to_space(hats.last().unwrap())?;
    let guard = ensure_guard(&end, *times.last().unwrap(), cfg.guard_tol)?;
    report.scalars.insert("nonlinear_guard".into(), guard);

    let d = cfg.params.dim as f64;
    let spatial_r = 2.0 * d / (d - 2.0);
    for (i, &(alpha, beta)) in cfg.weight_scan.iter().enumerate() {
        let w = WeightSpec::new(alpha, beta);
        let tag = scan_tag(alpha, beta);
        let mut sweep = Vec::new();
        for &m in &nl.band_values {
            let spec = BandSpec::band(m);
            let mut snaps = Vec::with_capacity(times.len());
            for (hat, &t) in hats.iter().zip(&times) {
                let banded = project(hat, &spec)?;
                let weighted = apply_weight(&banded, t, &w)?;
                let smoothed = apply_fractional(&weighted, cfg.params.s_c)?;
                snaps.push(to_space(&smoothed)?);
            }
            let traj = Trajectory::new(cfg.params.clone(), times.clone(), snaps)?;
            let x = mixed_norm(&traj, 2.0, spatial_r)?;
            report.scalars.insert(format!("nonlinear_x_{tag}_m{m}"), x);
            sweep.push((m, x));
        }
        let trend = fit_semilog_trend(&sweep)?;
        let max = sweep.iter().map(|s| s.1).fold(f64::MIN, f64::max);
        let min = sweep.iter().map(|s| s.1).fold(f64::MAX, f64::min);
        report
            .scalars
            .insert(format!("nonlinear_trend_{tag}"), trend);
        report
            .scalars
            .insert(format!("nonlinear_maxmin_{tag}"), max / min);
        pass[i] = max / min <= MAXMIN_BAR && trend <= TREND_BAR;
    }
    Ok(())
}
