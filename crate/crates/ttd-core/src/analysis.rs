//! Closed-form frequency-spatial analysis of Staircase TTD beams.
//!
//! The uniform staircase with integer `D` is the superposition of `D`
//! interleaved uniform TTD sub-arrays. That factorizes the full gain into a
//! parent grating-lobe pattern (the sub-array Dirichlet kernel in
//! `psi_jump`) multiplied by a `D`-element spatial filter (the Dirichlet
//! kernel in the step phase `psi_o`). This module carries both kernels, the
//! closed-form beam-centre ladder and filter-centre trajectory, numerical
//! beam-map extraction, on-target gain slices, and the target-vs-achieved
//! discrepancy metric.

use rayon::prelude::*;

use crate::codebook::{fmod_floored, DesignResult, StaircaseParams};
use crate::error::{Error, Result};
use crate::wavefield::{gain, ArrayConfig, DelayPhaseProfile, GainGrid, OfdmGrid};

const PI: f64 = std::f64::consts::PI;
/// Below this magnitude of the Dirichlet denominator the kernel is replaced
/// by its analytic limit.
const SINGULARITY_EPS: f64 = 1e-12;

/// One of the `D` uniform TTD sub-arrays making up a staircase codebook:
/// `n_sub` elements at `D * lambda_c/2` pitch, separated by the jump
/// increments, superposed through the step increments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubArrayView {
    pub d: f64,
    pub dtau_jump: f64,
    pub dphi_jump: f64,
    pub dtau_step: f64,
    pub dphi_step: f64,
    pub n_sub: usize,
}

impl SubArrayView {
    pub fn new(
        d: f64,
        dtau_jump: f64,
        dphi_jump: f64,
        dtau_step: f64,
        dphi_step: f64,
        n_sub: usize,
    ) -> Result<Self> {
        if !d.is_finite() || d < 1.0 {
            return Err(Error::InvalidArgument(format!("D must be >= 1, got {d}")));
        }
        if n_sub < 1 {
            return Err(Error::InvalidArgument("n_sub must be positive".into()));
        }
        Ok(Self {
            d,
            dtau_jump,
            dphi_jump,
            dtau_step,
            dphi_step,
            n_sub,
        })
    }

    /// View of a staircase parameter set over an `n_t`-element array.
    /// Requires integer `D` dividing `n_t` (so that `n_sub * D = N_T`).
    pub fn from_params(params: &StaircaseParams, n_t: usize) -> Result<Self> {
        if params.d.fract() != 0.0 {
            return Err(Error::Precondition(format!(
                "sub-array decomposition requires integer D, got {}",
                params.d
            )));
        }
        let d = params.d as usize;
        if !n_t.is_multiple_of(d) {
            return Err(Error::Precondition(format!(
                "N_T = {n_t} is not divisible by D = {d}"
            )));
        }
        Self::new(
            params.d,
            params.dtau_jump,
            params.dphi_jump,
            params.dtau_step,
            params.dphi_step,
            n_t / d,
        )
    }

    pub fn n_t(&self) -> usize {
        (self.n_sub as f64 * self.d).round() as usize
    }
}

/// `|sin(order * pi/2 * psi) / sin(pi/2 * psi)|^2` with the removable
/// singularity evaluated as `order^2`.
fn dirichlet_power(order: f64, psi: f64) -> f64 {
    let den = (PI / 2.0 * psi).sin();
    if den.abs() < SINGULARITY_EPS {
        order * order
    } else {
        let num = (order * PI / 2.0 * psi).sin();
        (num / den).powi(2)
    }
}

/// Grating-lobe phase argument
/// `psi_jump = 2 f dtau_jump + dphi_jump/pi + D (f/f_c) sin_theta`.
pub fn psi_jump(view: &SubArrayView, grid: &OfdmGrid, sin_theta: f64, f: f64) -> f64 {
    2.0 * f * view.dtau_jump + view.dphi_jump / PI + view.d * (f / grid.f_c()) * sin_theta
}

/// Spatial-filter phase argument
/// `psi_o = 2 f dtau_step + dphi_step/pi + (f/f_c) sin_theta`.
pub fn psi_filter(view: &SubArrayView, grid: &OfdmGrid, sin_theta: f64, f: f64) -> f64 {
    2.0 * f * view.dtau_step + view.dphi_step / PI + (f / grid.f_c()) * sin_theta
}

/// Sub-array beamforming gain, normalized so the lobe peaks equal
/// `N_T / D = n_sub` (the canonical full-array power scale divided by `D`).
pub fn subarray_gain(view: &SubArrayView, grid: &OfdmGrid, sin_theta: f64, f: f64) -> f64 {
    dirichlet_power(view.n_sub as f64, psi_jump(view, grid, sin_theta, f)) / view.n_sub as f64
}

/// All grating-lobe centres `sin(theta*)` at frequency `f`, i.e. the
/// solutions of `psi_jump = 2z` that land in `[-1, 1)`, ascending. The
/// ladder has spacing `(2/D)(f_c/f)`, so `floor(D)` or `ceil(D)` lobes are
/// visible depending on squint and placement.
pub fn beam_centres_at(view: &SubArrayView, grid: &OfdmGrid, f: f64) -> Vec<f64> {
    let base = 2.0 * f * view.dtau_jump + view.dphi_jump / PI;
    let scale = grid.f_c() / (view.d * f); // sin per unit of (2z - base)
    let span = view.d * f / grid.f_c();
    let z_lo = ((base - span) / 2.0).floor() as i64 - 1;
    let z_hi = ((base + span) / 2.0).ceil() as i64 + 1;
    let mut out = Vec::new();
    for z in z_lo..=z_hi {
        let s = (2.0 * z as f64 - base) * scale;
        if (-1.0..1.0).contains(&s) {
            out.push(s);
        }
    }
    out
}

/// [`beam_centres_at`] at subcarrier `m`.
pub fn beam_centres(view: &SubArrayView, grid: &OfdmGrid, m: usize) -> Result<Vec<f64>> {
    Ok(beam_centres_at(view, grid, grid.subcarrier_frequency(m)?))
}

/// Leading-order slope of the frequency-beam-centre map,
/// `d sin(theta*) / df = -2 dtau_jump / D`. The exact within-branch slope
/// carries an extra `-sin(theta*)/f` beam-squint term.
pub fn map_slope(view: &SubArrayView) -> f64 {
    -2.0 * view.dtau_jump / view.d
}

/// Frequency-spatial filter response `F(theta, f)`: the `D`-element
/// Dirichlet kernel in `psi_o`, peaking at `D^2` on the filter-centre
/// trajectory.
pub fn filter_response(view: &SubArrayView, grid: &OfdmGrid, sin_theta: f64, f: f64) -> f64 {
    dirichlet_power(view.d, psi_filter(view, grid, sin_theta, f))
}

/// Gain-maximizing filter-centre trajectory at frequency `f`:
/// `sin(theta_o) = 1 - mod(2 f_c dtau_step + (dphi_step/pi)(f_c/f) + 1, 2 f_c/f)`.
pub fn filter_centre_at(view: &SubArrayView, grid: &OfdmGrid, f: f64) -> f64 {
    let f_c = grid.f_c();
    1.0 - fmod_floored(
        2.0 * f_c * view.dtau_step + (view.dphi_step / PI) * (f_c / f) + 1.0,
        2.0 * f_c / f,
    )
}

/// [`filter_centre_at`] at subcarrier `m`.
pub fn filter_centre(view: &SubArrayView, grid: &OfdmGrid, m: usize) -> Result<f64> {
    Ok(filter_centre_at(view, grid, grid.subcarrier_frequency(m)?))
}

/// Factorized full-array gain `(1/D) * subarray_gain * filter_response`,
/// valid for the uniform integer-`D` staircase. Identical to the direct
/// `|w^H a|^2` evaluation up to floating-point noise.
pub fn factorized_gain(
    view: &SubArrayView,
    cfg: &ArrayConfig,
    grid: &OfdmGrid,
    sin_theta: f64,
    m: usize,
) -> Result<f64> {
    if view.d.fract() != 0.0 {
        return Err(Error::Precondition(format!(
            "factorization requires integer D, got {} (use the direct gain instead)",
            view.d
        )));
    }
    if view.n_t() != cfg.n_t() {
        return Err(Error::InvalidArgument(format!(
            "view covers {} antennas but the array has {}",
            view.n_t(),
            cfg.n_t()
        )));
    }
    let f = grid.subcarrier_frequency(m)?;
    Ok(factorized_gain_at(view, grid, sin_theta, f))
}

/// Squint-exact factorized gain at an arbitrary frequency (no divisibility
/// re-checks; callers come through [`factorized_gain`] or tests).
pub fn factorized_gain_at(view: &SubArrayView, grid: &OfdmGrid, sin_theta: f64, f: f64) -> f64 {
    subarray_gain(view, grid, sin_theta, f) * filter_response(view, grid, sin_theta, f) / view.d
}

/// Per-frequency peak angle and gain extracted from a sampled gain grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamMap {
    pub freqs: Vec<f64>,
    pub peak_sin_theta: Vec<f64>,
    pub peak_gain: Vec<f64>,
}

/// Per-row argmax over the angle axis; ties break toward smaller `sin(theta)`.
pub fn extract_beam_map(grid: &GainGrid) -> BeamMap {
    let mut peak_sin_theta = Vec::with_capacity(grid.freqs.len());
    let mut peak_gain = Vec::with_capacity(grid.freqs.len());
    for row in &grid.values {
        let mut best = 0usize;
        for (j, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = j;
            }
        }
        peak_sin_theta.push(grid.angles[best]);
        peak_gain.push(row[best]);
    }
    BeamMap {
        freqs: grid.freqs.clone(),
        peak_sin_theta,
        peak_gain,
    }
}

/// Beamforming gain sliced at each user's angle across the whole band:
/// `values[k][m-1] = G(theta_k, f_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OnTargetGain {
    pub user_angles: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

pub fn on_target_gain(
    profile: &DelayPhaseProfile,
    cfg: &ArrayConfig,
    grid: &OfdmGrid,
    user_angles: &[f64],
) -> Result<OnTargetGain> {
    if user_angles.is_empty() || user_angles.len() > cfg.n_t() {
        return Err(Error::InvalidArgument(format!(
            "user count must be in [1, N_T], got {}",
            user_angles.len()
        )));
    }
    let values = user_angles
        .par_iter()
        .map(|&theta| {
            let s = theta.sin();
            (1..=grid.m_tot())
                .map(|m| gain(profile, cfg, grid, s, m))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OnTargetGain {
        user_angles: user_angles.to_vec(),
        values,
    })
}

/// `|sin(theta_act^(q)) - sin(theta^(q))|` per user: zero (to fp accuracy)
/// for the two-stage design, and the Fig.-5 mismatch for integer `D`.
pub fn mapping_discrepancy(result: &DesignResult) -> Vec<f64> {
    result
        .predicted_angles
        .iter()
        .zip(result.target_angles.iter())
        .map(|(&pred, &tgt)| (pred.sin() - tgt.sin()).abs())
        .collect()
}

/// View for closed-form checks of a design result (valid for any real `D`;
/// `n_sub` is only meaningful for the integer-`D` factorization).
pub fn view_of_design(result: &DesignResult) -> SubArrayView {
    let n_t = result.spec.cfg.n_t();
    let n_sub = ((n_t as f64) / result.params.d).round().max(1.0) as usize;
    SubArrayView {
        d: result.params.d,
        dtau_jump: result.params.dtau_jump,
        dphi_jump: result.params.dphi_jump,
        dtau_step: result.params.dtau_step,
        dphi_step: result.params.dphi_step,
        n_sub,
    }
}
