//! Physical primitives for a wideband uniform linear TTD array.
//!
//! Everything here is exact textbook machinery: the OFDM frequency grid, the
//! wideband array response (which carries the f/f_c beam-squint factor), the
//! delay/phase precoder, and the beamforming gain `|w^H a|^2`.
//!
//! Conventions used throughout the crate:
//!
//! - angles are handled as `sin(theta)` internally, uniform grids live on
//!   the half-open interval `[-1, 1)`;
//! - frequencies are absolute Hz;
//! - the precoder carries the `1/sqrt(N_T)` prefactor, so the peak gain of a
//!   matched `N_T`-element array is exactly `N_T`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// OFDM frequency plan: carrier `f_c`, total bandwidth `bw`, `m_tot` subcarriers.
///
/// Subcarrier indices are 1-based; index 1 sits at the lower band edge
/// `f_c - bw/2` and index `m_tot` at the upper edge `f_c + bw/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OfdmGrid {
    f_c: f64,
    bw: f64,
    m_tot: usize,
}

impl OfdmGrid {
    pub fn new(f_c: f64, bw: f64, m_tot: usize) -> Result<Self> {
        if !bw.is_finite() || bw <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "bandwidth must be positive and finite, got {bw}"
            )));
        }
        if !f_c.is_finite() || f_c <= bw / 2.0 {
            return Err(Error::InvalidArgument(format!(
                "carrier must satisfy f_c > bw/2 (all subcarriers positive), got f_c={f_c}, bw={bw}"
            )));
        }
        if m_tot < 2 {
            return Err(Error::InvalidArgument(format!(
                "m_tot must be at least 2, got {m_tot}"
            )));
        }
        Ok(Self { f_c, bw, m_tot })
    }

    pub fn f_c(&self) -> f64 {
        self.f_c
    }

    pub fn bw(&self) -> f64 {
        self.bw
    }

    pub fn m_tot(&self) -> usize {
        self.m_tot
    }

    /// Frequency of the `m`-th subcarrier (1-based):
    /// `f_c - bw/2 + bw*(m-1)/(m_tot-1)`.
    pub fn subcarrier_frequency(&self, m: usize) -> Result<f64> {
        if m < 1 || m > self.m_tot {
            return Err(Error::OutOfRange(format!(
                "subcarrier index m={m} outside [1, {}]",
                self.m_tot
            )));
        }
        Ok(self.f_c - self.bw / 2.0 + self.bw * (m - 1) as f64 / (self.m_tot - 1) as f64)
    }
}

/// Uniform linear array geometry. `spacing_factor` is the element pitch in
/// units of `lambda_c / 2`; the physical arrays considered here always use 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    n_t: usize,
    spacing_factor: f64,
}

impl ArrayConfig {
    pub fn new(n_t: usize, spacing_factor: f64) -> Result<Self> {
        if n_t < 2 {
            return Err(Error::InvalidArgument(format!(
                "antenna count must be at least 2, got {n_t}"
            )));
        }
        if !spacing_factor.is_finite() || spacing_factor <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "spacing factor must be positive, got {spacing_factor}"
            )));
        }
        Ok(Self { n_t, spacing_factor })
    }

    /// Half-wavelength array, the default geometry.
    pub fn half_wavelength(n_t: usize) -> Result<Self> {
        Self::new(n_t, 1.0)
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn spacing_factor(&self) -> f64 {
        self.spacing_factor
    }
}

/// Per-antenna delays (seconds) and phase shifts (radians); the physical
/// content of a TTD codebook entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayPhaseProfile {
    delays: Vec<f64>,
    phases: Vec<f64>,
}

impl DelayPhaseProfile {
    pub fn new(delays: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        if delays.len() != phases.len() {
            return Err(Error::InvalidArgument(format!(
                "delay/phase vectors must have identical length, got {} vs {}",
                delays.len(),
                phases.len()
            )));
        }
        if delays.is_empty() {
            return Err(Error::InvalidArgument("profile must be nonempty".into()));
        }
        if delays.iter().chain(phases.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "profile entries must all be finite".into(),
            ));
        }
        Ok(Self { delays, phases })
    }

    /// All-zero profile of length `n_t` (uniform broadside beam).
    pub fn zero(n_t: usize) -> Result<Self> {
        Self::new(vec![0.0; n_t], vec![0.0; n_t])
    }

    pub fn n_t(&self) -> usize {
        self.delays.len()
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }
}

/// Wideband array response for a sub-sampled aperture: entry `n` (0-based) is
/// `exp(-j pi (f/f_c) n D' s sin_theta_pitch)` over `n_t / stride` elements.
///
/// `stride = 1` is the full array; `stride = D` gives the response of one of
/// the `D` interleaved sub-arrays with `D lambda_c/2` spacing.
pub fn array_response(
    cfg: &ArrayConfig,
    grid: &OfdmGrid,
    sin_theta: f64,
    f: f64,
    stride: usize,
) -> Result<Vec<Complex64>> {
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be positive".into()));
    }
    if stride > 1 && !cfg.n_t.is_multiple_of(stride) {
        return Err(Error::InvalidArgument(format!(
            "N_T = {} not divisible by stride D' = {stride}",
            cfg.n_t
        )));
    }
    if !(-1.0..=1.0).contains(&sin_theta) {
        return Err(Error::InvalidArgument(format!(
            "sin(theta) must be in [-1, 1], got {sin_theta}"
        )));
    }
    let len = cfg.n_t / stride;
    let rate = (f / grid.f_c) * stride as f64 * cfg.spacing_factor * sin_theta;
    Ok((0..len)
        .map(|n| Complex64::from_polar(1.0, -std::f64::consts::PI * rate * n as f64))
        .collect())
}

/// Frequency-dependent precoder `w[n] = exp(j (2 pi f tau_n + phi_n)) / sqrt(N_T)`.
/// Unit 2-norm by construction.
pub fn precoder(profile: &DelayPhaseProfile, f: f64) -> Vec<Complex64> {
    let scale = 1.0 / (profile.n_t() as f64).sqrt();
    profile
        .delays
        .iter()
        .zip(profile.phases.iter())
        .map(|(&tau, &phi)| {
            let phase = 2.0 * std::f64::consts::PI * f * tau + phi;
            Complex64::from_polar(scale, phase)
        })
        .collect()
}

/// Beamforming gain `|w^H a|^2` at an arbitrary frequency.
///
/// This is the squint-exact evaluation path; `gain` wraps it at subcarrier
/// frequencies. Evaluating every subcarrier at `f = f_c` through this hook
/// removes the squint factor entirely, which some tests exploit.
pub fn gain_at(
    profile: &DelayPhaseProfile,
    cfg: &ArrayConfig,
    grid: &OfdmGrid,
    sin_theta: f64,
    f: f64,
) -> Result<f64> {
    if profile.n_t() != cfg.n_t {
        return Err(Error::InvalidArgument(format!(
            "profile length {} does not match N_T = {}",
            profile.n_t(),
            cfg.n_t
        )));
    }
    let w = precoder(profile, f);
    let a = array_response(cfg, grid, sin_theta, f, 1)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (wn, an) in w.iter().zip(a.iter()) {
        acc += wn.conj() * an;
    }
    Ok(acc.norm_sqr())
}

/// Beamforming gain at subcarrier `m` (1-based). Result lies in `[0, N_T]`.
pub fn gain(
    profile: &DelayPhaseProfile,
    cfg: &ArrayConfig,
    grid: &OfdmGrid,
    sin_theta: f64,
    m: usize,
) -> Result<f64> {
    let f = grid.subcarrier_frequency(m)?;
    gain_at(profile, cfg, grid, sin_theta, f)
}

/// Uniform `count`-point grid over `sin(theta) in [-1, 1)`.
pub fn angle_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| -1.0 + 2.0 * j as f64 / count as f64)
        .collect()
}

/// Linear power gain sampled on an angle-frequency lattice.
/// Rows index frequencies, columns index the angle grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GainGrid {
    pub angles: Vec<f64>,
    pub freqs: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

/// Batch gain evaluation over `angle_count` uniform sine points and the given
/// subcarrier indices. Each entry takes exactly the same arithmetic path as a
/// pointwise [`gain`] call; rows are evaluated in parallel.
pub fn gain_grid(
    profile: &DelayPhaseProfile,
    cfg: &ArrayConfig,
    grid: &OfdmGrid,
    angle_count: usize,
    freq_indices: &[usize],
) -> Result<GainGrid> {
    if angle_count < 2 {
        return Err(Error::InvalidArgument(format!(
            "angle_count must be at least 2, got {angle_count}"
        )));
    }
    if freq_indices.is_empty() {
        return Err(Error::InvalidArgument(
            "frequency index list must be nonempty".into(),
        ));
    }
    let angles = angle_grid(angle_count);
    let freqs = freq_indices
        .iter()
        .map(|&m| grid.subcarrier_frequency(m))
        .collect::<Result<Vec<_>>>()?;
    let values = freq_indices
        .par_iter()
        .map(|&m| {
            angles
                .iter()
                .map(|&s| gain(profile, cfg, grid, s, m))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GainGrid {
        angles,
        freqs,
        values,
    })
}

/// Evenly spread subcarrier indices (1-based, endpoints included) for
/// heatmap-style sampling of the band.
pub fn spread_subcarriers(m_tot: usize, count: usize) -> Vec<usize> {
    if count == 0 {
        return Vec::new();
    }
    if count == 1 || m_tot == 1 {
        return vec![1];
    }
    let count = count.min(m_tot);
    (0..count)
        .map(|i| 1 + (i as f64 * (m_tot - 1) as f64 / (count - 1) as f64).round() as usize)
        .collect()
}
