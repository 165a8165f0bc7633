//! Staircase TTD codebook construction and the closed-form two-stage design.
//!
//! A Staircase codebook is generated by five parameters: the grating factor
//! `D`, the jump increments (`dtau_jump`, `dphi_jump`) applied every `D`
//! elements, and the step increments (`dtau_step`, `dphi_step`) applied at
//! every element. Two formulations are supported:
//!
//! - [`build_uniform`]: integer `D`, wraps triggered by the antenna index;
//! - [`build_modulo`]: real `D`, wraps triggered by a magnitude threshold,
//!   which is what lets the two-stage design place grating lobes at
//!   arbitrary sinusoidally equidistant user angles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavefield::{ArrayConfig, DelayPhaseProfile, OfdmGrid};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Floored modulo: `x - y*floor(x/y)`.
///
/// Total and sign-consistent: results lie in `[0, y)` for `y > 0` and in
/// `(y, 0]` for `y < 0`. `y = 0` yields NaN; callers validate the modulus.
pub fn fmod_floored(x: f64, y: f64) -> f64 {
    x - y * (x / y).floor()
}

/// Wrap a phase into `[0, 2*pi)`.
pub fn wrap_phase(phi: f64) -> f64 {
    fmod_floored(phi, TAU)
}

/// Wrap a sine value onto the half-open interval `[-1, 1)`.
pub fn wrap_sin(s: f64) -> f64 {
    fmod_floored(s + 1.0, 2.0) - 1.0
}

/// Kronecker summation of two vectors: output index `i*N2 + j` holds
/// `a[i] + b[j]` (the log of the Kronecker product of elementwise
/// exponentials).
pub fn kron_sum(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &ai in a {
        for &bj in b {
            out.push(ai + bj);
        }
    }
    out
}

/// Which staircase recurrence generates the profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// Index-triggered wraps; `D` must be a positive integer.
    UniformInteger,
    /// Threshold-triggered wraps; `D` may be any real `>= 1`.
    Modulo,
}

/// The five staircase generators plus the formulation flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaircaseParams {
    pub d: f64,
    pub dtau_jump: f64,
    pub dphi_jump: f64,
    pub dtau_step: f64,
    pub dphi_step: f64,
    pub formulation: Formulation,
}

impl StaircaseParams {
    pub fn validate(&self) -> Result<()> {
        if !self.d.is_finite() || self.d < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "grating factor D must be >= 1, got {}",
                self.d
            )));
        }
        if self.formulation == Formulation::UniformInteger && self.d.fract() != 0.0 {
            return Err(Error::Formulation(format!(
                "uniform formulation requires integer D, got {}",
                self.d
            )));
        }
        for (name, v) in [
            ("dtau_jump", self.dtau_jump),
            ("dphi_jump", self.dphi_jump),
            ("dtau_step", self.dtau_step),
            ("dphi_step", self.dphi_step),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// Uniform (integer-`D`) staircase: element `n` (0-based) carries
/// `floor(n/D)` jumps and `n mod D` steps. This closed form is exactly the
/// index recurrence anchored at `tau_1 = phi_1 = 0`, and coincides
/// elementwise with the Kronecker-summation construction whenever
/// `N_T mod D = 0`. Stored phases are wrapped into `[0, 2*pi)`.
pub fn build_uniform(params: &StaircaseParams, n_t: usize) -> Result<DelayPhaseProfile> {
    params.validate()?;
    if params.formulation != Formulation::UniformInteger {
        return Err(Error::Formulation(
            "build_uniform requires the uniform-integer formulation".into(),
        ));
    }
    let d = params.d as usize;
    let mut delays = Vec::with_capacity(n_t);
    let mut phases = Vec::with_capacity(n_t);
    for n in 0..n_t {
        let i = (n / d) as f64;
        let j = (n % d) as f64;
        delays.push(i * params.dtau_jump + j * params.dtau_step);
        phases.push(wrap_phase(i * params.dphi_jump + j * params.dphi_step));
    }
    DelayPhaseProfile::new(delays, phases)
}

/// Modulo staircase: `tau_n = mod((n-1) dtau_step, D dtau_step - dtau_jump)`
/// and the analogous phase recurrence. Wraps occur wherever the running ramp
/// crosses the modulus, so for non-integer `D` the step widths alternate
/// between `floor(D)` and `ceil(D)` antennas. Stored phases are wrapped into
/// `[0, 2*pi)`.
pub fn build_modulo(params: &StaircaseParams, n_t: usize) -> Result<DelayPhaseProfile> {
    params.validate()?;
    let m_tau = params.d * params.dtau_step - params.dtau_jump;
    let m_phi = params.d * params.dphi_step - params.dphi_jump;
    if m_tau == 0.0 {
        return Err(Error::InvalidArgument(
            "delay modulus D*dtau_step - dtau_jump must be nonzero".into(),
        ));
    }
    if m_phi == 0.0 {
        return Err(Error::InvalidArgument(
            "phase modulus D*dphi_step - dphi_jump must be nonzero".into(),
        ));
    }
    let mut delays = Vec::with_capacity(n_t);
    let mut phases = Vec::with_capacity(n_t);
    for n in 0..n_t {
        delays.push(fmod_floored(n as f64 * params.dtau_step, m_tau));
        phases.push(wrap_phase(fmod_floored(n as f64 * params.dphi_step, m_phi)));
    }
    DelayPhaseProfile::new(delays, phases)
}

/// Beam-squint correction factor `gamma = 1 + BW/(2 f_c) - BW/(2 K f_c)`,
/// equivalently `f^(K) / f_c`: the outermost grating lobe is anchored at the
/// top sub-band centre rather than the carrier.
pub fn squint_factor(k: usize, grid: &OfdmGrid) -> f64 {
    debug_assert!(k >= 1);
    1.0 + grid.bw() / (2.0 * grid.f_c()) - grid.bw() / (2.0 * k as f64 * grid.f_c())
}

/// Centre frequency of sub-band `q` of `k`:
/// `f^(q) = f_c - BW/2 + BW (2q-1) / (2K)`.
pub fn subband_center(grid: &OfdmGrid, k: usize, q: usize) -> f64 {
    grid.f_c() - grid.bw() / 2.0 + grid.bw() * (2 * q - 1) as f64 / (2.0 * k as f64)
}

/// Sector specification for the two-stage design: `k_users` sinusoidally
/// equidistant targets spanning `[theta_1, theta_2]` (radians, either
/// orientation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignSpec {
    pub k_users: usize,
    pub theta_1: f64,
    pub theta_2: f64,
    pub grid: OfdmGrid,
    pub cfg: ArrayConfig,
}

impl DesignSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k_users < 2 {
            return Err(Error::InvalidArgument(format!(
                "design requires at least 2 users, got {}",
                self.k_users
            )));
        }
        let half_pi = std::f64::consts::FRAC_PI_2;
        if self.theta_1.abs() >= half_pi || self.theta_2.abs() >= half_pi {
            return Err(Error::InvalidArgument(
                "sector endpoints must satisfy |theta| < pi/2".into(),
            ));
        }
        if self.theta_1.sin() == self.theta_2.sin() {
            return Err(Error::InvalidArgument(
                "degenerate sector: sin(theta_1) must differ from sin(theta_2)".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of a codebook design. `profile` is absent when the sector is
/// infeasible for the array (`ceil(D) >= N_T`, no wrap can be induced).
#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    pub spec: DesignSpec,
    pub params: StaircaseParams,
    pub profile: Option<DelayPhaseProfile>,
    /// Intended user angles theta^(q) (radians), Eq.-of-targets.
    pub target_angles: Vec<f64>,
    /// Grating-lobe angles realized by the built codebook, read off the
    /// closed-form lobe ladder at the design anchor frequency `f^(K)`.
    pub predicted_angles: Vec<f64>,
    pub gamma: f64,
    pub subband_centers: Vec<f64>,
    pub feasible: bool,
    /// True when the sub-band-to-angle map ascends in sine.
    pub increasing: bool,
}

impl DesignResult {
    pub fn k_users(&self) -> usize {
        self.target_angles.len()
    }
}

fn design_common(spec: &DesignSpec, integer: bool) -> Result<DesignResult> {
    spec.validate()?;
    let k = spec.k_users;
    let s1 = spec.theta_1.sin();
    let s2 = spec.theta_2.sin();
    let f_c = spec.grid.f_c();
    let gamma = squint_factor(k, &spec.grid);
    let d_real = 2.0 * (k - 1) as f64 / (gamma * (s2 - s1).abs());
    let increasing = s2 > s1;
    let sign = if increasing { 1.0 } else { -1.0 };
    let feasible = (d_real.ceil() as usize) < spec.cfg.n_t();

    let d = if integer { d_real.ceil() } else { d_real };
    let f_1 = subband_center(&spec.grid, k, 1);
    let f_k = subband_center(&spec.grid, k, k);
    // Stage I: anchor lobe 0 flat at theta_1, gamma-corrected spacing.
    let dtau_jump = -d * s1 / (2.0 * f_c);
    let dphi_jump = 0.0;
    // Stage II: filter trajectory through (f^(1), sin theta_1) and
    // (f^(K), sin theta_2); closed-form two-point solve.
    let dtau_step = (f_1 * s1 - f_k * s2) / (2.0 * f_c * (k - 1) as f64 * spec.grid.bw() / k as f64);
    let dphi_step = -std::f64::consts::PI * (f_k / f_c) * (s2 + 2.0 * f_c * dtau_step);

    let params = StaircaseParams {
        d,
        dtau_jump,
        dphi_jump,
        dtau_step,
        dphi_step,
        formulation: if integer {
            Formulation::UniformInteger
        } else {
            Formulation::Modulo
        },
    };

    let profile = if feasible {
        Some(if integer {
            build_uniform(&params, spec.cfg.n_t())?
        } else {
            build_modulo(&params, spec.cfg.n_t())?
        })
    } else {
        None
    };

    let target_angles: Vec<f64> = (1..=k)
        .map(|q| (s1 + (q - 1) as f64 * (s2 - s1) / (k - 1) as f64).asin())
        .collect();
    // Lobe ladder at the anchor frequency f^(K): spacing 2 f_c / (D f^(K)).
    // With the gamma-corrected real D this reproduces the targets exactly;
    // the integer-D ladder misses them (the Fig.-5 dichotomy).
    let predicted_angles: Vec<f64> = (1..=k)
        .map(|q| wrap_sin(s1 + sign * 2.0 * (q - 1) as f64 * f_c / (d * f_k)).asin())
        .collect();
    let subband_centers: Vec<f64> = (1..=k).map(|q| subband_center(&spec.grid, k, q)).collect();

    Ok(DesignResult {
        spec: *spec,
        params,
        profile,
        target_angles,
        predicted_angles,
        gamma,
        subband_centers,
        feasible,
        increasing,
    })
}

/// Two-stage closed-form design with real-valued `D` and the modulo
/// staircase; realizes the target map exactly at the anchor frequency.
pub fn two_stage_design(spec: &DesignSpec) -> Result<DesignResult> {
    design_common(spec, false)
}

/// Same pipeline with `D` forced to the smallest admissible integer and the
/// uniform staircase; exhibits the target/actual mapping discrepancy
/// whenever the real-valued `D` is non-integer.
pub fn integer_design(spec: &DesignSpec) -> Result<DesignResult> {
    design_common(spec, true)
}

/// Retarget sub-band 1 onto user `i` by changing only `dphi_step`; the whole
/// sub-band-to-angle map shifts cyclically. Admissible only when
/// `gamma |sin theta_2 - sin theta_1| > 2 (K-1) / (K+1)`.
pub fn rotate_mapping(result: &DesignResult, i: usize) -> Result<StaircaseParams> {
    let k = result.k_users();
    if i < 1 || i > k {
        return Err(Error::OutOfRange(format!(
            "rotation index i={i} outside [1, {k}]"
        )));
    }
    let s1 = result.spec.theta_1.sin();
    let s2 = result.spec.theta_2.sin();
    let span = result.gamma * (s2 - s1).abs();
    let bound = 2.0 * (k - 1) as f64 / (k + 1) as f64;
    if span <= bound {
        return Err(Error::Precondition(format!(
            "rotation inadmissible: gamma*|sin(theta_2)-sin(theta_1)| = {span:.6} \
             must exceed 2(K-1)/(K+1) = {bound:.6}"
        )));
    }
    let f_1 = result.subband_centers[0];
    let f_c = result.spec.grid.f_c();
    let s_i = result.target_angles[i - 1].sin();
    let dphi_step =
        -std::f64::consts::PI * ((f_1 / f_c) * s_i + 2.0 * f_1 * result.params.dtau_step);
    Ok(StaircaseParams {
        dphi_step,
        ..result.params
    })
}

/// On-disk codebook representation; field names are the exchange contract.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodebookFile {
    pub n_t: usize,
    pub formulation: Formulation,
    pub d: f64,
    pub dtau_jump_s: f64,
    pub dphi_jump_rad: f64,
    pub dtau_step_s: f64,
    pub dphi_step_rad: f64,
    pub delays_s: Vec<f64>,
    pub phases_rad: Vec<f64>,
}

impl CodebookFile {
    pub fn from_parts(params: &StaircaseParams, profile: &DelayPhaseProfile) -> Self {
        Self {
            n_t: profile.n_t(),
            formulation: params.formulation,
            d: params.d,
            dtau_jump_s: params.dtau_jump,
            dphi_jump_rad: params.dphi_jump,
            dtau_step_s: params.dtau_step,
            dphi_step_rad: params.dphi_step,
            delays_s: profile.delays().to_vec(),
            phases_rad: profile.phases().to_vec(),
        }
    }

    pub fn params(&self) -> StaircaseParams {
        StaircaseParams {
            d: self.d,
            dtau_jump: self.dtau_jump_s,
            dphi_jump: self.dphi_jump_rad,
            dtau_step: self.dtau_step_s,
            dphi_step: self.dphi_step_rad,
            formulation: self.formulation,
        }
    }

    pub fn profile(&self) -> Result<DelayPhaseProfile> {
        DelayPhaseProfile::new(self.delays_s.clone(), self.phases_rad.clone())
    }
}
