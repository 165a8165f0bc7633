//! Multi-user OFDM downlink evaluation over single-path line-of-sight
//! channels.
//!
//! Each of the `K` users owns a contiguous `BW/K` sub-band; the rate is the
//! Shannon sum over the user's subcarriers of its on-target beamforming
//! gain, `R = (1/M) sum_k sum_{m in S_k} log2(1 + SNR * B_k(f_m))` with the
//! SNR defined before array gain, so the ideal best-case beam tops out at
//! `log2(1 + SNR * N_T)`. When `K` does not divide `M_tot`, the band is
//! trimmed to the largest multiple of `K` and the rate normalized by the
//! trimmed count.

use rayon::prelude::*;

use crate::codebook::{
    integer_design, squint_factor, two_stage_design, wrap_phase, DesignSpec,
};
use crate::error::{Error, Result};
use crate::wavefield::{gain, ArrayConfig, DelayPhaseProfile, OfdmGrid};

/// One evaluation scenario: grid, array, user count, per-subcarrier SNR
/// (linear, pre-beamforming), and the angular sector holding the users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    pub grid: OfdmGrid,
    pub cfg: ArrayConfig,
    pub k_users: usize,
    pub snr_linear: f64,
    /// Sector endpoints (radians); users sit at sinusoidally equidistant
    /// angles between them.
    pub sector: (f64, f64),
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_users < 1 {
            return Err(Error::InvalidArgument("k_users must be >= 1".into()));
        }
        if !self.snr_linear.is_finite() || self.snr_linear <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "snr must be positive, got {}",
                self.snr_linear
            )));
        }
        let half_pi = std::f64::consts::FRAC_PI_2;
        if self.sector.0.abs() >= half_pi || self.sector.1.abs() >= half_pi {
            return Err(Error::InvalidArgument(
                "sector endpoints must satisfy |theta| < pi/2".into(),
            ));
        }
        if self.k_users >= 2 && self.sector.0.sin() == self.sector.1.sin() {
            return Err(Error::InvalidArgument("degenerate sector".into()));
        }
        Ok(())
    }

    /// Target user angles (radians): sinusoidally equidistant across the
    /// sector, or just `theta_1` for a single user.
    pub fn target_angles(&self) -> Vec<f64> {
        let k = self.k_users;
        if k == 1 {
            return vec![self.sector.0];
        }
        let s1 = self.sector.0.sin();
        let s2 = self.sector.1.sin();
        (1..=k)
            .map(|q| (s1 + (q - 1) as f64 * (s2 - s1) / (k - 1) as f64).asin())
            .collect()
    }
}

/// Contiguous equal sub-band assignment: user `k` (1-based) gets subcarriers
/// `[(k-1) M/K + 1, k M/K]`. Errors when `K` does not divide `M_tot`.
pub fn subband_assignment(link: &LinkConfig) -> Result<Vec<(usize, usize)>> {
    let m_tot = link.grid.m_tot();
    let k = link.k_users;
    if !m_tot.is_multiple_of(k) {
        return Err(Error::InvalidArgument(format!(
            "K = {k} does not divide M_tot = {m_tot}; trim M_tot to {}",
            k * (m_tot / k)
        )));
    }
    let sz = m_tot / k;
    Ok((0..k).map(|u| (u * sz + 1, (u + 1) * sz)).collect())
}

fn trimmed_assignment(m_tot: usize, k: usize) -> (usize, Vec<(usize, usize)>) {
    let m_used = k * (m_tot / k);
    let sz = m_used / k;
    (m_used, (0..k).map(|u| (u * sz + 1, (u + 1) * sz)).collect())
}

/// Network spectral efficiency and its per-user decomposition (bits/s/Hz;
/// the per-user entries sum to the total).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEfficiency {
    pub total: f64,
    pub per_user: Vec<f64>,
}

/// Rate of a beam profile on a scenario, slicing the gain at the Eq.-of-
/// targets user angles over each user's own sub-band.
pub fn spectral_efficiency(
    profile: &DelayPhaseProfile,
    link: &LinkConfig,
) -> Result<SpectralEfficiency> {
    link.validate()?;
    let (m_used, ranges) = trimmed_assignment(link.grid.m_tot(), link.k_users);
    let targets = link.target_angles();
    let per_user: Vec<f64> = targets
        .par_iter()
        .zip(ranges.par_iter())
        .map(|(&theta, &(lo, hi))| {
            let s = theta.sin();
            let mut acc = 0.0;
            for m in lo..=hi {
                let b = gain(profile, &link.cfg, &link.grid, s, m)?;
                acc += (1.0 + link.snr_linear * b).log2();
            }
            Ok(acc / m_used as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralEfficiency {
        total: per_user.iter().sum(),
        per_user,
    })
}

/// Closed-form rate of the ideal best-case beam, `log2(1 + SNR * N_T)`.
pub fn ideal_spectral_efficiency(link: &LinkConfig) -> f64 {
    (1.0 + link.snr_linear * link.cfg.n_t() as f64).log2()
}

/// A labeled evaluation method: either the ideal gain oracle or a concrete
/// beam profile.
#[derive(Debug, Clone, PartialEq)]
pub enum BaselineKind {
    IdealBound,
    Beam(DelayPhaseProfile),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledBaseline {
    pub label: &'static str,
    pub kind: BaselineKind,
}

pub const METHOD_LABELS: [&str; 4] = [
    "ideal_bound",
    "phased_single_beam",
    "staircase_uniform",
    "staircase_modulo",
];

fn median_sin(targets: &[f64]) -> f64 {
    let mut sines: Vec<f64> = targets.iter().map(|t| t.sin()).collect();
    sines.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sines.len();
    if n % 2 == 1 {
        sines[n / 2]
    } else {
        0.5 * (sines[n / 2 - 1] + sines[n / 2])
    }
}

/// The comparison set: ideal bound, a frequency-flat phased array matched at
/// the carrier to the median user angle, and the two staircase designs.
/// Errors if the sector is infeasible for the staircase designs (`K >= 2`).
pub fn baseline_profiles(link: &LinkConfig) -> Result<Vec<LabeledBaseline>> {
    link.validate()?;
    let targets = link.target_angles();
    let s_med = median_sin(&targets);
    let n_t = link.cfg.n_t();
    let phases: Vec<f64> = (0..n_t)
        .map(|n| wrap_phase(-std::f64::consts::PI * n as f64 * s_med))
        .collect();
    let phased = DelayPhaseProfile::new(vec![0.0; n_t], phases)?;

    let (uniform, modulo) = if link.k_users == 1 {
        // Single user: both designs collapse to the matched phased beam.
        (phased.clone(), phased.clone())
    } else {
        let spec = DesignSpec {
            k_users: link.k_users,
            theta_1: link.sector.0,
            theta_2: link.sector.1,
            grid: link.grid,
            cfg: link.cfg,
        };
        let int = integer_design(&spec)?;
        let two = two_stage_design(&spec)?;
        match (int.profile, two.profile) {
            (Some(u), Some(m)) => (u, m),
            _ => {
                return Err(Error::Infeasible {
                    d_ceil: two.params.d.ceil() as usize,
                    n_t,
                })
            }
        }
    };

    Ok(vec![
        LabeledBaseline {
            label: METHOD_LABELS[0],
            kind: BaselineKind::IdealBound,
        },
        LabeledBaseline {
            label: METHOD_LABELS[1],
            kind: BaselineKind::Beam(phased),
        },
        LabeledBaseline {
            label: METHOD_LABELS[2],
            kind: BaselineKind::Beam(uniform),
        },
        LabeledBaseline {
            label: METHOD_LABELS[3],
            kind: BaselineKind::Beam(modulo),
        },
    ])
}

/// Rate of one baseline on a scenario.
pub fn baseline_spectral_efficiency(
    baseline: &LabeledBaseline,
    link: &LinkConfig,
) -> Result<SpectralEfficiency> {
    match &baseline.kind {
        BaselineKind::IdealBound => {
            let total = ideal_spectral_efficiency(link);
            let per_user = vec![total / link.k_users as f64; link.k_users];
            Ok(SpectralEfficiency { total, per_user })
        }
        BaselineKind::Beam(profile) => spectral_efficiency(profile, link),
    }
}

/// Deterministic low-discrepancy sector sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorSample {
    /// Accepted `(theta_1, theta_2)` pairs, radians, both orientations.
    pub pairs: Vec<(f64, f64)>,
    pub requested: usize,
    pub attempts: usize,
}

impl SectorSample {
    pub fn shortfall(&self) -> usize {
        self.requested - self.pairs.len()
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Halton-sequence sample of ordered sector pairs with sines in
/// `[-sin 75 deg, sin 75 deg]`, keeping only pairs realizable on the array
/// (`ceil(D) < N_T`). The seed offsets the sequence start, so a fixed seed
/// reproduces the sample bit for bit. May return fewer than `count` pairs.
pub fn feasible_sector_sample(
    k: usize,
    grid: &OfdmGrid,
    cfg: &ArrayConfig,
    count: usize,
    seed: u64,
) -> Result<SectorSample> {
    if k < 2 {
        return Err(Error::InvalidArgument(
            "sector sampling requires at least 2 users".into(),
        ));
    }
    if count < 1 {
        return Err(Error::InvalidArgument("count must be >= 1".into()));
    }
    let s_max = 75.0f64.to_radians().sin();
    let gamma = squint_factor(k, grid);
    let mut pairs = Vec::with_capacity(count);
    let mut i = 1 + (seed % 4096);
    let mut attempts = 0usize;
    while pairs.len() < count && attempts < 100_000 {
        let u1 = radical_inverse(i, 2);
        let u2 = radical_inverse(i, 3);
        i += 1;
        attempts += 1;
        let s1 = -s_max + 2.0 * s_max * u1;
        let s2 = -s_max + 2.0 * s_max * u2;
        if (s2 - s1).abs() < 1e-6 {
            continue;
        }
        let d = 2.0 * (k - 1) as f64 / (gamma * (s2 - s1).abs());
        if (d.ceil() as usize) >= cfg.n_t() {
            continue;
        }
        pairs.push((s1.asin(), s2.asin()));
    }
    Ok(SectorSample {
        pairs,
        requested: count,
        attempts,
    })
}

/// Which scenario knob a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Number of users; values must be integers >= 2.
    K,
    /// Total bandwidth in Hz.
    Bw,
    /// Array size; values must be integers >= 2.
    NT,
    /// Per-subcarrier SNR in dB.
    Snr,
}

impl SweepVariable {
    pub fn label(&self) -> &'static str {
        match self {
            SweepVariable::K => "k",
            SweepVariable::Bw => "bw_hz",
            SweepVariable::NT => "n_t",
            SweepVariable::Snr => "snr_db",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub fixed: LinkConfig,
    pub sector_samples: usize,
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.fixed.validate()?;
        if self.values.is_empty() {
            return Err(Error::InvalidArgument("sweep values must be nonempty".into()));
        }
        if self.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "sweep values must be strictly increasing".into(),
            ));
        }
        if self.sector_samples < 1 {
            return Err(Error::InvalidArgument("sector_samples must be >= 1".into()));
        }
        Ok(())
    }
}

/// Average spectral efficiency per method per swept value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub methods: Vec<&'static str>,
    /// `se[method][value]`, bits/s/Hz, averaged over feasible sectors.
    pub se: Vec<Vec<f64>>,
    pub sectors_averaged: Vec<usize>,
    pub sectors_skipped: Vec<usize>,
}

fn scenario_for(spec: &SweepSpec, value: f64) -> Result<LinkConfig> {
    let mut link = spec.fixed;
    match spec.variable {
        SweepVariable::K => {
            if value.fract() != 0.0 || value < 2.0 {
                return Err(Error::InvalidArgument(format!(
                    "K sweep values must be integers >= 2, got {value}"
                )));
            }
            link.k_users = value as usize;
        }
        SweepVariable::Bw => {
            link.grid = OfdmGrid::new(link.grid.f_c(), value, link.grid.m_tot())?;
        }
        SweepVariable::NT => {
            if value.fract() != 0.0 || value < 2.0 {
                return Err(Error::InvalidArgument(format!(
                    "N_T sweep values must be integers >= 2, got {value}"
                )));
            }
            link.cfg = ArrayConfig::half_wavelength(value as usize)?;
        }
        SweepVariable::Snr => {
            link.snr_linear = 10f64.powf(value / 10.0);
        }
    }
    Ok(link)
}

/// Run the sweep: for every value, average each method over a seeded
/// feasible-sector sample. Deterministic for a fixed spec (including seed);
/// scenario evaluations run in parallel but reduce in order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let per_value: Vec<(Vec<f64>, usize, usize)> = spec
        .values
        .par_iter()
        .map(|&value| {
            let base = scenario_for(spec, value)?;
            let sample =
                feasible_sector_sample(base.k_users, &base.grid, &base.cfg, spec.sector_samples, spec.seed)?;
            let mut skipped = sample.shortfall();
            let mut sums = vec![0.0f64; METHOD_LABELS.len()];
            let mut used = 0usize;
            for &(th1, th2) in &sample.pairs {
                let link = LinkConfig {
                    sector: (th1, th2),
                    ..base
                };
                match baseline_profiles(&link) {
                    Ok(baselines) => {
                        for (j, b) in baselines.iter().enumerate() {
                            sums[j] += baseline_spectral_efficiency(b, &link)?.total;
                        }
                        used += 1;
                    }
                    Err(Error::Infeasible { .. }) => skipped += 1,
                    Err(e) => return Err(e),
                }
            }
            if used == 0 {
                return Err(Error::Precondition(format!(
                    "no feasible sectors at {} = {value}: every sampled pair violates \
                     ceil(2(K-1)/(gamma |sin th2 - sin th1|)) < N_T",
                    spec.variable.label()
                )));
            }
            let avg: Vec<f64> = sums.iter().map(|s| s / used as f64).collect();
            Ok((avg, used, skipped))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut se = vec![vec![0.0; spec.values.len()]; METHOD_LABELS.len()];
    let mut sectors_averaged = Vec::with_capacity(spec.values.len());
    let mut sectors_skipped = Vec::with_capacity(spec.values.len());
    for (vi, (avg, used, skipped)) in per_value.into_iter().enumerate() {
        for (mi, v) in avg.into_iter().enumerate() {
            se[mi][vi] = v;
        }
        sectors_averaged.push(used);
        sectors_skipped.push(skipped);
    }
    Ok(SweepResult {
        variable: spec.variable,
        values: spec.values.clone(),
        methods: METHOD_LABELS.to_vec(),
        se,
        sectors_averaged,
        sectors_skipped,
    })
}
