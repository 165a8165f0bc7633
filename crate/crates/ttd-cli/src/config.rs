//! Scenario configuration: one JSON document with nested sections. Angles
//! are written in degrees and converted at this boundary; everything past
//! here runs on radians, Hz, and linear SNR.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use ttd_core::linksim::SweepVariable;
use ttd_core::{ArrayConfig, DesignSpec, Formulation, OfdmGrid};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub scenario: Option<String>,
    pub grid: GridSection,
    pub array: ArraySection,
    #[serde(default)]
    pub design: Option<DesignSection>,
    #[serde(default)]
    pub link: Option<LinkSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: Option<OutputSection>,
    /// Uniform sine-grid resolution for pattern/map extraction.
    #[serde(default)]
    pub angle_grid_size: Option<usize>,
    /// How many evenly spread subcarriers heatmap commands sample.
    #[serde(default)]
    pub pattern_freq_count: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub f_c_hz: f64,
    pub bw_hz: f64,
    pub m_tot: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySection {
    pub n_t: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    pub k_users: usize,
    pub theta1_deg: f64,
    pub theta2_deg: f64,
    /// "modulo" (two-stage, default) or "uniform" (integer-D).
    #[serde(default)]
    pub formulation: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub snr_db: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// One of "k", "bw_hz", "n_t", "snr_db".
    pub variable: String,
    pub values: Vec<f64>,
    #[serde(default)]
    pub sector_samples: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub dir: Option<String>,
}

pub const DEFAULT_ANGLE_GRID: usize = 2048;
pub const DEFAULT_PATTERN_FREQS: usize = 256;
pub const DEFAULT_SECTOR_SAMPLES: usize = 64;

impl RunConfig {
    /// Parse and validate a config file; error messages carry the offending
    /// key path.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut de = serde_json::Deserializer::from_str(&text);
        let cfg: RunConfig = serde_path_to_error::deserialize(&mut de)
            .map_err(|e| anyhow!("config {}: {}: {}", path.display(), e.path(), e.inner()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        self.ofdm_grid()?;
        self.array_config()?;
        if let Some(d) = &self.design {
            if d.k_users < 2 {
                bail!("design.k_users: must be at least 2, got {}", d.k_users);
            }
            if let Some(f) = &d.formulation {
                if f != "modulo" && f != "uniform" {
                    bail!("design.formulation: expected \"modulo\" or \"uniform\", got {f:?}");
                }
            }
        }
        if let Some(s) = &self.sweep {
            sweep_variable(&s.variable)?;
            if s.values.is_empty() {
                bail!("sweep.values: must be nonempty");
            }
            if s.values.windows(2).any(|w| w[1] <= w[0]) {
                bail!("sweep.values: must be strictly increasing");
            }
        }
        if let Some(n) = self.angle_grid_size {
            if n < 2 {
                bail!("angle_grid_size: must be at least 2, got {n}");
            }
        }
        if let Some(n) = self.pattern_freq_count {
            if n < 1 {
                bail!("pattern_freq_count: must be at least 1, got {n}");
            }
        }
        Ok(())
    }

    pub fn ofdm_grid(&self) -> Result<OfdmGrid> {
        OfdmGrid::new(self.grid.f_c_hz, self.grid.bw_hz, self.grid.m_tot)
            .map_err(|e| anyhow!("grid: {e}"))
    }

    pub fn array_config(&self) -> Result<ArrayConfig> {
        ArrayConfig::half_wavelength(self.array.n_t).map_err(|e| anyhow!("array: {e}"))
    }

    pub fn design_spec(&self) -> Result<Option<DesignSpec>> {
        let Some(d) = &self.design else {
            return Ok(None);
        };
        let spec = DesignSpec {
            k_users: d.k_users,
            theta_1: d.theta1_deg.to_radians(),
            theta_2: d.theta2_deg.to_radians(),
            grid: self.ofdm_grid()?,
            cfg: self.array_config()?,
        };
        spec.validate().map_err(|e| anyhow!("design: {e}"))?;
        Ok(Some(spec))
    }

    pub fn formulation(&self) -> Formulation {
        match self.design.as_ref().and_then(|d| d.formulation.as_deref()) {
            Some("uniform") => Formulation::UniformInteger,
            _ => Formulation::Modulo,
        }
    }

    pub fn angle_count(&self, cli_override: Option<usize>) -> usize {
        cli_override
            .or(self.angle_grid_size)
            .unwrap_or(DEFAULT_ANGLE_GRID)
    }

    pub fn seed(&self, cli_override: Option<u64>) -> u64 {
        cli_override.or(self.seed).unwrap_or(0)
    }

    pub fn pattern_freqs(&self) -> usize {
        self.pattern_freq_count.unwrap_or(DEFAULT_PATTERN_FREQS)
    }

    pub fn snr_linear(&self) -> f64 {
        let db = self.link.as_ref().map(|l| l.snr_db).unwrap_or(10.0);
        10f64.powf(db / 10.0)
    }
}

pub fn sweep_variable(name: &str) -> Result<SweepVariable> {
    match name {
        "k" => Ok(SweepVariable::K),
        "bw_hz" => Ok(SweepVariable::Bw),
        "n_t" => Ok(SweepVariable::NT),
        "snr_db" => Ok(SweepVariable::Snr),
        other => bail!(
            "sweep.variable: expected one of \"k\", \"bw_hz\", \"n_t\", \"snr_db\", got {other:?}"
        ),
    }
}
