//! Shared scenario builders for the benchmark suite.

use ttd_core::codebook::two_stage_design;
use ttd_core::{ArrayConfig, DesignResult, DesignSpec, OfdmGrid};

pub fn reference_grid() -> OfdmGrid {
    OfdmGrid::new(60e9, 2e9, 4096).unwrap()
}

pub fn reference_array() -> ArrayConfig {
    ArrayConfig::half_wavelength(32).unwrap()
}

/// The K=5 sector used throughout the benchmarks.
pub fn reference_design() -> DesignResult {
    let spec = DesignSpec {
        k_users: 5,
        theta_1: (-30.0f64).to_radians(),
        theta_2: 40.0f64.to_radians(),
        grid: reference_grid(),
        cfg: reference_array(),
    };
    two_stage_design(&spec).unwrap()
}
