//! Staircase true-time-delay (TTD) array codebooks.
//!
//! A single-RF-chain analog TTD array can serve `K` spatially separated
//! users at once by giving each OFDM sub-band its own beam direction. This
//! crate builds the staircase delay/phase codebooks that realize such
//! sub-band-specific beams, provides the closed-form frequency-spatial
//! analysis of the resulting patterns (grating-lobe ladders, the spatial
//! filter and its centre trajectory, gain factorization), and evaluates
//! multi-user spectral efficiency over line-of-sight OFDM links.
//!
//! Modules:
//!
//! - [`wavefield`]: OFDM grid, array response, precoder, exact gain.
//! - [`codebook`]: staircase constructions and the two-stage design.
//! - [`analysis`]: closed-form beam analysis and beam-map extraction.
//! - [`linksim`]: multi-user rate evaluation, baselines and sweeps.

pub mod analysis;
pub mod codebook;
pub mod error;
pub mod linksim;
pub mod wavefield;

pub use analysis::{BeamMap, OnTargetGain, SubArrayView};
pub use codebook::{
    CodebookFile, DesignResult, DesignSpec, Formulation, StaircaseParams,
};
pub use error::{Error, Result};
pub use linksim::{LinkConfig, SweepResult, SweepSpec, SweepVariable};
pub use wavefield::{ArrayConfig, DelayPhaseProfile, GainGrid, OfdmGrid};
