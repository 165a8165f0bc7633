//! The five subcommands. Exit-code contract: 0 success, 1 input error,
//! 2 infeasible design or file/array mismatch, 3 validation failure.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::Serialize;
use ttd_core::analysis::{
    beam_centres_at, extract_beam_map, factorized_gain_at, mapping_discrepancy, SubArrayView,
};
use ttd_core::codebook::{
    build_modulo, build_uniform, integer_design, two_stage_design, CodebookFile,
};
use ttd_core::linksim::{LinkConfig, SweepSpec};
use ttd_core::wavefield::{angle_grid, gain_at, gain_grid, spread_subcarriers};
use ttd_core::{DelayPhaseProfile, DesignResult, Formulation};

use crate::config::{sweep_variable, RunConfig, DEFAULT_SECTOR_SAMPLES};
use crate::output::{db, write_json, CsvWriter};

/// Failure modes with their process exit codes.
pub enum CmdError {
    /// Unreadable/invalid input: exit 1.
    Input(anyhow::Error),
    /// Infeasible design or mismatched artifacts: exit 2.
    Infeasible(String),
    /// One or more validation checks failed: exit 3.
    Validation(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Input(_) => 1,
            CmdError::Infeasible(_) => 2,
            CmdError::Validation(_) => 3,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CmdError::Input(e) => format!("{e:#}"),
            CmdError::Infeasible(m) | CmdError::Validation(m) => m.clone(),
        }
    }
}

impl From<anyhow::Error> for CmdError {
    fn from(e: anyhow::Error) -> Self {
        CmdError::Input(e)
    }
}

type CmdResult = Result<(), CmdError>;

fn out_dir(cfg: &RunConfig, cli: Option<&Path>) -> Result<PathBuf, CmdError> {
    let dir = cli
        .map(|p| p.to_path_buf())
        .or_else(|| {
            cfg.output
                .as_ref()
                .and_then(|o| o.dir.as_ref())
                .map(PathBuf::from)
        })
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    Ok(dir)
}

fn run_design(cfg: &RunConfig) -> Result<DesignResult, CmdError> {
    let spec = cfg
        .design_spec()?
        .ok_or_else(|| anyhow!("config has no design section"))?;
    let result = match cfg.formulation() {
        Formulation::Modulo => two_stage_design(&spec),
        Formulation::UniformInteger => integer_design(&spec),
    }
    .map_err(|e| CmdError::Input(anyhow!("design: {e}")))?;
    Ok(result)
}

#[derive(Serialize)]
struct DesignReport {
    scenario: Option<String>,
    formulation: Formulation,
    k_users: usize,
    theta1_deg: f64,
    theta2_deg: f64,
    d: f64,
    gamma: f64,
    dtau_jump_s: f64,
    dphi_jump_rad: f64,
    dtau_step_s: f64,
    dphi_step_rad: f64,
    feasible: bool,
    increasing: bool,
    target_angles_deg: Vec<f64>,
    predicted_angles_deg: Vec<f64>,
    mapping_discrepancy_sin: Vec<f64>,
    subband_centers_hz: Vec<f64>,
}

fn design_report(cfg: &RunConfig, r: &DesignResult) -> DesignReport {
    DesignReport {
        scenario: cfg.scenario.clone(),
        formulation: r.params.formulation,
        k_users: r.k_users(),
        theta1_deg: r.spec.theta_1.to_degrees(),
        theta2_deg: r.spec.theta_2.to_degrees(),
        d: r.params.d,
        gamma: r.gamma,
        dtau_jump_s: r.params.dtau_jump,
        dphi_jump_rad: r.params.dphi_jump,
        dtau_step_s: r.params.dtau_step,
        dphi_step_rad: r.params.dphi_step,
        feasible: r.feasible,
        increasing: r.increasing,
        target_angles_deg: r.target_angles.iter().map(|t| t.to_degrees()).collect(),
        predicted_angles_deg: r.predicted_angles.iter().map(|t| t.to_degrees()).collect(),
        mapping_discrepancy_sin: mapping_discrepancy(r),
        subband_centers_hz: r.subband_centers.clone(),
    }
}

pub fn cmd_design(config: &Path, out: Option<&Path>) -> CmdResult {
    let cfg = RunConfig::load(config)?;
    let dir = out_dir(&cfg, out)?;
    let result = run_design(&cfg)?;
    let report = design_report(&cfg, &result);
    write_json(&dir.join("design_report.json"), &report)?;
    if !result.feasible {
        return Err(CmdError::Infeasible(format!(
            "infeasible sector: ceil(D) = {} must be < N_T = {} \
             (D = {:.6}); report written to {}",
            result.params.d.ceil() as usize,
            result.spec.cfg.n_t(),
            result.params.d,
            dir.join("design_report.json").display(),
        )));
    }
    let profile = result.profile.as_ref().expect("feasible design has a profile");
    let file = CodebookFile::from_parts(&result.params, profile);
    write_json(&dir.join("codebook.json"), &file)?;
    println!(
        "design: D = {:.6}, gamma = {:.9}, feasible; wrote {} and {}",
        result.params.d,
        result.gamma,
        dir.join("codebook.json").display(),
        dir.join("design_report.json").display(),
    );
    Ok(())
}

fn load_codebook(path: &Path) -> Result<(CodebookFile, DelayPhaseProfile), CmdError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read codebook {}", path.display()))?;
    let file: CodebookFile = serde_json::from_str(&text)
        .map_err(|e| anyhow!("corrupt codebook {}: {e}", path.display()))?;
    let profile = file
        .profile()
        .map_err(|e| anyhow!("corrupt codebook {}: {e}", path.display()))?;
    if profile.n_t() != file.n_t {
        return Err(CmdError::Input(anyhow!(
            "corrupt codebook {}: n_t = {} but vectors have length {}",
            path.display(),
            file.n_t,
            profile.n_t()
        )));
    }
    Ok((file, profile))
}

fn check_array_match(cfg: &RunConfig, file: &CodebookFile) -> CmdResult {
    if file.n_t != cfg.array.n_t {
        return Err(CmdError::Infeasible(format!(
            "codebook/array size mismatch: codebook has n_t = {}, config array.n_t = {}",
            file.n_t, cfg.array.n_t
        )));
    }
    Ok(())
}

pub fn cmd_pattern(
    config: &Path,
    codebook: &Path,
    out: Option<&Path>,
    angles: Option<usize>,
) -> CmdResult {
    let cfg = RunConfig::load(config)?;
    let (file, profile) = load_codebook(codebook)?;
    check_array_match(&cfg, &file)?;
    let dir = out_dir(&cfg, out)?;
    let grid = cfg.ofdm_grid()?;
    let array = cfg.array_config()?;
    let freq_indices = spread_subcarriers(grid.m_tot(), cfg.pattern_freqs());
    let gg = gain_grid(&profile, &array, &grid, cfg.angle_count(angles), &freq_indices)
        .map_err(|e| anyhow!("pattern: {e}"))?;
    let path = dir.join("pattern.csv");
    let mut csv = CsvWriter::create(&path, "m,f_hz,sin_theta,gain_db")?;
    for (i, &m) in freq_indices.iter().enumerate() {
        let f = gg.freqs[i];
        for (j, &s) in gg.angles.iter().enumerate() {
            csv.row(format_args!("{m},{f},{s},{}", db(gg.values[i][j])))?;
        }
    }
    csv.finish()?;
    println!(
        "pattern: {} frequencies x {} angles -> {}",
        freq_indices.len(),
        gg.angles.len(),
        path.display()
    );
    Ok(())
}

pub fn cmd_map(
    config: &Path,
    codebook: &Path,
    out: Option<&Path>,
    angles: Option<usize>,
) -> CmdResult {
    let cfg = RunConfig::load(config)?;
    let (file, profile) = load_codebook(codebook)?;
    check_array_match(&cfg, &file)?;
    let dir = out_dir(&cfg, out)?;
    let grid = cfg.ofdm_grid()?;
    let array = cfg.array_config()?;
    let freq_indices = spread_subcarriers(grid.m_tot(), cfg.pattern_freqs());
    let gg = gain_grid(&profile, &array, &grid, cfg.angle_count(angles), &freq_indices)
        .map_err(|e| anyhow!("map: {e}"))?;
    let map = extract_beam_map(&gg);
    let path = dir.join("beam_map.csv");
    let mut csv = CsvWriter::create(&path, "m,f_hz,sin_theta_peak,theta_peak_deg,gain_peak_db")?;
    for (i, &m) in freq_indices.iter().enumerate() {
        let s = map.peak_sin_theta[i];
        csv.row(format_args!(
            "{m},{},{s},{},{}",
            map.freqs[i],
            s.asin().to_degrees(),
            db(map.peak_gain[i])
        ))?;
    }
    csv.finish()?;
    println!("map: wrote {}", path.display());

    if cfg.design.is_some() {
        let result = run_design(&cfg)?;
        #[derive(Serialize)]
        struct DiscrepancyReport {
            formulation: Formulation,
            d: f64,
            target_angles_deg: Vec<f64>,
            predicted_angles_deg: Vec<f64>,
            mapping_discrepancy_sin: Vec<f64>,
            feasible: bool,
        }
        let rep = DiscrepancyReport {
            formulation: result.params.formulation,
            d: result.params.d,
            target_angles_deg: result.target_angles.iter().map(|t| t.to_degrees()).collect(),
            predicted_angles_deg: result
                .predicted_angles
                .iter()
                .map(|t| t.to_degrees())
                .collect(),
            mapping_discrepancy_sin: mapping_discrepancy(&result),
            feasible: result.feasible,
        };
        let rpath = dir.join("discrepancy_report.json");
        write_json(&rpath, &rep)?;
        println!("map: wrote {}", rpath.display());
    }
    Ok(())
}

pub fn cmd_sweep(config: &Path, out: Option<&Path>, seed: Option<u64>) -> CmdResult {
    let cfg = RunConfig::load(config)?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| anyhow!("config has no sweep section"))?;
    let dir = out_dir(&cfg, out)?;
    let grid = cfg.ofdm_grid()?;
    let array = cfg.array_config()?;
    let (k_users, sector) = match &cfg.design {
        Some(d) => (
            d.k_users,
            (d.theta1_deg.to_radians(), d.theta2_deg.to_radians()),
        ),
        None => (5, ((-30.0f64).to_radians(), 40.0f64.to_radians())),
    };
    let spec = SweepSpec {
        variable: sweep_variable(&sweep.variable)?,
        values: sweep.values.clone(),
        fixed: LinkConfig {
            grid,
            cfg: array,
            k_users,
            snr_linear: cfg.snr_linear(),
            sector,
        },
        sector_samples: sweep.sector_samples.unwrap_or(DEFAULT_SECTOR_SAMPLES),
        seed: cfg.seed(seed),
    };
    let result = ttd_core::linksim::run_sweep(&spec).map_err(|e| match e {
        ttd_core::Error::Precondition(msg) => CmdError::Infeasible(msg),
        other => CmdError::Input(anyhow!("sweep: {other}")),
    })?;
    let path = dir.join("sweep.csv");
    let mut csv = CsvWriter::create(
        &path,
        "variable,value,method,spectral_efficiency_bps_hz,sectors_averaged,sectors_skipped",
    )?;
    for (vi, &value) in result.values.iter().enumerate() {
        for (mi, method) in result.methods.iter().enumerate() {
            csv.row(format_args!(
                "{},{value},{method},{},{},{}",
                result.variable.label(),
                result.se[mi][vi],
                result.sectors_averaged[vi],
                result.sectors_skipped[vi],
            ))?;
        }
    }
    csv.finish()?;
    println!("sweep: wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    status: &'static str,
    measured: Option<f64>,
    tolerance: Option<f64>,
    detail: String,
}

impl Check {
    fn pass(name: &'static str, measured: f64, tolerance: f64, detail: String) -> Self {
        Check {
            name,
            status: "pass",
            measured: Some(measured),
            tolerance: Some(tolerance),
            detail,
        }
    }
    fn fail(name: &'static str, measured: f64, tolerance: f64, detail: String) -> Self {
        Check {
            name,
            status: "fail",
            measured: Some(measured),
            tolerance: Some(tolerance),
            detail,
        }
    }
    fn skipped(name: &'static str, reason: String) -> Self {
        Check {
            name,
            status: "skipped",
            measured: None,
            tolerance: None,
            detail: reason,
        }
    }
    fn gated(name: &'static str, measured: f64, tolerance: f64, detail: String) -> Self {
        if measured <= tolerance {
            Check::pass(name, measured, tolerance, detail)
        } else {
            Check::fail(name, measured, tolerance, detail)
        }
    }
}

pub fn cmd_validate(
    config: &Path,
    codebook: &Path,
    out: Option<&Path>,
    angles: Option<usize>,
) -> CmdResult {
    let cfg = RunConfig::load(config)?;
    let (file, profile) = load_codebook(codebook)?;
    check_array_match(&cfg, &file)?;
    let dir = out_dir(&cfg, out)?;
    let grid = cfg.ofdm_grid()?;
    let array = cfg.array_config()?;
    let params = file.params();
    let mut checks: Vec<Check> = Vec::new();

    // 0. The stored vectors must reproduce from the stored parameters.
    let rebuilt = match params.formulation {
        Formulation::UniformInteger => build_uniform(&params, file.n_t),
        Formulation::Modulo => build_modulo(&params, file.n_t),
    };
    match rebuilt {
        Ok(p) => {
            let scale = params.dtau_step.abs().max(params.dtau_jump.abs()).max(1e-15);
            let mut worst: f64 = 0.0;
            for n in 0..file.n_t {
                worst = worst.max((p.delays()[n] - profile.delays()[n]).abs() / scale);
                worst = worst.max((p.phases()[n] - profile.phases()[n]).abs());
            }
            checks.push(Check::gated(
                "profile_matches_params",
                worst,
                1e-9,
                "stored delay/phase vectors vs rebuilt from the five generators".into(),
            ));
        }
        Err(e) => checks.push(Check::fail(
            "profile_matches_params",
            f64::INFINITY,
            1e-9,
            format!("cannot rebuild profile: {e}"),
        )),
    }

    // 1. Factorization identity (uniform integer-D profiles only).
    let d_int = params.d.fract() == 0.0 && file.n_t % (params.d as usize) == 0;
    if params.formulation == Formulation::UniformInteger && d_int {
        let view = SubArrayView::from_params(&params, file.n_t).expect("checked integer D");
        let mut worst: f64 = 0.0;
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..2000 {
            let s = -1.0 + 2.0 * next();
            let m = 1 + (next() * (grid.m_tot() - 1) as f64) as usize;
            let f = grid.subcarrier_frequency(m).expect("in range");
            let direct = gain_at(&profile, &array, &grid, s, f).expect("gain");
            let fact = factorized_gain_at(&view, &grid, s, f);
            let err = ((direct - fact).abs() / direct.max(1e-12)).min((direct - fact).abs());
            worst = worst.max(err);
        }
        checks.push(Check::gated(
            "factorization_identity",
            worst,
            1e-9,
            "direct |w^H a|^2 vs (1/D) * subarray_gain * filter_response at 2000 points".into(),
        ));
    } else {
        checks.push(Check::skipped(
            "factorization_identity",
            format!(
                "sub-array factorization applies to uniform integer-D codebooks; \
                 this file has D = {} ({:?})",
                params.d, params.formulation
            ),
        ));
    }

    // 2. Separation law of the grating-lobe ladder.
    {
        let n_sub = ((file.n_t as f64) / params.d).round().max(1.0) as usize;
        let view = SubArrayView::new(
            params.d,
            params.dtau_jump,
            params.dphi_jump,
            params.dtau_step,
            params.dphi_step,
            n_sub,
        )
        .map_err(|e| anyhow!("validate: {e}"))?;
        let mut worst: f64 = 0.0;
        let mut enough = true;
        for m in [1usize, grid.m_tot() / 2, grid.m_tot()] {
            let f = grid.subcarrier_frequency(m).expect("in range");
            let centres = beam_centres_at(&view, &grid, f);
            let expected = 2.0 * grid.f_c() / (params.d * f);
            if centres.len() < 2 {
                enough = false;
                continue;
            }
            for w in centres.windows(2) {
                let diff = w[1] - w[0];
                // Ladder rungs are uniform; anything else is the wrap gap.
                if (diff - expected).abs() < 0.5 * expected {
                    worst = worst.max((diff - expected).abs());
                }
            }
        }
        if enough {
            checks.push(Check::gated(
                "separation_law",
                worst,
                1e-12,
                "adjacent beam centres spaced (2/D)(f_c/f_m) in sine".into(),
            ));
        } else {
            checks.push(Check::skipped(
                "separation_law",
                "fewer than two grating lobes visible".into(),
            ));
        }
    }

    // 3. Design hits its map (needs a design section).
    if cfg.design.is_some() {
        let result = run_design(&cfg)?;
        if !result.feasible {
            checks.push(Check::skipped(
                "design_hits_targets",
                format!(
                    "sector infeasible: ceil(D) = {} >= N_T = {}",
                    result.params.d.ceil() as usize,
                    result.spec.cfg.n_t()
                ),
            ));
        } else {
            let n = cfg.angle_count(angles);
            let cell = 2.0 / n as f64;
            let sines = angle_grid(n);
            let k = result.k_users();
            let mut anchor_worst: f64 = 0.0;
            let mut lobe_worst: f64 = 0.0;
            for q in 1..=k {
                let f_q = result.subband_centers[q - 1];
                let mut best = 0usize;
                let mut best_v = f64::NEG_INFINITY;
                for (j, &s) in sines.iter().enumerate() {
                    let v = gain_at(&profile, &array, &grid, s, f_q).expect("gain");
                    if v > best_v {
                        best_v = v;
                        best = j;
                    }
                }
                let am = sines[best];
                // Interior sub-bands: compare against the squint-exact lobe
                // position at f^(q); anchors (q = 1, K): against the targets.
                let lobe = {
                    let rung = (result.spec.theta_2.sin() - result.spec.theta_1.sin())
                        / (k - 1) as f64;
                    let fk = result.subband_centers[k - 1];
                    ttd_core::codebook::wrap_sin(
                        result.spec.theta_1.sin() + (q - 1) as f64 * rung * (fk / f_q),
                    )
                };
                lobe_worst = lobe_worst.max((am - lobe).abs());
                if q == 1 || q == k {
                    anchor_worst = anchor_worst.max((am - result.target_angles[q - 1].sin()).abs());
                }
            }
            checks.push(Check::gated(
                "design_hits_targets",
                anchor_worst.max(lobe_worst),
                cell + 1e-12,
                format!(
                    "gain argmax at each sub-band centre vs the closed-form map \
                     (anchor sub-bands vs targets: {anchor_worst:.3e})"
                ),
            ));
        }
    } else {
        checks.push(Check::skipped(
            "design_hits_targets",
            "config has no design section".into(),
        ));
    }

    #[derive(Serialize)]
    struct ValidationReport {
        all_pass: bool,
        checks: Vec<Check>,
    }
    let all_pass = checks.iter().all(|c| c.status != "fail");
    let report = ValidationReport { all_pass, checks };
    let path = dir.join("validation_report.json");
    write_json(&path, &report)?;
    for c in &report.checks {
        match (c.measured, c.tolerance) {
            (Some(m), Some(t)) => {
                println!("validate: {:<28} {:>7}  measured {m:.3e} vs tolerance {t:.3e}", c.name, c.status)
            }
            _ => println!("validate: {:<28} {:>7}  ({})", c.name, c.status, c.detail),
        }
    }
    println!("validate: wrote {}", path.display());
    if report.all_pass {
        Ok(())
    } else {
        Err(CmdError::Validation(format!(
            "validation failed: {} of {} checks failed; see {}",
            report.checks.iter().filter(|c| c.status == "fail").count(),
            report.checks.len(),
            path.display()
        )))
    }
}
