//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured numbers.
//!
//! Criteria 4 and 5 are asserted exactly as written and are expected to
//! fail: they treat two textbook approximations as exact. The 3 dB width rule
//! `2*0.886/D` is the large-D sinc limit of the Dirichlet kernel (the exact
//! D = 2 width is 1.0, 12.9% wider), and the sub-band-to-angle map carries a
//! per-sub-band beam-squint offset `(q-1)/(K-1) * |dsin| * (f^(K)/f^(q) - 1)`
//! at interior sub-bands that no single grating factor can cancel. The
//! companion `supplement_*` tests pin the implementation against the exact
//! closed forms instead and pass; see the crate README for the full story.

use std::time::Instant;

use rayon::prelude::*;
use ttd_core::analysis::{
    beam_centres_at, factorized_gain_at, filter_centre_at, filter_response, subarray_gain,
    SubArrayView,
};
use ttd_core::codebook::{
    build_modulo, build_uniform, rotate_mapping, squint_factor, two_stage_design, wrap_sin,
    Formulation, StaircaseParams,
};
use ttd_core::linksim::{feasible_sector_sample, run_sweep, LinkConfig, SweepSpec, SweepVariable};
use ttd_core::wavefield::{angle_grid, array_response, gain_at, precoder};
use ttd_core::{ArrayConfig, DelayPhaseProfile, DesignSpec, OfdmGrid};

const FC: f64 = 60e9;
const BW: f64 = 2e9;
const MTOT: usize = 4096;
const NT: usize = 32;

fn grid() -> OfdmGrid {
    OfdmGrid::new(FC, BW, MTOT).unwrap()
}

fn cfg() -> ArrayConfig {
    ArrayConfig::half_wavelength(NT).unwrap()
}

/// Deterministic xorshift for reproducible sampling.
struct Rng(u64);
impl Rng {
    fn next_f64(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

fn report(id: &str, pass: bool, detail: &str) {
    println!(
        "criterion {id}: {} -- {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_1_factorization_identity() {
    let start = Instant::now();
    let g = grid();
    let c = cfg();
    let mut rng = Rng(0x1234_5678_9abc_def1);
    let mut worst_rel = 0.0f64;
    let mut worst_abs = 0.0f64;
    for cb in 0..200 {
        let d = [2.0, 4.0, 8.0][cb % 3];
        let params = StaircaseParams {
            d,
            dtau_jump: rng.uniform(-2.0 / BW, 2.0 / BW),
            dphi_jump: rng.uniform(0.0, std::f64::consts::TAU),
            dtau_step: rng.uniform(-1.0 / BW, 1.0 / BW),
            dphi_step: rng.uniform(0.0, std::f64::consts::TAU),
            formulation: Formulation::UniformInteger,
        };
        let profile = build_uniform(&params, NT).unwrap();
        let view = SubArrayView::from_params(&params, NT).unwrap();
        for _ in 0..10_000 {
            let s = rng.uniform(-1.0, 1.0);
            let m = 1 + (rng.next_f64() * (MTOT - 1) as f64) as usize;
            let f = g.subcarrier_frequency(m).unwrap();
            let direct = gain_at(&profile, &c, &g, s, f).unwrap();
            let fact = factorized_gain_at(&view, &g, s, f);
            let abs = (direct - fact).abs();
            let rel = abs / direct.max(1e-12);
            if abs >= 1e-9 {
                worst_rel = worst_rel.max(rel);
            }
            worst_abs = worst_abs.max(abs);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    // Gate: per-point relative error below 1e-9 wherever the absolute
    // difference is above 1e-9 (3.2e-11 of the N_T gain scale); at deep
    // pattern nulls the relative quotient is pure double-precision noise.
    let pass = worst_rel < 1e-9 && elapsed < 30.0;
    report(
        "1 (factorization identity)",
        pass,
        &format!(
            "200 codebooks x 10^4 points: worst |direct-factorized| = {worst_abs:.3e} \
             (vs gain scale N_T = 32), worst guarded relative = {worst_rel:.3e}, \
             runtime {elapsed:.1} s < 30 s"
        ),
    );
    assert!(pass, "factorization identity violated or over budget");
}

#[test]
fn criterion_2_beam_centre_law() {
    let start = Instant::now();
    let g = grid();
    let mut rng = Rng(0x0bad_cafe_d00d_feed);
    let sines = angle_grid(4096);
    let cell = 2.0 / 4096.0;
    let mut worst_argmax = 0.0f64;
    let mut worst_sep = 0.0f64;
    for v in 0..100 {
        let d = if v % 2 == 0 {
            [2.0, 3.0, 4.0, 5.0, 8.0][v % 5]
        } else {
            rng.uniform(1.5, 8.0)
        };
        let view = SubArrayView::new(
            d,
            rng.uniform(-2.0 / BW, 2.0 / BW),
            rng.uniform(0.0, std::f64::consts::TAU),
            0.0,
            0.0,
            4 + (rng.next_f64() * 12.0) as usize,
        )
        .unwrap();
        for fi in 0..8 {
            let m = 1 + fi * (MTOT - 1) / 7;
            let f = g.subcarrier_frequency(m).unwrap();
            let centres = beam_centres_at(&view, &g, f);
            assert!(!centres.is_empty());
            // Numerical argmax of the closed-form sub-array gain.
            let mut best = 0usize;
            let mut best_v = f64::NEG_INFINITY;
            for (j, &s) in sines.iter().enumerate() {
                let val = subarray_gain(&view, &g, s, f);
                if val > best_v {
                    best_v = val;
                    best = j;
                }
            }
            let nearest = centres
                .iter()
                .map(|&cc| (cc - sines[best]).abs())
                .fold(f64::INFINITY, f64::min);
            worst_argmax = worst_argmax.max(nearest);
            // Separation law between adjacent ladder rungs.
            let expected = 2.0 / view.d * (g.f_c() / f);
            for w in centres.windows(2) {
                worst_sep = worst_sep.max((w[1] - w[0] - expected).abs());
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst_argmax <= cell && worst_sep < 1e-12 && elapsed < 60.0;
    report(
        "2 (beam-centre law)",
        pass,
        &format!(
            "100 views x 8 freqs on a 4096 grid: worst argmax-to-ladder distance \
             {worst_argmax:.2e} (cell {cell:.2e}), worst separation error {worst_sep:.2e}, \
             runtime {elapsed:.1} s < 60 s"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_3_directional_lobe_anchor() {
    // Fig.-3(a) configuration: D = 3, theta_o = pi/6, sub-array of
    // N_T/D = 10 elements at stride 3. The anchored spectral copy must stay
    // at theta_o across the whole 2 GHz band within one grid cell.
    let g = grid();
    let c30 = ArrayConfig::half_wavelength(30).unwrap();
    let d = 3usize;
    let s_o = (std::f64::consts::PI / 6.0).sin();
    let dtau_jump = -(d as f64) * s_o / (2.0 * FC);
    let delays: Vec<f64> = (0..10).map(|i| i as f64 * dtau_jump).collect();
    let profile = DelayPhaseProfile::new(delays, vec![0.0; 10]).unwrap();
    let sines = angle_grid(2048);
    let cell = 2.0 / 2048.0;
    let window = 1.0 / d as f64;
    let mut worst = 0.0f64;
    for m in (1..=MTOT).step_by(8).chain([MTOT]) {
        let f = g.subcarrier_frequency(m).unwrap();
        let w = precoder(&profile, f);
        let mut best_s = f64::NAN;
        let mut best_v = f64::NEG_INFINITY;
        for &s in sines.iter().filter(|&&s| (s - s_o).abs() <= window) {
            let a = array_response(&c30, &g, s, f, d).unwrap();
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (wi, ai) in w.iter().zip(a.iter()) {
                let p = wi.conj() * ai;
                re += p.re;
                im += p.im;
            }
            let v = re * re + im * im;
            if v > best_v {
                best_v = v;
                best_s = s;
            }
        }
        worst = worst.max((best_s - s_o).abs());
    }
    let pass = worst <= cell;
    report(
        "3 (directional-lobe anchor)",
        pass,
        &format!(
            "anchored branch stays at sin(theta)=0.5 across the band: worst deviation \
             {worst:.3e} vs one cell {cell:.3e}"
        ),
    );
    assert!(pass);
}

/// Shared width-measurement harness for criterion 4 and its supplement:
/// measured half-power widths on the given grid next to the exact
/// closed-form widths (bisection oracle on the Dirichlet kernel).
fn measure_widths(n_angles: usize) -> Vec<(f64, f64, f64)> {
    let g = grid();
    let f = g.subcarrier_frequency(MTOT / 2).unwrap();
    let sines = angle_grid(n_angles);
    let mut out = Vec::new();
    for d in [2.0f64, 3.0, 5.0] {
        // Exact half-power psi width by bisection (independent of the
        // filter_response implementation path: raw sin ratio).
        let target = d * d / 2.0;
        let kernel = |psi: f64| {
            let den = (std::f64::consts::PI / 2.0 * psi).sin();
            let num = (d * std::f64::consts::PI / 2.0 * psi).sin();
            (num / den).powi(2)
        };
        let (mut lo, mut hi) = (1e-12, 2.0 / d);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if kernel(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let exact_sin_width = (lo + hi) * g.f_c() / f;

        let view = SubArrayView::new(d, 0.0, 0.0, 0.0, 0.0, 8).unwrap();
        let centre = filter_centre_at(&view, &g, f);
        let above: Vec<f64> = sines
            .iter()
            .copied()
            .filter(|&s| (s - centre).abs() < 0.8 && filter_response(&view, &g, s, f) >= target)
            .collect();
        let measured = above.last().unwrap() - above.first().unwrap();
        out.push((d, measured, exact_sin_width));
    }
    out
}

#[test]
fn criterion_4_filter_width_textbook_formula() {
    // Literal criterion: measured width equals 2*0.886/D within 2 grid
    // cells. The 0.886 constant is the sinc-limit approximation, so this is
    // expected to FAIL (exact widths: 1.0000, 0.6211, 0.3606); the
    // supplement below gates the measurement against the exact widths.
    let n = 2048usize;
    let cell = 2.0 / n as f64;
    let mut pass = true;
    let mut lines = Vec::new();
    for (d, measured, exact) in measure_widths(n) {
        let formula = 2.0 * 0.886 / d;
        let dev_cells = (measured - formula).abs() / cell;
        if dev_cells > 2.0 {
            pass = false;
        }
        lines.push(format!(
            "D={d}: measured {measured:.5}, formula {formula:.5} (off by {dev_cells:.0} cells), \
             exact closed form {exact:.5}"
        ));
    }
    report("4 (3 dB filter width, 2*0.886/D)", pass, &lines.join("; "));
    assert!(
        pass,
        "expected failure: 2*0.886/D is the large-D sinc limit, not the exact \
         Dirichlet half-power width (see supplement_4 and the README)"
    );
}

#[test]
fn supplement_4_filter_width_exact() {
    let n = 4096usize;
    let cell = 2.0 / n as f64;
    let mut worst_cells = 0.0f64;
    for (_, measured, exact) in measure_widths(n) {
        worst_cells = worst_cells.max((measured - exact).abs() / cell);
    }
    let pass = worst_cells <= 2.0;
    report(
        "4-supplement (filter width vs exact Dirichlet half-power width)",
        pass,
        &format!("D in {{2,3,5}}: worst deviation {worst_cells:.2} cells on a 4096 grid"),
    );
    assert!(pass);
}

/// Argmax of the full profile gain over a sine grid at frequency `f`.
fn full_argmax(profile: &DelayPhaseProfile, c: &ArrayConfig, g: &OfdmGrid, sines: &[f64], f: f64) -> f64 {
    let mut best = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for (j, &s) in sines.iter().enumerate() {
        let v = gain_at(profile, c, g, s, f).unwrap();
        if v > best_v {
            best_v = v;
            best = j;
        }
    }
    sines[best]
}

/// Per-(K, sector) design measurements shared by criterion 5 and its
/// supplement.
struct DesignCase {
    k: usize,
    /// max over q of |argmax - target| in sine units (two-stage).
    two_stage_target_dev: f64,
    /// max over q of |argmax - predicted lobe @ f^(q)| (two-stage).
    two_stage_lobe_dev: f64,
    /// max over anchors q in {1, K} of |argmax - target| (two-stage).
    anchor_dev: f64,
    /// max over q of |argmax - target| (integer design).
    integer_target_dev: f64,
    /// max over q of the distance from the integer-design argmax to the
    /// nearest integer-ladder lobe (the filter sits off-centre, so the
    /// product peak is pulled slightly off the lobe).
    integer_lobe_dev: f64,
    /// closed-form max over q of the distance from the target to the
    /// nearest integer-ladder lobe: the irreducible cost of rounding D.
    integer_cf_target_dev: f64,
    /// rounded grating factor of the integer design.
    integer_d: usize,
    /// closed-form squint residual bound for this sector (two-stage).
    squint_bound: f64,
}

fn design_cases(seed: u64) -> Vec<DesignCase> {
    let g = grid();
    let c = cfg();
    let sines = angle_grid(2048);
    let mut cases = Vec::new();
    for k in [2usize, 3, 5] {
        let sample = feasible_sector_sample(k, &g, &c, 64, seed).unwrap();
        assert_eq!(sample.pairs.len(), 64);
        let per: Vec<DesignCase> = sample
            .pairs
            .par_iter()
            .map(|&(th1, th2)| {
                let spec = DesignSpec {
                    k_users: k,
                    theta_1: th1,
                    theta_2: th2,
                    grid: g,
                    cfg: c,
                };
                let two = two_stage_design(&spec).unwrap();
                let int = ttd_core::codebook::integer_design(&spec).unwrap();
                let two_profile = two.profile.as_ref().unwrap();
                let int_profile = int.profile.as_ref().unwrap();
                let s1 = th1.sin();
                let s2 = th2.sin();
                let f_k = two.subband_centers[k - 1];
                let int_view = SubArrayView::new(
                    int.params.d,
                    int.params.dtau_jump,
                    int.params.dphi_jump,
                    int.params.dtau_step,
                    int.params.dphi_step,
                    (NT as f64 / int.params.d).round().max(1.0) as usize,
                )
                .unwrap();
                let mut tgt_dev = 0.0f64;
                let mut lobe_dev = 0.0f64;
                let mut anchor_dev = 0.0f64;
                let mut int_dev = 0.0f64;
                let mut int_lobe_dev = 0.0f64;
                let mut int_cf_dev = 0.0f64;
                let mut squint = 0.0f64;
                for q in 1..=k {
                    let f_q = two.subband_centers[q - 1];
                    let target = s1 + (q - 1) as f64 * (s2 - s1) / (k - 1) as f64;
                    let lobe = wrap_sin(s1 + (q - 1) as f64 * (s2 - s1) / (k - 1) as f64 * (f_k / f_q));
                    let am = full_argmax(two_profile, &c, &g, &sines, f_q);
                    tgt_dev = tgt_dev.max((am - target).abs());
                    lobe_dev = lobe_dev.max((am - lobe).abs());
                    if q == 1 || q == k {
                        anchor_dev = anchor_dev.max((am - target).abs());
                    }
                    squint = squint.max((lobe - target).abs());
                    // Integer design: distances to the integer-D ladder.
                    let ladder = beam_centres_at(&int_view, &g, f_q);
                    let am_int = full_argmax(int_profile, &c, &g, &sines, f_q);
                    let to_nearest = |x: f64| {
                        ladder
                            .iter()
                            .map(|&l| (l - x).abs())
                            .fold(f64::INFINITY, f64::min)
                    };
                    int_dev = int_dev.max((am_int - target).abs());
                    int_lobe_dev = int_lobe_dev.max(to_nearest(am_int));
                    int_cf_dev = int_cf_dev.max(to_nearest(target));
                }
                DesignCase {
                    k,
                    two_stage_target_dev: tgt_dev,
                    two_stage_lobe_dev: lobe_dev,
                    anchor_dev,
                    integer_target_dev: int_dev,
                    integer_lobe_dev: int_lobe_dev,
                    integer_cf_target_dev: int_cf_dev,
                    integer_d: int.params.d as usize,
                    squint_bound: squint,
                }
            })
            .collect();
        cases.extend(per);
    }
    cases
}

#[test]
fn criterion_5_design_correctness_table_i() {
    // Literal criterion on the default 2048-point angle grid: two-stage
    // argmax within one cell of the Eq.-of-targets angles for 100% of
    // sectors, and the integer variant off by >= 1 cell for some q. The
    // first clause is expected to FAIL for K in {3,5}: interior sub-bands
    // carry an irreducible squint offset (q-1)/(K-1)*|dsin|*(f^(K)/f^(q)-1),
    // up to ~0.017 in sine here, 17x one cell. See supplement_5.
    let start = Instant::now();
    let cell = 2.0 / 2048.0;
    let cases = design_cases(0);
    let mut lines = Vec::new();
    let mut pass = true;
    for k in [2usize, 3, 5] {
        let of_k: Vec<&DesignCase> = cases.iter().filter(|c| c.k == k).collect();
        let hit = of_k.iter().filter(|c| c.two_stage_target_dev <= cell).count();
        let worst = of_k
            .iter()
            .map(|c| c.two_stage_target_dev)
            .fold(0.0f64, f64::max);
        let int_ok = of_k.iter().filter(|c| c.integer_target_dev >= cell).count();
        let squint = of_k.iter().map(|c| c.squint_bound).fold(0.0f64, f64::max);
        if hit != of_k.len() || int_ok != of_k.len() {
            pass = false;
        }
        lines.push(format!(
            "K={k}: two-stage within one cell {hit}/64 (worst {:.1} cells, closed-form \
             squint bound {:.1} cells), integer >= 1 cell {int_ok}/64",
            worst / cell,
            squint / cell
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    lines.push(format!("runtime {elapsed:.1} s < 300 s"));
    let pass = pass && elapsed < 300.0;
    report("5 (design correctness, Table I literal)", pass, &lines.join("; "));
    assert!(
        pass,
        "expected failure at K in {{3,5}}: interior sub-bands sit on squinted \
         grating lobes, not on the zero-squint targets (see supplement_5 and README)"
    );
}

#[test]
fn supplement_5_design_correctness_squint_exact() {
    // The attainable form of criterion 5:
    //  - the two-stage argmax lands on the closed-form (squint-exact) lobe
    //    ladder at every sub-band centre, 100% of sectors;
    //  - anchor sub-bands (q = 1 and q = K, hence all of K = 2) hit the
    //    targets to one cell;
    //  - the integer-D argmax stays on the main lobe of its own ladder
    //    (within the 2/N_T first-null radius; the off-centre filter pulls
    //    the product peak slightly off the lobe centre);
    //  - the integer design misses the targets by >= 1 cell in every sector
    //    where no integer-ladder lobe comes within 2 cells of some target
    //    AND the sub-arrays keep at least 2 elements (D <= N_T/2). This is
    //    the Fig.-5 dichotomy on its domain of validity: for near-integer D
    //    the rounding cost vanishes, and for D close to N_T the sub-array
    //    pattern degenerates to a bare spatial filter that tracks the
    //    targets regardless, so "whenever D is non-integer" cannot be
    //    tested unscoped.
    let start = Instant::now();
    let cell = 2.0 / 2048.0;
    let main_lobe = 2.0 / NT as f64;
    let cases = design_cases(0);
    let mut lines = Vec::new();
    let mut pass = true;
    for k in [2usize, 3, 5] {
        let of_k: Vec<&DesignCase> = cases.iter().filter(|c| c.k == k).collect();
        let lobe_ok = of_k
            .iter()
            .filter(|c| c.two_stage_lobe_dev <= cell + 1e-12)
            .count();
        let anchor_ok = of_k.iter().filter(|c| c.anchor_dev <= cell).count();
        let int_lobe_ok = of_k
            .iter()
            .filter(|c| c.integer_lobe_dev <= main_lobe)
            .count();
        let predicted_miss: Vec<&&DesignCase> = of_k
            .iter()
            .filter(|c| c.integer_cf_target_dev >= 2.0 * cell && c.integer_d <= NT / 2)
            .collect();
        let dichotomy_ok = predicted_miss
            .iter()
            .filter(|c| c.integer_target_dev >= cell)
            .count();
        let worst_lobe = of_k
            .iter()
            .map(|c| c.two_stage_lobe_dev)
            .fold(0.0f64, f64::max);
        if lobe_ok != of_k.len()
            || anchor_ok != of_k.len()
            || int_lobe_ok != of_k.len()
            || dichotomy_ok != predicted_miss.len()
        {
            pass = false;
        }
        lines.push(format!(
            "K={k}: two-stage on-ladder {lobe_ok}/64 (worst {:.2} cells), anchors \
             {anchor_ok}/64, integer on-main-lobe {int_lobe_ok}/64, dichotomy \
             {dichotomy_ok}/{} (sectors with predicted miss >= 2 cells)",
            worst_lobe / cell,
            predicted_miss.len()
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    lines.push(format!("runtime {elapsed:.1} s"));
    let pass = pass && elapsed < 300.0;
    report("5-supplement (design correctness, squint-exact)", pass, &lines.join("; "));
    assert!(pass);
}

#[test]
fn criterion_6_cyclic_rotation() {
    // Rotation scenario with the admissibility inequality satisfied and the
    // lobe ladder tiling the sine circle (D = K), on a narrow band so the
    // per-sub-band squint stays below one grid cell: rotating to each
    // i in 1..K cyclically permutes the per-sub-band peak assignment and
    // preserves the peak-angle multiset within one cell.
    let k = 3usize;
    let g = OfdmGrid::new(FC, 25e6, MTOT).unwrap();
    let c = cfg();
    let gamma = squint_factor(k, &g);
    let span = 2.0 * (k - 1) as f64 / (k as f64 * gamma);
    let spec = DesignSpec {
        k_users: k,
        theta_1: (-span / 2.0).asin(),
        theta_2: (span / 2.0).asin(),
        grid: g,
        cfg: c,
    };
    let r = two_stage_design(&spec).unwrap();
    let admissibility = r.gamma * span;
    let bound = 2.0 * (k - 1) as f64 / (k + 1) as f64;
    assert!(admissibility > bound, "scenario must be admissible");
    let sines = angle_grid(2048);
    let cell = 2.0 / 2048.0;
    let mut maps: Vec<Vec<f64>> = Vec::new();
    for i in 1..=k {
        let params = rotate_mapping(&r, i).unwrap();
        let profile = build_modulo(&params, NT).unwrap();
        maps.push(
            (1..=k)
                .map(|q| full_argmax(&profile, &c, &g, &sines, r.subband_centers[q - 1]))
                .collect(),
        );
    }
    let mut worst_shift = 0.0f64;
    let mut worst_multiset = 0.0f64;
    for i in 2..=k {
        for q in 0..k {
            let expect = maps[0][(q + i - 1) % k];
            worst_shift = worst_shift.max((maps[i - 1][q] - expect).abs());
        }
        let mut a = maps[i - 1].clone();
        let mut b = maps[0].clone();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (x, y) in a.iter().zip(b.iter()) {
            worst_multiset = worst_multiset.max((x - y).abs());
        }
    }
    let pass = worst_shift <= cell + 1e-12 && worst_multiset <= cell + 1e-12;
    report(
        "6 (cyclic rotation)",
        pass,
        &format!(
            "D = {:.3} = K ladder, admissibility {admissibility:.3} > {bound:.3}: \
             cyclic-shift deviation {worst_shift:.2e}, multiset deviation \
             {worst_multiset:.2e} (cell {cell:.2e})",
            r.params.d
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_7_ideal_bound() {
    let g = grid();
    let c = cfg();
    let link = LinkConfig {
        grid: g,
        cfg: c,
        k_users: 5,
        snr_linear: 10.0,
        sector: ((-30.0f64).to_radians(), 40.0f64.to_radians()),
    };
    let ideal = ttd_core::linksim::ideal_spectral_efficiency(&link);
    let exact = 321f64.log2();
    let mut pass = (ideal - exact).abs() < 1e-12 && (ideal - 8.326429487122303).abs() < 1e-9;

    // Dominance across sweeps of every variable.
    let mut worst_excess = f64::NEG_INFINITY;
    for (variable, values) in [
        (SweepVariable::Snr, vec![-10.0, 0.0, 10.0, 20.0]),
        (SweepVariable::K, vec![2.0, 3.0, 5.0]),
        (SweepVariable::NT, vec![16.0, 32.0, 64.0]),
        (SweepVariable::Bw, vec![0.5e9, 2e9]),
    ] {
        let sweep = SweepSpec {
            variable,
            values,
            fixed: link,
            sector_samples: 8,
            seed: 0,
        };
        let r = run_sweep(&sweep).unwrap();
        for vi in 0..r.values.len() {
            for mi in 1..r.methods.len() {
                worst_excess = worst_excess.max(r.se[mi][vi] - r.se[0][vi]);
            }
        }
    }
    pass = pass && worst_excess <= 1e-9;
    report(
        "7 (ideal bound)",
        pass,
        &format!(
            "ideal = log2(1 + SNR N_T) = {ideal:.12} (expected 8.326429487122303); \
             worst method-minus-bound over all sweeps = {worst_excess:.2e} <= 1e-9"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_8_k_trend() {
    let link = LinkConfig {
        grid: grid(),
        cfg: cfg(),
        k_users: 5,
        snr_linear: 10.0,
        sector: ((-30.0f64).to_radians(), 40.0f64.to_radians()),
    };
    let sweep = SweepSpec {
        variable: SweepVariable::K,
        values: vec![2.0, 5.0],
        fixed: link,
        sector_samples: 64,
        seed: 0,
    };
    let r = run_sweep(&sweep).unwrap();
    let ideal = ttd_core::linksim::ideal_spectral_efficiency(&link);
    let modulo_k2 = r.se[3][0];
    let modulo_k5 = r.se[3][1];
    let phased_k5 = r.se[1][1];
    let frac_k2 = modulo_k2 / ideal;
    let frac_k5 = modulo_k5 / ideal;
    let over_phased = modulo_k5 / phased_k5 - 1.0;
    let pass = frac_k5 > 0.60 && frac_k5 >= frac_k2 - 1e-9 && over_phased >= 0.25;
    report(
        "8 (K-trend)",
        pass,
        &format!(
            "staircase-modulo fraction of ideal: K=2 {:.1}%, K=5 {:.1}% (> 60% and \
             non-decreasing); K=5 exceeds the phased baseline by {:.0}% (>= 25%); \
             fixtures: modulo K=2 {modulo_k2:.6}, K=5 {modulo_k5:.6}, phased K=5 \
             {phased_k5:.6} bits/s/Hz",
            100.0 * frac_k2,
            100.0 * frac_k5,
            100.0 * over_phased
        ),
    );
    assert!(pass);
    // Regression fixtures (64-sector Halton sample, seed 0).
    assert!((modulo_k2 - 7.621581).abs() < 1e-5, "K=2 fixture drifted: {modulo_k2}");
    assert!((modulo_k5 - 7.885543).abs() < 1e-5, "K=5 fixture drifted: {modulo_k5}");
    assert!((phased_k5 - 2.599589).abs() < 1e-5, "phased fixture drifted: {phased_k5}");
}

#[test]
fn criterion_9_sweep_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    std::fs::write(
        &config,
        format!(
            r#"{{
  "grid": {{ "f_c_hz": 60e9, "bw_hz": 2e9, "m_tot": 4096 }},
  "array": {{ "n_t": 32 }},
  "design": {{ "k_users": 5, "theta1_deg": -30, "theta2_deg": 40 }},
  "link": {{ "snr_db": 10.0 }},
  "sweep": {{ "variable": "snr_db", "values": [0, 10], "sector_samples": 8 }},
  "output": {{ "dir": {:?} }},
  "seed": 17
}}"#,
            dir.path().join("out").to_str().unwrap()
        ),
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_ttd");
    let run = |out: &str| {
        let status = std::process::Command::new(bin)
            .args([
                "sweep",
                "--config",
                config.to_str().unwrap(),
                "--out",
                dir.path().join(out).to_str().unwrap(),
                "--seed",
                "17",
            ])
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(dir.path().join(out).join("sweep.csv")).unwrap()
    };
    let first = run("a");
    let second = run("b");
    let pass = first == second;
    report(
        "9 (sweep determinism)",
        pass,
        &format!(
            "two runs with seed 17 produced byte-identical sweep.csv ({} bytes)",
            first.len()
        ),
    );
    assert!(pass);
}
