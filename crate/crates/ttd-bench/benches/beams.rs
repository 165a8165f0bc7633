use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ttd_bench::{reference_array, reference_design, reference_grid};
use ttd_core::analysis::{extract_beam_map, factorized_gain_at, SubArrayView};
use ttd_core::codebook::{two_stage_design, Formulation, StaircaseParams};
use ttd_core::linksim::{spectral_efficiency, LinkConfig};
use ttd_core::wavefield::{gain_at, gain_grid, spread_subcarriers};
use ttd_core::DesignSpec;

fn bench_gain(c: &mut Criterion) {
    let grid = reference_grid();
    let array = reference_array();
    let design = reference_design();
    let profile = design.profile.as_ref().unwrap();

    c.bench_function("gain_point", |b| {
        b.iter(|| gain_at(profile, &array, &grid, black_box(0.37), black_box(60.1e9)).unwrap())
    });

    let params = StaircaseParams {
        d: 2.0,
        dtau_jump: 2.0 / grid.bw(),
        dphi_jump: 0.0,
        dtau_step: -0.6 / grid.bw(),
        dphi_step: 0.1 * std::f64::consts::PI,
        formulation: Formulation::UniformInteger,
    };
    let view = SubArrayView::from_params(&params, 32).unwrap();
    c.bench_function("factorized_gain_point", |b| {
        b.iter(|| factorized_gain_at(&view, &grid, black_box(0.37), black_box(60.1e9)))
    });

    let freqs = spread_subcarriers(grid.m_tot(), 64);
    c.bench_function("gain_grid_64x512_with_map", |b| {
        b.iter(|| {
            let gg = gain_grid(profile, &array, &grid, 512, &freqs).unwrap();
            extract_beam_map(black_box(&gg))
        })
    });
}

fn bench_design(c: &mut Criterion) {
    let spec = DesignSpec {
        k_users: 5,
        theta_1: (-30.0f64).to_radians(),
        theta_2: 40.0f64.to_radians(),
        grid: reference_grid(),
        cfg: reference_array(),
    };
    c.bench_function("two_stage_design_k5", |b| {
        b.iter(|| two_stage_design(black_box(&spec)).unwrap())
    });
}

fn bench_link(c: &mut Criterion) {
    let design = reference_design();
    let profile = design.profile.as_ref().unwrap();
    let link = LinkConfig {
        grid: reference_grid(),
        cfg: reference_array(),
        k_users: 5,
        snr_linear: 10.0,
        sector: ((-30.0f64).to_radians(), 40.0f64.to_radians()),
    };
    c.bench_function("spectral_efficiency_k5_4096sc", |b| {
        b.iter(|| spectral_efficiency(black_box(profile), &link).unwrap())
    });
}

criterion_group!(benches, bench_gain, bench_design, bench_link);
criterion_main!(benches);
