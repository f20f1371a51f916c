//! The generic path compiled at f32.

use vsys_core::detection::{closed_form, DetectorKind};
use vsys_core::{
    build_nonsecular_vectorized, solve_expm, solve_spectral, steady_state, SystemParams,
};

#[test]
fn f32_pipeline_tracks_f64() {
    let p64 = SystemParams::from_nbar(1.0f64, 12.0, 0.0633).unwrap();
    let p32 = SystemParams::from_nbar(1.0f32, 12.0, 0.0633).unwrap();
    let g64 = build_nonsecular_vectorized(&p64);
    let g32 = build_nonsecular_vectorized(&p32);
    for t in [0.5f32, 2.0, 7.0] {
        let a = solve_expm(&g32, t).unwrap();
        let b = solve_spectral(&g32, t).unwrap();
        let c = solve_expm(&g64, t as f64).unwrap();
        assert!((a.cast::<f64>().max_abs_diff(&c)) < 1e-6);
        assert!((b.cast::<f64>().max_abs_diff(&c)) < 1e-6);
    }
    let ss = steady_state(&g32).unwrap();
    let iz = closed_form(&ss, DetectorKind::FullSphere).unwrap();
    assert!(iz > 0.0 && iz.is_finite());
}
