//! Randomised invariants over the physical parameter space.

use num_complex::Complex;
use proptest::prelude::*;
use vsys_core::detection::{
    closed_form, integrate_detector, intensity_kernel, DetectorGeometry, DetectorKind,
};
use vsys_core::physics::{basis_transform, basis_transform_inverse, pumping_rate, Mat2};
use vsys_core::solvers::{trajectory, trajectory_from, ExpmSolver, SpectralSolver};
use vsys_core::{
    build, build_nonsecular_vectorized, build_secular_direct, build_secular_vectorized, char_poly,
    Solver, StateVector, SystemParams, Variant,
};

fn physical_state() -> impl Strategy<Value = StateVector<f64>> {
    (
        0.0f64..0.5,
        0.0f64..0.5,
        0.0f64..1.0,
        0.0f64..std::f64::consts::TAU,
    )
        .prop_map(|(a, b, frac, angle)| {
            let mag = frac * (a * b).sqrt();
            StateVector::new(a, b, mag * angle.cos(), mag * angle.sin())
        })
}

fn hermitian() -> impl Strategy<Value = Mat2<f64>> {
    (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0).prop_map(|(a, d, re, im)| {
        [
            [Complex::new(a, 0.0), Complex::new(re, im)],
            [Complex::new(re, -im), Complex::new(d, 0.0)],
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pumping_rate_is_quarter_gamma_nbar(gamma in 1e-3f64..1e9, nbar in 0.0f64..10.0) {
        let r = pumping_rate(gamma, nbar).unwrap();
        prop_assert_eq!(r, gamma * nbar / 4.0);
        let p = SystemParams::from_nbar(gamma, 0.0, nbar).unwrap();
        prop_assert!(p.validate().is_ok());
    }

    #[test]
    fn basis_change_round_trips(m in hermitian()) {
        let back = basis_transform_inverse(&basis_transform(&m).unwrap()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((back[i][j] - m[i][j]).norm() < 1e-13);
            }
        }
        // Trace and determinant are basis invariants.
        let c = basis_transform(&m).unwrap();
        let tr = |x: &Mat2<f64>| x[0][0] + x[1][1];
        let det = |x: &Mat2<f64>| x[0][0] * x[1][1] - x[0][1] * x[1][0];
        prop_assert!((tr(&c) - tr(&m)).norm() < 1e-13);
        prop_assert!((det(&c) - det(&m)).norm() < 1e-12);
    }

    #[test]
    fn raising_gamma_shifts_every_root(
        r in 0.0f64..0.3, delta in 0.5f64..15.0, shift in 0.01f64..2.0,
    ) {
        // γ enters A only through −γI.
        let p0 = SystemParams::from_rates(1.0, r, delta).unwrap();
        let p1 = SystemParams::from_rates(1.0 + shift, r, delta).unwrap();
        for make in [build_nonsecular_vectorized::<f64>, build_secular_vectorized::<f64>] {
            let mut e0 = make(&p0).eigenvalues();
            let mut e1: Vec<_> = make(&p1).eigenvalues().iter().map(|z| z + shift).collect();
            vsys_core::eigen::sort_complex(&mut e0);
            vsys_core::eigen::sort_complex(&mut e1);
            let scale = 1.0 + r + delta;
            prop_assert!(vsys_core::eigen::multisets_match(&e0, &e1, 1e-4 * scale, 1e-9 * scale));
            let c0 = char_poly(&make(&p0));
            for z in &e1 {
                prop_assert!(c0.eval_complex(*z).norm() < 1e-9 * scale.powi(4));
            }
        }
    }

    #[test]
    fn kernel_is_nonnegative_for_physical_states(
        s in physical_state(), theta in 0.0f64..std::f64::consts::PI, phi in 0.0f64..std::f64::consts::TAU,
    ) {
        prop_assert!(s.is_physical());
        prop_assert!(intensity_kernel(&s, theta, phi).unwrap() >= -1e-12);
    }

    #[test]
    fn wedges_complement_each_other(s in physical_state()) {
        let q = |k| integrate_detector(&s, &DetectorGeometry::named(k).unwrap()).unwrap();
        let iz = q(DetectorKind::FullSphere);
        let tol = 1e-9 * iz.max(1e-300);
        prop_assert!((q(DetectorKind::WedgeA) + q(DetectorKind::WedgeAPrime) - iz).abs() <= tol);
        prop_assert!((q(DetectorKind::WedgeB) + q(DetectorKind::WedgeBPrime) - iz).abs() <= tol);
        let cf = closed_form(&s, DetectorKind::FullSphere).unwrap();
        prop_assert!((iz - cf).abs() <= tol);
    }

    #[test]
    fn secular_dynamics_never_create_coherence(
        a in 0.0f64..0.5, b in 0.0f64..0.5, nbar in 0.0f64..0.2, delta in 0.0f64..15.0, t in 0.0f64..30.0,
    ) {
        let p = SystemParams::from_nbar(1.0, delta, nbar).unwrap();
        let start = StateVector::new(a, b, 0.0, 0.0);
        for g in [build_secular_vectorized(&p), build_secular_direct(&p)] {
            let s = ExpmSolver::new(&g).unwrap().at_from(&start, t);
            prop_assert_eq!((s.coh_re, s.coh_im), (0.0, 0.0));
        }
    }

    #[test]
    fn spectral_and_expm_agree_from_any_start(
        s in physical_state(), nbar in 0.0f64..0.2, delta in 0.2f64..15.0, t in 0.0f64..20.0,
    ) {
        let p = SystemParams::from_nbar(1.0, delta, nbar).unwrap();
        let g = build_nonsecular_vectorized(&p);
        let a = SpectralSolver::new(&g).unwrap().at_from(&s, t);
        let b = ExpmSolver::new(&g).unwrap().at_from(&s, t);
        prop_assert!(a.max_abs_diff(&b) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn completely_positive_variants_stay_physical(
        nbar in 0.0f64..0.2,
        delta in 0.0f64..15.0,
        pick in 0usize..3,
    ) {
        let variant = [Variant::NonSecularDirect, Variant::SecularVectorized, Variant::SecularDirect][pick];
        let p = SystemParams::from_nbar(1.0, delta, nbar).unwrap();
        let g = build(variant, &p, 0.0).unwrap();
        let times = vsys_core::uniform_times(20.0, 101).unwrap();
        let tr = trajectory(&g, &times, Solver::MatrixExp).unwrap();
        prop_assert!(tr.min_density_eigenvalue() >= -1e-10);
        prop_assert!(tr.validate().is_ok());
    }

    #[test]
    fn direct_form_conserves_probability_under_rk(
        nbar in 0.0f64..0.2, delta in 0.0f64..15.0,
    ) {
        let p = SystemParams::from_nbar(1.0, delta, nbar).unwrap();
        let g = build(Variant::NonSecularDirect, &p, 0.0).unwrap();
        let times = vsys_core::uniform_times(10.0, 11).unwrap();
        let start = StateVector::new(0.1, 0.05, 0.02, 0.01);
        let tr = trajectory_from(&g, &start, &times, Solver::AdaptiveRK).unwrap();
        for s in &tr.states {
            prop_assert!((s.rho_gg() + s.rho_ee1 + s.rho_ee2 - 1.0).abs() < 1e-12);
        }
    }
}
