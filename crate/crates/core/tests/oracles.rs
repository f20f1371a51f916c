//! Reference values computed independently of the library's solvers.

use std::f64::consts::PI;

use vsys_core::detection::{difference_signals, DetectorSignal, SignalMethod};
use vsys_core::{
    beat_contrast, build_nonsecular_direct, build_nonsecular_vectorized, build_secular_vectorized,
    limit_large_delta, limit_small_delta, solve_expm, solve_rk_oracle, solve_spectral,
    steady_state, trajectory, uniform_times, Solver, SystemParamsF64,
};

/// Cramer's rule on a 4×4 system; shares no code with the LU path.
fn cramer(a: [[f64; 4]; 4], b: [f64; 4]) -> [f64; 4] {
    fn det3(m: [[f64; 3]; 3]) -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
    fn det4(m: [[f64; 4]; 4]) -> f64 {
        (0..4)
            .map(|j| {
                let minor: [[f64; 3]; 3] = std::array::from_fn(|r| {
                    let cols: Vec<usize> = (0..4).filter(|&c| c != j).collect();
                    std::array::from_fn(|c| m[r + 1][cols[c]])
                });
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][j] * det3(minor)
            })
            .sum()
    }
    let d = det4(a);
    std::array::from_fn(|k| {
        let mut m = a;
        for i in 0..4 {
            m[i][k] = b[i];
        }
        det4(m) / d
    })
}

#[test]
fn secular_steady_population_closed_form() {
    // With coherences decoupled: (γ+2r)x + r x = r.
    let (g, r) = (1.0, 0.0158);
    let p = SystemParamsF64::from_rates(g, r, 12.0).unwrap();
    let ss = steady_state(&build_secular_vectorized(&p)).unwrap();
    let x = r / (g + 3.0 * r);
    assert!((ss.rho_ee1 - x).abs() < 1e-15);
    assert!((x - 0.0150849).abs() < 1e-7);
    let late = solve_spectral(&build_secular_vectorized(&p), 80.0).unwrap();
    assert!((late.rho_ee1 - x).abs() < 1e-13);
}

#[test]
fn nonsecular_steady_state_matches_cramer() {
    for (delta, nbar) in [(12.0, 0.0633), (1.0, 0.0633), (0.012, 0.1), (5.0, 0.02)] {
        let p = SystemParamsF64::from_nbar(1.0, delta, nbar).unwrap();
        for g in [build_nonsecular_vectorized(&p), build_nonsecular_direct(&p)] {
            let ss = steady_state(&g).unwrap();
            let expect = cramer(g.a.0, [-g.d[0], -g.d[1], -g.d[2], -g.d[3]]);
            for (got, want) in ss.to_array().iter().zip(expect) {
                assert!(
                    (got - want).abs() < 1e-14,
                    "{:?}: {got} vs {want}",
                    g.variant
                );
            }
        }
    }
}

#[test]
fn fig2_stationary_coherence_near_r_over_delta() {
    let p = SystemParamsF64::from_rates(1.0, 0.0158, 12.0).unwrap();
    let ss = steady_state(&build_nonsecular_vectorized(&p)).unwrap();
    let expect = cramer(
        build_nonsecular_vectorized(&p).a.0,
        [-0.0158, -0.0158, -0.0158, 0.0],
    );
    assert!((ss.coh_im - expect[3]).abs() < 1e-15);
    // Sign follows the generators' rotating convention; magnitude is within
    // a few percent of the weak-pumping asymptote.
    assert!(ss.coh_im < 0.0);
    let ratio = ss.coh_im.abs() / (0.0158 / 12.0);
    assert!((ratio - 0.978).abs() < 1e-3, "{ratio}");
}

#[test]
fn direct_generator_at_zero_splitting() {
    // At Δ = 0 the direct equations are symmetric under 1 ↔ 2 and lock
    // Re ρ₁₂ to ρ_ee.
    let p = SystemParamsF64::from_rates(1.0, 0.1, 0.0).unwrap();
    let g = build_nonsecular_direct(&p);
    let ss = steady_state(&g).unwrap();
    assert!((ss.coh_re - ss.rho_ee1).abs() < 1e-15);
    assert_eq!(ss.coh_im, 0.0);
    for t in [0.5, 2.0, 9.0] {
        let s = solve_expm(&g, t).unwrap();
        assert!((s.coh_re - s.rho_ee1).abs() < 1e-12);
        assert!(s.coh_im.abs() < 1e-12);
    }
    // Contrast of that state is exactly 1/π.
    assert!((beat_contrast(&ss).unwrap() - 1.0 / PI).abs() < 1e-15);
}

#[test]
fn rk_oracle_at_fig2_point() {
    let p = SystemParamsF64::from_rates(1.0, 0.0158, 12.0).unwrap();
    let g = build_nonsecular_vectorized(&p);
    let times = uniform_times(5.0, 51).unwrap();
    let rk = solve_rk_oracle(&g, 5.0, 1e-12, &times).unwrap();
    let at5 = solve_spectral(&g, 5.0).unwrap();
    assert!(rk.states.last().unwrap().max_abs_diff(&at5) < 1e-8);
}

#[test]
fn large_delta_closed_form_literal_value() {
    let p = SystemParamsF64::from_rates(1.0, 0.0158, 12.0).unwrap();
    let sol = limit_large_delta(&p, 3.0);
    let expect = (0.0158 / 12.0) * (-3.0f64).exp() * 36.0f64.sin();
    assert!((sol.nonsecular.coh_re - expect).abs() < 1e-18);
    assert!((sol.secular.rho_ee1 - 0.0158 * (1.0 - (-3.0f64).exp())).abs() < 1e-18);
}

#[test]
fn small_delta_closed_form_is_first_order_in_pumping() {
    // The closed form drops O(r/γ) terms, so the error should halve with r.
    let rel = |r: f64| {
        let p = SystemParamsF64::from_rates(1.0, r, 1.9e-4 * r / 0.0158).unwrap();
        let exact = solve_expm(&build_nonsecular_direct(&p), 2.0).unwrap();
        let lim = limit_small_delta(&p, 2.0);
        assert!(lim.warning.is_none());
        (lim.nonsecular.coh_re - exact.coh_re).abs() / exact.coh_re
    };
    let e0 = rel(0.0158);
    assert!(e0 < 4.0 * 0.0158, "{e0}");
    let ratio = e0 / rel(0.0079);
    assert!((ratio - 2.0).abs() < 0.15, "{ratio}");
}

#[test]
fn difference_signals_recover_coherences() {
    for (delta, direct) in [(12.0, false), (0.0, true)] {
        let p = SystemParamsF64::from_nbar(1.0, delta, 0.0633).unwrap();
        let g = if direct {
            build_nonsecular_direct(&p)
        } else {
            build_nonsecular_vectorized(&p)
        };
        let times = uniform_times(30.0, 61).unwrap();
        let tr = trajectory(&g, &times, Solver::MatrixExp).unwrap();
        let sig = DetectorSignal::from_trajectory(&tr, SignalMethod::Quadrature).unwrap();
        let (re, im) = difference_signals(&sig).unwrap();
        for (k, s) in tr.states.iter().enumerate() {
            assert!((re[k] - 16.0 / 3.0 * s.coh_re).abs() < 1e-12);
            assert!((im[k] - 16.0 / 3.0 * s.coh_im).abs() < 1e-12);
            if direct {
                assert!((re[k] - 16.0 / 3.0 * s.rho_ee1).abs() < 1e-12);
                assert!(im[k].abs() < 1e-12);
            }
        }
        if !direct {
            let late = *im.last().unwrap();
            let target = 16.0 / 3.0 * p.r / p.delta;
            assert!((late.abs() / target - 1.0).abs() < 0.03);
        }
        assert!(sig.complementarity_error() < 1e-12);
    }

    let p = SystemParamsF64::from_nbar(1.0, 12.0, 0.0633).unwrap();
    let tr = trajectory(
        &build_secular_vectorized(&p),
        &uniform_times(10.0, 21).unwrap(),
        Solver::MatrixExp,
    )
    .unwrap();
    let sig = DetectorSignal::from_trajectory(&tr, SignalMethod::ClosedForm).unwrap();
    let (re, im) = difference_signals(&sig).unwrap();
    assert!(re.iter().chain(&im).all(|&x| x == 0.0));
}
