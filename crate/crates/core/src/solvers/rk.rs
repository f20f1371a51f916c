//! Dormand–Prince 5(4) with local extrapolation. Steps are clipped so that
//! every requested sample time is hit exactly.

use super::{check_times, Solver, StateVector, Trajectory};
use crate::error::{domain, Error, Result};
use crate::generators::Generator;
use crate::linalg::Vec4;
use crate::scalar::Real;

pub const RK_TOL_MIN: f64 = 1e-13;
pub const RK_TOL_MAX: f64 = 1e-6;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B_HAT: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Stepper<'a, T> {
    gen: &'a Generator<T>,
    k1: Vec4<T>,
}

impl<'a, T: Real> Stepper<'a, T> {
    fn f(&self, y: &Vec4<T>) -> Vec4<T> {
        self.gen.rhs(y)
    }

    /// One trial step from `y` (with `k1 = f(y)` cached). Returns the
    /// fifth-order solution, its derivative, and the max-norm error estimate.
    fn trial(&self, y: &Vec4<T>, h: T) -> (Vec4<T>, Vec4<T>, T) {
        let l = |x: f64| T::lit(x);
        let k1 = self.k1;
        let k2 = self.f(&(*y + k1.scale(h * l(A21))));
        let k3 = self.f(&(*y + k1.scale(h * l(A31)) + k2.scale(h * l(A32))));
        let k4 = self.f(&(*y + k1.scale(h * l(A41)) + k2.scale(h * l(A42)) + k3.scale(h * l(A43))));
        let k5 = self.f(&(*y
            + k1.scale(h * l(A51))
            + k2.scale(h * l(A52))
            + k3.scale(h * l(A53))
            + k4.scale(h * l(A54))));
        let k6 = self.f(&(*y
            + k1.scale(h * l(A61))
            + k2.scale(h * l(A62))
            + k3.scale(h * l(A63))
            + k4.scale(h * l(A64))
            + k5.scale(h * l(A65))));
        let ks = [k1, k2, k3, k4, k5, k6];
        let mut y5 = *y;
        for (k, b) in ks.iter().zip(B) {
            y5 = y5 + k.scale(h * l(b));
        }
        let k7 = self.f(&y5);
        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut err = Vec4::zeros();
        for (i, k) in ks.iter().enumerate() {
            err = err + k.scale(h * l(B[i] - B_HAT[i]));
        }
        (y5, k7, err.norm_inf())
    }
}

/// Integrate from the ground state. `sample_times` must start at 0,
/// increase strictly and end no later than `t_end`.
pub fn solve_rk_oracle<T: Real>(
    gen: &Generator<T>,
    t_end: T,
    tol: T,
    sample_times: &[T],
) -> Result<Trajectory<T>> {
    solve_rk_oracle_from(gen, &StateVector::ground(), t_end, tol, sample_times)
}

pub fn solve_rk_oracle_from<T: Real>(
    gen: &Generator<T>,
    initial: &StateVector<T>,
    t_end: T,
    tol: T,
    sample_times: &[T],
) -> Result<Trajectory<T>> {
    if !(t_end > T::zero()) || !t_end.is_finite() {
        return domain("t_end must be positive and finite");
    }
    let tol_f = tol.to_f64_lossy();
    if !(RK_TOL_MIN..=RK_TOL_MAX).contains(&tol_f) {
        return domain(format!(
            "tolerance {tol_f:e} outside [{RK_TOL_MIN:e}, {RK_TOL_MAX:e}]"
        ));
    }
    check_times(sample_times)?;
    if *sample_times.last().unwrap() > t_end {
        return domain("sample time beyond t_end");
    }

    let scale = T::one().max(gen.a.norm1());
    let mut h = T::lit(0.01) / scale;
    let mut t = T::zero();
    let mut y = initial.to_vec4();
    let mut states = Vec::with_capacity(sample_times.len());
    states.push(*initial);
    let mut stepper = Stepper {
        gen,
        k1: gen.rhs(&y),
    };

    for &target in &sample_times[1..] {
        while t < target {
            let remaining = target - t;
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };
            let (y_new, k_new, err) = stepper.trial(&y, step);
            let floor = T::lit(1e-14) * T::one().max(t.abs());
            if err <= tol || step <= floor {
                if err > tol {
                    return Err(Error::StepUnderflow {
                        t: t.to_f64_lossy(),
                        h: step.to_f64_lossy(),
                        err: err.to_f64_lossy(),
                    });
                }
                t = if clipped { target } else { t + step };
                y = y_new;
                stepper.k1 = k_new;
            }
            let factor = if err == T::zero() {
                T::lit(5.0)
            } else {
                (T::lit(0.9) * (tol / err).powf(T::lit(0.2)))
                    .max(T::lit(0.2))
                    .min(T::lit(5.0))
            };
            let proposed = step * factor;
            // A clipped step says nothing about how large h may grow.
            h = if clipped && err <= tol {
                h.max(proposed)
            } else {
                proposed
            };
            if !h.is_finite() || h <= T::zero() {
                return Err(Error::StepUnderflow {
                    t: t.to_f64_lossy(),
                    h: h.to_f64_lossy(),
                    err: err.to_f64_lossy(),
                });
            }
        }
        states.push(StateVector::from_vec4(&y));
    }

    Ok(Trajectory {
        times: sample_times.to_vec(),
        states,
        solver: Solver::AdaptiveRK,
        generator_variant: gen.variant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{build_nonsecular_direct, build_nonsecular_vectorized, Variant};
    use crate::linalg::Mat4;
    use crate::physics::SystemParams;
    use crate::solvers::{solve_expm, uniform_times};

    #[test]
    fn scalar_decay_is_exact_to_tolerance() {
        let p = SystemParams::from_rates(1.0f64, 0.0, 0.0).unwrap();
        let g = Generator::from_parts(
            Mat4::from_diag([-1.0f64, -2.0, -0.5, -3.0]),
            Vec4::new(1.0, 0.0, 0.0, 0.0),
            Variant::NonSecularVectorized,
            p,
        );
        let times = uniform_times(5.0, 11).unwrap();
        let tr = solve_rk_oracle(&g, 5.0, 1e-12, &times).unwrap();
        for (t, s) in times.iter().zip(&tr.states) {
            assert!((s.rho_ee1 - (1.0 - (-t).exp())).abs() < 1e-11);
        }
    }

    #[test]
    fn matches_expm_to_ten_tol() {
        let p = SystemParams::from_rates(1.0f64, 0.0158, 12.0).unwrap();
        let g = build_nonsecular_vectorized(&p);
        let times = uniform_times(5.0, 26).unwrap();
        for tol in [1e-6, 1e-9, 1e-12] {
            let tr = solve_rk_oracle(&g, 5.0, tol, &times).unwrap();
            for (t, s) in times.iter().zip(&tr.states) {
                let exact = solve_expm(&g, *t).unwrap();
                assert!(s.max_abs_diff(&exact) <= 10.0 * tol, "tol {tol} t {t}");
            }
        }
    }

    #[test]
    fn direct_form_conserves_trace() {
        let p = SystemParams::from_rates(1.0f64, 0.05, 2.0).unwrap();
        let g = build_nonsecular_direct(&p);
        let times = uniform_times(10.0, 21).unwrap();
        let tr = solve_rk_oracle(&g, 10.0, 1e-10, &times).unwrap();
        for s in &tr.states {
            let trace = s.rho_gg() + s.rho_ee1 + s.rho_ee2;
            assert!((trace - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn argument_checks() {
        let p = SystemParams::from_rates(1.0f64, 0.01, 1.0).unwrap();
        let g = build_nonsecular_vectorized(&p);
        let times = [0.0, 1.0];
        assert!(solve_rk_oracle(&g, 0.0, 1e-9, &times).is_err());
        assert!(solve_rk_oracle(&g, 1.0, 1e-3, &times).is_err());
        assert!(solve_rk_oracle(&g, 1.0, 1e-14, &times).is_err());
        assert!(solve_rk_oracle(&g, 0.5, 1e-9, &times).is_err());
        assert!(solve_rk_oracle(&g, 1.0, 1e-9, &[0.0, 1.0, 0.5]).is_err());
    }

    #[test]
    fn blow_up_reports_underflow() {
        let p = SystemParams::from_rates(1.0f64, 0.0, 0.0).unwrap();
        let mut a = Mat4::zeros();
        a.0[0][0] = 1e300;
        let g = Generator::from_parts(
            a,
            Vec4::new(1.0, 0.0, 0.0, 0.0),
            Variant::NonSecularVectorized,
            p,
        );
        let r = solve_rk_oracle(&g, 1.0, 1e-9, &[0.0, 1.0]);
        assert!(matches!(r, Err(Error::StepUnderflow { .. })), "{r:?}");
    }
}
