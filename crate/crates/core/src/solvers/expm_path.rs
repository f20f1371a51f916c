use num_complex::Complex;

use super::StateVector;
use crate::eigen::{eigenvalues, null_vector};
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::generators::Generator;
use crate::linalg::{Lu, Mat4, Vec4};
use crate::scalar::Real;

/// ρ(t) = e^{At}ρ₀ + A⁻¹(e^{At} − I)d.
#[derive(Debug, Clone)]
pub struct ExpmSolver<T> {
    a: Mat4<T>,
    d: Vec4<T>,
    lu: Lu<T>,
}

/// LU of `A`, or the zero mode that makes it singular.
fn factor<T: Real>(a: &Mat4<T>) -> Result<Lu<T>> {
    let scale = T::one().max(a.norm1());
    let tiny = T::lit(1e-12) * scale;
    match a.lu(tiny) {
        Some(lu) if lu.min_pivot() > tiny => Ok(lu),
        _ => Err(zero_mode(a)),
    }
}

fn zero_mode<T: Real>(a: &Mat4<T>) -> Error {
    let ev = eigenvalues(a);
    let lambda = ev
        .iter()
        .copied()
        .min_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap())
        .unwrap_or(Complex::new(T::zero(), T::zero()));
    let v = null_vector(a, lambda)
        .or_else(|| null_vector(a, Complex::new(T::zero(), T::zero())))
        .map(|v| v.map(|z| z.re.to_f64_lossy()))
        .unwrap_or([f64::NAN; 4]);
    Error::Singular {
        eigenvalue: lambda.re.to_f64_lossy(),
        null_vector: v,
    }
}

impl<T: Real> ExpmSolver<T> {
    pub fn new(gen: &Generator<T>) -> Result<Self> {
        Ok(Self {
            a: gen.a,
            d: gen.d,
            lu: factor(&gen.a)?,
        })
    }

    pub fn at(&self, t: T) -> StateVector<T> {
        self.at_from(&StateVector::ground(), t)
    }

    pub fn at_from(&self, initial: &StateVector<T>, t: T) -> StateVector<T> {
        let e = expm(&self.a.scale(t));
        let forced = self.lu.solve(&(e.mul_vec(&self.d) - self.d));
        let free = e.mul_vec(&initial.to_vec4());
        StateVector::from_vec4(&(free + forced))
    }
}

pub fn solve_expm<T: Real>(gen: &Generator<T>, t: T) -> Result<StateVector<T>> {
    Ok(ExpmSolver::new(gen)?.at(t))
}

pub fn solve_expm_from<T: Real>(
    gen: &Generator<T>,
    initial: &StateVector<T>,
    t: T,
) -> Result<StateVector<T>> {
    Ok(ExpmSolver::new(gen)?.at_from(initial, t))
}

/// Fixed point of the dynamics, `Aρ = −d`.
pub fn steady_state<T: Real>(gen: &Generator<T>) -> Result<StateVector<T>> {
    let lu = factor(&gen.a)?;
    Ok(StateVector::from_vec4(&lu.solve(&(-gen.d))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{
        build_isotropic, build_nonsecular_direct, build_nonsecular_vectorized,
        build_secular_vectorized, Variant,
    };
    use crate::physics::SystemParams;

    #[test]
    fn zero_time_is_ground() {
        let p = SystemParams::from_rates(1.0f64, 0.0158, 12.0).unwrap();
        let s = solve_expm(&build_nonsecular_vectorized(&p), 0.0).unwrap();
        assert_eq!(s, StateVector::ground());
    }

    #[test]
    fn degenerate_direct_generator_keeps_coherence_equal_to_population() {
        let p = SystemParams::from_rates(1.0f64, 0.1, 0.0).unwrap();
        let g = build_nonsecular_direct(&p);
        for t in [0.3, 1.0, 4.0, 25.0] {
            let s = solve_expm(&g, t).unwrap();
            assert!((s.rho_ee1 - s.rho_ee2).abs() < 1e-12);
            assert!((s.coh_re - s.rho_ee1).abs() < 1e-12, "t={t}: {s:?}");
            assert!(s.coh_im.abs() < 1e-12);
        }
    }

    #[test]
    fn long_time_approaches_steady_state() {
        let p = SystemParams::from_rates(1.0f64, 0.0158, 12.0).unwrap();
        let g = build_nonsecular_vectorized(&p);
        let late = solve_expm(&g, 80.0).unwrap();
        let ss = steady_state(&g).unwrap();
        assert!(late.max_abs_diff(&ss) < 1e-15);
    }

    #[test]
    fn secular_steady_state_has_no_coherence() {
        let p = SystemParams::from_rates(1.0f64, 0.0158, 12.0).unwrap();
        let ss = steady_state(&build_secular_vectorized(&p)).unwrap();
        assert_eq!((ss.coh_re, ss.coh_im), (0.0, 0.0));
        assert!((ss.rho_ee1 - 0.0158 / 1.0474).abs() < 1e-15);
    }

    #[test]
    fn trapping_mode_is_reported() {
        let p = SystemParams::from_rates(1.0f64, 0.1, 0.0).unwrap();
        let g = build_isotropic(&p, 1.0, false).unwrap();
        assert_eq!(g.variant, Variant::IsotropicNonSecular);
        match steady_state(&g) {
            Err(Error::Singular {
                eigenvalue,
                null_vector,
            }) => {
                assert!(eigenvalue.abs() < 1e-9);
                let v = Vec4(null_vector);
                assert!(g.a.mul_vec(&v).norm_inf() < 1e-9);
                assert!(v.norm2() > 0.5);
            }
            other => panic!("expected a singular generator, got {other:?}"),
        }
        assert!(solve_expm(&g, 1.0).is_err());
    }
}
