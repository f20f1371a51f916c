use num_complex::Complex;

use super::{StateVector, EIGEN_RESIDUAL_TOL};
use crate::eigen::{decompose, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::scalar::Real;

/// Modal solution ρ(t) = Σᵢ vᵢ [e^{λᵢt}(wᵢ·ρ₀) + (e^{λᵢt} − 1)/λᵢ (wᵢ·d)],
/// with `wᵢ` the rows of `V⁻¹`.
#[derive(Debug, Clone)]
pub struct SpectralSolver<T> {
    pub decomposition: SpectralDecomposition<T>,
    drive: [Complex<T>; 4],
}

/// `(e^z − 1)/z`, continuous through `z = 0`.
fn phi1<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.norm() < T::lit(0.5) {
        let mut term = Complex::new(T::one(), T::zero());
        let mut sum = term;
        for k in 2..30 {
            term = term * z / T::from_usize(k).unwrap();
            sum = sum + term;
            if term.norm() < T::epsilon() * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (z.exp() - T::one()) / z
    }
}

impl<T: Real> SpectralSolver<T> {
    /// Fails with [`Error::IllConditioned`] when the eigenbasis is
    /// unusable; callers should then use the matrix-exponential route.
    pub fn new(gen: &Generator<T>) -> Result<Self> {
        let decomposition = decompose(&gen.a)?;
        let worst = decomposition
            .residuals
            .iter()
            .fold(T::zero(), |m, &r| m.max(r));
        if worst > T::tol(EIGEN_RESIDUAL_TOL) {
            return Err(Error::IllConditioned {
                condition: decomposition.condition.to_f64_lossy(),
            });
        }
        let drive = project(&decomposition, &gen.d.0);
        Ok(Self {
            decomposition,
            drive,
        })
    }

    pub fn at(&self, t: T) -> StateVector<T> {
        self.at_from(&StateVector::ground(), t)
    }

    pub fn at_from(&self, initial: &StateVector<T>, t: T) -> StateVector<T> {
        let sd = &self.decomposition;
        let start = if *initial == StateVector::ground() {
            None
        } else {
            Some(project(sd, &initial.to_array()))
        };
        let mut out = [Complex::new(T::zero(), T::zero()); 4];
        for i in 0..4 {
            let z = sd.eigenvalues[i] * t;
            let mut weight = self.drive[i] * phi1(z) * t;
            if let Some(p) = start {
                weight = weight + p[i] * z.exp();
            }
            for (k, o) in out.iter_mut().enumerate() {
                *o = *o + sd.eigenvectors[i][k] * weight;
            }
        }
        StateVector::new(out[0].re, out[1].re, out[2].re, out[3].re)
    }
}

/// Modal coordinates `wᵢ·x`.
fn project<T: Real>(sd: &SpectralDecomposition<T>, x: &[T; 4]) -> [Complex<T>; 4] {
    std::array::from_fn(|i| {
        (0..4).fold(Complex::new(T::zero(), T::zero()), |s, k| {
            s + sd.left[i][k] * x[k]
        })
    })
}

pub fn solve_spectral<T: Real>(gen: &Generator<T>, t: T) -> Result<StateVector<T>> {
    Ok(SpectralSolver::new(gen)?.at(t))
}

pub fn solve_spectral_from<T: Real>(
    gen: &Generator<T>,
    initial: &StateVector<T>,
    t: T,
) -> Result<StateVector<T>> {
    Ok(SpectralSolver::new(gen)?.at_from(initial, t))
}
