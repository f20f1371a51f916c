//! Time evolution of ρ̇ = Aρ + d by three independent routes, plus the
//! steady state and the closed-form limit solutions.
//!
//! All routes start from the ground state unless an explicit initial state
//! is given. A trajectory that starts elsewhere is flagged through
//! [`Trajectory::from_ground_state`].

mod expm_path;
mod limits;
mod rk;
mod spectral;

use serde::Serialize;

pub use expm_path::{solve_expm, solve_expm_from, steady_state, ExpmSolver};
pub use limits::{limit_large_delta, limit_small_delta, LimitSolution};
pub use rk::{solve_rk_oracle, solve_rk_oracle_from, RK_TOL_MAX, RK_TOL_MIN};
pub use spectral::{solve_spectral, solve_spectral_from, SpectralSolver};

use crate::error::{domain, Result};
use crate::generators::{Generator, Variant};
use crate::linalg::Vec4;
use crate::scalar::Real;

/// Slack on density-matrix positivity.
pub const POSITIVITY_SLACK: f64 = 1e-10;
/// Pairwise agreement demanded between solver routes.
pub const CROSS_METHOD_TOL: f64 = 1e-8;
/// Largest accepted eigenpair residual.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-9;

/// Excited-manifold state `[ρ₁₁, ρ₂₂, Re ρ₁₂, Im ρ₁₂]`; the ground
/// population is implied by the trace.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct StateVector<T> {
    pub rho_ee1: T,
    pub rho_ee2: T,
    pub coh_re: T,
    pub coh_im: T,
}

/// How far a state sits inside (positive) or outside (negative) each
/// physical constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalMargins<T> {
    pub min_population: T,
    pub rho_gg: T,
    pub min_eigenvalue: T,
    /// `ρ₁₁ρ₂₂ − |ρ₁₂|²`.
    pub excited_block: T,
}

impl<T: Real> PhysicalMargins<T> {
    pub fn is_physical(&self, slack: T) -> bool {
        self.min_population >= -slack
            && self.rho_gg >= -slack
            && self.min_eigenvalue >= -slack
            && self.excited_block >= -slack
    }
}

impl<T: Real> StateVector<T> {
    pub fn new(rho_ee1: T, rho_ee2: T, coh_re: T, coh_im: T) -> Self {
        Self {
            rho_ee1,
            rho_ee2,
            coh_re,
            coh_im,
        }
    }

    pub fn ground() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn from_vec4(v: &Vec4<T>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_vec4(&self) -> Vec4<T> {
        Vec4::new(self.rho_ee1, self.rho_ee2, self.coh_re, self.coh_im)
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.rho_ee1, self.rho_ee2, self.coh_re, self.coh_im]
    }

    pub fn rho_gg(&self) -> T {
        T::one() - self.rho_ee1 - self.rho_ee2
    }

    pub fn excited_population(&self) -> T {
        self.rho_ee1 + self.rho_ee2
    }

    /// `|ρ₁₂|`.
    pub fn coherence_abs(&self) -> T {
        self.coh_re.hypot(self.coh_im)
    }

    pub fn is_incoherent(&self) -> bool {
        self.coh_re == T::zero() && self.coh_im == T::zero()
    }

    /// Largest absolute component difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.to_vec4() - other.to_vec4()).norm_inf()
    }

    /// Eigenvalues of the embedded 3×3 density matrix, ascending. With no
    /// ground/excited coherence it splits into `ρ_gg` and the excited 2×2
    /// block.
    pub fn density_eigenvalues(&self) -> [T; 3] {
        let half = T::lit(0.5);
        let mean = half * (self.rho_ee1 + self.rho_ee2);
        let split = (half * (self.rho_ee1 - self.rho_ee2)).hypot(self.coherence_abs());
        let mut ev = [self.rho_gg(), mean - split, mean + split];
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }

    pub fn margins(&self) -> PhysicalMargins<T> {
        PhysicalMargins {
            min_population: self.rho_ee1.min(self.rho_ee2),
            rho_gg: self.rho_gg(),
            min_eigenvalue: self.density_eigenvalues()[0],
            excited_block: self.rho_ee1 * self.rho_ee2
                - self.coh_re * self.coh_re
                - self.coh_im * self.coh_im,
        }
    }

    pub fn is_physical(&self) -> bool {
        self.margins().is_physical(T::lit(POSITIVITY_SLACK))
    }

    pub fn cast<U: Real>(&self) -> StateVector<U> {
        let c = |x: T| U::lit(x.to_f64_lossy());
        StateVector::new(
            c(self.rho_ee1),
            c(self.rho_ee2),
            c(self.coh_re),
            c(self.coh_im),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Solver {
    Spectral,
    MatrixExp,
    AdaptiveRK,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<StateVector<T>>,
    pub solver: Solver,
    pub generator_variant: Variant,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn initial(&self) -> Option<&StateVector<T>> {
        self.states.first()
    }

    pub fn from_ground_state(&self) -> bool {
        self.initial().is_none_or(|s| *s == StateVector::ground())
    }

    /// Largest component difference against another trajectory on the
    /// same time grid.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.times != other.times {
            return Err(crate::error::Error::LengthMismatch(format!(
                "time grids differ ({} vs {} samples)",
                self.len(),
                other.len()
            )));
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .fold(T::zero(), |m, (a, b)| m.max(a.max_abs_diff(b))))
    }

    /// Smallest density-matrix eigenvalue over the trajectory.
    pub fn min_density_eigenvalue(&self) -> T {
        self.states
            .iter()
            .map(|s| s.density_eigenvalues()[0])
            .fold(T::infinity(), T::min)
    }

    pub fn peak_coherence(&self) -> T {
        self.states
            .iter()
            .map(|s| s.coherence_abs())
            .fold(T::zero(), T::max)
    }

    /// Checks the structural invariants: equal lengths, `times[0] = 0`,
    /// strictly increasing times, physical states.
    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.states.len() {
            return Err(crate::error::Error::LengthMismatch(format!(
                "{} times but {} states",
                self.times.len(),
                self.states.len()
            )));
        }
        check_times(&self.times)?;
        if let Some(i) = self.states.iter().position(|s| !s.is_physical()) {
            return domain(format!(
                "state at t = {} is unphysical: {:?}",
                self.times[i],
                self.states[i].margins()
            ));
        }
        Ok(())
    }
}

pub(crate) fn check_times<T: Real>(times: &[T]) -> Result<()> {
    if times.is_empty() {
        return domain("empty time grid");
    }
    if times[0] != T::zero() {
        return domain("time grid must start at t = 0");
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("time grid must be strictly increasing");
    }
    Ok(())
}

/// `samples` equally spaced times on `[0, t_end]`.
pub fn uniform_times<T: Real>(t_end: T, samples: usize) -> Result<Vec<T>> {
    if samples < 2 {
        return domain("need at least two samples");
    }
    if !(t_end > T::zero()) || !t_end.is_finite() {
        return domain("t_end must be positive and finite");
    }
    let n = T::from_usize(samples - 1).unwrap();
    Ok((0..samples)
        .map(|i| {
            if i == samples - 1 {
                t_end
            } else {
                t_end * T::from_usize(i).unwrap() / n
            }
        })
        .collect())
}

/// Trajectory from the ground state by the chosen route. The adaptive
/// route runs at the tightest supported tolerance.
pub fn trajectory<T: Real>(
    gen: &Generator<T>,
    times: &[T],
    solver: Solver,
) -> Result<Trajectory<T>> {
    trajectory_from(gen, &StateVector::ground(), times, solver)
}

pub fn trajectory_from<T: Real>(
    gen: &Generator<T>,
    initial: &StateVector<T>,
    times: &[T],
    solver: Solver,
) -> Result<Trajectory<T>> {
    check_times(times)?;
    let states = match solver {
        Solver::Spectral => {
            let s = SpectralSolver::new(gen)?;
            times.iter().map(|&t| s.at_from(initial, t)).collect()
        }
        Solver::MatrixExp => {
            let s = ExpmSolver::new(gen)?;
            times.iter().map(|&t| s.at_from(initial, t)).collect()
        }
        Solver::AdaptiveRK => {
            let t_end = *times.last().unwrap();
            if t_end == T::zero() {
                vec![*initial]
            } else {
                return solve_rk_oracle_from(gen, initial, t_end, T::lit(RK_TOL_MIN), times);
            }
        }
    };
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        solver,
        generator_variant: gen.variant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{
        build_nonsecular_direct, build_nonsecular_vectorized, build_secular_vectorized,
    };
    use crate::physics::SystemParams;

    fn fig2() -> SystemParams<f64> {
        SystemParams::from_nbar(1.0, 12.0, 0.0633).unwrap()
    }

    #[test]
    fn ground_state_is_physical() {
        let g = StateVector::<f64>::ground();
        assert_eq!(g.rho_gg(), 1.0);
        assert_eq!(g.density_eigenvalues(), [0.0, 0.0, 1.0]);
        assert!(g.is_physical());
    }

    #[test]
    fn density_eigenvalues_of_coherent_pair() {
        // ρ₁₁ = ρ₂₂ = |ρ₁₂| gives a pure superposition in the excited block.
        let s = StateVector::new(0.2f64, 0.2, 0.0, 0.2);
        let ev = s.density_eigenvalues();
        assert!(ev[0].abs() < 1e-16);
        assert!((ev[1] - 0.4).abs() < 1e-15 && (ev[2] - 0.6).abs() < 1e-15);
        assert!(!StateVector::new(0.2, 0.2, 0.21, 0.0).is_physical());
    }

    #[test]
    fn uniform_grid_endpoints() {
        let t = uniform_times(20.0f64, 201).unwrap();
        assert_eq!(t[0], 0.0);
        assert_eq!(t[200], 20.0);
        assert!((t[1] - 0.1).abs() < 1e-15);
        assert!(uniform_times(1.0, 1).is_err());
        assert!(uniform_times(0.0, 5).is_err());
    }

    #[test]
    fn three_routes_agree_at_fig2() {
        let gen = build_nonsecular_vectorized(&fig2());
        let times = uniform_times(20.0, 81).unwrap();
        let a = trajectory(&gen, &times, Solver::Spectral).unwrap();
        let b = trajectory(&gen, &times, Solver::MatrixExp).unwrap();
        let c = trajectory(&gen, &times, Solver::AdaptiveRK).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
        assert!(b.max_abs_diff(&c).unwrap() < 1e-9);
        assert_eq!(c.solver, Solver::AdaptiveRK);
        assert!(c.from_ground_state());
    }

    #[test]
    fn trajectory_validation() {
        let gen = build_nonsecular_direct(&fig2());
        let times = uniform_times(10.0, 51).unwrap();
        let tr = trajectory(&gen, &times, Solver::MatrixExp).unwrap();
        tr.validate().unwrap();
        let mut bad = tr.clone();
        bad.times.swap(3, 4);
        assert!(bad.validate().is_err());
        bad = tr.clone();
        bad.states.pop();
        assert!(bad.validate().is_err());
        assert!(trajectory(&gen, &[0.5, 1.0], Solver::MatrixExp).is_err());
    }

    #[test]
    fn off_ground_start_is_flagged() {
        let gen = build_secular_vectorized(&fig2());
        let start = StateVector::new(0.3, 0.1, 0.0, 0.0);
        let tr = trajectory_from(&gen, &start, &[0.0, 1.0], Solver::MatrixExp).unwrap();
        assert!(!tr.from_ground_state());
        assert_eq!(tr.states[0], start);
    }
}
