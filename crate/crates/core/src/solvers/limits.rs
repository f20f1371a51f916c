//! Weak-pumping closed forms for the well-separated (Δ ≫ r) and
//! near-degenerate (Δ ≪ r) regimes, evaluated as written.

use serde::Serialize;

use super::StateVector;
use crate::physics::SystemParams;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitSolution<T> {
    pub secular: StateVector<T>,
    pub nonsecular: StateVector<T>,
    /// Set when the parameters lie outside the regime the formula assumes.
    pub warning: Option<String>,
}

fn population<T: Real>(p: &SystemParams<T>, t: T) -> T {
    p.r / p.gamma * (T::one() - (-p.gamma * t).exp())
}

/// Populations `r/γ (1 − e^{−γt})` in both cases; the non-secular
/// coherence is `(r/Δ)[e^{−γt} sin Δt − i(1 − e^{−γt} cos Δt)]`.
///
/// The imaginary part carries the sign of the generators' rotating
/// convention (stationary Im ρ₁₂ < 0). At Δ = 0 the coherence is not finite.
pub fn limit_large_delta<T: Real>(p: &SystemParams<T>, t: T) -> LimitSolution<T> {
    let pop = population(p, t);
    let decay = (-p.gamma * t).exp();
    let amp = p.r / p.delta;
    let phase = p.delta * t;
    let warning = (p.delta < T::lit(10.0) * p.r).then(|| {
        format!(
            "large-splitting limit used with Δ = {} < 10r = {}",
            p.delta,
            T::lit(10.0) * p.r
        )
    });
    LimitSolution {
        secular: StateVector::new(pop, pop, T::zero(), T::zero()),
        nonsecular: StateVector::new(
            pop,
            pop,
            amp * decay * phase.sin(),
            -amp * (T::one() - decay * phase.cos()),
        ),
        warning,
    }
}

/// Populations `r/γ (1 − e^{−γt})`; the non-secular coherence equals the
/// population and is real.
pub fn limit_small_delta<T: Real>(p: &SystemParams<T>, t: T) -> LimitSolution<T> {
    let pop = population(p, t);
    let warning = (p.delta > T::lit(0.1) * p.r).then(|| {
        format!(
            "small-splitting limit used with Δ = {} > 0.1r = {}",
            p.delta,
            T::lit(0.1) * p.r
        )
    });
    LimitSolution {
        secular: StateVector::new(pop, pop, T::zero(), T::zero()),
        nonsecular: StateVector::new(pop, pop, pop, T::zero()),
        warning,
    }
}
