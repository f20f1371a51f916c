//! Secular and non-secular master equations for an incoherently pumped
//! V-system (one ground state, two Zeeman-split excited states), their
//! exact and numerical solutions, and the fluorescence signals that tell
//! the two dynamics apart.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`). The
//! `*F64` aliases below fix the scalar for ordinary use.
//!
//! ```
//! use vsys_core::{build_nonsecular_direct, solve_expm, SystemParamsF64};
//!
//! let p = SystemParamsF64::from_nbar(1.0, 12.0, 0.0633).unwrap();
//! let rho = solve_expm(&build_nonsecular_direct(&p), 3.0).unwrap();
//! assert!(rho.is_physical());
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod detection;
pub mod eigen;
pub mod error;
pub mod expm;
pub mod generators;
pub mod linalg;
pub mod physics;
pub mod poly;
pub mod quadrature;
pub mod scalar;
pub mod solvers;
pub mod validation;

pub use detection::{
    beat_contrast, closed_form, difference_signals, integrate_detector, intensity_kernel,
    DetectorGeometry, DetectorKind, DetectorSignal, SignalMethod,
};
pub use eigen::{decompose, SpectralDecomposition};
pub use error::{Error, Result};
pub use generators::{
    build, build_isotropic, build_nonsecular_direct, build_nonsecular_vectorized,
    build_secular_direct, build_secular_vectorized, char_poly, CharPoly, Generator, Variant,
};
pub use linalg::{Mat4, Vec4};
pub use physics::{
    check_complete_positivity, compute_gamma, field_for_splitting, pumping_rate, zeeman_splitting,
    CoefficientMatrices, ExperimentalInputs, SiRates, SystemParams,
};
pub use scalar::Real;
pub use solvers::{
    limit_large_delta, limit_small_delta, solve_expm, solve_rk_oracle, solve_spectral,
    steady_state, trajectory, uniform_times, LimitSolution, Solver, StateVector, Trajectory,
};
pub use validation::{run_validation, Fault, ValidationReport};

pub type SystemParamsF64 = SystemParams<f64>;
pub type GeneratorF64 = Generator<f64>;
pub type StateVectorF64 = StateVector<f64>;
pub type TrajectoryF64 = Trajectory<f64>;
pub type DetectorSignalF64 = DetectorSignal<f64>;
pub type DetectorGeometryF64 = DetectorGeometry<f64>;
pub type SpectralDecompositionF64 = SpectralDecomposition<f64>;
pub type CharPolyF64 = CharPoly<f64>;
pub type Mat4F64 = Mat4<f64>;
pub type Vec4F64 = Vec4<f64>;
