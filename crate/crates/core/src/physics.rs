//! Physical parameters, SI conversions, coupling matrices and the complete
//! positivity test.
//!
//! The dynamics are solved in units of the spontaneous decay rate γ. Only
//! this module knows about SI units; everything downstream receives a
//! [`SystemParams`] whose rates are already dimensionless.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::{sq, Real};

/// CODATA 2018 constants (SI).
pub mod constants {
    /// Reduced Planck constant, J·s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Vacuum permittivity, F/m.
    pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
    /// Speed of light, m/s.
    pub const C: f64 = 299_792_458.0;
    /// Bohr magneton, J/T.
    pub const MU_B: f64 = 9.274_010_078_3e-24;
    /// Elementary charge, C.
    pub const E: f64 = 1.602_176_634e-19;
    /// Bohr radius, m.
    pub const A0: f64 = 5.291_772_109_03e-11;
}

use constants::*;

/// Rates of one V-system configuration, in a single consistent unit.
///
/// The solvers assume γ = 1 (time in units of τ_γ = 1/γ) but nothing here
/// enforces that; [`SystemParams::in_units_of_gamma`] rescales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams<T> {
    pub gamma: T,
    pub r: T,
    pub delta: T,
    pub nbar: Option<T>,
    /// Angular transition frequency, rad/s. Only meaningful for SI work.
    pub omega0: Option<T>,
}

impl<T: Real> SystemParams<T> {
    /// Parameters from explicit rates. n̄ is left unset.
    pub fn from_rates(gamma: T, r: T, delta: T) -> Result<Self> {
        let p = Self {
            gamma,
            r,
            delta,
            nbar: None,
            omega0: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with the beam pumping rate r = γn̄/4.
    pub fn from_nbar(gamma: T, delta: T, nbar: T) -> Result<Self> {
        let r = pumping_rate(gamma, nbar)?;
        let p = Self {
            gamma,
            r,
            delta,
            nbar: Some(nbar),
            omega0: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > T::zero()) || !self.gamma.is_finite() {
            return domain(format!("gamma must be > 0, got {}", self.gamma));
        }
        if !(self.r >= T::zero()) || !self.r.is_finite() {
            return domain(format!("r must be >= 0, got {}", self.r));
        }
        if !(self.delta >= T::zero()) || !self.delta.is_finite() {
            return domain(format!("delta must be >= 0, got {}", self.delta));
        }
        if let Some(nbar) = self.nbar {
            if !(nbar >= T::zero()) {
                return domain(format!("nbar must be >= 0, got {nbar}"));
            }
            let expect = self.gamma * nbar / T::lit(4.0);
            let tol = T::lit(1e-12) * expect.abs().max(T::min_positive_value());
            if (self.r - expect).abs() > tol {
                return domain(format!(
                    "r = {} inconsistent with gamma*nbar/4 = {}",
                    self.r, expect
                ));
            }
        }
        Ok(())
    }

    /// Same physics with every rate divided by γ.
    pub fn in_units_of_gamma(&self) -> Self {
        Self {
            gamma: T::one(),
            r: self.r / self.gamma,
            delta: self.delta / self.gamma,
            nbar: self.nbar,
            omega0: self.omega0.map(|w| w / self.gamma),
        }
    }

    /// Excited-state lifetime τ_γ = 1/γ.
    pub fn tau(&self) -> T {
        T::one() / self.gamma
    }

    pub fn cast<U: Real>(&self) -> SystemParams<U> {
        let c = |x: T| U::lit(x.to_f64_lossy());
        SystemParams {
            gamma: c(self.gamma),
            r: c(self.r),
            delta: c(self.delta),
            nbar: self.nbar.map(c),
            omega0: self.omega0.map(c),
        }
    }
}

/// Tabulated natural linewidth of the calcium 423 nm line, rad/s.
pub const CALCIUM_TABULATED_GAMMA: f64 = std::f64::consts::TAU * 34.6e6;

/// Laboratory inputs in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentalInputs {
    /// Transition dipole magnitude, C·m.
    pub dipole_moment: f64,
    /// Angular transition frequency, rad/s.
    pub omega0: f64,
    /// Magnetic field, T.
    pub b_field: f64,
    pub nbar: f64,
    /// Light-atom interaction time, s.
    pub t_transit: f64,
}

/// Rates derived from [`ExperimentalInputs`], in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiRates {
    pub gamma: f64,
    pub r: f64,
    pub delta: f64,
    pub tau: f64,
    /// T_transit / τ_γ.
    pub lifetimes_in_transit: f64,
}

/// Dipole moment in e·a₀ converted to C·m.
pub fn dipole_from_atomic_units(mu_ea0: f64) -> f64 {
    mu_ea0 * E * A0
}

impl ExperimentalInputs {
    /// Calcium 4s² ¹S₀ → 4s4p ¹P₁ at the largest tabulated splitting
    /// (Δ = 2π × 400 MHz).
    pub fn calcium_table() -> Self {
        let delta_max = std::f64::consts::TAU * 400e6;
        Self {
            dipole_moment: dipole_from_atomic_units(2.85),
            omega0: std::f64::consts::TAU * 709.1e12,
            b_field: field_for_splitting(delta_max).expect("positive splitting"),
            nbar: 0.0633,
            t_transit: 20e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dipole_moment", self.dipole_moment),
            ("omega0", self.omega0),
            ("nbar", self.nbar),
            ("t_transit", self.t_transit),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return domain(format!("{name} must be > 0, got {v}"));
            }
        }
        if !(self.b_field >= 0.0) {
            return domain(format!("b_field must be >= 0, got {}", self.b_field));
        }
        Ok(())
    }

    pub fn si_rates(&self) -> Result<SiRates> {
        self.validate()?;
        let gamma = compute_gamma(self.dipole_moment, self.omega0)?;
        let r = pumping_rate(gamma, self.nbar)?;
        let delta = zeeman_splitting(self.b_field)?;
        Ok(SiRates {
            gamma,
            r,
            delta,
            tau: 1.0 / gamma,
            lifetimes_in_transit: self.t_transit * gamma,
        })
    }

    /// Dimensionless parameters (γ = 1) carrying ω₀/γ.
    pub fn system_params(&self) -> Result<SystemParams<f64>> {
        let si = self.si_rates()?;
        let mut p = SystemParams::from_nbar(si.gamma, si.delta, self.nbar)?;
        p.omega0 = Some(self.omega0);
        Ok(p.in_units_of_gamma())
    }
}

/// Spontaneous decay rate γ = |μ|²ω₀³ / (3π ε₀ ħ c³) in rad/s.
pub fn compute_gamma(dipole_moment: f64, omega0: f64) -> Result<f64> {
    if !(dipole_moment >= 0.0) || !(omega0 > 0.0) {
        return domain(format!(
            "need dipole_moment >= 0 and omega0 > 0, got {dipole_moment}, {omega0}"
        ));
    }
    Ok(sq(dipole_moment) * omega0.powi(3)
        / (3.0 * std::f64::consts::PI * EPSILON_0 * HBAR * C.powi(3)))
}

/// Zeeman splitting Δ = 2 μ_B B / ħ in rad/s.
pub fn zeeman_splitting(b_field: f64) -> Result<f64> {
    if !(b_field >= 0.0) {
        return domain(format!("b_field must be >= 0, got {b_field}"));
    }
    Ok(2.0 * MU_B * b_field / HBAR)
}

/// Field producing splitting `delta` (rad/s).
pub fn field_for_splitting(delta: f64) -> Result<f64> {
    if !(delta >= 0.0) {
        return domain(format!("delta must be >= 0, got {delta}"));
    }
    Ok(delta * HBAR / (2.0 * MU_B))
}

/// Beam pumping rate per transition, r = γ n̄ / 4.
pub fn pumping_rate<T: Real>(gamma: T, nbar: T) -> Result<T> {
    if !(gamma > T::zero()) || !(nbar >= T::zero()) {
        return domain(format!("need gamma > 0 and nbar >= 0, got {gamma}, {nbar}"));
    }
    Ok(gamma * nbar / T::lit(4.0))
}

/// Complex 2×2 matrix on the excited manifold.
pub type Mat2<T> = [[Complex<T>; 2]; 2];

pub fn real_mat2<T: Real>(m: [[T; 2]; 2]) -> Mat2<T> {
    m.map(|row| row.map(|x| Complex::new(x, T::zero())))
}

fn is_hermitian<T: Real>(m: &Mat2<T>) -> bool {
    let scale = m
        .iter()
        .flatten()
        .fold(T::zero(), |a, z| a.max(z.norm()))
        .max(T::min_positive_value());
    let tol = T::lit(1e-12) * scale;
    (m[0][0].im).abs() <= tol
        && (m[1][1].im).abs() <= tol
        && (m[0][1] - m[1][0].conj()).norm() <= tol
}

/// Columns are |e₁⟩ = (|x⟩ + i|y⟩)/√2 and |e₂⟩ = (|x⟩ − i|y⟩)/√2.
fn circular_unitary<T: Real>() -> Mat2<T> {
    let s = T::FRAC_1_SQRT_2();
    let z = T::zero();
    [
        [Complex::new(s, z), Complex::new(s, z)],
        [Complex::new(z, s), Complex::new(z, -s)],
    ]
}

fn mul2<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

fn adjoint2<T: Real>(a: &Mat2<T>) -> Mat2<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].conj()))
}

/// Change a Hermitian coefficient matrix from the {4p_x, 4p_y} basis to the
/// circular {e₁, e₂} basis: `U† M U`.
pub fn basis_transform<T: Real>(matrix_xy: &Mat2<T>) -> Result<Mat2<T>> {
    if !is_hermitian(matrix_xy) {
        return domain("basis_transform requires a Hermitian matrix");
    }
    let u = circular_unitary();
    Ok(mul2(&mul2(&adjoint2(&u), matrix_xy), &u))
}

/// Inverse of [`basis_transform`]: `U M U†`.
pub fn basis_transform_inverse<T: Real>(matrix_circ: &Mat2<T>) -> Result<Mat2<T>> {
    if !is_hermitian(matrix_circ) {
        return domain("basis_transform_inverse requires a Hermitian matrix");
    }
    let u = circular_unitary();
    Ok(mul2(&mul2(&u, matrix_circ), &adjoint2(&u)))
}

/// Decay (Γ), pumping (R) and total (K = Γ + R) coefficient matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientMatrices<T> {
    pub gamma: Mat2<T>,
    pub r: Mat2<T>,
    pub k: Mat2<T>,
}

impl<T: Real> CoefficientMatrices<T> {
    pub fn new(gamma: Mat2<T>, r: Mat2<T>) -> Self {
        let k = std::array::from_fn(|i| std::array::from_fn(|j| gamma[i][j] + r[i][j]));
        Self { gamma, r, k }
    }

    /// x-polarised beam on the Ca V-system, expressed in the circular basis:
    /// Γ = γ·I, and R = [[2r, 0], [0, 0]] in the Cartesian basis.
    pub fn beam(gamma: T, r: T) -> Self {
        let z = T::zero();
        let g = real_mat2([[gamma, z], [z, gamma]]);
        let r_xy = real_mat2([[r + r, z], [z, z]]);
        let g_c = basis_transform(&g).expect("real diagonal is Hermitian");
        let r_c = basis_transform(&r_xy).expect("real diagonal is Hermitian");
        Self::new(g_c, r_c)
    }
}

/// One inequality of the positivity conditions; `margin = rhs − lhs ≥ 0` passes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpReport {
    pub checks: Vec<CpCheck>,
}

impl CpReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CpCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Diagonal nonnegativity and `|M₁₂|² ≤ M₁₁M₂₂` for Γ, R and K.
///
/// Boundary cases (rank-1 R) pass with a relative slack of 1e-12.
pub fn check_complete_positivity<T: Real>(cm: &CoefficientMatrices<T>) -> CpReport {
    let mut checks = Vec::new();
    for (label, m) in [("Gamma", &cm.gamma), ("R", &cm.r), ("K", &cm.k)] {
        let m11 = m[0][0].re.to_f64_lossy();
        let m22 = m[1][1].re.to_f64_lossy();
        let slack = 1e-12 * m11.abs().max(m22.abs());
        for (suffix, v) in [("11", m11), ("22", m22)] {
            checks.push(CpCheck {
                name: format!("{label}{suffix} >= 0"),
                lhs: 0.0,
                rhs: v,
                margin: v,
                pass: v >= -slack,
            });
        }
        let off = sq(m[0][1].norm().to_f64_lossy());
        let prod = m11 * m22;
        checks.push(CpCheck {
            name: format!("|{label}12|^2 <= {label}11*{label}22"),
            lhs: off,
            rhs: prod,
            margin: prod - off,
            pass: prod - off >= -1e-12 * sq(m11.abs().max(m22.abs())),
        });
    }
    CpReport { checks }
}
