//! Affine dynamics `ρ̇ = Aρ + d` on `ρ = [ρ₁₁, ρ₂₂, Re ρ₁₂, Im ρ₁₂]`.
//!
//! Two families of constructors exist. The *vectorized* ones return the
//! printed 4×4 matrices verbatim. The *direct* ones start from the master
//! equation with the ground population ρ_gg still explicit (a
//! [`RetainedForm`]) and eliminate it with ρ_gg = 1 − ρ₁₁ − ρ₂₂ in every row.
//! For the non-secular beam equations the two differ in the coherence row:
//! the population coupling is −r/2 in the vectorized matrix and −3r/2 after
//! a consistent elimination.

use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{domain, Result};
use crate::linalg::{Mat4, Vec4};
use crate::physics::SystemParams;
use crate::poly::Poly;
use crate::scalar::Real;
use num_complex::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    NonSecularVectorized,
    SecularVectorized,
    NonSecularDirect,
    SecularDirect,
    IsotropicNonSecular,
    IsotropicSecular,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::NonSecularVectorized,
        Variant::SecularVectorized,
        Variant::NonSecularDirect,
        Variant::SecularDirect,
        Variant::IsotropicNonSecular,
        Variant::IsotropicSecular,
    ];

    /// Short CLI name.
    pub fn tag(self) -> &'static str {
        match self {
            Variant::NonSecularVectorized => "ns-vec",
            Variant::SecularVectorized => "s-vec",
            Variant::NonSecularDirect => "ns-direct",
            Variant::SecularDirect => "s-direct",
            Variant::IsotropicNonSecular => "iso-ns",
            Variant::IsotropicSecular => "iso-s",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.tag() == tag)
    }

    pub fn is_secular(self) -> bool {
        matches!(
            self,
            Variant::SecularVectorized | Variant::SecularDirect | Variant::IsotropicSecular
        )
    }

    /// The secular/non-secular partner built from the same equations.
    pub fn partner(self) -> Self {
        match self {
            Variant::NonSecularVectorized => Variant::SecularVectorized,
            Variant::SecularVectorized => Variant::NonSecularVectorized,
            Variant::NonSecularDirect => Variant::SecularDirect,
            Variant::SecularDirect => Variant::NonSecularDirect,
            Variant::IsotropicNonSecular => Variant::IsotropicSecular,
            Variant::IsotropicSecular => Variant::IsotropicNonSecular,
        }
    }

    /// Variants whose equations are in Lindblad form, hence completely
    /// positive. The printed vectorized non-secular matrix is not among them.
    pub fn is_completely_positive(self) -> bool {
        matches!(
            self,
            Variant::SecularVectorized | Variant::SecularDirect | Variant::NonSecularDirect
        )
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Generator<T> {
    pub a: Mat4<T>,
    pub d: Vec4<T>,
    pub variant: Variant,
    pub params: SystemParams<T>,
    /// Dipole alignment p, isotropic variants only.
    pub alignment: Option<T>,
}

/// Column labels of a [`RetainedForm`] row.
pub const RETAINED_COLUMNS: [&str; 5] = ["rho_gg", "rho_e1e1", "rho_e2e2", "coh_re", "coh_im"];

/// Linear master equation with ρ_gg kept as an independent column:
/// `ρ̇ᵢ = Σⱼ c[i][j] xⱼ` with `x = [ρ_gg, ρ₁₁, ρ₂₂, Re ρ₁₂, Im ρ₁₂]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetainedForm<T> {
    pub rows: [[T; 5]; 4],
}

impl<T: Real> RetainedForm<T> {
    /// Substitute ρ_gg = 1 − ρ₁₁ − ρ₂₂.
    pub fn eliminate_ground(&self) -> (Mat4<T>, Vec4<T>) {
        let mut a = Mat4::zeros();
        let mut d = Vec4::zeros();
        for (i, row) in self.rows.iter().enumerate() {
            d[i] = row[0];
            a[(i, 0)] = row[1] - row[0];
            a[(i, 1)] = row[2] - row[0];
            a[(i, 2)] = row[3];
            a[(i, 3)] = row[4];
        }
        (a, d)
    }

    /// Coefficient of `column` (one of [`RETAINED_COLUMNS`]) in `row`.
    pub fn coefficient(&self, row: usize, column: &str) -> T {
        let j = RETAINED_COLUMNS
            .iter()
            .position(|c| *c == column)
            .expect("known column");
        self.rows[row][j]
    }
}

/// Non-secular beam equations with ρ_gg explicit.
pub fn nonsecular_beam_retained<T: Real>(p: &SystemParams<T>) -> RetainedForm<T> {
    let (g, r, dl) = (p.gamma, p.r, p.delta);
    let z = T::zero();
    let half_r = r / T::lit(2.0);
    RetainedForm {
        rows: [
            [r, -(g + r), z, -r, z],
            [r, z, -(g + r), -r, z],
            [r, -half_r, -half_r, -(g + r), dl],
            [z, z, z, -dl, -(g + r)],
        ],
    }
}

/// Beam-case real/imaginary split of the non-secular
/// equations, written out independently of [`nonsecular_beam_retained`].
pub fn beam_split_retained<T: Real>(p: &SystemParams<T>) -> RetainedForm<T> {
    let (g, r, dl) = (p.gamma, p.r, p.delta);
    let z = T::zero();
    let mut rows = [[z; 5]; 4];
    // populations: r ρ_gg − (γ + r) ρ_ii − r Re
    for i in 0..2 {
        rows[i][0] = r;
        rows[i][1 + i] = -(g + r);
        rows[i][3] = -r;
    }
    // Re: r ρ_gg − (γ + r) Re + Δ Im − r/2 (ρ₁₁ + ρ₂₂)
    rows[2] = [r, -r * T::lit(0.5), -r * T::lit(0.5), -(g + r), dl];
    // Im: −(γ + r) Im − Δ Re
    rows[3] = [z, z, z, -dl, -(g + r)];
    RetainedForm { rows }
}

/// Secular beam equations with ρ_gg explicit.
pub fn secular_beam_retained<T: Real>(p: &SystemParams<T>) -> RetainedForm<T> {
    let (g, r, dl) = (p.gamma, p.r, p.delta);
    let z = T::zero();
    RetainedForm {
        rows: [
            [r, -(g + r), z, z, z],
            [r, z, -(g + r), z, z],
            [z, z, z, -(g + r), dl],
            [z, z, z, -dl, -(g + r)],
        ],
    }
}

/// Unequal-rate isotropic radiation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsotropicRates<T> {
    pub gamma1: T,
    pub gamma2: T,
    pub r1: T,
    pub r2: T,
    pub delta: T,
}

/// Isotropic-radiation equations with ρ_gg explicit. `secular` drops every
/// term that couples populations and coherences.
pub fn isotropic_retained<T: Real>(
    rates: &IsotropicRates<T>,
    alignment: T,
    secular: bool,
) -> Result<RetainedForm<T>> {
    if !(alignment.abs() <= T::one()) {
        return domain(format!(
            "alignment p must satisfy |p| <= 1, got {alignment}"
        ));
    }
    let IsotropicRates {
        gamma1,
        gamma2,
        r1,
        r2,
        delta,
    } = *rates;
    for (name, v) in [
        ("gamma1", gamma1),
        ("gamma2", gamma2),
        ("r1", r1),
        ("r2", r2),
    ] {
        if !(v >= T::zero()) {
            return domain(format!("{name} must be >= 0, got {v}"));
        }
    }
    let z = T::zero();
    let half = T::lit(0.5);
    let sr = (r1 * r2).sqrt();
    let sg = (gamma1 * gamma2).sqrt();
    let p = if secular { z } else { alignment };
    let damp = half * (r1 + r2 + gamma1 + gamma2);
    Ok(RetainedForm {
        rows: [
            [r1, -(r1 + gamma1), z, -p * (sr + sg), z],
            [r2, z, -(r2 + gamma2), -p * (sr + sg), z],
            [
                p * sr,
                -half * p * (sr + sg),
                -half * p * (sr + sg),
                -damp,
                delta,
            ],
            [z, z, z, -delta, -damp],
        ],
    })
}

fn checked<T: Real>(params: &SystemParams<T>) -> SystemParams<T> {
    debug_assert!(params.validate().is_ok(), "invalid SystemParams {params:?}");
    *params
}

/// The printed non-secular matrix and drive, entry for entry.
pub fn build_nonsecular_vectorized<T: Real>(params: &SystemParams<T>) -> Generator<T> {
    let p = checked(params);
    let (g, r, dl) = (p.gamma, p.r, p.delta);
    let z = T::zero();
    let two = T::lit(2.0);
    let a = Mat4([
        [-g - two * r, -r, -r, z],
        [-r, -g - two * r, -r, z],
        [-r / two, -r / two, -g - r, dl],
        [z, z, -dl, -g - r],
    ]);
    Generator {
        a,
        d: Vec4::new(r, r, r, z),
        variant: Variant::NonSecularVectorized,
        params: p,
        alignment: None,
    }
}

/// The printed secular matrix and drive, entry for entry.
pub fn build_secular_vectorized<T: Real>(params: &SystemParams<T>) -> Generator<T> {
    let p = checked(params);
    let (g, r, dl) = (p.gamma, p.r, p.delta);
    let z = T::zero();
    let two = T::lit(2.0);
    let a = Mat4([
        [-g - two * r, -r, z, z],
        [-r, -g - two * r, z, z],
        [z, z, -g - r, dl],
        [z, z, -dl, -g - r],
    ]);
    Generator {
        a,
        d: Vec4::new(r, r, z, z),
        variant: Variant::SecularVectorized,
        params: p,
        alignment: None,
    }
}

/// Non-secular beam equations with ρ_gg eliminated in every row.
pub fn build_nonsecular_direct<T: Real>(params: &SystemParams<T>) -> Generator<T> {
    let p = checked(params);
    let (a, d) = nonsecular_beam_retained(&p).eliminate_ground();
    Generator {
        a,
        d,
        variant: Variant::NonSecularDirect,
        params: p,
        alignment: None,
    }
}

/// Secular beam equations with ρ_gg eliminated. Numerically identical to
/// [`build_secular_vectorized`].
pub fn build_secular_direct<T: Real>(params: &SystemParams<T>) -> Generator<T> {
    let p = checked(params);
    let (a, d) = secular_beam_retained(&p).eliminate_ground();
    Generator {
        a,
        d,
        variant: Variant::SecularDirect,
        params: p,
        alignment: None,
    }
}

/// Isotropic radiation with equal rates γ₁ = γ₂ = γ and r₁ = r₂ = r.
pub fn build_isotropic<T: Real>(
    params: &SystemParams<T>,
    alignment: T,
    secular: bool,
) -> Result<Generator<T>> {
    params.validate()?;
    let rates = IsotropicRates {
        gamma1: params.gamma,
        gamma2: params.gamma,
        r1: params.r,
        r2: params.r,
        delta: params.delta,
    };
    let (a, d) = isotropic_retained(&rates, alignment, secular)?.eliminate_ground();
    Ok(Generator {
        a,
        d,
        variant: if secular {
            Variant::IsotropicSecular
        } else {
            Variant::IsotropicNonSecular
        },
        params: *params,
        alignment: Some(alignment),
    })
}

/// Dispatch on [`Variant`]. `alignment` is only read by isotropic variants.
pub fn build<T: Real>(
    variant: Variant,
    params: &SystemParams<T>,
    alignment: T,
) -> Result<Generator<T>> {
    params.validate()?;
    Ok(match variant {
        Variant::NonSecularVectorized => build_nonsecular_vectorized(params),
        Variant::SecularVectorized => build_secular_vectorized(params),
        Variant::NonSecularDirect => build_nonsecular_direct(params),
        Variant::SecularDirect => build_secular_direct(params),
        Variant::IsotropicNonSecular => build_isotropic(params, alignment, false)?,
        Variant::IsotropicSecular => build_isotropic(params, alignment, true)?,
    })
}

impl<T: Real> Generator<T> {
    /// Generator from raw parts, bypassing every physical constructor.
    pub fn from_parts(a: Mat4<T>, d: Vec4<T>, variant: Variant, params: SystemParams<T>) -> Self {
        Self {
            a,
            d,
            variant,
            params,
            alignment: None,
        }
    }

    /// `Aρ + d`.
    pub fn rhs(&self, rho: &Vec4<T>) -> Vec4<T> {
        self.a.mul_vec(rho) + self.d
    }

    /// Population-coherence blocks of `A` are exactly zero.
    pub fn is_block_diagonal(&self) -> bool {
        (0..2).all(|i| (2..4).all(|j| self.a[(i, j)] == T::zero() && self.a[(j, i)] == T::zero()))
    }

    pub fn eigenvalues(&self) -> Vec<Complex<T>> {
        eigen::eigenvalues(&self.a)
    }

    /// Largest eigenvalue real part; negative for a strictly stable generator.
    pub fn spectral_abscissa(&self) -> T {
        self.eigenvalues()
            .iter()
            .fold(T::neg_infinity(), |m, z| m.max(z.re))
    }

    pub fn cast<U: Real>(&self) -> Generator<U> {
        Generator {
            a: self.a.cast(),
            d: self.d.cast(),
            variant: self.variant,
            params: self.params.cast(),
            alignment: self.alignment.map(|x| U::lit(x.to_f64_lossy())),
        }
    }
}

/// Monic quartic `λ⁴ + c₁λ³ + c₂λ² + c₃λ + c₄`, coefficients in descending degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharPoly<T> {
    pub coefficients: [T; 5],
}

impl<T: Real> CharPoly<T> {
    fn from_poly(p: &Poly<T>) -> Self {
        let c = p.coeffs();
        assert_eq!(c.len(), 5, "characteristic polynomial must be quartic");
        let lead = c[0];
        Self {
            coefficients: std::array::from_fn(|i| if i == 0 { T::one() } else { c[i] / lead }),
        }
    }

    pub fn as_poly(&self) -> Poly<T> {
        Poly::new(self.coefficients.to_vec())
    }

    pub fn eval(&self, x: T) -> T {
        self.as_poly().eval(x)
    }

    pub fn eval_complex(&self, z: Complex<T>) -> Complex<T> {
        self.as_poly().eval_complex(z)
    }

    pub fn roots(&self) -> Vec<Complex<T>> {
        self.as_poly().roots()
    }

    /// Remainder of division by `(λ + shift)`, i.e. the value at `−shift`.
    pub fn remainder_by_linear(&self, shift: T) -> T {
        self.as_poly().deflate(-shift).1
    }

    /// Largest coefficientwise relative difference, `|a − b| / max(|a|, |b|)`.
    pub fn max_relative_difference(&self, other: &Self) -> T {
        self.coefficients
            .iter()
            .zip(other.coefficients.iter())
            .map(|(a, b)| {
                let scale = a.abs().max(b.abs());
                if scale == T::zero() {
                    T::zero()
                } else {
                    (*a - *b).abs() / scale
                }
            })
            .fold(T::zero(), T::max)
    }

    /// Non-secular factored form: (λ+γ+r)[x³ + 2r x² + (Δ²−r²) x + 2rΔ²] with x = λ+γ+r.
    pub fn nonsecular_factored(params: &SystemParams<T>) -> Self {
        let (r, dl) = (params.r, params.delta);
        let x = Poly::linear(params.gamma + r);
        let two = T::lit(2.0);
        let x2 = x.mul(&x);
        let x3 = x2.mul(&x);
        let cubic = x3
            .add(&x2.scale(two * r))
            .add(&x.scale(dl * dl - r * r))
            .add(&Poly::new(vec![two * r * dl * dl]));
        Self::from_poly(&x.mul(&cubic))
    }

    /// Secular biquadratic form as printed: [x² + Δ²][x² + r²], x = λ+γ+r.
    pub fn secular_factored_printed(params: &SystemParams<T>) -> Self {
        let (r, dl) = (params.r, params.delta);
        let x = Poly::linear(params.gamma + r);
        let x2 = x.mul(&x);
        let coh = x2.add(&Poly::new(vec![dl * dl]));
        let pop = x2.add(&Poly::new(vec![r * r]));
        Self::from_poly(&coh.mul(&pop))
    }

    /// Factorisation of the secular matrix's actual characteristic
    /// polynomial: [x² + Δ²](λ+γ+r)(λ+γ+3r), x = λ+γ+r.
    pub fn secular_factored_exact(params: &SystemParams<T>) -> Self {
        let (g, r, dl) = (params.gamma, params.r, params.delta);
        let x = Poly::linear(g + r);
        let coh = x.mul(&x).add(&Poly::new(vec![dl * dl]));
        let pop = Poly::linear(g + r).mul(&Poly::linear(g + T::lit(3.0) * r));
        Self::from_poly(&coh.mul(&pop))
    }
}

/// `det(λI − A)` from sums of principal minors.
pub fn char_poly<T: Real>(gen: &Generator<T>) -> CharPoly<T> {
    char_poly_of(&gen.a)
}

pub fn char_poly_of<T: Real>(a: &Mat4<T>) -> CharPoly<T> {
    let m = &a.0;
    let mut e2 = T::zero();
    for i in 0..4 {
        for j in i + 1..4 {
            e2 += m[i][i] * m[j][j] - m[i][j] * m[j][i];
        }
    }
    let mut e3 = T::zero();
    for skip in 0..4 {
        let idx: Vec<usize> = (0..4).filter(|&k| k != skip).collect();
        let (p, q, s) = (idx[0], idx[1], idx[2]);
        e3 += m[p][p] * (m[q][q] * m[s][s] - m[q][s] * m[s][q])
            - m[p][q] * (m[q][p] * m[s][s] - m[q][s] * m[s][p])
            + m[p][s] * (m[q][p] * m[s][q] - m[q][q] * m[s][p]);
    }
    CharPoly {
        coefficients: [T::one(), -a.trace(), e2, -e3, a.det()],
    }
}
