//! Angle-resolved fluorescence of the V-system and the wedge detectors
//! that separate populations from coherences.
//!
//! Intensities are in units of the overall prefactor I₀. With the
//! quantization axis along z the angular distribution is
//!
//! ```text
//! I(θ, φ) = (1 + cos²θ)/2 (ρ₁₁ + ρ₂₂) + sin²θ (cos 2φ Re ρ₁₂ − sin 2φ Im ρ₁₂)
//! ```
//!
//! The printed source repeats `Re ρ₁₂` in the last term. Only the `Im ρ₁₂`
//! reading reproduces the B-wedge results, so that reading is used here;
//! the quadrature tests confirm it.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::quadrature::Rule;
use crate::scalar::Real;
use crate::solvers::{StateVector, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DetectorKind {
    FullSphere,
    WedgeA,
    WedgeAPrime,
    WedgeB,
    WedgeBPrime,
    Custom,
}

impl DetectorKind {
    pub const NAMED: [DetectorKind; 5] = [
        DetectorKind::FullSphere,
        DetectorKind::WedgeA,
        DetectorKind::WedgeAPrime,
        DetectorKind::WedgeB,
        DetectorKind::WedgeBPrime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::FullSphere => "full",
            DetectorKind::WedgeA => "A",
            DetectorKind::WedgeAPrime => "A'",
            DetectorKind::WedgeB => "B",
            DetectorKind::WedgeBPrime => "B'",
            DetectorKind::Custom => "custom",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "full" | "z" | "full-sphere" => Some(DetectorKind::FullSphere),
            "A" | "a" => Some(DetectorKind::WedgeA),
            "A'" | "a'" | "a-prime" => Some(DetectorKind::WedgeAPrime),
            "B" | "b" => Some(DetectorKind::WedgeB),
            "B'" | "b'" | "b-prime" => Some(DetectorKind::WedgeBPrime),
            _ => None,
        }
    }
}

/// Solid-angle region: a union of azimuth intervals in `[0, 2π]` crossed
/// with one polar interval in `[0, π]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectorGeometry<T> {
    pub kind: DetectorKind,
    pub phi_ranges: Vec<(T, T)>,
    pub theta_range: (T, T),
}

impl<T: Real> DetectorGeometry<T> {
    /// One of the five named detectors.
    pub fn named(kind: DetectorKind) -> Result<Self> {
        let q = T::FRAC_PI_4();
        let k = |n: f64| q * T::lit(n);
        let phi_ranges = match kind {
            DetectorKind::FullSphere => vec![(T::zero(), T::TAU())],
            // φ ∈ [−π/4, π/4] ∪ [3π/4, 5π/4], wrapped into [0, 2π].
            DetectorKind::WedgeA => vec![(T::zero(), k(1.0)), (k(3.0), k(5.0)), (k(7.0), T::TAU())],
            DetectorKind::WedgeAPrime => vec![(k(1.0), k(3.0)), (k(5.0), k(7.0))],
            DetectorKind::WedgeB => vec![(T::zero(), k(2.0)), (k(4.0), k(6.0))],
            DetectorKind::WedgeBPrime => vec![(k(2.0), k(4.0)), (k(6.0), T::TAU())],
            DetectorKind::Custom => return domain("custom geometries need explicit ranges"),
        };
        Ok(Self {
            kind,
            phi_ranges,
            theta_range: (T::zero(), T::PI()),
        })
    }

    pub fn custom(phi_ranges: Vec<(T, T)>, theta_range: (T, T)) -> Result<Self> {
        let g = Self {
            kind: DetectorKind::Custom,
            phi_ranges,
            theta_range,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.phi_ranges.is_empty() {
            return Err(Error::EmptyGeometry);
        }
        let (tl, th) = self.theta_range;
        if !(tl >= T::zero() && th <= T::PI() && tl < th) {
            return domain("θ range must be a nonempty interval inside [0, π]");
        }
        let mut sorted = self.phi_ranges.clone();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        for &(lo, hi) in &sorted {
            if !(lo >= T::zero() && hi <= T::TAU() && lo < hi) {
                return domain("φ ranges must be nonempty intervals inside [0, 2π]");
            }
        }
        if sorted.windows(2).any(|w| w[1].0 < w[0].1) {
            return domain("φ ranges overlap");
        }
        Ok(())
    }
}

/// Emitted intensity in direction `(θ, φ)` per unit solid angle.
pub fn intensity_kernel<T: Real>(state: &StateVector<T>, theta: T, phi: T) -> Result<T> {
    if !(theta >= T::zero() && theta <= T::PI()) {
        return domain(format!("θ = {theta} outside [0, π]"));
    }
    if !(phi >= T::zero() && phi <= T::TAU()) {
        return domain(format!("φ = {phi} outside [0, 2π]"));
    }
    Ok(kernel(state, theta.cos(), phi))
}

/// The kernel with `u = cos θ`.
fn kernel<T: Real>(s: &StateVector<T>, u: T, phi: T) -> T {
    let two_phi = T::lit(2.0) * phi;
    let sin2 = T::one() - u * u;
    T::lit(0.5) * (T::one() + u * u) * s.excited_population()
        + sin2 * (two_phi.cos() * s.coh_re - two_phi.sin() * s.coh_im)
}

const THETA_NODES: usize = 16;
const PHI_NODES: usize = 12;
const QUAD_REL_TOL: f64 = 1e-12;

/// Numerical integral of the kernel over the geometry. The polar integrand
/// is a quadratic in `cos θ`, so a 16-point rule in `cos θ` is exact; the
/// azimuth is integrated adaptively.
pub fn integrate_detector<T: Real>(
    state: &StateVector<T>,
    geometry: &DetectorGeometry<T>,
) -> Result<T> {
    geometry.validate()?;
    let theta_rule = Rule::<T>::new(THETA_NODES);
    let phi_rule = Rule::<T>::new(PHI_NODES);
    let (tl, th) = geometry.theta_range;
    let (u_lo, u_hi) = (th.cos(), tl.cos());
    let scale = state.excited_population().abs() + state.coherence_abs();
    let floor = T::lit(1e-3) * T::lit(QUAD_REL_TOL) * scale.max(T::min_positive_value());
    let mut total = T::zero();
    for &(lo, hi) in &geometry.phi_ranges {
        total += phi_rule.integrate_adaptive(lo, hi, T::lit(QUAD_REL_TOL), floor, &mut |phi| {
            theta_rule.integrate(u_lo, u_hi, |u| {
                let theta = u.max(-T::one()).min(T::one()).acos();
                intensity_kernel(state, theta, phi).expect("nodes lie inside the detector")
            })
        });
    }
    Ok(total)
}

/// Closed-form detector integrals. `None` for custom geometries.
pub fn closed_form<T: Real>(state: &StateVector<T>, kind: DetectorKind) -> Option<T> {
    let iz = T::lit(8.0) * T::PI() / T::lit(3.0) * state.excited_population();
    let half = T::lit(0.5) * iz;
    let c = T::lit(8.0 / 3.0);
    Some(match kind {
        DetectorKind::FullSphere => iz,
        DetectorKind::WedgeA => half + c * state.coh_re,
        DetectorKind::WedgeAPrime => half - c * state.coh_re,
        DetectorKind::WedgeB => half - c * state.coh_im,
        DetectorKind::WedgeBPrime => half + c * state.coh_im,
        DetectorKind::Custom => return None,
    })
}

/// How a [`DetectorSignal`] was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignalMethod {
    ClosedForm,
    Quadrature,
}

/// Detector readings along a trajectory, in units of I₀.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectorSignal<T> {
    pub times: Vec<T>,
    pub i_z: Vec<T>,
    pub i_a: Vec<T>,
    pub i_b: Vec<T>,
    pub i_a_prime: Vec<T>,
    pub i_b_prime: Vec<T>,
    /// `I_A − I_A′ = (16/3) Re ρ₁₂`.
    pub diff_re: Vec<T>,
    /// `I_B′ − I_B = (16/3) Im ρ₁₂`.
    pub diff_im: Vec<T>,
}

impl<T: Real> DetectorSignal<T> {
    pub fn from_trajectory(traj: &Trajectory<T>, method: SignalMethod) -> Result<Self> {
        let n = traj.len();
        let mut sig = Self {
            times: traj.times.clone(),
            i_z: Vec::with_capacity(n),
            i_a: Vec::with_capacity(n),
            i_b: Vec::with_capacity(n),
            i_a_prime: Vec::with_capacity(n),
            i_b_prime: Vec::with_capacity(n),
            diff_re: Vec::with_capacity(n),
            diff_im: Vec::with_capacity(n),
        };
        let geometries = match method {
            SignalMethod::Quadrature => Some(
                DetectorKind::NAMED
                    .iter()
                    .map(|&k| DetectorGeometry::named(k))
                    .collect::<Result<Vec<_>>>()?,
            ),
            SignalMethod::ClosedForm => None,
        };
        for s in &traj.states {
            let v: Vec<T> = match &geometries {
                Some(gs) => gs
                    .iter()
                    .map(|g| integrate_detector(s, g))
                    .collect::<Result<_>>()?,
                None => DetectorKind::NAMED
                    .iter()
                    .map(|&k| closed_form(s, k).unwrap())
                    .collect(),
            };
            sig.i_z.push(v[0]);
            sig.i_a.push(v[1]);
            sig.i_a_prime.push(v[2]);
            sig.i_b.push(v[3]);
            sig.i_b_prime.push(v[4]);
            sig.diff_re.push(v[1] - v[2]);
            sig.diff_im.push(v[4] - v[3]);
        }
        Ok(sig)
    }

    /// Largest violation of `I_A + I_A′ = I_z`, `I_B + I_B′ = I_z`.
    pub fn complementarity_error(&self) -> T {
        (0..self.i_z.len()).fold(T::zero(), |m, k| {
            m.max((self.i_a[k] + self.i_a_prime[k] - self.i_z[k]).abs())
                .max((self.i_b[k] + self.i_b_prime[k] - self.i_z[k]).abs())
        })
    }

    pub fn min_i_z(&self) -> T {
        self.i_z.iter().copied().fold(T::infinity(), T::min)
    }
}

/// `(I_A − I_A′, I_B′ − I_B)`.
pub fn difference_signals<T: Real>(signal: &DetectorSignal<T>) -> Result<(Vec<T>, Vec<T>)> {
    let n = signal.times.len();
    let lens = [
        signal.i_z.len(),
        signal.i_a.len(),
        signal.i_b.len(),
        signal.i_a_prime.len(),
        signal.i_b_prime.len(),
    ];
    if lens.iter().any(|&l| l != n) {
        return Err(Error::LengthMismatch(format!(
            "{n} times but series lengths {lens:?}"
        )));
    }
    let re = (0..n)
        .map(|k| signal.i_a[k] - signal.i_a_prime[k])
        .collect();
    let im = (0..n)
        .map(|k| signal.i_b_prime[k] - signal.i_b[k])
        .collect();
    Ok((re, im))
}

/// Relative depth of quantum beats in the total fluorescence,
/// `2|ρ₁₂| / (π(ρ₁₁ + ρ₂₂))`.
pub fn beat_contrast<T: Real>(state: &StateVector<T>) -> Result<T> {
    let pop = state.excited_population();
    if !(pop > T::zero()) {
        return Err(Error::ZeroPopulation);
    }
    Ok(T::lit(2.0) * state.coherence_abs() / (T::PI() * pop))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn sample() -> StateVector<f64> {
        StateVector::new(0.012, 0.009, 0.004, -0.0061)
    }

    #[test]
    fn on_axis_sees_populations_only() {
        let s = sample();
        let got = intensity_kernel(&s, 0.0, 1.234).unwrap();
        assert!((got - 0.021).abs() < 1e-17);
    }

    #[test]
    fn equatorial_direction() {
        let s = StateVector::new(0.01, 0.01, 0.003, 0.0);
        let got = intensity_kernel(&s, FRAC_PI_2, 0.0).unwrap();
        assert!((got - (0.01 + 0.003)).abs() < 1e-17);
    }

    #[test]
    fn angle_domain() {
        let s = sample();
        assert!(intensity_kernel(&s, -0.1, 0.0).is_err());
        assert!(intensity_kernel(&s, PI + 1e-9, 0.0).is_err());
        assert!(intensity_kernel(&s, 1.0, TAU + 1e-9).is_err());
        assert!(intensity_kernel(&s, 1.0, f64::NAN).is_err());
        assert!(intensity_kernel(&s, PI, TAU).is_ok());
    }

    #[test]
    fn full_sphere_quadrature() {
        let s = sample();
        let g = DetectorGeometry::named(DetectorKind::FullSphere).unwrap();
        let got = integrate_detector(&s, &g).unwrap();
        assert!((got - 8.0 * PI / 3.0 * 0.021).abs() < 1e-12);
    }

    #[test]
    fn wedges_match_closed_forms() {
        let s = sample();
        for kind in DetectorKind::NAMED {
            let g = DetectorGeometry::named(kind).unwrap();
            let q = integrate_detector(&s, &g).unwrap();
            let c = closed_form(&s, kind).unwrap();
            assert!((q - c).abs() <= 1e-10 * c.abs(), "{kind:?}: {q} vs {c}");
        }
    }

    #[test]
    fn wedge_a_worked_value() {
        let s = StateVector::new(0.01, 0.01, 0.005, 0.0);
        let expect = 0.5 * (8.0 * PI / 3.0) * 0.02 + (8.0 / 3.0) * 0.005;
        assert!((closed_form(&s, DetectorKind::WedgeA).unwrap() - expect).abs() < 1e-17);
    }

    #[test]
    fn geometry_checks() {
        assert!(matches!(
            DetectorGeometry::<f64>::custom(vec![], (0.0, PI)),
            Err(Error::EmptyGeometry)
        ));
        assert!(DetectorGeometry::custom(vec![(0.0, 1.0), (0.5, 2.0)], (0.0, PI)).is_err());
        assert!(DetectorGeometry::custom(vec![(0.0, 7.0)], (0.0, PI)).is_err());
        assert!(DetectorGeometry::custom(vec![(0.0, 1.0)], (0.0, 3.5)).is_err());
        assert!(DetectorGeometry::custom(vec![(1.0, 1.0)], (0.0, PI)).is_err());
        assert!(DetectorGeometry::<f64>::named(DetectorKind::Custom).is_err());
        for kind in DetectorKind::NAMED {
            DetectorGeometry::<f64>::named(kind)
                .unwrap()
                .validate()
                .unwrap();
        }
    }

    #[test]
    fn custom_upper_hemisphere_is_half_of_iz() {
        let s = sample();
        let g = DetectorGeometry::custom(vec![(0.0, TAU)], (0.0, FRAC_PI_2)).unwrap();
        let got = integrate_detector(&s, &g).unwrap();
        assert!((got - 0.5 * closed_form(&s, DetectorKind::FullSphere).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn contrast_values() {
        let s = StateVector::new(0.01, 0.01, 0.01, 0.0);
        assert!((beat_contrast(&s).unwrap() - 1.0 / PI).abs() < 1e-15);
        let half = StateVector::new(0.01, 0.01, 0.005, 0.0);
        assert!((beat_contrast(&half).unwrap() - 0.5 / PI).abs() < 1e-15);
        assert_eq!(
            beat_contrast(&StateVector::new(0.01, 0.01, 0.0, 0.0)).unwrap(),
            0.0
        );
        assert!(matches!(
            beat_contrast(&StateVector::<f64>::ground()),
            Err(Error::ZeroPopulation)
        ));
    }

    #[test]
    fn length_mismatch_is_reported() {
        let sig = DetectorSignal {
            times: vec![0.0, 1.0],
            i_z: vec![0.0, 1.0],
            i_a: vec![0.0],
            i_b: vec![0.0, 0.5],
            i_a_prime: vec![0.0, 0.5],
            i_b_prime: vec![0.0, 0.5],
            diff_re: vec![],
            diff_im: vec![],
        };
        assert!(matches!(
            difference_signals(&sig),
            Err(Error::LengthMismatch(_))
        ));
    }
}
