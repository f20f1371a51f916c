//! Dense real polynomials with complex root finding.

use num_complex::Complex;

use crate::scalar::Real;

/// Polynomial with real coefficients stored in descending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Real> Poly<T> {
    /// Coefficients in descending degree; leading zeros are trimmed.
    pub fn new(coeffs: Vec<T>) -> Self {
        let first = coeffs.iter().position(|c| *c != T::zero());
        let coeffs = match first {
            Some(i) => coeffs[i..].to_vec(),
            None => vec![T::zero()],
        };
        Self { coeffs }
    }

    /// `λ + a`.
    pub fn linear(a: T) -> Self {
        Self::new(vec![T::one(), a])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += *a * *b;
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let pad = |c: &[T]| {
            let mut v = vec![T::zero(); n - c.len()];
            v.extend_from_slice(c);
            v
        };
        let (a, b) = (pad(&self.coeffs), pad(&other.coeffs));
        Self::new(a.iter().zip(&b).map(|(x, y)| *x + *y).collect())
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.coeffs.iter().map(|c| *c * s).collect())
    }

    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, c| acc * x + *c)
    }

    pub fn eval_complex(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, c| acc * z + *c)
    }

    pub fn derivative(&self) -> Self {
        let n = self.degree();
        if n == 0 {
            return Self::new(vec![T::zero()]);
        }
        Self::new(
            self.coeffs[..n]
                .iter()
                .enumerate()
                .map(|(i, c)| *c * T::from_usize(n - i).unwrap())
                .collect(),
        )
    }

    /// Synthetic division by `λ − root`; returns quotient and remainder.
    pub fn deflate(&self, root: T) -> (Self, T) {
        let mut q = Vec::with_capacity(self.coeffs.len());
        let mut acc = T::zero();
        for c in &self.coeffs {
            acc = acc * root + *c;
            q.push(acc);
        }
        let rem = q.pop().unwrap();
        (Self::new(q), rem)
    }

    /// All complex roots by Aberth–Ehrlich iteration followed by Newton
    /// polishing. A root of multiplicity `m` is only resolved to roughly
    /// `ε^(1/m)`.
    pub fn roots(&self) -> Vec<Complex<T>> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.coeffs[0];
        let monic = self.scale(T::one() / lead);
        let dp = monic.derivative();
        let c = monic.coeffs();

        // Cauchy bound for the initial circle.
        let radius = T::one() + c[1..].iter().fold(T::zero(), |m, x| m.max(x.abs()));
        let centre = -c[1] / T::from_usize(n).unwrap();
        let mut z: Vec<Complex<T>> = (0..n)
            .map(|k| {
                let angle = T::TAU() * (T::from_usize(k).unwrap() + T::lit(0.25))
                    / T::from_usize(n).unwrap();
                Complex::new(centre, T::zero()) + Complex::from_polar(radius * T::lit(0.5), angle)
            })
            .collect();

        let tol = T::epsilon() * T::lit(4.0);
        for _ in 0..500 {
            let mut max_step = T::zero();
            for i in 0..n {
                let p = monic.eval_complex(z[i]);
                let d = dp.eval_complex(z[i]);
                if p.norm() == T::zero() {
                    continue;
                }
                let ratio = p / d;
                let repulsion: Complex<T> = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| {
                        let diff = z[i] - z[j];
                        if diff.norm() == T::zero() {
                            Complex::new(T::zero(), T::zero())
                        } else {
                            diff.inv()
                        }
                    })
                    .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b);
                let denom = Complex::new(T::one(), T::zero()) - ratio * repulsion;
                let step = if denom.norm() == T::zero() {
                    ratio
                } else {
                    ratio / denom
                };
                if !step.re.is_finite() || !step.im.is_finite() {
                    continue;
                }
                z[i] = z[i] - step;
                let scale = T::one().max(z[i].norm());
                max_step = max_step.max(step.norm() / scale);
            }
            if max_step <= tol {
                break;
            }
        }

        // Newton polish on the full polynomial, skipping clustered roots
        // where it would only scatter the cluster.
        let snapshot = z.clone();
        for (i, zi) in z.iter_mut().enumerate() {
            let scale = T::one().max(zi.norm());
            let clustered = snapshot
                .iter()
                .enumerate()
                .any(|(j, w)| j != i && (*w - *zi).norm() < T::lit(1e-4) * scale);
            if clustered {
                continue;
            }
            for _ in 0..3 {
                let d = dp.eval_complex(*zi);
                if d.norm() == T::zero() {
                    break;
                }
                let step = monic.eval_complex(*zi) / d;
                if !(step.re.is_finite() && step.im.is_finite()) {
                    break;
                }
                let candidate = *zi - step;
                if monic.eval_complex(candidate).norm() <= monic.eval_complex(*zi).norm() {
                    *zi = candidate;
                } else {
                    break;
                }
            }
        }
        z
    }

    /// Roots with clusters (points closer than `cluster_tol`) collapsed to
    /// a single value of matching multiplicity. An `m`-fold root is a
    /// simple root of the `(m−1)`-th derivative, so Newton on that
    /// derivative recovers it to full precision.
    pub fn roots_clustered(&self, cluster_tol: T) -> Vec<Complex<T>> {
        let mut z = self.roots();
        for group in crate::eigen::clusters(&z, cluster_tol) {
            let m = group.len();
            if m < 2 {
                continue;
            }
            let mut deriv = self.clone();
            for _ in 0..m - 1 {
                deriv = deriv.derivative();
            }
            let d2 = deriv.derivative();
            let mut mu = group
                .iter()
                .fold(Complex::new(T::zero(), T::zero()), |s, &i| s + z[i])
                / T::from_usize(m).unwrap();
            for _ in 0..50 {
                let slope = d2.eval_complex(mu);
                if slope.norm() == T::zero() {
                    break;
                }
                let step = deriv.eval_complex(mu) / slope;
                mu = mu - step;
                if step.norm() <= T::epsilon() * T::one().max(mu.norm()) {
                    break;
                }
            }
            for &i in &group {
                z[i] = mu;
            }
        }
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expand_and_evaluate() {
        // (λ+1)(λ+2) = λ² + 3λ + 2
        let p = Poly::linear(1.0).mul(&Poly::linear(2.0));
        assert_eq!(p.coeffs(), &[1.0, 3.0, 2.0]);
        assert_eq!(p.eval(1.0), 6.0);
    }

    #[test]
    fn deflation_remainder_is_value() {
        let p = Poly::new(vec![1.0f64, -2.0, 0.5, 3.0, -1.0]);
        let (_, rem) = p.deflate(0.7);
        assert!((rem - p.eval(0.7)).abs() < 1e-15);
    }

    #[test]
    fn roots_of_separated_quartic() {
        // roots −1, −2, −1 ± 3i
        let p = Poly::linear(1.0)
            .mul(&Poly::linear(2.0))
            .mul(&Poly::new(vec![1.0, 2.0, 10.0]));
        let mut r = p.roots();
        r.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        let expect = [
            Complex::new(-2.0, 0.0),
            Complex::new(-1.0, -3.0),
            Complex::new(-1.0, 0.0),
            Complex::new(-1.0, 3.0),
        ];
        for (a, b) in r.iter().zip(expect.iter()) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn clustered_roots_recover_multiplicity() {
        let p = Poly::new(vec![1.0f64, 4.0, 6.0, 4.0, 1.0]);
        for z in p.roots_clustered(1e-3) {
            assert!((z + 1.0).norm() < 1e-14, "{z}");
        }
        // (x+1)²(x²+9): a double root next to a simple pair.
        let q = Poly::linear(1.0f64)
            .mul(&Poly::linear(1.0))
            .mul(&Poly::new(vec![1.0, 0.0, 9.0]));
        let r = q.roots_clustered(1e-5);
        assert_eq!(r.iter().filter(|z| (*z + 1.0).norm() < 1e-14).count(), 2);
        assert_eq!(
            r.iter()
                .filter(|z| (z.im.abs() - 3.0).abs() < 1e-12)
                .count(),
            2
        );
    }

    #[test]
    fn quadruple_root_cluster_stays_near_root() {
        let p = Poly::new(vec![1.0, 4.0, 6.0, 4.0, 1.0]);
        let r = p.roots();
        let mean = r.iter().fold(Complex::new(0.0, 0.0), |a, b| a + b) / 4.0;
        assert!(
            (mean - Complex::new(-1.0, 0.0)).norm() < 1e-5,
            "{mean} {r:?}"
        );
        assert!(r.iter().all(|z| (z + 1.0).norm() < 1e-3));
    }
}
