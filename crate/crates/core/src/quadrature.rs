//! Gauss–Legendre rules and an adaptive bisection driver.

use crate::scalar::Real;

/// Nodes and weights of the `n`-point rule on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1, "a rule needs at least one node");
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::from_usize(n).unwrap();
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n.
        let k = T::from_usize(i).unwrap();
        let mut x = (T::PI() * (k + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= T::epsilon() * T::lit(2.0) {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != T::zero() {
            dp = d;
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    (nodes, weights)
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_usize(k).unwrap();
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let nf = T::from_usize(n).unwrap();
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Fixed rule mapped to `[a, b]`.
#[derive(Debug, Clone)]
pub struct Rule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> Rule<T> {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
        let half = T::lit(0.5) * (b - a);
        let mid = T::lit(0.5) * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<T>()
            * half
    }

    /// Bisects until the rule on each half agrees with the rule on the
    /// whole to `rel_tol` (relative to the running total, floored by
    /// `abs_floor`).
    pub fn integrate_adaptive(
        &self,
        a: T,
        b: T,
        rel_tol: T,
        abs_floor: T,
        f: &mut impl FnMut(T) -> T,
    ) -> T {
        let whole = self.integrate(a, b, &mut *f);
        self.refine(a, b, whole, rel_tol, abs_floor, f, 0)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        a: T,
        b: T,
        whole: T,
        rel_tol: T,
        abs_floor: T,
        f: &mut impl FnMut(T) -> T,
        depth: usize,
    ) -> T {
        let m = T::lit(0.5) * (a + b);
        let left = self.integrate(a, m, &mut *f);
        let right = self.integrate(m, b, &mut *f);
        let split = left + right;
        let tol = (rel_tol * split.abs()).max(abs_floor);
        if (split - whole).abs() <= tol || depth >= 30 {
            return split;
        }
        self.refine(a, m, left, rel_tol, abs_floor, f, depth + 1)
            + self.refine(m, b, right, rel_tol, abs_floor, f, depth + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_are_roots() {
        for n in [1, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre::<f64>(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14, "n={n}");
            for &xi in &x {
                assert!(legendre(n, xi).0.abs() < 1e-13, "n={n}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn exact_for_degree_2n_minus_1() {
        let rule = Rule::<f64>::new(8);
        for k in 0..16 {
            let got = rule.integrate(0.0, 1.0, |x| x.powi(k));
            assert!((got - 1.0 / (k as f64 + 1.0)).abs() < 1e-15, "x^{k}");
        }
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let rule = Rule::<f64>::new(8);
        let got = rule.integrate_adaptive(0.0, 10.0, 1e-13, 1e-300, &mut |x| (7.0 * x).cos());
        assert!((got - (70.0f64).sin() / 7.0).abs() < 1e-13);
    }

    #[test]
    fn two_point_rule() {
        let (x, w) = gauss_legendre::<f64>(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(w.iter().all(|wi| (wi - 1.0).abs() < 1e-15));
    }
}
