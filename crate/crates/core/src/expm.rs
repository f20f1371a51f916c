//! Matrix exponential by scaling and squaring with diagonal Padé approximants.
//!
//! Degree selection and the θ thresholds follow Higham (2005), "The Scaling
//! and Squaring Method for the Matrix Exponential Revisited". The thresholds
//! bound the backward error by the f64 unit roundoff.

use crate::linalg::Mat4;
use crate::scalar::Real;

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `exp(A)` for a 4×4 real matrix.
pub fn expm<T: Real>(a: &Mat4<T>) -> Mat4<T> {
    let norm = a.norm1().to_f64_lossy();
    let eye = Mat4::identity();
    if norm == 0.0 {
        return eye;
    }
    for (theta, b) in [
        (THETA_3, &B3[..]),
        (THETA_5, &B5[..]),
        (THETA_7, &B7[..]),
        (THETA_9, &B9[..]),
    ] {
        if norm <= theta {
            return pade_low(a, b);
        }
    }

    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a.scale(T::lit(2f64.powi(-s)));
    let mut r = pade13(&scaled);
    for _ in 0..s {
        r = r * r;
    }
    r
}

fn pade_low<T: Real>(a: &Mat4<T>, b: &[f64]) -> Mat4<T> {
    let eye = Mat4::identity();
    let a2 = *a * *a;
    let mut even = eye.scale(T::lit(b[0]));
    let mut odd = eye.scale(T::lit(b[1]));
    let mut power = eye;
    let m = b.len() - 1;
    for k in 1..=m / 2 {
        power = power * a2;
        even = even + power.scale(T::lit(b[2 * k]));
        if 2 * k < m {
            odd = odd + power.scale(T::lit(b[2 * k + 1]));
        }
    }
    let u = *a * odd;
    quotient(&u, &even)
}

fn pade13<T: Real>(a: &Mat4<T>) -> Mat4<T> {
    let b = |i: usize| T::lit(B13[i]);
    let eye = Mat4::identity();
    let a2 = *a * *a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let u_inner = a6.scale(b(13)) + a4.scale(b(11)) + a2.scale(b(9));
    let u =
        *a * (a6 * u_inner + a6.scale(b(7)) + a4.scale(b(5)) + a2.scale(b(3)) + eye.scale(b(1)));
    let v_inner = a6.scale(b(12)) + a4.scale(b(10)) + a2.scale(b(8));
    let v = a6 * v_inner + a6.scale(b(6)) + a4.scale(b(4)) + a2.scale(b(2)) + eye.scale(b(0));
    quotient(&u, &v)
}

/// `(V − U)⁻¹ (V + U)`.
fn quotient<T: Real>(u: &Mat4<T>, v: &Mat4<T>) -> Mat4<T> {
    let p = *v + *u;
    let q = *v - *u;
    let lu = q
        .lu(T::epsilon())
        .expect("Padé denominator is nonsingular inside the θ bounds");
    let cols: [[T; 4]; 4] = std::array::from_fn(|j| {
        let col = crate::linalg::Vec4(std::array::from_fn(|i| p.0[i][j]));
        lu.solve(&col).0
    });
    Mat4(cols).transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Truncated Taylor series with many terms, valid for small norms.
    fn taylor(a: &Mat4<f64>) -> Mat4<f64> {
        let mut term = Mat4::identity();
        let mut sum = Mat4::identity();
        for k in 1..60 {
            term = (term * *a).scale(1.0 / k as f64);
            sum = sum + term;
        }
        sum
    }

    #[test]
    fn zero_matrix_gives_identity() {
        assert_eq!(expm(&Mat4::<f64>::zeros()), Mat4::identity());
    }

    #[test]
    fn diagonal_matches_scalar_exp() {
        let d = [-1.0f64, -0.5, 2.0, -30.0];
        let e = expm(&Mat4::from_diag(d));
        for i in 0..4 {
            let rel = (e.0[i][i] - d[i].exp()).abs() / d[i].exp();
            assert!(rel < 1e-13, "{i}: {rel}");
        }
    }

    #[test]
    fn rotation_block() {
        // exp([[0, w], [-w, 0]] t) is a rotation.
        let w = 12.0f64;
        let t = 3.1;
        let mut a = Mat4::<f64>::zeros();
        a.0[2][3] = w * t;
        a.0[3][2] = -w * t;
        let e = expm(&a);
        assert!((e.0[2][2] - (w * t).cos()).abs() < 1e-12);
        assert!((e.0[2][3] - (w * t).sin()).abs() < 1e-12);
        assert!((e.0[0][0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn agrees_with_taylor_for_each_degree() {
        let base = Mat4([
            [-0.3, 0.1, 0.2, 0.0],
            [0.05, -0.4, 0.1, 0.3],
            [0.0, 0.2, -0.1, 0.5],
            [0.1, 0.0, -0.5, -0.2],
        ]);
        for s in [0.01, 0.2, 0.8, 1.8, 4.0, 9.0] {
            let a = base.scale(s);
            let diff = (expm(&a) - taylor(&a)).max_abs();
            assert!(diff < 1e-13, "scale {s}: {diff}");
        }
    }

    #[test]
    fn exp_of_sum_of_commuting_parts() {
        let a = Mat4([
            [-1.0, 0.3, 0.0, 0.0],
            [0.3, -1.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, 12.0],
            [0.0, 0.0, -12.0, -1.0],
        ])
        .scale(2.0);
        let half = expm(&a.scale(0.5));
        let full = expm(&a);
        assert!((half * half - full).max_abs() < 1e-14 * full.max_abs());
    }
}
