//! Eigen-decomposition of real 4×4 generators.
//!
//! Eigenvalues come from a Hessenberg reduction followed by Francis
//! double-shift QR (the EISPACK `hqr` scheme), which stays accurate for
//! the exactly degenerate spectra met at Δ = 0. Eigenvectors are null
//! vectors of `A − λI` obtained by complete-pivoting elimination; clusters
//! of equal eigenvalues get a full null-space basis or are reported as
//! defective.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Mat4;
use crate::scalar::Real;

const N: usize = 4;

pub type CMat4<T> = [[Complex<T>; N]; N];
pub type CVec4<T> = [Complex<T>; N];

fn c<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// In-place reduction to upper Hessenberg form by stabilised elementary
/// similarity transforms.
fn hessenberg<T: Real>(a: &mut [[T; N]; N]) {
    for m in 1..N - 1 {
        let mut x = T::zero();
        let mut piv = m;
        for j in m..N {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                piv = j;
            }
        }
        if piv != m {
            for j in (m - 1)..N {
                let tmp = a[piv][j];
                a[piv][j] = a[m][j];
                a[m][j] = tmp;
            }
            for row in a.iter_mut() {
                row.swap(piv, m);
            }
        }
        if x != T::zero() {
            for i in m + 1..N {
                let mut y = a[i][m - 1];
                if y != T::zero() {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..N {
                        let t = a[m][j];
                        a[i][j] -= y * t;
                    }
                    for row in a.iter_mut() {
                        let t = row[i];
                        row[m] += y * t;
                    }
                }
            }
        }
    }
    for i in 2..N {
        for j in 0..i - 1 {
            a[i][j] = T::zero();
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix (destroys `a`).
fn hqr<T: Real>(a: &mut [[T; N]; N]) -> Vec<Complex<T>> {
    let mut wr = [T::zero(); N];
    let mut wi = [T::zero(); N];
    let mut anorm = T::zero();
    for i in 0..N {
        for j in i.saturating_sub(1)..N {
            anorm += a[i][j].abs();
        }
    }
    macro_rules! at {
        ($i:expr, $j:expr) => {
            a[($i) as usize][($j) as usize]
        };
    }
    let half = T::lit(0.5);
    let mut nn: isize = N as isize - 1;
    let mut t = T::zero();
    while nn >= 0 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 1 {
                let mut s = at!(l - 1, l - 1).abs() + at!(l, l).abs();
                if s == T::zero() {
                    s = anorm;
                }
                if at!(l, l - 1).abs() + s == s {
                    at!(l, l - 1) = T::zero();
                    break;
                }
                l -= 1;
            }
            let mut x = at!(nn, nn);
            if l == nn {
                wr[nn as usize] = x + t;
                wi[nn as usize] = T::zero();
                nn -= 1;
                break;
            }
            let mut y = at!(nn - 1, nn - 1);
            let mut w = at!(nn, nn - 1) * at!(nn - 1, nn);
            if l == nn - 1 {
                let p = half * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                let (i0, i1) = ((nn - 1) as usize, nn as usize);
                if q >= T::zero() {
                    z = p + sign(z, p);
                    wr[i0] = x + z;
                    wr[i1] = x + z;
                    if z != T::zero() {
                        wr[i1] = x - w / z;
                    }
                    wi[i0] = T::zero();
                    wi[i1] = T::zero();
                } else {
                    wr[i0] = x + p;
                    wr[i1] = x + p;
                    wi[i0] = -z;
                    wi[i1] = z;
                }
                nn -= 2;
                break;
            }
            if its >= 60 {
                // Not observed for 4×4 generators; fall back to what we have.
                for i in 0..=nn as usize {
                    wr[i] = a[i][i] + t;
                    wi[i] = T::zero();
                }
                nn = -1;
                break;
            }
            if its == 10 || its == 20 {
                t += x;
                for i in 0..=nn {
                    at!(i, i) -= x;
                }
                let s = at!(nn, nn - 1).abs() + at!(nn - 1, nn - 2).abs();
                x = T::lit(0.75) * s;
                y = x;
                w = T::lit(-0.4375) * s * s;
            }
            its += 1;

            let mut m = nn - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = at!(m, m);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / at!(m + 1, m) + at!(m, m + 1);
                q = at!(m + 1, m + 1) - z - rr - ss;
                r = at!(m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = at!(m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (at!(m - 1, m - 1).abs() + z.abs() + at!(m + 1, m + 1).abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                at!(i, i - 2) = T::zero();
                if i != m + 2 {
                    at!(i, i - 3) = T::zero();
                }
            }
            let mut xk = T::zero();
            for k in m..nn {
                if k != m {
                    p = at!(k, k - 1);
                    q = at!(k + 1, k - 1);
                    r = T::zero();
                    if k != nn - 1 {
                        r = at!(k + 2, k - 1);
                    }
                    xk = p.abs() + q.abs() + r.abs();
                    if xk != T::zero() {
                        p /= xk;
                        q /= xk;
                        r /= xk;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != T::zero() {
                    if k == m {
                        if l != m {
                            at!(k, k - 1) = -at!(k, k - 1);
                        }
                    } else {
                        at!(k, k - 1) = -s * xk;
                    }
                    p += s;
                    let xx = p / s;
                    let yy = q / s;
                    let zz = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        let mut pp = at!(k, j) + q * at!(k + 1, j);
                        if k != nn - 1 {
                            pp += r * at!(k + 2, j);
                            at!(k + 2, j) -= pp * zz;
                        }
                        at!(k + 1, j) -= pp * yy;
                        at!(k, j) -= pp * xx;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = xx * at!(i, k) + yy * at!(i, k + 1);
                        if k != nn - 1 {
                            pp += zz * at!(i, k + 2);
                            at!(i, k + 2) -= pp * r;
                        }
                        at!(i, k + 1) -= pp * q;
                        at!(i, k) -= pp;
                    }
                }
            }
        }
    }
    (0..N).map(|i| Complex::new(wr[i], wi[i])).collect()
}

/// Eigenvalues of a real 4×4 matrix, sorted by (real, imaginary) part.
pub fn eigenvalues<T: Real>(a: &Mat4<T>) -> Vec<Complex<T>> {
    let mut h = a.0;
    hessenberg(&mut h);
    let mut ev = hqr(&mut h);
    sort_complex(&mut ev);
    ev
}

pub fn sort_complex<T: Real>(v: &mut [Complex<T>]) {
    v.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Group values closer than `tol` (single linkage).
pub fn clusters<T: Real>(values: &[Complex<T>], tol: T) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (from, to) = (label[j], label[i]);
                for l in label.iter_mut() {
                    if *l == from {
                        *l = to;
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match groups.iter_mut().find(|g| label[g[0]] == label[i]) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    groups
}

/// True when two multisets agree to `tol` after pairing clusters by mean.
pub fn multisets_match<T: Real>(
    a: &[Complex<T>],
    b: &[Complex<T>],
    cluster_tol: T,
    tol: T,
) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mean = |vals: &[Complex<T>], idx: &[usize]| {
        idx.iter().fold(c(T::zero()), |s, &i| s + vals[i]) / c(T::from_usize(idx.len()).unwrap())
    };
    let ga = clusters(a, cluster_tol);
    let mut gb: Vec<(Complex<T>, usize, bool)> = clusters(b, cluster_tol)
        .iter()
        .map(|g| (mean(b, g), g.len(), false))
        .collect();
    for g in &ga {
        let m = mean(a, g);
        let hit = gb
            .iter_mut()
            .filter(|(_, n, used)| !*used && *n == g.len())
            .min_by(|x, y| (x.0 - m).norm().partial_cmp(&(y.0 - m).norm()).unwrap());
        match hit {
            Some(entry) if (entry.0 - m).norm() <= tol => entry.2 = true,
            _ => return false,
        }
    }
    true
}

/// Null-space basis of `m` assuming nullity `k`. Returns `None` when the
/// trailing block after `4 − k` complete-pivoting steps exceeds `tol`.
fn null_space<T: Real>(m: &CMat4<T>, k: usize, tol: T) -> Option<Vec<CVec4<T>>> {
    let mut a = *m;
    let mut cols: [usize; N] = [0, 1, 2, 3];
    let rank = N - k;
    for step in 0..rank {
        let (mut pi, mut pj, mut best) = (step, step, T::zero());
        for i in step..N {
            for j in step..N {
                let v = a[i][j].norm();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if best == T::zero() {
            return None;
        }
        a.swap(step, pi);
        for row in a.iter_mut() {
            row.swap(step, pj);
        }
        cols.swap(step, pj);
        for i in step + 1..N {
            let f = a[i][step] / a[step][step];
            for j in step..N {
                let u = a[step][j];
                a[i][j] = a[i][j] - f * u;
            }
        }
    }
    let trailing = (rank..N)
        .flat_map(|i| (rank..N).map(move |j| (i, j)))
        .fold(T::zero(), |mx, (i, j)| mx.max(a[i][j].norm()));
    if trailing > tol {
        return None;
    }
    let mut basis = Vec::with_capacity(k);
    for free in rank..N {
        let mut y = [c(T::zero()); N];
        y[free] = c(T::one());
        for i in (0..rank).rev() {
            let mut s = c(T::zero());
            for j in i + 1..N {
                s = s + a[i][j] * y[j];
            }
            y[i] = -s / a[i][i];
        }
        let mut v = [c(T::zero()); N];
        for (pos, &col) in cols.iter().enumerate() {
            v[col] = y[pos];
        }
        basis.push(v);
    }
    Some(basis)
}

/// Unit null vector of `A − λI`, if that matrix is numerically singular.
pub fn null_vector<T: Real>(a: &Mat4<T>, lambda: Complex<T>) -> Option<CVec4<T>> {
    let scale = T::one().max(a.norm1());
    let shifted: CMat4<T> = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let d = if i == j { lambda } else { c(T::zero()) };
            c(a.0[i][j]) - d
        })
    });
    let mut v = null_space(&shifted, 1, T::tol(1e-9) * scale)?.pop()?;
    normalize(&mut v);
    Some(v)
}

fn normalize<T: Real>(v: &mut CVec4<T>) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    // Fix the phase so the largest component is real and positive.
    let big = *v
        .iter()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .unwrap();
    let phase = big.conj() / c(big.norm());
    for z in v.iter_mut() {
        *z = *z * phase / c(norm);
    }
}

fn cmat_mul_vec<T: Real>(a: &Mat4<T>, v: &CVec4<T>) -> CVec4<T> {
    std::array::from_fn(|i| (0..N).fold(c(T::zero()), |s, j| s + v[j] * a.0[i][j]))
}

/// Inverse of a complex 4×4 matrix by Gauss–Jordan with partial pivoting.
pub fn complex_inverse<T: Real>(m: &CMat4<T>) -> Option<CMat4<T>> {
    let mut a = *m;
    let mut inv: CMat4<T> = std::array::from_fn(|i| {
        std::array::from_fn(|j| if i == j { c(T::one()) } else { c(T::zero()) })
    });
    for col in 0..N {
        let piv = (col..N)
            .max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap())
            .unwrap();
        if a[piv][col].norm() == T::zero() {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..N {
            a[col][j] = a[col][j] / d;
            inv[col][j] = inv[col][j] / d;
        }
        for i in 0..N {
            if i != col {
                let f = a[i][col];
                if f.norm() != T::zero() {
                    for j in 0..N {
                        let (u, w) = (a[col][j], inv[col][j]);
                        a[i][j] = a[i][j] - f * u;
                        inv[i][j] = inv[i][j] - f * w;
                    }
                }
            }
        }
    }
    Some(inv)
}

fn cnorm1<T: Real>(m: &CMat4<T>) -> T {
    (0..N)
        .map(|j| (0..N).map(|i| m[i][j].norm()).sum::<T>())
        .fold(T::zero(), T::max)
}

/// Right eigenvectors (columns of `V`), left eigenvectors (rows of `V⁻¹`),
/// eigenvalues and per-pair residuals.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralDecomposition<T> {
    pub eigenvalues: [Complex<T>; N],
    /// `eigenvectors[i]` is the unit right eigenvector for `eigenvalues[i]`.
    pub eigenvectors: [CVec4<T>; N],
    /// `left[i]` is row `i` of `V⁻¹`, so `left[i]·eigenvectors[j] = δᵢⱼ`.
    pub left: [CVec4<T>; N],
    /// `‖Av − λv‖ / ‖v‖`.
    pub residuals: [T; N],
    /// 1-norm condition number of `V`.
    pub condition: T,
}

/// Eigenbases with a condition number above this are rejected.
pub const MAX_CONDITION: f64 = 1e8;

/// Decompose `a`. Fails with [`Error::IllConditioned`] when the matrix is
/// (numerically) defective or the eigenbasis condition exceeds
/// [`MAX_CONDITION`].
pub fn decompose<T: Real>(a: &Mat4<T>) -> Result<SpectralDecomposition<T>> {
    let scale = T::one().max(a.norm1());
    let ev = eigenvalues(a);
    let cluster_tol = T::tol(1e-8) * scale;
    let null_tol = T::tol(1e-9) * scale;

    let mut values = Vec::with_capacity(N);
    let mut vectors = Vec::with_capacity(N);
    for group in clusters(&ev, cluster_tol) {
        let k = group.len();
        let lambda =
            group.iter().fold(c(T::zero()), |s, &i| s + ev[i]) / c(T::from_usize(k).unwrap());
        let shifted: CMat4<T> = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let d = if i == j { lambda } else { c(T::zero()) };
                c(a.0[i][j]) - d
            })
        });
        let basis = null_space(&shifted, k, null_tol).ok_or(Error::IllConditioned {
            condition: f64::INFINITY,
        })?;
        for mut v in basis {
            normalize(&mut v);
            values.push(lambda);
            vectors.push(v);
        }
    }

    let v_mat: CMat4<T> = std::array::from_fn(|i| std::array::from_fn(|j| vectors[j][i]));
    let inv = complex_inverse(&v_mat).ok_or(Error::IllConditioned {
        condition: f64::INFINITY,
    })?;
    let condition = cnorm1(&v_mat) * cnorm1(&inv);
    if !(condition.to_f64_lossy() <= MAX_CONDITION) {
        return Err(Error::IllConditioned {
            condition: condition.to_f64_lossy(),
        });
    }

    let residuals: [T; N] = std::array::from_fn(|i| {
        let av = cmat_mul_vec(a, &vectors[i]);
        (0..N)
            .map(|k| (av[k] - values[i] * vectors[i][k]).norm_sqr())
            .sum::<T>()
            .sqrt()
    });

    Ok(SpectralDecomposition {
        eigenvalues: std::array::from_fn(|i| values[i]),
        eigenvectors: std::array::from_fn(|i| vectors[i]),
        left: inv,
        residuals,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_contains(set: &[Complex<f64>], z: Complex<f64>, tol: f64) -> bool {
        set.iter().any(|w| (w - z).norm() < tol)
    }

    #[test]
    fn diagonal_spectrum() {
        let a = Mat4::from_diag([-3.0, 1.0, 2.5, -0.5]);
        let ev = eigenvalues(&a);
        for x in [-3.0, 1.0, 2.5, -0.5] {
            assert!(approx_contains(&ev, Complex::new(x, 0.0), 1e-14));
        }
    }

    #[test]
    fn rotation_block_gives_complex_pair() {
        let a = Mat4([
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, -2.0, 0.0, 0.0],
            [0.0, 0.0, -1.5, 12.0],
            [0.0, 0.0, -12.0, -1.5],
        ]);
        let ev = eigenvalues(&a);
        assert!(approx_contains(&ev, Complex::new(-1.5, 12.0), 1e-13));
        assert!(approx_contains(&ev, Complex::new(-1.5, -12.0), 1e-13));
    }

    #[test]
    fn dense_nonsymmetric_matches_polynomial_roots() {
        let a = Mat4([
            [1.0, 2.0, -1.0, 0.5],
            [0.3, -1.0, 4.0, 2.0],
            [-2.0, 0.1, 0.0, 1.0],
            [1.5, -0.7, 0.2, -3.0],
        ]);
        let ev = eigenvalues(&a);
        let cp = crate::generators::char_poly_of(&a);
        for z in &ev {
            assert!(cp.eval_complex(*z).norm() < 1e-11, "{z}");
        }
        assert!(multisets_match(&ev, &cp.roots(), 1e-6, 1e-10));
    }

    #[test]
    fn decomposition_reconstructs_matrix() {
        let a = Mat4([
            [-1.1f64, -0.1, -0.1, 0.0],
            [-0.1, -1.1, -0.1, 0.0],
            [-0.05, -0.05, -1.05, 2.0],
            [0.0, 0.0, -2.0, -1.05],
        ]);
        let sd = decompose(&a).unwrap();
        for r in sd.residuals {
            assert!(r < 1e-13);
        }
        // V Λ V⁻¹ = A
        for i in 0..4 {
            for j in 0..4 {
                let z = (0..4).fold(Complex::new(0.0, 0.0), |s, k| {
                    s + sd.eigenvectors[k][i] * sd.eigenvalues[k] * sd.left[k][j]
                });
                assert!((z.re - a.0[i][j]).abs() < 1e-13 && z.im.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn degenerate_but_diagonalizable() {
        let a = Mat4::<f64>::identity().scale(-1.0);
        let sd = decompose(&a).unwrap();
        assert!(sd.eigenvalues.iter().all(|z| (z + 1.0).norm() < 1e-15));
        assert!(sd.condition < 10.0);
    }

    #[test]
    fn jordan_block_is_rejected() {
        let a = Mat4([
            [-1.0, 1.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
            [0.0, 0.0, -2.0, 0.0],
            [0.0, 0.0, 0.0, -3.0],
        ]);
        assert!(matches!(decompose(&a), Err(Error::IllConditioned { .. })));
    }
}
