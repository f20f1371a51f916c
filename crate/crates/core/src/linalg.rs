//! Fixed-size 4×4 real linear algebra.
//!
//! Every generator in this crate is a 4×4 real matrix acting on the excited
//! manifold vector `[ρ₁₁, ρ₂₂, Re ρ₁₂, Im ρ₁₂]`, so the kernels here are
//! specialised to that size and kept allocation free.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

pub const N: usize = 4;

/// Column vector of length 4.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec4<T>(pub [T; N]);

/// Row-major 4×4 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat4<T>(pub [[T; N]; N]);

impl<T: Real> Vec4<T> {
    pub fn zeros() -> Self {
        Self([T::zero(); N])
    }

    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self([a, b, c, d])
    }

    pub fn dot(&self, other: &Self) -> T {
        (0..N).map(|i| self.0[i] * other.0[i]).sum()
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.map(|x| x * s))
    }

    pub fn norm_inf(&self) -> T {
        self.0.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn norm2(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.0.iter()
    }

    pub fn cast<U: Real>(&self) -> Vec4<U> {
        Vec4(self.0.map(|x| U::lit(x.to_f64_lossy())))
    }
}

impl<T> Index<usize> for Vec4<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vec4<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Real> Add for Vec4<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl<T: Real> Sub for Vec4<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl<T: Real> Neg for Vec4<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|x| -x))
    }
}

impl<T: Real> Mat4<T> {
    pub fn zeros() -> Self {
        Self([[T::zero(); N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = T::one();
        }
        m
    }

    pub fn from_diag(d: [T; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn transpose(&self) -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[j][i])
        }))
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.map(|row| row.map(|x| x * s)))
    }

    pub fn mul_vec(&self, v: &Vec4<T>) -> Vec4<T> {
        Vec4(std::array::from_fn(|i| {
            (0..N).map(|j| self.0[i][j] * v.0[j]).sum()
        }))
    }

    pub fn trace(&self) -> T {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        (0..N)
            .map(|j| (0..N).map(|i| self.0[i][j].abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn cast<U: Real>(&self) -> Mat4<U> {
        Mat4(self.0.map(|row| row.map(|x| U::lit(x.to_f64_lossy()))))
    }

    /// LU factorisation with partial pivoting. Returns `None` when a pivot is
    /// smaller than `tiny · ‖A‖∞`.
    pub fn lu(&self, tiny: T) -> Option<Lu<T>> {
        Lu::factor(self, tiny)
    }

    pub fn solve(&self, b: &Vec4<T>) -> Option<Vec4<T>> {
        self.lu(T::epsilon()).map(|lu| lu.solve(b))
    }

    pub fn inverse(&self) -> Option<Self> {
        self.lu(T::epsilon()).map(|lu| lu.inverse())
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> T {
        let a = &self.0;
        let minor3 = |c0: usize, c1: usize, c2: usize| {
            a[1][c0] * (a[2][c1] * a[3][c2] - a[2][c2] * a[3][c1])
                - a[1][c1] * (a[2][c0] * a[3][c2] - a[2][c2] * a[3][c0])
                + a[1][c2] * (a[2][c0] * a[3][c1] - a[2][c1] * a[3][c0])
        };
        a[0][0] * minor3(1, 2, 3) - a[0][1] * minor3(0, 2, 3) + a[0][2] * minor3(0, 1, 3)
            - a[0][3] * minor3(0, 1, 2)
    }
}

impl<T> Index<(usize, usize)> for Mat4<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.0[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat4<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.0[i][j]
    }
}

impl<T: Real> Add for Mat4<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j] + rhs.0[i][j])
        }))
    }
}

impl<T: Real> Sub for Mat4<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j] - rhs.0[i][j])
        }))
    }
}

impl<T: Real> Mul for Mat4<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
        }))
    }
}

/// Packed LU factors `P·A = L·U`.
#[derive(Debug, Clone, Copy)]
pub struct Lu<T> {
    lu: [[T; N]; N],
    perm: [usize; N],
}

impl<T: Real> Lu<T> {
    fn factor(a: &Mat4<T>, tiny: T) -> Option<Self> {
        let scale =
            a.0.iter()
                .map(|r| r.iter().map(|x| x.abs()).sum::<T>())
                .fold(T::zero(), T::max);
        if scale == T::zero() {
            return None;
        }
        let mut lu = a.0;
        let mut perm = [0, 1, 2, 3];
        for k in 0..N {
            let p = (k..N)
                .max_by(|&i, &j| lu[i][k].abs().partial_cmp(&lu[j][k].abs()).unwrap())
                .unwrap();
            if lu[p][k].abs() <= tiny * scale {
                return None;
            }
            lu.swap(k, p);
            perm.swap(k, p);
            for i in k + 1..N {
                let f = lu[i][k] / lu[k][k];
                lu[i][k] = f;
                for j in k + 1..N {
                    let u = lu[k][j];
                    lu[i][j] -= f * u;
                }
            }
        }
        Some(Self { lu, perm })
    }

    pub fn solve(&self, b: &Vec4<T>) -> Vec4<T> {
        let mut x: [T; N] = std::array::from_fn(|i| b.0[self.perm[i]]);
        for i in 0..N {
            for j in 0..i {
                let l = self.lu[i][j];
                x[i] -= l * x[j];
            }
        }
        for i in (0..N).rev() {
            for j in i + 1..N {
                let u = self.lu[i][j];
                x[i] -= u * x[j];
            }
            x[i] /= self.lu[i][i];
        }
        Vec4(x)
    }

    pub fn inverse(&self) -> Mat4<T> {
        let mut cols = [[T::zero(); N]; N];
        for (j, col) in cols.iter_mut().enumerate() {
            let mut e = Vec4::zeros();
            e.0[j] = T::one();
            *col = self.solve(&e).0;
        }
        Mat4(cols).transpose()
    }

    /// Smallest absolute pivot, a cheap singularity indicator.
    pub fn min_pivot(&self) -> T {
        (0..N)
            .map(|i| self.lu[i][i].abs())
            .fold(T::infinity(), T::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Mat4<f64> {
        Mat4([
            [4.0, -2.0, 1.0, 0.5],
            [3.0, 6.0, -4.0, 2.0],
            [2.0, 1.0, 8.0, -1.0],
            [0.0, 1.5, -2.0, 5.0],
        ])
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = sample();
        let inv = a.inverse().unwrap();
        let prod = a * inv;
        assert!((prod - Mat4::identity()).max_abs() < 1e-14);
    }

    #[test]
    fn solve_matches_mul() {
        let a = sample();
        let x = Vec4::new(1.0, -2.0, 0.25, 3.0);
        let b = a.mul_vec(&x);
        let y = a.solve(&b).unwrap();
        assert!((y - x).norm_inf() < 1e-14);
    }

    #[test]
    fn singular_matrix_has_no_lu() {
        let mut a = sample();
        a.0[3] = a.0[0];
        assert!(a.inverse().is_none());
        assert!(a.det().abs() < 1e-12);
    }

    #[test]
    fn det_of_diagonal() {
        let a = Mat4::from_diag([2.0, -3.0, 0.5, 4.0]);
        assert_eq!(a.det(), -12.0);
    }
}
