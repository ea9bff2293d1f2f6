//! Small dense complex matrices for pointwise symbols (2×2, 4×4).

use num_complex::Complex64 as C64;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n);
            for (j, &v) in r.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Single-entry matrix `e_{ij}`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m[(i, j)] = ONE;
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn kron(&self, other: &CMat) -> Self {
        let (a, b) = (self.n, other.n);
        Self::from_fn(a * b, |i, j| self[(i / b, j / b)] * other[(i % b, j % b)])
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == ZERO)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.norm()))
    }

    /// Largest entry of `|A - A^*|`.
    pub fn hermiticity_defect(&self) -> f64 {
        (self - &self.adjoint()).max_abs()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).fold(ZERO, |acc, j| acc + self[(i, j)] * v[j]))
            .collect()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn to_faer(&self) -> faer::Mat<C64> {
        faer::Mat::from_fn(self.n, self.n, |i, j| self[(i, j)])
    }

    /// Hermitian eigendecomposition: ascending eigenvalues, eigenvectors as columns.
    pub fn eigh(&self) -> (Vec<f64>, Vec<Vec<C64>>) {
        let h = faer::Mat::from_fn(self.n, self.n, |i, j| {
            // symmetrize against round-off in user-built symbols
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        });
        let e = h
            .self_adjoint_eigen(faer::Side::Lower)
            .expect("small Hermitian eigensolve");
        let vals = (0..self.n).map(|i| e.S()[i].re).collect();
        let vecs = (0..self.n)
            .map(|j| (0..self.n).map(|i| e.U()[(i, j)]).collect())
            .collect();
        (vals, vecs)
    }

    pub fn eigvalsh(&self) -> Vec<f64> {
        self.eigh().0
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, o: &CMat) -> CMat {
        assert_eq!(self.n, o.n);
        CMat {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, o: &CMat) -> CMat {
        assert_eq!(self.n, o.n);
        CMat {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, o: &CMat) -> CMat {
        assert_eq!(self.n, o.n);
        let n = self.n;
        CMat::from_fn(n, |i, j| (0..n).fold(ZERO, |acc, k| acc + self[(i, k)] * o[(k, j)]))
    }
}

pub fn sigma0() -> CMat {
    CMat::identity(2)
}

pub fn sigma1() -> CMat {
    CMat::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
}

pub fn sigma2() -> CMat {
    CMat::from_rows(&[&[ZERO, -I], &[I, ZERO]])
}

pub fn sigma3() -> CMat {
    CMat::from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]])
}

/// `A = [[0,1],[0,0]]`.
pub fn raising() -> CMat {
    CMat::unit(2, 0, 1)
}

pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

pub fn vnorm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let (s1, s2, s3) = (sigma1(), sigma2(), sigma3());
        assert_eq!(&s1 * &s2, s3.scale(I));
        assert_eq!(&s1 * &s1, CMat::identity(2));
        let k = s2.kron(&s1);
        assert_eq!(k.dim(), 4);
        assert_eq!(&k * &k, CMat::identity(4));
        let a = raising();
        assert_eq!((&s1 + &s2.scale(I)).scale_re(0.5), a);
    }

    #[test]
    fn eigh_of_pauli_sum() {
        let h = &sigma1().scale_re(3.0) + &sigma2().scale_re(4.0);
        let (vals, vecs) = h.eigh();
        assert!((vals[0] + 5.0).abs() < 1e-13 && (vals[1] - 5.0).abs() < 1e-13);
        let hv = h.apply(&vecs[1]);
        assert!(hv.iter().zip(&vecs[1]).all(|(a, b)| (a - b * 5.0).norm() < 1e-12));
    }
}
