//! Dense complex matrices of dimension 2 or 4 and a Jacobi Hermitian eigensolver.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;

use super::NumError;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. Panics if the length is not a square.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), dim * dim, "expected {} entries", dim * dim);
        Self { dim, data }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// 2x2 matrix from its rows.
    pub fn new2(rows: [[C64; 2]; 2]) -> Self {
        Self::from_fn(2, |i, j| rows[i][j])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Determinant; only implemented for 2x2 matrices.
    pub fn det2(&self) -> C64 {
        assert_eq!(self.dim, 2, "det2 needs a 2x2 matrix");
        self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)]
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest deviation from Hermiticity, max |a_ij - conj(a_ji)|.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| self[(i, k)] * rhs[(k, j)]).sum())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// The `i`-th eigenvector as a plain vector.
    pub fn vector(&self, i: usize) -> Vec<C64> {
        (0..self.vectors.dim()).map(|r| self.vectors[(r, i)]).collect()
    }
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen, NumError> {
    let n = m.dim();
    let scale = m.max_abs().max(1.0);
    let defect = m.hermitian_defect();
    if defect > 1e-12 * scale {
        return Err(NumError::NotHermitian(defect));
    }
    // Symmetrize so tiny asymmetries do not leak into the rotations.
    let mut a = ComplexMatrix::from_fn(n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
    let mut v = ComplexMatrix::identity(n);
    let norm = a.norm_fro();

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * norm || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                // Phase that makes the (p, q) entry real and positive.
                let phase = C64::from_polar(1.0, -apq.arg());
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = D R with D = diag(.., phase at q, ..) and a real plane rotation R.
                let mut g = ComplexMatrix::identity(n);
                g[(p, p)] = C64::new(c, 0.0);
                g[(p, q)] = C64::new(s, 0.0);
                g[(q, p)] = -phase * s;
                g[(q, q)] = phase * c;
                a = &(&g.dagger() * &a) * &g;
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                v = &v * &g;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_input() {
        let m = ComplexMatrix::new2([[c(1.0, 0.0), ZERO], [ZERO, c(2.0, 0.0)]]);
        let e = eig_hermitian(&m).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0]);
        assert!((e.vectors[(0, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(1, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_x() {
        let m = ComplexMatrix::new2([[ZERO, ONE], [ONE, ZERO]]);
        let e = eig_hermitian(&m).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.vector(0);
        // (1, -1)/sqrt 2 up to a phase
        let overlap = v0[0] * s - v0[1] * s;
        assert!((overlap.norm() - 1.0).abs() < 1e-14);
        let v1 = e.vector(1);
        let overlap = v1[0] * s + v1[1] * s;
        assert!((overlap.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::new2([[ZERO, ONE], [ZERO, ZERO]]);
        assert!(matches!(eig_hermitian(&m), Err(NumError::NotHermitian(_))));
    }

    #[test]
    fn complex_offdiagonal() {
        // sigma_y has eigenvalues -1, +1
        let m = ComplexMatrix::new2([[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]]);
        let e = eig_hermitian(&m).unwrap();
        for (k, &lam) in e.values.iter().enumerate() {
            let v = e.vector(k);
            let mv = m.mul_vec(&v);
            for i in 0..2 {
                assert!((mv[i] - v[i] * lam).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn det_and_trace() {
        let m = ComplexMatrix::new2([[c(1.0, 0.0), c(2.0, 1.0)], [c(3.0, 0.0), c(4.0, -1.0)]]);
        assert_eq!(m.trace(), c(5.0, -1.0));
        assert_eq!(m.det2(), c(1.0, 0.0) * c(4.0, -1.0) - c(2.0, 1.0) * c(3.0, 0.0));
    }
}
