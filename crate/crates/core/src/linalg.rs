//! Dense complex LU with partial pivoting for the small systems of the
//! multipoint problem.

use num_complex::Complex64;

use crate::error::{FaddeevError, Result};

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn lu(&self) -> Lu {
        let n = self.n;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for col in 0..n {
            let (p, pmax) = (col..n)
                .map(|r| (r, a[r * n + col].norm()))
                .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                singular = true;
                continue;
            }
            if p != col {
                for j in 0..n {
                    a.swap(p * n + j, col * n + j);
                }
                perm.swap(p, col);
                sign = -sign;
            }
            let pivot = a[col * n + col];
            for r in col + 1..n {
                let factor = a[r * n + col] / pivot;
                a[r * n + col] = factor;
                for j in col + 1..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= factor * v;
                }
            }
        }
        Lu {
            n,
            lu: a,
            perm,
            sign,
            singular,
        }
    }
}

/// Packed LU factors, `P A = L U` with unit lower `L`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub fn det(&self) -> Complex64 {
        if self.singular {
            return Complex64::new(0.0, 0.0);
        }
        (0..self.n).fold(Complex64::new(self.sign, 0.0), |acc, i| acc * self.lu[i * self.n + i])
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.singular {
            return Err(FaddeevError::SingularSystem);
        }
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.lu[i * n + i];
        }
        Ok(x)
    }

    /// Infinity-norm condition number from the explicit inverse; n is small.
    pub fn condition_inf(&self, a: &CMatrix) -> f64 {
        if self.singular {
            return f64::INFINITY;
        }
        let n = self.n;
        let mut inv_norm: f64 = 0.0;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            match self.solve(&e) {
                Ok(c) => cols.push(c),
                Err(_) => return f64::INFINITY,
            }
        }
        for i in 0..n {
            let row: f64 = cols.iter().map(|c| c[i].norm()).sum();
            inv_norm = inv_norm.max(row);
        }
        a.norm_inf() * inv_norm
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solves_and_determinant_of_a_3x3() {
        let rows = [
            [c(0.0, 1.0), c(2.0, 0.0), c(1.0, -1.0)],
            [c(3.0, 0.0), c(-1.0, 2.0), c(0.5, 0.0)],
            [c(1.0, 1.0), c(0.0, 0.0), c(2.0, 3.0)],
        ];
        let a = CMatrix::from_fn(3, |i, j| rows[i][j]);
        let lu = a.lu();
        // cofactor expansion
        let det = rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
            - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
            + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]);
        assert!((lu.det() - det).norm() < 1e-13);
        let b = vec![c(1.0, 0.0), c(0.0, 1.0), c(-2.0, 0.5)];
        let x = lu.solve(&b).unwrap();
        let r = a.mul_vec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).norm() < 1e-13);
        }
        assert!(lu.condition_inf(&a) >= 1.0);
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = CMatrix::from_fn(2, |i, j| if i == j { c(0.0, 0.0) } else { c(1.0, 0.0) });
        let lu = a.lu();
        assert!((lu.det() + 1.0).norm() < 1e-15);
        let x = lu.solve(&[c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert!((x[0] - 3.0).norm() < 1e-15 && (x[1] - 2.0).norm() < 1e-15);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = CMatrix::from_fn(2, |_, _| c(1.0, 0.0));
        let lu = a.lu();
        assert_eq!(lu.det(), c(0.0, 0.0));
        assert!(lu.solve(&[c(1.0, 0.0), c(1.0, 0.0)]).is_err());
    }
}
