//! Dense row-major complex matrices with just the kernels the simulator
//! needs: products, Gram matrices, traces and a Cholesky resolvent.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{for_each_row, ExecMode};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// `rows x cols` matrix with `diag` on the leading diagonal.
    pub fn from_diag(rows: usize, cols: usize, diag: &[f64]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &d) in diag.iter().enumerate().take(rows.min(cols)) {
            m.data[i * cols + i] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::domain(format!(
                "{} entries do not fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &CMatrix, s: f64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::domain("matrix shapes differ"));
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b * s)
                .collect(),
        })
    }

    /// `self - s I`.
    pub fn shift_diag(&self, s: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out.data[i * self.cols + i] -= s;
        }
        out
    }

    pub fn mul(&self, other: &CMatrix, mode: ExecMode) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::domain(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        let (k_dim, n_cols) = (self.cols, other.cols);
        for_each_row(mode, &mut out.data, n_cols, |i, row| {
            let a = &self.data[i * k_dim..(i + 1) * k_dim];
            for (k, aik) in a.iter().enumerate() {
                if aik.re == 0.0 && aik.im == 0.0 {
                    continue;
                }
                let b = &other.data[k * n_cols..(k + 1) * n_cols];
                for (o, bkj) in row.iter_mut().zip(b) {
                    *o += aik * bkj;
                }
            }
        });
        Ok(out)
    }

    /// `s * self * self^*`, exactly Hermitian.
    pub fn gram_rows(&self, s: f64, mode: ExecMode) -> Self {
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for_each_row(mode, &mut out.data, n, |i, row| {
            let a = self.row(i);
            for (j, o) in row.iter_mut().enumerate() {
                let b = self.row(j);
                let mut acc = Complex64::new(0.0, 0.0);
                for (x, y) in a.iter().zip(b) {
                    acc += x * y.conj();
                }
                *o = acc * s;
            }
        });
        out
    }

    /// `s * self^* * self`.
    pub fn gram_cols(&self, s: f64, mode: ExecMode) -> Self {
        self.adjoint().gram_rows(s, mode)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.data[i * self.cols + i])
            .sum()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_of_product(&self, other: &CMatrix) -> Result<Complex64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::domain("trace of product needs compatible shapes"));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += self.data[i * self.cols + j] * other.data[j * other.cols + i];
            }
        }
        Ok(acc)
    }

    /// `tr((self - x I)^{-1})` for Hermitian `self` with `self - x I`
    /// positive definite, via Cholesky and `||L^{-1}||_F^2`.
    pub fn resolvent_trace(&self, x: f64) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::domain("resolvent needs a square matrix"));
        }
        let n = self.rows;
        let a = self.shift_diag(x);
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = a.data[j * n + j].re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > 0.0) {
                return Err(Error::domain(format!(
                    "matrix minus {x} I is not positive definite"
                )));
            }
            let d = d.sqrt();
            l[j * n + j] = Complex64::new(d, 0.0);
            for i in (j + 1)..n {
                let mut s = a.data[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / d;
            }
        }
        // Columns of L^{-1} by forward substitution.
        let mut total = 0.0;
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for col in 0..n {
            y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            for i in col..n {
                let mut s = if i == col {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                for k in col..i {
                    s -= l[i * n + k] * y[k];
                }
                y[i] = s / l[i * n + i].re;
                total += y[i].norm_sqr();
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> CMatrix {
        CMatrix::from_vec(
            2,
            3,
            vec![c(1.0, 0.5), c(-2.0, 0.0), c(0.0, 1.0), c(0.3, -0.2), c(1.0, 1.0), c(2.0, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn gram_matches_product() {
        let a = sample();
        let g = a.gram_rows(0.5, ExecMode::Sequential);
        let p = a.mul(&a.adjoint(), ExecMode::Sequential).unwrap().scale(0.5);
        for (x, y) in g.data().iter().zip(p.data()) {
            assert!((x - y).norm() < 1e-14);
        }
        assert_eq!(g.get(0, 1), g.get(1, 0).conj());
        let gc = a.gram_cols(1.0, ExecMode::Parallel);
        assert_eq!(gc.rows(), 3);
        assert!((gc.trace() - a.gram_rows(1.0, ExecMode::Parallel).trace()).norm() < 1e-13);
    }

    #[test]
    fn trace_of_product_matches() {
        let a = sample();
        let b = a.adjoint();
        let full = a.mul(&b, ExecMode::Sequential).unwrap().trace();
        assert!((a.trace_of_product(&b).unwrap() - full).norm() < 1e-14);
    }

    #[test]
    fn resolvent_of_diagonal() {
        let d = CMatrix::from_diag(3, 3, &[1.0, 2.0, 4.0]);
        let t = d.resolvent_trace(-1.0).unwrap();
        assert!((t - (0.5 + 1.0 / 3.0 + 0.2)).abs() < 1e-15);
        assert!(d.resolvent_trace(1.5).is_err());
    }

    #[test]
    fn resolvent_of_dense_hermitian() {
        let a = sample();
        let g = a.gram_rows(1.0, ExecMode::Sequential); // 2x2 Hermitian PSD
        // eigenvalues of 2x2 Hermitian [[p, q], [q*, r]]
        let (p, r, q) = (g.get(0, 0).re, g.get(1, 1).re, g.get(0, 1));
        let mean = 0.5 * (p + r);
        let rad = (0.25 * (p - r) * (p - r) + q.norm_sqr()).sqrt();
        let (l1, l2) = (mean - rad, mean + rad);
        let x = -0.7;
        let expect = 1.0 / (l1 - x) + 1.0 / (l2 - x);
        assert!((g.resolvent_trace(x).unwrap() - expect).abs() < 1e-13);
    }

    #[test]
    fn shape_errors() {
        let a = sample();
        assert!(a.mul(&a, ExecMode::Sequential).is_err());
        assert!(CMatrix::from_vec(2, 2, vec![c(0.0, 0.0); 3]).is_err());
    }
}
