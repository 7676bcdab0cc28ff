//! Dense complex matrices.
//!
//! Carrier type for channels, beamformers and codebooks. Entries are stored
//! row-major. Sizes in this simulator are small (at most a few thousand by a
//! few dozen), so the implementation favors clarity over blocking tricks.

use num_complex::Complex64;

use crate::error::{Result, SimError};

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Builds a matrix from a row-major entry vector, checking shape and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(SimError::DimensionMismatch {
                context: "ComplexMatrix::from_vec",
                expected: format!("{} entries", rows * cols),
                found: format!("{}", data.len()),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SimError::NonFinite { what: "matrix entry" });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Column vector from a slice.
    pub fn column(entries: &[Complex64]) -> Self {
        Self {
            rows: entries.len(),
            cols: 1,
            data: entries.to_vec(),
        }
    }

    /// Row vector from a slice.
    pub fn row(entries: &[Complex64]) -> Self {
        Self {
            rows: 1,
            cols: entries.len(),
            data: entries.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Row `i` as a slice (row-major storage makes this free).
    pub fn row_slice(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(SimError::DimensionMismatch {
                context: "matrix multiply",
                expected: format!("lhs cols = rhs rows ({})", self.cols),
                found: format!("{}", rhs.rows),
            });
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let lhs_row = self.row_slice(i);
            for k in 0..self.cols {
                let a = lhs_row[k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let rhs_row = rhs.row_slice(k);
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product where `v` is an `n x 1` column.
    pub fn mul_vec(&self, v: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.mul(v)
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    /// Euclidean norm for vectors (either orientation).
    pub fn vec_norm(&self) -> f64 {
        self.frobenius_norm()
    }

    /// Inner product `self^H other` for two vectors of equal length.
    pub fn vec_dot(&self, other: &ComplexMatrix) -> Result<Complex64> {
        if self.data.len() != other.data.len() {
            return Err(SimError::DimensionMismatch {
                context: "vector dot",
                expected: format!("{}", self.data.len()),
                found: format!("{}", other.data.len()),
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.frobenius_norm_sq() <= tol * tol
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}
