//! Dense 2-D sample grids stored in row-major order.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A complex-valued image with explicit `(rows, cols)` dimensions.
///
/// Samples are stored row-major and are guaranteed finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexImage {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexImage {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        check_dims(rows, cols)?;
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} samples supplied for a {rows}x{cols} image",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite(format!(
                "sample ({}, {}) is {}",
                i / cols,
                i % cols,
                data[i]
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        check_dims(rows, cols)?;
        Ok(Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        check_dims(rows, cols)?;
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self::new(rows, cols, data)
    }

    /// Builds an image without the finiteness scan. Callers inside the crate
    /// use this for buffers produced by finite linear maps of finite data.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.cols + col]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Inner product `sum(conj(self) * other)`.
    pub fn dot(&self, other: &ComplexImage) -> Result<Complex64> {
        ensure_same_dims(self.dims(), other.dims(), "inner product")?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> Result<ComplexImage> {
        ComplexImage::new(self.rows, self.cols, self.data.iter().map(|&c| f(c)).collect())
    }

    pub fn scale(&self, factor: f64) -> ComplexImage {
        ComplexImage::from_raw(
            self.rows,
            self.cols,
            self.data.iter().map(|c| c * factor).collect(),
        )
    }

    pub fn abs(&self) -> RealField {
        RealField::from_raw(self.rows, self.cols, self.data.iter().map(|c| c.norm()).collect())
    }
}

/// A real-valued 2-D field (phases, amplitudes, coherence maps).
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealField {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(rows, cols)?;
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} values supplied for a {rows}x{cols} field",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "value ({}, {}) is {}",
                i / cols,
                i % cols,
                data[i]
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Result<Self> {
        check_dims(rows, cols)?;
        Self::new(rows, cols, vec![value; rows * cols])
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_dims(rows, cols)?;
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self::new(rows, cols, data)
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<RealField> {
        RealField::new(self.rows, self.cols, self.data.iter().map(|&v| f(v)).collect())
    }
}

pub(crate) fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension(format!("zero-sized grid {rows}x{cols}")));
    }
    Ok(())
}

pub(crate) fn ensure_same_dims(a: (usize, usize), b: (usize, usize), what: &str) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!(
            "{what}: {}x{} vs {}x{}",
            a.0, a.1, b.0, b.1
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_dims_and_nan() {
        assert!(matches!(ComplexImage::zeros(0, 3), Err(Error::Dimension(_))));
        let bad = vec![Complex64::new(f64::NAN, 0.0)];
        assert!(matches!(ComplexImage::new(1, 1, bad), Err(Error::NonFinite(_))));
        assert!(matches!(
            RealField::new(2, 2, vec![0.0; 3]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn dot_is_conjugate_linear_in_first_argument() {
        let a = ComplexImage::new(1, 2, vec![Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0)])
            .unwrap();
        let b = ComplexImage::new(1, 2, vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 1.0)])
            .unwrap();
        // conj(i)*i + 2*(1+i) = 1 + 2 + 2i
        assert_eq!(a.dot(&b).unwrap(), Complex64::new(3.0, 2.0));
        assert!((a.dot(&a).unwrap().re - a.norm_sqr()).abs() < 1e-15);
    }
}
