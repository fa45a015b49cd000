//! The dual-resolution forward model `M = (lowpass resampling) . diag(theta)`,
//! its adjoint, and the sensing operator `A = M W`.
//!
//! Every DFT is unitary, so `M M^H = I` on the reduced grid and `||A|| = 1`.
//! Dense versions are built column by column from the matrix-free operators
//! and are meant for small instances only (test oracles and coherence probes).
//! Dense matrices index images in column-major `vec` order: pixel `(n, l)` of
//! an `N x L` grid is entry `n + l*N`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::band::BandSelection;
use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::image::{ensure_same_dims, ComplexImage, RealField};
use crate::wavelet::{wavelet_analysis, wavelet_synthesis, SparseCoeffs, WaveletConfig};

/// Largest grid (in pixels) accepted by the dense builders by default.
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Spectral norm of every sensing operator built here.
pub const SENSING_OPERATOR_NORM: f64 = 1.0;

const UNIT_MODULUS_TOL: f64 = 1e-12;

/// Unit-modulus modulation `theta` applied before band-limiting.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationField {
    theta: ComplexImage,
}

impl ModulationField {
    pub fn new(theta: ComplexImage) -> Result<Self> {
        if let Some((i, v)) = theta
            .as_slice()
            .iter()
            .enumerate()
            .find(|(_, v)| (v.norm() - 1.0).abs() > UNIT_MODULUS_TOL)
        {
            return Err(Error::InvalidParameter(format!(
                "modulation sample {i} has modulus {}",
                v.norm()
            )));
        }
        Ok(Self { theta })
    }

    pub fn ones(rows: usize, cols: usize) -> Result<Self> {
        Ok(Self {
            theta: ComplexImage::from_fn(rows, cols, |_, _| Complex64::new(1.0, 0.0))?,
        })
    }

    pub fn from_phase(phase: &RealField) -> Result<Self> {
        let theta = ComplexImage::from_fn(phase.rows(), phase.cols(), |r, c| {
            Complex64::from_polar(1.0, phase.get(r, c))
        })?;
        Ok(Self { theta })
    }

    pub fn as_image(&self) -> &ComplexImage {
        &self.theta
    }

    pub fn dims(&self) -> (usize, usize) {
        self.theta.dims()
    }
}

/// `theta = exp(j (arg z1 + flat_phase))`; zero-amplitude pixels take phase 0
/// from `z1`.
pub fn modulation_from_reference(z1: &ComplexImage, flat_phase: &RealField) -> Result<ModulationField> {
    ensure_same_dims(z1.dims(), flat_phase.dims(), "reference image vs flat phase")?;
    let theta = ComplexImage::from_fn(z1.rows(), z1.cols(), |r, c| {
        let v = z1.get(r, c);
        let phase = if v.norm_sqr() == 0.0 { 0.0 } else { v.arg() };
        Complex64::from_polar(1.0, phase + flat_phase.get(r, c))
    })?;
    Ok(ModulationField { theta })
}

/// Matrix-free `M` with planned FFTs for both grids.
#[derive(Debug, Clone)]
pub struct ForwardModel {
    theta: ModulationField,
    band: BandSelection,
    full: Fft2,
    reduced: Fft2,
}

impl ForwardModel {
    pub fn new(theta: ModulationField, band: BandSelection) -> Result<Self> {
        ensure_same_dims(theta.dims(), band.full_dims(), "modulation vs band")?;
        let (n, l) = band.full_dims();
        let (m, k) = band.reduced_dims();
        Ok(Self {
            theta,
            band,
            full: Fft2::new(n, l),
            reduced: Fft2::new(m, k),
        })
    }

    pub fn band(&self) -> &BandSelection {
        &self.band
    }

    pub fn theta(&self) -> &ModulationField {
        &self.theta
    }

    pub fn full_dims(&self) -> (usize, usize) {
        self.band.full_dims()
    }

    pub fn reduced_dims(&self) -> (usize, usize) {
        self.band.reduced_dims()
    }

    pub fn apply(&self, u: &ComplexImage) -> Result<ComplexImage> {
        ensure_same_dims(u.dims(), self.full_dims(), "forward input")?;
        let modulated: Vec<Complex64> = u
            .as_slice()
            .iter()
            .zip(self.theta.as_image().as_slice())
            .map(|(a, t)| a * t)
            .collect();
        let (m, k) = self.reduced_dims();
        let out = self.band.lowpass(&self.full, &self.reduced, modulated);
        Ok(ComplexImage::from_raw(m, k, out))
    }

    pub fn adjoint(&self, y: &ComplexImage) -> Result<ComplexImage> {
        ensure_same_dims(y.dims(), self.reduced_dims(), "adjoint input")?;
        let mut out = self
            .band
            .lowpass_adjoint(&self.full, &self.reduced, y.as_slice().to_vec());
        for (v, t) in out.iter_mut().zip(self.theta.as_image().as_slice()) {
            *v *= t.conj();
        }
        let (n, l) = self.full_dims();
        Ok(ComplexImage::from_raw(n, l, out))
    }
}

pub fn apply_forward(u: &ComplexImage, theta: &ModulationField, band: &BandSelection) -> Result<ComplexImage> {
    ForwardModel::new(theta.clone(), band.clone())?.apply(u)
}

pub fn apply_adjoint(y: &ComplexImage, theta: &ModulationField, band: &BandSelection) -> Result<ComplexImage> {
    ForwardModel::new(theta.clone(), band.clone())?.adjoint(y)
}

/// `A = M W` and `A^H = W^H M^H`.
#[derive(Debug, Clone)]
pub struct SensingOperator {
    model: ForwardModel,
    wavelet: WaveletConfig,
}

impl SensingOperator {
    pub fn new(theta: ModulationField, band: BandSelection, wavelet: WaveletConfig) -> Result<Self> {
        wavelet.validate(band.full_dims())?;
        Ok(Self {
            model: ForwardModel::new(theta, band)?,
            wavelet,
        })
    }

    pub fn model(&self) -> &ForwardModel {
        &self.model
    }

    pub fn wavelet(&self) -> &WaveletConfig {
        &self.wavelet
    }

    /// Exact operator norm: a row-subselected unitary times a unit-modulus
    /// diagonal times an orthonormal basis.
    pub fn norm(&self) -> f64 {
        SENSING_OPERATOR_NORM
    }

    pub fn apply(&self, x: &SparseCoeffs) -> Result<ComplexImage> {
        self.model.apply(&wavelet_synthesis(x, &self.wavelet)?)
    }

    pub fn adjoint(&self, y: &ComplexImage) -> Result<SparseCoeffs> {
        wavelet_analysis(&self.model.adjoint(y)?, &self.wavelet)
    }

    pub fn synthesize(&self, x: &SparseCoeffs) -> Result<ComplexImage> {
        wavelet_synthesis(x, &self.wavelet)
    }
}

pub fn apply_sensing(
    x: &SparseCoeffs,
    theta: &ModulationField,
    band: &BandSelection,
    cfg: &WaveletConfig,
) -> Result<ComplexImage> {
    SensingOperator::new(theta.clone(), band.clone(), *cfg)?.apply(x)
}

pub fn apply_sensing_adjoint(
    y: &ComplexImage,
    theta: &ModulationField,
    band: &BandSelection,
    cfg: &WaveletConfig,
) -> Result<SparseCoeffs> {
    SensingOperator::new(theta.clone(), band.clone(), *cfg)?.adjoint(y)
}

fn check_cap(dims: (usize, usize), cap: usize) -> Result<()> {
    let entries = dims.0 * dims.1;
    if entries > cap {
        return Err(Error::TooLarge { entries, cap });
    }
    Ok(())
}

/// Column-major `vec` of an image.
pub fn vec_col_major(img: &ComplexImage) -> Vec<Complex64> {
    let (rows, cols) = img.dims();
    let mut out = Vec::with_capacity(rows * cols);
    for c in 0..cols {
        for r in 0..rows {
            out.push(img.get(r, c));
        }
    }
    out
}

/// Inverse of [`vec_col_major`].
pub fn unvec_col_major(v: &[Complex64], rows: usize, cols: usize) -> Result<ComplexImage> {
    if v.len() != rows * cols {
        return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} grid", v.len())));
    }
    ComplexImage::from_fn(rows, cols, |r, c| v[r + c * rows])
}

fn dense_from_columns(
    in_dims: (usize, usize),
    out_len: usize,
    mut column: impl FnMut(&ComplexImage) -> Result<ComplexImage>,
) -> Result<DMatrix<Complex64>> {
    let (rows, cols) = in_dims;
    let n = rows * cols;
    let mut mat = DMatrix::<Complex64>::zeros(out_len, n);
    for j in 0..n {
        let basis = ComplexImage::from_fn(rows, cols, |r, c| {
            if r + c * rows == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })?;
        let col = vec_col_major(&column(&basis)?);
        mat.column_mut(j).copy_from_slice(&col);
    }
    Ok(mat)
}

/// Dense `M` (`MK x NL`).
pub fn build_dense_forward(theta: &ModulationField, band: &BandSelection) -> Result<DMatrix<Complex64>> {
    build_dense_forward_capped(theta, band, DEFAULT_DENSE_CAP)
}

pub fn build_dense_forward_capped(
    theta: &ModulationField,
    band: &BandSelection,
    cap: usize,
) -> Result<DMatrix<Complex64>> {
    check_cap(band.full_dims(), cap)?;
    let model = ForwardModel::new(theta.clone(), band.clone())?;
    let (m, k) = band.reduced_dims();
    dense_from_columns(band.full_dims(), m * k, |e| model.apply(e))
}

/// Dense `A = M W` (`MK x NL`).
pub fn build_dense_sensing(
    theta: &ModulationField,
    band: &BandSelection,
    cfg: &WaveletConfig,
) -> Result<DMatrix<Complex64>> {
    build_dense_sensing_capped(theta, band, cfg, DEFAULT_DENSE_CAP)
}

pub fn build_dense_sensing_capped(
    theta: &ModulationField,
    band: &BandSelection,
    cfg: &WaveletConfig,
    cap: usize,
) -> Result<DMatrix<Complex64>> {
    check_cap(band.full_dims(), cap)?;
    let op = SensingOperator::new(theta.clone(), band.clone(), *cfg)?;
    let (m, k) = band.reduced_dims();
    dense_from_columns(band.full_dims(), m * k, |e| {
        op.apply(&SparseCoeffs::new(e.clone()))
    })
}

/// Dense orthonormal synthesis `W` (`NL x NL`).
pub fn build_dense_wavelet(dims: (usize, usize), cfg: &WaveletConfig) -> Result<DMatrix<Complex64>> {
    check_cap(dims, DEFAULT_DENSE_CAP)?;
    dense_from_columns(dims, dims.0 * dims.1, |e| {
        wavelet_synthesis(&SparseCoeffs::new(e.clone()), cfg)
    })
}
