//! Scoring and diagnostics: interferogram formation, RRMSE, phase
//! unwrapping, sensing-matrix coherence and pixel coherence maps.

mod coherence;
mod unwrap;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use coherence::{coherence_map, coherence_probe, mutual_coherence, CoherenceStats};
pub use unwrap::{count_residues, unwrap_ls, Unwrapped};

use crate::error::{Error, Result};
use crate::image::{ensure_same_dims, ComplexImage, RealField};
use crate::scene::wrap_phase;

/// Reported RRMSE for a perfect reconstruction.
pub const RRMSE_FLOOR_DB: f64 = -300.0;

/// A phase map, either wrapped into `(-pi, pi]` or unwrapped.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    values: RealField,
    wrapped: bool,
}

impl PhaseField {
    pub fn wrapped(values: RealField) -> Result<Self> {
        if values.as_slice().iter().any(|&v| v <= -PI || v > PI) {
            return Err(Error::InvalidParameter("wrapped phase outside (-pi, pi]".into()));
        }
        Ok(Self { values, wrapped: true })
    }

    pub fn unwrapped(values: RealField) -> Self {
        Self { values, wrapped: false }
    }

    /// Wrapped phase of every pixel; zero samples get phase 0.
    pub fn of(img: &ComplexImage) -> Self {
        let data = img
            .as_slice()
            .iter()
            .map(|c| if c.norm_sqr() == 0.0 { 0.0 } else { wrap_phase(c.arg()) })
            .collect();
        Self {
            values: RealField::from_raw(img.rows(), img.cols(), data),
            wrapped: true,
        }
    }

    pub fn values(&self) -> &RealField {
        &self.values
    }

    pub fn into_values(self) -> RealField {
        self.values
    }

    pub fn is_wrapped(&self) -> bool {
        self.wrapped
    }

    pub fn dims(&self) -> (usize, usize) {
        self.values.dims()
    }
}

/// `conj(z1) * z2` pixel by pixel.
pub fn conventional_interferogram(z1: &ComplexImage, z2: &ComplexImage) -> Result<ComplexImage> {
    ensure_same_dims(z1.dims(), z2.dims(), "interferogram inputs")?;
    let data = z1
        .as_slice()
        .iter()
        .zip(z2.as_slice())
        .map(|(a, b)| a.conj() * b)
        .collect();
    ComplexImage::new(z1.rows(), z1.cols(), data)
}

/// Multiplies by `exp(-j flat_phase)`.
pub fn remove_flat_earth(ifg: &ComplexImage, flat_phase: &RealField) -> Result<ComplexImage> {
    ensure_same_dims(ifg.dims(), flat_phase.dims(), "interferogram vs flat phase")?;
    let data = ifg
        .as_slice()
        .iter()
        .zip(flat_phase.as_slice())
        .map(|(v, &p)| v * Complex64::from_polar(1.0, -p))
        .collect();
    ComplexImage::new(ifg.rows(), ifg.cols(), data)
}

/// `10 log10( sum (rec - ref)^2 / sum ref^2 )`, floored at [`RRMSE_FLOOR_DB`].
pub fn rrmse_db(rec: &PhaseField, reference: &PhaseField) -> Result<f64> {
    ensure_same_dims(rec.dims(), reference.dims(), "rrmse inputs")?;
    let energy: f64 = reference.values.as_slice().iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Err(Error::InvalidParameter("reference phase is identically zero".into()));
    }
    let err: f64 = rec
        .values
        .as_slice()
        .iter()
        .zip(reference.values.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    if err == 0.0 {
        return Ok(RRMSE_FLOOR_DB);
    }
    Ok((10.0 * (err / energy).log10()).max(RRMSE_FLOOR_DB))
}

/// Shifts `rec` by the constant that minimizes its squared distance to
/// `reference`. Unwrapped phases are only defined up to such a constant.
pub fn align_offset(rec: &PhaseField, reference: &PhaseField) -> Result<PhaseField> {
    ensure_same_dims(rec.dims(), reference.dims(), "alignment inputs")?;
    let offset = reference.values.mean() - rec.values.mean();
    Ok(PhaseField::unwrapped(rec.values.map(|v| v + offset)?))
}

/// Root-mean-square of the wrapped phase difference, in radians.
pub fn wrapped_phase_rms(a: &PhaseField, b: &PhaseField) -> Result<f64> {
    ensure_same_dims(a.dims(), b.dims(), "phase comparison")?;
    let sum: f64 = a
        .values
        .as_slice()
        .iter()
        .zip(b.values.as_slice())
        .map(|(x, y)| wrap_phase(x - y).powi(2))
        .sum();
    Ok((sum / a.values.len() as f64).sqrt())
}
