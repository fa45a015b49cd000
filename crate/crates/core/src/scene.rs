//! Synthetic interferometric scenes with known ground truth.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::image::{check_dims, ComplexImage, RealField};

/// Wraps a phase into `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    let w = x.sin().atan2(x.cos());
    if w <= -PI {
        PI
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianHill {
    pub center_row: f64,
    pub center_col: f64,
    pub sigma: f64,
    pub peak: f64,
}

/// Smooth elevation-phase surface, in radians.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ElevationModel {
    #[default]
    Zero,
    Ramp { row_slope: f64, col_slope: f64 },
    Hills(Vec<GaussianHill>),
    Cone { center_row: f64, center_col: f64, radius: f64, peak: f64 },
}

impl ElevationModel {
    pub fn eval(&self, row: f64, col: f64) -> f64 {
        match self {
            ElevationModel::Zero => 0.0,
            ElevationModel::Ramp { row_slope, col_slope } => row_slope * row + col_slope * col,
            ElevationModel::Hills(hills) => hills
                .iter()
                .map(|h| {
                    let d2 = (row - h.center_row).powi(2) + (col - h.center_col).powi(2);
                    h.peak * (-d2 / (2.0 * h.sigma * h.sigma)).exp()
                })
                .sum(),
            ElevationModel::Cone { center_row, center_col, radius, peak } => {
                let d = ((row - center_row).powi(2) + (col - center_col).powi(2)).sqrt();
                peak * (1.0 - d / radius).max(0.0)
            }
        }
    }
}

/// Per-pixel magnitude law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplitudeLaw {
    /// Fully developed speckle.
    Rayleigh { sigma: f64 },
    Constant(f64),
}

impl Default for AmplitudeLaw {
    fn default() -> Self {
        AmplitudeLaw::Rayleigh { sigma: 1.0 }
    }
}

/// Everything that shapes a synthetic scene apart from its size and seed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FringeSpec {
    pub elevation: ElevationModel,
    /// Flat-earth ramp slopes in radians per pixel.
    pub flat_row_slope: f64,
    pub flat_col_slope: f64,
    pub amplitude: AmplitudeLaw,
    /// Depth in `[0, 1)` of a smooth sinusoidal backscatter modulation of
    /// the amplitude; 0 disables it.
    pub backscatter_depth: f64,
}

/// Ground truth of a synthetic acquisition pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneTruth {
    pub elevation_phase: RealField,
    pub flat_phase: RealField,
    pub speckle_phase: RealField,
    pub amplitude: RealField,
}

impl SceneTruth {
    pub fn new(
        elevation_phase: RealField,
        flat_phase: RealField,
        speckle_phase: RealField,
        amplitude: RealField,
    ) -> Result<Self> {
        let dims = elevation_phase.dims();
        for (name, f) in [("flat", &flat_phase), ("speckle", &speckle_phase), ("amplitude", &amplitude)] {
            if f.dims() != dims {
                return Err(Error::Dimension(format!("{name} field dims differ from elevation")));
            }
        }
        if speckle_phase.as_slice().iter().any(|&p| p <= -PI || p > PI) {
            return Err(Error::InvalidParameter("speckle phase outside (-pi, pi]".into()));
        }
        if amplitude.as_slice().iter().any(|&a| a < 0.0) {
            return Err(Error::InvalidParameter("negative amplitude".into()));
        }
        Ok(Self {
            elevation_phase,
            flat_phase,
            speckle_phase,
            amplitude,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.elevation_phase.dims()
    }

    /// The interferogram `|z2| exp(j elevation)` the recovery aims at.
    pub fn interferogram(&self) -> ComplexImage {
        let (rows, cols) = self.dims();
        let data = self
            .amplitude
            .as_slice()
            .iter()
            .zip(self.elevation_phase.as_slice())
            .map(|(&a, &p)| Complex64::from_polar(a, p))
            .collect();
        ComplexImage::from_raw(rows, cols, data)
    }
}

pub fn generate_scene(dims: (usize, usize), spec: &FringeSpec, seed: u64) -> Result<SceneTruth> {
    let (rows, cols) = dims;
    check_dims(rows, cols)?;
    if !(0.0..1.0).contains(&spec.backscatter_depth) {
        return Err(Error::InvalidParameter(format!(
            "backscatter depth {} outside [0, 1)",
            spec.backscatter_depth
        )));
    }
    match spec.amplitude {
        AmplitudeLaw::Rayleigh { sigma } if !(sigma.is_finite() && sigma > 0.0) => {
            return Err(Error::InvalidParameter(format!("Rayleigh sigma {sigma}")));
        }
        AmplitudeLaw::Constant(a) if !(a.is_finite() && a >= 0.0) => {
            return Err(Error::InvalidParameter(format!("constant amplitude {a}")));
        }
        _ => {}
    }

    let elevation_phase =
        RealField::from_fn(rows, cols, |r, c| spec.elevation.eval(r as f64, c as f64))?;
    let flat_phase = RealField::from_fn(rows, cols, |r, c| {
        spec.flat_row_slope * r as f64 + spec.flat_col_slope * c as f64
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // 1 - U lies in (0, 1], so the speckle phase lies in (-pi, pi].
    let speckle_phase =
        RealField::from_fn(rows, cols, |_, _| PI - 2.0 * PI * rng.random::<f64>())?;
    let speckle_amp = RealField::from_fn(rows, cols, |_, _| match spec.amplitude {
        AmplitudeLaw::Rayleigh { sigma } => {
            let u: f64 = rng.random();
            sigma * (-2.0 * (1.0 - u).ln()).sqrt()
        }
        AmplitudeLaw::Constant(a) => a,
    })?;
    let depth = spec.backscatter_depth;
    let amplitude = RealField::from_fn(rows, cols, |r, c| {
        let m = 1.0
            + depth
                * (2.0 * PI * r as f64 / rows as f64).sin()
                * (2.0 * PI * c as f64 / cols as f64).cos();
        speckle_amp.get(r, c) * m
    })?;

    SceneTruth::new(elevation_phase, flat_phase, speckle_phase, amplitude)
}

/// Fully correlated acquisition pair:
/// `z1 = a exp(j speckle)`, `z2 = a exp(j (speckle + flat + elevation))`.
pub fn form_image_pair(scene: &SceneTruth) -> Result<(ComplexImage, ComplexImage)> {
    let (rows, cols) = scene.dims();
    let z1 = ComplexImage::from_fn(rows, cols, |r, c| {
        Complex64::from_polar(scene.amplitude.get(r, c), scene.speckle_phase.get(r, c))
    })?;
    let z2 = ComplexImage::from_fn(rows, cols, |r, c| {
        let phase = scene.speckle_phase.get(r, c)
            + scene.flat_phase.get(r, c)
            + scene.elevation_phase.get(r, c);
        Complex64::from_polar(scene.amplitude.get(r, c), phase)
    })?;
    Ok((z1, z2))
}

/// Adds circular complex Gaussian noise at the requested SNR (dB, relative
/// to the mean sample power of `z`). `f64::INFINITY` means no noise.
pub fn add_noise(z: &ComplexImage, snr_db: f64, seed: u64) -> Result<ComplexImage> {
    if snr_db == f64::INFINITY {
        return Ok(z.clone());
    }
    if !snr_db.is_finite() {
        return Err(Error::NonFinite(format!("snr_db = {snr_db}")));
    }
    let signal_power = z.norm_sqr() / z.len() as f64;
    let noise_power = signal_power / 10f64.powf(snr_db / 10.0);
    let std = (noise_power / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    z.map(|v| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        v + Complex64::new(re, im) * std
    })
}
