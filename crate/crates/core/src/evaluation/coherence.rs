use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::band::{make_band_selection, Ratio};
use crate::error::{Error, Result};
use crate::image::{ensure_same_dims, ComplexImage, RealField};
use crate::operators::{build_dense_sensing, ModulationField};
use crate::wavelet::WaveletConfig;

/// Largest normalized inner product between two distinct columns.
pub fn mutual_coherence(a: &DMatrix<Complex64>) -> Result<f64> {
    // Squared norms via the same inner product as the pairs, so a repeated
    // column scores exactly 1.
    let norms: Vec<f64> = a.column_iter().map(|c| c.dotc(&c).re).collect();
    if let Some(j) = norms.iter().position(|&n| n == 0.0) {
        return Err(Error::InvalidParameter(format!("column {j} is zero")));
    }
    let mut worst = 0.0f64;
    for i in 0..a.ncols() {
        let ci = a.column(i);
        for j in i + 1..a.ncols() {
            let ip = ci.dotc(&a.column(j)).norm() / (norms[i] * norms[j]).sqrt();
            worst = worst.max(ip);
        }
    }
    Ok(worst.min(1.0))
}

/// Outcome of the Monte-Carlo coherence comparison between speckle-random
/// and constant modulation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceStats {
    pub dims: (usize, usize),
    pub trials: usize,
    pub random_mean: f64,
    pub random_std: f64,
    pub random_min: f64,
    pub random_max: f64,
    /// Coherence with `theta = 1` everywhere.
    pub constant: f64,
}

impl CoherenceStats {
    pub fn random_beats_constant(&self) -> bool {
        self.random_mean < self.constant
    }
}

/// Draws `trials` uniform-phase modulation fields and measures the mutual
/// coherence of the resulting dense sensing matrices.
pub fn coherence_probe(
    dims: (usize, usize),
    alpha: Ratio,
    beta: Ratio,
    wavelet: &WaveletConfig,
    trials: usize,
    seed: u64,
) -> Result<CoherenceStats> {
    if trials == 0 {
        return Err(Error::InvalidParameter("coherence probe needs at least one trial".into()));
    }
    let band = make_band_selection(dims, alpha, beta)?;
    let constant = mutual_coherence(&build_dense_sensing(
        &ModulationField::ones(dims.0, dims.1)?,
        &band,
        wavelet,
    )?)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(trials);
    for _ in 0..trials {
        let phase = RealField::from_fn(dims.0, dims.1, |_, _| PI - 2.0 * PI * rng.random::<f64>())?;
        let theta = ModulationField::from_phase(&phase)?;
        samples.push(mutual_coherence(&build_dense_sensing(&theta, &band, wavelet)?)?);
    }
    let mean = samples.iter().sum::<f64>() / trials as f64;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / trials as f64;
    Ok(CoherenceStats {
        dims,
        trials,
        random_mean: mean,
        random_std: var.sqrt(),
        random_min: samples.iter().copied().fold(f64::INFINITY, f64::min),
        random_max: samples.iter().copied().fold(0.0, f64::max),
        constant,
    })
}

/// Sample coherence `|sum z1* z2| / sqrt(sum |z1|^2 sum |z2|^2)` over an odd
/// square window, truncated at the image border.
pub fn coherence_map(z1: &ComplexImage, z2: &ComplexImage, window: usize) -> Result<RealField> {
    ensure_same_dims(z1.dims(), z2.dims(), "coherence inputs")?;
    if window == 0 || window % 2 == 0 {
        return Err(Error::InvalidParameter(format!("coherence window {window} must be odd")));
    }
    let (rows, cols) = z1.dims();
    let half = window / 2;
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let mut cross = Complex64::new(0.0, 0.0);
            let (mut p1, mut p2) = (0.0, 0.0);
            for rr in r.saturating_sub(half)..(r + half + 1).min(rows) {
                for cc in c.saturating_sub(half)..(c + half + 1).min(cols) {
                    let a = z1.get(rr, cc);
                    let b = z2.get(rr, cc);
                    cross += a.conj() * b;
                    p1 += a.norm_sqr();
                    p2 += b.norm_sqr();
                }
            }
            if p1 == 0.0 || p2 == 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "zero power in coherence window at ({r}, {c})"
                )));
            }
            out.push((cross.norm() / (p1 * p2).sqrt()).min(1.0));
        }
    }
    RealField::new(rows, cols, out)
}
