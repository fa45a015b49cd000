//! Orthonormal separable 2-D discrete wavelet transform with periodic
//! boundaries.
//!
//! Coefficients use the usual Mallat layout: after each level the coarse
//! approximation occupies the top-left quarter of the current block and the
//! three detail subbands fill the remaining quadrants. The filters are real,
//! so applying them to complex samples transforms the real and imaginary
//! parts independently.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::image::ComplexImage;

const HAAR: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

// Daubechies scaling filters, N vanishing moments, 2N taps.
const DB2: [f64; 4] = [
    0.482_962_913_144_690_25,
    0.836_516_303_737_469,
    0.224_143_868_041_857_35,
    -0.129_409_522_550_921_45,
];

const DB4: [f64; 8] = [
    0.230_377_813_308_855_23,
    0.714_846_570_552_541_5,
    0.630_880_767_929_590_4,
    -0.027_983_769_416_983_85,
    -0.187_034_811_718_881_14,
    0.030_841_381_835_986_965,
    0.032_883_011_666_982_945,
    -0.010_597_401_784_997_278,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WaveletFamily {
    Haar,
    Db2,
    /// Daubechies with four vanishing moments (8 taps).
    #[default]
    Db4,
}

impl WaveletFamily {
    pub fn scaling_filter(&self) -> &'static [f64] {
        match self {
            WaveletFamily::Haar => &HAAR,
            WaveletFamily::Db2 => &DB2,
            WaveletFamily::Db4 => &DB4,
        }
    }

    /// Quadrature mirror of the scaling filter: `g[n] = (-1)^n h[len-1-n]`.
    pub fn wavelet_filter(&self) -> Vec<f64> {
        let h = self.scaling_filter();
        let len = h.len();
        (0..len)
            .map(|n| if n % 2 == 0 { h[len - 1 - n] } else { -h[len - 1 - n] })
            .collect()
    }
}

impl fmt::Display for WaveletFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WaveletFamily::Haar => "haar",
            WaveletFamily::Db2 => "db2",
            WaveletFamily::Db4 => "db4",
        })
    }
}

impl FromStr for WaveletFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(WaveletFamily::Haar),
            "db2" => Ok(WaveletFamily::Db2),
            "db4" => Ok(WaveletFamily::Db4),
            other => Err(Error::InvalidParameter(format!("unknown wavelet family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveletConfig {
    pub family: WaveletFamily,
    pub levels: u32,
    pub boundary: Boundary,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        Self {
            family: WaveletFamily::Db4,
            levels: 4,
            boundary: Boundary::Periodic,
        }
    }
}

impl WaveletConfig {
    pub fn new(family: WaveletFamily, levels: u32) -> Self {
        Self {
            family,
            levels,
            boundary: Boundary::Periodic,
        }
    }

    /// Deepest decomposition allowed on a grid: `log2(min(rows, cols)) - 2`.
    pub fn max_levels(dims: (usize, usize)) -> u32 {
        let min = dims.0.min(dims.1);
        (usize::BITS - 1 - min.leading_zeros()).saturating_sub(2)
    }

    pub fn validate(&self, dims: (usize, usize)) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::InvalidParameter("wavelet levels must be positive".into()));
        }
        let block = 1usize
            .checked_shl(self.levels)
            .ok_or_else(|| Error::InvalidParameter(format!("{} wavelet levels", self.levels)))?;
        if dims.0 % block != 0 || dims.1 % block != 0 {
            return Err(Error::Dimension(format!(
                "{}x{} grid is not divisible by 2^{} for the wavelet transform",
                dims.0, dims.1, self.levels
            )));
        }
        let cap = Self::max_levels(dims);
        if self.levels > cap {
            return Err(Error::InvalidParameter(format!(
                "{} wavelet levels exceeds the limit {cap} for a {}x{} grid",
                self.levels, dims.0, dims.1
            )));
        }
        Ok(())
    }
}

/// Wavelet coefficients of an image, laid out subband by subband on the
/// image grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCoeffs(ComplexImage);

impl SparseCoeffs {
    pub fn new(coeffs: ComplexImage) -> Self {
        Self(coeffs)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Ok(Self(ComplexImage::zeros(rows, cols)?))
    }

    pub fn as_image(&self) -> &ComplexImage {
        &self.0
    }

    pub fn into_image(self) -> ComplexImage {
        self.0
    }

    pub fn dims(&self) -> (usize, usize) {
        self.0.dims()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        self.0.as_slice()
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [Complex64] {
        self.0.as_mut_slice()
    }

    pub fn l1_norm(&self) -> f64 {
        self.0.as_slice().iter().map(|c| c.norm()).sum()
    }
}

/// `u = W x`.
pub fn wavelet_synthesis(x: &SparseCoeffs, cfg: &WaveletConfig) -> Result<ComplexImage> {
    let (rows, cols) = x.dims();
    cfg.validate((rows, cols))?;
    let mut data = x.as_slice().to_vec();
    let filters = Filters::new(cfg.family);
    for level in (0..cfg.levels).rev() {
        let (r, c) = (rows >> level, cols >> level);
        for j in 0..c {
            filters.synthesize_strided(&mut data, j, cols, r);
        }
        for i in 0..r {
            filters.synthesize_strided(&mut data, i * cols, 1, c);
        }
    }
    Ok(ComplexImage::from_raw(rows, cols, data))
}

/// `x = W^T u`, the exact inverse of [`wavelet_synthesis`].
pub fn wavelet_analysis(u: &ComplexImage, cfg: &WaveletConfig) -> Result<SparseCoeffs> {
    let (rows, cols) = u.dims();
    cfg.validate((rows, cols))?;
    let mut data = u.as_slice().to_vec();
    let filters = Filters::new(cfg.family);
    for level in 0..cfg.levels {
        let (r, c) = (rows >> level, cols >> level);
        for i in 0..r {
            filters.analyze_strided(&mut data, i * cols, 1, c);
        }
        for j in 0..c {
            filters.analyze_strided(&mut data, j, cols, r);
        }
    }
    Ok(SparseCoeffs(ComplexImage::from_raw(rows, cols, data)))
}

struct Filters {
    lo: &'static [f64],
    hi: Vec<f64>,
}

impl Filters {
    fn new(family: WaveletFamily) -> Self {
        Self {
            lo: family.scaling_filter(),
            hi: family.wavelet_filter(),
        }
    }

    /// One periodic analysis step on `n` samples at `start + i*stride`,
    /// writing approximations to the first half and details to the second.
    fn analyze_strided(&self, data: &mut [Complex64], start: usize, stride: usize, n: usize) {
        let x: Vec<Complex64> = (0..n).map(|i| data[start + i * stride]).collect();
        let half = n / 2;
        for k in 0..half {
            let mut a = Complex64::new(0.0, 0.0);
            let mut d = Complex64::new(0.0, 0.0);
            for (t, (&h, &g)) in self.lo.iter().zip(&self.hi).enumerate() {
                let v = x[(2 * k + t) % n];
                a += v * h;
                d += v * g;
            }
            data[start + k * stride] = a;
            data[start + (half + k) * stride] = d;
        }
    }

    /// Transpose of [`analyze_strided`](Self::analyze_strided).
    fn synthesize_strided(&self, data: &mut [Complex64], start: usize, stride: usize, n: usize) {
        let half = n / 2;
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..half {
            let a = data[start + k * stride];
            let d = data[start + (half + k) * stride];
            for (t, (&h, &g)) in self.lo.iter().zip(&self.hi).enumerate() {
                x[(2 * k + t) % n] += a * h + d * g;
            }
        }
        for (i, v) in x.into_iter().enumerate() {
            data[start + i * stride] = v;
        }
    }
}
