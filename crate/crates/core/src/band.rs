//! Common-band lowpass selection: which DFT bins of the full-resolution grid
//! survive in the reduced-resolution acquisition.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::image::ComplexImage;

/// A bandwidth ratio `num/den` in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    num: u32,
    den: u32,
}

impl Ratio {
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num == 0 || num > den {
            return Err(Error::InvalidParameter(format!(
                "bandwidth ratio {num}/{den} is outside (0, 1]"
            )));
        }
        Ok(Self { num, den })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `size * num / den`, rejecting non-integral results.
    pub fn apply(&self, size: usize) -> Result<usize> {
        let scaled = size as u128 * self.num as u128;
        if scaled % self.den as u128 != 0 {
            return Err(Error::InvalidParameter(format!(
                "{size} * {self} is not an integer; choose a ratio that divides the grid"
            )));
        }
        Ok((scaled / self.den as u128) as usize)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::InvalidParameter(format!("malformed ratio {s:?}")))
        };
        match s.split_once('/') {
            Some((n, d)) => Ratio::new(parse(n)?, parse(d)?),
            None => Ratio::new(parse(s)?, 1),
        }
    }
}

/// Retained row and column DFT bins of a lowpass common-band filter.
///
/// `row_bins[j]` is the full-grid bin that lands in bin `j` of the reduced
/// grid, so selection followed by a reduced-size inverse DFT is exactly the
/// band-limited resampling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandSelection {
    row_bins: Vec<usize>,
    col_bins: Vec<usize>,
    full_dims: (usize, usize),
}

impl BandSelection {
    /// Validates an explicit bin selection.
    pub fn from_bins(
        full_dims: (usize, usize),
        row_bins: Vec<usize>,
        col_bins: Vec<usize>,
    ) -> Result<Self> {
        crate::image::check_dims(full_dims.0, full_dims.1)?;
        check_bins(&row_bins, full_dims.0, "row")?;
        check_bins(&col_bins, full_dims.1, "column")?;
        Ok(Self {
            row_bins,
            col_bins,
            full_dims,
        })
    }

    pub fn full(full_dims: (usize, usize)) -> Result<Self> {
        make_band_selection(full_dims, Ratio::ONE, Ratio::ONE)
    }

    pub fn row_bins(&self) -> &[usize] {
        &self.row_bins
    }

    pub fn col_bins(&self) -> &[usize] {
        &self.col_bins
    }

    pub fn full_dims(&self) -> (usize, usize) {
        self.full_dims
    }

    pub fn reduced_dims(&self) -> (usize, usize) {
        (self.row_bins.len(), self.col_bins.len())
    }

    pub fn is_full(&self) -> bool {
        self.reduced_dims() == self.full_dims
    }

    /// Band-limits a full-grid image given its spectrum plans.
    pub(crate) fn lowpass(&self, full: &Fft2, reduced: &Fft2, mut data: Vec<Complex64>) -> Vec<Complex64> {
        let (_, cols) = self.full_dims;
        let (m, k) = self.reduced_dims();
        full.forward(&mut data);
        let mut out = Vec::with_capacity(m * k);
        for &r in &self.row_bins {
            for &c in &self.col_bins {
                out.push(data[r * cols + c]);
            }
        }
        reduced.inverse(&mut out);
        out
    }

    /// Adjoint of [`lowpass`](Self::lowpass): zero-fill the unselected bins.
    pub(crate) fn lowpass_adjoint(
        &self,
        full: &Fft2,
        reduced: &Fft2,
        mut data: Vec<Complex64>,
    ) -> Vec<Complex64> {
        let (rows, cols) = self.full_dims;
        let k = self.col_bins.len();
        reduced.forward(&mut data);
        let mut out = vec![Complex64::new(0.0, 0.0); rows * cols];
        for (j, &r) in self.row_bins.iter().enumerate() {
            for (i, &c) in self.col_bins.iter().enumerate() {
                out[r * cols + c] = data[j * k + i];
            }
        }
        full.inverse(&mut out);
        out
    }
}

fn check_bins(bins: &[usize], n: usize, axis: &str) -> Result<()> {
    if bins.is_empty() || bins.len() > n {
        return Err(Error::InvalidParameter(format!(
            "{axis} band keeps {} of {n} bins",
            bins.len()
        )));
    }
    let mut seen = vec![false; n];
    for &b in bins {
        if b >= n {
            return Err(Error::InvalidParameter(format!("{axis} bin {b} out of range 0..{n}")));
        }
        if std::mem::replace(&mut seen[b], true) {
            return Err(Error::InvalidParameter(format!("{axis} bin {b} repeated")));
        }
    }
    if !seen[0] {
        return Err(Error::InvalidParameter(format!("{axis} band must contain the DC bin")));
    }
    Ok(())
}

/// The `keep` lowest-frequency bins of an `n`-point DFT, in reduced-grid order.
///
/// Reduced bin `j <= keep/2` maps to frequency `+j`; the rest map to negative
/// frequencies. For even `keep` the edge bin `+keep/2` is kept and `-keep/2`
/// dropped.
pub fn lowpass_bins(n: usize, keep: usize) -> Vec<usize> {
    assert!(keep >= 1 && keep <= n);
    (0..keep)
        .map(|j| if j <= keep / 2 { j } else { n - (keep - j) })
        .collect()
}

/// Builds the `(alpha, beta)` common-band selection for a full grid.
pub fn make_band_selection(full_dims: (usize, usize), alpha: Ratio, beta: Ratio) -> Result<BandSelection> {
    let (n, l) = full_dims;
    crate::image::check_dims(n, l)?;
    let m = alpha.apply(n)?;
    let k = beta.apply(l)?;
    BandSelection::from_bins(full_dims, lowpass_bins(n, m), lowpass_bins(l, k))
}

/// Band-limits and resamples `z` onto the reduced grid of `band`.
pub fn decimate(z: &ComplexImage, band: &BandSelection) -> Result<ComplexImage> {
    crate::image::ensure_same_dims(z.dims(), band.full_dims(), "decimate input vs band")?;
    let (n, l) = band.full_dims();
    let (m, k) = band.reduced_dims();
    let out = band.lowpass(&Fft2::new(n, l), &Fft2::new(m, k), z.as_slice().to_vec());
    Ok(ComplexImage::from_raw(m, k, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_point_half_band_keeps_dc_two_positive_one_negative() {
        let band = make_band_selection((8, 8), Ratio::new(1, 2).unwrap(), Ratio::new(1, 2).unwrap())
            .unwrap();
        assert_eq!(band.row_bins(), &[0, 1, 2, 7]);
        assert_eq!(band.reduced_dims(), (4, 4));
    }

    #[test]
    fn odd_keep_is_symmetric() {
        assert_eq!(lowpass_bins(10, 5), vec![0, 1, 2, 8, 9]);
    }

    #[test]
    fn full_band_keeps_everything_in_order() {
        let band = BandSelection::full((6, 4)).unwrap();
        assert_eq!(band.row_bins(), &[0, 1, 2, 3, 4, 5]);
        assert_eq!(band.col_bins(), &[0, 1, 2, 3]);
        assert!(band.is_full());
    }

    #[test]
    fn integrality_rule() {
        let fifth = Ratio::new(1, 5).unwrap();
        assert!(matches!(
            make_band_selection((4096, 4096), fifth, fifth),
            Err(Error::InvalidParameter(_))
        ));
        let band = make_band_selection((4000, 4000), fifth, fifth).unwrap();
        assert_eq!(band.reduced_dims(), (800, 800));
    }

    #[test]
    fn ratio_parsing_and_range() {
        assert_eq!("1/2".parse::<Ratio>().unwrap(), Ratio::new(1, 2).unwrap());
        assert_eq!("1".parse::<Ratio>().unwrap(), Ratio::ONE);
        assert!("3/2".parse::<Ratio>().is_err());
        assert!("0/4".parse::<Ratio>().is_err());
        assert!("0.5".parse::<Ratio>().is_err());
    }

    #[test]
    fn explicit_bins_are_validated() {
        assert!(BandSelection::from_bins((4, 4), vec![0, 0], vec![0]).is_err());
        assert!(BandSelection::from_bins((4, 4), vec![1, 2], vec![0]).is_err());
        assert!(BandSelection::from_bins((4, 4), vec![0, 4], vec![0]).is_err());
        assert!(BandSelection::from_bins((4, 4), vec![0, 3], vec![0]).is_ok());
    }

    #[test]
    fn decimating_a_constant_scales_by_sqrt_of_grid_ratio() {
        // Brute-force unitary DFT of the constant: only DC is nonzero and
        // equals c*sqrt(NL); the M*K-point unitary inverse divides by sqrt(MK).
        let c = Complex64::new(0.7, -1.2);
        let z = ComplexImage::from_fn(8, 12, |_, _| c).unwrap();
        let band = make_band_selection((8, 12), Ratio::new(1, 2).unwrap(), Ratio::new(1, 3).unwrap())
            .unwrap();
        let out = decimate(&z, &band).unwrap();
        assert_eq!(out.dims(), (4, 4));
        let expected = c * ((8.0 * 12.0) / (4.0 * 4.0) as f64).sqrt();
        for v in out.as_slice() {
            assert!((v - expected).norm() < 1e-12);
        }
    }
}
