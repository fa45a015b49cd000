//! On-disk formats.
//!
//! Grid files: 8-byte magic `DRIFGv01`, little-endian `u32` rows, `u32` cols,
//! a `u8` dtype tag, three zero bytes, then the row-major payload of
//! little-endian `f64`. Tag 0 is complex (interleaved re, im); tag 1 is real.
//!
//! Phase images are binary 16-bit PGM (`P5`, maxval 65535, big-endian
//! samples).

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::image::{ComplexImage, RealField};

pub const MAGIC: &[u8; 8] = b"DRIFGv01";
pub const HEADER_LEN: usize = 20;
pub const DTYPE_COMPLEX_F64: u8 = 0;
pub const DTYPE_REAL_F64: u8 = 1;

fn header(rows: usize, cols: usize, dtype: u8) -> Result<Vec<u8>> {
    let to_u32 = |v: usize| {
        u32::try_from(v).map_err(|_| Error::Format(format!("dimension {v} does not fit in u32")))
    };
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&to_u32(rows)?.to_le_bytes());
    out.extend_from_slice(&to_u32(cols)?.to_le_bytes());
    out.push(dtype);
    out.extend_from_slice(&[0, 0, 0]);
    Ok(out)
}

fn parse_header(bytes: &[u8], expect: u8) -> Result<(usize, usize, &[u8])> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!("file too short ({} bytes)", bytes.len())));
    }
    if &bytes[..8] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let rows = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let dtype = bytes[16];
    if dtype != expect {
        return Err(Error::Format(format!("dtype tag {dtype}, expected {expect}")));
    }
    if bytes[17..20] != [0, 0, 0] {
        return Err(Error::Format("reserved header bytes are not zero".into()));
    }
    let per = if expect == DTYPE_COMPLEX_F64 { 16 } else { 8 };
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != rows * cols * per {
        return Err(Error::Format(format!(
            "payload is {} bytes, expected {} for {rows}x{cols}",
            payload.len(),
            rows * cols * per
        )));
    }
    Ok((rows, cols, payload))
}

fn f64_at(b: &[u8], i: usize) -> f64 {
    f64::from_le_bytes(b[8 * i..8 * i + 8].try_into().unwrap())
}

pub fn encode_complex(img: &ComplexImage) -> Result<Vec<u8>> {
    let mut out = header(img.rows(), img.cols(), DTYPE_COMPLEX_F64)?;
    out.reserve(img.len() * 16);
    for c in img.as_slice() {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_complex(bytes: &[u8]) -> Result<ComplexImage> {
    let (rows, cols, payload) = parse_header(bytes, DTYPE_COMPLEX_F64)?;
    let data = (0..rows * cols)
        .map(|i| Complex64::new(f64_at(payload, 2 * i), f64_at(payload, 2 * i + 1)))
        .collect();
    ComplexImage::new(rows, cols, data)
}

pub fn encode_real(field: &RealField) -> Result<Vec<u8>> {
    let mut out = header(field.rows(), field.cols(), DTYPE_REAL_F64)?;
    for v in field.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_real(bytes: &[u8]) -> Result<RealField> {
    let (rows, cols, payload) = parse_header(bytes, DTYPE_REAL_F64)?;
    RealField::new(rows, cols, (0..rows * cols).map(|i| f64_at(payload, i)).collect())
}

pub fn write_complex(path: &Path, img: &ComplexImage) -> Result<()> {
    fs::write(path, encode_complex(img)?)?;
    Ok(())
}

pub fn read_complex(path: &Path) -> Result<ComplexImage> {
    decode_complex(&fs::read(path)?).map_err(|e| with_path(e, path))
}

pub fn write_real(path: &Path, field: &RealField) -> Result<()> {
    fs::write(path, encode_real(field)?)?;
    Ok(())
}

pub fn read_real(path: &Path) -> Result<RealField> {
    decode_real(&fs::read(path)?).map_err(|e| with_path(e, path))
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn encode_pgm(rows: usize, cols: usize, samples: impl Iterator<Item = u16>) -> Vec<u8> {
    let mut out = format!("P5\n{cols} {rows}\n65535\n").into_bytes();
    for s in samples {
        out.extend_from_slice(&s.to_be_bytes());
    }
    out
}

/// Maps a wrapped phase linearly from `(-pi, pi]` onto `[0, 65535]`.
pub fn phase_to_u16(phase: f64) -> u16 {
    let t = ((phase + PI) / (2.0 * PI)).clamp(0.0, 1.0);
    (t * 65535.0).round() as u16
}

pub fn write_phase_pgm(path: &Path, wrapped: &RealField) -> Result<()> {
    let bytes = encode_pgm(
        wrapped.rows(),
        wrapped.cols(),
        wrapped.as_slice().iter().map(|&p| phase_to_u16(p)),
    );
    fs::write(path, bytes)?;
    Ok(())
}

/// Writes a real field stretched from its min to its max, plus a sidecar
/// `<path>.txt` with the two end points.
pub fn write_real_pgm(path: &Path, field: &RealField) -> Result<()> {
    let (lo, hi) = (field.min(), field.max());
    let span = if hi > lo { hi - lo } else { 1.0 };
    let bytes = encode_pgm(
        field.rows(),
        field.cols(),
        field
            .as_slice()
            .iter()
            .map(|&v| (((v - lo) / span).clamp(0.0, 1.0) * 65535.0).round() as u16),
    );
    fs::write(path, bytes)?;
    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".txt");
    let mut f = fs::File::create(sidecar)?;
    writeln!(f, "min = {lo}")?;
    writeln!(f, "max = {hi}")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_exact() {
        let img = ComplexImage::new(1, 2, vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.0)]).unwrap();
        let bytes = encode_complex(&img).unwrap();
        assert_eq!(&bytes[..8], b"DRIFGv01");
        assert_eq!(&bytes[8..20], &[1, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(bytes.len(), 20 + 32);
        assert_eq!(&bytes[20..28], &1.0f64.to_le_bytes());
        assert_eq!(&bytes[28..36], &(-2.0f64).to_le_bytes());
    }

    #[test]
    fn malformed_files_are_rejected() {
        let img = ComplexImage::zeros(2, 2).unwrap();
        let good = encode_complex(&img).unwrap();
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(decode_complex(&bad), Err(Error::Format(_))));
        let mut bad = good.clone();
        bad[16] = 1;
        assert!(matches!(decode_complex(&bad), Err(Error::Format(_))));
        let mut bad = good.clone();
        bad[18] = 7;
        assert!(matches!(decode_complex(&bad), Err(Error::Format(_))));
        assert!(matches!(decode_complex(&good[..good.len() - 1]), Err(Error::Format(_))));
        assert!(decode_real(&good).is_err());
    }

    #[test]
    fn phase_mapping_end_points() {
        assert_eq!(phase_to_u16(PI), 65535);
        assert_eq!(phase_to_u16(-PI + 1e-12), 0);
        assert_eq!(phase_to_u16(0.0), 32768);
    }

    #[test]
    fn pgm_header() {
        let bytes = encode_pgm(2, 3, [0u16, 1, 2, 3, 4, 65535].into_iter());
        assert!(bytes.starts_with(b"P5\n3 2\n65535\n"));
        assert_eq!(&bytes[bytes.len() - 2..], &[0xff, 0xff]);
    }
}
