// Unweighted least-squares phase unwrapping (Ghiglia & Romero): solve the
// Neumann Poisson equation whose source is the divergence of the wrapped
// phase gradients, diagonalized by the 2-D DCT.

use std::f64::consts::PI;

use rustdct::DctPlanner;

use super::PhaseField;
use crate::error::{Error, Result};
use crate::image::RealField;
use crate::scene::wrap_phase;

#[derive(Debug, Clone, PartialEq)]
pub struct Unwrapped {
    pub phase: PhaseField,
    /// Number of 2x2 loops with a nonzero wrapped-gradient circulation. When
    /// positive, the least-squares surface is not congruent to the input.
    pub residues: usize,
}

pub fn count_residues(wrapped: &PhaseField) -> usize {
    let p = wrapped.values();
    let (rows, cols) = p.dims();
    let mut count = 0;
    for r in 0..rows.saturating_sub(1) {
        for c in 0..cols.saturating_sub(1) {
            let circulation = wrap_phase(p.get(r, c + 1) - p.get(r, c))
                + wrap_phase(p.get(r + 1, c + 1) - p.get(r, c + 1))
                + wrap_phase(p.get(r + 1, c) - p.get(r + 1, c + 1))
                + wrap_phase(p.get(r, c) - p.get(r + 1, c));
            if (circulation / (2.0 * PI)).round() != 0.0 {
                count += 1;
            }
        }
    }
    count
}

/// Least-squares unwrapping. The additive constant makes the output
/// congruent with the input (modulo 2 pi, in the circular-mean sense) and,
/// among those choices, puts its mean closest to the input mean.
pub fn unwrap_ls(wrapped: &PhaseField) -> Result<Unwrapped> {
    if !wrapped.is_wrapped() {
        return Err(Error::InvalidParameter("unwrap_ls expects a wrapped phase".into()));
    }
    let p = wrapped.values();
    let (rows, cols) = p.dims();
    if rows * cols < 2 {
        return Err(Error::Dimension("cannot unwrap a single pixel".into()));
    }

    // Divergence of the wrapped forward differences, with zero flux across
    // the borders.
    let mut rho = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let dx = |c: usize| wrap_phase(p.get(r, c + 1) - p.get(r, c));
            let dy = |r: usize| wrap_phase(p.get(r + 1, c) - p.get(r, c));
            let mut v = 0.0;
            if c + 1 < cols {
                v += dx(c);
            }
            if c > 0 {
                v -= dx(c - 1);
            }
            if r + 1 < rows {
                v += dy(r);
            }
            if r > 0 {
                v -= dy(r - 1);
            }
            rho[r * cols + c] = v;
        }
    }

    let mut planner = DctPlanner::new();
    let (row_dct2, row_dct3) = (planner.plan_dct2(cols), planner.plan_dct3(cols));
    let (col_dct2, col_dct3) = (planner.plan_dct2(rows), planner.plan_dct3(rows));

    let mut spec = rho;
    for row in spec.chunks_exact_mut(cols) {
        row_dct2.process_dct2(row);
    }
    let mut t = transpose(&spec, rows, cols);
    for col in t.chunks_exact_mut(rows) {
        col_dct2.process_dct2(col);
    }
    // t is laid out [col][row].
    for j in 0..cols {
        for i in 0..rows {
            let eig = 2.0 * (PI * i as f64 / rows as f64).cos()
                + 2.0 * (PI * j as f64 / cols as f64).cos()
                - 4.0;
            let v = &mut t[j * rows + i];
            *v = if i == 0 && j == 0 { 0.0 } else { *v / eig };
        }
    }
    for col in t.chunks_exact_mut(rows) {
        col_dct3.process_dct3(col);
    }
    let mut phi = transpose(&t, cols, rows);
    for row in phi.chunks_exact_mut(cols) {
        row_dct3.process_dct3(row);
    }

    // DCT-III after DCT-II multiplies by len/2 along each axis.
    let norm = 4.0 / (rows * cols) as f64;
    for v in &mut phi {
        *v *= norm;
    }

    // Fix the free constant: first make the surface congruent with the
    // input (circular mean of the wrapped misfit), then move it by the
    // multiple of 2 pi that brings its mean closest to the input mean.
    let (mut s, mut c) = (0.0, 0.0);
    for (&u, &w) in phi.iter().zip(p.as_slice()) {
        let (si, ci) = wrap_phase(w - u).sin_cos();
        s += si;
        c += ci;
    }
    let congruent = s.atan2(c);
    let mean_out = phi.iter().sum::<f64>() / phi.len() as f64 + congruent;
    let turns = ((p.mean() - mean_out) / (2.0 * PI)).round();
    let offset = congruent + 2.0 * PI * turns;
    for v in &mut phi {
        *v += offset;
    }

    Ok(Unwrapped {
        phase: PhaseField::unwrapped(RealField::new(rows, cols, phi)?),
        residues: count_residues(wrapped),
    })
}

fn transpose(data: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}
