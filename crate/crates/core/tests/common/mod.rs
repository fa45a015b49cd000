//! Independent dense constructions used as oracles. Nothing here calls the
//! matrix-free operators; everything is built from DFT matrices, filter taps
//! and Kronecker products.

#![allow(dead_code)]

use std::f64::consts::PI;

use drifg::band::{lowpass_bins, Ratio};
use drifg::{ComplexImage, WaveletFamily};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Mat = DMatrix<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(rows: usize, cols: usize, seed: u64) -> ComplexImage {
    let mut r = rng(seed);
    ComplexImage::from_fn(rows, cols, |_, _| {
        Complex64::new(r.random::<f64>() * 2.0 - 1.0, r.random::<f64>() * 2.0 - 1.0)
    })
    .unwrap()
}

pub fn random_unit_image(rows: usize, cols: usize, seed: u64) -> ComplexImage {
    let mut r = rng(seed);
    ComplexImage::from_fn(rows, cols, |_, _| Complex64::from_polar(1.0, PI - 2.0 * PI * r.random::<f64>()))
        .unwrap()
}

/// Unitary n-point DFT matrix.
pub fn dft(n: usize) -> Mat {
    let s = 1.0 / (n as f64).sqrt();
    Mat::from_fn(n, n, |p, q| Complex64::from_polar(s, -2.0 * PI * (p * q) as f64 / n as f64))
}

/// `F_m^H Omega F_n` for the lowpass selection of `m` of `n` bins.
pub fn resample_1d(n: usize, m: usize) -> Mat {
    let bins = lowpass_bins(n, m);
    let omega = Mat::from_fn(m, n, |j, i| if bins[j] == i { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    dft(m).adjoint() * omega * dft(n)
}

/// Dense `M = (R_col kron R_row) diag(vec theta)` on column-major vecs.
pub fn kron_forward(theta: &ComplexImage, alpha: Ratio, beta: Ratio) -> Mat {
    let (n, l) = theta.dims();
    let rrow = resample_1d(n, alpha.apply(n).unwrap());
    let rcol = resample_1d(l, beta.apply(l).unwrap());
    let k = rcol.kronecker(&rrow);
    let diag = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec_cm(theta)));
    k * diag
}

pub fn vec_cm(img: &ComplexImage) -> Vec<Complex64> {
    let (rows, cols) = img.dims();
    (0..cols).flat_map(|c| (0..rows).map(move |r| (r, c))).map(|(r, c)| img.get(r, c)).collect()
}

pub fn unvec_cm(v: &[Complex64], rows: usize, cols: usize) -> ComplexImage {
    ComplexImage::from_fn(rows, cols, |r, c| v[r + c * rows]).unwrap()
}

/// Single-level periodic analysis matrix of size `n` from filter taps.
fn analysis_1d(family: WaveletFamily, n: usize) -> DMatrix<f64> {
    let h = family.scaling_filter();
    let len = h.len();
    let g: Vec<f64> = (0..len).map(|i| if i % 2 == 0 { h[len - 1 - i] } else { -h[len - 1 - i] }).collect();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 0..n / 2 {
        for t in 0..len {
            m[(k, (2 * k + t) % n)] += h[t];
            m[(n / 2 + k, (2 * k + t) % n)] += g[t];
        }
    }
    m
}

/// `size x size` matrix applying `s` to the leading block and identity to the rest.
fn embed(s: &DMatrix<f64>, size: usize) -> DMatrix<f64> {
    let b = s.nrows();
    DMatrix::from_fn(size, size, |i, j| {
        if i < b && j < b {
            s[(i, j)]
        } else if i == j {
            1.0
        } else {
            0.0
        }
    })
}

/// Dense 2-D Mallat analysis `W^T` on column-major vecs.
pub fn wavelet_analysis_matrix(rows: usize, cols: usize, family: WaveletFamily, levels: u32) -> DMatrix<f64> {
    let mut total = DMatrix::<f64>::identity(rows * cols, rows * cols);
    for level in 0..levels {
        let (r, c) = (rows >> level, cols >> level);
        let sr = embed(&analysis_1d(family, r), rows);
        let sc = embed(&analysis_1d(family, c), cols);
        let mask_r = DMatrix::from_fn(rows, rows, |i, j| if i == j && i < r { 1.0 } else { 0.0 });
        let mask_c = DMatrix::from_fn(cols, cols, |i, j| if i == j && i < c { 1.0 } else { 0.0 });
        let id = DMatrix::<f64>::identity(rows * cols, rows * cols);
        let step = &id - mask_c.kronecker(&mask_r) + (&sc * &mask_c).kronecker(&(&sr * &mask_r));
        total = step * total;
    }
    total
}

pub fn to_complex(m: &DMatrix<f64>) -> Mat {
    m.map(|v| Complex64::new(v, 0.0))
}

pub fn rel_err(a: &Mat, b: &Mat) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn img_rel_err(a: &ComplexImage, b: &ComplexImage) -> f64 {
    let num: f64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).norm_sqr()).sum();
    (num / b.norm_sqr().max(1e-300)).sqrt()
}

pub fn dense_objective(a: &Mat, z: &[Complex64], x: &[Complex64], lambda: f64) -> f64 {
    let xv = nalgebra::DVector::from_column_slice(x);
    let zv = nalgebra::DVector::from_column_slice(z);
    let r = a * xv - zv;
    r.norm_squared() + lambda * x.iter().map(|c| c.norm()).sum::<f64>()
}

/// Dense proximal gradient on `||z - A x||^2 + lambda ||x||_1` with step
/// `1 / (2 ||A||^2)`, where `||A||` comes from a dense SVD. With
/// `accelerated` the iterates use Nesterov extrapolation.
pub fn dense_proximal_gradient(
    a: &Mat,
    z: &[Complex64],
    lambda: f64,
    iters: usize,
    accelerated: bool,
) -> (Vec<Complex64>, f64) {
    let sigma = a.clone().singular_values().max();
    let step = 1.0 / (2.0 * sigma * sigma);
    let tau = step * lambda;
    let zv = nalgebra::DVector::from_column_slice(z);
    let ah = a.adjoint();
    let mut x = nalgebra::DVector::<Complex64>::zeros(a.ncols());
    let mut y = x.clone();
    let mut t = 1.0f64;
    for _ in 0..iters {
        let grad = &ah * (a * &y - &zv) * Complex64::new(2.0, 0.0);
        let mut next = &y - grad * Complex64::new(step, 0.0);
        for c in next.iter_mut() {
            let m = c.norm();
            *c = if m <= tau { Complex64::new(0.0, 0.0) } else { *c * (1.0 - tau / m) };
        }
        if accelerated {
            let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
            y = &next + (&next - &x) * Complex64::new((t - 1.0) / t_next, 0.0);
            t = t_next;
        } else {
            y = next.clone();
        }
        x = next;
    }
    let xs: Vec<Complex64> = x.iter().copied().collect();
    let obj = dense_objective(a, z, &xs, lambda);
    (xs, obj)
}
