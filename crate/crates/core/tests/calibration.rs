//! Recomputes the end-to-end RRMSE thresholds enforced by the acceptance
//! suite. Run with `cargo test --release --test calibration -- --ignored --nocapture`.
//!
//! The matrix-free pipeline is first checked against a fully dense
//! proximal-gradient solve (explicit DFT Kronecker operator times explicit
//! filter-bank wavelet matrix) on a 32x32 copy of the default scene, shrunk
//! by 8 in every length so the fringe slopes are unchanged. Once the two
//! agree, the 256x256 pipeline values are the thresholds.

mod common;

use common::{dense_proximal_gradient, kron_forward, to_complex, unvec_cm, vec_cm, wavelet_analysis_matrix};
use drifg::band::Ratio;
use drifg::config::{default_hills, PipelineConfig};
use drifg::evaluation::PhaseField;
use drifg::pipeline::{evaluate, recover, simulate};
use drifg::scene::{ElevationModel, GaussianHill};
use drifg::{RecoveryConfig, WaveletConfig};
use nalgebra::DVector;
use num_complex::Complex64;

fn shrunk_config(ratio: Ratio) -> PipelineConfig {
    let mut cfg = PipelineConfig { rows: 32, cols: 32, alpha: ratio, beta: ratio, ..PipelineConfig::default() };
    cfg.fringe.elevation = ElevationModel::Hills(
        default_hills()
            .into_iter()
            .map(|h| GaussianHill {
                center_row: h.center_row / 8.0,
                center_col: h.center_col / 8.0,
                sigma: h.sigma / 8.0,
                peak: h.peak / 8.0,
            })
            .collect(),
    );
    cfg.wavelet = WaveletConfig::new(cfg.wavelet.family, 3);
    cfg
}

#[test]
#[ignore = "calibration run; prints the acceptance thresholds"]
fn calibrate_thresholds() {
    for ratio in [Ratio::new(1, 2).unwrap(), Ratio::new(1, 4).unwrap()] {
        let cfg = shrunk_config(ratio);
        let sim = simulate(&cfg).unwrap();
        let reference = PhaseField::unwrapped(sim.scene.elevation_phase.clone());

        let w = to_complex(&wavelet_analysis_matrix(32, 32, cfg.wavelet.family, cfg.wavelet.levels).transpose());
        let a = kron_forward(sim.theta.as_image(), ratio, ratio) * &w;
        let scale = sim.z2_low.max_abs();
        let z: Vec<Complex64> = vec_cm(&sim.z2_low).iter().map(|v| v / scale).collect();
        let RecoveryConfig { lambda, max_iters, .. } = cfg.recovery;
        let (x, _) = dense_proximal_gradient(&a, &z, lambda, max_iters, true);
        let u_dense = unvec_cm((&w * DVector::from_vec(x)).as_slice(), 32, 32).scale(scale);

        let rec = recover(&cfg, &sim.z2_low, &sim.theta).unwrap();
        let dense_db = evaluate(&u_dense, reference.clone(), 0).unwrap().rrmse_db;
        let free_db = evaluate(&rec.u, reference, 0).unwrap().rrmse_db;
        println!("32x32 ratio {ratio}: dense oracle {dense_db:.4} dB, matrix-free {free_db:.4} dB");
        assert!((dense_db - free_db).abs() < 1e-6);

        let full = PipelineConfig { alpha: ratio, beta: ratio, ..PipelineConfig::default() };
        let sim = simulate(&full).unwrap();
        let rec = recover(&full, &sim.z2_low, &sim.theta).unwrap();
        let ev = evaluate(&rec.u, PhaseField::unwrapped(sim.scene.elevation_phase.clone()), 0).unwrap();
        println!("256x256 ratio {ratio}: threshold {:.4} dB", ev.rrmse_db);
    }
}
