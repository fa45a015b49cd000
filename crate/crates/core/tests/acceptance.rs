//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit status
//! if any criterion fails. Runs without the libtest harness so the lines are
//! always printed.

mod common;

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use common::{
    dense_proximal_gradient, img_rel_err, kron_forward, random_image, random_unit_image, rel_err, to_complex, vec_cm,
    wavelet_analysis_matrix,
};
use drifg::band::{make_band_selection, Ratio};
use drifg::config::PipelineConfig;
use drifg::evaluation::PhaseField;
use drifg::io::{read_complex, write_complex};
use drifg::operators::{build_dense_forward, ForwardModel, ModulationField, SensingOperator};
use drifg::pipeline::{self, evaluate, recover, simulate};
use drifg::recovery::{fista_recover_with, objective_with};
use drifg::wavelet::{wavelet_analysis, wavelet_synthesis};
use drifg::{RecoveryConfig, SparseCoeffs, WaveletConfig, WaveletFamily};
use nalgebra::DVector;

/// End-to-end RRMSE (dB) of the default 256x256 scene at alpha = beta = 1/2,
/// measured once by `tests/calibration.rs` after checking the solver against
/// the dense oracle.
const THRESHOLD_HALF_DB: f64 = -8.326;
/// Same at alpha = beta = 1/4.
const THRESHOLD_QUARTER_DB: f64 = -1.301;
const THRESHOLD_SLACK_DB: f64 = 1.0;
const WINDOW: usize = 20;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn windowed_minimum_non_increasing(trace: &[f64]) -> bool {
    let slack = 1e-12 * trace[0];
    let mins: Vec<f64> = trace.windows(WINDOW.min(trace.len())).map(|s| s.iter().copied().fold(f64::INFINITY, f64::min)).collect();
    mins.windows(2).all(|p| p[1] <= p[0] + slack)
}

struct EndToEnd {
    rrmse_db: f64,
    seconds: f64,
    trace: Vec<f64>,
}

fn end_to_end(ratio: Ratio) -> EndToEnd {
    let cfg = PipelineConfig { alpha: ratio, beta: ratio, ..PipelineConfig::default() };
    let start = Instant::now();
    let sim = simulate(&cfg).unwrap();
    let rec = recover(&cfg, &sim.z2_low, &sim.theta).unwrap();
    let ev = evaluate(&rec.u, PhaseField::unwrapped(sim.scene.elevation_phase.clone()), 0).unwrap();
    EndToEnd { rrmse_db: ev.rrmse_db, seconds: start.elapsed().as_secs_f64(), trace: rec.report.objective_trace }
}

fn criterion_1(half: &EndToEnd, quarter: &EndToEnd) -> Outcome {
    let ok = half.rrmse_db <= THRESHOLD_HALF_DB + THRESHOLD_SLACK_DB
        && quarter.rrmse_db <= THRESHOLD_QUARTER_DB + THRESHOLD_SLACK_DB
        && THRESHOLD_HALF_DB < THRESHOLD_QUARTER_DB
        && half.seconds <= 60.0
        && quarter.seconds <= 60.0;
    check(
        ok,
        format!(
            "1/2: {:.3} dB (limit {:.3}, {:.1} s); 1/4: {:.3} dB (limit {:.3}, {:.1} s)",
            half.rrmse_db,
            THRESHOLD_HALF_DB + THRESHOLD_SLACK_DB,
            half.seconds,
            quarter.rrmse_db,
            THRESHOLD_QUARTER_DB + THRESHOLD_SLACK_DB,
            quarter.seconds
        ),
    )
}

fn criterion_2() -> Outcome {
    let cfg = PipelineConfig {
        alpha: Ratio::ONE,
        beta: Ratio::ONE,
        recovery: RecoveryConfig { lambda: 0.0, max_iters: 50, ..RecoveryConfig::default() },
        ..PipelineConfig::default()
    };
    let start = Instant::now();
    let sim = simulate(&cfg).unwrap();
    let rec = recover(&cfg, &sim.z2_low, &sim.theta).unwrap();
    let seconds = start.elapsed().as_secs_f64();
    let err = img_rel_err(&rec.u, &sim.scene.interferogram());
    check(
        err <= 1e-8 && seconds <= 5.0 && rec.report.iterations_run <= 50,
        format!("relative error {err:.2e} after {} iterations, {seconds:.2} s", rec.report.iterations_run),
    )
}

fn criterion_3() -> Outcome {
    let ratios = [Ratio::ONE, Ratio::new(1, 2).unwrap(), Ratio::new(1, 4).unwrap()];

    let dims = (64, 64);
    let band = make_band_selection(dims, ratios[1], ratios[1]).unwrap();
    let (m, k) = band.reduced_dims();
    let theta = ModulationField::new(random_unit_image(64, 64, 1)).unwrap();
    let model = ForwardModel::new(theta.clone(), band.clone()).unwrap();
    let op = SensingOperator::new(theta, band, WaveletConfig::default()).unwrap();
    let mut adjoint = 0.0f64;
    for i in 0..100 {
        let u = random_image(64, 64, 100 + i);
        let y = random_image(m, k, 900 + i);
        let scale = u.norm() * y.norm();
        let gap = (model.apply(&u).unwrap().dot(&y).unwrap() - u.dot(&model.adjoint(&y).unwrap()).unwrap()).norm();
        adjoint = adjoint.max(gap / scale);
        let x = SparseCoeffs::new(u);
        let gap = (op.apply(&x).unwrap().dot(&y).unwrap() - x.as_image().dot(op.adjoint(&y).unwrap().as_image()).unwrap()).norm();
        adjoint = adjoint.max(gap / scale);
    }

    let mut dense = 0.0f64;
    for (i, &a) in ratios.iter().enumerate() {
        for (j, &b) in ratios.iter().enumerate() {
            let theta = ModulationField::new(random_unit_image(8, 8, (10 * i + j) as u64)).unwrap();
            let band = make_band_selection((8, 8), a, b).unwrap();
            let oracle = kron_forward(theta.as_image(), a, b);
            dense = dense.max(rel_err(&build_dense_forward(&theta, &band).unwrap(), &oracle));
            // Adjoint against the oracle's conjugate transpose.
            let model = ForwardModel::new(theta, band.clone()).unwrap();
            let (m, k) = band.reduced_dims();
            let y = random_image(m, k, 77);
            let expect = oracle.adjoint() * DVector::from_vec(vec_cm(&y));
            let got = DVector::from_vec(vec_cm(&model.adjoint(&y).unwrap()));
            dense = dense.max((got - &expect).norm() / expect.norm());
            let cfg = WaveletConfig::new(WaveletFamily::Db4, 1);
            let w = to_complex(&wavelet_analysis_matrix(8, 8, WaveletFamily::Db4, 1).transpose());
            let a_dense = drifg::operators::build_dense_sensing(model.theta(), &band, &cfg).unwrap();
            dense = dense.max(rel_err(&a_dense, &(oracle * w)));
        }
    }

    let mut wavelet = 0.0f64;
    for (family, levels) in [(WaveletFamily::Haar, 4), (WaveletFamily::Db2, 3), (WaveletFamily::Db4, 4)] {
        let cfg = WaveletConfig::new(family, levels);
        let u = random_image(64, 64, levels as u64);
        let x = wavelet_analysis(&u, &cfg).unwrap();
        wavelet = wavelet.max(img_rel_err(&wavelet_synthesis(&x, &cfg).unwrap(), &u));
        wavelet = wavelet.max((x.as_image().norm() - u.norm()).abs() / u.norm());
        let c = SparseCoeffs::new(random_image(64, 64, 50 + levels as u64));
        let v = wavelet_synthesis(&c, &cfg).unwrap();
        wavelet = wavelet.max(img_rel_err(wavelet_analysis(&v, &cfg).unwrap().as_image(), c.as_image()));
        wavelet = wavelet.max((v.norm() - c.as_image().norm()).abs() / c.as_image().norm());
    }

    check(
        adjoint <= 1e-10 && dense <= 1e-12 && wavelet <= 1e-10,
        format!("adjoint {adjoint:.1e}, dense oracle {dense:.1e}, wavelet {wavelet:.1e}"),
    )
}

fn criterion_4() -> Outcome {
    let half = Ratio::new(1, 2).unwrap();
    let band = make_band_selection((32, 32), half, half).unwrap();
    let theta = ModulationField::new(random_unit_image(32, 32, 4)).unwrap();
    let op = SensingOperator::new(theta, band, WaveletConfig::new(WaveletFamily::Db4, 3)).unwrap();
    let mut v = random_image(32, 32, 5);
    let mut eig = 0.0;
    for _ in 0..200 {
        v = v.scale(1.0 / v.norm());
        let w = op.adjoint(&op.apply(&SparseCoeffs::new(v.clone())).unwrap()).unwrap().into_image();
        eig = v.dot(&w).unwrap().re;
        v = w;
    }
    let norm = eig.sqrt();
    check((norm - 1.0).abs() <= 1e-6, format!("power iteration norm {norm:.12}"))
}

fn criterion_5(dir: &Path) -> Outcome {
    let cfg = PipelineConfig { output_dir: dir.to_string_lossy().into_owned(), ..PipelineConfig::default() };
    let start = Instant::now();
    let stats = pipeline::cmd_coherence(&cfg).unwrap();
    let seconds = start.elapsed().as_secs_f64();
    let report = fs::read_to_string(dir.join(pipeline::COHERENCE_REPORT)).unwrap_or_default();
    let written = report.contains(&format!("random_mean = {}", stats.random_mean))
        && report.contains(&format!("constant = {}", stats.constant));
    check(
        stats.dims == (8, 8)
            && stats.trials == 50
            && stats.random_mean < stats.constant
            && written
            && seconds <= 30.0,
        format!(
            "random mean {:.4} (std {:.4}, min {:.4}, max {:.4}) vs constant {:.4} over {} draws, {seconds:.1} s",
            stats.random_mean, stats.random_std, stats.random_min, stats.random_max, stats.constant, stats.trials
        ),
    )
}

fn criterion_6(runs: &[&[f64]]) -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (i, trace) in runs.iter().enumerate() {
        let fine = trace.last().unwrap() <= &trace[0] && windowed_minimum_non_increasing(trace);
        ok &= fine;
        if !fine {
            details.push(format!("run {i} trace not decreasing"));
        }
    }

    let half = Ratio::new(1, 2).unwrap();
    let mut worst = 0.0f64;
    for seed in [10u64, 20, 30] {
        let theta = ModulationField::new(random_unit_image(8, 8, seed)).unwrap();
        let band = make_band_selection((8, 8), half, half).unwrap();
        let z = random_image(4, 4, seed + 1);
        let wcfg = WaveletConfig::new(WaveletFamily::Db4, 1);
        let a = kron_forward(theta.as_image(), half, half)
            * to_complex(&wavelet_analysis_matrix(8, 8, WaveletFamily::Db4, 1).transpose());
        let iters = 10_000;
        let (_, oracle) = dense_proximal_gradient(&a, &vec_cm(&z), 1e-4, iters, true);
        let op = SensingOperator::new(theta, band, wcfg).unwrap();
        let cfg = RecoveryConfig { lambda: 1e-4, max_iters: iters, normalize_input: false, ..RecoveryConfig::default() };
        let rec = fista_recover_with(&op, &z, &cfg).unwrap();
        let f = objective_with(&op, &rec.x, &z, 1e-4).unwrap();
        ok &= rec.report.objective_trace.last().unwrap() <= &rec.report.objective_trace[0];
        ok &= windowed_minimum_non_increasing(&rec.report.objective_trace);
        worst = worst.max((f - oracle).abs());
    }
    ok &= worst <= 1e-6;
    details.push(format!("{} traces monotone in windows of {WINDOW}; 8x8 gap to dense oracle {worst:.1e}", runs.len() + 3));
    check(ok, details.join("; "))
}

fn criterion_7(dir: &Path) -> Outcome {
    let d = dir.display();
    let config = dir.join("config.txt");
    fs::write(
        &config,
        format!("rows = 64\ncols = 64\nelevation = hills 30,20,10,6\nwavelet_levels = 3\nsnr_db = 20\ninput_dir = {d}\noutput_dir = {d}\n"),
    )
    .unwrap();
    let commands = ["simulate", "decimate", "recover", "evaluate", "coherence"];
    let run_all = || -> Vec<(String, Vec<u8>)> {
        for c in commands {
            let status = Command::new(env!("CARGO_BIN_EXE_drifg")).arg(c).arg("--config").arg(&config).output().unwrap();
            assert!(status.status.success(), "{c}: {}", String::from_utf8_lossy(&status.stderr));
        }
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap())
            .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
            .collect();
        files.sort();
        files
    };
    let first = run_all();
    let second = run_all();
    let identical = first == second;

    let mut exact = true;
    for seed in 0..20 {
        let img = random_image(17 + seed, 9 + seed, seed as u64);
        let path = dir.join("roundtrip.cimg");
        write_complex(&path, &img).unwrap();
        let back = read_complex(&path).unwrap();
        exact &= back.dims() == img.dims()
            && back.as_slice().iter().zip(img.as_slice()).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
    }
    check(
        identical && exact,
        format!("{} output files identical across reruns: {identical}; bit-exact round trips: {exact}", first.len()),
    )
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let coherence_dir = dir.path().join("coherence");
    let cli_dir = dir.path().join("cli");
    fs::create_dir_all(&cli_dir).unwrap();

    let half = end_to_end(Ratio::new(1, 2).unwrap());
    let quarter = end_to_end(Ratio::new(1, 4).unwrap());

    let results = [
        ("end-to-end RRMSE against calibrated thresholds", criterion_1(&half, &quarter)),
        ("exact recovery at full band without regularization", criterion_2()),
        ("operator adjoints, dense oracle and wavelet identities", criterion_3()),
        ("unit spectral norm of the sensing operator", criterion_4()),
        ("random modulation lowers mutual coherence", criterion_5(&coherence_dir)),
        ("FISTA objective behaviour", criterion_6(&[&half.trace, &quarter.trace])),
        ("deterministic commands and bit-exact files", criterion_7(&cli_dir)),
    ];

    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
