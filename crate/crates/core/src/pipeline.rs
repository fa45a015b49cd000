//! The simulate / decimate / recover / evaluate / coherence pipeline.
//!
//! Each `cmd_*` function reads its inputs from `input_dir`, writes its
//! outputs to `output_dir` and returns a summary. All outputs are
//! deterministic functions of the configuration; timing is returned to the
//! caller and never written to disk.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::band::{decimate, make_band_selection, BandSelection};
use crate::config::{PipelineConfig, ReferenceKind};
use crate::error::{Error, Result};
use crate::evaluation::{
    align_offset, coherence_probe, conventional_interferogram, remove_flat_earth, rrmse_db, unwrap_ls,
    wrapped_phase_rms, CoherenceStats, PhaseField,
};
use crate::image::{ComplexImage, RealField};
use crate::io;
use crate::operators::{modulation_from_reference, ModulationField};
use crate::recovery::{fista_recover, Recovery};
use crate::scene::{add_noise, form_image_pair, generate_scene, wrap_phase, SceneTruth};
use crate::wavelet::WaveletConfig;

pub const Z1_FILE: &str = "z1.cimg";
pub const Z2_FILE: &str = "z2.cimg";
pub const Z2_LOW_FILE: &str = "z2_low.cimg";
pub const THETA_FILE: &str = "theta.cimg";
pub const FLAT_FILE: &str = "flat_phase.rimg";
pub const ELEVATION_FILE: &str = "elevation_phase.rimg";
pub const SPECKLE_FILE: &str = "speckle_phase.rimg";
pub const AMPLITUDE_FILE: &str = "amplitude.rimg";
pub const U_FILE: &str = "u.cimg";
pub const X_FILE: &str = "x.cimg";
pub const SIMULATE_REPORT: &str = "simulate_report.txt";
pub const RECOVER_REPORT: &str = "recover_report.txt";
pub const EVALUATE_REPORT: &str = "evaluate_report.txt";
pub const COHERENCE_REPORT: &str = "coherence_report.txt";

// Offsets deriving independent streams from the master seed.
const NOISE_Z1_STREAM: u64 = 1;
const NOISE_Z2_STREAM: u64 = 2;
const COHERENCE_STREAM: u64 = 3;

#[derive(Debug, Clone)]
pub struct Simulation {
    pub scene: SceneTruth,
    pub z1: ComplexImage,
    pub z2: ComplexImage,
    pub z2_low: ComplexImage,
    pub theta: ModulationField,
    pub band: BandSelection,
}

pub fn band_for(cfg: &PipelineConfig, full_dims: (usize, usize)) -> Result<BandSelection> {
    make_band_selection(full_dims, cfg.alpha, cfg.beta)
}

/// Scene, image pair (with optional noise), low-resolution image and the
/// modulation built from the reference image and the known flat earth.
pub fn simulate(cfg: &PipelineConfig) -> Result<Simulation> {
    let dims = (cfg.rows, cfg.cols);
    let scene = generate_scene(dims, &cfg.fringe, cfg.seed)?;
    let (z1, z2) = form_image_pair(&scene)?;
    let z1 = add_noise(&z1, cfg.snr_db, cfg.seed.wrapping_add(NOISE_Z1_STREAM))?;
    let z2 = add_noise(&z2, cfg.snr_db, cfg.seed.wrapping_add(NOISE_Z2_STREAM))?;
    let band = band_for(cfg, dims)?;
    let z2_low = decimate(&z2, &band)?;
    let theta = modulation_from_reference(&z1, &scene.flat_phase)?;
    Ok(Simulation { scene, z1, z2, z2_low, theta, band })
}

pub fn recover(cfg: &PipelineConfig, z2_low: &ComplexImage, theta: &ModulationField) -> Result<Recovery> {
    let band = band_for(cfg, theta.dims())?;
    fista_recover(z2_low, theta, &band, &cfg.wavelet, &cfg.recovery)
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub rrmse_db: f64,
    /// RMS of the wrapped difference between recovered and reference phase.
    pub wrapped_rms: f64,
    pub rec_wrapped: PhaseField,
    pub rec_unwrapped: PhaseField,
    pub reference: PhaseField,
    pub rec_residues: usize,
    pub ref_residues: usize,
}

/// Unwraps the phase of `u`, aligns its constant to `reference` and scores it.
pub fn evaluate(u: &ComplexImage, reference: PhaseField, ref_residues: usize) -> Result<Evaluation> {
    let rec_wrapped = PhaseField::of(u);
    let unwrapped = unwrap_ls(&rec_wrapped)?;
    let rec_unwrapped = align_offset(&unwrapped.phase, &reference)?;
    let ref_wrapped = PhaseField::wrapped(reference.values().map(wrap_phase)?)?;
    Ok(Evaluation {
        rrmse_db: rrmse_db(&rec_unwrapped, &reference)?,
        wrapped_rms: wrapped_phase_rms(&rec_wrapped, &ref_wrapped)?,
        rec_wrapped,
        rec_unwrapped,
        reference,
        rec_residues: unwrapped.residues,
        ref_residues,
    })
}

/// Reference phase from two full-resolution images: flattened conventional
/// interferogram, unwrapped.
pub fn conventional_reference(
    z1: &ComplexImage,
    z2: &ComplexImage,
    flat: &RealField,
) -> Result<(PhaseField, usize)> {
    let ifg = remove_flat_earth(&conventional_interferogram(z1, z2)?, flat)?;
    let un = unwrap_ls(&PhaseField::of(&ifg))?;
    Ok((un.phase, un.residues))
}

fn in_path(cfg: &PipelineConfig, name: &str) -> PathBuf {
    Path::new(&cfg.input_dir).join(name)
}

fn out_dir(cfg: &PipelineConfig) -> Result<PathBuf> {
    let dir = PathBuf::from(&cfg.output_dir);
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn report_header(command: &str, cfg: &PipelineConfig) -> String {
    format!("# drifg {command}\n[config]\n{}\n[result]\n", cfg.to_text())
}

fn join_indices(v: &[usize]) -> String {
    v.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",")
}

pub fn cmd_simulate(cfg: &PipelineConfig) -> Result<Simulation> {
    let sim = simulate(cfg)?;
    let dir = out_dir(cfg)?;
    io::write_complex(&dir.join(Z1_FILE), &sim.z1)?;
    io::write_complex(&dir.join(Z2_FILE), &sim.z2)?;
    io::write_complex(&dir.join(Z2_LOW_FILE), &sim.z2_low)?;
    io::write_complex(&dir.join(THETA_FILE), sim.theta.as_image())?;
    io::write_real(&dir.join(FLAT_FILE), &sim.scene.flat_phase)?;
    io::write_real(&dir.join(ELEVATION_FILE), &sim.scene.elevation_phase)?;
    io::write_real(&dir.join(SPECKLE_FILE), &sim.scene.speckle_phase)?;
    io::write_real(&dir.join(AMPLITUDE_FILE), &sim.scene.amplitude)?;

    let mut report = report_header("simulate", cfg);
    let (m, k) = sim.band.reduced_dims();
    let _ = writeln!(report, "full_dims = {}x{}", cfg.rows, cfg.cols);
    let _ = writeln!(report, "reduced_dims = {m}x{k}");
    let _ = writeln!(report, "row_bins = {}", join_indices(sim.band.row_bins()));
    let _ = writeln!(report, "col_bins = {}", join_indices(sim.band.col_bins()));
    fs::write(dir.join(SIMULATE_REPORT), report)?;
    Ok(sim)
}

/// Low-resolution acquisition of an existing full-resolution `z2.cimg`.
pub fn cmd_decimate(cfg: &PipelineConfig) -> Result<ComplexImage> {
    let z2 = io::read_complex(&in_path(cfg, Z2_FILE))?;
    let band = band_for(cfg, z2.dims())?;
    let low = decimate(&z2, &band)?;
    io::write_complex(&out_dir(cfg)?.join(Z2_LOW_FILE), &low)?;
    Ok(low)
}

pub fn cmd_recover(cfg: &PipelineConfig) -> Result<(Recovery, Duration)> {
    let z2_low = io::read_complex(&in_path(cfg, Z2_LOW_FILE))?;
    let theta = ModulationField::new(io::read_complex(&in_path(cfg, THETA_FILE))?)?;
    if theta.dims() != (cfg.rows, cfg.cols) {
        return Err(Error::Dimension(format!(
            "theta is {}x{} but config says {}x{}",
            theta.dims().0,
            theta.dims().1,
            cfg.rows,
            cfg.cols
        )));
    }
    let start = Instant::now();
    let rec = recover(cfg, &z2_low, &theta)?;
    let elapsed = start.elapsed();

    let dir = out_dir(cfg)?;
    io::write_complex(&dir.join(U_FILE), &rec.u)?;
    io::write_complex(&dir.join(X_FILE), rec.x.as_image())?;
    let r = &rec.report;
    let mut report = report_header("recover", cfg);
    let _ = writeln!(report, "iterations_run = {}", r.iterations_run);
    let _ = writeln!(report, "converged = {}", r.converged);
    let _ = writeln!(report, "final_sparsity = {}", r.final_sparsity);
    let _ = writeln!(report, "residual_norm = {}", r.residual_norm);
    let _ = writeln!(report, "input_scale = {}", r.input_scale);
    let trace: Vec<String> = r.objective_trace.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(report, "objective_trace = {}", trace.join(","));
    fs::write(dir.join(RECOVER_REPORT), report)?;
    Ok((rec, elapsed))
}

pub fn cmd_evaluate(cfg: &PipelineConfig) -> Result<Evaluation> {
    let u = io::read_complex(&in_path(cfg, U_FILE))?;
    let (reference, ref_residues) = match cfg.reference {
        ReferenceKind::Truth => (
            PhaseField::unwrapped(io::read_real(&in_path(cfg, ELEVATION_FILE))?),
            0,
        ),
        ReferenceKind::Conventional => conventional_reference(
            &io::read_complex(&in_path(cfg, Z1_FILE))?,
            &io::read_complex(&in_path(cfg, Z2_FILE))?,
            &io::read_real(&in_path(cfg, FLAT_FILE))?,
        )?,
    };
    let ev = evaluate(&u, reference, ref_residues)?;

    let dir = out_dir(cfg)?;
    io::write_phase_pgm(&dir.join("phase_rec_wrapped.pgm"), ev.rec_wrapped.values())?;
    io::write_phase_pgm(
        &dir.join("phase_ref_wrapped.pgm"),
        &ev.reference.values().map(wrap_phase)?,
    )?;
    io::write_real_pgm(&dir.join("phase_rec_unwrapped.pgm"), ev.rec_unwrapped.values())?;
    io::write_real_pgm(&dir.join("phase_ref_unwrapped.pgm"), ev.reference.values())?;

    let mut report = report_header("evaluate", cfg);
    let _ = writeln!(report, "rrmse_db = {}", ev.rrmse_db);
    let _ = writeln!(report, "wrapped_phase_rms = {}", ev.wrapped_rms);
    let _ = writeln!(report, "rec_residues = {}", ev.rec_residues);
    let _ = writeln!(report, "ref_residues = {}", ev.ref_residues);
    fs::write(dir.join(EVALUATE_REPORT), report)?;
    Ok(ev)
}

pub fn cmd_coherence(cfg: &PipelineConfig) -> Result<CoherenceStats> {
    let wavelet = WaveletConfig::new(cfg.wavelet.family, cfg.coherence_levels);
    let stats = coherence_probe(
        (cfg.coherence_rows, cfg.coherence_cols),
        cfg.alpha,
        cfg.beta,
        &wavelet,
        cfg.coherence_trials,
        cfg.seed.wrapping_add(COHERENCE_STREAM),
    )?;
    let mut report = report_header("coherence", cfg);
    let _ = writeln!(report, "dims = {}x{}", stats.dims.0, stats.dims.1);
    let _ = writeln!(report, "trials = {}", stats.trials);
    let _ = writeln!(report, "random_mean = {}", stats.random_mean);
    let _ = writeln!(report, "random_std = {}", stats.random_std);
    let _ = writeln!(report, "random_min = {}", stats.random_min);
    let _ = writeln!(report, "random_max = {}", stats.random_max);
    let _ = writeln!(report, "constant = {}", stats.constant);
    let _ = writeln!(report, "random_below_constant = {}", stats.random_beats_constant());
    fs::write(out_dir(cfg)?.join(COHERENCE_REPORT), report)?;
    Ok(stats)
}
