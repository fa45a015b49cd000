//! Recovery of a high-resolution radar interferogram from one
//! high-resolution and one low-resolution complex image.
//!
//! The low-resolution acquisition is modelled as a lowpass common-band
//! resampling of the high-resolution one. Writing the second image as the
//! first image's phase (plus flat earth) times the interferogram makes the
//! interferogram the unknown of an underdetermined linear system, which is
//! solved as a wavelet-sparse l1 problem with FISTA.
//!
//! Modules:
//! - [`scene`]: synthetic scenes, image pairs, decimation and noise
//! - [`operators`]: the forward model, its adjoint, wavelets and dense oracles
//! - [`recovery`]: FISTA
//! - [`evaluation`]: RRMSE, unwrapping, coherence diagnostics
//! - [`pipeline`], [`config`], [`io`]: the command-line pipeline and its files

pub mod band;
pub mod config;
pub mod error;
pub mod evaluation;
pub mod fft;
pub mod image;
pub mod io;
pub mod operators;
pub mod pipeline;
pub mod recovery;
pub mod scene;
pub mod wavelet;

pub use band::{decimate, make_band_selection, BandSelection, Ratio};
pub use error::{Error, Result};
pub use image::{ComplexImage, RealField};
pub use operators::{ForwardModel, ModulationField, SensingOperator};
pub use recovery::{fista_recover, Recovery, RecoveryConfig, RecoveryReport};
pub use scene::{add_noise, form_image_pair, generate_scene, FringeSpec, SceneTruth};
pub use wavelet::{SparseCoeffs, WaveletConfig, WaveletFamily};
