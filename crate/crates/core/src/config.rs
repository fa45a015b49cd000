//! Pipeline configuration in flat `key = value` text.
//!
//! Blank lines and `#` comments are ignored. Unknown or repeated keys are
//! errors; omitted keys take their defaults. [`PipelineConfig::to_text`]
//! writes every key in a fixed order and parses back to an identical value.
//!
//! | key | value |
//! |---|---|
//! | `rows`, `cols` | full-resolution grid size |
//! | `elevation` | `zero`, `ramp DR,DC`, `cone R,C,RADIUS,PEAK` or `hills R,C,SIGMA,PEAK; ...` |
//! | `flat_slope_row`, `flat_slope_col` | flat-earth ramp, rad/pixel |
//! | `amplitude` | `rayleigh SIGMA` or `constant VALUE` |
//! | `backscatter_depth` | smooth amplitude modulation depth in `[0, 1)` |
//! | `alpha`, `beta` | bandwidth ratios, e.g. `1/2` |
//! | `snr_db` | additive noise SNR, `inf` for none |
//! | `wavelet`, `wavelet_levels` | `haar`, `db2` or `db4`, and depth |
//! | `lambda`, `max_iters`, `step`, `rel_tol`, `normalize_input`, `adaptive_restart` | solver settings |
//! | `seed` | master seed |
//! | `reference` | `truth` or `conventional` |
//! | `coherence_rows`, `coherence_cols`, `coherence_levels`, `coherence_trials` | coherence probe |
//! | `input_dir`, `output_dir` | file locations |

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::band::Ratio;
use crate::error::{Error, Result};
use crate::recovery::RecoveryConfig;
use crate::scene::{AmplitudeLaw, ElevationModel, FringeSpec, GaussianHill};
use crate::wavelet::{WaveletConfig, WaveletFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReferenceKind {
    /// Score against the simulated elevation phase.
    #[default]
    Truth,
    /// Score against the two-full-resolution-image interferogram.
    Conventional,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub rows: usize,
    pub cols: usize,
    pub fringe: FringeSpec,
    pub alpha: Ratio,
    pub beta: Ratio,
    pub snr_db: f64,
    pub wavelet: WaveletConfig,
    pub recovery: RecoveryConfig,
    pub seed: u64,
    pub reference: ReferenceKind,
    pub coherence_rows: usize,
    pub coherence_cols: usize,
    pub coherence_levels: u32,
    pub coherence_trials: usize,
    pub input_dir: String,
    pub output_dir: String,
}

/// Gaussian hills on a 256x256 grid; steepest slope stays below 1 rad/pixel.
pub fn default_hills() -> Vec<GaussianHill> {
    vec![
        GaussianHill { center_row: 96.0, center_col: 80.0, sigma: 28.0, peak: 22.0 },
        GaussianHill { center_row: 170.0, center_col: 180.0, sigma: 36.0, peak: -18.0 },
        GaussianHill { center_row: 60.0, center_col: 200.0, sigma: 20.0, peak: 10.0 },
    ]
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            rows: 256,
            cols: 256,
            fringe: FringeSpec {
                elevation: ElevationModel::Hills(default_hills()),
                flat_row_slope: 0.35,
                flat_col_slope: 0.6,
                amplitude: AmplitudeLaw::Rayleigh { sigma: 1.0 },
                backscatter_depth: 0.0,
            },
            alpha: Ratio::new(1, 2).unwrap(),
            beta: Ratio::new(1, 2).unwrap(),
            snr_db: f64::INFINITY,
            wavelet: WaveletConfig::default(),
            recovery: RecoveryConfig::default(),
            seed: 7,
            reference: ReferenceKind::Truth,
            coherence_rows: 8,
            coherence_cols: 8,
            coherence_levels: 1,
            coherence_trials: 50,
            input_dir: ".".into(),
            output_dir: ".".into(),
        }
    }
}

const KEYS: &[&str] = &[
    "rows",
    "cols",
    "elevation",
    "flat_slope_row",
    "flat_slope_col",
    "amplitude",
    "backscatter_depth",
    "alpha",
    "beta",
    "snr_db",
    "wavelet",
    "wavelet_levels",
    "lambda",
    "max_iters",
    "step",
    "rel_tol",
    "normalize_input",
    "adaptive_restart",
    "seed",
    "reference",
    "coherence_rows",
    "coherence_cols",
    "coherence_levels",
    "coherence_trials",
    "input_dir",
    "output_dir",
];

fn bad(key: &str, value: &str) -> Error {
    Error::Config(format!("invalid value for {key}: {value:?}"))
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(key, value))
}

fn floats(key: &str, value: &str, n: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = value
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad(key, value)))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(bad(key, value));
    }
    Ok(v)
}

fn parse_elevation(value: &str) -> Result<ElevationModel> {
    let (kind, rest) = value.split_once(char::is_whitespace).unwrap_or((value, ""));
    let rest = rest.trim();
    match kind {
        "zero" if rest.is_empty() => Ok(ElevationModel::Zero),
        "ramp" => {
            let v = floats("elevation", rest, 2)?;
            Ok(ElevationModel::Ramp { row_slope: v[0], col_slope: v[1] })
        }
        "cone" => {
            let v = floats("elevation", rest, 4)?;
            Ok(ElevationModel::Cone { center_row: v[0], center_col: v[1], radius: v[2], peak: v[3] })
        }
        "hills" => {
            let hills = rest
                .split(';')
                .map(|h| {
                    let v = floats("elevation", h, 4)?;
                    Ok(GaussianHill { center_row: v[0], center_col: v[1], sigma: v[2], peak: v[3] })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ElevationModel::Hills(hills))
        }
        _ => Err(bad("elevation", value)),
    }
}

fn format_elevation(e: &ElevationModel) -> String {
    match e {
        ElevationModel::Zero => "zero".into(),
        ElevationModel::Ramp { row_slope, col_slope } => format!("ramp {row_slope},{col_slope}"),
        ElevationModel::Cone { center_row, center_col, radius, peak } => {
            format!("cone {center_row},{center_col},{radius},{peak}")
        }
        ElevationModel::Hills(hills) => {
            let parts: Vec<String> = hills
                .iter()
                .map(|h| format!("{},{},{},{}", h.center_row, h.center_col, h.sigma, h.peak))
                .collect();
            format!("hills {}", parts.join("; "))
        }
    }
}

fn parse_amplitude(value: &str) -> Result<AmplitudeLaw> {
    match value.split_once(char::is_whitespace) {
        Some(("rayleigh", s)) => Ok(AmplitudeLaw::Rayleigh { sigma: num("amplitude", s.trim())? }),
        Some(("constant", s)) => Ok(AmplitudeLaw::Constant(num("amplitude", s.trim())?)),
        _ => Err(bad("amplitude", value)),
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(bad(key, value)),
    }
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut seen: HashMap<&str, usize> = HashMap::new();
        let mut cfg = PipelineConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                return Err(Error::Config(format!("line {}: unknown key {key:?}", lineno + 1)));
            };
            if let Some(prev) = seen.insert(known, lineno + 1) {
                return Err(Error::Config(format!(
                    "line {}: key {key:?} already set on line {prev}",
                    lineno + 1
                )));
            }
            cfg.set(known, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "rows" => self.rows = num(key, value)?,
            "cols" => self.cols = num(key, value)?,
            "elevation" => self.fringe.elevation = parse_elevation(value)?,
            "flat_slope_row" => self.fringe.flat_row_slope = num(key, value)?,
            "flat_slope_col" => self.fringe.flat_col_slope = num(key, value)?,
            "amplitude" => self.fringe.amplitude = parse_amplitude(value)?,
            "backscatter_depth" => self.fringe.backscatter_depth = num(key, value)?,
            "alpha" => self.alpha = value.parse().map_err(|_| bad(key, value))?,
            "beta" => self.beta = value.parse().map_err(|_| bad(key, value))?,
            "snr_db" => self.snr_db = num(key, value)?,
            "wavelet" => self.wavelet.family = value.parse::<WaveletFamily>().map_err(|_| bad(key, value))?,
            "wavelet_levels" => self.wavelet.levels = num(key, value)?,
            "lambda" => self.recovery.lambda = num(key, value)?,
            "max_iters" => self.recovery.max_iters = num(key, value)?,
            "step" => self.recovery.step = num(key, value)?,
            "rel_tol" => self.recovery.rel_tol = num(key, value)?,
            "normalize_input" => self.recovery.normalize_input = parse_bool(key, value)?,
            "adaptive_restart" => self.recovery.adaptive_restart = parse_bool(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "reference" => {
                self.reference = match value {
                    "truth" => ReferenceKind::Truth,
                    "conventional" => ReferenceKind::Conventional,
                    _ => return Err(bad(key, value)),
                }
            }
            "coherence_rows" => self.coherence_rows = num(key, value)?,
            "coherence_cols" => self.coherence_cols = num(key, value)?,
            "coherence_levels" => self.coherence_levels = num(key, value)?,
            "coherence_trials" => self.coherence_trials = num(key, value)?,
            "input_dir" => self.input_dir = value.to_string(),
            "output_dir" => self.output_dir = value.to_string(),
            _ => unreachable!("key list and setter disagree on {key}"),
        }
        Ok(())
    }

    /// Cross-field checks that do not need any data.
    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| Error::Config(e.to_string());
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Config("rows and cols must be positive".into()));
        }
        self.alpha.apply(self.rows).map_err(cfg_err)?;
        self.beta.apply(self.cols).map_err(cfg_err)?;
        self.wavelet.validate((self.rows, self.cols)).map_err(cfg_err)?;
        self.recovery.validate(1.0).map_err(cfg_err)?;
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(Error::Config(format!("snr_db = {}", self.snr_db)));
        }
        if self.coherence_trials == 0 {
            return Err(Error::Config("coherence_trials must be positive".into()));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("rows", self.rows.to_string());
        put("cols", self.cols.to_string());
        put("elevation", format_elevation(&self.fringe.elevation));
        put("flat_slope_row", self.fringe.flat_row_slope.to_string());
        put("flat_slope_col", self.fringe.flat_col_slope.to_string());
        put(
            "amplitude",
            match self.fringe.amplitude {
                AmplitudeLaw::Rayleigh { sigma } => format!("rayleigh {sigma}"),
                AmplitudeLaw::Constant(a) => format!("constant {a}"),
            },
        );
        put("backscatter_depth", self.fringe.backscatter_depth.to_string());
        put("alpha", self.alpha.to_string());
        put("beta", self.beta.to_string());
        put("snr_db", self.snr_db.to_string());
        put("wavelet", self.wavelet.family.to_string());
        put("wavelet_levels", self.wavelet.levels.to_string());
        put("lambda", self.recovery.lambda.to_string());
        put("max_iters", self.recovery.max_iters.to_string());
        put("step", self.recovery.step.to_string());
        put("rel_tol", self.recovery.rel_tol.to_string());
        put("normalize_input", self.recovery.normalize_input.to_string());
        put("adaptive_restart", self.recovery.adaptive_restart.to_string());
        put("seed", self.seed.to_string());
        put(
            "reference",
            match self.reference {
                ReferenceKind::Truth => "truth",
                ReferenceKind::Conventional => "conventional",
            }
            .into(),
        );
        put("coherence_rows", self.coherence_rows.to_string());
        put("coherence_cols", self.coherence_cols.to_string());
        put("coherence_levels", self.coherence_levels.to_string());
        put("coherence_trials", self.coherence_trials.to_string());
        put("input_dir", self.input_dir.clone());
        put("output_dir", self.output_dir.clone());
        s
    }
}
