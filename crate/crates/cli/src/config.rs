//! Configuration parsing and validation.
//!
//! The configuration is a single JSON document. Only `params` is required;
//! everything else takes the documented default:
//!
//! ```json
//! {
//!   "params": { "r": 2.0, "s": 1.0, "mu": 1.0, "theta": 0.3926990816987241, "hbar": 1.0 },
//!   "times": [0.0, 0.7876, 0.9894, 1.5521],
//!   "shots_per_axis": 10000,
//!   "mc_resamples": 500,
//!   "seed": 42,
//!   "output_dir": "out"
//! }
//! ```
//!
//! `times` may instead be a grid `{ "t_start": 0.0, "t_end": 1.5521,
//! "steps": 200 }` of uniformly spaced points (endpoints included).

use std::path::PathBuf;

use serde_json::{Map, Value};
use thiserror::Error;

use ptsim_core::model::{PTParams, TimePoint};

pub const DEFAULT_SHOTS_PER_AXIS: u64 = 10_000;
pub const DEFAULT_MC_RESAMPLES: usize = 500;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_OUTPUT_DIR: &str = "out";
/// The four evolution times of the reference experiment; the default `times`.
pub const REFERENCE_TIMES: [f64; 4] = [0.0, 0.7876, 0.9894, 1.5521];
/// Number of grid points used when a sweep must invent its own grid.
pub const DEFAULT_SWEEP_STEPS: usize = 200;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("configuration is not well-formed JSON: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("missing required field `{0}`")]
    MissingField(String),
    #[error("invalid value for `{path}`: {reason}")]
    InvalidValue { path: String, reason: String },
}

fn invalid(path: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        path: path.to_string(),
        reason: reason.into(),
    }
}

/// Evolution times, either explicit or as a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub enum TimesSpec {
    List(Vec<f64>),
    Grid {
        t_start: f64,
        t_end: f64,
        steps: usize,
    },
}

impl TimesSpec {
    /// The time points this spec denotes. A grid with `steps` points spans
    /// [t_start, t_end] inclusive.
    pub fn expand(&self) -> Vec<TimePoint> {
        match self {
            TimesSpec::List(ts) => ts.iter().map(|&t| TimePoint(t)).collect(),
            TimesSpec::Grid {
                t_start,
                t_end,
                steps,
            } => {
                if *steps == 1 {
                    return vec![TimePoint(*t_start)];
                }
                (0..*steps)
                    .map(|k| {
                        let frac = k as f64 / (*steps - 1) as f64;
                        TimePoint(t_start + frac * (t_end - t_start))
                    })
                    .collect()
            }
        }
    }

    /// The grid a sweep runs over: the grid itself when given, otherwise
    /// [`DEFAULT_SWEEP_STEPS`] uniform points from 0 to the largest listed
    /// time.
    pub fn sweep_grid(&self) -> Vec<TimePoint> {
        match self {
            TimesSpec::Grid { .. } => self.expand(),
            TimesSpec::List(ts) => {
                let t_end = ts.iter().cloned().fold(0.0, f64::max);
                TimesSpec::Grid {
                    t_start: 0.0,
                    t_end,
                    steps: DEFAULT_SWEEP_STEPS,
                }
                .expand()
            }
        }
    }
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: PTParams,
    pub times: TimesSpec,
    pub shots_per_axis: u64,
    pub mc_resamples: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
}

fn require_f64(obj: &Map<String, Value>, path: &str, key: &str) -> Result<f64, ConfigError> {
    let full = format!("{path}.{key}");
    match obj.get(key) {
        None => Err(ConfigError::MissingField(full)),
        Some(v) => {
            let x = v
                .as_f64()
                .ok_or_else(|| invalid(&full, "expected a number"))?;
            if !x.is_finite() {
                return Err(invalid(&full, "must be finite"));
            }
            Ok(x)
        }
    }
}

fn optional_u64(obj: &Map<String, Value>, key: &str, default: u64) -> Result<u64, ConfigError> {
    match obj.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_u64()
            .ok_or_else(|| invalid(key, "expected a non-negative integer")),
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let root: Value = serde_json::from_str(text)?;
    let root = root
        .as_object()
        .ok_or_else(|| invalid("(root)", "expected a JSON object"))?;

    let params_value = root
        .get("params")
        .ok_or_else(|| ConfigError::MissingField("params".into()))?;
    let params_obj = params_value
        .as_object()
        .ok_or_else(|| invalid("params", "expected an object"))?;

    let r = require_f64(params_obj, "params", "r")?;
    let s = require_f64(params_obj, "params", "s")?;
    let mu = require_f64(params_obj, "params", "mu")?;
    let theta = require_f64(params_obj, "params", "theta")?;
    let hbar = match params_obj.get("hbar") {
        None => 1.0,
        Some(_) => {
            let h = require_f64(params_obj, "params", "hbar")?;
            if h <= 0.0 {
                return Err(invalid("params.hbar", "must be positive"));
            }
            h
        }
    };
    let params = PTParams {
        r,
        s,
        mu,
        theta,
        hbar,
    };

    let times = match root.get("times") {
        None => TimesSpec::List(REFERENCE_TIMES.to_vec()),
        Some(Value::Array(items)) => {
            if items.is_empty() {
                return Err(invalid("times", "must contain at least one time"));
            }
            let mut ts = Vec::with_capacity(items.len());
            for (k, item) in items.iter().enumerate() {
                let t = item
                    .as_f64()
                    .ok_or_else(|| invalid(&format!("times[{k}]"), "expected a number"))?;
                if !t.is_finite() {
                    return Err(invalid(&format!("times[{k}]"), "must be finite"));
                }
                ts.push(t);
            }
            TimesSpec::List(ts)
        }
        Some(Value::Object(grid)) => {
            let t_start = require_f64(grid, "times", "t_start")?;
            let t_end = require_f64(grid, "times", "t_end")?;
            let steps = match grid.get("steps") {
                None => return Err(ConfigError::MissingField("times.steps".into())),
                Some(v) => v
                    .as_u64()
                    .ok_or_else(|| invalid("times.steps", "expected a non-negative integer"))?,
            };
            if steps < 1 {
                return Err(invalid("times.steps", "must be at least 1"));
            }
            TimesSpec::Grid {
                t_start,
                t_end,
                steps: steps as usize,
            }
        }
        Some(_) => return Err(invalid("times", "expected an array or a grid object")),
    };

    let shots_per_axis = optional_u64(root, "shots_per_axis", DEFAULT_SHOTS_PER_AXIS)?;
    if shots_per_axis < 1 {
        return Err(invalid("shots_per_axis", "must be at least 1"));
    }
    let mc_resamples = optional_u64(root, "mc_resamples", DEFAULT_MC_RESAMPLES as u64)? as usize;
    if mc_resamples < 2 {
        return Err(invalid("mc_resamples", "must be at least 2"));
    }
    let seed = optional_u64(root, "seed", DEFAULT_SEED)?;

    let output_dir = match root.get("output_dir") {
        None => PathBuf::from(DEFAULT_OUTPUT_DIR),
        Some(v) => PathBuf::from(
            v.as_str()
                .ok_or_else(|| invalid("output_dir", "expected a string"))?,
        ),
    };

    Ok(RunConfig {
        params,
        times,
        shots_per_axis,
        mc_resamples,
        seed,
        output_dir,
    })
}
