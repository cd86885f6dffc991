//! JSON experiment configuration.
//!
//! Every field is optional; the defaults reproduce the middle-points
//! protocol (`m = 40`, `r = 20`, `delta` from 0 to 0.6 in steps of 0.01,
//! 25 trials, all four algorithms, `alpha_target = 0.99`).

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use spaprec_core::mvee::MveeOptions;
use spaprec_core::precond::{Method, SdpOptions};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    TwoByThree,
    MiddlePoints,
    Dirichlet,
    /// Factors read from an instance directory, Gaussian noise of level `delta`.
    CsvInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Algorithm {
    Spa,
    SdpSpa,
    PwSpa,
    /// `p = None` means `p = r`.
    SpaSpa { p: Option<usize> },
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::Spa, Algorithm::SdpSpa, Algorithm::PwSpa, Algorithm::SpaSpa { p: None }];

    pub fn method(&self, r: usize, cfg: &ExperimentConfig) -> Method {
        match *self {
            Algorithm::Spa => Method::Identity,
            Algorithm::SdpSpa => Method::Sdp(SdpOptions {
                mvee: MveeOptions::with_alpha(cfg.alpha_target),
                active_set: cfg.active_set,
            }),
            Algorithm::PwSpa => Method::PreWhiten,
            Algorithm::SpaSpa { p } => Method::SpaBased { p: p.unwrap_or(r), depth: cfg.spa_depth },
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Spa => f.write_str("SPA"),
            Algorithm::SdpSpa => f.write_str("SDP-SPA"),
            Algorithm::PwSpa => f.write_str("PW-SPA"),
            Algorithm::SpaSpa { p: None } => f.write_str("SPA-SPA"),
            Algorithm::SpaSpa { p: Some(p) } => write!(f, "SPA-SPA({p})"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SPA" => Ok(Algorithm::Spa),
            "SDP-SPA" | "SDP" => Ok(Algorithm::SdpSpa),
            "PW-SPA" | "PW" => Ok(Algorithm::PwSpa),
            "SPA-SPA" => Ok(Algorithm::SpaSpa { p: None }),
            other => other
                .strip_prefix("SPA-SPA(")
                .and_then(|t| t.strip_suffix(')'))
                .and_then(|t| t.trim().parse().ok())
                .map(|p| Algorithm::SpaSpa { p: Some(p) })
                .ok_or_else(|| format!("unknown algorithm {s:?}")),
        }
    }
}

impl TryFrom<String> for Algorithm {
    type Error = String;
    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl From<Algorithm> for String {
    fn from(a: Algorithm) -> String {
        a.to_string()
    }
}

/// Either an explicit list or an evenly spaced range (endpoints included).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl DeltaGrid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            DeltaGrid::List(ref v) => v.clone(),
            DeltaGrid::Range { start, stop, step } => {
                if step.is_nan() || step <= 0.0 || start.is_nan() || stop.is_nan() || stop < start {
                    return Vec::new();
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize;
                // rounding keeps 0.07 as 0.07 rather than 0.07000000000000001
                (0..=count).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect()
            }
        }
    }
}

impl Default for DeltaGrid {
    fn default() -> Self {
        DeltaGrid::Range { start: 0.0, stop: 0.6, step: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Family,
    /// Scale of the two-by-three instance.
    pub k: f64,
    pub m: usize,
    pub r: usize,
    /// Number of Dirichlet columns besides the `r` pure ones.
    pub n: usize,
    /// Dirichlet concentrations; all ones when absent.
    pub alpha: Option<Vec<f64>>,
    /// Instance directory for `csv_input`.
    pub path: Option<PathBuf>,
    pub delta_grid: DeltaGrid,
    pub trials: usize,
    pub algorithms: Vec<Algorithm>,
    pub base_seed: u64,
    pub alpha_target: f64,
    /// Solve the ellipsoid problem with the active-set outer loop.
    pub active_set: bool,
    /// Recursion depth of the SPA-based preconditioner.
    pub spa_depth: usize,
    /// Middle-points noise on the mixed columns only, or on all columns.
    pub noise_all_columns: bool,
    /// When false, `wall_ms` is written as 0 so reports are byte-identical.
    pub record_timing: bool,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            family: Family::MiddlePoints,
            k: 10.0,
            m: 40,
            r: 20,
            n: 1000,
            alpha: None,
            path: None,
            delta_grid: DeltaGrid::default(),
            trials: 25,
            algorithms: Algorithm::ALL.to_vec(),
            base_seed: 1,
            alpha_target: 0.99,
            active_set: true,
            spa_depth: 1,
            noise_all_columns: false,
            record_timing: true,
            output_dir: PathBuf::from("spaprec-out"),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let cfg: Self =
            serde_json::from_str(&text).map_err(|e| CliError::Json { path: path.to_path_buf(), source: e })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.delta_grid.values()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(CliError::Config(msg.to_string()));
        let d = self.deltas();
        if d.is_empty() {
            return bad("delta_grid is empty");
        }
        if d.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad("delta_grid values must be finite and nonnegative");
        }
        if d.windows(2).any(|w| w[0] >= w[1]) {
            return bad("delta_grid must be strictly ascending");
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms selected");
        }
        if !(self.alpha_target > 0.0 && self.alpha_target <= 1.0) {
            return bad("alpha_target must lie in (0, 1]");
        }
        if self.spa_depth == 0 {
            return bad("spa_depth must be at least 1");
        }
        match self.family {
            Family::TwoByThree => {
                if self.k.is_nan() || self.k <= 0.0 {
                    return bad("k must be positive");
                }
                if d.iter().any(|&v| v >= 1.0) {
                    return bad("two_by_three needs delta < 1");
                }
            }
            Family::MiddlePoints => {
                if self.r < 2 || self.m < self.r {
                    return bad("middle_points needs 2 <= r <= m");
                }
            }
            Family::Dirichlet => {
                if self.r < 1 || self.m < self.r {
                    return bad("dirichlet needs 1 <= r <= m");
                }
                if let Some(a) = &self.alpha {
                    if a.len() != self.r {
                        return bad("alpha needs r entries");
                    }
                }
            }
            Family::CsvInput => {
                if self.path.is_none() {
                    return bad("csv_input needs path");
                }
            }
        }
        for a in &self.algorithms {
            if let Algorithm::SpaSpa { p: Some(p) } = a {
                if *p == 0 {
                    return bad("SPA-SPA(p) needs p >= 1");
                }
            }
        }
        Ok(())
    }
}
