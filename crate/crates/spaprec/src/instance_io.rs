//! Instance directories: `W.csv`, `H.csv`, `N.csv`, `X.csv` and `meta.json`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use spaprec_core::model::{GeneratorInfo, DIRICHLET_ID, GAUSSIAN_ID, RNG_ID};
use spaprec_core::{NearSeparableInstance, NoiseScope};

use crate::error::{CliError, Result};
use crate::matrix_io::{read_matrix, write_matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub family: String,
    pub seed: u64,
    /// `delta` or `sigma_N`, depending on the family.
    pub noise_level: f64,
    pub noise_scope: String,
    /// 0-based.
    pub pure_indices: Vec<usize>,
    pub epsilon: f64,
    pub m: usize,
    pub r: usize,
    pub n: usize,
    pub rng: String,
    pub gaussian: String,
    pub dirichlet: String,
}

impl InstanceMeta {
    pub fn of(inst: &NearSeparableInstance) -> Self {
        Self {
            family: inst.info.family.to_string(),
            seed: inst.seed,
            noise_level: inst.info.noise_level,
            noise_scope: scope_name(inst.info.noise_scope).to_string(),
            pure_indices: inst.pure_indices.clone(),
            epsilon: inst.epsilon,
            m: inst.m(),
            r: inst.r(),
            n: inst.n(),
            rng: RNG_ID.to_string(),
            gaussian: GAUSSIAN_ID.to_string(),
            dirichlet: DIRICHLET_ID.to_string(),
        }
    }
}

fn scope_name(s: NoiseScope) -> &'static str {
    match s {
        NoiseScope::MixedOnly => "mixed_only",
        NoiseScope::AllColumns => "all_columns",
    }
}

fn family_name(s: &str) -> &'static str {
    match s {
        "two_by_three" => "two_by_three",
        "middle_points" => "middle_points",
        "dirichlet" => "dirichlet",
        "single_endmember" => "single_endmember",
        "random_separable" => "random_separable",
        _ => "csv_input",
    }
}

pub fn write_instance(dir: &Path, inst: &NearSeparableInstance) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write_matrix(&dir.join("W.csv"), &inst.w)?;
    write_matrix(&dir.join("H.csv"), &inst.h)?;
    write_matrix(&dir.join("N.csv"), &inst.noise)?;
    write_matrix(&dir.join("X.csv"), &inst.x_noisy)?;
    let meta = dir.join("meta.json");
    let text = serde_json::to_string_pretty(&InstanceMeta::of(inst))
        .map_err(|e| CliError::Json { path: meta.clone(), source: e })?;
    fs::write(&meta, text + "\n").map_err(|e| CliError::io(&meta, e))
}

pub fn read_meta(dir: &Path) -> Result<InstanceMeta> {
    let path = dir.join("meta.json");
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Json { path, source: e })
}

/// Reads an instance back; `X` is recomputed from the factors and checked
/// against `X.csv` when that file exists.
pub fn read_instance(dir: &Path) -> Result<NearSeparableInstance> {
    let meta = read_meta(dir)?;
    let w = read_matrix(&dir.join("W.csv"))?;
    let h = read_matrix(&dir.join("H.csv"))?;
    let n_path = dir.join("N.csv");
    let noise = if n_path.exists() {
        read_matrix(&n_path)?
    } else {
        nalgebra::DMatrix::zeros(w.nrows(), h.ncols())
    };
    let info = GeneratorInfo {
        family: family_name(&meta.family),
        noise_level: meta.noise_level,
        noise_scope: if meta.noise_scope == "mixed_only" {
            NoiseScope::MixedOnly
        } else {
            NoiseScope::AllColumns
        },
        has_pure_pixels: !meta.pure_indices.is_empty(),
    };
    let inst = NearSeparableInstance::from_parts(w, h, noise, meta.pure_indices, meta.seed, info)?;
    let x_path = dir.join("X.csv");
    if x_path.exists() {
        let x = read_matrix(&x_path)?;
        let scale = inst.x_noisy.amax().max(1.0);
        if x.shape() != inst.x_noisy.shape() || (&x - &inst.x_noisy).amax() > 1e-12 * scale {
            return Err(CliError::Config(format!("{} disagrees with W H + N", x_path.display())));
        }
    }
    Ok(inst)
}
