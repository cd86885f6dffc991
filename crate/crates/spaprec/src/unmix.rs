//! Endmember extraction from a user-supplied matrix.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use spaprec_core::analysis::match_endmembers;
use spaprec_core::linalg::select_columns;
use spaprec_core::precond::{preconditioned_spa, Method};

use crate::error::{CliError, Result};
use crate::matrix_io::write_matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct MrsaRow {
    /// Column of the ground-truth matrix.
    pub endmember: usize,
    /// Extracted data column matched to it.
    pub column: Option<usize>,
    pub mrsa: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unmixing {
    pub indices: Vec<usize>,
    pub endmembers: DMatrix<f64>,
    pub mrsa: Option<Vec<MrsaRow>>,
}

pub fn unmix(x: &DMatrix<f64>, r: usize, method: &Method, truth: Option<&DMatrix<f64>>) -> Result<Unmixing> {
    if r == 0 || r > x.nrows().min(x.ncols()) {
        return Err(CliError::Config(format!("r = {r} must lie in 1..={}", x.nrows().min(x.ncols()))));
    }
    let res = preconditioned_spa(x, r, method)?;
    let endmembers = select_columns(x, &res.indices);
    let mrsa = match truth {
        None => None,
        Some(w) => {
            if w.nrows() != x.nrows() {
                return Err(CliError::Config("ground truth must have as many rows as the data".into()));
            }
            let (matching, scores) = match_endmembers(w, &endmembers);
            Some(
                matching
                    .iter()
                    .zip(scores)
                    .enumerate()
                    .map(|(k, (m, s))| MrsaRow { endmember: k, column: m.map(|j| res.indices[j]), mrsa: s })
                    .collect(),
            )
        }
    };
    Ok(Unmixing { indices: res.indices, endmembers, mrsa })
}

pub fn format_mrsa_table(rows: &[MrsaRow]) -> String {
    let mut s = String::from("endmember  column      MRSA\n");
    for r in rows {
        let col = r.column.map_or("-".to_string(), |c| c.to_string());
        s.push_str(&format!("{:>9}  {:>6}  {:>8.2}\n", r.endmember, col, r.mrsa));
    }
    let mean = rows.iter().map(|r| r.mrsa).sum::<f64>() / rows.len().max(1) as f64;
    s.push_str(&format!("{:>9}  {:>6}  {:>8.2}\n", "mean", "", mean));
    s
}

/// Writes `indices.csv`, `endmembers.csv` and, with ground truth, `mrsa.csv`.
pub fn write_unmixing(dir: &Path, u: &Unmixing) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join("indices.csv");
    let text: String = u.indices.iter().map(|i| format!("{i}\n")).collect();
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    write_matrix(&dir.join("endmembers.csv"), &u.endmembers)?;
    if let Some(rows) = &u.mrsa {
        let path = dir.join("mrsa.csv");
        let mut f = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut text = String::from("endmember,column,mrsa\n");
        for r in rows {
            let col = r.column.map_or(String::new(), |c| c.to_string());
            text.push_str(&format!("{},{},{}\n", r.endmember, col, r.mrsa));
        }
        f.write_all(text.as_bytes()).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}
