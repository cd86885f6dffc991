//! Noise sweeps over a generator family.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use spaprec_core::analysis::recovery_metrics;
use spaprec_core::model::{
    make_dirichlet_with_pure, make_middle_points_with, make_two_by_three, random_endmembers,
    with_gaussian_noise,
};
use spaprec_core::precond::preconditioned_spa;
use spaprec_core::seed::cell_seed;
use spaprec_core::{DirichletParams, NearSeparableInstance, NoiseScope};

use crate::config::{Algorithm, ExperimentConfig, Family};
use crate::error::{CliError, Result};
use crate::instance_io::read_instance;

pub const REPORT_HEADER: [&str; 8] =
    ["delta", "trial", "algorithm", "fraction_identified", "max_min_error", "mrsa_mean", "wall_ms", "seed"];

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub delta: f64,
    pub trial: usize,
    pub algorithm: Algorithm,
    pub fraction_identified: f64,
    pub max_min_error: f64,
    pub mrsa_mean: f64,
    pub wall_ms: f64,
    pub seed: u64,
    /// The instance or the algorithm returned an error; metrics are NaN.
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    /// Largest grid `delta` at which every trial recovered every endmember, else 0.
    pub robustness: f64,
    pub total_ms: f64,
    pub failed_cells: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub summary: Vec<AlgorithmSummary>,
}

impl ExperimentReport {
    pub fn robustness(&self, algorithm: Algorithm) -> Option<f64> {
        self.summary.iter().find(|s| s.algorithm == algorithm).map(|s| s.robustness)
    }
}

/// Where instances come from; loaded factors are read once per sweep.
pub enum Source {
    Generated,
    Loaded { w: DMatrix<f64>, h: DMatrix<f64>, pure: Vec<usize> },
}

impl Source {
    pub fn for_config(cfg: &ExperimentConfig) -> Result<Self> {
        match (cfg.family, &cfg.path) {
            (Family::CsvInput, Some(p)) => {
                let inst = read_instance(p)?;
                if inst.pure_indices.is_empty() {
                    return Err(CliError::Config("csv_input instance has no pure_indices".into()));
                }
                Ok(Source::Loaded { w: inst.w, h: inst.h, pure: inst.pure_indices })
            }
            (Family::CsvInput, None) => Err(CliError::Config("csv_input needs path".into())),
            _ => Ok(Source::Generated),
        }
    }
}

/// Builds the instance of one sweep cell.
pub fn make_instance(
    cfg: &ExperimentConfig,
    source: &Source,
    delta: f64,
    seed: u64,
) -> spaprec_core::Result<NearSeparableInstance> {
    match (cfg.family, source) {
        (Family::TwoByThree, _) => make_two_by_three(cfg.k, delta),
        (Family::MiddlePoints, _) => {
            let scope = if cfg.noise_all_columns { NoiseScope::AllColumns } else { NoiseScope::MixedOnly };
            make_middle_points_with(cfg.m, cfg.r, delta, seed, scope)
        }
        (Family::Dirichlet, _) => {
            let alpha = cfg.alpha.clone().unwrap_or_else(|| vec![1.0; cfg.r]);
            let params = DirichletParams::new(alpha, delta)?;
            let w = random_endmembers(cfg.m, cfg.r, seed ^ 0x5757_5757_5757_5757);
            make_dirichlet_with_pure(&w, &params, cfg.n, seed)
        }
        (Family::CsvInput, Source::Loaded { w, h, pure }) => with_gaussian_noise(w, h, pure.clone(), delta, seed),
        (Family::CsvInput, Source::Generated) => {
            Err(spaprec_core::Error::InvalidArgument("csv_input needs loaded factors".into()))
        }
    }
}

fn run_cell(cfg: &ExperimentConfig, source: &Source, delta: f64, di: usize, trial: usize) -> Vec<ReportRow> {
    let seed = cell_seed(cfg.base_seed, di as u64, trial as u64);
    let failed_row = |algorithm: Algorithm, wall_ms: f64| ReportRow {
        delta,
        trial,
        algorithm,
        fraction_identified: 0.0,
        max_min_error: f64::NAN,
        mrsa_mean: f64::NAN,
        wall_ms,
        seed,
        failed: true,
    };
    let inst = match make_instance(cfg, source, delta, seed) {
        Ok(i) => i,
        Err(_) => return cfg.algorithms.iter().map(|&a| failed_row(a, 0.0)).collect(),
    };
    let r = inst.r();
    cfg.algorithms
        .iter()
        .map(|&algorithm| {
            let method = algorithm.method(r, cfg);
            let start = Instant::now();
            let result = preconditioned_spa(&inst.x_noisy, r, &method);
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            let wall_ms = if cfg.record_timing { elapsed } else { 0.0 };
            match result {
                Ok(res) => {
                    let m = recovery_metrics(&res.indices, &inst);
                    ReportRow {
                        delta,
                        trial,
                        algorithm,
                        fraction_identified: m.fraction_identified,
                        max_min_error: m.max_min_error,
                        mrsa_mean: m.mrsa_mean,
                        wall_ms,
                        seed,
                        failed: false,
                    }
                }
                Err(_) => failed_row(algorithm, wall_ms),
            }
        })
        .collect()
}

/// Runs every `(delta, trial)` cell on a pool of `jobs` workers (all cores
/// when `None`). Rows come back ordered by delta, trial, then algorithm.
pub fn run_sweep(cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<ExperimentReport> {
    cfg.validate()?;
    let source = Source::for_config(cfg)?;
    let deltas = cfg.deltas();
    let cells: Vec<(usize, usize)> =
        (0..deltas.len()).flat_map(|d| (0..cfg.trials).map(move |t| (d, t))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let rows: Vec<ReportRow> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(di, t)| run_cell(cfg, &source, deltas[di], di, t))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    });
    let summary = summarize(&rows, &cfg.algorithms, &deltas);
    Ok(ExperimentReport { rows, summary })
}

pub fn summarize(rows: &[ReportRow], algorithms: &[Algorithm], deltas: &[f64]) -> Vec<AlgorithmSummary> {
    algorithms
        .iter()
        .map(|&algorithm| {
            let mine: Vec<&ReportRow> = rows.iter().filter(|r| r.algorithm == algorithm).collect();
            let robustness = deltas
                .iter()
                .rev()
                .find(|&&d| {
                    let at: Vec<_> = mine.iter().filter(|r| r.delta == d).collect();
                    !at.is_empty() && at.iter().all(|r| r.fraction_identified == 1.0)
                })
                .copied()
                .unwrap_or(0.0);
            AlgorithmSummary {
                algorithm,
                robustness,
                total_ms: mine.iter().map(|r| r.wall_ms).sum(),
                failed_cells: mine.iter().filter(|r| r.failed).count(),
            }
        })
        .collect()
}

pub fn write_report_csv(path: &Path, rows: &[ReportRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    w.write_record(REPORT_HEADER).map_err(|e| csv_io(path, e))?;
    for r in rows {
        w.write_record([
            r.delta.to_string(),
            r.trial.to_string(),
            r.algorithm.to_string(),
            r.fraction_identified.to_string(),
            r.max_min_error.to_string(),
            r.mrsa_mean.to_string(),
            format!("{:.3}", r.wall_ms),
            r.seed.to_string(),
        ])
        .map_err(|e| csv_io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_summary_csv(path: &Path, summary: &[AlgorithmSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    w.write_record(["algorithm", "robustness", "total_time_s", "failed_cells"]).map_err(|e| csv_io(path, e))?;
    for s in summary {
        w.write_record([
            s.algorithm.to_string(),
            s.robustness.to_string(),
            format!("{:.3}", s.total_ms / 1e3),
            s.failed_cells.to_string(),
        ])
        .map_err(|e| csv_io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn csv_io(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Config(format!("{}: {other:?}", path.display())),
    }
}

/// Writes `report.csv`, `summary.csv` and, if asked, `fraction.svg` into `dir`.
pub fn write_outputs(dir: &Path, report: &ExperimentReport, deltas: &[f64], svg: bool) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write_report_csv(&dir.join("report.csv"), &report.rows)?;
    write_summary_csv(&dir.join("summary.csv"), &report.summary)?;
    if svg {
        let path = dir.join("fraction.svg");
        let mut f = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        f.write_all(render_svg(report, deltas).as_bytes()).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

/// Line chart of the mean fraction identified against delta, one polyline per algorithm.
pub fn render_svg(report: &ExperimentReport, deltas: &[f64]) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let dmax = deltas.last().copied().unwrap_or(1.0).max(1e-12);
    let dmin = deltas.first().copied().unwrap_or(0.0);
    let span = (dmax - dmin).max(1e-12);
    let px = |d: f64| pad + (d - dmin) / span * (w - 2.0 * pad);
    let py = |f: f64| h - pad - f * (h - 2.0 * pad);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <line x1=\"{pad}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <text x=\"{xm}\" y=\"{yl}\" text-anchor=\"middle\" font-size=\"13\">delta</text>\n\
         <text x=\"12\" y=\"{ym}\" font-size=\"13\" transform=\"rotate(-90 12 {ym})\" text-anchor=\"middle\">fraction identified</text>\n\
         <text x=\"{pad}\" y=\"{yt}\" font-size=\"11\" text-anchor=\"middle\">{dmin}</text>\n\
         <text x=\"{x1}\" y=\"{yt}\" font-size=\"11\" text-anchor=\"middle\">{dmax}</text>\n",
        y0 = h - pad,
        x1 = w - pad,
        xm = w / 2.0,
        yl = h - 10.0,
        ym = h / 2.0,
        yt = h - pad + 15.0,
    );
    let algorithms: Vec<Algorithm> = report.summary.iter().map(|s| s.algorithm).collect();
    for (i, alg) in algorithms.iter().enumerate() {
        let points: Vec<String> = deltas
            .iter()
            .map(|&d| {
                let at: Vec<f64> = report
                    .rows
                    .iter()
                    .filter(|r| r.algorithm == *alg && r.delta == d)
                    .map(|r| r.fraction_identified)
                    .collect();
                let mean = if at.is_empty() { 0.0 } else { at.iter().sum::<f64>() / at.len() as f64 };
                format!("{:.2},{:.2}", px(d), py(mean))
            })
            .collect();
        let color = COLORS[i % COLORS.len()];
        s.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n\
             <text x=\"{lx}\" y=\"{ly}\" font-size=\"12\" fill=\"{color}\">{alg}</text>\n",
            points.join(" "),
            lx = w - pad - 90.0,
            ly = pad + 16.0 * (i as f64 + 1.0),
        ));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DeltaGrid;

    fn small(family: Family) -> ExperimentConfig {
        ExperimentConfig {
            family,
            m: 8,
            r: 4,
            n: 30,
            delta_grid: DeltaGrid::List(vec![0.0, 0.05]),
            trials: 2,
            record_timing: false,
            ..Default::default()
        }
    }

    #[test]
    fn rows_are_ordered_and_complete() {
        let cfg = small(Family::MiddlePoints);
        let rep = run_sweep(&cfg, Some(2)).unwrap();
        assert_eq!(rep.rows.len(), 2 * 2 * 4);
        assert_eq!(rep.rows[0].algorithm, Algorithm::Spa);
        assert_eq!(rep.rows[4].trial, 1);
        assert_eq!(rep.rows[8].delta, 0.05);
    }

    #[test]
    fn robustness_is_largest_all_perfect_delta() {
        let row = |delta, f| ReportRow {
            delta,
            trial: 0,
            algorithm: Algorithm::Spa,
            fraction_identified: f,
            max_min_error: 0.0,
            mrsa_mean: 0.0,
            wall_ms: 1.0,
            seed: 0,
            failed: false,
        };
        let rows = vec![row(0.0, 1.0), row(0.1, 0.5), row(0.2, 1.0), row(0.3, 0.5)];
        let s = summarize(&rows, &[Algorithm::Spa], &[0.0, 0.1, 0.2, 0.3]);
        assert_eq!(s[0].robustness, 0.2);
        let s = summarize(&rows[1..2], &[Algorithm::Spa], &[0.1]);
        assert_eq!(s[0].robustness, 0.0);
    }

    #[test]
    fn dirichlet_family_runs() {
        let rep = run_sweep(&small(Family::Dirichlet), Some(1)).unwrap();
        assert!(rep.rows.iter().all(|r| !r.failed));
        assert!(rep.rows.iter().filter(|r| r.delta == 0.0).all(|r| r.fraction_identified == 1.0));
    }

    #[test]
    fn svg_has_one_polyline_per_algorithm() {
        let cfg = small(Family::MiddlePoints);
        let rep = run_sweep(&cfg, Some(1)).unwrap();
        let svg = render_svg(&rep, &cfg.deltas());
        assert_eq!(svg.matches("<polyline").count(), 4);
    }
}
