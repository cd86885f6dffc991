use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spaprec::bounds_suite::{run_bounds_suite, violations, write_bounds_csv};
use spaprec::instance_io::write_instance;
use spaprec::matrix_io::read_matrix;
use spaprec::sweep::{make_instance, run_sweep, write_outputs, Source};
use spaprec::unmix::{format_mrsa_table, unmix, write_unmixing};
use spaprec::{Algorithm, CliError, ExperimentConfig};
use spaprec_core::seed::cell_seed;

#[derive(Parser)]
#[command(name = "spaprec", version, about = "Preconditioned successive projection for near-separable NMF")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration; defaults apply to missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir` of the config).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write one instance of the configured family to a directory.
    Gen {
        #[command(flatten)]
        common: Common,
        /// Noise level; defaults to the first grid value.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0)]
        trial: usize,
    },
    /// Run a noise sweep and write report.csv and summary.csv.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Worker threads (all cores by default).
        #[arg(long)]
        jobs: Option<usize>,
        /// Also write fraction.svg.
        #[arg(long)]
        svg: bool,
    },
    /// Evaluate the bound suite; exits with 2 on any violation.
    Bounds {
        #[command(flatten)]
        common: Common,
    },
    /// Extract endmembers from a CSV matrix.
    Unmix {
        /// m x n data matrix, one row per line.
        file: PathBuf,
        #[arg(short, long)]
        r: usize,
        #[arg(long, default_value = "SDP-SPA")]
        algorithm: Algorithm,
        /// Ground-truth endmembers (m x r) for an MRSA table.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn run(cmd: Command) -> Result<ExitCode, CliError> {
    match cmd {
        Command::Gen { common, delta, trial } => {
            let cfg = load(&common)?;
            let deltas = cfg.deltas();
            let delta = delta.unwrap_or(deltas[0]);
            let di = deltas.iter().position(|&d| d == delta).unwrap_or(0);
            let seed = cell_seed(cfg.base_seed, di as u64, trial as u64);
            let inst = make_instance(&cfg, &Source::for_config(&cfg)?, delta, seed)?;
            write_instance(&cfg.output_dir, &inst)?;
            println!("wrote {} ({}x{}, r = {})", cfg.output_dir.display(), inst.m(), inst.n(), inst.r());
        }
        Command::Sweep { common, jobs, svg } => {
            let cfg = load(&common)?;
            let report = run_sweep(&cfg, jobs)?;
            write_outputs(&cfg.output_dir, &report, &cfg.deltas(), svg)?;
            println!("{:<14} {:>10} {:>12}", "algorithm", "robustness", "time (s)");
            for s in &report.summary {
                println!("{:<14} {:>10} {:>12.3}", s.algorithm.to_string(), s.robustness, s.total_ms / 1e3);
            }
        }
        Command::Bounds { common } => {
            let cfg = load(&common)?;
            let rows = run_bounds_suite(&cfg)?;
            std::fs::create_dir_all(&cfg.output_dir).map_err(|e| CliError::io(&cfg.output_dir, e))?;
            write_bounds_csv(&cfg.output_dir.join("bounds.csv"), &rows)?;
            let bad = violations(&rows);
            let checked = rows.iter().filter(|r| r.report.passed().is_some()).count();
            println!("{checked} assertion-grade rows checked, {bad} violated");
            if bad > 0 {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Unmix { file, r, algorithm, truth, common } => {
            let cfg = load(&common)?;
            let x = read_matrix(&file)?;
            let truth = truth.map(|p| read_matrix(&p)).transpose()?;
            let u = unmix(&x, r, &algorithm.method(r, &cfg), truth.as_ref())?;
            write_unmixing(&cfg.output_dir, &u)?;
            let idx: Vec<String> = u.indices.iter().map(|i| i.to_string()).collect();
            println!("indices: {}", idx.join(","));
            if let Some(rows) = &u.mrsa {
                print!("{}", format_mrsa_table(rows));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
