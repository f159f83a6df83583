// SPDX-License-Identifier: Apache-2.0

//! Command-line runner. Exit codes: 0 success, 1 verification failure,
//! 2 config error, 3 numerical error, 4 i/o error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use entropic::linalg::CMatrix;
use entropic::models::{canonical_model, ReservoirModel};
use entropic::runner::table::RunMetadata;
use entropic::runner::{
    parse_config, run_classical, run_fcs, run_functionals, run_verify, BuiltSystem, ExperimentConfig, ResultTable,
    RunError, EXIT_IO,
};

#[derive(Parser)]
#[command(name = "entropic", version, about = "Entropic fluctuation functionals for finite systems")]
struct Cli {
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every random system.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance override, e.g. `--tol symmetry=1e-9`. Repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE", global = true)]
    tolerances: Vec<String>,
    /// Record wall time in the JSON metadata (outputs are then no longer
    /// byte-identical between runs).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Sweep e_{p,t}(α) over the configured grid.
    Functionals,
    /// Full counting statistics and the modular spectral measure.
    Fcs,
    /// Classical curves and Evans-Searles distributions.
    Classical,
    /// Run the invariant battery; exit 1 on any failure.
    Verify,
    /// Print the assembled two-reservoir system as JSON.
    Model,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Functionals => "functionals",
            Command::Fcs => "fcs",
            Command::Classical => "classical",
            Command::Verify => "verify",
            Command::Model => "model",
        }
    }
}

fn load(cli: &Cli) -> Result<(Option<ExperimentConfig>, String), RunError> {
    let (mut cfg, text) = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
                path: path.display().to_string(),
                source,
            })?;
            (Some(parse_config(&text)?), text)
        }
        None => (None, String::new()),
    };
    if !cli.tolerances.is_empty() || cli.seed.is_some() {
        let c = cfg.get_or_insert_with(|| parse_config("").expect("empty config is valid"));
        for item in &cli.tolerances {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| RunError::validation("--tol", format!("expected NAME=VALUE, got \"{item}\"")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| RunError::validation(format!("--tol {name}"), "not a number"))?;
            c.tolerances.set(name.trim(), value)?;
        }
        if let Some(seed) = cli.seed {
            c.override_seeds(seed);
        }
    }
    Ok((cfg, text))
}

fn out_dir(cli: &Cli, cfg: &ExperimentConfig) -> Option<PathBuf> {
    cli.out.clone().or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
}

fn emit(cli: &Cli, cfg: &ExperimentConfig, table: &ResultTable, meta: &RunMetadata) -> Result<(), RunError> {
    match out_dir(cli, cfg) {
        Some(dir) => {
            for f in table.write(&dir, cli.command.name(), &cfg.formats, meta)? {
                println!("wrote {}", dir.join(f).display());
            }
        }
        None => print!("{}", table.curves_csv()),
    }
    Ok(())
}

fn complex_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

#[derive(Serialize)]
struct ModelDocument {
    id: String,
    dims: (usize, usize),
    beta_left: f64,
    beta_right: f64,
    z_left: f64,
    z_right: f64,
    tri: bool,
    h_left: Vec<Vec<[f64; 2]>>,
    h_right: Vec<Vec<[f64; 2]>>,
    coupling: Vec<Vec<[f64; 2]>>,
    hamiltonian: Vec<Vec<[f64; 2]>>,
    reference_state: Vec<Vec<[f64; 2]>>,
}

fn model_document(id: &str, m: &ReservoirModel) -> ModelDocument {
    ModelDocument {
        id: id.to_string(),
        dims: m.dims(),
        beta_left: m.beta_left,
        beta_right: m.beta_right,
        z_left: m.z_left,
        z_right: m.z_right,
        tri: m.system.is_tri(),
        h_left: complex_rows(m.h_left.matrix()),
        h_right: complex_rows(m.h_right.matrix()),
        coupling: complex_rows(m.coupling.matrix()),
        hamiltonian: complex_rows(m.system.hamiltonian().matrix()),
        reference_state: complex_rows(m.system.reference_state().matrix()),
    }
}

fn run(cli: &Cli) -> Result<i32, RunError> {
    let start = Instant::now();
    let (cfg, text) = load(cli)?;
    let mut meta = RunMetadata::new(cli.command.name(), &text, cli.seed);
    let default_cfg;
    let cfg_ref = match &cfg {
        Some(c) => c,
        None => {
            default_cfg = parse_config("").expect("empty config is valid");
            &default_cfg
        }
    };
    let table = match cli.command {
        Command::Functionals => run_functionals(cfg_ref)?,
        Command::Fcs => run_fcs(cfg_ref)?,
        Command::Classical => run_classical(cfg_ref)?,
        Command::Verify => {
            let report = run_verify(cfg.as_ref(), cli.seed)?;
            print!("{}", report.render());
            if cli.timing {
                println!("elapsed {:.2} s", start.elapsed().as_secs_f64());
            }
            if let Some(dir) = out_dir(cli, cfg_ref) {
                if cli.timing {
                    meta.wall_time_seconds = Some(start.elapsed().as_secs_f64());
                }
                report.table.write(&dir, "verify", &cfg_ref.formats, &meta)?;
            }
            for row in report.table.failures() {
                log::error!(
                    "{} failed on {}: value {:e} vs tolerance {:e}",
                    row.check,
                    row.system_id,
                    row.value,
                    row.tolerance
                );
            }
            return Ok(report.exit_code());
        }
        Command::Model => {
            let built = cfg_ref.build_systems()?;
            let doc = built
                .iter()
                .find_map(|s| match s {
                    BuiltSystem::Quantum {
                        id, model: Some(m), ..
                    } => Some(model_document(id, m)),
                    _ => None,
                })
                .unwrap_or_else(|| model_document("canonical", &canonical_model()));
            let json = serde_json::to_string_pretty(&doc).expect("model serializes");
            println!("{json}");
            if let Some(dir) = out_dir(cli, cfg_ref) {
                let path = dir.join("model.json");
                std::fs::create_dir_all(&dir)
                    .and_then(|_| std::fs::write(&path, format!("{json}\n")))
                    .map_err(|source| RunError::Io {
                        path: path.display().to_string(),
                        source,
                    })?;
            }
            return Ok(0);
        }
    };
    if cli.timing {
        meta.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    emit(cli, cfg_ref, &table, &meta)?;
    let failures = table.failures().count();
    if failures > 0 {
        log::warn!("{failures} check rows failed; see the checks table");
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            debug_assert!(code != 0 && code <= EXIT_IO);
            ExitCode::from(code as u8)
        }
    }
}
