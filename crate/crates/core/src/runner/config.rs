// SPDX-License-Identifier: Apache-2.0

//! TOML experiment configuration.
//!
//! Complex matrices are nested arrays of `[re, im]` pairs, row-major.
//! `p = "inf"` selects the `p = ∞` functional.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Deserialize;

use super::RunError;
use crate::classical::ClassicalSystem;
use crate::functionals::{default_alpha_grid, PIndex};
use crate::linalg::{CMatrix, HermitianOperator};
use crate::models::{build_two_reservoir, canonical_model_with, random_classical_system, random_system, ReservoirModel};
use crate::quantum::{DensityMatrix, QuantumSystem};

pub type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    /// Explicit `H` and `ω₀`.
    Quantum {
        id: String,
        hamiltonian: ComplexRows,
        reference_state: ComplexRows,
        /// Detected from realness when absent.
        tri: Option<bool>,
    },
    /// Two-reservoir model; omitted matrices default to the two-qubit model
    /// `H_{l/r} = diag(0, 1)`, `V = coupling · σ_x ⊗ σ_x`.
    Reservoir {
        id: String,
        beta_left: f64,
        beta_right: f64,
        #[serde(default = "default_coupling")]
        coupling: f64,
        h_left: Option<ComplexRows>,
        h_right: Option<ComplexRows>,
        coupling_matrix: Option<ComplexRows>,
    },
    Random {
        id: String,
        dim: usize,
        tri: bool,
        seed: u64,
        #[serde(default = "default_spread")]
        spread: f64,
    },
    Classical {
        id: String,
        reference_state: Vec<f64>,
    },
    RandomClassical {
        id: String,
        size: usize,
        tri: bool,
        seed: u64,
        #[serde(default = "default_spread")]
        spread: f64,
    },
}

fn default_coupling() -> f64 {
    crate::models::CANONICAL_COUPLING
}

fn default_spread() -> f64 {
    1.0
}

impl SystemSpec {
    pub fn id(&self) -> &str {
        match self {
            SystemSpec::Quantum { id, .. }
            | SystemSpec::Reservoir { id, .. }
            | SystemSpec::Random { id, .. }
            | SystemSpec::Classical { id, .. }
            | SystemSpec::RandomClassical { id, .. } => id,
        }
    }

    pub fn override_seed(&mut self, new_seed: u64) {
        match self {
            SystemSpec::Random { seed, .. } | SystemSpec::RandomClassical { seed, .. } => *seed = new_seed,
            _ => {}
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Range { min: f64, max: f64, step: f64 },
    List(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PSpec {
    Number(f64),
    Sentinel(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    alpha: Option<AlphaSpec>,
    p: Option<Vec<PSpec>>,
    t: Option<Vec<f64>>,
    steps: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
    formats: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    systems: Vec<SystemSpec>,
    sweep: Option<RawSweep>,
    output: Option<RawOutput>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Validated sweep grids.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub alphas: Vec<f64>,
    /// Sorted ascending, `∞` last.
    pub ps: Vec<PIndex>,
    pub times: Vec<f64>,
    /// Integer times for classical systems.
    pub steps: Vec<i64>,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            alphas: default_alpha_grid(),
            ps: vec![PIndex::Finite(2.0), PIndex::Infinite],
            times: vec![1.0],
            steps: vec![1, 2, 3],
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub systems: Vec<SystemSpec>,
    pub sweep: Sweep,
    pub output_dir: Option<String>,
    pub formats: Vec<OutputFormat>,
    pub tolerances: Tolerances,
}

/// Thresholds for every named check.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<&'static str, f64>);

pub const TOLERANCE_DEFAULTS: &[(&str, f64)] = &[
    ("symmetry", 1e-10),
    ("kawasaki", 1e-10),
    ("naive_kawasaki_violation", 1e-8),
    ("bridge", 1e-10),
    ("classical_bridge", 1e-12),
    ("variational_excess", 1e-9),
    ("transfer", 1e-10),
    ("fcs_modular", 1e-10),
    ("cgf", 1e-10),
    ("fluctuation_relation", 1e-10),
    ("second_law", 1e-12),
    ("second_law_identity", 1e-10),
    ("derivative", 1e-6),
    ("monotonicity", 1e-10),
    ("convexity", 1e-9),
    ("p_limit", 1e-3),
    ("quadrature", 1e-8),
    ("flux_balance", 1e-8),
    ("decomposition", 1e-10),
    ("spectrum", 1e-10),
    ("projection", 1e-10),
    ("mean_ep", 1e-12),
    ("heat_flow", 1e-10),
    ("collapse", 1e-12),
    ("weight_floor", 1e-14),
    ("assembly", 1e-12),
    ("closed_form", 1e-12),
];

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(TOLERANCE_DEFAULTS.iter().copied().collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        *self.0.get(name).unwrap_or_else(|| panic!("unknown tolerance `{name}`"))
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), RunError> {
        let key = TOLERANCE_DEFAULTS
            .iter()
            .map(|(k, _)| *k)
            .find(|k| *k == name)
            .ok_or_else(|| RunError::validation(format!("tolerances.{name}"), "unknown tolerance name"))?;
        if !(value > 0.0) || !value.is_finite() {
            return Err(RunError::validation(format!("tolerances.{name}"), "must be a positive number"));
        }
        self.0.insert(key, value);
        Ok(())
    }
}

fn alpha_values(spec: &AlphaSpec) -> Result<Vec<f64>, RunError> {
    match spec {
        AlphaSpec::List(v) => {
            if v.iter().any(|a| !a.is_finite()) {
                return Err(RunError::validation("sweep.alpha", "values must be finite"));
            }
            Ok(v.clone())
        }
        AlphaSpec::Range { min, max, step } => {
            if !(step > &0.0) || !min.is_finite() || !max.is_finite() || max < min {
                return Err(RunError::validation(
                    "sweep.alpha",
                    "range needs finite min <= max and step > 0",
                ));
            }
            let count = ((max - min) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|k| min + k as f64 * step).collect())
        }
    }
}

fn p_values(spec: &[PSpec]) -> Result<Vec<PIndex>, RunError> {
    let mut ps = spec
        .iter()
        .map(|p| match p {
            PSpec::Number(x) if *x >= 1.0 && x.is_finite() => Ok(PIndex::Finite(*x)),
            PSpec::Number(x) => Err(RunError::validation("p", format!("{x} is not in [1, inf]"))),
            PSpec::Sentinel(s) if s == "inf" => Ok(PIndex::Infinite),
            PSpec::Sentinel(s) => Err(RunError::validation("p", format!("unknown value \"{s}\"; use \"inf\""))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    ps.sort();
    ps.dedup();
    Ok(ps)
}

/// Parses and validates a TOML configuration.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, RunError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| RunError::Parse(e.to_string()))?;

    let mut sweep = Sweep::default();
    if let Some(s) = raw.sweep {
        if let Some(a) = s.alpha {
            sweep.alphas = alpha_values(&a)?;
        }
        if let Some(p) = s.p {
            sweep.ps = p_values(&p)?;
        }
        if let Some(t) = s.t {
            if let Some(bad) = t.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
                return Err(RunError::validation("sweep.t", format!("{bad} is not a positive time")));
            }
            sweep.times = t;
        }
        if let Some(steps) = s.steps {
            if let Some(bad) = steps.iter().find(|t| **t <= 0) {
                return Err(RunError::validation("sweep.steps", format!("{bad} is not a positive integer")));
            }
            sweep.steps = steps;
        }
    }
    for (key, empty) in [
        ("sweep.alpha", sweep.alphas.is_empty()),
        ("p", sweep.ps.is_empty()),
        ("sweep.t", sweep.times.is_empty()),
        ("sweep.steps", sweep.steps.is_empty()),
    ] {
        if empty {
            return Err(RunError::validation(key, "grid must not be empty"));
        }
    }

    let mut tolerances = Tolerances::default();
    for (name, value) in &raw.tolerances {
        tolerances.set(name, *value)?;
    }

    let (output_dir, formats) = match raw.output {
        Some(o) => {
            let formats = match o.formats {
                None => vec![OutputFormat::Csv, OutputFormat::Json],
                Some(f) => f
                    .iter()
                    .map(|s| match s.as_str() {
                        "csv" => Ok(OutputFormat::Csv),
                        "json" => Ok(OutputFormat::Json),
                        other => Err(RunError::validation("output.formats", format!("unknown format \"{other}\""))),
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            };
            (o.dir, formats)
        }
        None => (None, vec![OutputFormat::Csv, OutputFormat::Json]),
    };

    let mut seen = std::collections::BTreeSet::new();
    for (i, s) in raw.systems.iter().enumerate() {
        if !seen.insert(s.id().to_string()) {
            return Err(RunError::validation(format!("systems[{i}].id"), format!("duplicate id \"{}\"", s.id())));
        }
    }

    let cfg = ExperimentConfig {
        systems: raw.systems,
        sweep,
        output_dir,
        formats,
        tolerances,
    };
    // build once so that matrix errors surface as validation errors
    cfg.build_systems()?;
    Ok(cfg)
}

/// A system built from its configuration entry.
#[derive(Debug, Clone)]
pub enum BuiltSystem {
    Quantum {
        id: String,
        system: QuantumSystem,
        model: Option<Box<ReservoirModel>>,
    },
    Classical {
        id: String,
        system: ClassicalSystem,
    },
}

impl BuiltSystem {
    pub fn id(&self) -> &str {
        match self {
            BuiltSystem::Quantum { id, .. } | BuiltSystem::Classical { id, .. } => id,
        }
    }
}

fn complex_matrix(rows: &ComplexRows, key: &str) -> Result<CMatrix, RunError> {
    let n = rows.len();
    if n == 0 {
        return Err(RunError::validation(key, "matrix is empty"));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(RunError::validation(
            key,
            format!("matrix is not square: row {i} has {} entries, expected {n}", r.len()),
        ));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

fn hermitian(rows: &ComplexRows, key: &str) -> Result<HermitianOperator, RunError> {
    HermitianOperator::new(complex_matrix(rows, key)?).map_err(|e| RunError::validation(key, e.to_string()))
}

impl ExperimentConfig {
    pub fn build_systems(&self) -> Result<Vec<BuiltSystem>, RunError> {
        self.systems
            .iter()
            .enumerate()
            .map(|(i, spec)| build_system(spec, i))
            .collect()
    }

    pub fn override_seeds(&mut self, seed: u64) {
        for s in &mut self.systems {
            s.override_seed(seed);
        }
    }
}

pub fn build_system(spec: &SystemSpec, index: usize) -> Result<BuiltSystem, RunError> {
    let key = |field: &str| format!("systems[{index}].{field}");
    let invalid = |field: &str| {
        let k = key(field);
        move |e: crate::Error| RunError::validation(k.clone(), e.to_string())
    };
    Ok(match spec {
        SystemSpec::Quantum {
            id,
            hamiltonian,
            reference_state,
            tri,
        } => {
            let h = hermitian(hamiltonian, &key("hamiltonian"))?;
            let rho = DensityMatrix::new(hermitian(reference_state, &key("reference_state"))?)
                .map_err(invalid("reference_state"))?;
            let system = match tri {
                Some(flag) => QuantumSystem::new(h, rho, *flag),
                None => QuantumSystem::with_detected_tri(h, rho),
            }
            .map_err(invalid("tri"))?;
            BuiltSystem::Quantum {
                id: id.clone(),
                system,
                model: None,
            }
        }
        SystemSpec::Reservoir {
            id,
            beta_left,
            beta_right,
            coupling,
            h_left,
            h_right,
            coupling_matrix,
        } => {
            let model = match (h_left, h_right, coupling_matrix) {
                (None, None, None) => canonical_model_with(*coupling, *beta_left, *beta_right).map_err(invalid("beta"))?,
                (Some(l), Some(r), Some(v)) => build_two_reservoir(
                    hermitian(l, &key("h_left"))?,
                    hermitian(r, &key("h_right"))?,
                    *beta_left,
                    *beta_right,
                    hermitian(v, &key("coupling_matrix"))?,
                )
                .map_err(invalid("reservoir"))?,
                _ => {
                    return Err(RunError::validation(
                        key("h_left"),
                        "give all of h_left, h_right, coupling_matrix or none of them",
                    ))
                }
            };
            BuiltSystem::Quantum {
                id: id.clone(),
                system: model.system.clone(),
                model: Some(Box::new(model)),
            }
        }
        SystemSpec::Random {
            id,
            dim,
            tri,
            seed,
            spread,
        } => BuiltSystem::Quantum {
            id: id.clone(),
            system: random_system(*dim, *tri, *seed, *spread).map_err(invalid("dim"))?,
            model: None,
        },
        SystemSpec::Classical { id, reference_state } => BuiltSystem::Classical {
            id: id.clone(),
            system: ClassicalSystem::new(reference_state.clone()).map_err(invalid("reference_state"))?,
        },
        SystemSpec::RandomClassical {
            id,
            size,
            tri,
            seed,
            spread,
        } => BuiltSystem::Classical {
            id: id.clone(),
            system: random_classical_system(*size, *tri, *seed, *spread).map_err(invalid("size"))?,
        },
    })
}
