// SPDX-License-Identifier: Apache-2.0

//! Sweeps over configured systems. Grid points are evaluated in parallel
//! and the rows sorted afterwards, so output never depends on scheduling.

use rayon::prelude::*;

use super::config::{BuiltSystem, ExperimentConfig};
use super::table::{CheckRow, CurveRow, DistributionRow, MeasureKind, ResultTable};
use super::verify::{classical_checks, fcs_checks, FD_STEP};
use super::{Context, RunError};
use crate::classical::{classical_functional, es_distribution, ClassicalSystem};
use crate::fcs::{fcs_distribution, modular_spectral_measure};
use crate::functionals::{FunctionalEvaluator, PIndex};
use crate::models::canonical_model;
use crate::quantum::QuantumSystem;

/// Systems of `cfg`; when it declares none, the canonical two-qubit model.
fn systems_or_default(cfg: &ExperimentConfig) -> Result<Vec<BuiltSystem>, RunError> {
    let built = cfg.build_systems()?;
    if !built.is_empty() {
        return Ok(built);
    }
    let model = canonical_model();
    Ok(vec![BuiltSystem::Quantum {
        id: "canonical".into(),
        system: model.system.clone(),
        model: Some(Box::new(model)),
    }])
}

fn order_of(systems: &[BuiltSystem]) -> Vec<String> {
    systems.iter().map(|s| s.id().to_string()).collect()
}

fn quantum_curve(id: &str, sys: &QuantumSystem, p: PIndex, t: f64, cfg: &ExperimentConfig) -> Result<ResultTable, RunError> {
    let ctx = || format!("functional of `{id}` at p={p}, t={t}");
    let eval = FunctionalEvaluator::new(sys, t);
    let value = |a: f64| eval.value(p, a).context(ctx);
    let alphas = &cfg.sweep.alphas;
    let tol = &cfg.tolerances;
    let mut table = ResultTable::default();
    let mut sym: f64 = 0.0;
    for &alpha in alphas {
        let v = value(alpha)?;
        sym = sym.max((v - value(1.0 - alpha)?).abs());
        table.curves.push(CurveRow {
            system_id: id.to_string(),
            p: Some(p),
            t,
            alpha,
            value: v,
        });
    }
    let kawasaki = value(0.0)?.abs().max(value(1.0)?.abs());
    let mean = crate::quantum::mean_entropy_production(sys, t).context(ctx)?;
    let slope = (value(FD_STEP)? - value(-FD_STEP)?) / (2.0 * FD_STEP);
    let check = |name: &str, v: f64, tol_name: &str, expected: bool| {
        CheckRow::at_most(id, name, v, tol.get(tol_name), expected).with_p(p).with_t(t)
    };
    table.checks.push(check("symmetry", sym, "symmetry", sys.is_tri()));
    table.checks.push(check("kawasaki", kawasaki, "kawasaki", true));
    table.checks.push(check("derivative_at_zero", (slope + t * mean).abs(), "derivative", true));
    Ok(table)
}

fn classical_curve(id: &str, sys: &ClassicalSystem, t: i64, cfg: &ExperimentConfig) -> Result<ResultTable, RunError> {
    let ctx = || format!("functional of `{id}` at t={t}");
    let value = |a: f64| classical_functional(sys, a, t).context(ctx);
    let mut table = ResultTable::default();
    let mut sym: f64 = 0.0;
    for &alpha in &cfg.sweep.alphas {
        let v = value(alpha)?;
        sym = sym.max((v - value(1.0 - alpha)?).abs());
        table.curves.push(CurveRow {
            system_id: id.to_string(),
            p: None,
            t: t as f64,
            alpha,
            value: v,
        });
    }
    let kawasaki = value(0.0)?.abs().max(value(1.0)?.abs());
    let tol = &cfg.tolerances;
    table.checks.push(CheckRow::at_most(id, "symmetry", sym, tol.get("symmetry"), sys.is_tri()).with_t(t as f64));
    table.checks.push(CheckRow::at_most(id, "kawasaki", kawasaki, tol.get("kawasaki"), true).with_t(t as f64));
    Ok(table)
}

fn gather(parts: Vec<ResultTable>, order: &[String]) -> ResultTable {
    let mut table = ResultTable::default();
    for part in parts {
        table.extend(part);
    }
    table.sort(order);
    table
}

/// `e_{p,t}(α)` over the sweep for every quantum system, and `e_t(α)` over
/// `steps` for every classical one, with symmetry and endpoint checks.
pub fn run_functionals(cfg: &ExperimentConfig) -> Result<ResultTable, RunError> {
    let systems = systems_or_default(cfg)?;
    let mut jobs: Vec<(&BuiltSystem, Option<PIndex>, f64)> = Vec::new();
    for s in &systems {
        match s {
            BuiltSystem::Quantum { .. } => {
                for &p in &cfg.sweep.ps {
                    for &t in &cfg.sweep.times {
                        jobs.push((s, Some(p), t));
                    }
                }
            }
            BuiltSystem::Classical { .. } => {
                for &t in &cfg.sweep.steps {
                    jobs.push((s, None, t as f64));
                }
            }
        }
    }
    let parts = jobs
        .par_iter()
        .map(|&(s, p, t)| match (s, p) {
            (BuiltSystem::Quantum { id, system, .. }, Some(p)) => quantum_curve(id, system, p, t, cfg),
            (BuiltSystem::Classical { id, system }, _) => classical_curve(id, system, t as i64, cfg),
            _ => unreachable!("quantum jobs always carry p"),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(gather(parts, &order_of(&systems)))
}

/// `ℙ_t` and `Q_t` atoms, the cumulant generating function of `ℙ_t` on the
/// α grid, and the comparison checks, for every quantum system.
pub fn run_fcs(cfg: &ExperimentConfig) -> Result<ResultTable, RunError> {
    let systems = systems_or_default(cfg)?;
    let jobs: Vec<(&str, &QuantumSystem, f64)> = systems
        .iter()
        .filter_map(|s| match s {
            BuiltSystem::Quantum { id, system, .. } => Some((id.as_str(), system)),
            BuiltSystem::Classical { .. } => None,
        })
        .flat_map(|(id, sys)| cfg.sweep.times.iter().map(move |&t| (id, sys, t)))
        .collect();
    let parts = jobs
        .par_iter()
        .map(|&(id, sys, t)| {
            let ctx = || format!("counting statistics of `{id}` at t={t}");
            let p = fcs_distribution(sys, t).context(ctx)?;
            let q = modular_spectral_measure(sys, t).context(ctx)?;
            let mut table = ResultTable::default();
            for (measure, kind) in [(&p, MeasureKind::P), (&q, MeasureKind::Q)] {
                table.distributions.extend(measure.atoms().iter().map(|&(atom, weight)| DistributionRow {
                    system_id: id.to_string(),
                    t,
                    atom,
                    weight,
                    measure: kind,
                }));
            }
            for &alpha in &cfg.sweep.alphas {
                table.curves.push(CurveRow {
                    system_id: id.to_string(),
                    p: None,
                    t,
                    alpha,
                    value: p.cgf(alpha, t).context(ctx)?,
                });
            }
            table.checks = fcs_checks(id, sys, t, &cfg.tolerances)?;
            Ok(table)
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    Ok(gather(parts, &order_of(&systems)))
}

/// Classical curves over `steps`, Evans–Searles atoms and the classical
/// checks. With no classical system configured, a mirror-symmetric random
/// system of size 11 is used.
pub fn run_classical(cfg: &ExperimentConfig) -> Result<ResultTable, RunError> {
    let mut systems: Vec<BuiltSystem> = cfg
        .build_systems()?
        .into_iter()
        .filter(|s| matches!(s, BuiltSystem::Classical { .. }))
        .collect();
    if systems.is_empty() {
        let system = crate::models::random_classical_system(11, true, 11, 1.0)
            .context(|| "default classical system".to_string())?;
        systems.push(BuiltSystem::Classical {
            id: "classical-default".into(),
            system,
        });
    }
    let jobs: Vec<(&str, &ClassicalSystem, i64)> = systems
        .iter()
        .filter_map(|s| match s {
            BuiltSystem::Classical { id, system } => Some((id.as_str(), system)),
            BuiltSystem::Quantum { .. } => None,
        })
        .flat_map(|(id, sys)| cfg.sweep.steps.iter().map(move |&t| (id, sys, t)))
        .collect();
    let parts = jobs
        .par_iter()
        .map(|&(id, sys, t)| {
            let mut table = classical_curve(id, sys, t, cfg)?;
            let es = es_distribution(sys, t).context(|| format!("Evans-Searles distribution of `{id}`"))?;
            table.distributions.extend(es.atoms().iter().map(|&(atom, weight)| DistributionRow {
                system_id: id.to_string(),
                t: t as f64,
                atom,
                weight,
                measure: MeasureKind::ES,
            }));
            // the full classical battery supersedes the curve's own checks
            table.checks = classical_checks(id, sys, &cfg.sweep.alphas, &[t], &cfg.tolerances)?;
            Ok(table)
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    Ok(gather(parts, &order_of(&systems)))
}
