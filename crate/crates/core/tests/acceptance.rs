// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Each test prints one `PASS`/`FAIL` line and asserts it.
//!
//!     cargo test --test acceptance -- --nocapture

use std::f64::consts::FRAC_PI_2;
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use entropic::classical::{
    classical_functional, evolve_state, mean_ep_observable as classical_mean_ep, relative_entropy,
    renyi_identity_check, variational_functional, ClassicalSystem,
};
use entropic::fcs::{fcs_distribution, modular_spectral_measure};
use entropic::functionals::{default_alpha_grid, naive_functional, transfer_functional, variational_max, FunctionalEvaluator, PIndex};
use entropic::linalg::{diag, frobenius, pauli_x, HermitianOperator};
use entropic::measure::ATOM_TOL;
use entropic::models::{
    canonical_model, entropy_production_decomposition, flux_balance_residual, random_classical_system, random_system,
};
use entropic::quantum::{
    entropy_production_observable, mean_entropy_production, q_relative_entropy, q_renyi_entropy, schrodinger_evolve,
    DensityMatrix, QuantumSystem,
};
use entropic::runner::verify::random_reservoir;

const TIMES: [f64; 3] = [0.5, 1.0, FRAC_PI_2];
const STEPS: [i64; 3] = [1, 2, 3];
const FD_STEP: f64 = 1e-4;

fn ps() -> Vec<PIndex> {
    [1.0, 1.5, 2.0, 3.0, 4.0, 6.0]
        .into_iter()
        .map(PIndex::Finite)
        .chain([PIndex::Infinite])
        .collect()
}

/// α from −1 to 2 in steps of 0.05.
fn alphas() -> Vec<f64> {
    (0..=60).map(|k| -1.0 + k as f64 * 0.05).collect()
}

fn report(n: u32, name: &str, ok: bool, detail: String) {
    println!("criterion {n} [{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} ({name}) failed: {detail}");
}

/// 20 time-reversal invariant quantum systems of dimension 2 to 16, plus the
/// two-qubit reservoir model.
fn quantum_tri() -> &'static [(String, QuantumSystem)] {
    static SYSTEMS: OnceLock<Vec<(String, QuantumSystem)>> = OnceLock::new();
    SYSTEMS.get_or_init(|| {
        let dims = [2, 3, 4, 5, 6, 7, 8, 10, 12, 16];
        let mut out: Vec<_> = (0..20)
            .map(|k| {
                let d = dims[k % dims.len()];
                (format!("tri-d{d}-{k}"), random_system(d, true, 1000 + k as u64, 1.0).unwrap())
            })
            .collect();
        out.push(("canonical".into(), canonical_model().system));
        assert!(out.iter().all(|(_, s)| s.is_tri()));
        out
    })
}

fn quantum_nontri() -> Vec<(String, QuantumSystem)> {
    [2, 3, 5, 8]
        .into_iter()
        .map(|d| (format!("nontri-d{d}"), random_system(d, false, 77 + d as u64, 1.0).unwrap()))
        .collect()
}

/// 20 mirror-symmetric classical systems of size 3 to 101.
fn classical_tri() -> &'static [(String, ClassicalSystem)] {
    static SYSTEMS: OnceLock<Vec<(String, ClassicalSystem)>> = OnceLock::new();
    SYSTEMS.get_or_init(|| {
        let sizes = [3, 4, 5, 7, 10, 16, 31, 50, 64, 101];
        (0..20)
            .map(|k| {
                let n = sizes[k % sizes.len()];
                (format!("classical-n{n}-{k}"), random_classical_system(n, true, 2000 + k as u64, 1.0).unwrap())
            })
            .collect()
    })
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().map(|v| if v.is_nan() { f64::INFINITY } else { v }).fold(0.0, f64::max)
}

struct Sweep {
    symmetry: f64,
    kawasaki: f64,
    elapsed: Duration,
}

/// The full α × p × t sweep over every system, timed once and shared.
fn sweep() -> &'static Sweep {
    static SWEEP: OnceLock<Sweep> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let start = Instant::now();
        let (mut symmetry, mut kawasaki) = (0.0f64, 0.0f64);
        let grid = alphas();
        for (_, sys) in quantum_tri() {
            for t in TIMES {
                let eval = FunctionalEvaluator::new(sys, t);
                for p in ps() {
                    for &a in &grid {
                        symmetry = symmetry.max((eval.value(p, a).unwrap() - eval.value(p, 1.0 - a).unwrap()).abs());
                    }
                    kawasaki = kawasaki.max(max([eval.value(p, 0.0).unwrap().abs(), eval.value(p, 1.0).unwrap().abs()]));
                }
            }
        }
        for (_, sys) in classical_tri() {
            for t in STEPS {
                let e = |a: f64| classical_functional(sys, a, t).unwrap();
                for &a in &grid {
                    symmetry = symmetry.max((e(a) - e(1.0 - a)).abs());
                }
                kawasaki = kawasaki.max(max([e(0.0).abs(), e(1.0).abs()]));
            }
        }
        Sweep {
            symmetry,
            kawasaki,
            elapsed: start.elapsed(),
        }
    })
}

#[test]
fn criterion_1_symmetry() {
    let s = sweep();
    let ok = s.symmetry <= 1e-10 && s.elapsed < Duration::from_secs(30);
    report(
        1,
        "symmetry e(α) = e(1−α)",
        ok,
        format!(
            "max residual {:.2e} over {} quantum and {} classical systems in {:.2} s",
            s.symmetry,
            quantum_tri().len(),
            classical_tri().len(),
            s.elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_2_kawasaki() {
    let s = sweep();
    let mut violations = 0;
    for k in 0..20u64 {
        let sys = random_system(2 + k as usize % 7, true, 3000 + k, 1.0).unwrap();
        if naive_functional(&sys, 1.0, 1.0).unwrap().abs() > 1e-8 {
            violations += 1;
        }
    }
    report(
        2,
        "endpoints e(0) = e(1) = 0",
        s.kawasaki <= 1e-10 && violations >= 19,
        format!("max |e| at endpoints {:.2e}; naive functional nonzero on {violations}/20", s.kawasaki),
    );
}

#[test]
fn criterion_3_bridges() {
    let grid = default_alpha_grid();
    let coarse: Vec<f64> = (-4..=8).filter(|k| *k != 0).map(|k| k as f64 / 4.0).collect();
    let (mut renyi, mut max_formula, mut transfer) = (0.0f64, 0.0f64, 0.0f64);
    for (_, sys) in quantum_tri() {
        for t in TIMES {
            let eval = FunctionalEvaluator::new(sys, t);
            let omega_t = schrodinger_evolve(sys, sys.reference_state(), t);
            for &a in &grid {
                let s = q_renyi_entropy(&omega_t, sys.reference_state(), a).unwrap();
                renyi = renyi.max((eval.value(PIndex::Finite(2.0), a).unwrap() - s).abs());
            }
            for (k, &a) in coarse.iter().enumerate() {
                let v = variational_max(sys, a, t, 4, k as u64).unwrap();
                max_formula = max_formula.max((eval.value(PIndex::Infinite, a).unwrap() - v.value).abs());
                assert!(v.best_perturbed <= v.value + 1e-9, "trial state beats the maximizer");
                for p in [1.0, 2.0, 3.0] {
                    let u = transfer_functional(sys, p, a, t).unwrap();
                    transfer = transfer.max((eval.value(PIndex::Finite(p), a).unwrap() - u).abs());
                }
            }
        }
    }
    let mut classical = 0.0f64;
    for (_, sys) in classical_tri() {
        for t in STEPS {
            for (k, &a) in grid.iter().enumerate() {
                let e = classical_functional(sys, a, t).unwrap();
                let s = renyi_identity_check(sys, a, t).unwrap();
                let v = variational_functional(sys, a, t, 4, k as u64).unwrap().value;
                classical = classical.max(max([(e - s).abs(), (e - v).abs(), (s - v).abs()]));
            }
        }
    }
    report(
        3,
        "Rényi, variational and transfer representations",
        renyi <= 1e-10 && max_formula <= 1e-10 && transfer <= 1e-10 && classical <= 1e-12,
        format!("Rényi {renyi:.2e}, max formula {max_formula:.2e}, transfer {transfer:.2e}, classical {classical:.2e}"),
    );
}

#[test]
fn criterion_4_counting_statistics() {
    let mut tv = 0.0f64;
    for (_, sys) in quantum_tri() {
        for t in TIMES {
            let p = fcs_distribution(sys, t).unwrap();
            let q = modular_spectral_measure(sys, t).unwrap();
            tv = tv.max(p.total_variation(&q, ATOM_TOL));
        }
    }
    let qubit = QuantumSystem::new(
        HermitianOperator::new(pauli_x()).unwrap(),
        DensityMatrix::from_matrix(diag(&[0.75, 0.25])).unwrap(),
        true,
    )
    .unwrap();
    let p = fcs_distribution(&qubit, FRAC_PI_2).unwrap();
    let s = 2.0 / std::f64::consts::PI * 3f64.ln();
    let closed = if p.len() == 2 {
        max(p.atoms().iter().zip([(-s, 0.25), (s, 0.75)]).map(|(x, y)| (x.0 - y.0).abs().max((x.1 - y.1).abs())))
    } else {
        f64::INFINITY
    };
    report(
        4,
        "counting statistics equal the modular measure",
        tv <= 1e-10 && closed <= 1e-12,
        format!("max total variation {tv:.2e}; qubit closed form {closed:.2e}"),
    );
}

#[test]
fn criterion_5_cgf() {
    let grid = alphas();
    let mut gap = 0.0f64;
    let all = quantum_tri().iter().cloned().chain(quantum_nontri());
    for (_, sys) in all {
        for t in TIMES {
            let p = fcs_distribution(&sys, t).unwrap();
            let eval = FunctionalEvaluator::new(&sys, t);
            for &a in &grid {
                gap = gap.max((p.cgf(a, t).unwrap() - eval.value(PIndex::Finite(2.0), a).unwrap()).abs());
            }
        }
    }
    report(5, "cumulant generating function equals e_2", gap <= 1e-10, format!("max gap {gap:.2e}"));
}

#[test]
fn criterion_6_second_law() {
    let (mut negative, mut identity, mut derivative) = (0.0f64, 0.0f64, 0.0f64);
    let all: Vec<_> = quantum_tri().iter().cloned().chain(quantum_nontri()).collect();
    for (_, sys) in &all {
        for t in [0.1, 1.0, 10.0] {
            let mean = mean_entropy_production(sys, t).unwrap();
            let omega_t = schrodinger_evolve(sys, sys.reference_state(), t);
            let s = q_relative_entropy(&omega_t, sys.reference_state()).unwrap();
            negative = negative.max(-mean);
            identity = identity.max((mean + s / t).abs());
        }
        for t in TIMES {
            let mean = mean_entropy_production(sys, t).unwrap();
            let eval = FunctionalEvaluator::new(sys, t);
            for p in ps() {
                let slope = (eval.value(p, FD_STEP).unwrap() - eval.value(p, -FD_STEP).unwrap()) / (2.0 * FD_STEP);
                derivative = derivative.max((slope + t * mean).abs());
            }
        }
    }
    for (_, sys) in classical_tri() {
        for t in STEPS {
            let tf = t as f64;
            let mean = sys.reference_state().expectation(&classical_mean_ep(sys, t).unwrap());
            let omega_t = evolve_state(sys.reference_state(), t);
            let s = relative_entropy(&omega_t, sys.reference_state()).unwrap();
            negative = negative.max(-mean);
            identity = identity.max((mean + s / tf).abs());
            let e = |a: f64| classical_functional(sys, a, t).unwrap();
            derivative = derivative.max(((e(FD_STEP) - e(-FD_STEP)) / (2.0 * FD_STEP) + tf * mean).abs());
        }
    }
    report(
        6,
        "second law and slope at α = 0",
        negative <= 1e-12 && identity <= 1e-10 && derivative <= 1e-6,
        format!("most negative mean {:.2e}, identity {identity:.2e}, slope {derivative:.2e}", -negative),
    );
}

#[test]
fn criterion_7_shape_in_p_and_alpha() {
    let grid = alphas();
    let (mut mono, mut convex, mut limit) = (0.0f64, 0.0f64, 0.0f64);
    for (_, sys) in quantum_tri() {
        for t in TIMES {
            let eval = FunctionalEvaluator::new(sys, t);
            let mut index: Vec<PIndex> = ps();
            index.insert(index.len() - 1, PIndex::Finite(64.0));
            let curves: Vec<Vec<f64>> =
                index.iter().map(|&p| grid.iter().map(|&a| eval.value(p, a).unwrap()).collect()).collect();
            for pair in curves.windows(2) {
                for (k, &a) in grid.iter().enumerate() {
                    if a > 0.0 && a < 1.0 {
                        mono = mono.max(pair[1][k] - pair[0][k]);
                    }
                }
            }
            for c in &curves {
                convex = convex.max(max(c.windows(3).map(|w| -(w[0] - 2.0 * w[1] + w[2]))));
            }
            if sys.dim() <= 8 {
                let n = curves.len();
                limit = limit.max(max(curves[n - 2].iter().zip(&curves[n - 1]).map(|(x, y)| (x - y).abs())));
            }
        }
    }
    report(
        7,
        "monotone in p, convex in α, p → ∞ limit",
        mono <= 1e-10 && convex <= 1e-9 && limit < 1e-3,
        format!("monotonicity {mono:.2e}, convexity {convex:.2e}, |e_64 − e_∞| {limit:.2e}"),
    );
}

#[test]
fn criterion_8_reservoirs() {
    let mut models = vec![canonical_model()];
    for k in 0..10u64 {
        models.push(random_reservoir(if k % 2 == 0 { (2, 2) } else { (2, 3) }, 500 + k).unwrap());
    }
    let (mut balance, mut decomposition) = (0.0f64, 0.0f64);
    for m in &models {
        for t in [0.5, 1.0, 2.0] {
            let (l, r) = flux_balance_residual(m, t);
            balance = balance.max(l.max(r));
        }
        let sigma = entropy_production_observable(&m.system);
        decomposition = decomposition.max(frobenius(&(sigma.matrix() - entropy_production_decomposition(m).matrix())));
    }
    let heat = mean_entropy_production(&models[0].system, 1.0).unwrap();
    report(
        8,
        "two-reservoir fluxes",
        balance <= 1e-8 && decomposition <= 1e-10 && heat > 1e-10,
        format!("flux balance {balance:.2e}, decomposition {decomposition:.2e}, canonical ω₀(Σ¹) {heat:.3e}"),
    );
}

fn entropic(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_entropic")).args(args).output().expect("binary runs")
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

const CONFIG: &str = r#"
[[systems]]
id = "two-qubit"
kind = "reservoir"
beta_left = 1.0
beta_right = 2.0

[[systems]]
id = "random-5"
kind = "random"
dim = 5
tri = true
seed = 9

[[systems]]
id = "ring"
kind = "random_classical"
size = 15
tri = true
seed = 4

[sweep]
alpha = { min = -1.0, max = 2.0, step = 0.05 }
p = [1, 2, "inf"]
t = [0.5, 1.0]
steps = [1, 2]
"#;

#[test]
fn criterion_9_cli() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, CONFIG).unwrap();
    let cfg = cfg.to_str().unwrap();

    let start = Instant::now();
    let verify = entropic(&["verify", "--config", cfg]);
    let verify_time = start.elapsed();
    let verify_ok = verify.status.code() == Some(0) && verify_time < Duration::from_secs(60);

    let mut identical = true;
    for command in ["functionals", "fcs", "classical"] {
        let runs: Vec<_> = ["a", "b"]
            .iter()
            .map(|k| {
                let dir = tmp.path().join(format!("{command}-{k}"));
                let out = entropic(&[command, "--config", cfg, "--out", dir.to_str().unwrap()]);
                assert_eq!(out.status.code(), Some(0), "{command}: {}", String::from_utf8_lossy(&out.stderr));
                files(&dir)
            })
            .collect();
        identical &= !runs[0].is_empty() && runs[0] == runs[1];
    }

    let broken = tmp.path().join("broken.toml");
    std::fs::write(&broken, "[[systems]\nid = \"x\n").unwrap();
    let broken_code = entropic(&["functionals", "--config", broken.to_str().unwrap()]).status.code();
    let negative = tmp.path().join("negative.toml");
    std::fs::write(&negative, "[sweep]\np = [-1]\n").unwrap();
    let negative_code = entropic(&["functionals", "--config", negative.to_str().unwrap()]).status.code();

    report(
        9,
        "command-line runner",
        verify_ok && identical && broken_code == Some(2) && negative_code == Some(2),
        format!(
            "verify exit {:?} in {:.2} s; byte-identical reruns {identical}; corrupted config exit {broken_code:?}; p = -1 exit {negative_code:?}",
            verify.status.code(),
            verify_time.as_secs_f64()
        ),
    );
}
