// SPDX-License-Identifier: Apache-2.0

//! Two-time measurement statistics of the entropy observable and the
//! spectral measure of the relative modular operator.
//!
//!     cargo run --example counting_statistics

use std::f64::consts::FRAC_PI_2;

use entropic::fcs::{fcs_distribution, modular_spectral_measure};
use entropic::functionals::{functional, PIndex};
use entropic::linalg::{diag, pauli_x, HermitianOperator};
use entropic::measure::ATOM_TOL;
use entropic::models::canonical_model;
use entropic::quantum::{DensityMatrix, QuantumSystem};

fn main() -> entropic::Result<()> {
    // H = σ_x, ω₀ = diag(3/4, 1/4): at t = π/2 the populations are swapped
    let qubit = QuantumSystem::new(
        HermitianOperator::new(pauli_x())?,
        DensityMatrix::from_matrix(diag(&[0.75, 0.25]))?,
        true,
    )?;
    let p = fcs_distribution(&qubit, FRAC_PI_2)?;
    println!("qubit, t = π/2 (expect ±(2/π) log 3 = ±{:.10})", 3f64.ln() / FRAC_PI_2);
    for &(s, w) in p.atoms() {
        println!("  φ = {s:+.10}  weight {w:.10}");
    }

    let model = canonical_model();
    let t = 1.0;
    let p = fcs_distribution(&model.system, t)?;
    let q = modular_spectral_measure(&model.system, t)?;
    println!("\ntwo-qubit reservoir model, t = 1: {} atoms", p.len());
    println!("  total variation |ℙ − Q| = {:.2e}", p.total_variation(&q, ATOM_TOL));
    println!("  mean of ℙ = {:.10}", p.mean());
    println!("  fluctuation relation residual {:.2e}", p.fluctuation_residual(t, ATOM_TOL));
    println!("\n   α     log Σ e^(−αtφ) ℙ(φ)       e_2(α)");
    for k in -2..=6 {
        let a = k as f64 / 4.0;
        println!("{a:5.2}  {:20.14}  {:20.14}", p.cgf(a, t)?, functional(&model.system, PIndex::Finite(2.0), a, t)?);
    }
    Ok(())
}
