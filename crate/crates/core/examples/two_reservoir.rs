// SPDX-License-Identifier: Apache-2.0

//! Heat exchange between two systems at different temperatures: energy
//! fluxes, their integrated balance, and entropy production as
//! `σ = −β_l Φ_l − β_r Φ_r`.
//!
//!     cargo run --example two_reservoir

use entropic::linalg::frobenius;
use entropic::models::{
    canonical_model_with, entropy_production_decomposition, flux_balance_residual, flux_observables,
};
use entropic::quantum::{entropy_production_observable, mean_entropy_production};

fn main() -> entropic::Result<()> {
    for (beta_l, beta_r) in [(1.0, 2.0), (1.0, 1.0), (0.5, 3.0)] {
        let model = canonical_model_with(0.25, beta_l, beta_r)?;
        let (phi_l, phi_r) = flux_observables(&model);
        let omega0 = model.system.reference_state();
        let sigma = entropy_production_observable(&model.system);
        let gap = frobenius(&(sigma.matrix() - entropy_production_decomposition(&model).matrix()));
        println!("β_l = {beta_l}, β_r = {beta_r}");
        println!("  ω₀(Φ_l) = {:+.3e}, ω₀(Φ_r) = {:+.3e}", omega0.expectation(&phi_l), omega0.expectation(&phi_r));
        println!("  ‖σ + β_lΦ_l + β_rΦ_r‖ = {gap:.2e}");
        for t in [0.5, 1.0, 2.0] {
            let (l, r) = flux_balance_residual(&model, t);
            println!(
                "  t = {t}: ω₀(Σ^t) = {:.6e}, flux balance residuals {l:.1e} / {r:.1e}",
                mean_entropy_production(&model.system, t)?
            );
        }
    }
    Ok(())
}
