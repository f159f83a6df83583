// SPDX-License-Identifier: Apache-2.0

//! The family `e_{p,t}(α)` on a random time-reversal invariant system:
//! symmetry about α = 1/2, monotone decrease in `p`, and the `p = 2` and
//! `p = ∞` representations.
//!
//!     cargo run --example quantum_functionals

use entropic::functionals::{default_p_grid, variational_max, FunctionalEvaluator, PIndex};
use entropic::models::random_system;
use entropic::quantum::{mean_entropy_production, q_renyi_entropy, schrodinger_evolve};

fn main() -> entropic::Result<()> {
    let sys = random_system(4, true, 11, 1.0)?;
    let t = 1.0;
    let eval = FunctionalEvaluator::new(&sys, t);

    print!("{:>6}", "α");
    for p in default_p_grid() {
        print!("{:>12}", format!("p={p}"));
    }
    println!();
    for k in -2..=6 {
        let a = k as f64 / 4.0;
        print!("{a:6.2}");
        for p in default_p_grid() {
            print!("{:12.7}", eval.value(p, a)?);
        }
        println!();
    }

    let worst = (-20..=40)
        .map(|k| k as f64 / 20.0)
        .flat_map(|a| default_p_grid().into_iter().map(move |p| (p, a)))
        .map(|(p, a)| Ok((eval.value(p, a)? - eval.value(p, 1.0 - a)?).abs()))
        .collect::<entropic::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    println!("\nmax |e(α) − e(1−α)| over the grid: {worst:.2e}");

    let omega_t = schrodinger_evolve(&sys, sys.reference_state(), t);
    let a = 0.3;
    let e2 = eval.value(PIndex::Finite(2.0), a)?;
    println!("e_2(0.3) = {e2:.12}, S_0.3(ω_t, ω₀) = {:.12}", q_renyi_entropy(&omega_t, sys.reference_state(), a)?);
    let var = variational_max(&sys, a, t, 32, 0)?;
    println!(
        "e_∞(0.3) = {:.12}, variational max = {:.12} (best random trial {:.6})",
        eval.value(PIndex::Infinite, a)?,
        var.value,
        var.best_perturbed
    );

    let h = 1e-4;
    let slope = (eval.value(PIndex::Finite(3.0), h)? - eval.value(PIndex::Finite(3.0), -h)?) / (2.0 * h);
    println!("e_3'(0) = {slope:.8}, −t ω₀(Σ^t) = {:.8}", -t * mean_entropy_production(&sys, t)?);
    Ok(())
}
