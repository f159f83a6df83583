// SPDX-License-Identifier: Apache-2.0

//! Replacing the classical `log ω₀(e^{−αtΣ^t})` by the same expression with
//! the quantum observable `Σ^t` breaks the endpoint identity at α = 1,
//! while every `e_{p,t}` keeps it.
//!
//!     cargo run --example naive_quantization

use entropic::functionals::{functional, naive_functional, PIndex};
use entropic::models::random_system;

fn main() -> entropic::Result<()> {
    println!("seed  dim   naive e_1(1)     e_2(1)       e_inf(1)");
    let mut broken = 0;
    for seed in 0..20u64 {
        let dim = 2 + seed as usize % 7;
        let sys = random_system(dim, true, seed, 1.0)?;
        let naive = naive_functional(&sys, 1.0, 1.0)?;
        if naive.abs() > 1e-8 {
            broken += 1;
        }
        println!(
            "{seed:4}  {dim:3}  {naive:+.6e}  {:+.1e}  {:+.1e}",
            functional(&sys, PIndex::Finite(2.0), 1.0, 1.0)?,
            functional(&sys, PIndex::Infinite, 1.0, 1.0)?
        );
    }
    println!("naive functional nonzero at α = 1 on {broken} of 20 systems");
    Ok(())
}
