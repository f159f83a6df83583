// SPDX-License-Identifier: Apache-2.0

//! Transfer operators `U_p(t)` and the functional `log ‖U_{p/α}(t)𝟙‖_p^p`.
//! Without time-reversal invariance it reproduces `e_{p,t}(1−α)`; with it,
//! both `e_{p,t}(α)` and `e_{p,t}(1−α)`.
//!
//!     cargo run --example transfer_operators

use entropic::classical::{classical_functional, classical_transfer_functional};
use entropic::functionals::{araki_masuda_norm, functional, transfer_apply, transfer_functional, PIndex};
use entropic::linalg::CMatrix;
use entropic::models::{random_classical_system, random_system};

fn main() -> entropic::Result<()> {
    let (p, t) = (3.0, 0.7);
    for tri in [true, false] {
        let sys = random_system(3, tri, 21, 1.0)?;
        println!("quantum, dim 3, time-reversal invariant: {tri}");
        println!("   α     transfer       e(α)           e(1−α)");
        for a in [-0.5, 0.25, 0.6, 1.5] {
            println!(
                "{a:5.2}  {:13.10}  {:13.10}  {:13.10}",
                transfer_functional(&sys, p, a, t)?,
                functional(&sys, PIndex::Finite(p), a, t)?,
                functional(&sys, PIndex::Finite(p), 1.0 - a, t)?
            );
        }
        // the operator itself is a contraction for the Araki–Masuda norm
        let one = CMatrix::identity(3, 3);
        let u1 = transfer_apply(&sys, p, &one, t)?;
        println!("  ‖U_p(t)𝟙‖_p = {:.12}\n", araki_masuda_norm(&u1, &sys, p)?);
    }

    let sys = random_classical_system(12, false, 2, 1.0)?;
    println!("classical, size 12, not reversible");
    for a in [-0.5, 0.25, 1.5] {
        println!(
            "{a:5.2}  transfer {:.12}  e(1−α) {:.12}",
            classical_transfer_functional(&sys, 2.0, a, 3)?,
            classical_functional(&sys, 1.0 - a, 3)?
        );
    }
    Ok(())
}
