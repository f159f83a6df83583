// SPDX-License-Identifier: Apache-2.0

//! Drives the experiment runner from a TOML string and writes CSV/JSON
//! tables, as the `entropic` binary does.
//!
//!     cargo run --example run_config [output-dir]

use entropic::runner::table::RunMetadata;
use entropic::runner::{parse_config, run_fcs, run_functionals, CheckStatus};

const CONFIG: &str = r#"
[[systems]]
id = "two-qubit"
kind = "reservoir"
beta_left = 1.0
beta_right = 2.0

[[systems]]
id = "random-3"
kind = "random"
dim = 3
tri = false
seed = 1

[sweep]
alpha = { min = 0.0, max = 1.0, step = 0.1 }
p = [2, "inf"]
t = [1.0]
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "results-example".into());
    let cfg = parse_config(CONFIG)?;
    for (name, table) in [("functionals", run_functionals(&cfg)?), ("fcs", run_fcs(&cfg)?)] {
        let meta = RunMetadata::new(name, CONFIG, None);
        for f in table.write(dir.as_ref(), name, &cfg.formats, &meta)? {
            println!("wrote {dir}/{f}");
        }
        for c in &table.checks {
            if c.status != CheckStatus::Pass {
                println!("  {} on {} ({}): {:.2e}", c.check, c.system_id, c.status, c.value);
            }
        }
    }
    Ok(())
}
