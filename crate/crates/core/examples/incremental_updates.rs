//! Feeds a partial-run history through the incremental update path, where a
//! test's column only moves on builds in which the test actually ran, and
//! compares the result against a full replay of the same history.
//!
//! ```text
//! cargo run -p flipsense --example incremental_updates
//! ```

use std::collections::BTreeSet;

use flipsense::sensitivity::{incremental_apply, incremental_observe, PendingChanges};
use flipsense::synth::{generate, SynthConfig};
use flipsense::{build_delta, extract_flips, DMode, MatrixConfig, SensitivityMatrix};

pub fn run_example() -> flipsense::Result<f64> {
    let out = generate(&SynthConfig { n_builds: 40, n_files: 80, n_tests: 40, ..SynthConfig::default() })?;
    let history = &out.history;
    let ledger = extract_flips(history);
    let config = MatrixConfig::ema(0.5)?;

    let mut full = SensitivityMatrix::new(config);
    for rec in &history.records()[1..] {
        full.advance(&build_delta(&rec.changed_files, ledger.flipped(rec.seq), DMode::Linear))?;
    }

    let mut inc = SensitivityMatrix::new(config);
    let mut pending = PendingChanges::new();
    for rec in history.records() {
        if rec.seq > 0 {
            incremental_observe(&mut pending, &rec.changed_files);
        }
        let executed: BTreeSet<String> = rec.verdicts.keys().cloned().collect();
        incremental_apply(&mut inc, &mut pending, &executed, &rec.verdicts)?;
    }

    let mut worst: f64 = 0.0;
    for (f, t, v) in full.entries().chain(inc.entries()) {
        worst = worst.max((v - full.get(f, t)).abs()).max((v - inc.get(f, t)).abs());
    }
    println!("full replay: {} entries, incremental: {} entries", full.nnz(), inc.nnz());
    println!("largest difference: {worst:.2e}");
    Ok(worst)
}

#[allow(dead_code)]
fn main() -> flipsense::Result<()> {
    run_example().map(|_| ())
}
