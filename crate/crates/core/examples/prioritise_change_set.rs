//! Builds the decayed sensitivity matrix from a synthetic history and ranks
//! the tests for a new change set, comparing sum and max slicing.
//!
//! ```text
//! cargo run -p flipsense --example prioritise_change_set
//! ```

use std::collections::BTreeSet;

use flipsense::synth::{generate, SynthConfig};
use flipsense::{
    build_delta, extract_flips, select_top_n, slice_scores, DMode, MatrixConfig, ScoreMode,
    SensitivityMatrix,
};

pub fn run_example() -> flipsense::Result<Vec<String>> {
    let out = generate(&SynthConfig::default())?;
    let ledger = extract_flips(&out.history);

    let mut matrix = SensitivityMatrix::new(MatrixConfig::ema(0.8)?);
    for rec in &out.history.records()[1..] {
        matrix.advance(&build_delta(&rec.changed_files, ledger.flipped(rec.seq), DMode::Linear))?;
    }
    println!("matrix holds {} non-zero entries", matrix.nnz());

    // change the files the first test depends on
    let (test, deps) = out.ground_truth.iter().next().expect("tests exist");
    let changed: BTreeSet<String> = deps.iter().cloned().collect();
    println!("changing {changed:?} (dependencies of {test})");

    let mut top = Vec::new();
    for mode in [ScoreMode::Sum, ScoreMode::Max] {
        let scores = slice_scores(&matrix, &changed, mode);
        let ranked = select_top_n(&scores, 5, &ledger.universe)?;
        println!("{mode:?}:");
        for t in &ranked {
            println!("  {t:<24} {:.4}", scores.get(t));
        }
        if mode == ScoreMode::Sum {
            top = ranked;
        }
    }
    Ok(top)
}

#[allow(dead_code)]
fn main() -> flipsense::Result<()> {
    run_example().map(|_| ())
}
