//! Sweeps the EMA weight over a coarse grid and prints how many builds each
//! setting leaves without a single predictable test in the selection.
//!
//! ```text
//! cargo run -p flipsense --example alpha_sweep [seed]
//! ```

use flipsense::eval::{sweep_alpha, AlphaSweep};
use flipsense::synth::{generate, SynthConfig};
use flipsense::{extract_flips, DMode, ScoreMode};

pub fn run_example(seed: u64) -> flipsense::Result<AlphaSweep> {
    let out = generate(&SynthConfig::default().with_seed(seed))?;
    let ledger = extract_flips(&out.history);
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let sweep = sweep_alpha(&out.history, &ledger, &grid, &[5, 10, 15, 20, 25], DMode::Linear, ScoreMode::Sum)?;
    print!("{}", sweep.to_csv());
    println!("best alpha: {}", sweep.best_alpha);
    Ok(sweep)
}

#[allow(dead_code)]
fn main() -> flipsense::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    run_example(seed).map(|_| ())
}
