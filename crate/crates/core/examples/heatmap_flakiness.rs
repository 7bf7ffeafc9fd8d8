//! Writes the file-by-test heatmap and the flakiness index for a synthetic
//! history, then prints the tests that look least tied to specific files.
//!
//! ```text
//! cargo run -p flipsense --example heatmap_flakiness [out-dir]
//! ```

use std::path::Path;

use flipsense::sensitivity::{export_heatmap, top_files_for_test, FlakinessEntry};
use flipsense::synth::{generate, SynthConfig};
use flipsense::{build_delta, extract_flips, DMode, MatrixConfig, SensitivityMatrix};

pub fn run_example(out_dir: &Path) -> flipsense::Result<Vec<FlakinessEntry>> {
    let out = generate(&SynthConfig { flip_probability_noise: 0.03, ..SynthConfig::default() })?;
    let ledger = extract_flips(&out.history);
    let mut matrix = SensitivityMatrix::new(MatrixConfig::ema(0.2)?);
    for rec in &out.history.records()[1..] {
        matrix.advance(&build_delta(&rec.changed_files, ledger.flipped(rec.seq), DMode::Linear))?;
    }
    matrix.register_tests(&ledger.universe);

    std::fs::create_dir_all(out_dir)?;
    let index = export_heatmap(&matrix, &out_dir.join("heatmap.csv"), &out_dir.join("flakiness.csv"))?;
    println!("wrote heatmap.csv and flakiness.csv to {}", out_dir.display());

    println!("widest-spread tests:");
    for e in index.iter().take(5) {
        println!("  {:<24} fraction {:.3}  mean {:.4}", e.test_id, e.fraction, e.mean_magnitude);
    }
    if let Some(first) = index.first() {
        for (file, v) in top_files_for_test(&matrix, &first.test_id, 3)? {
            println!("  {file} -> {v:.4}");
        }
    }
    Ok(index)
}

#[allow(dead_code)]
fn main() -> flipsense::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "heatmap-out".into());
    run_example(Path::new(&dir)).map(|_| ())
}
