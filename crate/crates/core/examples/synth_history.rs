//! Generates a synthetic history with known file dependencies and writes it
//! in the line-delimited history format.
//!
//! ```text
//! cargo run -p flipsense --example synth_history [seed] > history.jsonl
//! ```

use std::io::Write;

use flipsense::synth::{generate, SynthConfig, SynthOutput};

pub fn run_example<W: Write>(seed: u64, out: W) -> flipsense::Result<SynthOutput> {
    let config = SynthConfig { n_builds: 30, n_files: 50, n_tests: 20, ..SynthConfig::default() }.with_seed(seed);
    let synth = generate(&config)?;
    synth.history.write_jsonl(out)?;
    let s = synth.history.summary();
    eprintln!("{} builds, {} files, {} tests", s.builds, s.distinct_files, s.distinct_tests);
    Ok(synth)
}

#[allow(dead_code)]
fn main() -> flipsense::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    run_example(seed, std::io::stdout().lock()).map(|_| ())
}
