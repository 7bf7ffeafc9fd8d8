//! Reads a build history, reports its size, and lists the flip events and
//! the builds that have predictable tests.
//!
//! ```text
//! cargo run -p flipsense --example ingest_and_flips [history.jsonl]
//! ```

use flipsense::history::Direction;
use flipsense::{extract_flips, ingest_history, ingest_str, predictable_build_stats, FlipLedger};

const DEMO: &str = r#"{"build":"b0","changes":[],"results":{"net_tx":"pass","net_rx":"pass","fs_open":"pass"}}
{"build":"b1","changes":["src/net/tx.c"],"results":{"net_tx":"fail","net_rx":"pass","fs_open":"pass"}}
{"build":"b2","changes":["src/net/tx.c","src/fs/open.c"],"results":{"net_tx":"pass","fs_open":"fail"}}
{"build":"b3","changes":["src/fs/open.c"],"results":{"net_tx":"pass","net_rx":"pass","fs_open":"pass"}}
{"build":"b4","changes":["src/net/tx.c"],"results":{"net_tx":"fail","net_rx":"fail","fs_open":"pass"}}
"#;

pub fn run_example(text: Option<&str>) -> flipsense::Result<FlipLedger> {
    let history = ingest_str(text.unwrap_or(DEMO))?;
    let s = history.summary();
    println!("{} builds, {} files, {} tests", s.builds, s.distinct_files, s.distinct_tests);

    let ledger = extract_flips(&history);
    for e in &ledger.events {
        let dir = match e.direction {
            Direction::Broken => "broken",
            Direction::Fixed => "fixed",
        };
        println!("build {:>3}: {} {dir}", e.seq, e.test_id);
    }
    for (seq, tests) in &ledger.predictable_at {
        println!("build {seq} predictable: {tests:?}");
    }
    let stats = predictable_build_stats(&ledger);
    println!("{} builds with predictable tests", stats.builds_with_predictable);
    Ok(ledger)
}

#[allow(dead_code)]
fn main() -> flipsense::Result<()> {
    match std::env::args().nth(1) {
        Some(path) => {
            let file = std::io::BufReader::new(std::fs::File::open(path)?);
            let text = ingest_history(file)?.to_jsonl_string();
            run_example(Some(&text)).map(|_| ())
        }
        None => run_example(None).map(|_| ()),
    }
}
