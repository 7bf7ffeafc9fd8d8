use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use flipsense::eval::{replay_sizes, MethodConfig};
use flipsense::history::{extract_flips, ingest_str, History, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BUILDS: usize = 176;
const FILES: usize = 6720;
const TESTS: usize = 1254;

fn large_history() -> History {
    let mut rng = ChaCha8Rng::seed_from_u64(176);
    let tests: Vec<String> = (0..TESTS).map(|j| format!("suite_{}/case_{j:04}", j % 40)).collect();
    let mut state = vec![Verdict::Pass; TESTS];
    let mut builds = Vec::with_capacity(BUILDS);
    for b in 0..BUILDS {
        // spread the files so every one is touched at least once
        let mut changed: BTreeSet<String> = (0..FILES).skip(b).step_by(BUILDS).map(|i| format!("src/f{i:05}.c")).collect();
        for _ in 0..rng.gen_range(0..20) {
            changed.insert(format!("src/f{:05}.c", rng.gen_range(0..FILES)));
        }
        let mut verdicts = BTreeMap::new();
        for (j, t) in tests.iter().enumerate() {
            if rng.gen_bool(0.01) {
                state[j] = if state[j] == Verdict::Pass { Verdict::Fail } else { Verdict::Pass };
            }
            verdicts.insert(t.clone(), state[j]);
        }
        builds.push((format!("build-{b:04}"), changed, verdicts));
    }
    History::from_builds(builds).unwrap()
}

#[test]
fn ingests_a_history_of_industrial_size() {
    let text = large_history().to_jsonl_string();
    let start = Instant::now();
    let history = ingest_str(&text).unwrap();
    let summary = history.summary();
    assert_eq!(summary.builds, BUILDS);
    assert_eq!(summary.distinct_files, FILES);
    assert_eq!(summary.distinct_tests, TESTS);

    let ledger = extract_flips(&history);
    assert!(!ledger.predictable_at.is_empty());
    let reports = replay_sizes(&history, &ledger, &MethodConfig::ema(0.8), &[5, 10, 15, 20, 25]).unwrap();
    assert_eq!(reports.len(), 5);
    assert!(start.elapsed() < Duration::from_secs(60), "{:?}", start.elapsed());
}
