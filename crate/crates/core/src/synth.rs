//! Deterministic synthetic histories with planted file -> test dependencies.
//!
//! Files are spread over a handful of modules (`src/<module>/file_<i>.c`) and
//! tests are named after a module (`<module>_case_<j>`). Each test depends on
//! a random set of files. Every build changes a random set of files and runs
//! every test; a test flips with `flip_probability_hit` when one of its files
//! changed and with `flip_probability_noise` otherwise.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::{FileId, History, TestId, Verdict};

const MODULES: [&str; 8] = ["net", "ui", "storage", "power", "audio", "sensor", "boot", "radio"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_builds: usize,
    pub n_files: usize,
    pub n_tests: usize,
    pub deps_per_test: RangeInclusive<usize>,
    pub change_set_size: RangeInclusive<usize>,
    pub flip_probability_hit: f64,
    pub flip_probability_noise: f64,
    pub initial_fail_fraction: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 1,
            n_builds: 50,
            n_files: 200,
            n_tests: 100,
            deps_per_test: 1..=5,
            change_set_size: 1..=20,
            flip_probability_hit: 0.7,
            flip_probability_noise: 0.01,
            initial_fail_fraction: 0.05,
        }
    }
}

impl SynthConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.n_builds == 0 || self.n_files == 0 || self.n_tests == 0 {
            return bad("builds, files and tests must all be at least 1".into());
        }
        for (name, p) in [
            ("flip_probability_hit", self.flip_probability_hit),
            ("flip_probability_noise", self.flip_probability_noise),
            ("initial_fail_fraction", self.initial_fail_fraction),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} outside [0, 1]"));
            }
        }
        for (name, r) in [("deps_per_test", &self.deps_per_test), ("change_set_size", &self.change_set_size)] {
            if r.is_empty() || *r.start() == 0 {
                return bad(format!("{name} must be a non-empty range of positive sizes"));
            }
            if *r.end() > self.n_files {
                return bad(format!("{name} upper bound {} exceeds {} files", r.end(), self.n_files));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub history: History,
    /// Files each test actually depends on.
    pub ground_truth: BTreeMap<TestId, BTreeSet<FileId>>,
}

impl SynthOutput {
    pub fn ground_truth_json(&self) -> String {
        serde_json::to_string_pretty(&self.ground_truth).expect("map serialises")
    }
}

fn file_name(i: usize, n_files: usize) -> FileId {
    let width = n_files.to_string().len();
    format!("src/{}/file_{i:0width$}.c", MODULES[i % MODULES.len()])
}

fn test_name(j: usize, n_tests: usize) -> TestId {
    let width = n_tests.to_string().len();
    format!("{}_case_{j:0width$}", MODULES[j % MODULES.len()])
}

pub fn generate(config: &SynthConfig) -> Result<SynthOutput> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let files: Vec<FileId> = (0..config.n_files).map(|i| file_name(i, config.n_files)).collect();
    let tests: Vec<TestId> = (0..config.n_tests).map(|j| test_name(j, config.n_tests)).collect();

    let deps: Vec<BTreeSet<usize>> = tests
        .iter()
        .map(|_| {
            let k = rng.gen_range(config.deps_per_test.clone());
            index::sample(&mut rng, config.n_files, k).into_iter().collect()
        })
        .collect();

    let mut verdicts: Vec<Verdict> = tests
        .iter()
        .map(|_| {
            if rng.gen_bool(config.initial_fail_fraction) {
                Verdict::Fail
            } else {
                Verdict::Pass
            }
        })
        .collect();

    let mut builds = Vec::with_capacity(config.n_builds);
    for b in 0..config.n_builds {
        let size = rng.gen_range(config.change_set_size.clone());
        let changed: BTreeSet<usize> = index::sample(&mut rng, config.n_files, size).into_iter().collect();
        if b > 0 {
            for (j, v) in verdicts.iter_mut().enumerate() {
                let hit = deps[j].iter().any(|f| changed.contains(f));
                let p = if hit { config.flip_probability_hit } else { config.flip_probability_noise };
                if rng.gen_bool(p) {
                    *v = match v {
                        Verdict::Pass => Verdict::Fail,
                        Verdict::Fail => Verdict::Pass,
                    };
                }
            }
        }
        let results = tests.iter().cloned().zip(verdicts.iter().copied()).collect();
        let changed_files = changed.iter().map(|&i| files[i].clone()).collect();
        builds.push((format!("build-{b:04}"), changed_files, results));
    }

    let ground_truth = tests
        .iter()
        .zip(&deps)
        .map(|(t, d)| (t.clone(), d.iter().map(|&i| files[i].clone()).collect()))
        .collect();
    Ok(SynthOutput { history: History::from_builds(builds)?, ground_truth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::{extract_flips, ingest_str};

    #[test]
    fn forced_hits_flip_every_build() {
        let cfg = SynthConfig {
            n_builds: 6,
            n_files: 1,
            n_tests: 1,
            deps_per_test: 1..=1,
            change_set_size: 1..=1,
            flip_probability_hit: 1.0,
            flip_probability_noise: 0.0,
            ..SynthConfig::default()
        };
        let out = generate(&cfg).unwrap();
        let ledger = extract_flips(&out.history);
        assert_eq!(ledger.events.len(), 5);
        assert_eq!(ledger.flipped_at.keys().copied().collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn no_flip_probability_means_no_flips() {
        let cfg = SynthConfig { flip_probability_hit: 0.0, flip_probability_noise: 0.0, ..SynthConfig::default() };
        let ledger = extract_flips(&generate(&cfg).unwrap().history);
        assert!(ledger.events.is_empty());
        assert!(ledger.predictable_at.is_empty());
    }

    #[test]
    fn same_seed_same_history() {
        let a = generate(&SynthConfig::default().with_seed(5)).unwrap();
        let b = generate(&SynthConfig::default().with_seed(5)).unwrap();
        assert_eq!(a.history.to_jsonl_string(), b.history.to_jsonl_string());
        assert_eq!(a.ground_truth, b.ground_truth);
        let c = generate(&SynthConfig::default().with_seed(6)).unwrap();
        assert_ne!(a.history.to_jsonl_string(), c.history.to_jsonl_string());
    }

    #[test]
    fn output_reingests() {
        let out = generate(&SynthConfig::default()).unwrap();
        let back = ingest_str(&out.history.to_jsonl_string()).unwrap();
        assert_eq!(back, out.history);
        assert_eq!(back.summary().distinct_tests, 100);
    }

    #[test]
    fn noise_free_flips_are_explained() {
        let cfg = SynthConfig { flip_probability_noise: 0.0, ..SynthConfig::default().with_seed(3) };
        let out = generate(&cfg).unwrap();
        let ledger = extract_flips(&out.history);
        assert!(!ledger.events.is_empty());
        for e in &ledger.events {
            let changed = &out.history.records()[e.seq].changed_files;
            assert!(out.ground_truth[&e.test_id].iter().any(|f| changed.contains(f)));
        }
    }

    #[test]
    fn invalid_configs() {
        let base = SynthConfig::default();
        for cfg in [
            SynthConfig { n_tests: 0, ..base.clone() },
            SynthConfig { flip_probability_hit: 1.5, ..base.clone() },
            SynthConfig { deps_per_test: 1..=500, ..base.clone() },
            SynthConfig { change_set_size: 0..=3, ..base.clone() },
        ] {
            assert!(matches!(generate(&cfg), Err(Error::Validation(_))));
        }
    }
}
