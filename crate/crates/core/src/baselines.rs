//! Comparison selectors: seeded random selection, failure-recency scoring
//! and dissimilarity ordering of test identifiers.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::{FlipLedger, History, TestId, Verdict};
use crate::sensitivity::ScoreVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomPolicy {
    pub seed: u64,
    /// Number of independent selections averaged per build.
    pub runs: usize,
}

impl Default for RandomPolicy {
    fn default() -> Self {
        RandomPolicy { seed: 1, runs: 100 }
    }
}

impl RandomPolicy {
    /// Policy with a seed derived from this one and a build ordinal, so
    /// consecutive builds draw independent selections.
    pub fn for_build(&self, seq: usize) -> RandomPolicy {
        RandomPolicy { seed: splitmix64(self.seed ^ splitmix64(seq as u64)), runs: self.runs }
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform sample of `n` tests without replacement. The result depends only on
/// `(seed, run_index)` and the sorted universe.
pub fn random_select(
    universe: &BTreeSet<TestId>,
    n: usize,
    policy: &RandomPolicy,
    run_index: usize,
) -> Result<Vec<TestId>> {
    if n > universe.len() {
        return Err(Error::Argument(format!(
            "cannot pick {n} of {} tests",
            universe.len()
        )));
    }
    if run_index >= policy.runs {
        return Err(Error::Argument(format!(
            "run index {run_index} outside 0..{}",
            policy.runs
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    rng.set_stream(run_index as u64);
    let items: Vec<&TestId> = universe.iter().collect();
    Ok(index::sample(&mut rng, items.len(), n)
        .into_iter()
        .map(|i| items[i].clone())
        .collect())
}

/// Failure-recency score `1 / (1 + g)`, `g` being the number of builds between
/// the test's latest failure before `at_seq` and `at_seq - 1`. Tests that never
/// failed score 0. Every test of the ledger's universe is present.
pub fn hbtp_scores(history: &History, ledger: &FlipLedger, at_seq: usize) -> ScoreVector {
    let mut last_fail: BTreeMap<&str, usize> = BTreeMap::new();
    for rec in history.records().iter().take_while(|r| r.seq < at_seq) {
        for (test, v) in &rec.verdicts {
            if *v == Verdict::Fail {
                last_fail.insert(test.as_str(), rec.seq);
            }
        }
    }
    let scores = ledger
        .universe
        .iter()
        .map(|t| {
            let s = match last_fail.get(t.as_str()) {
                Some(&seq) => 1.0 / (1.0 + (at_seq - 1 - seq) as f64),
                None => 0.0,
            };
            (t.clone(), s)
        })
        .collect();
    ScoreVector::new(scores)
}

/// Tokens of a test identifier, split on `/` and `_`.
pub fn id_tokens(id: &str) -> BTreeSet<&str> {
    id.split(['/', '_']).filter(|s| !s.is_empty()).collect()
}

/// Jaccard distance between the token sets of two identifiers; 0 when both are empty.
pub fn jaccard_distance(a: &str, b: &str) -> f64 {
    let ta = id_tokens(a);
    let tb = id_tokens(b);
    let union = ta.union(&tb).count();
    if union == 0 {
        return 0.0;
    }
    1.0 - ta.intersection(&tb).count() as f64 / union as f64
}

/// Greedy farthest-first ordering under token Jaccard distance.
pub fn dissimilarity_order(candidates: &BTreeSet<TestId>, already_chosen: &[TestId]) -> Vec<TestId> {
    dissimilarity_order_by(candidates, already_chosen, jaccard_distance)
}

/// Farthest-first ordering with a caller-supplied distance. A candidate's
/// distance is its minimum distance to anything chosen so far; the largest
/// wins, ties go to the smaller id. With nothing chosen the smallest id starts.
pub fn dissimilarity_order_by<D>(
    candidates: &BTreeSet<TestId>,
    already_chosen: &[TestId],
    distance: D,
) -> Vec<TestId>
where
    D: Fn(&str, &str) -> f64,
{
    let mut remaining: Vec<&TestId> = candidates.iter().collect();
    let mut nearest: Vec<f64> = remaining
        .iter()
        .map(|c| {
            already_chosen
                .iter()
                .map(|p| distance(c, p))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut out = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        // remaining is in id order, so the first maximum is the smallest id
        let mut best = 0;
        for i in 1..remaining.len() {
            if nearest[i] > nearest[best] {
                best = i;
            }
        }
        let pick = remaining.remove(best);
        nearest.remove(best);
        for (c, d) in remaining.iter().zip(nearest.iter_mut()) {
            *d = d.min(distance(c, pick));
        }
        out.push(pick.clone());
    }
    out
}
