//! Resource-managed scheduling.
//!
//! During office hours, a small selection is looped: sensitivity to the
//! current change set blended with failure recency. After hours, stable tests
//! (those that never flipped) are run under a staleness budget, either by
//! minimising `sum(s_i^2)` where `s_i` counts days since test `i` last ran, or
//! round robin inside a fixed window.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::baselines::dissimilarity_order;
use crate::error::{Error, Result};
use crate::history::{FileId, FlipLedger, History, TestId, Verdict};
use crate::sensitivity::{
    incremental_observe, rank_cmp, select_top_n, slice_scores, PendingChanges, ScoreMode,
    ScoreVector, SensitivityMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StableRule {
    /// Never flipped.
    #[default]
    NeverFlipped,
    /// Never observed failing.
    AlwaysPassed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestState {
    /// Days since the test last ran.
    pub staleness: u64,
    pub stable: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScheduleState {
    pub tests: BTreeMap<TestId, TestState>,
    pub pending: PendingChanges,
}

impl ScheduleState {
    /// Every test of the history, staleness counted in builds since its last
    /// verdict (one build per day).
    pub fn from_history(history: &History, ledger: &FlipLedger, rule: StableRule) -> Self {
        let flipped = ledger.ever_flipped();
        let mut last_run: BTreeMap<&str, usize> = BTreeMap::new();
        let mut failed: BTreeSet<&str> = BTreeSet::new();
        let mut pending = PendingChanges::new();
        for rec in history.records() {
            if rec.seq > 0 {
                incremental_observe(&mut pending, &rec.changed_files);
            }
            for (t, v) in &rec.verdicts {
                last_run.insert(t, rec.seq);
                if *v == Verdict::Fail {
                    failed.insert(t);
                }
                pending.track(t);
                pending.accumulated.get_mut(t).expect("tracked").clear();
                pending.last_verdict.insert(t.clone(), *v);
            }
        }
        let last_seq = history.len() - 1;
        let tests = ledger
            .universe
            .iter()
            .map(|t| {
                let stable = match rule {
                    StableRule::NeverFlipped => !flipped.contains(t),
                    StableRule::AlwaysPassed => !failed.contains(t.as_str()),
                };
                let staleness = (last_seq - last_run[t.as_str()]) as u64;
                (t.clone(), TestState { staleness, stable })
            })
            .collect();
        ScheduleState { tests, pending }
    }

    pub fn with_tests<'a>(staleness: impl IntoIterator<Item = (&'a str, u64)>) -> Self {
        let tests = staleness
            .into_iter()
            .map(|(t, s)| (t.to_string(), TestState { staleness: s, stable: true }))
            .collect();
        ScheduleState { tests, pending: PendingChanges::new() }
    }

    pub fn staleness(&self, test: &str) -> Option<u64> {
        self.tests.get(test).map(|s| s.staleness)
    }

    pub fn stable_tests(&self) -> BTreeSet<TestId> {
        self.tests.iter().filter(|(_, s)| s.stable).map(|(t, _)| t.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// `sum(s_i^2)` over all tracked tests.
pub fn cost(state: &ScheduleState) -> u64 {
    state.tests.values().map(|s| s.staleness * s.staleness).sum()
}

/// Cost after running `executed` and ticking one day.
pub fn cost_after(state: &ScheduleState, executed: &BTreeSet<TestId>) -> u64 {
    cost(&day_tick(state, executed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum StableStrategy {
    CostMin,
    RoundRobin { window_days: u64 },
}

/// Picks up to `budget` stable tests.
///
/// `CostMin` takes the stalest tests. `RoundRobin` takes overdue tests
/// (staleness at least the window) first, then fills from the remaining
/// stable tests grouped by staleness, stalest group first, ordering each group
/// by dissimilarity to what is already picked.
pub fn select_stable(
    state: &ScheduleState,
    budget: usize,
    strategy: StableStrategy,
) -> Result<Vec<TestId>> {
    if budget == 0 {
        return Err(Error::Argument("budget must be at least 1".into()));
    }
    let mut stable: Vec<(&TestId, u64)> = state
        .tests
        .iter()
        .filter(|(_, s)| s.stable)
        .map(|(t, s)| (t, s.staleness))
        .collect();
    stable.sort_by(|a, b| rank_cmp((a.0, a.1 as f64), (b.0, b.1 as f64)));

    match strategy {
        StableStrategy::CostMin => Ok(stable.iter().take(budget).map(|(t, _)| (*t).clone()).collect()),
        StableStrategy::RoundRobin { window_days } => {
            let mut picked: Vec<TestId> = stable
                .iter()
                .filter(|(_, s)| *s >= window_days)
                .take(budget)
                .map(|(t, _)| (*t).clone())
                .collect();
            let mut groups: BTreeMap<u64, BTreeSet<TestId>> = BTreeMap::new();
            for (t, s) in &stable {
                if *s < window_days {
                    groups.entry(*s).or_default().insert((*t).clone());
                }
            }
            for (_, group) in groups.into_iter().rev() {
                if picked.len() >= budget {
                    break;
                }
                let order = dissimilarity_order(&group, &picked);
                let room = budget - picked.len();
                picked.extend(order.into_iter().take(room));
            }
            Ok(picked)
        }
    }
}

/// Ends a day: executed tests go to 0, every other test ages by one.
pub fn day_tick(state: &ScheduleState, executed: &BTreeSet<TestId>) -> ScheduleState {
    let mut next = state.clone();
    for (t, s) in next.tests.iter_mut() {
        s.staleness = if executed.contains(t) { 0 } else { s.staleness + 1 };
    }
    next
}

fn normalised(scores: &ScoreVector) -> BTreeMap<TestId, f64> {
    let max = scores.max();
    scores
        .scores
        .iter()
        .map(|(t, v)| (t.clone(), if max > 0.0 { v / max } else { *v }))
        .collect()
}

/// One office-hours iteration: records the change set in `pending`, then
/// ranks by `w * sensitivity + (1 - w) * recency`, each normalised by its
/// largest entry.
#[allow(clippy::too_many_arguments)]
pub fn office_hours_tick(
    matrix: &SensitivityMatrix,
    pending: &mut PendingChanges,
    changed_files: &BTreeSet<FileId>,
    hbtp: &ScoreVector,
    universe: &BTreeSet<TestId>,
    k: usize,
    weight: f64,
    score_mode: ScoreMode,
) -> Result<Vec<TestId>> {
    if !(0.0..=1.0).contains(&weight) {
        return Err(Error::Argument(format!("blend weight {weight} outside [0, 1]")));
    }
    incremental_observe(pending, changed_files);
    let sens = normalised(&slice_scores(matrix, changed_files, score_mode));
    let hist = normalised(hbtp);
    let mut combined: BTreeMap<TestId, f64> = BTreeMap::new();
    for (t, v) in sens {
        *combined.entry(t).or_default() += weight * v;
    }
    for (t, v) in hist {
        *combined.entry(t).or_default() += (1.0 - weight) * v;
    }
    select_top_n(&ScoreVector::new(combined), k, universe)
}
