//! Test-wise updates for pipelines that do not run every test on every build.
//!
//! Each test accumulates the files changed since it last ran. When it runs
//! again its column is updated once: blended with a delta over the
//! accumulated files if the verdict flipped, decayed by `1 - alpha` otherwise.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{SensitivityMatrix, UpdateMode};
use crate::error::{Error, Result};
use crate::history::{FileId, TestId, Verdict};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendingChanges {
    /// Files changed since each tracked test last ran.
    pub accumulated: BTreeMap<TestId, BTreeSet<FileId>>,
    pub last_verdict: BTreeMap<TestId, Verdict>,
}

impl PendingChanges {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn track(&mut self, test: &str) {
        self.accumulated.entry(test.to_string()).or_default();
    }

    pub fn pending_for(&self, test: &str) -> Option<&BTreeSet<FileId>> {
        self.accumulated.get(test)
    }
}

pub fn incremental_observe(pending: &mut PendingChanges, changed_files: &BTreeSet<FileId>) {
    if changed_files.is_empty() {
        return;
    }
    for files in pending.accumulated.values_mut() {
        files.extend(changed_files.iter().cloned());
    }
}

/// Folds the verdicts of `executed` into their columns. Tests that did not
/// run are untouched. Fails without modifying anything if an executed test
/// has no verdict.
pub fn incremental_apply(
    matrix: &mut SensitivityMatrix,
    pending: &mut PendingChanges,
    executed: &BTreeSet<TestId>,
    verdicts: &BTreeMap<TestId, Verdict>,
) -> Result<()> {
    if let Some(missing) = executed.iter().find(|t| !verdicts.contains_key(*t)) {
        return Err(Error::Argument(format!("executed test {missing:?} has no verdict")));
    }
    let cfg = *matrix.config();
    for test in executed {
        let verdict = verdicts[test];
        let prev = pending.last_verdict.insert(test.clone(), verdict);
        let files = std::mem::take(pending.accumulated.entry(test.clone()).or_default());
        let flipped = matches!(prev, Some(p) if p != verdict);
        matrix.register_tests([test]);

        let decay = match cfg.update_mode {
            UpdateMode::Ema => 1.0 - cfg.alpha,
            UpdateMode::Cumulative => 1.0,
        };
        if decay != 1.0 {
            matrix.map_column(test, |_, v| v * decay);
        }
        if flipped && !files.is_empty() {
            let w = cfg.d_mode.weight(files.len());
            let add = match cfg.update_mode {
                UpdateMode::Ema => cfg.alpha * w,
                UpdateMode::Cumulative => w,
            };
            matrix.register_files(&files);
            if add > 0.0 {
                for f in &files {
                    let v = matrix.get(f, test) + add;
                    matrix.insert(f, test, v);
                }
            }
        }
    }
    matrix.last_seq += 1;
    Ok(())
}
