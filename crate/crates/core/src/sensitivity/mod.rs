//! File/test sensitivity matrices.
//!
//! Every build `k` contributes a delta matrix that credits each changed file
//! with `1 / d(|fc_k|)` toward each test that flipped in that build. The
//! prioritisation matrix is the exponential moving average of the deltas:
//!
//! ```text
//! M_0 = 0
//! M_k = alpha * B_k + (1 - alpha) * M_{k-1}
//! ```
//!
//! With `d = 1` and plain accumulation (`M_k = B_k + M_{k-1}`) the matrix is
//! the co-occurrence count of file changes and test flips, which is the
//! classic change-based selection baseline ([`MatrixConfig::cumulative`]).
//!
//! To rank tests for a new change set, the rows of the changed files are
//! sliced out and each column is reduced by sum or max ([`slice_scores`]).

mod heatmap;
mod incremental;
mod snapshot;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::{FileId, TestId};

pub use heatmap::{
    export_heatmap, flakiness_index, top_files_for_test, write_flakiness_csv, write_heatmap_csv,
    FlakinessEntry,
};
pub use incremental::{incremental_apply, incremental_observe, PendingChanges};
pub use snapshot::{read_snapshot, write_snapshot};

/// Entries below this value are removed after every update.
pub const DEFAULT_DROP_THRESHOLD: f64 = 1e-12;

/// Confidence divisor `d(|fc|)` applied to each delta entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DMode {
    /// `d(n) = n`
    Linear,
    /// `d(n) = 1`
    Constant,
}

impl DMode {
    pub fn weight(self, changed: usize) -> f64 {
        match self {
            DMode::Linear if changed > 0 => 1.0 / changed as f64,
            DMode::Linear => 0.0,
            DMode::Constant => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateMode {
    Ema,
    Cumulative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreMode {
    #[default]
    Sum,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixConfig {
    /// EMA weight of the newest delta. Unused in cumulative mode.
    pub alpha: f64,
    pub d_mode: DMode,
    pub update_mode: UpdateMode,
    /// Set to 0 to keep every positive entry.
    pub drop_threshold: f64,
}

impl MatrixConfig {
    pub fn ema(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Config(format!("alpha {alpha} outside [0, 1]")));
        }
        Ok(MatrixConfig {
            alpha,
            d_mode: DMode::Linear,
            update_mode: UpdateMode::Ema,
            drop_threshold: DEFAULT_DROP_THRESHOLD,
        })
    }

    /// `d = 1`, no EMA coefficients.
    pub fn cumulative() -> Self {
        MatrixConfig {
            alpha: 1.0,
            d_mode: DMode::Constant,
            update_mode: UpdateMode::Cumulative,
            drop_threshold: DEFAULT_DROP_THRESHOLD,
        }
    }

    pub fn with_d_mode(mut self, d_mode: DMode) -> Self {
        self.d_mode = d_mode;
        self
    }

    pub fn with_drop_threshold(mut self, threshold: f64) -> Self {
        self.drop_threshold = threshold;
        self
    }

    fn keep(&self, v: f64) -> bool {
        v > 0.0 && v >= self.drop_threshold
    }
}

/// Per-build delta: a constant block over `files x tests`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityDelta {
    pub d_mode: DMode,
    pub weight: f64,
    pub files: BTreeSet<FileId>,
    pub tests: BTreeSet<TestId>,
}

impl SensitivityDelta {
    pub fn is_empty(&self) -> bool {
        self.files.is_empty() || self.tests.is_empty()
    }

    pub fn get(&self, file: &str, test: &str) -> f64 {
        if self.files.contains(file) && self.tests.contains(test) {
            self.weight
        } else {
            0.0
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&FileId, &TestId, f64)> + '_ {
        self.files
            .iter()
            .flat_map(move |f| self.tests.iter().map(move |t| (f, t, self.weight)))
    }
}

pub fn build_delta(
    changed_files: &BTreeSet<FileId>,
    flipped: &BTreeSet<TestId>,
    d_mode: DMode,
) -> SensitivityDelta {
    SensitivityDelta {
        d_mode,
        weight: d_mode.weight(changed_files.len()),
        files: changed_files.clone(),
        tests: flipped.clone(),
    }
}

/// Sparse non-negative file x test matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityMatrix {
    config: MatrixConfig,
    rows: BTreeMap<FileId, BTreeMap<TestId, f64>>,
    files: BTreeSet<FileId>,
    tests: BTreeSet<TestId>,
    last_seq: usize,
}

impl SensitivityMatrix {
    pub fn new(config: MatrixConfig) -> Self {
        SensitivityMatrix {
            config,
            rows: BTreeMap::new(),
            files: BTreeSet::new(),
            tests: BTreeSet::new(),
            last_seq: 0,
        }
    }

    pub fn config(&self) -> &MatrixConfig {
        &self.config
    }

    /// Number of updates applied so far.
    pub fn last_seq(&self) -> usize {
        self.last_seq
    }

    pub fn get(&self, file: &str, test: &str) -> f64 {
        self.rows
            .get(file)
            .and_then(|r| r.get(test))
            .copied()
            .unwrap_or(0.0)
    }

    /// Sets one entry. Non-positive values remove the entry.
    pub fn insert(&mut self, file: &str, test: &str, value: f64) {
        self.files.insert(file.to_string());
        self.tests.insert(test.to_string());
        if value > 0.0 {
            self.rows
                .entry(file.to_string())
                .or_default()
                .insert(test.to_string(), value);
        } else if let Some(row) = self.rows.get_mut(file) {
            row.remove(test);
            if row.is_empty() {
                self.rows.remove(file);
            }
        }
    }

    /// Every file the matrix has seen, including ones without entries.
    pub fn known_files(&self) -> &BTreeSet<FileId> {
        &self.files
    }

    pub fn known_tests(&self) -> &BTreeSet<TestId> {
        &self.tests
    }

    pub fn register_files<'a>(&mut self, files: impl IntoIterator<Item = &'a FileId>) {
        for f in files {
            if !self.files.contains(f) {
                self.files.insert(f.clone());
            }
        }
    }

    pub fn register_tests<'a>(&mut self, tests: impl IntoIterator<Item = &'a TestId>) {
        for t in tests {
            if !self.tests.contains(t) {
                self.tests.insert(t.clone());
            }
        }
    }

    pub fn nnz(&self) -> usize {
        self.rows.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Stored entries in (file, test) order.
    pub fn entries(&self) -> impl Iterator<Item = (&FileId, &TestId, f64)> + '_ {
        self.rows
            .iter()
            .flat_map(|(f, row)| row.iter().map(move |(t, v)| (f, t, *v)))
    }

    pub fn row(&self, file: &str) -> Option<&BTreeMap<TestId, f64>> {
        self.rows.get(file)
    }

    /// Stored entries of one test's column, in file order.
    pub fn column(&self, test: &str) -> Vec<(FileId, f64)> {
        self.rows
            .iter()
            .filter_map(|(f, row)| row.get(test).map(|v| (f.clone(), *v)))
            .collect()
    }

    /// Folds one build's delta into the matrix.
    pub fn advance(&mut self, delta: &SensitivityDelta) -> Result<()> {
        if delta.d_mode != self.config.d_mode {
            return Err(Error::Config(format!(
                "delta built with d mode {:?}, matrix uses {:?}",
                delta.d_mode, self.config.d_mode
            )));
        }
        self.register_files(&delta.files);
        self.register_tests(&delta.tests);
        match self.config.update_mode {
            UpdateMode::Ema => {
                let alpha = self.config.alpha;
                let decay = 1.0 - alpha;
                for row in self.rows.values_mut() {
                    for v in row.values_mut() {
                        *v *= decay;
                    }
                }
                if !delta.is_empty() && alpha > 0.0 {
                    let add = alpha * delta.weight;
                    for (f, t, _) in delta.entries() {
                        *self.slot(f, t) += add;
                    }
                }
                self.prune();
            }
            UpdateMode::Cumulative => {
                if !delta.is_empty() {
                    for (f, t, w) in delta.entries() {
                        *self.slot(f, t) += w;
                    }
                }
                self.prune();
            }
        }
        self.last_seq += 1;
        Ok(())
    }

    fn slot(&mut self, file: &FileId, test: &TestId) -> &mut f64 {
        if !self.rows.contains_key(file) {
            self.rows.insert(file.clone(), BTreeMap::new());
        }
        let row = self.rows.get_mut(file).expect("row inserted above");
        if !row.contains_key(test) {
            row.insert(test.clone(), 0.0);
        }
        row.get_mut(test).expect("entry inserted above")
    }

    fn prune(&mut self) {
        let cfg = self.config;
        self.rows.retain(|_, row| {
            row.retain(|_, v| cfg.keep(*v));
            !row.is_empty()
        });
    }

    /// Applies `f` to every stored entry of `test`'s column, then prunes that column.
    fn map_column(&mut self, test: &str, mut f: impl FnMut(&FileId, f64) -> f64) {
        let cfg = self.config;
        self.rows.retain(|file, row| {
            if let Some(v) = row.get_mut(test) {
                *v = f(file, *v);
                if !cfg.keep(*v) {
                    row.remove(test);
                }
            }
            !row.is_empty()
        });
    }
}

/// Scores of a set of tests with a deterministic ranking.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub scores: BTreeMap<TestId, f64>,
    /// Score descending, test id ascending.
    pub order: Vec<TestId>,
}

impl ScoreVector {
    pub fn new(scores: BTreeMap<TestId, f64>) -> Self {
        let mut order: Vec<TestId> = scores.keys().cloned().collect();
        order.sort_by(|a, b| rank_cmp((a, scores[a]), (b, scores[b])));
        ScoreVector { scores, order }
    }

    pub fn get(&self, test: &str) -> f64 {
        self.scores.get(test).copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.scores.values().copied().fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Value descending, id ascending.
pub(crate) fn rank_cmp(a: (&str, f64), b: (&str, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0))
}

/// Reduces the rows of `changed_files` column-wise. Files the matrix has
/// never seen contribute nothing.
pub fn slice_scores(
    matrix: &SensitivityMatrix,
    changed_files: &BTreeSet<FileId>,
    mode: ScoreMode,
) -> ScoreVector {
    let mut scores: BTreeMap<TestId, f64> = BTreeMap::new();
    for file in changed_files {
        let Some(row) = matrix.row(file) else { continue };
        for (test, &v) in row {
            match scores.get_mut(test) {
                Some(s) => match mode {
                    ScoreMode::Sum => *s += v,
                    ScoreMode::Max => *s = s.max(v),
                },
                None => {
                    scores.insert(test.clone(), v);
                }
            }
        }
    }
    ScoreVector::new(scores)
}

/// Picks `min(n, |universe|)` tests: positive scores first in rank order,
/// then the remaining universe members by id.
pub fn select_top_n(
    scores: &ScoreVector,
    n: usize,
    universe: &BTreeSet<TestId>,
) -> Result<Vec<TestId>> {
    if n == 0 {
        return Err(Error::Argument("selection size must be at least 1".into()));
    }
    let mut picked: Vec<TestId> = scores
        .order
        .iter()
        .filter(|t| scores.scores[*t] > 0.0)
        .take(n)
        .cloned()
        .collect();
    if picked.len() < n {
        let chosen: BTreeSet<&TestId> = picked.iter().collect();
        let fill: Vec<TestId> = universe
            .iter()
            .filter(|t| !chosen.contains(t))
            .take(n - picked.len())
            .cloned()
            .collect();
        picked.extend(fill);
    }
    Ok(picked)
}

/// Prefix-stable ranking of a whole universe: `select_top_n(.., k, ..)` is the
/// first `k` elements of this list.
pub fn full_ranking(scores: &ScoreVector, universe: &BTreeSet<TestId>) -> Vec<TestId> {
    let n = universe.len() + scores.len();
    if n == 0 {
        return Vec::new();
    }
    select_top_n(scores, n, universe).expect("n is positive")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn delta_linear_splits_weight() {
        let d = build_delta(&set(&["f1", "f2"]), &set(&["t3"]), DMode::Linear);
        assert_eq!(d.get("f1", "t3"), 0.5);
        assert_eq!(d.get("f2", "t3"), 0.5);
        assert_eq!(d.entries().count(), 2);
    }

    #[test]
    fn delta_empty_sides() {
        assert!(build_delta(&set(&[]), &set(&["t"]), DMode::Linear).is_empty());
        assert!(build_delta(&set(&["f"]), &set(&[]), DMode::Linear).is_empty());
        assert_eq!(build_delta(&set(&[]), &set(&["t"]), DMode::Linear).entries().count(), 0);
    }

    #[test]
    fn delta_constant_all_ones() {
        let d = build_delta(&set(&["f1", "f2", "f3"]), &set(&["t1", "t2"]), DMode::Constant);
        let vals: Vec<f64> = d.entries().map(|e| e.2).collect();
        assert_eq!(vals, vec![1.0; 6]);
    }

    #[test]
    fn alpha_one_equals_delta() {
        let mut m = SensitivityMatrix::new(MatrixConfig::ema(1.0).unwrap());
        m.advance(&build_delta(&set(&["a", "b"]), &set(&["t1"]), DMode::Linear)).unwrap();
        let d = build_delta(&set(&["c", "d", "e", "f"]), &set(&["t2"]), DMode::Linear);
        m.advance(&d).unwrap();
        let got: Vec<_> = m.entries().map(|(f, t, v)| (f.clone(), t.clone(), v)).collect();
        let want: Vec<_> = d.entries().map(|(f, t, v)| (f.clone(), t.clone(), v)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn alpha_zero_stays_zero() {
        let mut m = SensitivityMatrix::new(MatrixConfig::ema(0.0).unwrap());
        for _ in 0..5 {
            m.advance(&build_delta(&set(&["a"]), &set(&["t"]), DMode::Linear)).unwrap();
        }
        assert!(m.is_empty());
        assert_eq!(m.last_seq(), 5);
    }

    #[test]
    fn ema_step_value() {
        let mut m = SensitivityMatrix::new(MatrixConfig::ema(0.8).unwrap());
        m.insert("f1", "t", 0.5);
        m.insert("f3", "t", 0.5);
        // four changed files -> delta entry 0.25
        let d = build_delta(&set(&["f1", "f2", "f4", "f5"]), &set(&["t"]), DMode::Linear);
        m.advance(&d).unwrap();
        assert!((m.get("f1", "t") - 0.3).abs() < 1e-15);
        assert!((m.get("f3", "t") - 0.1).abs() < 1e-15);
    }

    #[test]
    fn d_mode_mismatch_is_config_error() {
        let mut m = SensitivityMatrix::new(MatrixConfig::ema(0.5).unwrap());
        let d = build_delta(&set(&["f"]), &set(&["t"]), DMode::Constant);
        assert!(matches!(m.advance(&d), Err(Error::Config(_))));
        assert!(MatrixConfig::ema(1.5).is_err());
    }

    #[test]
    fn cumulative_counts() {
        let mut m = SensitivityMatrix::new(MatrixConfig::cumulative());
        for _ in 0..3 {
            m.advance(&build_delta(&set(&["f", "g"]), &set(&["t"]), DMode::Constant)).unwrap();
        }
        assert_eq!(m.get("f", "t"), 3.0);
        assert_eq!(m.get("g", "t"), 3.0);
    }

    #[test]
    fn drop_threshold_prunes() {
        let cfg = MatrixConfig::ema(0.5).unwrap().with_drop_threshold(0.2);
        let mut m = SensitivityMatrix::new(cfg);
        m.advance(&build_delta(&set(&["f"]), &set(&["t"]), DMode::Linear)).unwrap();
        assert_eq!(m.get("f", "t"), 0.5);
        m.advance(&build_delta(&set(&[]), &set(&[]), DMode::Linear)).unwrap();
        assert_eq!(m.get("f", "t"), 0.25);
        m.advance(&build_delta(&set(&[]), &set(&[]), DMode::Linear)).unwrap();
        assert!(m.is_empty());
        assert!(m.known_files().contains("f"));
    }

    fn worked_matrix() -> SensitivityMatrix {
        let mut m = SensitivityMatrix::new(MatrixConfig::ema(0.8).unwrap());
        m.insert("f1", "t1", 0.4);
        m.insert("f2", "t1", 0.1);
        m.insert("f2", "t2", 0.3);
        m
    }

    #[test]
    fn slice_sum_and_max() {
        let m = worked_matrix();
        let fc = set(&["f1", "f2"]);
        let s = slice_scores(&m, &fc, ScoreMode::Sum);
        assert!((s.get("t1") - 0.5).abs() < 1e-15);
        assert_eq!(s.get("t2"), 0.3);
        assert_eq!(s.order, vec!["t1", "t2"]);
        let s = slice_scores(&m, &fc, ScoreMode::Max);
        assert_eq!(s.get("t1"), 0.4);
        assert_eq!(s.get("t2"), 0.3);
        let s = slice_scores(&m, &set(&["unknown"]), ScoreMode::Sum);
        assert!(s.is_empty());
        assert_eq!(s.get("t1"), 0.0);
    }

    #[test]
    fn top_n_rules() {
        let uni = set(&["a", "b", "c"]);
        let sv = ScoreVector::new([("a".into(), 0.5), ("b".into(), 0.3)].into());
        assert_eq!(select_top_n(&sv, 1, &uni).unwrap(), vec!["a"]);
        let sv = ScoreVector::new([("b".into(), 0.5), ("a".into(), 0.5)].into());
        assert_eq!(select_top_n(&sv, 1, &uni).unwrap(), vec!["a"]);
        let sv = ScoreVector::new([("a".into(), 0.5)].into());
        assert_eq!(select_top_n(&sv, 3, &uni).unwrap(), vec!["a", "b", "c"]);
        assert_eq!(select_top_n(&sv, 10, &uni).unwrap().len(), 3);
        assert!(matches!(select_top_n(&sv, 0, &uni), Err(Error::Argument(_))));
    }

    #[test]
    fn top_n_fill_exhaustive() {
        // Every subset of positive scores over a 4-test universe, every n.
        let names = ["a", "b", "c", "d"];
        let uni = set(&names);
        for mask in 0u32..16 {
            let scores: BTreeMap<String, f64> = names
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(i, n)| (n.to_string(), 1.0 / (i as f64 + 1.0)))
                .collect();
            let sv = ScoreVector::new(scores.clone());
            for n in 1..=5 {
                let got = select_top_n(&sv, n, &uni).unwrap();
                assert_eq!(got.len(), n.min(4));
                let distinct: BTreeSet<_> = got.iter().collect();
                assert_eq!(distinct.len(), got.len());
                // positives come first, in index order since score decreases with index
                let positives: Vec<&str> =
                    names.iter().copied().filter(|t| scores.contains_key(*t)).collect();
                let zeros: Vec<&str> =
                    names.iter().copied().filter(|t| !scores.contains_key(*t)).collect();
                let expected: Vec<&str> =
                    positives.iter().chain(zeros.iter()).copied().take(n).collect();
                assert_eq!(got, expected, "mask {mask} n {n}");
            }
        }
    }
}
