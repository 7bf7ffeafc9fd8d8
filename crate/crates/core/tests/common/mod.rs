//! Naive reference implementations used as test oracles. Nothing here calls
//! into the library's matrix, ranking or flip code.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use flipsense::history::{History, Verdict};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn file_id(i: usize) -> String {
    format!("f{i:02}")
}

pub fn test_id(j: usize) -> String {
    format!("t{j:02}")
}

/// One random build: changed file indices and flipped test indices.
#[derive(Debug, Clone)]
pub struct RawDelta {
    pub files: BTreeSet<usize>,
    pub tests: BTreeSet<usize>,
}

pub fn random_subset(rng: &mut ChaCha8Rng, n: usize, density: f64) -> BTreeSet<usize> {
    (0..n).filter(|_| rng.gen_bool(density)).collect()
}

pub fn random_deltas(rng: &mut ChaCha8Rng) -> (usize, usize, Vec<RawDelta>) {
    let n_files = rng.gen_range(1..=50);
    let n_tests = rng.gen_range(1..=30);
    let builds = rng.gen_range(1..=20);
    let fd = rng.gen_range(0.0..0.3);
    let td = rng.gen_range(0.0..0.3);
    let deltas = (0..builds)
        .map(|_| RawDelta {
            files: random_subset(rng, n_files, fd),
            tests: random_subset(rng, n_tests, td),
        })
        .collect();
    (n_files, n_tests, deltas)
}

pub fn names(ids: &BTreeSet<usize>, f: fn(usize) -> String) -> BTreeSet<String> {
    ids.iter().map(|&i| f(i)).collect()
}

/// `alpha * sum_j (1 - alpha)^(k - j) * B_j` with `d(n) = n`, evaluated densely.
pub fn ema_closed_form(n_files: usize, n_tests: usize, deltas: &[RawDelta], alpha: f64) -> Vec<Vec<f64>> {
    let k = deltas.len();
    let mut out = vec![vec![0.0; n_tests]; n_files];
    for (j, d) in deltas.iter().enumerate() {
        if d.files.is_empty() {
            continue;
        }
        let b = 1.0 / d.files.len() as f64;
        let w = alpha * (1.0 - alpha).powi((k - 1 - j) as i32);
        for &f in &d.files {
            for &t in &d.tests {
                out[f][t] += w * b;
            }
        }
    }
    out
}

/// Number of builds in which file `f` changed while test `t` flipped.
pub fn cooccurrence_counts(n_files: usize, n_tests: usize, deltas: &[RawDelta]) -> Vec<Vec<u64>> {
    let mut out = vec![vec![0u64; n_tests]; n_files];
    for d in deltas {
        for f in 0..n_files {
            for t in 0..n_tests {
                if d.files.contains(&f) && d.tests.contains(&t) {
                    out[f][t] += 1;
                }
            }
        }
    }
    out
}

/// Verdict table: `table[build][test]`, `None` = not run.
pub type VerdictTable = Vec<Vec<Option<Verdict>>>;

pub fn random_verdict_table(rng: &mut ChaCha8Rng, builds: usize, tests: usize, absent: f64, flip: f64) -> VerdictTable {
    let mut current: Vec<Verdict> = (0..tests)
        .map(|_| if rng.gen_bool(0.5) { Verdict::Pass } else { Verdict::Fail })
        .collect();
    (0..builds)
        .map(|_| {
            (0..tests)
                .map(|t| {
                    if rng.gen_bool(flip) {
                        current[t] = match current[t] {
                            Verdict::Pass => Verdict::Fail,
                            Verdict::Fail => Verdict::Pass,
                        };
                    }
                    (!rng.gen_bool(absent)).then_some(current[t])
                })
                .collect()
        })
        .collect()
}

pub fn history_from_table(table: &VerdictTable, changes: &[BTreeSet<String>]) -> History {
    History::from_builds(table.iter().enumerate().map(|(b, row)| {
        let verdicts = row
            .iter()
            .enumerate()
            .filter_map(|(t, v)| v.map(|v| (test_id(t), v)))
            .collect();
        let fc = changes.get(b).cloned().unwrap_or_default();
        (format!("b{b}"), fc, verdicts)
    }))
    .expect("valid history")
}

/// (flipped_at, predictable_at, events as (seq, test, broken?)) by a direct scan.
#[allow(clippy::type_complexity)]
pub fn naive_flips(
    table: &VerdictTable,
) -> (
    BTreeMap<usize, BTreeSet<String>>,
    BTreeMap<usize, BTreeSet<String>>,
    Vec<(usize, String, bool)>,
) {
    let tests = table.first().map_or(0, Vec::len);
    let mut flipped: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    let mut predictable: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    let mut events = Vec::new();
    for t in 0..tests {
        let mut last: Option<Verdict> = None;
        let mut count = 0;
        for (b, row) in table.iter().enumerate() {
            let Some(v) = row[t] else { continue };
            if let Some(prev) = last {
                if prev != v {
                    flipped.entry(b).or_default().insert(test_id(t));
                    if count > 0 {
                        predictable.entry(b).or_default().insert(test_id(t));
                    }
                    events.push((b, test_id(t), v == Verdict::Fail));
                    count += 1;
                }
            }
            last = Some(v);
        }
    }
    events.sort();
    (flipped, predictable, events)
}

/// Naive replay of the decayed-sensitivity method with a dense matrix:
/// returns the number of zero-intersection builds per selection size.
pub fn naive_zero_counts(
    changes: &[BTreeSet<usize>],
    flipped: &[BTreeSet<usize>],
    predictable: &[BTreeSet<usize>],
    n_files: usize,
    n_tests: usize,
    alpha: f64,
    sizes: &[usize],
) -> Vec<usize> {
    let mut m = vec![vec![0.0f64; n_tests]; n_files];
    let mut zeros = vec![0; sizes.len()];
    for k in 1..changes.len() {
        if !predictable[k].is_empty() {
            let mut score = vec![0.0f64; n_tests];
            for &f in &changes[k] {
                for (t, s) in score.iter_mut().enumerate() {
                    if m[f][t] > 0.0 {
                        *s += m[f][t];
                    }
                }
            }
            // positive scores by (score desc, id asc), then zeros by id
            let mut positive: Vec<usize> = (0..n_tests).filter(|&t| score[t] > 0.0).collect();
            positive.sort_by(|&a, &b| score[b].partial_cmp(&score[a]).unwrap().then(a.cmp(&b)));
            let rest: Vec<usize> = (0..n_tests).filter(|&t| score[t] <= 0.0).collect();
            let ranking: Vec<usize> = positive.into_iter().chain(rest).collect();
            for (i, &n) in sizes.iter().enumerate() {
                if !ranking.iter().take(n).any(|t| predictable[k].contains(t)) {
                    zeros[i] += 1;
                }
            }
        }
        let w = if changes[k].is_empty() { 0.0 } else { 1.0 / changes[k].len() as f64 };
        for (f, row) in m.iter_mut().enumerate() {
            for (t, v) in row.iter_mut() .enumerate() {
                *v *= 1.0 - alpha;
                if alpha > 0.0 && !flipped[k].is_empty() && changes[k].contains(&f) && flipped[k].contains(&t) {
                    *v += alpha * w;
                }
                if *v < 1e-12 {
                    *v = 0.0;
                }
            }
        }
    }
    zeros
}
