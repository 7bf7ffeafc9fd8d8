//! Build histories: ingestion of line-delimited build records and
//! extraction of flip events and predictable sets.
//!
//! Each input line is one build, in chronological order:
//!
//! ```text
//! {"build": "b17", "changes": ["src/net/tx.c"], "results": {"net_tx_basic": "pass"}}
//! ```
//!
//! A test that has no entry in `results` was not run in that build. Flips are
//! computed against the most recent build in which the test has a verdict, so
//! partial-run histories behave the same as retest-all histories where the
//! gaps are filled by carrying the last verdict forward.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type FileId = String;
pub type TestId = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn parse(raw: &str) -> Option<Verdict> {
        match raw {
            "pass" => Some(Verdict::Pass),
            "fail" => Some(Verdict::Fail),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// One build of the history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildRecord {
    pub build_id: String,
    pub seq: usize,
    /// Files modified since the previous build. Ignored for seq 0.
    pub changed_files: BTreeSet<FileId>,
    /// Verdicts of the tests that ran in this build.
    pub verdicts: BTreeMap<TestId, Verdict>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    build: String,
    changes: Vec<String>,
    results: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct RawRecordOut<'a> {
    build: &'a str,
    changes: &'a BTreeSet<FileId>,
    results: &'a BTreeMap<TestId, Verdict>,
}

/// Counts reported after ingesting a history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistorySummary {
    pub builds: usize,
    pub distinct_files: usize,
    pub distinct_tests: usize,
}

/// A validated, chronologically ordered history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    records: Vec<BuildRecord>,
}

impl History {
    /// Validates already constructed records: contiguous `seq` from 0, unique
    /// build ids, non-empty identifiers, at least one record.
    pub fn new(records: Vec<BuildRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Validation("history is empty".into()));
        }
        let mut seen = HashSet::new();
        for (i, rec) in records.iter().enumerate() {
            if rec.seq != i {
                return Err(Error::Validation(format!(
                    "build {:?} has seq {} at position {i}",
                    rec.build_id, rec.seq
                )));
            }
            if rec.build_id.is_empty() {
                return Err(Error::Validation(format!("empty build id at seq {i}")));
            }
            if !seen.insert(rec.build_id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate build id {:?}",
                    rec.build_id
                )));
            }
            if rec.changed_files.iter().any(String::is_empty) {
                return Err(Error::Validation(format!("empty file id in build {:?}", rec.build_id)));
            }
            if rec.verdicts.keys().any(String::is_empty) {
                return Err(Error::Validation(format!("empty test id in build {:?}", rec.build_id)));
            }
        }
        Ok(History { records })
    }

    /// Convenience constructor assigning `seq` by position.
    pub fn from_builds<I>(builds: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, BTreeSet<FileId>, BTreeMap<TestId, Verdict>)>,
    {
        let records = builds
            .into_iter()
            .enumerate()
            .map(|(seq, (build_id, changed_files, verdicts))| BuildRecord {
                build_id,
                seq,
                changed_files,
                verdicts,
            })
            .collect();
        History::new(records)
    }

    pub fn records(&self) -> &[BuildRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn summary(&self) -> HistorySummary {
        let mut files = HashSet::new();
        let mut tests = HashSet::new();
        for rec in &self.records {
            files.extend(rec.changed_files.iter().map(String::as_str));
            tests.extend(rec.verdicts.keys().map(String::as_str));
        }
        HistorySummary {
            builds: self.records.len(),
            distinct_files: files.len(),
            distinct_tests: tests.len(),
        }
    }

    /// Writes the history in the same line-delimited form [`ingest_history`] reads.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for rec in &self.records {
            let raw = RawRecordOut {
                build: &rec.build_id,
                changes: &rec.changed_files,
                results: &rec.verdicts,
            };
            serde_json::to_writer(&mut out, &raw)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }
}

/// Reads a line-delimited history. Blank lines are skipped; line numbers in
/// errors are 1-based and count blank lines.
pub fn ingest_history<R: BufRead>(reader: R) -> Result<History> {
    let mut records = Vec::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let rec = parse_record(raw, records.len(), line_no)?;
        if let Some(prev) = seen.insert(rec.build_id.clone(), line_no) {
            return Err(Error::Validation(format!(
                "duplicate build id {:?} on lines {prev} and {line_no}",
                rec.build_id
            )));
        }
        records.push(rec);
    }
    History::new(records)
}

pub fn ingest_str(text: &str) -> Result<History> {
    ingest_history(text.as_bytes())
}

fn parse_record(raw: RawRecord, seq: usize, line: usize) -> Result<BuildRecord> {
    let parse_err = |message: String| Error::Parse { line, message };
    if raw.build.is_empty() {
        return Err(parse_err("empty build id".into()));
    }
    let mut changed_files = BTreeSet::new();
    for f in raw.changes {
        if f.is_empty() {
            return Err(parse_err("empty file id in changes".into()));
        }
        changed_files.insert(f);
    }
    let mut verdicts = BTreeMap::new();
    for (test, value) in raw.results {
        if test.is_empty() {
            return Err(parse_err("empty test id in results".into()));
        }
        let Some(v) = Verdict::parse(&value) else {
            return Err(parse_err(format!(
                "test {test:?} has verdict {value:?}; expected \"pass\" or \"fail\""
            )));
        };
        verdicts.insert(test, v);
    }
    Ok(BuildRecord {
        build_id: raw.build,
        seq,
        changed_files,
        verdicts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// pass -> fail
    Broken,
    /// fail -> pass
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipEvent {
    pub seq: usize,
    pub test_id: TestId,
    pub direction: Direction,
}

/// Flip events of a history and the per-build flipped and predictable sets.
///
/// A test is predictable at build `k` when it flipped at `k` and at some
/// earlier build.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlipLedger {
    pub events: Vec<FlipEvent>,
    pub flipped_at: BTreeMap<usize, BTreeSet<TestId>>,
    pub predictable_at: BTreeMap<usize, BTreeSet<TestId>>,
    pub universe: BTreeSet<TestId>,
}

static EMPTY: BTreeSet<TestId> = BTreeSet::new();

impl FlipLedger {
    /// Flipped tests at `seq`; empty when nothing flipped.
    pub fn flipped(&self, seq: usize) -> &BTreeSet<TestId> {
        self.flipped_at.get(&seq).unwrap_or(&EMPTY)
    }

    pub fn predictable(&self, seq: usize) -> &BTreeSet<TestId> {
        self.predictable_at.get(&seq).unwrap_or(&EMPTY)
    }

    /// Tests that flipped at least once anywhere in the history.
    pub fn ever_flipped(&self) -> BTreeSet<TestId> {
        self.events.iter().map(|e| e.test_id.clone()).collect()
    }
}

pub fn extract_flips(history: &History) -> FlipLedger {
    let mut last: BTreeMap<&str, Verdict> = BTreeMap::new();
    let mut has_flipped: HashSet<&str> = HashSet::new();
    let mut ledger = FlipLedger::default();

    for rec in history.records() {
        let mut flipped = BTreeSet::new();
        let mut predictable = BTreeSet::new();
        for (test, &verdict) in &rec.verdicts {
            ledger.universe.insert(test.clone());
            let prev = last.insert(test.as_str(), verdict);
            let direction = match (prev, verdict) {
                (Some(Verdict::Pass), Verdict::Fail) => Direction::Broken,
                (Some(Verdict::Fail), Verdict::Pass) => Direction::Fixed,
                _ => continue,
            };
            ledger.events.push(FlipEvent {
                seq: rec.seq,
                test_id: test.clone(),
                direction,
            });
            if !has_flipped.insert(test.as_str()) {
                predictable.insert(test.clone());
            }
            flipped.insert(test.clone());
        }
        if !flipped.is_empty() {
            ledger.flipped_at.insert(rec.seq, flipped);
        }
        if !predictable.is_empty() {
            ledger.predictable_at.insert(rec.seq, predictable);
        }
    }
    ledger
}

/// Distribution of predictable-set sizes over builds that have any.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictableStats {
    pub builds_with_predictable: usize,
    pub at_most_5: usize,
    pub from_6_to_25: usize,
    pub more_than_25: usize,
}

pub fn predictable_build_stats(ledger: &FlipLedger) -> PredictableStats {
    let mut stats = PredictableStats::default();
    for set in ledger.predictable_at.values().filter(|s| !s.is_empty()) {
        stats.builds_with_predictable += 1;
        match set.len() {
            0..=5 => stats.at_most_5 += 1,
            6..=25 => stats.from_6_to_25 += 1,
            _ => stats.more_than_25 += 1,
        }
    }
    stats
}
