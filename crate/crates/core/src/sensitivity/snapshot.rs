//! Line-delimited matrix snapshots.
//!
//! The first line carries the configuration and the known file/test sets,
//! each following line one `(file, test, value)` entry.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{MatrixConfig, SensitivityMatrix};
use crate::error::{Error, Result};
use crate::history::{FileId, TestId};

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Line {
    Meta {
        config: MatrixConfig,
        last_seq: usize,
        files: BTreeSet<FileId>,
        tests: BTreeSet<TestId>,
    },
    Entry {
        file: FileId,
        test: TestId,
        value: f64,
    },
}

pub fn write_snapshot<W: Write>(matrix: &SensitivityMatrix, mut out: W) -> Result<()> {
    let meta = Line::Meta {
        config: matrix.config,
        last_seq: matrix.last_seq,
        files: matrix.files.clone(),
        tests: matrix.tests.clone(),
    };
    serde_json::to_writer(&mut out, &meta)?;
    out.write_all(b"\n")?;
    for (file, test, value) in matrix.entries() {
        let line = Line::Entry { file: file.clone(), test: test.clone(), value };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_snapshot<R: BufRead>(reader: R) -> Result<SensitivityMatrix> {
    let mut matrix: Option<SensitivityMatrix> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&line)
            .map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
        match (parsed, matrix.as_mut()) {
            (Line::Meta { config, last_seq, files, tests }, None) => {
                let mut m = SensitivityMatrix::new(config);
                m.last_seq = last_seq;
                m.files = files;
                m.tests = tests;
                matrix = Some(m);
            }
            (Line::Entry { file, test, value }, Some(m)) => {
                if !(value.is_finite() && value > 0.0) {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("entry value {value} is not positive"),
                    });
                }
                m.insert(&file, &test, value);
            }
            (Line::Meta { .. }, Some(_)) => {
                return Err(Error::Parse { line: line_no, message: "repeated meta line".into() })
            }
            (Line::Entry { .. }, None) => {
                return Err(Error::Parse { line: line_no, message: "entry before meta line".into() })
            }
        }
    }
    matrix.ok_or_else(|| Error::Validation("snapshot is empty".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensitivity::{build_delta, DMode};

    #[test]
    fn snapshot_round_trip_is_exact() {
        let mut m = SensitivityMatrix::new(MatrixConfig::ema(0.8).unwrap());
        let fc: BTreeSet<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let fl: BTreeSet<String> = ["t1", "t2"].iter().map(|s| s.to_string()).collect();
        m.advance(&build_delta(&fc, &fl, DMode::Linear)).unwrap();
        m.advance(&build_delta(&fc, &BTreeSet::new(), DMode::Linear)).unwrap();
        m.register_files(&["never".to_string()]);
        let mut buf = Vec::new();
        write_snapshot(&m, &mut buf).unwrap();
        let back = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back, m);
        let mut again = Vec::new();
        write_snapshot(&back, &mut again).unwrap();
        assert_eq!(again, buf);
    }

    #[test]
    fn malformed_snapshots() {
        assert!(matches!(read_snapshot("".as_bytes()), Err(Error::Validation(_))));
        let entry_first = r#"{"kind":"entry","file":"f","test":"t","value":0.5}"#;
        assert!(matches!(read_snapshot(entry_first.as_bytes()), Err(Error::Parse { line: 1, .. })));
    }
}
