//! Heat-map export and a per-test flakiness reading of the matrix.
//!
//! A test that is weakly sensitive to most files is more likely reacting to
//! noise than to a handful of related files. The flakiness index reports, per
//! test, the fraction of known files with a nonzero entry and the mean
//! magnitude of those entries.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{rank_cmp, SensitivityMatrix};
use crate::error::{Error, Result};
use crate::history::{FileId, TestId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlakinessEntry {
    pub test_id: TestId,
    pub fraction: f64,
    pub mean_magnitude: f64,
}

/// Rounds to 6 significant digits and prints the shortest representation.
pub(crate) fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{v:.5e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Rows are files, columns are tests; absent entries print as 0.
pub fn write_heatmap_csv<W: Write>(matrix: &SensitivityMatrix, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let tests: Vec<&TestId> = matrix.known_tests().iter().collect();
    let mut header = vec!["file"];
    header.extend(tests.iter().map(|t| t.as_str()));
    w.write_record(&header).map_err(csv_err)?;
    for file in matrix.known_files() {
        let row = matrix.row(file);
        let mut rec = vec![file.clone()];
        rec.extend(tests.iter().map(|t| {
            sig6(row.and_then(|r| r.get(*t)).copied().unwrap_or(0.0))
        }));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Sorted by fraction descending, then test id.
pub fn flakiness_index(matrix: &SensitivityMatrix) -> Vec<FlakinessEntry> {
    let n_files = matrix.known_files().len();
    let mut out: Vec<FlakinessEntry> = matrix
        .known_tests()
        .iter()
        .map(|test| {
            let col = matrix.column(test);
            let fraction = if n_files == 0 { 0.0 } else { col.len() as f64 / n_files as f64 };
            let mean_magnitude = if col.is_empty() {
                0.0
            } else {
                col.iter().map(|(_, v)| v).sum::<f64>() / col.len() as f64
            };
            FlakinessEntry { test_id: test.clone(), fraction, mean_magnitude }
        })
        .collect();
    out.sort_by(|a, b| rank_cmp((&a.test_id, a.fraction), (&b.test_id, b.fraction)));
    out
}

pub fn write_flakiness_csv<W: Write>(entries: &[FlakinessEntry], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["test_id", "fraction", "mean_magnitude"]).map_err(csv_err)?;
    for e in entries {
        w.write_record([e.test_id.clone(), sig6(e.fraction), sig6(e.mean_magnitude)])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the heat map and the flakiness index to two files and returns the index.
pub fn export_heatmap(
    matrix: &SensitivityMatrix,
    heatmap_path: &Path,
    flakiness_path: &Path,
) -> Result<Vec<FlakinessEntry>> {
    write_heatmap_csv(matrix, BufWriter::new(File::create(heatmap_path)?))?;
    let index = flakiness_index(matrix);
    write_flakiness_csv(&index, BufWriter::new(File::create(flakiness_path)?))?;
    Ok(index)
}

/// The `k` files with the largest entries in `test`'s column.
pub fn top_files_for_test(
    matrix: &SensitivityMatrix,
    test: &str,
    k: usize,
) -> Result<Vec<(FileId, f64)>> {
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    let mut col = matrix.column(test);
    col.sort_by(|a, b| rank_cmp((&a.0, a.1), (&b.0, b.1)));
    col.truncate(k);
    Ok(col)
}
