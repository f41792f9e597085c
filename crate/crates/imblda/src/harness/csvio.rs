//! CSV dataset ingestion and emission. RFC-4180-style with a header row;
//! '.' is the decimal separator.

use std::path::Path;

use crate::error::{Error, Result};
use crate::estimators::LabeledDataset;

/// Reads a rectangular numeric CSV into a dataset.
///
/// The label column (values 1 or 2) is located by header name; the
/// remaining columns become features in header order.
pub fn load_csv_dataset(path: &Path, label_column: &str) -> Result<LabeledDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| csv_error(path, None, e))?;

    let headers = reader
        .headers()
        .map_err(|e| csv_error(path, None, e))?
        .clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            row: None,
            column: Some(label_column.to_string()),
            message: format!(
                "label column not found; header has: {}",
                headers.iter().collect::<Vec<_>>().join(", ")
            ),
        })?;

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        // data rows are 1-based in messages; the header is row 0
        let row_no = row_idx + 1;
        let record = record.map_err(|e| csv_error(path, Some(row_no), e))?;
        let mut features = Vec::with_capacity(record.len().saturating_sub(1));
        let mut label = None;
        for (col_idx, field) in record.iter().enumerate() {
            if col_idx == label_idx {
                label = Some(match field.trim() {
                    "1" => 1u8,
                    "2" => 2u8,
                    other => {
                        return Err(Error::Label {
                            row: row_no,
                            value: other.to_string(),
                        })
                    }
                });
            } else {
                let value: f64 = field.trim().parse().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    row: Some(row_no),
                    column: Some(headers.get(col_idx).unwrap_or("?").to_string()),
                    message: format!("not a number: {field:?}"),
                })?;
                features.push(value);
            }
        }
        let label = label.ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            row: Some(row_no),
            column: Some(label_column.to_string()),
            message: "missing label field".into(),
        })?;
        rows.push(features);
        labels.push(label);
    }
    LabeledDataset::from_rows(rows, labels)
}

/// Reads a rectangular numeric CSV where every column is a feature.
/// Returns the rows and the shared width.
pub fn load_csv_features(path: &Path) -> Result<(Vec<Vec<f64>>, usize)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| csv_error(path, None, e))?;
    let headers = reader
        .headers()
        .map_err(|e| csv_error(path, None, e))?
        .clone();
    let p = headers.len();
    let mut rows = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row_no = row_idx + 1;
        let record = record.map_err(|e| csv_error(path, Some(row_no), e))?;
        let mut features = Vec::with_capacity(p);
        for (col_idx, field) in record.iter().enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                row: Some(row_no),
                column: Some(headers.get(col_idx).unwrap_or("?").to_string()),
                message: format!("not a number: {field:?}"),
            })?;
            features.push(value);
        }
        rows.push(features);
    }
    Ok((rows, p))
}

fn csv_error(path: &Path, row: Option<usize>, e: csv::Error) -> Error {
    let row = row.or_else(|| {
        e.position()
            .map(|pos| pos.record() as usize)
    });
    Error::Parse {
        path: path.to_path_buf(),
        row,
        column: None,
        message: e.to_string(),
    }
}

/// Writes a dataset back out with feature headers x1..xp and the given
/// label column last. Floats use the shortest round-trip representation.
pub fn write_csv_dataset(path: &Path, d: &LabeledDataset, label_column: &str) -> Result<()> {
    let mut out = String::new();
    for j in 0..d.p() {
        out.push_str(&format!("x{},", j + 1));
    }
    out.push_str(label_column);
    out.push('\n');
    for i in 0..d.n() {
        for v in d.row(i) {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{}\n", d.label(i)));
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn round_trip_recovers_ds4() {
        let d = crate::estimators::ds4();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds4.csv");
        write_csv_dataset(&path, &d, "y").unwrap();
        let back = load_csv_dataset(&path, "y").unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn label_outside_one_two_is_rejected() {
        let f = write_temp("a,b,y\n1.0,2.0,1\n3.0,4.0,3\n");
        let err = load_csv_dataset(f.path(), "y").unwrap_err();
        match err {
            Error::Label { row, value } => {
                assert_eq!(row, 2);
                assert_eq!(value, "3");
            }
            other => panic!("expected label error, got {other}"),
        }
    }

    #[test]
    fn ragged_row_reports_its_index() {
        let f = write_temp("a,b,y\n1.0,2.0,1\n3.0,2\n5.0,6.0,2\n");
        let err = load_csv_dataset(f.path(), "y").unwrap_err();
        match err {
            Error::Parse { row, .. } => assert_eq!(row, Some(2)),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn missing_label_column_lists_header() {
        let f = write_temp("a,b\n1.0,2.0\n");
        let err = load_csv_dataset(f.path(), "y").unwrap_err();
        match err {
            Error::Parse { message, .. } => assert!(message.contains("a, b")),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn non_numeric_feature_reports_row_and_column() {
        let f = write_temp("a,b,y\n1.0,oops,1\n2.0,3.0,2\n");
        let err = load_csv_dataset(f.path(), "y").unwrap_err();
        match err {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, Some(1));
                assert_eq!(column.as_deref(), Some("b"));
            }
            other => panic!("expected parse error, got {other}"),
        }
    }
}
