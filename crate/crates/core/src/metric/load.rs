use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::label::OutlierKind;

use super::{metric_by_name, MetricDataset};

#[derive(Debug, Clone)]
pub struct InputOptions {
    /// Read an `n x n` distance matrix instead of feature rows.
    pub distance_matrix: bool,
    /// `Some(true)` forces a trailing label column, `Some(false)` forbids one,
    /// `None` detects it from a header cell named `label`.
    pub labels: Option<bool>,
    /// Metric identifier for feature mode.
    pub metric: String,
}

impl Default for InputOptions {
    fn default() -> Self {
        Self {
            distance_matrix: false,
            labels: None,
            metric: "euclidean".to_string(),
        }
    }
}

#[derive(Debug)]
pub struct LoadedDataset {
    pub dataset: MetricDataset,
    /// Ground-truth labels stripped from the trailing `label` column.
    pub labels: Option<Vec<OutlierKind>>,
    /// Feature rows as read, kept for re-serialization (feature mode only).
    pub rows: Option<Vec<Vec<f64>>>,
}

pub fn load_dataset(path: impl AsRef<Path>, options: &InputOptions) -> Result<LoadedDataset> {
    let mut text = String::new();
    File::open(path.as_ref())?.read_to_string(&mut text)?;
    if options.distance_matrix {
        Ok(LoadedDataset {
            dataset: load_distance_matrix(&text)?,
            labels: None,
            rows: None,
        })
    } else {
        load_features(&text, options)
    }
}

fn records(text: &str) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        out.push(record.iter().map(str::to_string).collect());
    }
    Ok(out)
}

fn parse_cell(cell: &str, row: usize, column: usize) -> Result<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            row,
            column,
            message: format!("'{cell}' is not a finite number"),
        }),
    }
}

/// Parses a feature CSV: optional header, numeric columns, optional trailing label.
pub fn load_features(text: &str, options: &InputOptions) -> Result<LoadedDataset> {
    let records = records(text)?;
    let first = records.first().ok_or(Error::EmptyInput)?;

    // a first row is a header when some cell other than a trailing label fails to parse
    let label_tail = first
        .last()
        .is_some_and(|c| c.parse::<OutlierKind>().is_ok() && c.parse::<f64>().is_err());
    let feature_cells = if label_tail { &first[..first.len() - 1] } else { &first[..] };
    let header_present = feature_cells.iter().any(|c| c.parse::<f64>().is_err());
    let header_label = header_present
        && first
            .last()
            .is_some_and(|c| c.eq_ignore_ascii_case("label"));
    let has_labels = options
        .labels
        .unwrap_or(header_label || (!header_present && label_tail));
    let data_rows = if header_present { &records[1..] } else { &records[..] };
    if data_rows.is_empty() {
        return Err(Error::EmptyInput);
    }

    let width = data_rows[0].len();
    let dim = if has_labels { width.saturating_sub(1) } else { width };
    if dim == 0 {
        return Err(Error::Input("no numeric feature columns".to_string()));
    }

    let row_offset = usize::from(header_present) + 1;
    let mut rows = Vec::with_capacity(data_rows.len());
    let mut labels = Vec::new();
    for (r, record) in data_rows.iter().enumerate() {
        if record.len() != width {
            return Err(Error::Parse {
                row: r + row_offset,
                column: record.len().min(width) + 1,
                message: format!("expected {width} columns, found {}", record.len()),
            });
        }
        let row = record[..dim]
            .iter()
            .enumerate()
            .map(|(c, cell)| parse_cell(cell, r + row_offset, c + 1))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
        if has_labels {
            let cell = &record[dim];
            let kind = cell.parse::<OutlierKind>().map_err(|_| Error::Parse {
                row: r + row_offset,
                column: dim + 1,
                message: format!("'{cell}' is not a valid label"),
            })?;
            labels.push(kind);
        }
    }

    let metric = metric_by_name(&options.metric)
        .ok_or_else(|| Error::Input(format!("unknown metric '{}'", options.metric)))?;
    let dataset = MetricDataset::from_rows_with_metric(&rows, metric)?;
    Ok(LoadedDataset {
        dataset,
        labels: has_labels.then_some(labels),
        rows: Some(rows),
    })
}

/// Parses `n` lines of `n` comma-separated non-negative reals.
pub fn load_distance_matrix(text: &str) -> Result<MetricDataset> {
    let records = records(text)?;
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let rows = records
        .iter()
        .enumerate()
        .map(|(r, record)| {
            record
                .iter()
                .enumerate()
                .map(|(c, cell)| parse_cell(cell, r + 1, c + 1))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    MetricDataset::from_distance_matrix(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_plain_csv() {
        let loaded = load_features("1,2\n3,4\n5,6\n", &InputOptions::default()).unwrap();
        assert_eq!(loaded.dataset.len(), 3);
        assert_eq!(loaded.dataset.dim(), Some(2));
        assert!(loaded.labels.is_none());
    }

    #[test]
    fn strips_label_column() {
        let text = "x,y,label\n0,0,inlier\n3,4,global\n0,1,1\n";
        let loaded = load_features(text, &InputOptions::default()).unwrap();
        assert_eq!(loaded.dataset.dim(), Some(2));
        assert_eq!(
            loaded.labels.unwrap(),
            vec![OutlierKind::Inlier, OutlierKind::Global, OutlierKind::Outlier]
        );
        assert_eq!(loaded.dataset.distance(0, 1), 5.0);
    }

    #[test]
    fn header_without_labels() {
        let loaded = load_features("a,b\n1,2\n", &InputOptions::default()).unwrap();
        assert_eq!(loaded.dataset.len(), 1);
        assert!(loaded.labels.is_none());
    }

    #[test]
    fn reports_bad_cell_position() {
        let err = load_features("1,2\n3,x\n", &InputOptions::default()).unwrap_err();
        match err {
            Error::Parse { row, column, .. } => assert_eq!((row, column), (2, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_input() {
        assert!(matches!(
            load_features("", &InputOptions::default()),
            Err(Error::EmptyInput)
        ));
        assert!(matches!(
            load_features("x,y\n", &InputOptions::default()),
            Err(Error::EmptyInput)
        ));
        assert!(matches!(load_distance_matrix("\n"), Err(Error::EmptyInput)));
    }

    #[test]
    fn loads_matrix() {
        let text = "0,1,2,3\n1,0,1,2\n2,1,0,1\n3,2,1,0\n";
        let ds = load_distance_matrix(text).unwrap();
        assert_eq!(ds.len(), 4);
        assert_eq!(ds.dim(), None);
        assert_eq!(ds.distance(0, 3), 3.0);
    }

    #[test]
    fn matrix_symmetry_violation() {
        let text = "0,1,1\n1,0,3\n1,4,0\n";
        assert!(matches!(
            load_distance_matrix(text),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn unknown_metric() {
        let opts = InputOptions {
            metric: "hamming".into(),
            ..Default::default()
        };
        assert!(load_features("1\n2\n", &opts).is_err());
    }
}
