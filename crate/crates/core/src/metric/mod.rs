//! Uniform, counted access to pairwise distances.
//!
//! A [`MetricDataset`] either owns feature vectors and a [`Metric`], or a
//! validated symmetric distance matrix. Every off-diagonal lookup bumps an
//! atomic counter, so complexity measurements are mode-independent.

mod load;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};

pub use load::{load_dataset, load_distance_matrix, load_features, InputOptions, LoadedDataset};

/// Symmetry tolerance applied to distance matrices at load time.
pub const MATRIX_SYMMETRY_TOL: f64 = 1e-9;

/// A distance function over feature vectors.
pub trait Metric: Send + Sync {
    fn name(&self) -> &str;
    fn distance(&self, a: &[f64], b: &[f64]) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl Metric for Euclidean {
    fn name(&self) -> &str {
        "euclidean"
    }

    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Manhattan;

impl Metric for Manhattan {
    fn name(&self) -> &str {
        "manhattan"
    }

    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Chebyshev;

impl Metric for Chebyshev {
    fn name(&self) -> &str {
        "chebyshev"
    }

    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// Looks up one of the built-in metrics by identifier.
pub fn metric_by_name(name: &str) -> Option<Arc<dyn Metric>> {
    match name.to_ascii_lowercase().as_str() {
        "euclidean" | "l2" => Some(Arc::new(Euclidean)),
        "manhattan" | "l1" | "cityblock" => Some(Arc::new(Manhattan)),
        "chebyshev" | "linf" => Some(Arc::new(Chebyshev)),
        _ => None,
    }
}

/// L2 distance between two equal-length vectors.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::Dimension {
            expected: 1,
            found: 0,
        });
    }
    Ok(Euclidean.distance(a, b))
}

enum Source {
    Features {
        values: Vec<f64>,
        dim: usize,
        metric: Arc<dyn Metric>,
    },
    Matrix {
        values: Vec<f64>,
    },
}

pub struct MetricDataset {
    n: usize,
    source: Source,
    calls: AtomicU64,
}

impl fmt::Debug for MetricDataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("MetricDataset");
        s.field("n", &self.n);
        match &self.source {
            Source::Features { dim, metric, .. } => {
                s.field("dim", dim).field("metric", &metric.name());
            }
            Source::Matrix { .. } => {
                s.field("metric", &"precomputed");
            }
        }
        s.field("calls", &self.distance_calls()).finish()
    }
}

impl MetricDataset {
    /// Builds a feature-mode dataset with the Euclidean metric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows_with_metric(rows, Arc::new(Euclidean))
    }

    pub fn from_rows_with_metric(rows: &[Vec<f64>], metric: Arc<dyn Metric>) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyInput)?;
        let dim = first.len();
        let mut values = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_flat(values, dim, metric)
    }

    /// Builds a feature-mode dataset from a row-major buffer of `n * dim` values.
    pub fn from_flat(values: Vec<f64>, dim: usize, metric: Arc<dyn Metric>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension {
                expected: 1,
                found: 0,
            });
        }
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !values.len().is_multiple_of(dim) {
            return Err(Error::Input(format!(
                "buffer of {} values is not a multiple of dimension {dim}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite feature value at row {}, column {}",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self {
            n: values.len() / dim,
            source: Source::Features { values, dim, metric },
            calls: AtomicU64::new(0),
        })
    }

    /// Builds a distance-mode dataset. The matrix must be square, non-negative,
    /// zero on the diagonal and symmetric within [`MATRIX_SYMMETRY_TOL`]; the
    /// stored matrix is the exact symmetric average of the input.
    pub fn from_distance_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let mut values = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Validation(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Validation(format!(
                        "entry ({i},{j}) = {v} is not a non-negative real"
                    )));
                }
            }
            values.extend_from_slice(row);
        }
        for i in 0..n {
            if values[i * n + i] > MATRIX_SYMMETRY_TOL {
                return Err(Error::Validation(format!(
                    "diagonal entry ({i},{i}) = {} is not zero",
                    values[i * n + i]
                )));
            }
            values[i * n + i] = 0.0;
            for j in (i + 1)..n {
                let a = values[i * n + j];
                let b = values[j * n + i];
                if (a - b).abs() > MATRIX_SYMMETRY_TOL {
                    return Err(Error::Validation(format!(
                        "matrix is not symmetric: ({i},{j}) = {a} but ({j},{i}) = {b}"
                    )));
                }
                let mean = 0.5 * (a + b);
                values[i * n + j] = mean;
                values[j * n + i] = mean;
            }
        }
        Ok(Self {
            n,
            source: Source::Matrix { values },
            calls: AtomicU64::new(0),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Feature dimension, or `None` for a precomputed matrix.
    pub fn dim(&self) -> Option<usize> {
        match &self.source {
            Source::Features { dim, .. } => Some(*dim),
            Source::Matrix { .. } => None,
        }
    }

    pub fn metric_name(&self) -> &str {
        match &self.source {
            Source::Features { metric, .. } => metric.name(),
            Source::Matrix { .. } => "precomputed",
        }
    }

    /// Feature vector of object `i` (feature mode only).
    pub fn point(&self, i: usize) -> Option<&[f64]> {
        match &self.source {
            Source::Features { values, dim, .. } if i < self.n => {
                Some(&values[i * dim..(i + 1) * dim])
            }
            _ => None,
        }
    }

    /// Distance between objects `i` and `j`.
    ///
    /// Counts one evaluation whenever `i != j`. Panics if an index is out of
    /// range; see [`MetricDataset::checked_distance`] for the fallible form.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        assert!(
            i < self.n && j < self.n,
            "object index out of range: ({i}, {j}) with n = {}",
            self.n
        );
        if i == j {
            return 0.0;
        }
        self.calls.fetch_add(1, Ordering::Relaxed);
        match &self.source {
            Source::Features { values, dim, metric } => {
                // canonical argument order keeps d(i,j) == d(j,i) bit-exact
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                metric.distance(&values[a * dim..(a + 1) * dim], &values[b * dim..(b + 1) * dim])
            }
            Source::Matrix { values } => values[i * self.n + j],
        }
    }

    pub fn checked_distance(&self, i: usize, j: usize) -> Result<f64> {
        for index in [i, j] {
            if index >= self.n {
                return Err(Error::OutOfBounds { index, n: self.n });
            }
        }
        Ok(self.distance(i, j))
    }

    /// Number of off-diagonal distance evaluations so far.
    pub fn distance_calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// Returns a copy of this dataset with every pairwise distance multiplied by `factor`.
    /// Feature mode scales the coordinates, which is exact for homogeneous metrics.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::Input(format!("scale factor {factor} must be positive")));
        }
        match &self.source {
            Source::Features { values, dim, metric } => Self::from_flat(
                values.iter().map(|v| v * factor).collect(),
                *dim,
                metric.clone(),
            ),
            Source::Matrix { values } => Ok(Self {
                n: self.n,
                source: Source::Matrix {
                    values: values.iter().map(|v| v * factor).collect(),
                },
                calls: AtomicU64::new(0),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_examples() {
        assert_eq!(euclidean_distance(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(euclidean_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        let d = euclidean_distance(&[1.0, 1.0, 1.0], &[2.0, 2.0, 2.0]).unwrap();
        assert!((d - 3f64.sqrt()).abs() < 1e-15);
        assert!((d - 1.732_050_8).abs() < 1e-7);
    }

    #[test]
    fn euclidean_rejects_length_mismatch() {
        assert!(matches!(
            euclidean_distance(&[0.0], &[1.0, 2.0]),
            Err(Error::Dimension { .. })
        ));
        assert!(euclidean_distance(&[], &[]).is_err());
    }

    #[test]
    fn diagonal_does_not_count() {
        let ds = MetricDataset::from_rows(&[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(ds.distance(1, 1), 0.0);
        assert_eq!(ds.distance_calls(), 0);
        assert_eq!(ds.distance(0, 1), 5.0);
        assert_eq!(ds.distance(1, 0), 5.0);
        assert_eq!(ds.distance_calls(), 2);
    }

    #[test]
    fn matrix_lookup_is_symmetric() {
        let n = 8;
        let mut rows = vec![vec![0.0; n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if i != j {
                    *v = (i + j) as f64;
                }
            }
        }
        rows[2][7] = 1.25;
        rows[7][2] = 1.25;
        let ds = MetricDataset::from_distance_matrix(&rows).unwrap();
        assert_eq!(ds.distance(7, 2), 1.25);
        assert_eq!(ds.distance(5, 5), 0.0);
        assert_eq!(ds.distance_calls(), 1);
    }

    #[test]
    fn matrix_averages_within_tolerance() {
        let rows = vec![vec![0.0, 1.0], vec![1.0 + 5e-10, 0.0]];
        let ds = MetricDataset::from_distance_matrix(&rows).unwrap();
        assert_eq!(ds.distance(0, 1), ds.distance(1, 0));
        assert!((ds.distance(0, 1) - (1.0 + 2.5e-10)).abs() < 1e-15);
    }

    #[test]
    fn matrix_rejects_asymmetry_and_negatives() {
        let asym = vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 3.0],
            vec![2.0, 4.0, 0.0],
        ];
        assert!(matches!(
            MetricDataset::from_distance_matrix(&asym),
            Err(Error::Validation(_))
        ));
        let neg = vec![vec![0.0, -1.0], vec![-1.0, 0.0]];
        assert!(MetricDataset::from_distance_matrix(&neg).is_err());
        let diag = vec![vec![1.0, 1.0], vec![1.0, 0.0]];
        assert!(MetricDataset::from_distance_matrix(&diag).is_err());
    }

    #[test]
    fn checked_distance_bounds() {
        let ds = MetricDataset::from_rows(&[vec![1.0]]).unwrap();
        assert!(matches!(
            ds.checked_distance(0, 1),
            Err(Error::OutOfBounds { index: 1, n: 1 })
        ));
    }

    #[test]
    fn counter_is_exact_under_concurrency() {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64]).collect();
        let ds = MetricDataset::from_rows(&rows).unwrap();
        std::thread::scope(|s| {
            for t in 0..4 {
                let ds = &ds;
                s.spawn(move || {
                    for k in 0..1000 {
                        ds.distance(t, 10 + k % 40);
                    }
                });
            }
        });
        assert_eq!(ds.distance_calls(), 4000);
    }

    #[test]
    fn builtin_metrics_by_name() {
        let l1 = metric_by_name("manhattan").unwrap();
        assert_eq!(l1.distance(&[0.0, 0.0], &[3.0, 4.0]), 7.0);
        let linf = metric_by_name("chebyshev").unwrap();
        assert_eq!(linf.distance(&[0.0, 0.0], &[3.0, 4.0]), 4.0);
        assert!(metric_by_name("cosine").is_none());
    }
}
