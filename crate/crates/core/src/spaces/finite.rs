use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance used for every metric-axiom check.
pub const METRIC_TOL: f64 = 1e-12;

/// A single failed metric axiom, with the offending indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    NonFinite { i: usize, j: usize },
    Negative { i: usize, j: usize },
    NonzeroDiagonal { i: usize },
    ZeroDistance { i: usize, j: usize },
    Asymmetric { i: usize, j: usize },
    /// d(i,k) > d(i,j) + d(j,k)
    Triangle { i: usize, j: usize, k: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NonFinite { i, j } => write!(f, "non-finite entry at ({i},{j})"),
            Violation::Negative { i, j } => write!(f, "negative entry at ({i},{j})"),
            Violation::NonzeroDiagonal { i } => write!(f, "nonzero diagonal at ({i},{i})"),
            Violation::ZeroDistance { i, j } => write!(f, "zero distance between distinct points ({i},{j})"),
            Violation::Asymmetric { i, j } => write!(f, "asymmetric pair ({i},{j})"),
            Violation::Triangle { i, j, k } => write!(f, "triangle inequality fails at ({i},{j},{k})"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricReport {
    pub violations: Vec<Violation>,
}

impl MetricReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (idx, v) in self.violations.iter().enumerate() {
            if idx > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every metric axiom and lists all violations.
///
/// Fails only when the input is not square.
pub fn validate_metric(rows: &[Vec<f64>]) -> Result<MetricReport> {
    let n = rows.len();
    for (row, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NonSquare {
                row,
                len: r.len(),
                expected: n,
            });
        }
    }
    let mut report = MetricReport::default();
    let mut finite = true;
    for i in 0..n {
        for j in 0..n {
            let d = rows[i][j];
            if !d.is_finite() {
                report.violations.push(Violation::NonFinite { i, j });
                finite = false;
                continue;
            }
            if i == j {
                if d != 0.0 {
                    report.violations.push(Violation::NonzeroDiagonal { i });
                }
                continue;
            }
            if d < 0.0 {
                report.violations.push(Violation::Negative { i, j });
            } else if d == 0.0 {
                report.violations.push(Violation::ZeroDistance { i, j });
            }
            if i < j && (d - rows[j][i]).abs() > METRIC_TOL {
                report.violations.push(Violation::Asymmetric { i, j });
            }
        }
    }
    if !finite {
        return Ok(report);
    }
    for i in 0..n {
        for k in (i + 1)..n {
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                if rows[i][k] > rows[i][j] + rows[j][k] + METRIC_TOL {
                    report.violations.push(Violation::Triangle { i, j, k });
                }
            }
        }
    }
    Ok(report)
}

/// A finite metric space with opaque point labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    n: usize,
    dist: Vec<f64>,
}

impl FiniteMetricSpace {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if labels.len() != rows.len() {
            return Err(Error::Parse(format!(
                "{} labels for {} rows",
                labels.len(),
                rows.len()
            )));
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty distance matrix".into()));
        }
        let report = validate_metric(&rows)?;
        if !report.is_valid() {
            return Err(Error::InvalidMetric(report));
        }
        let n = rows.len();
        Ok(Self {
            labels,
            n,
            dist: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a space with labels `x0, x1, ...`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..rows.len()).map(|i| format!("x{i}")).collect();
        Self::new(labels, rows)
    }

    pub fn singleton() -> Self {
        Self {
            labels: vec!["x0".into()],
            n: 1,
            dist: vec![0.0],
        }
    }

    pub(crate) fn from_trusted(labels: Vec<String>, dist: Vec<f64>) -> Self {
        let n = labels.len();
        debug_assert_eq!(dist.len(), n * n);
        Self { labels, n, dist }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Smallest nonzero distance.
    pub fn min_distance(&self) -> Option<f64> {
        self.dist
            .iter()
            .copied()
            .filter(|&d| d > 0.0)
            .min_by(f64::total_cmp)
    }

    /// Restriction of the metric to the given points, in the given order.
    pub fn subspace(&self, indices: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        for &i in indices {
            if i >= self.n || seen[i] {
                return Err(Error::OutOfRange(format!("subspace index {i}")));
            }
            seen[i] = true;
        }
        if indices.is_empty() {
            return Err(Error::OutOfRange("empty subspace".into()));
        }
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        let dist = indices
            .iter()
            .flat_map(|&i| indices.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.dist(i, j))
            .collect();
        Ok(Self::from_trusted(labels, dist))
    }
}
