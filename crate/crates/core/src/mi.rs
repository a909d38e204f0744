//! Mutual information between discretized variables.
//!
//! Pipeline: pool all values of an [`ExpressionMatrix`], choose global
//! equal-width bins ([`fd_bin_count`] or [`DiscretizationScheme::equal_width`]),
//! [`discretize`] every row, then for each pair build a K×K
//! [`ContingencyTable`] and estimate MI from the joint cell frequencies with
//! [`mi_from_table`].

use std::io::Read;

use rayon::prelude::*;

use crate::entropy::{entropy_plugin, EstimatorKind};
use crate::error::{invalid, Error, Result};
use crate::freq::{CountVector, FrequencyVector};
use crate::network::MiGraph;

/// G variables × n samples, with one label per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionMatrix {
    names: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl ExpressionMatrix {
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != rows.len() {
            return Err(invalid(format!(
                "{} names for {} rows",
                names.len(),
                rows.len()
            )));
        }
        if rows.len() < 2 {
            return Err(invalid("need at least two variables"));
        }
        let n = rows[0].len();
        if n < 2 {
            return Err(invalid("need at least two samples"));
        }
        for (name, row) in names.iter().zip(&rows) {
            if row.len() != n {
                return Err(invalid(format!(
                    "variable `{name}` has {} samples, expected {n}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(invalid(format!("variable `{name}` has a non-finite value")));
            }
        }
        Ok(Self { names, rows })
    }

    /// Reads CSV: first column is the variable name, the rest are samples.
    pub fn from_csv<R: Read>(reader: R, has_header: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(has_header)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut names = Vec::new();
        let mut rows = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            if record.is_empty() || (record.len() == 1 && record[0].is_empty()) {
                continue;
            }
            let mut fields = record.iter();
            names.push(fields.next().unwrap_or_default().to_string());
            let row = fields
                .map(|f| {
                    f.parse::<f64>().map_err(|_| {
                        Error::Format(format!("record {}: `{f}` is not a number", line + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::new(names, rows).map_err(|e| match e {
            Error::InvalidInput(m) => Error::Format(m),
            other => other,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn n_vars(&self) -> usize {
        self.rows.len()
    }

    pub fn n_samples(&self) -> usize {
        self.rows[0].len()
    }

    pub fn pooled_values(&self) -> Vec<f64> {
        self.rows.iter().flatten().copied().collect()
    }
}

/// Global equal-width bins: `K + 1` strictly increasing edges.
///
/// Intervals are right-open except the last, which is closed.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizationScheme {
    edges: Vec<f64>,
}

impl DiscretizationScheme {
    pub fn from_edges(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 3 {
            return Err(invalid("need at least two bins (three edges)"));
        }
        if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("bin edges must be finite and strictly increasing"));
        }
        Ok(Self { edges })
    }

    /// `levels` equal-width bins spanning `[min, max]`.
    pub fn equal_width(min: f64, max: f64, levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(invalid("need at least two levels"));
        }
        if !(min < max) {
            return Err(Error::DegenerateData(format!(
                "range [{min}, {max}] is empty"
            )));
        }
        let width = (max - min) / levels as f64;
        let mut edges: Vec<f64> = (0..levels).map(|i| min + i as f64 * width).collect();
        edges.push(max);
        Self::from_edges(edges)
    }

    /// Equal-width scheme over the pooled range of every value in the matrix.
    pub fn for_matrix(matrix: &ExpressionMatrix, levels: usize) -> Result<Self> {
        let (min, max) = min_max(&matrix.pooled_values());
        Self::equal_width(min, max, levels)
    }

    pub fn levels(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Bin index of `x`; values outside the edges go to the boundary bins.
    pub fn bin(&self, x: f64) -> usize {
        let k = self.levels();
        if x <= self.edges[0] {
            return 0;
        }
        if x >= self.edges[k] {
            return k - 1;
        }
        self.edges.partition_point(|&e| e <= x) - 1
    }
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// Linear-interpolation quantile of sorted data (`(N-1) q` positions).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Freedman-Diaconis binning over pooled values.
///
/// Width `h = 2 IQR N^{-1/3}`, `K = ceil((max - min) / h)` with at least two
/// levels, edges equally spaced from min to max.
pub fn fd_bin_count(values: &[f64]) -> Result<DiscretizationScheme> {
    if values.len() < 2 {
        return Err(Error::DegenerateData("need at least two values".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("values must be finite"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    if !(iqr > 0.0) {
        return Err(Error::DegenerateData(
            "interquartile range is zero; Freedman-Diaconis width undefined".into(),
        ));
    }
    let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let levels = (((max - min) / width).ceil() as usize).max(2);
    DiscretizationScheme::equal_width(min, max, levels)
}

/// Integer level matrix produced by [`discretize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteMatrix {
    pub levels: usize,
    pub rows: Vec<Vec<usize>>,
}

pub fn discretize(matrix: &ExpressionMatrix, scheme: &DiscretizationScheme) -> DiscreteMatrix {
    DiscreteMatrix {
        levels: scheme.levels(),
        rows: matrix
            .rows()
            .iter()
            .map(|row| row.iter().map(|&v| scheme.bin(v)).collect())
            .collect(),
    }
}

/// K×K joint counts for a pair of discrete variables, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    levels: usize,
    cells: Vec<u64>,
}

impl ContingencyTable {
    pub fn from_cells(levels: usize, cells: Vec<u64>) -> Result<Self> {
        if levels == 0 || cells.len() != levels * levels {
            return Err(invalid(format!(
                "{} cells do not form a {levels}x{levels} table",
                cells.len()
            )));
        }
        Ok(Self { levels, cells })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.cells[i * self.levels + j]
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().sum()
    }

    pub fn flatten(&self) -> CountVector {
        CountVector::new(self.cells.clone()).expect("table has at least one cell")
    }

    pub fn row_margins(&self) -> Vec<u64> {
        self.cells.chunks(self.levels).map(|r| r.iter().sum()).collect()
    }

    pub fn col_margins(&self) -> Vec<u64> {
        (0..self.levels)
            .map(|j| (0..self.levels).map(|i| self.get(i, j)).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let k = self.levels;
        let mut cells = vec![0; k * k];
        for i in 0..k {
            for j in 0..k {
                cells[j * k + i] = self.cells[i * k + j];
            }
        }
        Self { levels: k, cells }
    }
}

/// Cross-tabulates two level sequences of equal length.
pub fn pair_table(x: &[usize], y: &[usize], levels: usize) -> Result<ContingencyTable> {
    if x.len() != y.len() {
        return Err(invalid(format!(
            "variables have {} and {} samples",
            x.len(),
            y.len()
        )));
    }
    let mut cells = vec![0u64; levels * levels];
    for (&a, &b) in x.iter().zip(y) {
        if a >= levels || b >= levels {
            return Err(invalid(format!("level out of range for K = {levels}")));
        }
        cells[a * levels + b] += 1;
    }
    ContingencyTable::from_cells(levels, cells)
}

/// `H(X) + H(Y) - H(X,Y)` from a joint frequency estimate on the flattened table.
///
/// Marginals are sums of the estimated joint. The table and its transpose are
/// evaluated in one canonical orientation so the result is exactly symmetric.
pub fn mi_from_table(table: &ContingencyTable, estimator: &EstimatorKind) -> Result<f64> {
    if !estimator.produces_frequencies() {
        return Err(Error::UnsupportedEstimator(format!(
            "{estimator} has no frequency estimate; MI needs ml, bayes or shrink"
        )));
    }
    let transposed = table.transpose();
    let canonical = if transposed.cells < table.cells {
        &transposed
    } else {
        table
    };
    let joint = estimator.frequencies(&canonical.flatten())?;
    Ok(mi_from_joint(&joint, canonical.levels))
}

fn mi_from_joint(joint: &FrequencyVector, k: usize) -> f64 {
    let probs = joint.probs();
    let rows: Vec<f64> = probs.chunks(k).map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..k).map(|j| (0..k).map(|i| probs[i * k + j]).sum()).collect();
    let h = |v: Vec<f64>| entropy_plugin(&FrequencyVector::from_raw(v));
    // exact independence can round to a tiny negative value
    (h(rows) + h(cols) - entropy_plugin(joint)).max(0.0)
}

/// Normal-theory MI for correlation `ρ`: `-½ log(1 - ρ²)`.
pub fn gaussian_mi(rho: f64) -> Result<f64> {
    if !(rho.abs() < 1.0) {
        return Err(Error::Domain(format!("|rho| must be < 1, got {rho}")));
    }
    Ok(-0.5 * (1.0 - rho * rho).ln())
}

/// MI for every unordered pair of variables, as a complete graph.
pub fn mi_all_pairs(
    matrix: &ExpressionMatrix,
    scheme: &DiscretizationScheme,
    estimator: &EstimatorKind,
) -> Result<MiGraph> {
    mi_all_pairs_with(matrix, scheme, estimator, true)
}

/// As [`mi_all_pairs`], choosing serial or parallel evaluation. Results are identical.
pub fn mi_all_pairs_with(
    matrix: &ExpressionMatrix,
    scheme: &DiscretizationScheme,
    estimator: &EstimatorKind,
    parallel: bool,
) -> Result<MiGraph> {
    if !estimator.produces_frequencies() {
        return Err(Error::UnsupportedEstimator(format!(
            "{estimator} has no frequency estimate"
        )));
    }
    let d = discretize(matrix, scheme);
    let g = matrix.n_vars();
    let pairs: Vec<(usize, usize)> = (0..g)
        .flat_map(|i| (i + 1..g).map(move |j| (i, j)))
        .collect();
    let one = |&(i, j): &(usize, usize)| {
        let t = pair_table(&d.rows[i], &d.rows[j], d.levels)?;
        mi_from_table(&t, estimator)
    };
    let weights: Vec<f64> = if parallel {
        pairs.par_iter().map(one).collect::<Result<_>>()?
    } else {
        pairs.iter().map(one).collect::<Result<_>>()?
    };
    MiGraph::from_upper_triangle(matrix.names().to_vec(), weights)
}
