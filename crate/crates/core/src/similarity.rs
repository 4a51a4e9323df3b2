//! Pairwise similarity matrices over a series: time order (`St`), seasonal
//! period (`Sp`), exogenous predictors (`Sx`) and their weighted sum (`Sw`).

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Matrix, TimeSeriesDataset};
use crate::distance::{self, Metric};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SimilarityKind {
    St,
    Sp,
    Sx,
    Sw,
    /// Any externally supplied similarity matrix.
    Custom,
}

impl fmt::Display for SimilarityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SimilarityKind::St => "St",
            SimilarityKind::Sp => "Sp",
            SimilarityKind::Sx => "Sx",
            SimilarityKind::Sw => "Sw",
            SimilarityKind::Custom => "custom",
        };
        f.pad(name)
    }
}

/// Dense symmetric `n x n` similarity matrix with unit diagonal and entries
/// in `(0, 1]`. Accessors take 0-based storage positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    kind: SimilarityKind,
    n: usize,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    /// Wraps row-major values after checking symmetry, the unit diagonal and
    /// the `(0, 1]` range.
    pub fn from_values(kind: SimilarityKind, n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::LengthMismatch {
                what: "similarity values",
                expected: n * n,
                found: values.len(),
            });
        }
        for i in 0..n {
            if values[i * n + i] != 1.0 {
                return Err(Error::InvalidSimilarityMatrix(format!(
                    "diagonal entry {} is {}",
                    i + 1,
                    values[i * n + i]
                )));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(v > 0.0 && v <= 1.0) {
                    return Err(Error::InvalidSimilarityMatrix(format!(
                        "entry ({}, {}) = {v} is outside (0, 1]",
                        i + 1,
                        j + 1
                    )));
                }
                if v != values[j * n + i] {
                    return Err(Error::InvalidSimilarityMatrix(format!(
                        "entries ({0}, {1}) and ({1}, {0}) differ",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { kind, n, values })
    }

    fn from_upper(kind: SimilarityKind, n: usize, upper: Vec<Vec<f64>>) -> Self {
        let mut values = vec![1.0; n * n];
        for (i, row) in upper.into_iter().enumerate() {
            for (offset, v) in row.into_iter().enumerate() {
                let j = i + 1 + offset;
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Self { kind, n, values }
    }

    pub fn kind(&self) -> SimilarityKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n + col]
    }

    /// Row `i`; by symmetry also column `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Leading `m x m` block, i.e. the matrix over the first `m` observations.
    pub fn truncated(&self, m: usize) -> Result<Self> {
        if m > self.n || m == 0 {
            return Err(Error::InvalidConfig(format!(
                "cannot truncate a {0}x{0} matrix to {m}x{m}",
                self.n
            )));
        }
        let mut values = Vec::with_capacity(m * m);
        for i in 0..m {
            values.extend_from_slice(&self.row(i)[..m]);
        }
        Ok(Self {
            kind: self.kind,
            n: m,
            values,
        })
    }
}

/// Non-negative weights for `St`, `Sp` and `Sx`, normalized to sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightTriple {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl WeightTriple {
    /// Normalizes `(alpha, beta, gamma)` by their sum. A warning is logged
    /// when the raw sum is not already 1 (within 1e-9).
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let raw = [alpha, beta, gamma];
        if raw.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeights(format!(
                "weights must be finite and non-negative, got {alpha}, {beta}, {gamma}"
            )));
        }
        let sum = alpha + beta + gamma;
        if sum == 0.0 {
            return Err(Error::InvalidWeights("all weights are zero".into()));
        }
        if (sum - 1.0).abs() > 1e-9 {
            log::warn!("weights {alpha}, {beta}, {gamma} sum to {sum}; normalizing to 1");
        }
        Ok(Self {
            alpha: alpha / sum,
            beta: beta / sum,
            gamma: gamma / sum,
        })
    }

    /// Wraps weights that were normalized by construction.
    pub(crate) fn from_normalized(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }
}

/// `S_t` entries `1 / (1 + |t_i - t_j|)`.
pub fn st_matrix(t: &[i64]) -> Result<SimilarityMatrix> {
    if t.is_empty() {
        return Err(Error::Empty("time orders"));
    }
    let n = t.len();
    let upper = (0..n)
        .map(|i| {
            (i + 1..n)
                .map(|j| 1.0 / (1.0 + distance::d_time(t[i], t[j])))
                .collect()
        })
        .collect();
    Ok(SimilarityMatrix::from_upper(SimilarityKind::St, n, upper))
}

/// `S_p` entries `1 / (1 + d_period(p_i, p_j))`.
pub fn sp_matrix(p: &[u32], n_periods: u32) -> Result<SimilarityMatrix> {
    if p.is_empty() {
        return Err(Error::Empty("periods"));
    }
    if n_periods == 0 {
        return Err(Error::InvalidPeriodCount);
    }
    if let Some(i) = p.iter().position(|&v| v < 1 || v > n_periods) {
        return Err(Error::PeriodOutOfRange {
            index: Some(i + 1),
            period: i64::from(p[i]),
            n_periods,
        });
    }
    let n = p.len();
    let upper = (0..n)
        .map(|i| {
            (i + 1..n)
                .map(|j| {
                    let d = distance::period_distance_unchecked(p[i], p[j], n_periods);
                    1.0 / (1.0 + f64::from(d))
                })
                .collect()
        })
        .collect();
    Ok(SimilarityMatrix::from_upper(SimilarityKind::Sp, n, upper))
}

/// `S_x` entries `1 / (1 + d(x_i, x_j))` over predictor rows.
pub fn sx_matrix(x: &Matrix, metric: Metric) -> Result<SimilarityMatrix> {
    if x.rows() == 0 {
        return Err(Error::Empty("predictor rows"));
    }
    if x.cols() == 0 {
        return Err(Error::Empty("predictor columns"));
    }
    if let Metric::Minkowski { order } = metric {
        Metric::minkowski(order)?;
    }
    let n = x.rows();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| {
                    let d = distance::vector_distance_unchecked(x.row(i), x.row(j), metric);
                    1.0 / (1.0 + d)
                })
                .collect()
        })
        .collect();
    Ok(SimilarityMatrix::from_upper(SimilarityKind::Sx, n, upper))
}

/// Elementwise `alpha * st + beta * sp + gamma * sx`.
///
/// `sx` may be absent only when `gamma` is zero.
pub fn combine(
    weights: &WeightTriple,
    st: &SimilarityMatrix,
    sp: &SimilarityMatrix,
    sx: Option<&SimilarityMatrix>,
) -> Result<SimilarityMatrix> {
    let n = st.n();
    for other in std::iter::once(sp).chain(sx) {
        if other.n() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: other.n(),
            });
        }
    }
    let WeightTriple { alpha, beta, gamma } = *weights;
    let mut values: Vec<f64> = match sx {
        Some(sx) => st
            .values
            .iter()
            .zip(&sp.values)
            .zip(&sx.values)
            .map(|((a, b), c)| alpha * a + beta * b + gamma * c)
            .collect(),
        None if gamma == 0.0 => st
            .values
            .iter()
            .zip(&sp.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect(),
        None => return Err(Error::MissingExogenous),
    };
    // The weights sum to 1 only up to rounding; self-similarity stays exact.
    for i in 0..n {
        values[i * n + i] = 1.0;
    }
    Ok(SimilarityMatrix {
        kind: SimilarityKind::Sw,
        n,
        values,
    })
}

/// `S_w` together with the component matrices it was built from.
#[derive(Debug, Clone)]
pub struct SwComponents {
    pub sw: SimilarityMatrix,
    pub st: SimilarityMatrix,
    pub sp: SimilarityMatrix,
    /// Absent when the dataset has no predictors (only allowed with `gamma == 0`).
    pub sx: Option<SimilarityMatrix>,
}

/// Builds `St`, `Sp`, `Sx` for the dataset and combines them with `weights`.
pub fn sw_matrix(
    dataset: &TimeSeriesDataset,
    weights: &WeightTriple,
    metric: Metric,
) -> Result<SwComponents> {
    let sx = match dataset.x() {
        Some(x) => Some(sx_matrix(x, metric)?),
        None if weights.gamma == 0.0 => None,
        None => return Err(Error::MissingExogenous),
    };
    let st = st_matrix(dataset.t())?;
    let sp = sp_matrix(dataset.p(), dataset.n_periods())?;
    let sw = combine(weights, &st, &sp, sx.as_ref())?;
    Ok(SwComponents { sw, st, sp, sx })
}
