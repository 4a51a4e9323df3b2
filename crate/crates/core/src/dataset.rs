//! Shared data model: the dense [`Matrix`] used for predictors and the
//! validated [`TimeSeriesDataset`].
//!
//! Positions are 1-based wherever they cross the public API (forecast
//! indices, error positions). Storage is 0-based.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                what: "matrix data",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    left: cols,
                    right: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Promotes a vector to an `n x 1` matrix.
    pub fn column(values: Vec<f64>) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Copies out the rows at the given 0-based positions.
    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }
}

/// A response series with its time orders, seasonal periods and optional
/// exogenous predictors, validated once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesDataset {
    y: Vec<f64>,
    t: Vec<i64>,
    p: Vec<u32>,
    n_periods: u32,
    x: Option<Matrix>,
}

impl TimeSeriesDataset {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn t(&self) -> &[i64] {
        &self.t
    }

    pub fn p(&self) -> &[u32] {
        &self.p
    }

    pub fn n_periods(&self) -> u32 {
        self.n_periods
    }

    pub fn x(&self) -> Option<&Matrix> {
        self.x.as_ref()
    }
}

/// Validates and assembles a [`TimeSeriesDataset`].
///
/// Periods are taken as signed integers so out-of-range input (zero,
/// negative) is reported rather than wrapped.
pub fn build_dataset(
    y: Vec<f64>,
    t: Vec<i64>,
    p: Vec<i64>,
    n_periods: u32,
    x: Option<Matrix>,
) -> Result<TimeSeriesDataset> {
    if y.is_empty() {
        return Err(Error::Empty("response series"));
    }
    let n = y.len();
    for (what, len) in [("time orders", t.len()), ("periods", p.len())] {
        if len != n {
            return Err(Error::LengthMismatch {
                what,
                expected: n,
                found: len,
            });
        }
    }
    if let Some(x) = &x {
        if x.rows() != n {
            return Err(Error::LengthMismatch {
                what: "predictor rows",
                expected: n,
                found: x.rows(),
            });
        }
        if x.cols() == 0 {
            return Err(Error::Empty("predictor columns"));
        }
        if let Some(pos) = x.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "predictors",
                index: pos / x.cols() + 1,
            });
        }
    }
    if n_periods == 0 {
        return Err(Error::InvalidPeriodCount);
    }
    if let Some(pos) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "response",
            index: pos + 1,
        });
    }
    let mut periods = Vec::with_capacity(n);
    for (i, &period) in p.iter().enumerate() {
        if period < 1 || period > i64::from(n_periods) {
            return Err(Error::PeriodOutOfRange {
                index: Some(i + 1),
                period,
                n_periods,
            });
        }
        periods.push(period as u32);
    }
    if let Some(i) = t.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NonIncreasingTime { index: i + 2 });
    }
    Ok(TimeSeriesDataset {
        y,
        t,
        p: periods,
        n_periods,
        x,
    })
}

/// Time orders `1..=n` and periods cycling `1..=n_periods`.
pub fn derive_default_index(n: usize, n_periods: u32) -> (Vec<i64>, Vec<i64>) {
    let period_count = i64::from(n_periods.max(1));
    let t = (1..=n as i64).collect();
    let p = (0..n as i64).map(|i| i % period_count + 1).collect();
    (t, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_well_formed_dataset() {
        let ds = build_dataset(vec![1.0, 2.0, 3.0], vec![1, 2, 3], vec![1, 2, 3], 12, None).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.p(), &[1, 2, 3]);
        assert!(ds.x().is_none());
    }

    #[test]
    fn rejects_period_out_of_range() {
        let err = build_dataset(vec![1.0, 2.0], vec![1, 2], vec![1, 13], 12, None).unwrap_err();
        assert!(matches!(err, Error::PeriodOutOfRange { index: Some(2), period: 13, .. }));
        let err = build_dataset(vec![1.0], vec![1], vec![0], 12, None).unwrap_err();
        assert!(matches!(err, Error::PeriodOutOfRange { .. }));
    }

    #[test]
    fn rejects_non_increasing_time() {
        let err = build_dataset(vec![1.0, 2.0], vec![2, 1], vec![1, 2], 12, None).unwrap_err();
        assert!(matches!(err, Error::NonIncreasingTime { index: 2 }));
        let err = build_dataset(vec![1.0, 2.0], vec![1, 1], vec![1, 2], 12, None).unwrap_err();
        assert!(matches!(err, Error::NonIncreasingTime { .. }));
    }

    #[test]
    fn time_gaps_are_allowed() {
        assert!(build_dataset(vec![1.0, 2.0], vec![1, 10], vec![1, 2], 12, None).is_ok());
    }

    #[test]
    fn rejects_misaligned_inputs() {
        let err = build_dataset(vec![1.0, 2.0], vec![1], vec![1, 2], 12, None).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { .. }));
        let x = Matrix::column(vec![0.0; 3]);
        let err = build_dataset(vec![1.0, 2.0], vec![1, 2], vec![1, 2], 12, Some(x)).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { what: "predictor rows", .. }));
    }

    #[test]
    fn rejects_missing_values() {
        let err = build_dataset(vec![1.0, f64::NAN], vec![1, 2], vec![1, 2], 12, None).unwrap_err();
        assert!(matches!(err, Error::NonFinite { what: "response", index: 2 }));
        let x = Matrix::from_rows(&[[0.0, 1.0], [f64::NAN, 0.0]]).unwrap();
        let err = build_dataset(vec![1.0, 2.0], vec![1, 2], vec![1, 2], 12, Some(x)).unwrap_err();
        assert!(matches!(err, Error::NonFinite { what: "predictors", index: 2 }));
    }

    #[test]
    fn rejects_empty_and_zero_periods() {
        assert!(matches!(
            build_dataset(vec![], vec![], vec![], 12, None),
            Err(Error::Empty(_))
        ));
        assert!(matches!(
            build_dataset(vec![1.0], vec![1], vec![1], 0, None),
            Err(Error::InvalidPeriodCount)
        ));
    }

    #[test]
    fn default_index_cycles() {
        assert_eq!(derive_default_index(5, 4), (vec![1, 2, 3, 4, 5], vec![1, 2, 3, 4, 1]));
        assert_eq!(derive_default_index(3, 1).1, vec![1, 1, 1]);
        assert_eq!(derive_default_index(4, 12).1, vec![1, 2, 3, 4]);
    }

    proptest::proptest! {
        #[test]
        fn default_index_matches_modular_rule(n in 1usize..200, periods in 1u32..40) {
            let (t, p) = derive_default_index(n, periods);
            for i in 1..=n {
                proptest::prop_assert_eq!(t[i - 1], i as i64);
                proptest::prop_assert_eq!(p[i - 1], ((i as i64 - 1) % periods as i64) + 1);
            }
            let y = vec![1.0; n];
            proptest::prop_assert!(build_dataset(y, t, p, periods, None).is_ok());
        }
    }
}
