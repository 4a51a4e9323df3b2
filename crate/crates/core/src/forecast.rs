//! K-nearest-neighbor regression over a similarity matrix, and the two
//! reference baselines (seasonal naive, ordinary least squares).
//!
//! Forecast positions and neighbor positions are 1-based.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::dataset::Matrix;
use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

/// The neighborhood chosen for one forecast target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborSet {
    pub target_index: usize,
    /// Ordered by decreasing similarity; ties by increasing position.
    pub neighbor_indices: Vec<usize>,
    pub neighbor_similarities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastResult {
    pub f_index: Vec<usize>,
    pub estimates: Vec<f64>,
    pub neighbor_sets: Vec<NeighborSet>,
}

#[inline]
fn by_similarity(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
}

/// Mean response of the `k` candidates most similar to `target`.
///
/// `column` holds the similarity of every series position to `target`
/// (length `n`, 0-based storage); `candidates` are 1-based positions.
pub fn nn_reg(
    target: usize,
    column: &[f64],
    candidates: &[usize],
    y: &[f64],
    k: usize,
) -> Result<(f64, NeighborSet)> {
    if column.len() != y.len() {
        return Err(Error::LengthMismatch {
            what: "similarity column",
            expected: y.len(),
            found: column.len(),
        });
    }
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if k > candidates.len() {
        return Err(Error::KTooLarge {
            k,
            candidates: candidates.len(),
        });
    }
    let mut scored = Vec::with_capacity(candidates.len());
    for &c in candidates {
        if c == 0 || c > y.len() {
            return Err(Error::IndexOutOfRange { index: c, n: y.len() });
        }
        scored.push((column[c - 1], c - 1));
    }
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, by_similarity);
        scored.truncate(k);
    }
    scored.sort_unstable_by(by_similarity);

    let estimate = scored.iter().map(|&(_, i)| y[i]).sum::<f64>() / k as f64;
    let neighbors = NeighborSet {
        target_index: target,
        neighbor_indices: scored.iter().map(|&(_, i)| i + 1).collect(),
        neighbor_similarities: scored.iter().map(|&(s, _)| s).collect(),
    };
    Ok((estimate, neighbors))
}

/// Validates a 1-based forecast index against a series of length `n` and
/// returns it sorted ascending.
pub(crate) fn sorted_forecast_index(f_index: &[usize], n: usize) -> Result<Vec<usize>> {
    if f_index.is_empty() {
        return Err(Error::Empty("forecast index"));
    }
    let mut sorted = f_index.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateIndex(w[0]));
        }
    }
    if let Some(&bad) = sorted.iter().find(|&&i| i == 0 || i > n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    Ok(sorted)
}

/// Forecasts every position in `f_index` (1-based) from its `k` most similar
/// observations outside `f_index`.
///
/// Forecast positions never serve as neighbors, so estimated values are not
/// reused for later targets.
pub fn knn_forecast(
    sim: &SimilarityMatrix,
    f_index: &[usize],
    k: usize,
    y: &[f64],
) -> Result<ForecastResult> {
    let n = y.len();
    if sim.n() != n {
        return Err(Error::DimensionMismatch {
            left: sim.n(),
            right: n,
        });
    }
    let targets = sorted_forecast_index(f_index, n)?;
    if k == 0 {
        return Err(Error::ZeroK);
    }
    let candidates: Vec<usize> = {
        let mut excluded = vec![false; n];
        for &j in &targets {
            excluded[j - 1] = true;
        }
        (1..=n).filter(|&i| !excluded[i - 1]).collect()
    };
    if k > candidates.len() {
        return Err(Error::KTooLarge {
            k,
            candidates: candidates.len(),
        });
    }
    let is_suffix = targets.first() == Some(&(n - targets.len() + 1));
    if !is_suffix {
        log::warn!(
            "forecast index is not a contiguous suffix of the series; observations after a target may act as its neighbors"
        );
    }

    let mut estimates = Vec::with_capacity(targets.len());
    let mut neighbor_sets = Vec::with_capacity(targets.len());
    for &j in &targets {
        let (estimate, neighbors) = nn_reg(j, sim.row(j - 1), &candidates, y, k)?;
        estimates.push(estimate);
        neighbor_sets.push(neighbors);
    }
    Ok(ForecastResult {
        f_index: targets,
        estimates,
        neighbor_sets,
    })
}

/// Predicts each target with the latest earlier non-target observation in
/// the same period. Output follows ascending target order.
pub fn seasonal_naive(y: &[f64], p: &[u32], f_index: &[usize]) -> Result<Vec<f64>> {
    if p.len() != y.len() {
        return Err(Error::LengthMismatch {
            what: "periods",
            expected: y.len(),
            found: p.len(),
        });
    }
    let targets = sorted_forecast_index(f_index, y.len())?;
    let mut excluded = vec![false; y.len()];
    for &j in &targets {
        excluded[j - 1] = true;
    }
    targets
        .iter()
        .map(|&j| {
            (0..j - 1)
                .rev()
                .find(|&i| !excluded[i] && p[i] == p[j - 1])
                .map(|i| y[i])
                .ok_or(Error::NoSeasonalPrior { index: j })
        })
        .collect()
}

/// Least-squares fit of `y` on `[1, x]` over the non-target rows, evaluated
/// at the target rows (ascending order).
pub fn ols_baseline(x: &Matrix, y: &[f64], f_index: &[usize]) -> Result<Vec<f64>> {
    if x.rows() != y.len() {
        return Err(Error::LengthMismatch {
            what: "predictor rows",
            expected: y.len(),
            found: x.rows(),
        });
    }
    let targets = sorted_forecast_index(f_index, y.len())?;
    let mut excluded = vec![false; y.len()];
    for &j in &targets {
        excluded[j - 1] = true;
    }
    let train: Vec<usize> = (0..y.len()).filter(|&i| !excluded[i]).collect();
    let width = x.cols() + 1;
    if train.len() < width {
        return Err(Error::RankDeficient);
    }
    let design = |rows: &[usize]| {
        DMatrix::from_fn(rows.len(), width, |r, c| {
            if c == 0 {
                1.0
            } else {
                x.get(rows[r], c - 1)
            }
        })
    };
    let a = design(&train);
    let b = DVector::from_iterator(train.len(), train.iter().map(|&i| y[i]));
    let svd = a.svd(true, true);
    let largest = svd.singular_values.max();
    let tolerance = largest * 1e-10 * train.len().max(width) as f64;
    if largest == 0.0 || svd.rank(tolerance) < width {
        return Err(Error::RankDeficient);
    }
    let coefficients = svd
        .solve(&b, tolerance)
        .map_err(|_| Error::RankDeficient)?;
    let target_rows: Vec<usize> = targets.iter().map(|j| j - 1).collect();
    Ok((design(&target_rows) * coefficients).iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::{st_matrix, SimilarityKind};

    #[test]
    fn nn_reg_constant_series() {
        let (est, set) = nn_reg(4, &[0.2, 0.9, 0.4, 1.0], &[1, 2, 3], &[5.0; 4], 2).unwrap();
        assert_eq!(est, 5.0);
        assert_eq!(set.neighbor_indices, vec![2, 3]);
    }

    #[test]
    fn nn_reg_time_similarity() {
        let st = st_matrix(&[1, 2, 3, 4]).unwrap();
        let y = [1.0, 2.0, 3.0, 4.0];
        let (est, set) = nn_reg(4, st.row(3), &[1, 2, 3], &y, 1).unwrap();
        assert_eq!(est, 3.0);
        assert_eq!(set.neighbor_indices, vec![3]);
        let (est, set) = nn_reg(4, st.row(3), &[1, 2, 3], &y, 3).unwrap();
        assert_eq!(est, 2.0);
        assert_eq!(set.neighbor_similarities, vec![0.5, 1.0 / 3.0, 0.25]);
    }

    #[test]
    fn nn_reg_rejects_large_k() {
        assert!(matches!(
            nn_reg(3, &[1.0, 0.5, 0.2], &[1, 2], &[1.0, 2.0, 3.0], 3),
            Err(Error::KTooLarge { k: 3, candidates: 2 })
        ));
    }

    #[test]
    fn ties_resolve_to_earlier_position() {
        let sim = SimilarityMatrix::from_values(
            SimilarityKind::Custom,
            4,
            vec![
                1.0, 0.5, 0.5, 0.5, //
                0.5, 1.0, 0.5, 0.5, //
                0.5, 0.5, 1.0, 0.5, //
                0.5, 0.5, 0.5, 1.0,
            ],
        )
        .unwrap();
        let out = knn_forecast(&sim, &[4], 2, &[10.0, 20.0, 30.0, 40.0]).unwrap();
        assert_eq!(out.neighbor_sets[0].neighbor_indices, vec![1, 2]);
        assert_eq!(out.estimates, vec![15.0]);
    }

    #[test]
    fn knn_forecast_examples() {
        let y = [1.0, 2.0, 3.0, 4.0];
        let st = st_matrix(&[1, 2, 3, 4]).unwrap();
        let out = knn_forecast(&st, &[4], 3, &y).unwrap();
        assert_eq!(out.estimates, vec![2.0]);

        let out = knn_forecast(&st, &[4, 3], 2, &y).unwrap();
        assert_eq!(out.f_index, vec![3, 4]);
        assert_eq!(out.estimates, vec![1.5, 1.5]);
        for set in &out.neighbor_sets {
            assert_eq!(set.neighbor_indices, vec![2, 1]);
        }
    }

    #[test]
    fn knn_forecast_errors() {
        let st = st_matrix(&[1, 2, 3]).unwrap();
        let y = [1.0, 2.0, 3.0];
        assert!(matches!(knn_forecast(&st, &[3], 3, &y), Err(Error::KTooLarge { .. })));
        assert!(matches!(knn_forecast(&st, &[4], 1, &y), Err(Error::IndexOutOfRange { index: 4, .. })));
        assert!(matches!(knn_forecast(&st, &[0], 1, &y), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(knn_forecast(&st, &[3, 3], 1, &y), Err(Error::DuplicateIndex(3))));
        assert!(matches!(knn_forecast(&st, &[3], 0, &y), Err(Error::ZeroK)));
        assert!(matches!(knn_forecast(&st, &[3], 1, &y[..2]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn seasonal_naive_examples() {
        let out = seasonal_naive(&[10.0, 20.0, 30.0, 40.0], &[1, 2, 1, 2], &[3, 4]).unwrap();
        assert_eq!(out, vec![10.0, 20.0]);
        assert!(matches!(
            seasonal_naive(&[1.0, 2.0, 3.0], &[1, 2, 3], &[3]),
            Err(Error::NoSeasonalPrior { index: 3 })
        ));
        assert_eq!(
            seasonal_naive(&[7.0, 8.0, 7.0, 8.0, 7.0], &[1, 2, 1, 2, 1], &[5]).unwrap(),
            vec![7.0]
        );
    }

    #[test]
    fn ols_examples() {
        let x = Matrix::column(vec![1.0, 2.0, 3.0, 4.0]);
        let out = ols_baseline(&x, &[2.0, 4.0, 6.0, 8.0], &[4]).unwrap();
        assert!((out[0] - 8.0).abs() < 1e-9);

        let x = Matrix::column(vec![1.0, 1.0, 1.0]);
        assert!(matches!(ols_baseline(&x, &[1.0, 2.0, 3.0], &[3]), Err(Error::RankDeficient)));

        let x = Matrix::column(vec![0.0, 1.0, 2.0]);
        let out = ols_baseline(&x, &[1.0, 1.0, 1.0], &[3]).unwrap();
        assert!((out[0] - 1.0).abs() < 1e-9);

        let x = Matrix::column(vec![0.0, 1.0]);
        assert!(matches!(ols_baseline(&x, &[1.0, 2.0], &[2]), Err(Error::RankDeficient)));
    }
}
