//! Random-search tuning of the neighbor count and similarity weights,
//! scored by mean absolute percent error over a trailing test window.
//!
//! Grids are drawn from `ChaCha8Rng::seed_from_u64(seed)`: for each row, `k`
//! first (uniform integer in `1..=k_max`), then three `U[0, 1)` weights that
//! are divided by their sum. ChaCha8 output is fixed by the algorithm itself,
//! so a seed yields the same grid on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::knn_forecast;
use crate::similarity::{combine, SimilarityMatrix, WeightTriple};

/// Absolute percent error `|actual - estimate| / |actual| * 100`.
pub fn ape(actual: f64, estimate: f64) -> Result<f64> {
    if actual == 0.0 {
        return Err(Error::ZeroActual { index: None });
    }
    Ok((actual - estimate).abs() / actual.abs() * 100.0)
}

/// Mean of [`ape`] over paired actuals and estimates.
pub fn mape(actuals: &[f64], estimates: &[f64]) -> Result<f64> {
    if actuals.len() != estimates.len() {
        return Err(Error::LengthMismatch {
            what: "estimates",
            expected: actuals.len(),
            found: estimates.len(),
        });
    }
    if actuals.is_empty() {
        return Err(Error::Empty("actuals"));
    }
    let mut total = 0.0;
    for (i, (&a, &e)) in actuals.iter().zip(estimates).enumerate() {
        total += ape(a, e).map_err(|_| Error::ZeroActual { index: Some(i + 1) })?;
    }
    Ok(total / actuals.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningConfig {
    pub grid_len: usize,
    pub test_h: usize,
    /// Upper bound for sampled `k`; defaults to `min(floor(0.4 n), 50)`.
    pub max_k: Option<usize>,
    pub val_holdout_len: usize,
    pub seed: u64,
    /// Worker threads for grid evaluation. Results do not depend on it.
    #[serde(skip, default = "default_jobs")]
    pub jobs: usize,
}

fn default_jobs() -> usize {
    1
}

impl TuningConfig {
    pub fn new(grid_len: usize, test_h: usize, val_holdout_len: usize, seed: u64) -> Self {
        Self {
            grid_len,
            test_h,
            max_k: None,
            val_holdout_len,
            seed,
            jobs: 1,
        }
    }

    pub fn with_max_k(mut self, max_k: usize) -> Self {
        self.max_k = Some(max_k);
        self
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    /// Checks the configuration against a series of length `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.grid_len == 0 {
            return Err(Error::InvalidConfig("grid length must be at least 1".into()));
        }
        if self.test_h == 0 {
            return Err(Error::InvalidConfig("test horizon must be at least 1".into()));
        }
        if self.max_k == Some(0) {
            return Err(Error::InvalidConfig("max k must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(Error::InvalidConfig("jobs must be at least 1".into()));
        }
        let usable = n.saturating_sub(2);
        if self.test_h + self.val_holdout_len > usable {
            return Err(Error::InvalidConfig(format!(
                "test horizon {} plus validation holdout {} exceeds the usable length {usable} (n - 2)",
                self.test_h, self.val_holdout_len
            )));
        }
        Ok(())
    }
}

/// Largest `k` the grid may sample for a series of length `n`.
pub fn k_max(n: usize, max_k: Option<usize>) -> usize {
    max_k
        .unwrap_or_else(|| ((n as f64 * 0.4).floor() as usize).min(50))
        .max(1)
}

/// One hyperparameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl GridRow {
    pub fn weights(&self) -> WeightTriple {
        WeightTriple::from_normalized(self.alpha, self.beta, self.gamma)
    }
}

/// Draws `config.grid_len` hyperparameter sets for a series of length `n`.
pub fn sample_grid(config: &TuningConfig, n: usize) -> Vec<GridRow> {
    let upper = k_max(n, config.max_k);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.grid_len)
        .map(|_| {
            let k = rng.random_range(1..=upper);
            let (a, b, g, sum) = loop {
                let (a, b, g): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
                let sum = a + b + g;
                if sum > 0.0 {
                    break (a, b, g, sum);
                }
            };
            GridRow {
                k,
                alpha: a / sum,
                beta: b / sum,
                gamma: g / sum,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuningReport {
    pub weight_opt: WeightTriple,
    pub k_opt: usize,
    pub test_mape: f64,
    /// Test-window MAPE per grid row; `+inf` where `k` exceeded the candidates.
    pub mape_all: Vec<f64>,
    pub grid: Vec<GridRow>,
    /// `S_w` over the full series for the winning weights.
    pub sw_opt: SimilarityMatrix,
}

/// 1-based positions of the test window for a series of length `n`.
pub fn test_window(n: usize, test_h: usize, val_holdout_len: usize) -> Vec<usize> {
    let m = n - val_holdout_len;
    (m - test_h + 1..=m).collect()
}

/// Evaluates every sampled grid row on the test window and returns the best.
///
/// Only the first `n - val_holdout_len` observations are used for scoring;
/// the leading block of each component matrix stands in for a rebuild over
/// those observations.
pub fn random_search_tune(
    st: &SimilarityMatrix,
    sp: &SimilarityMatrix,
    sx: &SimilarityMatrix,
    y: &[f64],
    config: &TuningConfig,
) -> Result<TuningReport> {
    let n = y.len();
    for m in [st, sp, sx] {
        if m.n() != n {
            return Err(Error::DimensionMismatch { left: m.n(), right: n });
        }
    }
    config.validate(n)?;

    let m = n - config.val_holdout_len;
    let test_index = test_window(n, config.test_h, config.val_holdout_len);
    let actuals: Vec<f64> = test_index.iter().map(|&j| y[j - 1]).collect();
    if let Some(pos) = actuals.iter().position(|&a| a == 0.0) {
        return Err(Error::ZeroActual {
            index: Some(test_index[pos]),
        });
    }
    let (st_m, sp_m, sx_m) = (st.truncated(m)?, sp.truncated(m)?, sx.truncated(m)?);
    let y_m = &y[..m];

    let grid = sample_grid(config, n);
    let evaluate = |row: &GridRow| -> Result<f64> {
        let sw = combine(&row.weights(), &st_m, &sp_m, Some(&sx_m))?;
        match knn_forecast(&sw, &test_index, row.k, y_m) {
            Ok(fc) => mape(&actuals, &fc.estimates),
            Err(Error::KTooLarge { .. }) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    };
    let mape_all: Vec<f64> = if config.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
        pool.install(|| grid.par_iter().map(evaluate).collect::<Result<_>>())?
    } else {
        grid.iter().map(evaluate).collect::<Result<_>>()?
    };

    let mut best: Option<usize> = None;
    for (i, &score) in mape_all.iter().enumerate() {
        if score.is_finite() && best.is_none_or(|b| score < mape_all[b]) {
            best = Some(i);
        }
    }
    let best = best.ok_or(Error::NoFeasibleRow)?;
    let winner = grid[best];
    let sw_opt = combine(&winner.weights(), st, sp, Some(sx))?;
    Ok(TuningReport {
        weight_opt: winner.weights(),
        k_opt: winner.k,
        test_mape: mape_all[best],
        mape_all,
        grid,
        sw_opt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::{sp_matrix, st_matrix, sx_matrix};
    use crate::dataset::Matrix;
    use crate::distance::Metric;

    #[test]
    fn ape_and_mape_examples() {
        assert_eq!(ape(100.0, 110.0).unwrap(), 10.0);
        assert_eq!(ape(100.0, 100.0).unwrap(), 0.0);
        assert!(matches!(ape(0.0, 5.0), Err(Error::ZeroActual { .. })));
        assert_eq!(mape(&[100.0, 200.0], &[110.0, 180.0]).unwrap(), 10.0);
        assert_eq!(mape(&[50.0], &[50.0]).unwrap(), 0.0);
        assert!((mape(&[10.0, 10.0], &[11.0, 9.0]).unwrap() - 10.0).abs() < 1e-12);
        assert!(matches!(
            mape(&[1.0, 0.0], &[1.0, 1.0]),
            Err(Error::ZeroActual { index: Some(2) })
        ));
        assert!(matches!(mape(&[1.0], &[1.0, 2.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn default_k_cap() {
        assert_eq!(k_max(100, None), 40);
        assert_eq!(k_max(200, None), 50);
        assert_eq!(k_max(200, Some(7)), 7);
        assert_eq!(k_max(2, None), 1);
    }

    #[test]
    fn grid_rows_respect_constraints() {
        let config = TuningConfig::new(500, 5, 0, 42);
        let grid = sample_grid(&config, 100);
        assert_eq!(grid.len(), 500);
        for row in &grid {
            assert!((1..=40).contains(&row.k));
            assert!(row.alpha >= 0.0 && row.beta >= 0.0 && row.gamma >= 0.0);
            assert!((row.alpha + row.beta + row.gamma - 1.0).abs() <= 1e-12);
        }
        assert_eq!(grid, sample_grid(&config, 100));
        assert_ne!(grid, sample_grid(&TuningConfig::new(500, 5, 0, 43), 100));
    }

    #[test]
    fn config_validation() {
        assert!(TuningConfig::new(10, 5, 3, 0).validate(10).is_ok());
        assert!(TuningConfig::new(10, 6, 3, 0).validate(10).is_err());
        assert!(TuningConfig::new(0, 1, 0, 0).validate(10).is_err());
        assert!(TuningConfig::new(1, 0, 0, 0).validate(10).is_err());
    }

    fn toy_inputs(n: usize) -> (SimilarityMatrix, SimilarityMatrix, SimilarityMatrix, Vec<f64>) {
        let t: Vec<i64> = (1..=n as i64).collect();
        let p: Vec<u32> = (0..n as u32).map(|i| i % 4 + 1).collect();
        let x = Matrix::column((0..n).map(|i| ((i * 7) % 5) as f64).collect());
        let y: Vec<f64> = (0..n).map(|i| 10.0 + (i % 4) as f64 + 0.1 * i as f64).collect();
        (
            st_matrix(&t).unwrap(),
            sp_matrix(&p, 4).unwrap(),
            sx_matrix(&x, Metric::Euclidean).unwrap(),
            y,
        )
    }

    #[test]
    fn singleton_grid_reports_its_row() {
        let (st, sp, sx, y) = toy_inputs(30);
        let config = TuningConfig::new(1, 4, 4, 7);
        let report = random_search_tune(&st, &sp, &sx, &y, &config).unwrap();
        let row = report.grid[0];
        assert_eq!(report.k_opt, row.k);
        assert_eq!(report.weight_opt.as_array(), [row.alpha, row.beta, row.gamma]);
        assert_eq!(report.test_mape, report.mape_all[0]);
    }

    #[test]
    fn report_is_argmin_and_deterministic() {
        let (st, sp, sx, y) = toy_inputs(40);
        let config = TuningConfig::new(60, 6, 4, 3);
        let a = random_search_tune(&st, &sp, &sx, &y, &config).unwrap();
        let b = random_search_tune(&st, &sp, &sx, &y, &config.clone().with_jobs(3)).unwrap();
        assert_eq!(a, b);
        let min = a.mape_all.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(a.test_mape, min);
        assert_eq!(a.sw_opt.n(), 40);
    }

    #[test]
    fn infeasible_k_scores_infinity() {
        // m = 10, test_h = 7 -> 3 candidates; max_k 8 makes most rows infeasible
        let (st, sp, sx, y) = toy_inputs(12);
        let config = TuningConfig::new(40, 7, 2, 1).with_max_k(8);
        let report = random_search_tune(&st, &sp, &sx, &y, &config).unwrap();
        for (row, score) in report.grid.iter().zip(&report.mape_all) {
            assert_eq!(row.k > 3, score.is_infinite());
        }
        assert!(report.k_opt <= 3);
    }

    #[test]
    fn zero_actual_in_test_window_is_an_error() {
        let (st, sp, sx, mut y) = toy_inputs(20);
        y[17] = 0.0;
        let config = TuningConfig::new(5, 4, 2, 1);
        assert!(matches!(
            random_search_tune(&st, &sp, &sx, &y, &config),
            Err(Error::ZeroActual { index: Some(18) })
        ));
    }
}
