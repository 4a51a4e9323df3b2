//! Tuned KNN against seasonal-naive and OLS on a few simulated series.

use knnwt::forecast::{ols_baseline, seasonal_naive};
use knnwt::similarity::{sp_matrix, st_matrix, sx_matrix};
use knnwt::simulation::{simulate_series, Family, SimulationConfig};
use knnwt::tuning::mape;
use knnwt::{knn_forecast, random_search_tune, Metric, TuningConfig};

fn main() -> knnwt::Result<()> {
    println!("{:<14} {:>5} {:>10} {:>10} {:>10}", "family", "seed", "knn", "s-naive", "ols");
    for family in Family::ALL {
        for seed in 1..=3 {
            let series = simulate_series(&SimulationConfig::new(family, 100, seed))?;
            let data = series.to_dataset()?;
            let n = data.len();
            let h = 2 * series.s as usize;
            let x = data.x().expect("simulated predictors");

            let st = st_matrix(data.t())?;
            let sp = sp_matrix(data.p(), data.n_periods())?;
            let sx = sx_matrix(x, Metric::Euclidean)?;
            let report = random_search_tune(&st, &sp, &sx, data.y(), &TuningConfig::new(500, h, h, seed))?;

            let f_index: Vec<usize> = (n - h + 1..=n).collect();
            let actuals: Vec<f64> = f_index.iter().map(|&j| data.y()[j - 1]).collect();
            let knn = knn_forecast(&report.sw_opt, &f_index, report.k_opt, data.y())?.estimates;
            let naive = seasonal_naive(data.y(), data.p(), &f_index)?;
            let ols = ols_baseline(x, data.y(), &f_index)?;
            println!(
                "{family:<14} {seed:>5} {:>10.2} {:>10.2} {:>10.2}",
                mape(&actuals, &knn)?,
                mape(&actuals, &naive)?,
                mape(&actuals, &ols)?
            );
        }
    }
    Ok(())
}
