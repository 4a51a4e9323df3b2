//! Random search over k and the similarity weights, then a held-out check.

use knnwt::similarity::{sp_matrix, st_matrix, sx_matrix};
use knnwt::simulation::{simulate_series, Family, SimulationConfig};
use knnwt::tuning::mape;
use knnwt::{knn_forecast, random_search_tune, Metric, TuningConfig};

fn main() -> knnwt::Result<()> {
    let series = simulate_series(&SimulationConfig::new(Family::QuadToCubic, 100, 7))?;
    let data = series.to_dataset()?;
    let h = 2 * series.s as usize;
    let config = TuningConfig::new(1000, h, h, 10).with_jobs(2);

    let st = st_matrix(data.t())?;
    let sp = sp_matrix(data.p(), data.n_periods())?;
    let sx = sx_matrix(data.x().expect("simulated predictors"), Metric::Euclidean)?;
    let report = random_search_tune(&st, &sp, &sx, data.y(), &config)?;
    let [a, b, g] = report.weight_opt.as_array();
    println!("k = {}, weights = ({a:.3}, {b:.3}, {g:.3}), test MAPE = {:.2}", report.k_opt, report.test_mape);

    let n = data.len();
    let holdout: Vec<usize> = (n - h + 1..=n).collect();
    let fc = knn_forecast(&report.sw_opt, &holdout, report.k_opt, data.y())?;
    let actuals: Vec<f64> = holdout.iter().map(|&j| data.y()[j - 1]).collect();
    println!("holdout MAPE = {:.2}", mape(&actuals, &fc.estimates)?);
    Ok(())
}
