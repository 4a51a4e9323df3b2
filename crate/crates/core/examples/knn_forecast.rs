//! Forecasts the last season of a simulated series with fixed weights and k.

use knnwt::simulation::{simulate_series, Family, SimulationConfig};
use knnwt::{knn_forecast, sw_matrix, Metric, WeightTriple};

fn main() -> knnwt::Result<()> {
    let series = simulate_series(&SimulationConfig::new(Family::MvnormX, 80, 42))?;
    let data = series.to_dataset()?;
    let n = data.len();
    let f_index: Vec<usize> = (n - series.s as usize + 1..=n).collect();

    let sw = sw_matrix(&data, &WeightTriple::new(0.1, 0.4, 0.5)?, Metric::Euclidean)?.sw;
    let result = knn_forecast(&sw, &f_index, 5, data.y())?;
    for (set, estimate) in result.neighbor_sets.iter().zip(&result.estimates) {
        println!(
            "t = {:>3}  actual {:>9.3}  estimate {:>9.3}  neighbors {:?}",
            set.target_index,
            data.y()[set.target_index - 1],
            estimate,
            set.neighbor_indices
        );
    }
    Ok(())
}
