//! Reads a dated CSV through a schema, forecasts, and writes the result.

use std::fs;

use knnwt::dataio::{self, DatasetSchema, PeriodMode};
use knnwt::{knn_forecast, sw_matrix, Metric, WeightTriple};

fn main() -> knnwt::Result<()> {
    let dir = std::env::temp_dir().join("knnwt-csv-pipeline");
    fs::create_dir_all(&dir).map_err(|e| knnwt::Error::Io { path: dir.clone(), source: e })?;
    let input = dir.join("sales.csv");
    let mut csv = String::from("month,sales,price\n");
    for i in 0..48 {
        let season = [3.0, 5.0, 9.0, 4.0][i % 4];
        csv.push_str(&format!("{}-{:02}-15,{},{}\n", 2020 + i / 12, i % 12 + 1, 50.0 + season * 4.0 + i as f64, 2.0 + (i % 5) as f64));
    }
    fs::write(&input, csv).map_err(|e| knnwt::Error::Io { path: input.clone(), source: e })?;

    let schema = DatasetSchema {
        date_column: Some("month".into()),
        response_column: "sales".into(),
        predictor_columns: vec!["price".into()],
        period_mode: PeriodMode::FromMonthOfDate,
    };
    let data = dataio::read_dataset(&input, &schema)?;
    let sw = sw_matrix(&data, &WeightTriple::new(0.3, 0.5, 0.2)?, Metric::Euclidean)?.sw;
    let f_index: Vec<usize> = (43..=48).collect();
    let result = knn_forecast(&sw, &f_index, 3, data.y())?;
    let actuals: Vec<f64> = f_index.iter().map(|&j| data.y()[j - 1]).collect();

    let out = dir.join("forecast.csv");
    dataio::write_forecast(&result, Some(&actuals), &out)?;
    print!("{}", fs::read_to_string(&out).map_err(|e| knnwt::Error::Io { path: out.clone(), source: e })?);
    Ok(())
}
