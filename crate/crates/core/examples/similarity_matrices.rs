//! Builds the time, period and predictor similarities and their weighted mix.

use knnwt::dataset::derive_default_index;
use knnwt::{build_dataset, sw_matrix, Matrix, Metric, WeightTriple};

fn main() -> knnwt::Result<()> {
    let n = 8;
    let (t, p) = derive_default_index(n, 4);
    let y: Vec<f64> = (1..=n).map(|i| 10.0 + i as f64).collect();
    let x = Matrix::column((0..n).map(|i| (i as f64 * 0.7).sin()).collect());
    let data = build_dataset(y, t, p, 4, Some(x))?;

    let weights = WeightTriple::new(0.2, 0.5, 0.3)?;
    let parts = sw_matrix(&data, &weights, Metric::Euclidean)?;
    let sx = parts.sx.as_ref().expect("predictors present");
    for (label, m) in [("St", &parts.st), ("Sp", &parts.sp), ("Sx", sx), ("Sw", &parts.sw)] {
        println!("{label}, row 1:");
        let row: Vec<String> = m.row(0).iter().map(|v| format!("{v:.3}")).collect();
        println!("  {}", row.join(" "));
    }
    Ok(())
}
