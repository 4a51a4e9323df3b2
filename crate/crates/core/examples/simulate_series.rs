//! One series per benchmark family, with the drawn components summarized.

use knnwt::simulation::{simulate_series, Family, SimulationConfig};

fn main() -> knnwt::Result<()> {
    for (seed, family) in (2024..).zip(Family::ALL) {
        let s = simulate_series(&SimulationConfig::new(family, 120, seed))?;
        let (lo, hi) = s.y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
        println!(
            "{family:<14} seed {seed}  season {:>2}  ARIMA({},{},{})  noise {:?}  y in [{lo:.1}, {hi:.1}]",
            s.s, s.arima_orders.p, s.arima_orders.d, s.arima_orders.q, s.noise_family
        );
    }
    Ok(())
}
