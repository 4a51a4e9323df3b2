//! Wrap-aware distance between cycle positions and the similarity transform.

use knnwt::distance::{d_period, d_time, d_vector, to_similarity, Metric};

fn main() -> knnwt::Result<()> {
    for (a, b) in [(1, 3), (1, 11), (3, 11), (1, 12)] {
        let d = d_period(a, b, 12)?;
        println!("months {a:>2} and {b:>2}: distance {d}, similarity {:.4}", to_similarity(d)?);
    }
    println!("t = 5 vs t = 9: distance {}", d_time(5, 9));

    let (u, v) = ([1.0, 0.0, 2.5], [0.5, 0.0, 4.0]);
    for name in Metric::NAMES {
        let metric: Metric = name.parse()?;
        println!("{metric:>10}: {:.4}", d_vector(&u, &v, metric)?);
    }
    println!("{:>10}: {:.4}", "minkowski:3", d_vector(&u, &v, "minkowski:3".parse()?)?);
    Ok(())
}
