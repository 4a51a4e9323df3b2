//! Dissimilarity kernels and the `1 / (1 + d)` similarity transform.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance used to compare predictor vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "metric")]
pub enum Metric {
    Euclidean,
    Maximum,
    Manhattan,
    Canberra,
    Binary,
    Minkowski { order: f64 },
}

impl Metric {
    /// Minkowski distance of order `order`; `order` must be positive.
    pub fn minkowski(order: f64) -> Result<Self> {
        if order > 0.0 && order.is_finite() {
            Ok(Metric::Minkowski { order })
        } else {
            Err(Error::InvalidMinkowskiOrder(order))
        }
    }

    pub const NAMES: [&'static str; 6] = [
        "euclidean",
        "maximum",
        "manhattan",
        "canberra",
        "binary",
        "minkowski",
    ];
}

impl FromStr for Metric {
    type Err = Error;

    /// Accepts the six metric names; `minkowski` takes an optional order
    /// suffix (`minkowski:3`) and defaults to order 2.
    fn from_str(s: &str) -> Result<Self> {
        let lowered = s.trim().to_ascii_lowercase();
        let (name, order) = match lowered.split_once(':') {
            Some((name, order)) => (name, Some(order)),
            None => (lowered.as_str(), None),
        };
        let metric = match (name, order) {
            ("euclidean", None) => Metric::Euclidean,
            ("maximum", None) => Metric::Maximum,
            ("manhattan", None) => Metric::Manhattan,
            ("canberra", None) => Metric::Canberra,
            ("binary", None) => Metric::Binary,
            ("minkowski", None) => Metric::Minkowski { order: 2.0 },
            ("minkowski", Some(order)) => {
                let order: f64 = order
                    .parse()
                    .map_err(|_| Error::UnknownMetric(s.to_string()))?;
                Metric::minkowski(order)?
            }
            _ => return Err(Error::UnknownMetric(s.to_string())),
        };
        Ok(metric)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Euclidean => f.pad("euclidean"),
            Metric::Maximum => f.pad("maximum"),
            Metric::Manhattan => f.pad("manhattan"),
            Metric::Canberra => f.pad("canberra"),
            Metric::Binary => f.pad("binary"),
            Metric::Minkowski { order } => f.pad(&format!("minkowski:{order}")),
        }
    }
}

/// Time-order dissimilarity `|t1 - t2|`.
#[inline]
pub fn d_time(t1: i64, t2: i64) -> f64 {
    t1.abs_diff(t2) as f64
}

/// Wrap-aware distance between two positions in a cycle of `p_max` periods
/// (the cycle starts at 1). January and December are 1 apart in a 12-cycle.
pub fn d_period(p1: u32, p2: u32, p_max: u32) -> Result<f64> {
    for p in [p1, p2] {
        if p < 1 || p > p_max {
            return Err(Error::PeriodOutOfRange {
                index: None,
                period: i64::from(p),
                n_periods: p_max,
            });
        }
    }
    Ok(period_distance_unchecked(p1, p2, p_max) as f64)
}

#[inline]
pub(crate) fn period_distance_unchecked(p1: u32, p2: u32, p_max: u32) -> u32 {
    let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
    let direct = hi - lo;
    let wrapped = (lo - 1) + (p_max - hi) + 1;
    direct.min(wrapped)
}

/// Distance between two predictor vectors under `metric`.
pub fn d_vector(a: &[f64], b: &[f64], metric: Metric) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::Empty("predictor vector"));
    }
    Ok(vector_distance_unchecked(a, b, metric))
}

pub(crate) fn vector_distance_unchecked(a: &[f64], b: &[f64], metric: Metric) -> f64 {
    let pairs = a.iter().zip(b);
    match metric {
        Metric::Euclidean => pairs.map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
        Metric::Maximum => pairs.map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
        Metric::Manhattan => pairs.map(|(x, y)| (x - y).abs()).sum(),
        Metric::Canberra => pairs
            .map(|(x, y)| {
                let denom = x.abs() + y.abs();
                if denom == 0.0 {
                    0.0
                } else {
                    (x - y).abs() / denom
                }
            })
            .sum(),
        Metric::Binary => {
            let (mut either, mut mismatched) = (0usize, 0usize);
            for (x, y) in pairs {
                let (nx, ny) = (*x != 0.0, *y != 0.0);
                if nx || ny {
                    either += 1;
                    if nx != ny {
                        mismatched += 1;
                    }
                }
            }
            if either == 0 {
                0.0
            } else {
                mismatched as f64 / either as f64
            }
        }
        Metric::Minkowski { order } => pairs
            .map(|(x, y)| (x - y).abs().powf(order))
            .sum::<f64>()
            .powf(order.recip()),
    }
}

/// Maps a dissimilarity `d >= 0` to a similarity in `(0, 1]`.
pub fn to_similarity(d: f64) -> Result<f64> {
    if d >= 0.0 {
        Ok(1.0 / (1.0 + d))
    } else {
        Err(Error::NegativeDistance(d))
    }
}
