//! Synthetic benchmark series: a constant, an exogenous term (linear in
//! correlated normal predictors, or piecewise in one normal predictor), a
//! fixed sinusoidal season, an ARIMA error and normal or Poisson noise.
//!
//! Every component is drawn from its own ChaCha8 stream of the run seed, so
//! a seed fixes the constant, season, ARIMA error and noise independently of
//! the family and of how many draws other components consume.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson, StandardNormal};
use serde::Serialize;

use crate::dataset::{build_dataset, derive_default_index, Matrix, TimeSeriesDataset};
use crate::error::{Error, Result};

/// ARMA burn-in discarded before integration.
pub const BURN_IN: usize = 200;

pub const SEASONAL_PERIODS: [u32; 3] = [4, 7, 12];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Linear in `d` correlated normal predictors.
    MvnormX,
    /// `m x` below the breakpoint, `sqrt(x)` above.
    LinToSqrt,
    /// `m1 x` below the breakpoint, `m2 x` above.
    LinCoefChng,
    /// `m x^2` below the breakpoint, `-m x^3` above.
    QuadToCubic,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::MvnormX,
        Family::LinToSqrt,
        Family::LinCoefChng,
        Family::QuadToCubic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::MvnormX => "mvnorm-x",
            Family::LinToSqrt => "lin-to-sqrt",
            Family::LinCoefChng => "lin-coef-chng",
            Family::QuadToCubic => "quad-to-cubic",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.trim().to_ascii_lowercase().replace('_', "-");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == normalized)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown family `{s}` (expected mvnorm-x, lin-to-sqrt, lin-coef-chng or quad-to-cubic)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArimaOrders {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaOrders {
    pub fn new(p: usize, d: usize, q: usize) -> Self {
        Self { p, d, q }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Normal,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum NoiseFamily {
    Normal { sigma: f64 },
    Poisson { lambda: f64 },
}

impl NoiseFamily {
    pub fn parameter(&self) -> f64 {
        match *self {
            NoiseFamily::Normal { sigma } => sigma,
            NoiseFamily::Poisson { lambda } => lambda,
        }
    }
}

/// Component switches used to isolate parts of the generator in tests and
/// experiments. The default leaves every component on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Overrides {
    /// Drop the exogenous term (`b'x` or `f(x)`) from the response.
    pub zero_exogenous: bool,
    pub zero_arima: bool,
    pub zero_noise: bool,
    /// Force the noise family instead of drawing it.
    pub noise_kind: Option<NoiseKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    /// Predictor count for [`Family::MvnormX`].
    pub d: usize,
    pub overrides: Overrides,
}

impl SimulationConfig {
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        Self {
            family,
            n,
            seed,
            d: 3,
            overrides: Overrides::default(),
        }
    }

    pub fn with_predictors(mut self, d: usize) -> Self {
        self.d = d;
        self
    }

    pub fn with_overrides(mut self, overrides: Overrides) -> Self {
        self.overrides = overrides;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 30 {
            return Err(Error::InvalidConfig(format!(
                "series length must be at least 30, got {}",
                self.n
            )));
        }
        if self.d == 0 {
            return Err(Error::InvalidConfig("predictor count must be at least 1".into()));
        }
        Ok(())
    }
}

/// One generated series with every random component used to build it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulatedSeries {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    #[serde(skip)]
    pub y: Vec<f64>,
    /// `d` columns for [`Family::MvnormX`], one column otherwise.
    #[serde(skip)]
    pub x: Matrix,
    pub c: f64,
    pub b: Vec<f64>,
    pub beta_sin: f64,
    pub beta_cos: f64,
    pub s: u32,
    pub arima_orders: ArimaOrders,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub eta: Vec<f64>,
    pub noise_family: NoiseFamily,
    pub epsilon: Vec<f64>,
    pub mu_x: f64,
    pub sigma_x: f64,
    pub m: f64,
    pub m1: f64,
    pub m2: f64,
    pub bp: f64,
    pub sigma_corr: Vec<Vec<f64>>,
    pub overrides: Overrides,
}

impl SimulatedSeries {
    /// Dataset with `t = 1..n` and periods cycling `1..=s`.
    pub fn to_dataset(&self) -> Result<TimeSeriesDataset> {
        let (t, p) = derive_default_index(self.n, self.s);
        build_dataset(self.y.clone(), t, p, self.s, Some(self.x.clone()))
    }
}

/// Piecewise predictor-response shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PiecewiseShape {
    LinToSqrt { m: f64 },
    LinCoefChng { m1: f64, m2: f64 },
    QuadToCubic { m: f64 },
}

/// Evaluates the piecewise response at `x` with breakpoint `bp`.
pub fn piecewise_fx(x: f64, shape: PiecewiseShape, bp: f64) -> Result<f64> {
    Ok(match shape {
        PiecewiseShape::LinToSqrt { m } => {
            if bp.is_nan() || bp < 0.001 {
                return Err(Error::InvalidBreakpoint(bp));
            }
            if x < bp {
                m * x
            } else {
                x.sqrt()
            }
        }
        PiecewiseShape::LinCoefChng { m1, m2 } => {
            if x < bp {
                m1 * x
            } else {
                m2 * x
            }
        }
        PiecewiseShape::QuadToCubic { m } => {
            if x < bp {
                m * x * x
            } else {
                -m * x * x * x
            }
        }
    })
}

fn coefficients_valid(coefs: &[f64]) -> bool {
    match *coefs {
        [] => true,
        [a] => a.abs() < 1.0,
        [a, b] => b.abs() < 1.0 && b + a < 1.0 && b - a < 1.0,
        _ => false,
    }
}

fn open_unit_draw<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let v = rng.random_range(-1.0..1.0);
        if v != -1.0 {
            return v;
        }
    }
}

/// Draws AR or MA coefficients of the given order from `U(-1, 1)`,
/// rejecting order-2 pairs outside the stationarity triangle.
pub fn sample_arma_coefficients<R: Rng + ?Sized>(order: usize, rng: &mut R) -> Result<Vec<f64>> {
    match order {
        0 => Ok(Vec::new()),
        1 => Ok(vec![open_unit_draw(rng)]),
        2 => loop {
            let pair = [open_unit_draw(rng), open_unit_draw(rng)];
            if coefficients_valid(&pair) {
                return Ok(pair.to_vec());
            }
        },
        _ => Err(Error::InvalidCoefficients(format!(
            "order {order} is not supported (0, 1 or 2)"
        ))),
    }
}

/// Prefix sum.
fn integrate(values: &mut [f64]) {
    let mut acc = 0.0;
    for v in values {
        acc += *v;
        *v = acc;
    }
}

/// ARIMA(p, d, q) error of length `n` driven by standard-normal innovations.
///
/// The ARMA part runs from zero initial state for [`BURN_IN`] extra steps that
/// are discarded; the remainder is cumulatively summed `d` times.
pub fn simulate_arma_error<R: Rng + ?Sized>(
    orders: ArimaOrders,
    phi: &[f64],
    theta: &[f64],
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if orders.p > 2 || orders.d > 2 || orders.q > 2 {
        return Err(Error::InvalidCoefficients(format!(
            "orders ({}, {}, {}) must each be 0, 1 or 2",
            orders.p, orders.d, orders.q
        )));
    }
    if phi.len() != orders.p || theta.len() != orders.q {
        return Err(Error::InvalidCoefficients(format!(
            "expected {} AR and {} MA coefficients, got {} and {}",
            orders.p,
            orders.q,
            phi.len(),
            theta.len()
        )));
    }
    if !coefficients_valid(phi) || !coefficients_valid(theta) {
        return Err(Error::InvalidCoefficients(format!(
            "AR {phi:?} / MA {theta:?} violate the stationarity or invertibility constraints"
        )));
    }
    let total = n + BURN_IN;
    let innovations: Vec<f64> = (0..total).map(|_| rng.sample(StandardNormal)).collect();
    let mut arma = vec![0.0; total];
    for t in 0..total {
        let mut value = innovations[t];
        for (lag, coef) in phi.iter().enumerate() {
            if t > lag {
                value += coef * arma[t - lag - 1];
            }
        }
        for (lag, coef) in theta.iter().enumerate() {
            if t > lag {
                value += coef * innovations[t - lag - 1];
            }
        }
        arma[t] = value;
    }
    let mut out = arma.split_off(BURN_IN);
    for _ in 0..orders.d {
        integrate(&mut out);
    }
    Ok(out)
}

/// Random `d x d` correlation matrix from a normalized Gram matrix of a
/// `d x (d + 2)` standard-normal draw.
pub fn random_correlation_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Matrix> {
    if d == 0 {
        return Err(Error::InvalidConfig("correlation dimension must be at least 1".into()));
    }
    let g = DMatrix::<f64>::from_fn(d, d + 2, |_, _| rng.sample(StandardNormal));
    let mut gram = &g * g.transpose();
    let smallest = gram
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if smallest < 1e-10 {
        for i in 0..d {
            gram[(i, i)] += 1e-8;
        }
    }
    let mut corr = Matrix::zeros(d, d);
    for i in 0..d {
        corr.set(i, i, 1.0);
        for j in i + 1..d {
            let v = gram[(i, j)] / (gram[(i, i)] * gram[(j, j)]).sqrt();
            corr.set(i, j, v);
            corr.set(j, i, v);
        }
    }
    Ok(corr)
}

/// Draws `n` rows from `N(0, sigma)` via the lower Cholesky factor.
pub fn sample_multivariate_normal<R: Rng + ?Sized>(
    sigma: &Matrix,
    n: usize,
    rng: &mut R,
) -> Result<Matrix> {
    let d = sigma.rows();
    if sigma.cols() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: sigma.cols(),
        });
    }
    let factor = DMatrix::from_row_slice(d, d, sigma.as_slice())
        .cholesky()
        .ok_or_else(|| Error::InvalidConfig("covariance matrix is not positive definite".into()))?
        .l();
    let mut out = Matrix::zeros(n, d);
    let mut z = vec![0.0; d];
    for row in 0..n {
        for v in z.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        for i in 0..d {
            let value: f64 = (0..=i).map(|j| factor[(i, j)] * z[j]).sum();
            out.set(row, i, value);
        }
    }
    Ok(out)
}

mod stream {
    pub const CONSTANT: u64 = 0;
    pub const COEFFICIENTS: u64 = 1;
    pub const CORRELATION: u64 = 2;
    pub const MVN_PREDICTORS: u64 = 3;
    pub const SEASON: u64 = 4;
    pub const ARIMA_SPEC: u64 = 5;
    pub const ARIMA_INNOVATIONS: u64 = 6;
    pub const NOISE_SPEC: u64 = 7;
    pub const NOISE_DRAWS: u64 = 8;
    pub const PIECEWISE_PREDICTOR: u64 = 9;
    pub const PIECEWISE_SHAPE: u64 = 10;
}

fn component_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generates one series of `config.family`.
pub fn simulate_series(config: &SimulationConfig) -> Result<SimulatedSeries> {
    config.validate()?;
    let SimulationConfig {
        family,
        n,
        seed,
        d,
        overrides,
    } = *config;
    let rng = |s| component_rng(seed, s);

    let c = rng(stream::CONSTANT).random_range(-20.0..=20.0);

    let mut coef_rng = rng(stream::COEFFICIENTS);
    let b: Vec<f64> = (0..d).map(|_| coef_rng.random_range(-5.0..=5.0)).collect();

    let sigma = random_correlation_matrix(d, &mut rng(stream::CORRELATION))?;
    let mvn_x = sample_multivariate_normal(&sigma, n, &mut rng(stream::MVN_PREDICTORS))?;

    let mut season_rng = rng(stream::SEASON);
    let beta_sin = season_rng.random_range(-5.0..=5.0);
    let beta_cos = season_rng.random_range(-5.0..=5.0);
    let s = SEASONAL_PERIODS[season_rng.random_range(0..SEASONAL_PERIODS.len())];

    let mut arima_rng = rng(stream::ARIMA_SPEC);
    let arima_orders = ArimaOrders::new(
        arima_rng.random_range(0..=2),
        arima_rng.random_range(0..=2),
        arima_rng.random_range(0..=2),
    );
    let phi = sample_arma_coefficients(arima_orders.p, &mut arima_rng)?;
    let theta = sample_arma_coefficients(arima_orders.q, &mut arima_rng)?;
    let eta = if overrides.zero_arima {
        vec![0.0; n]
    } else {
        simulate_arma_error(arima_orders, &phi, &theta, n, &mut rng(stream::ARIMA_INNOVATIONS))?
    };

    let mut noise_rng = rng(stream::NOISE_SPEC);
    let drawn_kind = if noise_rng.random_bool(0.5) {
        NoiseKind::Normal
    } else {
        NoiseKind::Poisson
    };
    let parameter = noise_rng.random_range(0.1..=20.0);
    let noise_family = match overrides.noise_kind.unwrap_or(drawn_kind) {
        NoiseKind::Normal => NoiseFamily::Normal { sigma: parameter },
        NoiseKind::Poisson => NoiseFamily::Poisson { lambda: parameter },
    };
    let epsilon: Vec<f64> = if overrides.zero_noise {
        vec![0.0; n]
    } else {
        let mut draws = rng(stream::NOISE_DRAWS);
        match noise_family {
            NoiseFamily::Normal { sigma } => {
                let dist = Normal::new(0.0, sigma)
                    .map_err(|e| Error::InvalidConfig(format!("noise: {e}")))?;
                (0..n).map(|_| dist.sample(&mut draws)).collect()
            }
            NoiseFamily::Poisson { lambda } => {
                let dist = Poisson::new(lambda)
                    .map_err(|e| Error::InvalidConfig(format!("noise: {e}")))?;
                (0..n).map(|_| dist.sample(&mut draws)).collect()
            }
        }
    };

    let mut predictor_rng = rng(stream::PIECEWISE_PREDICTOR);
    let mu_x = predictor_rng.random_range(-5.0..=5.0);
    let sigma_x = predictor_rng.random_range(0.001..=10.0);
    let predictor_dist =
        Normal::new(mu_x, sigma_x).map_err(|e| Error::InvalidConfig(format!("predictor: {e}")))?;
    let single_x: Vec<f64> = (0..n).map(|_| predictor_dist.sample(&mut predictor_rng)).collect();

    let mut shape_rng = rng(stream::PIECEWISE_SHAPE);
    let m = shape_rng.random_range(-5.0..=5.0);
    let m2 = shape_rng.random_range(-5.0..=5.0);
    let m1 = m;
    let mut bp = shape_rng.random_range(mu_x - sigma_x..=mu_x + sigma_x);
    if family == Family::LinToSqrt {
        bp = bp.max(0.001);
    }

    let (x, exogenous): (Matrix, Vec<f64>) = match family {
        Family::MvnormX => {
            let term = (0..n)
                .map(|t| mvn_x.row(t).iter().zip(&b).map(|(xv, bv)| xv * bv).sum())
                .collect();
            (mvn_x, term)
        }
        _ => {
            let shape = match family {
                Family::LinToSqrt => PiecewiseShape::LinToSqrt { m },
                Family::LinCoefChng => PiecewiseShape::LinCoefChng { m1, m2 },
                _ => PiecewiseShape::QuadToCubic { m },
            };
            let term = single_x
                .iter()
                .map(|&v| piecewise_fx(v, shape, bp))
                .collect::<Result<_>>()?;
            (Matrix::column(single_x), term)
        }
    };

    let y = (0..n)
        .map(|i| {
            let t = (i + 1) as f64;
            let angle = 2.0 * PI * t / f64::from(s);
            let exo = if overrides.zero_exogenous { 0.0 } else { exogenous[i] };
            c + exo + beta_sin * angle.sin() + beta_cos * angle.cos() + eta[i] + epsilon[i]
        })
        .collect();

    let sigma_corr = (0..d).map(|i| sigma.row(i).to_vec()).collect();
    Ok(SimulatedSeries {
        family,
        n,
        seed,
        y,
        x,
        c,
        b,
        beta_sin,
        beta_cos,
        s,
        arima_orders,
        phi,
        theta,
        eta,
        noise_family,
        epsilon,
        mu_x,
        sigma_x,
        m,
        m1,
        m2,
        bp,
        sigma_corr,
        overrides,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeded(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn coefficient_orders() {
        let mut rng = seeded(1);
        assert!(sample_arma_coefficients(0, &mut rng).unwrap().is_empty());
        let one = sample_arma_coefficients(1, &mut rng).unwrap();
        assert!(one.len() == 1 && one[0].abs() < 1.0);
        assert!(sample_arma_coefficients(3, &mut rng).is_err());
        for _ in 0..1000 {
            let pair = sample_arma_coefficients(2, &mut rng).unwrap();
            assert!(pair[1].abs() < 1.0 && pair[1] + pair[0] < 1.0 && pair[1] - pair[0] < 1.0);
        }
    }

    #[test]
    fn white_noise_and_zero_coefficient_agree() {
        let white = simulate_arma_error(ArimaOrders::new(0, 0, 0), &[], &[], 50, &mut seeded(9)).unwrap();
        let ar0 = simulate_arma_error(ArimaOrders::new(1, 0, 0), &[0.0], &[], 50, &mut seeded(9)).unwrap();
        assert_eq!(white, ar0);

        let mut raw = seeded(9);
        let innovations: Vec<f64> = (0..BURN_IN + 50).map(|_| raw.sample(StandardNormal)).collect();
        assert_eq!(white, innovations[BURN_IN..]);
    }

    #[test]
    fn integrated_series_is_prefix_sum() {
        let white = simulate_arma_error(ArimaOrders::new(0, 0, 0), &[], &[], 40, &mut seeded(4)).unwrap();
        let walk = simulate_arma_error(ArimaOrders::new(0, 1, 0), &[], &[], 40, &mut seeded(4)).unwrap();
        let mut acc = 0.0;
        for (w, x) in white.iter().zip(&walk) {
            acc += w;
            assert!((acc - x).abs() < 1e-12);
        }
    }

    #[test]
    fn arma_rejects_bad_coefficients() {
        let mut rng = seeded(0);
        assert!(simulate_arma_error(ArimaOrders::new(1, 0, 0), &[1.0], &[], 10, &mut rng).is_err());
        assert!(simulate_arma_error(ArimaOrders::new(2, 0, 0), &[0.5, 0.6], &[], 10, &mut rng).is_err());
        assert!(simulate_arma_error(ArimaOrders::new(1, 0, 0), &[], &[], 10, &mut rng).is_err());
        assert!(simulate_arma_error(ArimaOrders::new(0, 3, 0), &[], &[], 10, &mut rng).is_err());
    }

    #[test]
    fn correlation_matrix_shape() {
        let mut rng = seeded(2);
        assert_eq!(random_correlation_matrix(1, &mut rng).unwrap().as_slice(), &[1.0]);
        let c = random_correlation_matrix(3, &mut rng).unwrap();
        for i in 0..3 {
            assert_eq!(c.get(i, i), 1.0);
            for j in 0..3 {
                assert_eq!(c.get(i, j), c.get(j, i));
                if i != j {
                    assert!(c.get(i, j) > -1.0 && c.get(i, j) < 1.0);
                }
            }
        }
    }

    #[test]
    fn piecewise_examples() {
        assert_eq!(piecewise_fx(4.0, PiecewiseShape::LinToSqrt { m: 2.0 }, 1.0).unwrap(), 2.0);
        assert_eq!(piecewise_fx(0.5, PiecewiseShape::LinToSqrt { m: 2.0 }, 1.0).unwrap(), 1.0);
        let chng = PiecewiseShape::LinCoefChng { m1: -3.0, m2: 5.0 };
        assert_eq!(piecewise_fx(-2.0, chng, 0.0).unwrap(), 6.0);
        assert_eq!(piecewise_fx(2.0, chng, 0.0).unwrap(), 10.0);
        let cubic = PiecewiseShape::QuadToCubic { m: 1.0 };
        assert_eq!(piecewise_fx(2.0, cubic, 0.0).unwrap(), -8.0);
        assert_eq!(piecewise_fx(-2.0, cubic, 0.0).unwrap(), 4.0);
        assert!(matches!(
            piecewise_fx(1.0, PiecewiseShape::LinToSqrt { m: 1.0 }, 0.0),
            Err(Error::InvalidBreakpoint(_))
        ));
    }

    #[test]
    fn components_satisfy_constraints() {
        for seed in 0..40 {
            for family in Family::ALL {
                let s = simulate_series(&SimulationConfig::new(family, 60, seed)).unwrap();
                assert_eq!(s.y.len(), 60);
                assert!((-20.0..=20.0).contains(&s.c));
                for v in s.b.iter().chain([&s.beta_sin, &s.beta_cos, &s.m, &s.m1, &s.m2]) {
                    assert!((-5.0..=5.0).contains(v));
                }
                assert!(SEASONAL_PERIODS.contains(&s.s));
                assert!(coefficients_valid(&s.phi) && coefficients_valid(&s.theta));
                assert!((0.1..=20.0).contains(&s.noise_family.parameter()));
                if family == Family::LinToSqrt {
                    assert!(s.bp >= 0.001);
                }
                let cols = if family == Family::MvnormX { 3 } else { 1 };
                assert_eq!(s.x.cols(), cols);
            }
        }
    }

    #[test]
    fn families_share_common_components() {
        let a = simulate_series(&SimulationConfig::new(Family::MvnormX, 50, 5)).unwrap();
        let b = simulate_series(&SimulationConfig::new(Family::QuadToCubic, 50, 5)).unwrap();
        assert_eq!((a.c, a.s, &a.eta, &a.epsilon), (b.c, b.s, &b.eta, &b.epsilon));
    }

    #[test]
    fn seeded_runs_are_identical() {
        let cfg = SimulationConfig::new(Family::LinCoefChng, 80, 77);
        assert_eq!(simulate_series(&cfg).unwrap(), simulate_series(&cfg).unwrap());
    }

    #[test]
    fn rejects_short_series() {
        assert!(simulate_series(&SimulationConfig::new(Family::MvnormX, 29, 0)).is_err());
        let cfg = SimulationConfig::new(Family::MvnormX, 30, 0).with_predictors(0);
        assert!(simulate_series(&cfg).is_err());
    }

    #[test]
    fn pure_season_peaks_at_its_frequency() {
        // 84 is a multiple of every seasonal period
        let n = 84;
        let overrides = Overrides {
            zero_exogenous: true,
            zero_arima: true,
            zero_noise: true,
            noise_kind: None,
        };
        for seed in 0..12 {
            let cfg = SimulationConfig::new(Family::MvnormX, n, seed).with_overrides(overrides);
            let s = simulate_series(&cfg).unwrap();
            let centered: Vec<f64> = s.y.iter().map(|v| v - s.c).collect();
            let power = |freq: usize| {
                let (mut re, mut im) = (0.0, 0.0);
                for (t, v) in centered.iter().enumerate() {
                    let angle = 2.0 * PI * (freq * t) as f64 / n as f64;
                    re += v * angle.cos();
                    im -= v * angle.sin();
                }
                re * re + im * im
            };
            let peak = (1..=n / 2)
                .max_by(|&a, &b| power(a).total_cmp(&power(b)))
                .unwrap();
            assert_eq!(peak, n / s.s as usize, "seed {seed}");
        }
    }

    fn skewness(values: &[f64]) -> f64 {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
        m3 / m2.powf(1.5)
    }

    #[test]
    fn poisson_noise_skews_right_on_average() {
        let mut poisson_total = 0.0;
        let mut normal_total = 0.0;
        for seed in 0..100 {
            let base = Overrides {
                zero_exogenous: true,
                zero_arima: true,
                ..Overrides::default()
            };
            for (kind, total) in [
                (NoiseKind::Poisson, &mut poisson_total),
                (NoiseKind::Normal, &mut normal_total),
            ] {
                let overrides = Overrides {
                    noise_kind: Some(kind),
                    ..base
                };
                let cfg = SimulationConfig::new(Family::MvnormX, 200, seed).with_overrides(overrides);
                *total += skewness(&simulate_series(&cfg).unwrap().y);
            }
        }
        assert!(poisson_total / 100.0 >= normal_total / 100.0);
    }
}
