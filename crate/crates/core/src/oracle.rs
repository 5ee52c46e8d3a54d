//! Oracle price paths and the pool's reaction to oracle updates.
//!
//! When the oracle moves, the reserves stay where they are and the curve is
//! re-anchored through them at the new price. Only the `z * p` part of the
//! spot price changes.
//!
//! Stochastic paths use ChaCha8 seeded with `seed_from_u64(seed)` and standard
//! normal draws, so a seed always reproduces the same path.

use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{anchor_k, PoolState};
use crate::error::{require_positive, AmmError, Result};
use crate::format::fmt_num;
use crate::params::OraclePrice;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathSource {
    Constant,
    Schedule,
    Gbm,
    Replay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathPoint {
    pub step: u64,
    pub price: OraclePrice,
}

/// Ordered oracle prices indexed by step, starting at step 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PricePath {
    source: PathSource,
    points: Vec<PathPoint>,
}

/// Geometric Brownian motion with per-step drift and volatility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbmParams {
    pub initial_price: f64,
    pub mu: f64,
    pub sigma: f64,
    /// Number of points in the path, including the initial price.
    pub steps: usize,
    pub seed: u64,
}

/// Description of a path to generate.
#[derive(Debug, Clone, PartialEq)]
pub enum PathSpec {
    Constant { price: f64, steps: usize },
    Schedule { prices: Vec<f64> },
    Gbm(GbmParams),
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("line {line}: {message}")]
    Line { line: u64, message: String },
    #[error("price path is empty")]
    Empty,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PricePath {
    fn from_prices(source: PathSource, prices: impl IntoIterator<Item = OraclePrice>) -> Self {
        let points = prices
            .into_iter()
            .enumerate()
            .map(|(i, price)| PathPoint { step: i as u64, price })
            .collect();
        PricePath { source, points }
    }

    pub fn source(&self) -> PathSource {
        self.source
    }

    pub fn points(&self) -> &[PathPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn prices(&self) -> impl Iterator<Item = OraclePrice> + '_ {
        self.points.iter().map(|pt| pt.price)
    }

    /// Reads the `step,price` replay format.
    ///
    /// Steps must start at 0 and increase strictly; prices must be positive.
    pub fn read_csv<R: Read>(reader: R) -> std::result::Result<Self, ReplayError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "step" || &headers[1] != "price" {
            return Err(ReplayError::Line {
                line: 1,
                message: format!(
                    "expected header `step,price`, found `{}`",
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            });
        }

        let mut points: Vec<PathPoint> = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let bad = |message: String| ReplayError::Line { line, message };
            let step: u64 = record[0]
                .parse()
                .map_err(|_| bad(format!("invalid step `{}`", &record[0])))?;
            let price: f64 = record[1]
                .parse()
                .map_err(|_| bad(format!("invalid price `{}`", &record[1])))?;
            let price =
                OraclePrice::new(price).map_err(|_| bad(format!("price must be positive, got {}", &record[1])))?;
            match points.last() {
                None if step != 0 => return Err(bad(format!("first step must be 0, got {step}"))),
                Some(prev) if step <= prev.step => {
                    return Err(bad(format!("step {step} does not increase past {}", prev.step)))
                }
                _ => {}
            }
            points.push(PathPoint { step, price });
        }
        if points.is_empty() {
            return Err(ReplayError::Empty);
        }
        Ok(PricePath {
            source: PathSource::Replay,
            points,
        })
    }

    pub fn write_csv<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writeln!(writer, "step,price")?;
        for pt in &self.points {
            writeln!(writer, "{},{}", pt.step, fmt_num(pt.price.get()))?;
        }
        Ok(())
    }
}

pub fn generate_path(spec: &PathSpec) -> Result<PricePath> {
    match spec {
        PathSpec::Constant { price, steps } => {
            let price = OraclePrice::new(*price)?;
            Ok(PricePath::from_prices(
                PathSource::Constant,
                std::iter::repeat_n(price, *steps),
            ))
        }
        PathSpec::Schedule { prices } => {
            let prices = prices
                .iter()
                .map(|&p| OraclePrice::new(p))
                .collect::<Result<Vec<_>>>()?;
            Ok(PricePath::from_prices(PathSource::Schedule, prices))
        }
        PathSpec::Gbm(params) => generate_gbm(params),
    }
}

/// `p[t+1] = p[t] * exp((mu - sigma^2 / 2) + sigma * N(0, 1))`.
pub fn generate_gbm(params: &GbmParams) -> Result<PricePath> {
    let p0 = require_positive("initial price", params.initial_price)?;
    if !(params.sigma >= 0.0 && params.sigma.is_finite()) {
        return Err(AmmError::Domain {
            what: "volatility sigma",
            value: params.sigma,
        });
    }
    if !params.mu.is_finite() {
        return Err(AmmError::Domain {
            what: "drift mu",
            value: params.mu,
        });
    }
    if params.steps == 0 {
        return Err(AmmError::Domain {
            what: "step count",
            value: 0.0,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let drift = params.mu - 0.5 * params.sigma * params.sigma;
    let mut prices = Vec::with_capacity(params.steps);
    let mut p = p0;
    prices.push(OraclePrice::new(p)?);
    for _ in 1..params.steps {
        let shock: f64 = StandardNormal.sample(&mut rng);
        p *= (drift + params.sigma * shock).exp();
        prices.push(OraclePrice::new(p)?);
    }
    Ok(PricePath::from_prices(PathSource::Gbm, prices))
}

/// Re-anchors the pool's curve at its current reserves for a new oracle price.
pub fn apply_oracle_update(state: &PoolState, p_new: OraclePrice) -> Result<PoolState> {
    if state.oracle_price() == p_new || state.mix().is_constant_product() {
        // p does not enter the z = 0 curve.
        return Ok(state.with_curve(p_new, state.k()));
    }
    let k = anchor_k(state.x(), state.y(), p_new, state.mix())?;
    Ok(state.with_curve(p_new, k))
}
