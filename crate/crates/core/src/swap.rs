//! Trades along a pool's anchored curve.
//!
//! There are no fees: a trade moves the reserves along the curve `(k, p, z)`
//! and the trader receives exactly what the pool gives up.
//!
//! Output amounts are computed from the reserve ratio with `ln_1p`/`expm1`
//! rather than as `y - y(x + dx)`, so small trades keep full relative
//! precision instead of losing digits to cancellation.

use serde::{Deserialize, Serialize};

use crate::curve::{oracle_slope, PoolState};
use crate::error::{require_positive, AmmError, Result};
use crate::root::solve_increasing;

/// Trades smaller than this fraction of the input reserve are rejected.
pub const DUST_FRACTION: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TradeDirection {
    /// Trader adds X and removes Y.
    SellX,
    /// Trader adds Y and removes X.
    SellY,
}

impl TradeDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            TradeDirection::SellX => "sell-x",
            TradeDirection::SellY => "sell-y",
        }
    }
}

/// Outcome of a trade. Prices are in Y per X for both directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwapResult {
    pub direction: TradeDirection,
    pub amount_in: f64,
    pub amount_out: f64,
    /// Average price actually paid: Y exchanged per unit X exchanged.
    pub exec_price: f64,
    pub spot_before: f64,
    pub spot_after: f64,
    /// Price-impact cost to the trader; never negative.
    pub slippage_cost: f64,
    pub new_state: PoolState,
}

impl SwapResult {
    /// Amount of X that changed hands.
    pub fn x_volume(&self) -> f64 {
        match self.direction {
            TradeDirection::SellX => self.amount_in,
            TradeDirection::SellY => self.amount_out,
        }
    }
}

/// `y(x) + slope * x`, which on the curve equals `k * x^(z-1)`.
#[inline]
fn power_term(state: &PoolState) -> f64 {
    state.y() + oracle_slope(state.oracle_price(), state.mix()) * state.x()
}

/// Y released by the pool when `dx` X is added, with its derivative in `dx`.
fn y_out_for_x_in(state: &PoolState, dx: f64) -> (f64, f64) {
    let x = state.x();
    let z = state.mix().get();
    let slope = oracle_slope(state.oracle_price(), state.mix());
    let a = power_term(state);
    let log_ratio = (dx / x).ln_1p();
    let out = -a * ((z - 1.0) * log_ratio).exp_m1() + slope * dx;
    let d_out = a * (1.0 - z) * ((z - 2.0) * log_ratio).exp() / x + slope;
    (out, d_out)
}

/// Y the pool must receive to release `dx` X.
fn y_in_for_x_out(state: &PoolState, dx: f64) -> f64 {
    let z = state.mix().get();
    let slope = oracle_slope(state.oracle_price(), state.mix());
    let log_ratio = (-dx / state.x()).ln_1p();
    power_term(state) * ((z - 1.0) * log_ratio).exp_m1() + slope * dx
}

/// Y the pool must receive to shrink its X reserve by the factor `exp(-t)`,
/// with the derivative in `t`. Working in `t` keeps full relative precision
/// on the remaining reserve when a trade drains most of it.
fn y_in_for_log_shrink(state: &PoolState, t: f64) -> (f64, f64) {
    let z = state.mix().get();
    let slope_x = oracle_slope(state.oracle_price(), state.mix()) * state.x();
    let a = power_term(state);
    let needed = a * ((1.0 - z) * t).exp_m1() - slope_x * (-t).exp_m1();
    let d_needed = a * (1.0 - z) * ((1.0 - z) * t).exp() + slope_x * (-t).exp();
    (needed, d_needed)
}

fn reject_dust(amount: f64, reserve: f64) -> Result<()> {
    if amount < DUST_FRACTION * reserve {
        Err(AmmError::Dust { amount, reserve })
    } else {
        Ok(())
    }
}

fn finish(
    state: &PoolState,
    direction: TradeDirection,
    amount_in: f64,
    amount_out: f64,
    new_state: PoolState,
) -> SwapResult {
    let spot_before = state.spot_price();
    let spot_after = new_state.spot_price();
    let (exec_price, slippage_cost) = match direction {
        TradeDirection::SellX => {
            let exec = amount_out / amount_in;
            (exec, (spot_before - exec).max(0.0))
        }
        TradeDirection::SellY => {
            let exec = amount_in / amount_out;
            (exec, (exec - spot_before).max(0.0))
        }
    };
    SwapResult {
        direction,
        amount_in,
        amount_out,
        exec_price,
        spot_before,
        spot_after,
        slippage_cost,
        new_state,
    }
}

/// Sells exactly `amount_in` of the input asset into the pool.
pub fn swap_exact_in(state: &PoolState, direction: TradeDirection, amount_in: f64) -> Result<SwapResult> {
    let amount_in = require_positive("amount in", amount_in)?;
    let (x, y) = (state.x(), state.y());
    let z = state.mix();

    match direction {
        TradeDirection::SellX => {
            reject_dust(amount_in, x)?;
            let bound = state.max_x_bound();
            let too_large = AmmError::TradeTooLarge {
                amount_in,
                max_amount_in: bound - x,
            };
            let new_x = x + amount_in;
            if new_x >= bound {
                return Err(too_large);
            }
            let (amount_out, _) = y_out_for_x_in(state, amount_in);
            let new_y = y - amount_out;
            if !(new_y > 0.0 && amount_out > 0.0) {
                return Err(too_large);
            }
            let next = state.with_reserves(new_x, new_y);
            Ok(finish(state, direction, amount_in, amount_out, next))
        }
        TradeDirection::SellY => {
            reject_dust(amount_in, y)?;
            let p = state.oracle_price().get();
            let (amount_out, new_x) = if z.is_pure_oracle() {
                let out = amount_in / p;
                (out, x - out)
            } else if z.is_constant_product() {
                (x * amount_in / (y + amount_in), x * y / (y + amount_in))
            } else {
                // The first term alone reaches `amount_in` at `t_hi`, so the root is below it.
                let t_hi = (amount_in / power_term(state)).ln_1p() / (1.0 - z.get());
                let guess = amount_in / (state.spot_price() * x);
                let t = solve_increasing(|t| y_in_for_log_shrink(state, t), amount_in, 0.0, t_hi, guess)?;
                (-x * (-t).exp_m1(), x * (-t).exp())
            };
            if !(new_x > 0.0 && amount_out > 0.0) {
                // Only the z = 1 line reaches x = 0 at a finite input.
                let max_amount_in = if z.is_pure_oracle() { p * x } else { f64::INFINITY };
                return Err(AmmError::TradeTooLarge {
                    amount_in,
                    max_amount_in,
                });
            }
            let next = state.with_reserves(new_x, y + amount_in);
            Ok(finish(state, direction, amount_in, amount_out, next))
        }
    }
}

/// Read-only price check; numerically identical to [`swap_exact_in`].
pub fn quote(state: &PoolState, direction: TradeDirection, amount_in: f64) -> Result<SwapResult> {
    swap_exact_in(state, direction, amount_in)
}

/// Buys exactly `amount_out` of the output asset, solving for the input.
pub fn swap_exact_out(state: &PoolState, direction: TradeDirection, amount_out: f64) -> Result<SwapResult> {
    let amount_out = require_positive("amount out", amount_out)?;
    let (x, y) = (state.x(), state.y());
    let z = state.mix();

    let amount_in = match direction {
        TradeDirection::SellX => {
            if amount_out >= y {
                return Err(AmmError::OutputUnavailable {
                    amount_out,
                    available: y,
                });
            }
            if z.is_pure_oracle() {
                amount_out / state.oracle_price().get()
            } else if z.is_constant_product() {
                x * amount_out / (y - amount_out)
            } else {
                let hi = state.max_x_bound() - x;
                let guess = amount_out / state.spot_price();
                solve_increasing(|dx| y_out_for_x_in(state, dx), amount_out, 0.0, hi, guess)?
            }
        }
        TradeDirection::SellY => {
            if amount_out >= x {
                return Err(AmmError::OutputUnavailable {
                    amount_out,
                    available: x,
                });
            }
            y_in_for_x_out(state, amount_out)
        }
    };
    swap_exact_in(state, direction, amount_in)
}
