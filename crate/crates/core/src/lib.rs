//! An automated market maker whose marginal price blends the pool's reserve
//! ratio with an external oracle price.
//!
//! The crate is organised bottom-up:
//!
//! - [`curve`]: the reserve function, its derivatives, and [`PoolState`].
//! - [`swap`]: exact-in and exact-out trades along the curve.
//! - [`analytics`]: impermanent loss, arbitrage rebalancing, slippage.
//! - [`oracle`]: price paths and re-anchoring on oracle updates.
//! - [`simulator`]: multi-pool scenario runs and reserve-curve sweeps.
//!
//! ```
//! use qubitswap::{MixParameter, OraclePrice, PoolState, TradeDirection, swap_exact_in};
//!
//! let pool = PoolState::anchored(1.0, 1.0, OraclePrice::new(1.0)?, MixParameter::new(0.5)?)?;
//! let trade = swap_exact_in(&pool, TradeDirection::SellX, 0.1)?;
//! assert!((trade.amount_out - 0.0953832).abs() < 1e-7);
//! # Ok::<(), qubitswap::AmmError>(())
//! ```

pub mod analytics;
pub mod curve;
pub mod error;
pub mod format;
pub mod oracle;
pub mod params;
pub mod root;
pub mod simulator;
pub mod swap;

pub use analytics::{
    concentration_coefficient, il_closed_form, il_simulated, il_standard_amm, normalized_pool, rebalance_to_oracle,
    slippage_estimate, slippage_exact, slippage_taylor, IlReport, SlippageEstimate, TaylorSlippage,
};
pub use curve::{anchor_k, d2y_dx2, dy_dx, max_x_bound, reserve_y, PoolState};
pub use error::AmmError;
pub use oracle::{apply_oracle_update, generate_gbm, generate_path, GbmParams, PathSpec, PricePath};
pub use params::{MixParameter, OraclePrice};
pub use simulator::{run_scenario, sweep_reserve_curve, CurveAnchor, ScenarioConfig, ScenarioRun, StepMetrics};
pub use swap::{quote, swap_exact_in, swap_exact_out, SwapResult, TradeDirection};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/curve.md")]
    mod curve {}
    #[doc = include_str!("../../../book/src/swaps.md")]
    mod swaps {}
    #[doc = include_str!("../../../book/src/impermanent-loss.md")]
    mod impermanent_loss {}
    #[doc = include_str!("../../../book/src/slippage.md")]
    mod slippage {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
