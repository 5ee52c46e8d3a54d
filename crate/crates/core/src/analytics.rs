//! Impermanent loss and slippage.
//!
//! Portfolio values are measured in X units (`x + y / p`). Prices are Y per X.
//!
//! Impermanent loss is reported two ways. `il_paper` is the loss per unit of
//! initial X reserve, `1 + rho - 2 rho^(1/(2-z))` with `rho = p0 / p1`; it is
//! the negation of the classic `2 sqrt(r) - r - 1` at `z = 0`. `il_relative`
//! divides that by the hold value so it is a fraction of what the LP would
//! have had by holding.

use serde::Serialize;

use crate::curve::{d2y_dx2, dy_dx, oracle_slope, pow_exp, PoolState};
use crate::error::{require_positive, AmmError, Result};
use crate::params::{MixParameter, OraclePrice};
use crate::swap::{swap_exact_in, TradeDirection};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IlReport {
    /// Old over new oracle price, `p0 / p1`.
    pub rho: f64,
    pub z: MixParameter,
    pub il_paper: f64,
    pub il_relative: f64,
    /// Pool value per unit initial X, in X units.
    pub v_pool: f64,
    /// Hold value per unit initial X, in X units.
    pub v_hold: f64,
}

impl IlReport {
    fn from_values(rho: f64, z: MixParameter, v_pool: f64, v_hold: f64) -> Self {
        let il_paper = v_hold - v_pool;
        IlReport {
            rho,
            z,
            il_paper,
            il_relative: il_paper / v_hold,
            v_pool,
            v_hold,
        }
    }
}

/// Closed-form loss after the oracle moves by `rho = p0 / p1` and arbitrage
/// rebalances a balanced pool.
pub fn il_closed_form(z: MixParameter, rho: f64) -> Result<IlReport> {
    let rho = require_positive("price ratio", rho)?;
    let v_pool = 2.0 * pow_exp(rho, 1.0 / (2.0 - z.get()));
    Ok(IlReport::from_values(rho, z, v_pool, 1.0 + rho))
}

/// Classic constant-product loss `2 sqrt(r) - r - 1` (non-positive).
pub fn il_standard_amm(r: f64) -> Result<f64> {
    let r = require_positive("price ratio", r)?;
    Ok(2.0 * r.sqrt() - r - 1.0)
}

/// Loss measured on actual pool states: a balanced pool at `p0` is moved to
/// the oracle price `p1` by [`rebalance_to_oracle`] and both portfolios are
/// valued at `p1`.
pub fn il_simulated(x0: f64, p0: OraclePrice, p1: OraclePrice, z: MixParameter) -> Result<IlReport> {
    let x0 = require_positive("initial x reserve", x0)?;
    if z.is_pure_oracle() {
        return Err(AmmError::Unsupported(
            "impermanent loss simulation needs z < 1: a z = 1 pool has no rebalancing trade",
        ));
    }
    let start = PoolState::balanced(x0, p0, z)?;
    let end = rebalance_to_oracle(&start, p1)?;
    let v_hold = start.value_in_x(p1) / x0;
    let v_pool = end.value_in_x(p1) / x0;
    Ok(IlReport::from_values(p0.get() / p1.get(), z, v_pool, v_hold))
}

/// Moves the pool to the point where its spot price equals `p_new`.
///
/// The curve constant `k` is held while the oracle term switches to `p_new`,
/// and the reserves move to `x* = ((2 - z) k / (2 p_new))^(1/(2-z))`,
/// `y* = p_new x*`. From a balanced pool this gives `x* = x0 (p0/p1)^(1/(2-z))`.
///
/// If the pool was already re-anchored at `p_new` (see
/// [`crate::oracle::apply_oracle_update`]) the oracle term does not change
/// and this is an ordinary arbitrage trade along the curve.
pub fn rebalance_to_oracle(state: &PoolState, p_new: OraclePrice) -> Result<PoolState> {
    let z = state.mix();
    if z.is_pure_oracle() {
        return Err(AmmError::Unsupported(
            "a z = 1 pool always quotes the oracle price; there is no rebalancing point",
        ));
    }
    if state.oracle_price() == p_new && state.spot_price() == p_new.get() {
        return Ok(*state);
    }
    let zf = z.get();
    let x_star = pow_exp((2.0 - zf) * state.k() / (2.0 * p_new.get()), 1.0 / (2.0 - zf));
    let y_star = p_new.get() * x_star;
    Ok(state.with_curve(p_new, state.k()).with_reserves(x_star, y_star))
}

/// Second-order estimates of the price impact of selling `trade_size` X.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaylorSlippage {
    /// `1/2 * y'' * dx`.
    pub second_derivative_form: f64,
    /// The same quantity written through the first derivative,
    /// `(dx (z - 2) / (2x)) * (dy/dx + z p / (2 - z))`.
    pub simplified_form: f64,
    pub trade_size: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlippageEstimate {
    pub taylor_second_derivative_form: f64,
    pub taylor_simplified_form: f64,
    pub exact: f64,
    pub trade_size: f64,
}

/// Taylor slippage for selling `dx` X, as a non-negative trader cost.
pub fn slippage_taylor(state: &PoolState, dx: f64) -> Result<TaylorSlippage> {
    let dx = require_positive("trade size", dx)?;
    let (k, x, p, z) = (state.k(), state.x(), state.oracle_price(), state.mix());
    let bound = state.max_x_bound();
    if x + dx >= bound {
        return Err(AmmError::TradeTooLarge {
            amount_in: dx,
            max_amount_in: bound - x,
        });
    }
    let zf = z.get();
    let second_derivative_form = 0.5 * d2y_dx2(k, x, p, z)? * dx;
    let simplified_form = dx * (zf - 2.0) / (2.0 * x) * (dy_dx(k, x, p, z)? + oracle_slope(p, z));
    Ok(TaylorSlippage {
        second_derivative_form,
        simplified_form,
        trade_size: dx,
    })
}

/// Realized slippage `|exec_price - spot_before|` of an actual trade.
pub fn slippage_exact(state: &PoolState, direction: TradeDirection, amount_in: f64) -> Result<f64> {
    Ok(swap_exact_in(state, direction, amount_in)?.slippage_cost)
}

/// Both Taylor forms and the realized slippage for selling `dx` X.
pub fn slippage_estimate(state: &PoolState, dx: f64) -> Result<SlippageEstimate> {
    let taylor = slippage_taylor(state, dx)?;
    let exact = slippage_exact(state, TradeDirection::SellX, dx)?;
    Ok(SlippageEstimate {
        taylor_second_derivative_form: taylor.second_derivative_form,
        taylor_simplified_form: taylor.simplified_form,
        exact,
        trade_size: dx,
    })
}

/// The unit pool `x = y = p = 1` used for comparing mix parameters.
pub fn normalized_pool(z: MixParameter) -> PoolState {
    let one = OraclePrice::new(1.0).expect("1 is a valid price");
    PoolState::anchored(1.0, 1.0, one, z).expect("unit pool is on every curve")
}

/// Taylor slippage per unit trade size on the normalized pool,
/// `1/2 * k(z) * (z - 1)(z - 2)` with `k(z) = 1 + z / (2 - z)`.
pub fn concentration_coefficient(z: MixParameter) -> f64 {
    let pool = normalized_pool(z);
    0.5 * pool.k() * (z.get() - 1.0) * (z.get() - 2.0)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(v: f64) -> MixParameter {
        MixParameter::new(v).unwrap()
    }
    fn p(v: f64) -> OraclePrice {
        OraclePrice::new(v).unwrap()
    }
    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
    }

    /// Independent route to the rebalanced reserve: bisection on
    /// `spot(x) - p1` along the curve `(k, p1, z)`, using only the
    /// closed-form reserve function.
    fn rebalanced_x_by_bisection(k: f64, p1: f64, zf: f64) -> f64 {
        let spot = |x: f64| {
            let y = k * x.powf(zf - 1.0) - zf * p1 * x / (2.0 - zf);
            (1.0 - zf) * y / x + zf * p1
        };
        let (mut lo, mut hi) = (1e-9_f64, 1e9_f64);
        for _ in 0..400 {
            let mid = (lo * hi).sqrt();
            if spot(mid) > p1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo * hi).sqrt()
    }

    #[test]
    fn closed_form_examples() {
        for zf in [0.0, 0.3, 0.9, 1.0] {
            let r = il_closed_form(z(zf), 1.0).unwrap();
            assert_eq!(r.il_paper, 0.0);
            assert_eq!(r.il_relative, 0.0);
        }
        assert_eq!(il_closed_form(z(0.0), 4.0).unwrap().il_paper, 1.0);
        // 5 - 2 * 4^(1/1.1) in 30-digit arithmetic.
        let r = il_closed_form(z(0.9), 4.0).unwrap();
        assert!(close(r.il_paper, -2.052_730_039_968_169_5, 1e-14));
        assert!(close(r.il_relative, r.il_paper / 5.0, 1e-15));
        assert!(il_closed_form(z(0.5), 0.0).is_err());
        assert!(il_closed_form(z(0.5), -1.0).is_err());
    }

    #[test]
    fn standard_amm_examples() {
        assert_eq!(il_standard_amm(1.0).unwrap(), 0.0);
        assert_eq!(il_standard_amm(4.0).unwrap(), -1.0);
        assert_eq!(il_standard_amm(0.25).unwrap(), -0.25);
        assert!(il_standard_amm(0.0).is_err());
    }

    #[test]
    fn simulated_examples() {
        let r = il_simulated(1.0, p(1.0), p(1.0), z(0.5)).unwrap();
        assert!(r.il_paper.abs() < 1e-15);
        let r = il_simulated(1.0, p(1.0), p(0.25), z(0.0)).unwrap();
        assert!(close(r.il_paper, 1.0, 1e-12));
        let r = il_simulated(2.0, p(3.0), p(1.5), z(0.6)).unwrap();
        assert!(close(r.il_paper, -0.281_341_424_030_551_72, 1e-12));
        assert!(matches!(
            il_simulated(1.0, p(1.0), p(2.0), z(1.0)),
            Err(AmmError::Unsupported(_))
        ));
    }

    #[test]
    fn rebalance_examples() {
        let s = PoolState::balanced(1.0, p(1.0), z(0.0)).unwrap();
        let r = rebalance_to_oracle(&s, p(4.0)).unwrap();
        assert_eq!(r.x(), 0.5);

        let s = PoolState::balanced(1.0, p(1.0), z(0.6)).unwrap();
        let r = rebalance_to_oracle(&s, p(0.5)).unwrap();
        let oracle = rebalanced_x_by_bisection(s.k(), 0.5, 0.6);
        assert!(close(r.x(), oracle, 1e-12));
        assert!(close(r.x(), 1.640_670_712_015_275_86, 1e-14));
        assert!(close(r.spot_price(), 0.5, 1e-14));

        for zf in [0.0, 0.25, 0.7] {
            let s = PoolState::balanced(3.0, p(2.0), z(zf)).unwrap();
            let r = rebalance_to_oracle(&s, p(2.0)).unwrap();
            assert!(close(r.x(), s.x(), 1e-12));
            assert!(close(r.y(), s.y(), 1e-12));
        }

        let s = PoolState::balanced(1.0, p(1.0), z(1.0)).unwrap();
        assert!(matches!(rebalance_to_oracle(&s, p(2.0)), Err(AmmError::Unsupported(_))));
    }

    #[test]
    fn slippage_taylor_examples() {
        let s = normalized_pool(z(0.1));
        let t = slippage_taylor(&s, 0.01).unwrap();
        assert!((t.second_derivative_form - 0.009).abs() < 1e-15);
        assert!((t.simplified_form - 0.009).abs() < 1e-15);

        let s = normalized_pool(z(0.9));
        let t = slippage_taylor(&s, 0.01).unwrap();
        assert!((t.second_derivative_form - 0.001).abs() < 1e-15);

        let s = normalized_pool(z(1.0));
        let t = slippage_taylor(&s, 0.3).unwrap();
        assert_eq!(t.second_derivative_form, 0.0);
        assert_eq!(t.simplified_form, 0.0);
    }

    #[test]
    fn slippage_exact_examples() {
        let s = normalized_pool(z(1.0));
        assert_eq!(slippage_exact(&s, TradeDirection::SellX, 0.4).unwrap(), 0.0);
        assert_eq!(slippage_exact(&s, TradeDirection::SellY, 0.4).unwrap(), 0.0);

        let s = normalized_pool(z(0.5));
        let e = slippage_estimate(&s, 0.1).unwrap();
        assert!(close(e.exact, 0.046_167_856_607_897_539, 1e-12));
        assert!(close(e.taylor_second_derivative_form, 0.05, 1e-14));

        // Constant product: spot 1, exec = 1 / (1 + dx), gap dx / (1 + dx).
        let s = normalized_pool(z(0.0));
        let e = slippage_exact(&s, TradeDirection::SellX, 0.01).unwrap();
        assert!(close(e, 0.01 / 1.01, 1e-13));
    }

    #[test]
    fn concentration_coefficient_falls_to_zero() {
        assert!((concentration_coefficient(z(0.1)) - 0.9).abs() < 1e-12);
        assert!((concentration_coefficient(z(0.9)) - 0.1).abs() < 1e-12);
        let grid: Vec<f64> = (0..=10)
            .map(|i| concentration_coefficient(z(i as f64 / 10.0)))
            .collect();
        assert!(grid.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(grid[10], 0.0);
    }

    #[test]
    fn il_monotone_in_z() {
        let zs: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        for rho in [0.1, 0.5, 0.9, 1.1, 2.0, 10.0] {
            let il: Vec<f64> = zs
                .iter()
                .map(|&zf| il_closed_form(z(zf), rho).unwrap().il_paper)
                .collect();
            if rho > 1.0 {
                assert!(il.windows(2).all(|w| w[1] < w[0]), "rho {rho}: {il:?}");
            } else {
                assert!(il.windows(2).all(|w| w[1] > w[0]), "rho {rho}: {il:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn taylor_forms_agree(
            log_x in -2.0f64..2.0,
            log_ratio in -1.0f64..1.0,
            log_p in -2.0f64..2.0,
            zf in 0.0f64..=1.0,
            frac in 1e-6f64..0.5,
        ) {
            let x = 10f64.powf(log_x);
            let price = 10f64.powf(log_p);
            let s = PoolState::anchored(x, x * price * 10f64.powf(log_ratio), p(price), z(zf)).unwrap();
            let dx = (s.max_x_bound() - x).min(x) * frac;
            let t = slippage_taylor(&s, dx).unwrap();
            prop_assert!(t.second_derivative_form >= 0.0);
            prop_assert!(close(t.simplified_form, t.second_derivative_form, 1e-10)
                || t.second_derivative_form == 0.0 && t.simplified_form.abs() < 1e-300);
        }

        #[test]
        fn standard_formula_is_negated_closed_form(log_r in -2.0f64..2.0) {
            let r = 10f64.powf(log_r);
            let a = il_standard_amm(r).unwrap();
            let b = il_closed_form(z(0.0), r).unwrap().il_paper;
            prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn rebalance_hits_oracle(zf in 0.0f64..0.999, log_rho in -1.0f64..1.0, log_x in -2.0f64..2.0, log_p in -2.0f64..2.0) {
            let x0 = 10f64.powf(log_x);
            let p0 = 10f64.powf(log_p);
            let p1 = p0 / 10f64.powf(log_rho);
            let s = PoolState::balanced(x0, p(p0), z(zf)).unwrap();
            let r = rebalance_to_oracle(&s, p(p1)).unwrap();
            prop_assert!(close(r.spot_price(), p1, 1e-10));
            prop_assert!(close(r.y(), p1 * r.x(), 1e-9));
            prop_assert!(r.curve_residual() < 1e-12);
        }
    }
}
