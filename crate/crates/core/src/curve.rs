//! The oracle-blended reserve curve.
//!
//! A pool quotes the marginal price
//!
//! ```text
//! -dy/dx = (1 - z) * y / x + z * p
//! ```
//!
//! whose solution through an anchor point is the reserve function
//!
//! ```text
//! y(x) = k * x^(z - 1) - z * p * x / (2 - z)
//! ```
//!
//! `z = 0` recovers the constant-product hyperbola `x * y = k`; `z = 1` is the
//! straight line `y = k - p * x`. For `z > 0` the curve meets the X axis at a
//! finite reserve, see [`max_x_bound`].

use serde::Serialize;

use crate::error::{require_positive, AmmError, Result};
use crate::params::{MixParameter, OraclePrice};

/// `x^e` for the exponents that appear on the curve.
///
/// The exponents at `z = 0` and `z = 1` are small integers and are evaluated
/// exactly so the limit curves hold to the last bit.
pub(crate) fn pow_exp(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e == 1.0 {
        x
    } else if e == -1.0 {
        1.0 / x
    } else if e == -2.0 {
        1.0 / (x * x)
    } else if e == -3.0 {
        1.0 / (x * x * x)
    } else if e == 2.0 {
        x * x
    } else if e == 0.5 {
        x.sqrt()
    } else {
        (e * x.ln()).exp()
    }
}

/// The linear oracle term's slope `z * p / (2 - z)`.
#[inline]
pub(crate) fn oracle_slope(p: OraclePrice, z: MixParameter) -> f64 {
    let z = z.get();
    z * p.get() / (2.0 - z)
}

/// Curve constant `k` for the curve through `(x, y)`.
pub fn anchor_k(x: f64, y: f64, p: OraclePrice, z: MixParameter) -> Result<f64> {
    let x = require_positive("x reserve", x)?;
    let y = require_positive("y reserve", y)?;
    let k = (y + oracle_slope(p, z) * x) * pow_exp(x, 1.0 - z.get());
    require_positive("curve constant k", k)
}

/// Largest X reserve the curve supports: the root of `y(x) = 0`.
///
/// Returns `f64::INFINITY` for `z = 0`, where the hyperbola never reaches the axis.
pub fn max_x_bound(k: f64, p: OraclePrice, z: MixParameter) -> f64 {
    if z.is_constant_product() {
        return f64::INFINITY;
    }
    if z.is_pure_oracle() {
        return k / p.get();
    }
    let zf = z.get();
    pow_exp(k * (2.0 - zf) / (zf * p.get()), 1.0 / (2.0 - zf))
}

fn check_domain(k: f64, x: f64, p: OraclePrice, z: MixParameter) -> Result<()> {
    require_positive("curve constant k", k)?;
    require_positive("x reserve", x)?;
    let bound = max_x_bound(k, p, z);
    if x >= bound {
        return Err(AmmError::Insolvent { x, bound });
    }
    Ok(())
}

/// Y reserve on the curve `(k, p, z)` at X reserve `x`.
pub fn reserve_y(k: f64, x: f64, p: OraclePrice, z: MixParameter) -> Result<f64> {
    check_domain(k, x, p, z)?;
    let y = k * pow_exp(x, z.get() - 1.0) - oracle_slope(p, z) * x;
    if y > 0.0 {
        Ok(y)
    } else {
        // Rounding right at the bound.
        Err(AmmError::Insolvent {
            x,
            bound: max_x_bound(k, p, z),
        })
    }
}

/// First derivative `dy/dx`; the negated marginal price.
pub fn dy_dx(k: f64, x: f64, p: OraclePrice, z: MixParameter) -> Result<f64> {
    check_domain(k, x, p, z)?;
    let zf = z.get();
    Ok(k * (zf - 1.0) * pow_exp(x, zf - 2.0) - oracle_slope(p, z))
}

/// Second derivative `d²y/dx²`. Non-negative; zero exactly at `z = 1`.
pub fn d2y_dx2(k: f64, x: f64, p: OraclePrice, z: MixParameter) -> Result<f64> {
    check_domain(k, x, p, z)?;
    let zf = z.get();
    Ok(k * (zf - 1.0) * (zf - 2.0) * pow_exp(x, zf - 3.0))
}

/// A pool snapshot: reserves, oracle price, mix parameter and the cached
/// constant of the curve the reserves lie on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoolState {
    x: f64,
    y: f64,
    p: OraclePrice,
    z: MixParameter,
    k: f64,
}

impl PoolState {
    /// Anchors a new curve through `(x, y)`.
    pub fn anchored(x: f64, y: f64, p: OraclePrice, z: MixParameter) -> Result<Self> {
        let k = anchor_k(x, y, p, z)?;
        Ok(PoolState { x, y, p, z, k })
    }

    /// A pool whose Y reserve is worth its X reserve at the oracle price (`y = p * x`).
    pub fn balanced(x: f64, p: OraclePrice, z: MixParameter) -> Result<Self> {
        PoolState::anchored(x, p.get() * x, p, z)
    }

    /// The point of curve `(k, p, z)` at X reserve `x`.
    pub fn on_curve(k: f64, x: f64, p: OraclePrice, z: MixParameter) -> Result<Self> {
        let y = reserve_y(k, x, p, z)?;
        Ok(PoolState { x, y, p, z, k })
    }

    /// Moves the reserves along the current curve. Callers guarantee the
    /// new point lies on the curve.
    pub(crate) fn with_reserves(&self, x: f64, y: f64) -> Self {
        PoolState { x, y, ..*self }
    }

    pub(crate) fn with_curve(&self, p: OraclePrice, k: f64) -> Self {
        PoolState { p, k, ..*self }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }

    #[inline]
    pub fn oracle_price(&self) -> OraclePrice {
        self.p
    }

    #[inline]
    pub fn mix(&self) -> MixParameter {
        self.z
    }

    #[inline]
    pub fn k(&self) -> f64 {
        self.k
    }

    /// Blended marginal price in Y per X.
    pub fn spot_price(&self) -> f64 {
        let z = self.z.get();
        (1.0 - z) * self.y / self.x + z * self.p.get()
    }

    pub fn max_x_bound(&self) -> f64 {
        max_x_bound(self.k, self.p, self.z)
    }

    /// Distance of the reserves from the cached curve, relative to the
    /// magnitude of the curve's terms.
    pub fn curve_residual(&self) -> f64 {
        let linear = oracle_slope(self.p, self.z) * self.x;
        let power = self.k * pow_exp(self.x, self.z.get() - 1.0);
        ((power - linear) - self.y).abs() / power.max(self.y + linear)
    }

    /// Portfolio value of the reserves in X units at price `p`.
    pub fn value_in_x(&self, p: OraclePrice) -> f64 {
        self.x + self.y / p.get()
    }
}
