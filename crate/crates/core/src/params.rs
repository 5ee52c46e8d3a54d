//! Validated scalar parameters of the curve.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, AmmError, Result};

/// Blend weight between the internal reserve-ratio price and the oracle price.
///
/// `0` is a constant-product pool, `1` quotes the oracle price regardless of reserves.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct MixParameter(f64);

impl MixParameter {
    pub const CONSTANT_PRODUCT: MixParameter = MixParameter(0.0);
    pub const PURE_ORACLE: MixParameter = MixParameter(1.0);

    pub fn new(z: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&z) {
            Ok(MixParameter(z))
        } else {
            Err(AmmError::Domain {
                what: "mix parameter z",
                value: z,
            })
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_constant_product(self) -> bool {
        self.0 == 0.0
    }

    #[inline]
    pub fn is_pure_oracle(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for MixParameter {
    type Error = AmmError;

    fn try_from(z: f64) -> Result<Self> {
        MixParameter::new(z)
    }
}

impl From<MixParameter> for f64 {
    fn from(z: MixParameter) -> f64 {
        z.0
    }
}

impl fmt::Display for MixParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Oracle price of X in units of Y. Always finite and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct OraclePrice(f64);

impl OraclePrice {
    pub fn new(p: f64) -> Result<Self> {
        require_positive("oracle price", p).map(OraclePrice)
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for OraclePrice {
    type Error = AmmError;

    fn try_from(p: f64) -> Result<Self> {
        OraclePrice::new(p)
    }
}

impl From<OraclePrice> for f64 {
    fn from(p: OraclePrice) -> f64 {
        p.0
    }
}

impl fmt::Display for OraclePrice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
