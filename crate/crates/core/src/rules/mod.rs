//! Local rules on `{0,1}`-colourings of the tree: locally good points, the
//! edge weight functions, the support set `E` with its components, and the
//! two-walker classification into inert points and `(a,b)` classes.

mod classify;
mod config;
mod engine;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

pub use classify::{classify, classify_at, ClassLabel, Classification, Walk};
pub use config::{Configuration, Domain};
pub use engine::{ComponentInfo, LocalView, RuleEngine};

use crate::error::RuleError;
use crate::rational::rational_string;

/// All constants of the local rules, derived from one radius by default.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleParams {
    pub rho: u32,
    pub dogleg_bound: u32,
    pub window_halfwidth: u32,
    pub min_central_vertices: usize,
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub bad_weight: BigRational,
}

impl RuleParams {
    pub fn with_rho(rho: u32) -> Self {
        RuleParams {
            rho,
            dogleg_bound: rho.saturating_sub(1),
            window_halfwidth: rho,
            min_central_vertices: 5,
            bad_weight: BigRational::new(BigInt::one(), BigInt::from(100)),
        }
    }

    /// Radius 10.
    pub fn paper() -> Self {
        Self::with_rho(10)
    }

    /// Radius 2, small enough for exhaustive checks.
    pub fn desk() -> Self {
        Self::with_rho(2)
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        let bad = |m: String| Err(RuleError::InvalidParams(m));
        if self.rho == 0 {
            return bad("rho must be positive".into());
        }
        if self.dogleg_bound >= 2 * self.window_halfwidth {
            return bad(format!(
                "dogleg bound {} must be below twice the window halfwidth {}",
                self.dogleg_bound, self.window_halfwidth
            ));
        }
        if self.bad_weight <= BigRational::zero() || self.bad_weight >= BigRational::one() {
            return bad(format!("bad weight {} must lie in (0,1)", rational_string(&self.bad_weight)));
        }
        if self.min_central_vertices == 0 {
            return bad("min_central_vertices must be positive".into());
        }
        Ok(())
    }

    /// Radius of the ball a configuration must cover for classification.
    pub fn classification_horizon(&self) -> usize {
        12 * self.rho as usize
    }
}

impl Default for RuleParams {
    fn default() -> Self {
        Self::paper()
    }
}

#[cfg(test)]
mod tests;
