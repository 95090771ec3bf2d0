//! Caps on exhaustive enumerations.

use crate::error::{Error, Result};

/// Default number of evaluated inequalities / table entries an exhaustive
/// routine may visit.
pub const DEFAULT_CAP: u128 = 10_000_000;

/// `PVCSP_CAP` overrides [`DEFAULT_CAP`] when set to a positive integer.
pub fn default_cap() -> u128 {
    std::env::var("PVCSP_CAP")
        .ok()
        .and_then(|v| v.trim().parse::<u128>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_CAP)
}

pub fn ensure(what: impl Into<String>, needed: u128, cap: u128) -> Result<()> {
    if needed > cap {
        Err(Error::ResourceGuard {
            what: what.into(),
            needed,
            cap,
        })
    } else {
        Ok(())
    }
}

/// `base^exp`, saturating at `u128::MAX`.
pub fn pow_sat(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}
