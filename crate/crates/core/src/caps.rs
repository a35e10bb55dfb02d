//! Enumeration caps. Each cap has a default and an environment override.

use crate::error::{Error, Result};

/// Largest field order `q` that may be constructed.
pub const FIELD_CAP_ENV: &str = "BERTINI_FIELD_CAP";
/// Largest number of forms a census may stream.
pub const CENSUS_CAP_ENV: &str = "BERTINI_CENSUS_CAP";
/// Largest number of projective points a single point enumeration may visit.
pub const POINT_CAP_ENV: &str = "BERTINI_POINT_CAP";
/// Largest number of entries (rows x columns) in a Macaulay matrix.
pub const MATRIX_CAP_ENV: &str = "BERTINI_MATRIX_CAP";

pub const DEFAULT_FIELD_CAP: u128 = 1 << 20;
pub const DEFAULT_CENSUS_CAP: u128 = 1 << 28;
pub const DEFAULT_POINT_CAP: u128 = 1 << 24;
pub const DEFAULT_MATRIX_CAP: u128 = 1 << 24;

fn read(env: &str, default: u128) -> u128 {
    std::env::var(env)
        .ok()
        .and_then(|v| v.trim().parse::<u128>().ok())
        .unwrap_or(default)
}

pub fn field_cap() -> u128 {
    read(FIELD_CAP_ENV, DEFAULT_FIELD_CAP)
}

pub fn census_cap() -> u128 {
    read(CENSUS_CAP_ENV, DEFAULT_CENSUS_CAP)
}

pub fn point_cap() -> u128 {
    read(POINT_CAP_ENV, DEFAULT_POINT_CAP)
}

pub fn matrix_cap() -> u128 {
    read(MATRIX_CAP_ENV, DEFAULT_MATRIX_CAP)
}

pub(crate) fn check(what: &'static str, size: u128, cap: u128, env: &'static str) -> Result<()> {
    if size > cap {
        Err(Error::CapExceeded {
            what,
            size,
            cap,
            env,
        })
    } else {
        Ok(())
    }
}
