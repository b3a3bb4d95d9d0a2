use crate::error::{Error, Result};

pub const DEFAULT_GUARD: u128 = 10_000_000;
pub const GUARD_ENV: &str = "BUILDING_LAB_GUARD";

/// Enumeration bound; `BUILDING_LAB_GUARD` overrides the default.
pub fn enumeration_guard() -> u128 {
    std::env::var(GUARD_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<u128>().ok())
        .unwrap_or(DEFAULT_GUARD)
}

pub fn check(needed: u128) -> Result<()> {
    check_against(needed, enumeration_guard())
}

pub fn check_against(needed: u128, guard: u128) -> Result<()> {
    if needed > guard {
        Err(Error::ResourceGuard { needed, guard })
    } else {
        Ok(())
    }
}
