//! Enumeration caps. `PFG_MAX_N` may lower any cap, never raise it.

pub const SET_PARTITION_MAX_N: usize = 12;
pub const SHAPE_MAX_K: usize = 40;
pub const EXPAND_MAX_N: usize = 10;
pub const LP_MAX_N: usize = 10;
pub const VERIFY_MAX_N: usize = 10;
pub const RANDOM_GAME_MAX_N: usize = 8;

pub const ENV_VAR: &str = "PFG_MAX_N";

/// The effective cap: `default`, lowered to `PFG_MAX_N` when that is set
/// to a smaller value.
pub fn cap(default: usize) -> usize {
    std::env::var(ENV_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map_or(default, |env| env.min(default))
}

pub fn check(what: &'static str, requested: usize, default: usize) -> crate::Result<()> {
    let cap = cap(default);
    if requested > cap {
        return Err(crate::Error::SizeLimit { what, requested, cap });
    }
    Ok(())
}
