//! Iteration guards shared by every module.
//!
//! The default limit can be overridden for the whole process with the
//! `LRS_GUARD_MAX` environment variable (a positive integer).

use std::sync::OnceLock;

pub const GUARD_ENV: &str = "LRS_GUARD_MAX";

/// Default cap on period lengths, profile sizes and nested-sum sizes.
pub const DEFAULT_MAX_ITERATIONS: u64 = 10_000_000;

/// Cap on `n_max` for the τ table.
pub const TAU_TABLE_MAX: usize = 100_000;

/// Cap on the number of prime-power terms in an exact Hecke sequence.
pub const HECKE_EXACT_MAX: usize = 1_000;

/// Cap on `ℓ^r` for the nonlinearity sweep.
pub const NONLINEARITY_MAX: u64 = 1_000_000;

/// Cap on `ℓ` for naive cyclic convolution.
pub const CONVOLUTION_MAX: u64 = 10_000;

/// Largest `T` accepted by the resultant certificate.
pub const RESULTANT_T_MAX: u32 = 12;

/// The process-wide iteration limit, read once from the environment.
pub fn max_iterations() -> u64 {
    static LIMIT: OnceLock<u64> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var(GUARD_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_MAX_ITERATIONS)
    })
}
