//! Process-wide numerical tolerance.
//!
//! One tolerance governs every comparison in the crate: projection equality
//! (Frobenius distance), commutation, eigenvalue clustering and probability
//! thresholds. It is meant to be set once at startup, before any structure is
//! built.

use std::sync::atomic::{AtomicU64, Ordering};

pub const DEFAULT_EPSILON: f64 = 1e-9;

/// Default bound on the size of exhaustive enumerations (number of contexts
/// below a base, or atom bits of a clopen search space).
pub const DEFAULT_MAX_ENUM: usize = 20;

static EPSILON_BITS: AtomicU64 = AtomicU64::new(DEFAULT_EPSILON.to_bits());

pub fn epsilon() -> f64 {
    f64::from_bits(EPSILON_BITS.load(Ordering::Relaxed))
}

pub fn set_epsilon(eps: f64) {
    assert!(eps.is_finite() && eps > 0.0, "tolerance must be positive");
    EPSILON_BITS.store(eps.to_bits(), Ordering::Relaxed);
}
