//! Rank-based necessary condition for reproducing a behavior with
//! `d`-dimensional component Hilbert spaces.
//!
//! A `d`-dimensional Hermitian operator has `d^2` real degrees of freedom, so
//! at most `d^2` rows (or columns) of the correlation matrix can be linearly
//! independent. Rank above `d^2` therefore excludes local dimension `d`; rank
//! at or below it makes no claim.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Behavior;
use crate::numerics::rank_with_tolerance;

/// Outcome of the rank test against a dimension bound.
///
/// Serializes as `{rank, d, threshold, excluded}`. `excluded == false` means
/// "not excluded", never "realizable".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessVerdict {
    pub rank: usize,
    pub d: usize,
    pub threshold: usize,
    pub excluded: bool,
}

/// Rank test of the behavior's correlation matrix against `d^2`, with the
/// same dimension on both sides.
pub fn dimension_witness(b: &Behavior, d: usize, eps: f64) -> Result<WitnessVerdict> {
    if d == 0 {
        return Err(Error::InvalidInput("local dimension must be at least 1".into()));
    }
    let threshold = d
        .checked_mul(d)
        .ok_or_else(|| Error::InvalidInput(format!("d^2 overflows for d = {d}")))?;
    let x = b.correlation_matrix();
    let rank = rank_with_tolerance(x.entries(), eps)?;
    Ok(WitnessVerdict { rank, d, threshold, excluded: rank > threshold })
}

/// Asymmetric variant: rank above `d_a^2` or above `d_b^2` each excludes, so
/// the effective bound is `min(d_a, d_b)^2`.
pub fn dimension_witness_asymmetric(
    b: &Behavior,
    d_a: usize,
    d_b: usize,
    eps: f64,
) -> Result<WitnessVerdict> {
    dimension_witness(b, d_a.min(d_b), eps)
}
