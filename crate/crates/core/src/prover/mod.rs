//! Lower bounds on `MinTotal` and optimality certificates.
//!
//! `Bound(n, b)` is the least possible sum of node depths over a tree with
//! `n` nodes in which every node has at most `b` children (root depth 1).
//! Any strategy tree for `C` whose guesses split into at most `b` parts is
//! such a tree, which gives the base of the `LB_i` / `V_i` tower in
//! [`LowerBounds`]. [`filter_starting_guesses`] uses the tower to rule out
//! first guesses against a known upper bound and, once every remaining guess
//! reaches the bound, certifies it as the minimum total.

mod bounds;
mod certify;

use thiserror::Error;

pub use bounds::{LowerBounds, TowerStats};
pub use certify::{
    filter_starting_guesses, prove_optimal, Checkpoint, Elimination, EliminationConfig, LevelRecord,
    OptimalityCertificate, Progress, Verdict, CHECKPOINT_FORMAT,
};

#[derive(Debug, Error)]
pub enum ProverError {
    #[error("Bound(n, b) needs b >= 1")]
    ZeroBranching,
    #[error("lower-bound level must be at least 1")]
    ZeroLevel,
    #[error("Bound({n}, {b}) overflows")]
    Overflow { n: u64, b: u64 },
    #[error(
        "upper bound {ub} is inconsistent: every starting guess has V_{level} > {ub} (least {min_v})"
    )]
    InconsistentBound { ub: u64, level: usize, min_v: u64 },
    #[error("strategy not optimal: its first guess {guess} has V_{level} = {value}, above {bound}")]
    StrategyNotOptimal {
        guess: String,
        level: usize,
        value: u64,
        bound: u64,
    },
    #[error("checkpoint does not match this run: {0}")]
    CheckpointMismatch(String),
    #[error("checkpoint I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed checkpoint: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Tree(#[from] crate::tree::TreeError),
}

/// `Bound(n, b)`, computed with integer arithmetic only.
///
/// With `k` the number of completely filled levels (the largest `k` with
/// `(b^k - 1)/(b - 1) <= n`), the bound is
/// `sum_{i=1..k} i * b^(i-1) + (k + 1) * (n - (b^k - 1)/(b - 1))`.
pub fn bound(n: u64, b: u64) -> Result<u64, ProverError> {
    if b == 0 {
        return Err(ProverError::ZeroBranching);
    }
    let overflow = || ProverError::Overflow { n, b };
    if b == 1 {
        return n
            .checked_mul(n + 1)
            .map(|x| x / 2)
            .ok_or_else(overflow);
    }
    let (mut filled, mut width, mut depth, mut sum) = (0u64, 1u64, 0u64, 0u64);
    while width <= n - filled {
        depth += 1;
        filled += width;
        sum = depth
            .checked_mul(width)
            .and_then(|x| x.checked_add(sum))
            .ok_or_else(overflow)?;
        match width.checked_mul(b) {
            Some(w) => width = w,
            None => break,
        }
    }
    (depth + 1)
        .checked_mul(n - filled)
        .and_then(|x| x.checked_add(sum))
        .ok_or_else(overflow)
}
