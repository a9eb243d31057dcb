//! Strategy search and optimality certificates for Wordle-style guessing games.
//!
//! The crate is organised bottom-up:
//!
//! * [`game`] — games, responses, candidate sets, splits and useful guesses.
//! * [`valuation`] — guess-scoring heuristics and lexicographic combinations.
//! * [`search`] — exact and breadth-limited minimum-total search, greedy strategies.
//! * [`tree`] — strategy trees, scoring, validation, replay and JSON documents.
//! * [`prover`] — the `Bound` function, the `LB_i`/`V_i` lower-bound tower and
//!   optimality certificates.
//! * [`corpus`] — word lists, variant generators and corpus manifests.

pub mod corpus;
pub mod game;
pub mod prover;
pub mod search;
pub mod tree;
pub mod valuation;

pub use game::{CandidateSet, Game, GameError, Response, SplitMap};
pub use search::{SearchConfig, SearchError};
pub use tree::StrategyTree;
pub use valuation::{CombinedValuation, Valuation};
