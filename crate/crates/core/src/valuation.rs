//! Guess valuations and their lexicographic combinations.
//!
//! Every valuation is "lower is better". Score tuples are compared with exact
//! integers wherever the valuation allows it: `ExpSizeSplit` is ranked by the
//! integer `sum |C_r|^2`, which orders guesses identically because `|C|` is the
//! same for every guess at a node.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{CandidateSet, Game, SplitTally};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValuationError {
    #[error("valuation {0} is undefined on an empty candidate set")]
    EmptyCandidates(Valuation),
    #[error("cannot choose a guess for an empty candidate set")]
    NothingToGuess,
    #[error("breadth must be at least 1")]
    ZeroBreadth,
    #[error("unknown valuation {0:?}")]
    Unknown(String),
    #[error("a combined valuation needs 1 to 5 distinct valuations")]
    BadCombination,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Valuation {
    /// `-[g in C]`
    InSet,
    /// Size of the largest split.
    MaxSizeSplit,
    /// Expected size of the split the secret falls in.
    ExpSizeSplit,
    /// `sum p log2 p` over split probabilities (negative entropy).
    Information,
    /// `-nSplits(g, C)`
    MostParts,
}

impl Valuation {
    pub const ALL: [Valuation; 5] = [
        Valuation::InSet,
        Valuation::MaxSizeSplit,
        Valuation::ExpSizeSplit,
        Valuation::Information,
        Valuation::MostParts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Valuation::InSet => "inset",
            Valuation::MaxSizeSplit => "mss",
            Valuation::ExpSizeSplit => "ess",
            Valuation::Information => "information",
            Valuation::MostParts => "mostparts",
        }
    }

    fn score(self, stats: &SplitStats) -> Score {
        match self {
            Valuation::InSet => Score::Int(-(stats.in_set as i64)),
            Valuation::MaxSizeSplit => Score::Int(stats.max_split as i64),
            Valuation::ExpSizeSplit => Score::Int(stats.sum_sq as i64),
            Valuation::Information => Score::Real(stats.information),
            Valuation::MostParts => Score::Int(-(stats.n_splits as i64)),
        }
    }

    fn value(self, stats: &SplitStats) -> f64 {
        match self {
            Valuation::ExpSizeSplit => stats.sum_sq as f64 / stats.size as f64,
            other => match other.score(stats) {
                Score::Int(v) => v as f64,
                Score::Real(v) => v,
            },
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Valuation {
    type Err = ValuationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match key.as_str() {
            "inset" => Valuation::InSet,
            "mss" | "maxsizesplit" => Valuation::MaxSizeSplit,
            "ess" | "expsizesplit" => Valuation::ExpSizeSplit,
            "information" | "info" | "entropy" => Valuation::Information,
            "mostparts" | "mp" => Valuation::MostParts,
            _ => return Err(ValuationError::Unknown(s.to_string())),
        })
    }
}

/// Summary of the splits one guess induces on one candidate set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitStats {
    pub size: usize,
    pub in_set: bool,
    pub n_splits: usize,
    pub max_split: usize,
    pub sum_sq: u64,
    pub information: f64,
}

impl SplitStats {
    pub fn from_tally(size: usize, in_set: bool, tally: &[(u16, u32)], with_information: bool) -> SplitStats {
        let mut max_split = 0usize;
        let mut sum_sq = 0u64;
        let mut information = 0.0;
        for &(_, n) in tally {
            max_split = max_split.max(n as usize);
            sum_sq += (n as u64) * (n as u64);
            if with_information {
                let p = n as f64 / size as f64;
                information += p * p.log2();
            }
        }
        SplitStats {
            size,
            in_set,
            n_splits: tally.len(),
            max_split,
            sum_sq,
            information,
        }
    }

    pub fn compute(game: &Game, guess: usize, candidates: &CandidateSet, tally: &mut SplitTally) -> SplitStats {
        let in_set = game
            .secret_of_guess(guess)
            .is_some_and(|s| candidates.contains(s));
        let counts = tally.count(game, guess, candidates.ids());
        SplitStats::from_tally(candidates.len(), in_set, counts, true)
    }

    /// Useful in the sense of guaranteed information gain.
    pub fn is_useful(&self) -> bool {
        if self.size <= 1 {
            self.in_set
        } else {
            self.n_splits != 1
        }
    }
}

/// One component of a score tuple.
#[derive(Debug, Clone, Copy)]
pub enum Score {
    Int(i64),
    Real(f64),
}

impl PartialEq for Score {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Score {}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Score::Int(a), Score::Int(b)) => a.cmp(b),
            (Score::Real(a), Score::Real(b)) => a.total_cmp(b),
            (Score::Int(_), Score::Real(_)) => Ordering::Less,
            (Score::Real(_), Score::Int(_)) => Ordering::Greater,
        }
    }
}

/// Lexicographically ordered tuple of up to five scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreTuple {
    vals: [Score; 5],
    len: u8,
}

impl ScoreTuple {
    pub fn as_slice(&self) -> &[Score] {
        &self.vals[..self.len as usize]
    }
}

impl PartialOrd for ScoreTuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ScoreTuple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.as_slice().cmp(other.as_slice())
    }
}

/// An ordered list of distinct valuations compared lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CombinedValuation(Vec<Valuation>);

impl CombinedValuation {
    pub fn new(ids: Vec<Valuation>) -> Result<CombinedValuation, ValuationError> {
        if ids.is_empty() || ids.len() > 5 {
            return Err(ValuationError::BadCombination);
        }
        for (i, v) in ids.iter().enumerate() {
            if ids[..i].contains(v) {
                return Err(ValuationError::BadCombination);
            }
        }
        Ok(CombinedValuation(ids))
    }

    pub fn single(v: Valuation) -> CombinedValuation {
        CombinedValuation(vec![v])
    }

    /// `<MostParts, InSet, ExpSizeSplit>`, the ordering used by the search.
    pub fn default_ordering() -> CombinedValuation {
        CombinedValuation(vec![
            Valuation::MostParts,
            Valuation::InSet,
            Valuation::ExpSizeSplit,
        ])
    }

    pub fn ids(&self) -> &[Valuation] {
        &self.0
    }

    fn needs_information(&self) -> bool {
        self.0.contains(&Valuation::Information)
    }

    fn needs_nonempty(&self) -> Option<Valuation> {
        self.0
            .iter()
            .copied()
            .find(|v| matches!(v, Valuation::ExpSizeSplit | Valuation::Information))
    }

    pub fn score(&self, stats: &SplitStats) -> ScoreTuple {
        let mut vals = [Score::Int(0); 5];
        for (slot, v) in vals.iter_mut().zip(&self.0) {
            *slot = v.score(stats);
        }
        ScoreTuple {
            vals,
            len: self.0.len() as u8,
        }
    }

}

impl Default for CombinedValuation {
    fn default() -> Self {
        CombinedValuation::default_ordering()
    }
}

impl fmt::Display for CombinedValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|v| v.name()).collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for CombinedValuation {
    type Err = ValuationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let ids = s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(Valuation::from_str)
            .collect::<Result<Vec<_>, _>>()?;
        CombinedValuation::new(ids)
    }
}

/// Value of a single valuation for `guess` on `candidates`.
pub fn evaluate(
    game: &Game,
    valuation: Valuation,
    guess: usize,
    candidates: &CandidateSet,
) -> Result<f64, ValuationError> {
    if candidates.is_empty() && matches!(valuation, Valuation::ExpSizeSplit | Valuation::Information) {
        return Err(ValuationError::EmptyCandidates(valuation));
    }
    let stats = SplitStats::compute(game, guess, candidates, &mut SplitTally::new(game));
    Ok(valuation.value(&stats))
}

/// `<v1(g, C), ..., vn(g, C)>` as plain numbers, in valuation order.
pub fn evaluate_combined(
    game: &Game,
    combined: &CombinedValuation,
    guess: usize,
    candidates: &CandidateSet,
) -> Result<Vec<f64>, ValuationError> {
    if candidates.is_empty() {
        if let Some(v) = combined.needs_nonempty() {
            return Err(ValuationError::EmptyCandidates(v));
        }
    }
    let stats = SplitStats::compute(game, guess, candidates, &mut SplitTally::new(game));
    Ok(combined.ids().iter().map(|v| v.value(&stats)).collect())
}

/// The guess with the lowest score tuple; alphabetical order breaks ties.
pub fn choose_guess(
    game: &Game,
    combined: &CombinedValuation,
    candidates: &CandidateSet,
) -> Result<usize, ValuationError> {
    if candidates.is_empty() {
        return Err(ValuationError::NothingToGuess);
    }
    let with_info = combined.needs_information();
    let best = (0..game.num_guesses())
        .into_par_iter()
        .map_init(
            || SplitTally::new(game),
            |tally, g| {
                let in_set = game
                    .secret_of_guess(g)
                    .is_some_and(|s| candidates.contains(s));
                let counts = tally.count(game, g, candidates.ids());
                let stats = SplitStats::from_tally(candidates.len(), in_set, counts, with_info);
                (combined.score(&stats), g)
            },
        )
        .min()
        .ok_or(ValuationError::NothingToGuess)?;
    Ok(best.1)
}

/// The `n` lowest-scoring guesses in ascending order (all of `G` if `n > |G|`).
pub fn best_n_guesses(
    game: &Game,
    combined: &CombinedValuation,
    candidates: &CandidateSet,
    n: usize,
) -> Result<Vec<usize>, ValuationError> {
    if n == 0 {
        return Err(ValuationError::ZeroBreadth);
    }
    if candidates.is_empty() {
        if let Some(v) = combined.needs_nonempty() {
            return Err(ValuationError::EmptyCandidates(v));
        }
    }
    Ok(top_n(game, combined, candidates, n, |_| true))
}

/// Shared by `best_n_guesses` and the search: best `n` among guesses whose
/// stats pass `filter`.
pub(crate) fn top_n(
    game: &Game,
    combined: &CombinedValuation,
    candidates: &CandidateSet,
    n: usize,
    filter: impl Fn(&SplitStats) -> bool + Sync,
) -> Vec<usize> {
    let with_info = combined.needs_information();
    let mut scored: Vec<(ScoreTuple, usize)> = (0..game.num_guesses())
        .into_par_iter()
        .map_init(
            || SplitTally::new(game),
            |tally, g| {
                let in_set = game
                    .secret_of_guess(g)
                    .is_some_and(|s| candidates.contains(s));
                let counts = tally.count(game, g, candidates.ids());
                let stats = SplitStats::from_tally(candidates.len(), in_set, counts, with_info);
                filter(&stats).then(|| (combined.score(&stats), g))
            },
        )
        .flatten()
        .collect();
    if n < scored.len() {
        scored.select_nth_unstable(n - 1);
        scored.truncate(n);
    }
    scored.sort_unstable();
    scored.into_iter().map(|(_, g)| g).collect()
}
