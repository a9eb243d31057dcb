//! Strategy search: exact `MinTotal`, breadth-limited `ApMinTotal` and greedy
//! valuation-driven strategies.
//!
//! Both minimum-total searches only branch on useful guesses, memoise on the
//! sorted id list of a candidate set, and prune with the admissible bound
//! `|C| + sum (2|C_r| - 1)`: every candidate costs at least one turn and every
//! candidate that is not the current guess costs at least two. Ties between
//! equal totals go to the alphabetically first guess.

use std::collections::HashMap;

use thiserror::Error;

use crate::game::{partition, CandidateSet, Game, SplitTally};
use crate::tree::StrategyTree;
use crate::valuation::{choose_guess, top_n, CombinedValuation, SplitStats, Valuation, ValuationError};

/// Largest candidate set `min_total` accepts by default.
pub const DEFAULT_EXACT_GUARD: usize = 25;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("candidate set is empty")]
    Empty,
    #[error("exact search refused: {size} candidates exceed the exact-search guard of {guard}")]
    GuardExceeded { size: usize, guard: usize },
    #[error("search breadth must be at least 1")]
    ZeroBreadth,
    #[error("valuation {valuation} chose {guess}, which is not useful for {candidates} candidates")]
    NonTerminating {
        valuation: String,
        guess: String,
        candidates: usize,
    },
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Number of best-ranked guesses explored at each node.
    pub breadth: usize,
    /// Valuation ranking the guesses at each node.
    pub ordering: CombinedValuation,
    pub use_cache: bool,
}

impl SearchConfig {
    pub fn new(breadth: usize) -> Result<SearchConfig, SearchError> {
        if breadth == 0 {
            return Err(SearchError::ZeroBreadth);
        }
        Ok(SearchConfig {
            breadth,
            ordering: CombinedValuation::default_ordering(),
            use_cache: true,
        })
    }

    pub fn with_ordering(mut self, ordering: CombinedValuation) -> SearchConfig {
        self.ordering = ordering;
        self
    }

    pub fn without_cache(mut self) -> SearchConfig {
        self.use_cache = false;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Best {
    value: u64,
    guess: usize,
}

impl Best {
    const NONE: Best = Best {
        value: u64::MAX,
        guess: usize::MAX,
    };

    /// Whether `(value, guess)` would lose to `self`.
    fn beats(&self, value: u64, guess: usize) -> bool {
        value > self.value || (value == self.value && guess > self.guess)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub cache_hits: u64,
    pub cache_entries: usize,
}

/// Lower bound on the cost of `guess` from the split sizes alone.
fn split_lower_bound(game: &Game, size: usize, tally: &[(u16, u32)]) -> u64 {
    let rstar = game.affirmative().0;
    size as u64
        + tally
            .iter()
            .filter(|&&(r, _)| r != rstar)
            .map(|&(_, m)| 2 * m as u64 - 1)
            .sum::<u64>()
}

/// The alphabetically first candidate that separates every candidate.
///
/// Such a guess achieves `2|C| - 1`, the least total any strategy can reach.
pub fn perfect_splitter(game: &Game, ids: &[u32], tally: &mut SplitTally) -> Option<usize> {
    if ids.len() > game.num_responses() {
        return None;
    }
    ids.iter()
        .map(|&s| game.secret_guess(s))
        .find(|&g| tally.count(game, g, ids).len() == ids.len())
}

/// Children of `guess` on `ids`, excluding the affirmative split, largest first.
fn children(game: &Game, guess: usize, ids: &[u32]) -> Vec<Vec<u32>> {
    let rstar = game.affirmative();
    let mut out: Vec<Vec<u32>> = partition(game, guess, ids)
        .into_iter()
        .filter(|(r, _)| *r != rstar)
        .map(|(_, g)| g)
        .collect();
    out.sort_by_key(|g| std::cmp::Reverse(g.len()));
    out
}

/// Exact `MinTotal` over all useful guesses.
pub struct ExactSolver<'g> {
    game: &'g Game,
    guard: usize,
    memo: HashMap<Box<[u32]>, Best>,
    tally: SplitTally,
    stats: SearchStats,
}

impl<'g> ExactSolver<'g> {
    pub fn new(game: &'g Game) -> ExactSolver<'g> {
        ExactSolver::with_guard(game, DEFAULT_EXACT_GUARD)
    }

    pub fn with_guard(game: &'g Game, guard: usize) -> ExactSolver<'g> {
        ExactSolver {
            game,
            guard,
            memo: HashMap::new(),
            tally: SplitTally::new(game),
            stats: SearchStats::default(),
        }
    }

    pub fn stats(&self) -> SearchStats {
        SearchStats {
            cache_entries: self.memo.len(),
            ..self.stats.clone()
        }
    }

    fn check(&self, candidates: &CandidateSet) -> Result<(), SearchError> {
        if candidates.len() > self.guard {
            return Err(SearchError::GuardExceeded {
                size: candidates.len(),
                guard: self.guard,
            });
        }
        Ok(())
    }

    /// `MinTotal(C)`; zero for the empty set.
    pub fn min_total(&mut self, candidates: &CandidateSet) -> Result<u64, SearchError> {
        self.check(candidates)?;
        Ok(self.solve(candidates.ids()).value)
    }

    /// `MinTotal(C)` with an optimal strategy tree for `C`.
    pub fn optimal_tree(&mut self, candidates: &CandidateSet) -> Result<(u64, StrategyTree), SearchError> {
        self.check(candidates)?;
        if candidates.is_empty() {
            return Err(SearchError::Empty);
        }
        let value = self.solve(candidates.ids()).value;
        Ok((value, self.build(candidates.ids())))
    }

    /// `|C| + sum_{r != r*} MinTotal(C_{g,r})` for a specific first guess.
    pub fn cost_of_guess(&mut self, guess: usize, candidates: &CandidateSet) -> Result<u64, SearchError> {
        self.check(candidates)?;
        Ok(candidates.len() as u64
            + children(self.game, guess, candidates.ids())
                .iter()
                .map(|c| self.solve(c).value)
                .sum::<u64>())
    }

    fn build(&mut self, ids: &[u32]) -> StrategyTree {
        let best = self.solve(ids);
        let mut node = StrategyTree::leaf(best.guess);
        for (r, group) in partition(self.game, best.guess, ids) {
            if r != self.game.affirmative() {
                node.branches.insert(r, self.build(&group));
            }
        }
        node
    }

    fn solve(&mut self, ids: &[u32]) -> Best {
        let game = self.game;
        let n = ids.len();
        match n {
            0 => return Best { value: 0, guess: usize::MAX },
            1 => return Best { value: 1, guess: game.secret_guess(ids[0]) },
            _ => {}
        }
        if let Some(g) = perfect_splitter(game, ids, &mut self.tally) {
            return Best { value: 2 * n as u64 - 1, guess: g };
        }
        if let Some(hit) = self.memo.get(ids) {
            self.stats.cache_hits += 1;
            return *hit;
        }
        self.stats.nodes_expanded += 1;

        let mut options: Vec<(u64, usize)> = Vec::new();
        for g in 0..game.num_guesses() {
            let tally = self.tally.count(game, g, ids);
            if tally.len() > 1 {
                options.push((split_lower_bound(game, n, tally), g));
            }
        }
        options.sort_unstable();

        let mut best = Best::NONE;
        for (lb, g) in options {
            if best.beats(lb, g) {
                break;
            }
            let mut partial = lb;
            let mut complete = true;
            for child in children(game, g, ids) {
                let floor = 2 * child.len() as u64 - 1;
                partial = partial - floor + self.solve(&child).value;
                if best.beats(partial, g) {
                    complete = false;
                    break;
                }
            }
            if complete {
                best = Best { value: partial, guess: g };
            }
        }
        self.memo.insert(ids.into(), best);
        best
    }
}

/// Breadth-limited `ApMinTotal`: at every node only the best `breadth`
/// guesses under the ordering valuation (restricted to useful guesses) are
/// explored.
pub struct ApproxSolver<'g> {
    game: &'g Game,
    config: SearchConfig,
    memo: HashMap<Box<[u32]>, Best>,
    tally: SplitTally,
    stats: SearchStats,
    /// Small-set shortcuts are exact only when the ordering ranks candidate
    /// perfect splitters first.
    shortcuts: bool,
}

impl<'g> ApproxSolver<'g> {
    pub fn new(game: &'g Game, config: SearchConfig) -> ApproxSolver<'g> {
        let shortcuts = config
            .ordering
            .ids()
            .starts_with(&[Valuation::MostParts, Valuation::InSet]);
        ApproxSolver {
            game,
            config,
            memo: HashMap::new(),
            tally: SplitTally::new(game),
            stats: SearchStats::default(),
            shortcuts,
        }
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn stats(&self) -> SearchStats {
        SearchStats {
            cache_entries: self.memo.len(),
            ..self.stats.clone()
        }
    }

    /// `ApMinTotal(C, n)` and the strategy tree realising it.
    pub fn solve(&mut self, candidates: &CandidateSet) -> Result<(u64, StrategyTree), SearchError> {
        if candidates.is_empty() {
            return Err(SearchError::Empty);
        }
        let value = self.node(candidates.ids()).value;
        Ok((value, self.build(candidates.ids())))
    }

    pub fn value(&mut self, candidates: &CandidateSet) -> Result<u64, SearchError> {
        if candidates.is_empty() {
            return Err(SearchError::Empty);
        }
        Ok(self.node(candidates.ids()).value)
    }

    fn build(&mut self, ids: &[u32]) -> StrategyTree {
        let best = self.node(ids);
        let mut node = StrategyTree::leaf(best.guess);
        for (r, group) in partition(self.game, best.guess, ids) {
            if r != self.game.affirmative() {
                node.branches.insert(r, self.build(&group));
            }
        }
        node
    }

    fn pool(&mut self, ids: &[u32]) -> Vec<usize> {
        let game = self.game;
        let set = CandidateSet::from_sorted(ids.to_vec());
        let n = self.config.breadth;
        let mut pool = top_n(game, &self.config.ordering, &set, n, |_| true);
        pool.retain(|&g| {
            let tally = self.tally.count(game, g, ids);
            tally.len() > 1 || (ids.len() == 1 && game.secret_guess(ids[0]) == g)
        });
        if pool.is_empty() {
            pool = top_n(game, &self.config.ordering, &set, n, SplitStats::is_useful);
        }
        pool
    }

    fn node(&mut self, ids: &[u32]) -> Best {
        let game = self.game;
        let n = ids.len();
        if n == 1 {
            return Best { value: 1, guess: game.secret_guess(ids[0]) };
        }
        if self.shortcuts {
            if n == 2 {
                return Best { value: 3, guess: game.secret_guess(ids[0]) };
            }
            if let Some(g) = perfect_splitter(game, ids, &mut self.tally) {
                return Best { value: 2 * n as u64 - 1, guess: g };
            }
        }
        if self.config.use_cache {
            if let Some(hit) = self.memo.get(ids) {
                self.stats.cache_hits += 1;
                return *hit;
            }
        }
        self.stats.nodes_expanded += 1;

        let mut options: Vec<(u64, usize)> = self
            .pool(ids)
            .into_iter()
            .map(|g| (split_lower_bound(game, n, self.tally.count(game, g, ids)), g))
            .collect();
        options.sort_unstable();

        let mut best = Best::NONE;
        for (lb, g) in options {
            if best.beats(lb, g) {
                break;
            }
            let mut partial = lb;
            let mut complete = true;
            for child in children(game, g, ids) {
                let floor = 2 * child.len() as u64 - 1;
                partial = partial - floor + self.node(&child).value;
                if best.beats(partial, g) {
                    complete = false;
                    break;
                }
            }
            if complete {
                best = Best { value: partial, guess: g };
            }
        }
        if self.config.use_cache {
            self.memo.insert(ids.into(), best);
        }
        best
    }
}

/// `MinTotal(C)` with the default size guard.
pub fn min_total(game: &Game, candidates: &CandidateSet) -> Result<u64, SearchError> {
    ExactSolver::new(game).min_total(candidates)
}

/// `ApMinTotal(C, n)` and its strategy tree.
pub fn ap_min_total(
    game: &Game,
    candidates: &CandidateSet,
    config: &SearchConfig,
) -> Result<(u64, StrategyTree), SearchError> {
    ApproxSolver::new(game, config.clone()).solve(candidates)
}

/// The strategy that always plays the valuation's argmin.
///
/// A single remaining candidate is always guessed directly, since it is the
/// only useful guess there; any other non-useful choice is an error because
/// the strategy would never finish.
pub fn greedy_tree(
    game: &Game,
    valuation: &CombinedValuation,
    candidates: &CandidateSet,
) -> Result<StrategyTree, SearchError> {
    if candidates.is_empty() {
        return Err(SearchError::Empty);
    }
    let mut tally = SplitTally::new(game);
    greedy_node(game, valuation, candidates, &mut tally)
}

fn greedy_node(
    game: &Game,
    valuation: &CombinedValuation,
    candidates: &CandidateSet,
    tally: &mut SplitTally,
) -> Result<StrategyTree, SearchError> {
    if candidates.len() == 1 {
        return Ok(StrategyTree::leaf(game.secret_guess(candidates.ids()[0])));
    }
    let guess = choose_guess(game, valuation, candidates)?;
    if tally.count(game, guess, candidates.ids()).len() == 1 {
        return Err(SearchError::NonTerminating {
            valuation: valuation.to_string(),
            guess: game.word(guess).to_string(),
            candidates: candidates.len(),
        });
    }
    let mut node = StrategyTree::leaf(guess);
    for (r, group) in partition(game, guess, candidates.ids()) {
        if r != game.affirmative() {
            let child = CandidateSet::from_sorted(group);
            node.branches.insert(r, greedy_node(game, valuation, &child, tally)?);
        }
    }
    Ok(node)
}
