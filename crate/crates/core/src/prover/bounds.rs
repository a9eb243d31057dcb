//! The `LB_i` / `V_i` tower.
//!
//! * `LB_1(C) = Bound(|C|, MaxSplits(S))`
//! * `LB_2(C) = Bound(|C|, MaxSplits(C))`
//! * `V_i(g, C) = |C| + sum_{r != r*} LB_i(C_{g,r})`
//! * `LB_{i+2}(C) = min_{g in UG(C)} V_i(g, C)`
//!
//! Every evaluation takes a budget. A result no larger than the budget is
//! exact; a larger result is only a certified lower bound. That is all the
//! elimination procedure and the inner minimisations need, and it lets whole
//! subtrees be skipped.
//!
//! Three facts drive the pruning: `LB_1` lower-bounds every level, so it is a
//! free placeholder for children not yet evaluated; a guess splits a subset
//! of `S` into no more parts than it splits `S`, so scanning guesses by
//! descending global split count allows early exits; and since `Bound` is
//! convex in `n`, a balanced partition into that many parts bounds `V_1`
//! from below before the split is even counted.
//!
//! For larger candidate sets it is cheaper to tally every guess at once from
//! a secret-major copy of the response table than to probe guesses one by
//! one, so both routes exist.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{bound, ProverError};
use crate::game::{partition, CandidateSet, Game, SplitTally};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Entry {
    Exact(u64),
    AtLeast(u64),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TowerStats {
    pub lb_evaluations: u64,
    pub cache_hits: u64,
    pub cache_entries: usize,
    pub evictions: u64,
}

/// Sets at least this large are tallied column-wise: split counts only,
/// and full tallies.
const SWEEP_PARTS_MIN: usize = 3;
const SWEEP_TALLY_MIN: usize = 12;
/// Globally strongest guesses tried on a set before a full sweep.
const PROBE_GUESSES: usize = 32;
const PROBE_MAX_SET: usize = 12;
/// Cells allowed in the secret-major table.
const COLUMN_MAX_CELLS: usize = 1 << 27;
/// Cells allowed in the per-guess response counters.
const COUNTER_MAX_CELLS: usize = 1 << 24;

/// Secret-major response codes plus scratch counters, for tallying every
/// guess against one candidate set in a single sequential sweep.
struct Columns {
    guesses: usize,
    responses: usize,
    table: Vec<u16>,
    counts: Vec<u16>,
    /// `words` bits per guess: which responses the sweep has seen.
    seen: Vec<u64>,
    words: usize,
    parts: Vec<u32>,
    acc: Vec<u64>,
}

impl Columns {
    fn build(game: &Game) -> Option<Columns> {
        let (ng, ns, nr) = (game.num_guesses(), game.num_secrets(), game.num_responses());
        if ng.saturating_mul(ns) > COLUMN_MAX_CELLS || ng.saturating_mul(nr) > COUNTER_MAX_CELLS || ns >= u16::MAX as usize {
            return None;
        }
        let mut table = vec![0u16; ng * ns];
        if ng > 0 {
            table.par_chunks_mut(ng).enumerate().for_each(|(s, row)| {
                for (g, cell) in row.iter_mut().enumerate() {
                    *cell = game.response(g, s as u32).0;
                }
            });
        }
        Some(Columns {
            guesses: ng,
            responses: nr,
            table,
            counts: vec![0; ng * nr],
            seen: vec![0; ng * nr.div_ceil(64)],
            words: nr.div_ceil(64),
            parts: vec![0; ng],
            acc: vec![0; ng],
        })
    }

    /// `MaxSplits(ids)`.
    fn max_parts(&mut self, ids: &[u32]) -> u32 {
        let (ng, w) = (self.guesses, self.words);
        self.seen.iter_mut().for_each(|b| *b = 0);
        for &s in ids {
            let row = &self.table[s as usize * ng..(s as usize + 1) * ng];
            for (bits, &r) in self.seen.chunks_exact_mut(w).zip(row) {
                bits[r as usize >> 6] |= 1 << (r & 63);
            }
        }
        self.seen
            .chunks_exact(w)
            .map(|bits| bits.iter().map(|b| b.count_ones()).sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Fills `parts` with every guess's split count on `ids` and `acc` with
    /// `sum_{r != r*} lb1(|C_{g,r}|)`.
    fn sweep(&mut self, ids: &[u32], lb1: &[u64], rstar: u16) {
        let (ng, nr) = (self.guesses, self.responses);
        self.parts.iter_mut().for_each(|p| *p = 0);
        self.acc.iter_mut().for_each(|a| *a = 0);
        for &s in ids {
            let row = &self.table[s as usize * ng..(s as usize + 1) * ng];
            for (g, &r) in row.iter().enumerate() {
                let c = &mut self.counts[g * nr + r as usize];
                if *c == 0 {
                    self.parts[g] += 1;
                }
                if r != rstar {
                    self.acc[g] += lb1[*c as usize + 1] - lb1[*c as usize];
                }
                *c += 1;
            }
        }
        for &s in ids {
            let row = &self.table[s as usize * ng..(s as usize + 1) * ng];
            for (g, &r) in row.iter().enumerate() {
                self.counts[g * nr + r as usize] = 0;
            }
        }
    }
}

pub struct LowerBounds<'g> {
    game: &'g Game,
    max_splits_s: u64,
    /// `(nSplits(g, S), g)` by descending split count, then index.
    order: Vec<(u32, u32)>,
    /// `LB_1` by candidate-set size.
    lb1: Vec<u64>,
    /// `caches[i]` holds `LB_i`, for `i >= 2`.
    caches: Vec<HashMap<Box<[u32]>, Entry>>,
    entries: usize,
    cache_cap: Option<usize>,
    tally: SplitTally,
    columns: Option<Columns>,
    stats: TowerStats,
}

impl<'g> LowerBounds<'g> {
    pub fn new(game: &'g Game) -> LowerBounds<'g> {
        let all = game.all_secrets();
        let mut tally = SplitTally::new(game);
        let mut order: Vec<(u32, u32)> = (0..game.num_guesses())
            .map(|g| (tally.count(game, g, all.ids()).len() as u32, g as u32))
            .collect();
        order.sort_unstable_by_key(|&(k, g)| (std::cmp::Reverse(k), g));
        let max_splits_s = order.first().map_or(0, |&(k, _)| k as u64);
        let b = max_splits_s.max(1);
        let lb1 = (0..=game.num_secrets() as u64)
            .map(|n| bound(n, b).expect("bounded by |S|^2"))
            .collect();
        LowerBounds {
            game,
            max_splits_s,
            order,
            lb1,
            caches: Vec::new(),
            entries: 0,
            cache_cap: None,
            tally,
            columns: Columns::build(game),
            stats: TowerStats::default(),
        }
    }

    /// Caps the number of cached bounds; past the cap the entries for the
    /// largest candidate sets are dropped first.
    pub fn with_cache_cap(mut self, cap: Option<usize>) -> LowerBounds<'g> {
        self.cache_cap = cap;
        self
    }

    /// Drops the secret-major table (`|G| x |S|` codes), trading speed on
    /// large candidate sets for memory.
    pub fn without_columns(mut self) -> LowerBounds<'g> {
        self.columns = None;
        self
    }

    pub fn game(&self) -> &'g Game {
        self.game
    }

    /// `MaxSplits(S)`, the branching factor behind `LB_1`.
    pub fn max_splits_s(&self) -> u64 {
        self.max_splits_s
    }

    pub fn stats(&self) -> TowerStats {
        TowerStats {
            cache_entries: self.entries,
            ..self.stats.clone()
        }
    }

    pub fn clear_cache(&mut self) {
        self.caches.clear();
        self.entries = 0;
    }

    /// `LB_level(C)`.
    pub fn lb(&mut self, level: usize, candidates: &CandidateSet) -> Result<u64, ProverError> {
        if level == 0 {
            return Err(ProverError::ZeroLevel);
        }
        Ok(self.lb_within(level, candidates.ids(), u64::MAX - 1))
    }

    /// `V_level(g, C)`.
    pub fn v(&mut self, level: usize, guess: usize, candidates: &CandidateSet) -> Result<u64, ProverError> {
        self.v_capped(level, guess, candidates, u64::MAX - 1)
    }

    /// `V_level(g, C)` if it is at most `budget`; otherwise some value in
    /// `(budget, V_level(g, C)]`.
    pub fn v_capped(
        &mut self,
        level: usize,
        guess: usize,
        candidates: &CandidateSet,
        budget: u64,
    ) -> Result<u64, ProverError> {
        if level == 0 {
            return Err(ProverError::ZeroLevel);
        }
        Ok(self.v_within(level, guess, candidates.ids(), budget))
    }

    /// `LB_level(C)` if it is at most `budget`; otherwise a lower bound
    /// exceeding `budget`.
    pub fn lb_capped(&mut self, level: usize, candidates: &CandidateSet, budget: u64) -> Result<u64, ProverError> {
        if level == 0 {
            return Err(ProverError::ZeroLevel);
        }
        Ok(self.lb_within(level, candidates.ids(), budget))
    }

    fn v_within(&mut self, level: usize, guess: usize, ids: &[u32], budget: u64) -> u64 {
        let game = self.game;
        let rstar = game.affirmative();
        let mut children: Vec<Vec<u32>> = partition(game, guess, ids)
            .into_iter()
            .filter(|(r, _)| *r != rstar)
            .map(|(_, c)| c)
            .collect();
        let mut partial = ids.len() as u64 + children.iter().map(|c| self.lb1[c.len()]).sum::<u64>();
        if level == 1 || partial > budget {
            return partial;
        }
        // Sets of at most two are exact at every level; the rest are refined
        // largest first, since they move the sum most.
        children.retain(|c| c.len() > 2);
        children.sort_by_key(|c| std::cmp::Reverse(c.len()));
        for child in &children {
            let base = self.lb1[child.len()];
            let room = budget - (partial - base);
            let x = self.lb_within(level, child, room);
            partial = partial - base + x;
            if x > room {
                return partial;
            }
        }
        partial
    }

    fn lb_within(&mut self, level: usize, ids: &[u32], budget: u64) -> u64 {
        let n = ids.len();
        if n <= 2 || level == 1 {
            return self.lb1[n];
        }
        if self.caches.len() <= level {
            self.caches.resize_with(level + 1, HashMap::new);
        }
        match self.caches[level].get(ids) {
            Some(&Entry::Exact(x)) => {
                self.stats.cache_hits += 1;
                return x;
            }
            Some(&Entry::AtLeast(x)) if x > budget => {
                self.stats.cache_hits += 1;
                return x;
            }
            _ => {}
        }
        self.stats.lb_evaluations += 1;
        let x = if level == 2 {
            self.lb2(ids, budget)
        } else {
            self.lb_min(level, ids, budget)
        };
        let entry = if x <= budget {
            Entry::Exact(x)
        } else {
            Entry::AtLeast(x)
        };
        let slot = self.caches[level].entry(ids.into());
        match slot {
            std::collections::hash_map::Entry::Occupied(mut o) => {
                if let (Entry::AtLeast(old), Entry::AtLeast(new)) = (*o.get(), entry) {
                    o.insert(Entry::AtLeast(old.max(new)));
                } else {
                    o.insert(entry);
                }
            }
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(entry);
                self.entries += 1;
                if self.cache_cap.is_some_and(|cap| self.entries > cap) {
                    self.evict();
                }
            }
        }
        x
    }

    /// `Bound(n, MaxSplits(C))`, scanning guesses by descending global split
    /// count and stopping as soon as the answer (or budget overrun) is settled.
    fn lb2(&mut self, ids: &[u32], budget: u64) -> u64 {
        let n = ids.len() as u64;
        let game = self.game;
        let settled = |best: u64| best + 1 >= n;
        let mut best = 0u64;
        if let Some(cols) = self.columns.as_mut().filter(|_| ids.len() >= SWEEP_PARTS_MIN) {
            // Small sets are often split (almost) perfectly by one of their
            // own members or a globally strong guess; try those before
            // sweeping every guess.
            if ids.len() <= PROBE_MAX_SET {
                let probes = ids
                    .iter()
                    .map(|&s| game.secret_guess(s))
                    .chain(self.order.iter().take(PROBE_GUESSES).map(|&(_, g)| g as usize));
                for g in probes {
                    best = best.max(self.tally.count(game, g, ids).len() as u64);
                    if settled(best) {
                        return 2 * n - 1;
                    }
                }
            }
            let best = cols.max_parts(ids) as u64;
            return bound(n, best.max(1)).expect("bounded by |S|^2");
        }
        for &(k, g) in &self.order {
            let k = k as u64;
            if best >= k || settled(best) {
                break;
            }
            let floor = bound(n, k.max(best)).expect("bounded by |S|^2");
            if floor > budget {
                return floor;
            }
            best = best.max(self.tally.count(game, g as usize, ids).len() as u64);
        }
        bound(n, best.max(1)).expect("bounded by |S|^2")
    }

    /// Least `V_1` over guesses that split `n` candidates into at most `k`
    /// parts (one of them possibly the affirmative singleton).
    fn balanced_v1(&self, n: usize, k: usize) -> u64 {
        let spread = |total: usize, parts: usize| -> u64 {
            let parts = parts.min(total);
            if parts == 0 {
                return if total == 0 { 0 } else { u64::MAX / 4 };
            }
            let (q, rem) = (total / parts, total % parts);
            rem as u64 * self.lb1[q + 1] + (parts - rem) as u64 * self.lb1[q]
        };
        let outside = spread(n, k);
        let inside = spread(n - 1, k.saturating_sub(1));
        n as u64 + outside.min(inside)
    }

    /// `min_{g in UG(C)} V_{level-2}(g, C)`.
    fn lb_min(&mut self, level: usize, ids: &[u32], budget: u64) -> u64 {
        let game = self.game;
        let n = ids.len();
        // A candidate that separates everything reaches the absolute minimum.
        if n <= game.num_responses() {
            for &s in ids {
                if self.tally.count(game, game.secret_guess(s), ids).len() == n {
                    return 2 * n as u64 - 1;
                }
            }
        }

        let rstar = game.affirmative().0;
        let mut floor = u64::MAX;
        let mut ranked: Vec<(u64, usize)> = Vec::new();
        let swept = n >= SWEEP_TALLY_MIN && self.columns.is_some();
        if let Some(cols) = self.columns.as_mut().filter(|_| swept) {
            cols.sweep(ids, &self.lb1, rstar);
            for g in 0..cols.guesses {
                if cols.parts[g] <= 1 {
                    continue;
                }
                let v1 = n as u64 + cols.acc[g];
                if v1 > budget {
                    floor = floor.min(v1);
                } else {
                    ranked.push((v1, g));
                }
            }
        }
        // Without a sweep, scan by descending split count until the static
        // bound rules out the rest.
        let scan = if swept { 0 } else { self.order.len() };
        for i in 0..scan {
            let (k, g) = self.order[i];
            if k <= 1 {
                break;
            }
            let s = self.balanced_v1(n, k as usize);
            if s > budget {
                floor = floor.min(s);
                break;
            }
            let tally = self.tally.count(game, g as usize, ids);
            if tally.len() <= 1 {
                continue;
            }
            let v1 = n as u64
                + tally
                    .iter()
                    .filter(|&&(r, _)| r != rstar)
                    .map(|&(_, m)| self.lb1[m as usize])
                    .sum::<u64>();
            if v1 > budget {
                floor = floor.min(v1);
            } else {
                ranked.push((v1, g as usize));
            }
        }
        ranked.sort_unstable();

        let mut best = u64::MAX;
        for (v1, g) in ranked {
            let room = budget.min(best.saturating_sub(1));
            if v1 > room {
                floor = floor.min(v1);
                break;
            }
            let x = self.v_within(level - 2, g, ids, room);
            if x <= room {
                best = x;
            } else {
                floor = floor.min(x);
            }
        }
        if best <= budget {
            best
        } else {
            floor
        }
    }

    fn evict(&mut self) {
        let Some(cap) = self.cache_cap else { return };
        let target = cap / 2;
        let mut by_size: Vec<usize> = Vec::new();
        for c in &self.caches {
            for k in c.keys() {
                if by_size.len() <= k.len() {
                    by_size.resize(k.len() + 1, 0);
                }
                by_size[k.len()] += 1;
            }
        }
        let mut kept = self.entries;
        let mut threshold = by_size.len();
        while kept > target && threshold > 0 {
            threshold -= 1;
            kept -= by_size[threshold];
        }
        for c in &mut self.caches {
            c.retain(|k, _| k.len() < threshold);
        }
        self.stats.evictions += (self.entries - kept) as u64;
        self.entries = kept;
    }
}
