//! Deliberately naive reference implementations, written straight from the
//! definitions, for checking the optimised code.

use std::collections::HashMap;

use guesscert::game::partition;
use guesscert::{CandidateSet, Game};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

/// Sum of node depths when `n` nodes are placed breadth-first into a tree
/// whose nodes have `b` children each.
pub fn level_order_fill(n: u64, b: u64) -> u64 {
    let mut queue = std::collections::VecDeque::from([1u64]);
    let mut sum = 0;
    for _ in 0..n {
        let depth = queue.pop_front().expect("queue never drains");
        sum += depth;
        for _ in 0..b.min(n) {
            queue.push_back(depth + 1);
        }
    }
    sum
}

/// `d(0..=max_n)` from the recurrence `d(n) = n + min sum d(a_i)` over ways
/// of splitting the `n - 1` non-root nodes into at most `b` subtrees.
pub fn depth_recurrence(max_n: usize, b: usize) -> Vec<u64> {
    const INF: u64 = u64::MAX / 4;
    let mut d = vec![0u64; max_n + 1];
    // parts[j][m]: least sum of d over exactly j subtrees holding m nodes
    let mut parts = vec![vec![INF; max_n + 1]; b + 1];
    parts[0][0] = 0;
    for n in 1..=max_n {
        let m = n - 1;
        // d(1..=m) are known; extend every row with total m
        for j in 1..=b {
            let mut best = INF;
            for a in 1..=m {
                let rest = parts[j - 1][m - a];
                if rest < INF {
                    best = best.min(d[a] + rest);
                }
            }
            parts[j][m] = best;
        }
        d[n] = n as u64 + (0..=b).map(|j| parts[j][m]).min().unwrap();
    }
    d
}

fn useful(game: &Game, ids: &[u32]) -> Vec<usize> {
    let set = CandidateSet::from_sorted(ids.to_vec());
    game.useful_guesses(&set)
}

fn children(game: &Game, g: usize, ids: &[u32]) -> Vec<Vec<u32>> {
    partition(game, g, ids)
        .into_iter()
        .filter(|(r, _)| *r != game.affirmative())
        .map(|(_, c)| c)
        .collect()
}

pub struct Naive<'g> {
    pub game: &'g Game,
    min_total: HashMap<Vec<u32>, u64>,
    lb: HashMap<(usize, Vec<u32>), u64>,
    max_splits_s: u64,
}

impl<'g> Naive<'g> {
    pub fn new(game: &'g Game) -> Naive<'g> {
        let all = game.all_secrets();
        let max_splits_s = (0..game.num_guesses())
            .map(|g| game.n_splits(g, &all))
            .max()
            .unwrap_or(0) as u64;
        Naive {
            game,
            min_total: HashMap::new(),
            lb: HashMap::new(),
            max_splits_s,
        }
    }

    /// `V*(g, C) = |C| + sum MinTotal(C_{g,r})`.
    pub fn cost(&mut self, g: usize, ids: &[u32]) -> u64 {
        ids.len() as u64 + children(self.game, g, ids).iter().map(|c| self.min_total(c)).sum::<u64>()
    }

    pub fn min_total(&mut self, ids: &[u32]) -> u64 {
        if ids.is_empty() {
            return 0;
        }
        if let Some(&v) = self.min_total.get(ids) {
            return v;
        }
        let v = useful(self.game, ids)
            .into_iter()
            .map(|g| self.cost(g, ids))
            .min()
            .unwrap();
        self.min_total.insert(ids.to_vec(), v);
        v
    }

    pub fn bound(n: u64, b: u64) -> u64 {
        level_order_fill(n, b.max(1))
    }

    pub fn v(&mut self, level: usize, g: usize, ids: &[u32]) -> u64 {
        ids.len() as u64
            + children(self.game, g, ids)
                .iter()
                .map(|c| self.lb(level, c))
                .sum::<u64>()
    }

    pub fn lb(&mut self, level: usize, ids: &[u32]) -> u64 {
        let n = ids.len() as u64;
        if n == 0 {
            return 0;
        }
        match level {
            1 => Naive::bound(n, self.max_splits_s),
            2 => {
                let set = CandidateSet::from_sorted(ids.to_vec());
                Naive::bound(n, self.game.max_splits(&set) as u64)
            }
            _ => {
                let key = (level, ids.to_vec());
                if let Some(&v) = self.lb.get(&key) {
                    return v;
                }
                let v = useful(self.game, ids)
                    .into_iter()
                    .map(|g| self.v(level - 2, g, ids))
                    .min()
                    .unwrap();
                self.lb.insert(key, v);
                v
            }
        }
    }
}

/// A random game over a small alphabet; every secret is also a guess.
pub fn random_game(rng: &mut StdRng, secrets: usize) -> Game {
    let len = rng.gen_range(3..=4);
    let alphabet: Vec<char> = "ABCDE"[..rng.gen_range(3..=5)].chars().collect();
    let mut words = std::collections::BTreeSet::new();
    let target = secrets + rng.gen_range(0..=12);
    while words.len() < target {
        let w: String = (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect();
        words.insert(w);
    }
    let guesses: Vec<String> = words.into_iter().collect();
    let mut pick = guesses.clone();
    pick.shuffle(rng);
    pick.truncate(secrets);
    let alphabet: String = alphabet.into_iter().collect();
    Game::new("random", len, &alphabet, &guesses, &pick).unwrap()
}

pub fn random_subset(rng: &mut StdRng, game: &Game, max: usize) -> CandidateSet {
    let mut ids: Vec<u32> = (0..game.num_secrets() as u32).collect();
    ids.shuffle(rng);
    ids.truncate(rng.gen_range(0..=max.min(ids.len())));
    ids.sort_unstable();
    CandidateSet::from_sorted(ids)
}
