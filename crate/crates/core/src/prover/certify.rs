//! Starting-guess elimination and optimality certificates.
//!
//! With `UB` the total of some concrete strategy, any first guess with
//! `V_i(g, S) > UB` cannot start an optimal strategy, because `V_i` bounds
//! the best total achievable after opening with `g`. Raising `i` on the
//! remaining guesses until every one of them has `V_i(g, S) >= UB` proves
//! `MinTotal(S) = UB`: the eliminated guesses cost more than `UB` and the
//! rest cost at least `UB`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{LowerBounds, ProverError};
use crate::corpus::game_checksums;
use crate::game::Game;
use crate::tree::StrategyTree;

pub const CHECKPOINT_FORMAT: u64 = 1;

#[derive(Debug, Clone)]
pub struct EliminationConfig {
    /// Highest level attempted before giving up; the run also stops at
    /// `2|S| + 1`, where `V_i` is exact.
    pub max_level: usize,
    pub checkpoint: Option<PathBuf>,
    /// Minimum time between checkpoint writes inside a level.
    pub checkpoint_interval: Duration,
    /// Where the upper bound came from, recorded in the certificate.
    pub ub_source: String,
}

impl Default for EliminationConfig {
    fn default() -> Self {
        EliminationConfig {
            max_level: 8,
            checkpoint: None,
            checkpoint_interval: Duration::from_secs(60),
            ub_source: "given".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub i: usize,
    /// Guesses with `V_i(g, S) <= UB`.
    pub survivors: usize,
    /// Least `V_i(g, S)` among the guesses evaluated at this level.
    #[serde(rename = "minV")]
    pub min_v: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub guess: String,
    pub level: usize,
    /// A lower bound on `V_level(guess, S)` that exceeds `UB`.
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "camelCase")]
pub enum Verdict {
    /// `MinTotal(S)` is proven. Every optimal first guess is among
    /// `starters`; all of them are optimal when there is exactly one, or when
    /// the level is exact.
    #[serde(rename_all = "camelCase")]
    Optimal {
        min_total: u64,
        starters: Vec<String>,
        level: usize,
    },
    /// Some guess still had `V_level < UB` when the level cap was reached.
    #[serde(rename_all = "camelCase")]
    Inconclusive { level: usize, survivors: Vec<String> },
}

impl Verdict {
    pub fn is_optimal(&self) -> bool {
        matches!(self, Verdict::Optimal { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OptimalityCertificate {
    pub game: String,
    pub corpus_checksums: Value,
    pub ub: u64,
    pub ub_source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_digest: Option<String>,
    pub levels: Vec<LevelRecord>,
    /// Guesses that never split `S`, and so never start an optimal strategy.
    pub useless: Vec<String>,
    pub eliminations: Vec<Elimination>,
    pub verdict: Verdict,
}

impl OptimalityCertificate {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialises")
    }
}

/// Resumable state of an elimination run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Checkpoint {
    pub format: u64,
    pub game: String,
    pub corpus_checksums: Value,
    pub ub: u64,
    pub level: usize,
    pub levels: Vec<LevelRecord>,
    pub useless: Vec<String>,
    pub eliminations: Vec<Elimination>,
    /// Guesses still to be judged at `level`, with their value at the
    /// previous level.
    pub pending: Vec<(String, u64)>,
    /// Guesses already judged at `level`.
    pub done: Vec<(String, u64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<OptimalityCertificate>,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Checkpoint, ProverError> {
        let cp: Checkpoint = serde_json::from_str(&fs::read_to_string(path)?)?;
        if cp.format != CHECKPOINT_FORMAT {
            return Err(ProverError::CheckpointMismatch(format!("format {}", cp.format)));
        }
        Ok(cp)
    }

    pub fn save(&self, path: &Path) -> Result<(), ProverError> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_string(self)?)?;
        fs::rename(tmp, path)?;
        Ok(())
    }
}

/// One guess judged during a run.
#[derive(Debug, Clone)]
pub struct Progress<'a> {
    pub level: usize,
    pub guess: &'a str,
    pub value: u64,
    pub evaluated: usize,
    pub total: usize,
    pub survivors: usize,
    pub elapsed: Duration,
}

/// Filters first guesses against `ub` and reports the verdict.
///
/// `ub` must be the total of a real strategy for the whole secret set.
pub fn filter_starting_guesses(
    bounds: &mut LowerBounds<'_>,
    ub: u64,
    config: &EliminationConfig,
    progress: &mut dyn FnMut(&Progress<'_>),
) -> Result<OptimalityCertificate, ProverError> {
    run(bounds, ub, config, None, progress)
}

/// Certifies `tree` as optimal, failing as soon as its first guess is
/// eliminated.
pub fn prove_optimal(
    bounds: &mut LowerBounds<'_>,
    tree: &StrategyTree,
    config: &EliminationConfig,
    progress: &mut dyn FnMut(&Progress<'_>),
) -> Result<OptimalityCertificate, ProverError> {
    let game = bounds.game();
    tree.validate(game, &game.all_secrets())?;
    let ub = tree.total(game)?;
    let digest = tree.digest(game);
    let config = EliminationConfig {
        ub_source: format!("strategy tree {digest}"),
        ..config.clone()
    };
    let mut cert = run(bounds, ub, &config, Some(tree.guess), progress)?;
    cert.tree_digest = Some(digest);
    Ok(cert)
}

fn fresh_state(game: &Game, ub: u64) -> Checkpoint {
    let all = game.all_secrets();
    let (useful, useless): (Vec<usize>, Vec<usize>) =
        (0..game.num_guesses()).partition(|&g| game.is_useful(g, &all));
    Checkpoint {
        format: CHECKPOINT_FORMAT,
        game: game.name().to_string(),
        corpus_checksums: game_checksums(game),
        ub,
        level: 1,
        levels: Vec::new(),
        useless: useless.iter().map(|&g| game.word(g).to_string()).collect(),
        eliminations: Vec::new(),
        pending: useful.iter().map(|&g| (game.word(g).to_string(), 0)).collect(),
        done: Vec::new(),
        certificate: None,
    }
}

fn resume_state(game: &Game, ub: u64, path: &Path) -> Result<Option<Checkpoint>, ProverError> {
    if !path.exists() {
        return Ok(None);
    }
    let cp = Checkpoint::load(path)?;
    if cp.game != game.name() || cp.corpus_checksums != game_checksums(game) {
        return Err(ProverError::CheckpointMismatch(format!("written for game {}", cp.game)));
    }
    if cp.ub != ub {
        return Err(ProverError::CheckpointMismatch(format!("written for UB {}", cp.ub)));
    }
    Ok(Some(cp))
}

fn run(
    bounds: &mut LowerBounds<'_>,
    ub: u64,
    config: &EliminationConfig,
    required: Option<usize>,
    progress: &mut dyn FnMut(&Progress<'_>),
) -> Result<OptimalityCertificate, ProverError> {
    let game = bounds.game();
    let all = game.all_secrets();
    let exact_level = 2 * all.len() + 1;
    let cap = config.max_level.min(exact_level);
    let mut state = match &config.checkpoint {
        Some(path) => resume_state(game, ub, path)?,
        None => None,
    }
    .unwrap_or_else(|| fresh_state(game, ub));
    if let Some(cert) = &state.certificate {
        return Ok(cert.clone());
    }

    let index = |word: &str| game.guess_index(word).expect("checkpoint words come from the game");
    let start = Instant::now();
    let mut last_save = Instant::now();
    let save = |state: &Checkpoint| -> Result<(), ProverError> {
        match &config.checkpoint {
            Some(path) => state.save(path),
            None => Ok(()),
        }
    };

    let verdict = loop {
        if all.is_empty() {
            break Verdict::Optimal {
                min_total: 0,
                starters: Vec::new(),
                level: 0,
            };
        }
        if state.level > cap {
            break Verdict::Inconclusive {
                level: state.level - 1,
                survivors: state.pending.iter().map(|(w, _)| w.clone()).collect(),
            };
        }
        let level = state.level;
        // best first; popped from the back
        state.pending.sort_by_key(|(w, v)| std::cmp::Reverse((*v, index(w))));
        let total = state.pending.len() + state.done.len();
        let mut survivors = state.done.iter().filter(|(_, x)| *x <= ub).count();
        while let Some((word, _)) = state.pending.pop() {
            let g = index(&word);
            let x = bounds.v_capped(level, g, &all, ub)?;
            if Some(g) == required && x > ub {
                return Err(ProverError::StrategyNotOptimal {
                    guess: word,
                    level,
                    value: x,
                    bound: ub,
                });
            }
            survivors += usize::from(x <= ub);
            state.done.push((word, x));
            let (word, value) = state.done.last().expect("just pushed");
            progress(&Progress {
                level,
                guess: word,
                value: *value,
                evaluated: state.done.len(),
                total,
                survivors,
                elapsed: start.elapsed(),
            });
            if last_save.elapsed() >= config.checkpoint_interval {
                save(&state)?;
                last_save = Instant::now();
            }
        }

        let min_v = state.done.iter().map(|(_, x)| *x).min().unwrap_or(u64::MAX);
        let (kept, dropped): (Vec<_>, Vec<_>) = std::mem::take(&mut state.done)
            .into_iter()
            .partition(|(_, x)| *x <= ub);
        state.eliminations.extend(dropped.into_iter().map(|(guess, value)| Elimination {
            guess,
            level,
            value,
        }));
        state.levels.push(LevelRecord {
            i: level,
            survivors: kept.len(),
            min_v,
        });
        if kept.is_empty() {
            return Err(ProverError::InconsistentBound { ub, level, min_v });
        }
        if level >= exact_level {
            // V_level is the exact cost of each first guess here.
            let starters: Vec<String> = kept.iter().filter(|(_, x)| *x == min_v).map(|(w, _)| w.clone()).collect();
            if let Some(g) = required {
                if let Some((w, x)) = kept.iter().find(|(w, _)| index(w) == g).filter(|(_, x)| *x > min_v) {
                    return Err(ProverError::StrategyNotOptimal {
                        guess: w.clone(),
                        level,
                        value: *x,
                        bound: min_v,
                    });
                }
            }
            break Verdict::Optimal {
                min_total: min_v,
                starters,
                level,
            };
        }
        if kept.iter().all(|(_, x)| *x >= ub) {
            break Verdict::Optimal {
                min_total: ub,
                starters: kept.into_iter().map(|(w, _)| w).collect(),
                level,
            };
        }
        state.pending = kept;
        state.level += 1;
        save(&state)?;
        last_save = Instant::now();
    };

    let cert = OptimalityCertificate {
        game: game.name().to_string(),
        corpus_checksums: state.corpus_checksums.clone(),
        ub,
        ub_source: config.ub_source.clone(),
        tree_digest: None,
        levels: state.levels.clone(),
        useless: state.useless.clone(),
        eliminations: state.eliminations.clone(),
        verdict,
    };
    state.certificate = Some(cert.clone());
    save(&state)?;
    Ok(cert)
}
