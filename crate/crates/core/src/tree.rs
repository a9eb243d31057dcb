//! Strategy trees: scoring, validation, replay and the JSON document format.
//!
//! A node holds the guess to submit; its branches are keyed by every
//! non-affirmative response that can still occur. A secret is solved at the
//! node whose guess equals it, so the depth of that node (root = 1) is the
//! number of turns needed for the secret.
//!
//! Document format (`"format": 1`):
//!
//! ```json
//! {"format": 1, "game": "wordle-original", "guess": "SALET",
//!  "branches": {"00000": {"guess": "COURD", "branches": {}}}}
//! ```
//!
//! Leaves may omit `"branches"`.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::game::{partition, CandidateSet, Game, Response, SplitTally};

pub const TREE_FORMAT: u64 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("unknown word {0:?}")]
    UnknownWord(String),
    #[error("invalid response label {0:?}")]
    BadResponse(String),
    #[error("branch labelled with the affirmative response under {guess}")]
    AffirmativeBranch { guess: String },
    #[error("secret {secret} cannot be reached: no branch {response} under {guess}")]
    Unreachable {
        secret: String,
        guess: String,
        response: String,
    },
    #[error("branch {response} under {guess} has no candidates")]
    EmptyBranch { guess: String, response: String },
    #[error("guess {guess} is not useful for its {candidates} candidates")]
    UselessGuess { guess: String, candidates: usize },
    #[error("{0:?} is not a secret of this game")]
    NotASecret(String),
    #[error("tree is for game {found:?}, expected {expected:?}")]
    WrongGame { expected: String, found: String },
    #[error("unsupported tree format {0}")]
    UnsupportedFormat(u64),
    #[error("malformed tree document: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyTree {
    pub guess: usize,
    pub branches: BTreeMap<Response, StrategyTree>,
}

/// Total turns plus how many secrets finish at each depth (index 0 = depth 1).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeScore {
    pub total: u64,
    pub histogram: Vec<u64>,
}

impl TreeScore {
    pub fn max_depth(&self) -> usize {
        self.histogram.len()
    }

    pub fn secrets(&self) -> u64 {
        self.histogram.iter().sum()
    }
}

impl StrategyTree {
    pub fn leaf(guess: usize) -> StrategyTree {
        StrategyTree {
            guess,
            branches: BTreeMap::new(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn node_count(&self) -> usize {
        1 + self.branches.values().map(|c| c.node_count()).sum::<usize>()
    }

    /// Depth at which `secret` is guessed, following the game's answers.
    pub fn turns_needed(&self, game: &Game, secret: u32) -> Result<usize, TreeError> {
        Ok(self.replay(game, secret)?.len())
    }

    /// The `(guess, response)` pairs played until the affirmative response.
    pub fn replay(&self, game: &Game, secret: u32) -> Result<Vec<(usize, Response)>, TreeError> {
        if secret as usize >= game.num_secrets() {
            return Err(TreeError::NotASecret(format!("#{secret}")));
        }
        let target = game.secret_guess(secret);
        let mut node = self;
        let mut transcript = Vec::new();
        loop {
            let r = game.response(node.guess, secret);
            transcript.push((node.guess, r));
            if node.guess == target {
                return Ok(transcript);
            }
            node = node.branches.get(&r).ok_or_else(|| TreeError::Unreachable {
                secret: game.secret_word(secret).to_string(),
                guess: game.word(node.guess).to_string(),
                response: r.render(game.word_len()),
            })?;
        }
    }

    /// Total turns over every secret in `candidates`, which must be exactly
    /// the set of secrets reaching this node.
    pub fn score(&self, game: &Game, candidates: &CandidateSet) -> Result<TreeScore, TreeError> {
        let mut score = TreeScore::default();
        self.score_into(game, candidates.ids(), 1, &mut score)?;
        Ok(score)
    }

    fn score_into(&self, game: &Game, ids: &[u32], depth: usize, out: &mut TreeScore) -> Result<(), TreeError> {
        if ids.is_empty() {
            return Ok(());
        }
        let rstar = game.affirmative();
        for (r, group) in partition(game, self.guess, ids) {
            if r == rstar {
                out.total += depth as u64;
                if out.histogram.len() < depth {
                    out.histogram.resize(depth, 0);
                }
                out.histogram[depth - 1] += 1;
                continue;
            }
            let child = self.branches.get(&r).ok_or_else(|| TreeError::Unreachable {
                secret: game.secret_word(group[0]).to_string(),
                guess: game.word(self.guess).to_string(),
                response: r.render(game.word_len()),
            })?;
            child.score_into(game, &group, depth + 1, out)?;
        }
        Ok(())
    }

    /// `Total` over the whole secret set.
    pub fn total(&self, game: &Game) -> Result<u64, TreeError> {
        Ok(self.score(game, &game.all_secrets())?.total)
    }

    /// Checks the structural invariants against the secrets reaching the root:
    /// no affirmative branches, every branch non-empty, every possible
    /// response covered, every guess useful.
    pub fn validate(&self, game: &Game, candidates: &CandidateSet) -> Result<(), TreeError> {
        let mut tally = SplitTally::new(game);
        self.validate_node(game, candidates.ids(), &mut tally)
    }

    fn validate_node(&self, game: &Game, ids: &[u32], tally: &mut SplitTally) -> Result<(), TreeError> {
        let rstar = game.affirmative();
        let guess_word = || game.word(self.guess).to_string();
        if self.branches.contains_key(&rstar) {
            return Err(TreeError::AffirmativeBranch { guess: guess_word() });
        }
        let useful = if ids.len() <= 1 {
            ids.first().is_some_and(|&s| game.secret_guess(s) == self.guess)
        } else {
            tally.count(game, self.guess, ids).len() != 1
        };
        if !useful {
            return Err(TreeError::UselessGuess {
                guess: guess_word(),
                candidates: ids.len(),
            });
        }
        let groups: BTreeMap<Response, Vec<u32>> = partition(game, self.guess, ids)
            .into_iter()
            .filter(|(r, _)| *r != rstar)
            .collect();
        for r in self.branches.keys() {
            if !groups.contains_key(r) {
                return Err(TreeError::EmptyBranch {
                    guess: guess_word(),
                    response: r.render(game.word_len()),
                });
            }
        }
        for (r, group) in &groups {
            match self.branches.get(r) {
                Some(child) => child.validate_node(game, group, tally)?,
                None => {
                    return Err(TreeError::Unreachable {
                        secret: game.secret_word(group[0]).to_string(),
                        guess: guess_word(),
                        response: r.render(game.word_len()),
                    })
                }
            }
        }
        Ok(())
    }

    fn node_json(&self, game: &Game) -> Value {
        let mut obj = Map::new();
        obj.insert("guess".into(), Value::String(game.word(self.guess).to_string()));
        if !self.branches.is_empty() {
            let branches: Map<String, Value> = self
                .branches
                .iter()
                .map(|(r, c)| (r.render(game.word_len()), c.node_json(game)))
                .collect();
            obj.insert("branches".into(), Value::Object(branches));
        }
        Value::Object(obj)
    }

    /// The tree as a JSON document value.
    pub fn to_json(&self, game: &Game) -> Value {
        let mut doc = self.node_json(game);
        let obj = doc.as_object_mut().expect("node is an object");
        obj.insert("format".into(), json!(TREE_FORMAT));
        obj.insert("game".into(), Value::String(game.name().to_string()));
        doc
    }

    /// Serialises the tree; keys are sorted so the output is canonical.
    pub fn serialize(&self, game: &Game) -> String {
        serde_json::to_string(&self.to_json(game)).expect("json values always serialise")
    }

    pub fn serialize_pretty(&self, game: &Game) -> String {
        serde_json::to_string_pretty(&self.to_json(game)).expect("json values always serialise")
    }

    /// Hex SHA-256 of the canonical serialisation.
    pub fn digest(&self, game: &Game) -> String {
        hex::encode(Sha256::digest(self.serialize(game).as_bytes()))
    }

    /// Parses a tree document and validates it against the full secret set.
    pub fn parse(document: &str, game: &Game) -> Result<StrategyTree, TreeError> {
        let value: Value =
            serde_json::from_str(document).map_err(|e| TreeError::Malformed(e.to_string()))?;
        StrategyTree::from_json(&value, game)
    }

    pub fn from_json(value: &Value, game: &Game) -> Result<StrategyTree, TreeError> {
        let obj = value
            .as_object()
            .ok_or_else(|| TreeError::Malformed("document is not an object".into()))?;
        match obj.get("format").and_then(Value::as_u64) {
            Some(TREE_FORMAT) => {}
            Some(other) => return Err(TreeError::UnsupportedFormat(other)),
            None => return Err(TreeError::Malformed("missing \"format\"".into())),
        }
        let name = obj
            .get("game")
            .and_then(Value::as_str)
            .ok_or_else(|| TreeError::Malformed("missing \"game\"".into()))?;
        if name != game.name() {
            return Err(TreeError::WrongGame {
                expected: game.name().to_string(),
                found: name.to_string(),
            });
        }
        let tree = parse_node(value, game)?;
        tree.validate(game, &game.all_secrets())?;
        Ok(tree)
    }
}

fn parse_node(value: &Value, game: &Game) -> Result<StrategyTree, TreeError> {
    let obj = value
        .as_object()
        .ok_or_else(|| TreeError::Malformed("node is not an object".into()))?;
    let word = obj
        .get("guess")
        .and_then(Value::as_str)
        .ok_or_else(|| TreeError::Malformed("node without \"guess\"".into()))?;
    let guess = game
        .guess_index(word)
        .ok_or_else(|| TreeError::UnknownWord(word.to_string()))?;
    let mut branches = BTreeMap::new();
    match obj.get("branches") {
        None | Some(Value::Null) => {}
        Some(Value::Object(map)) => {
            for (label, child) in map {
                let r = Response::parse_digits(label, game.word_len())
                    .map_err(|_| TreeError::BadResponse(label.clone()))?;
                if r == game.affirmative() {
                    return Err(TreeError::AffirmativeBranch {
                        guess: game.word(guess).to_string(),
                    });
                }
                branches.insert(r, parse_node(child, game)?);
            }
        }
        Some(_) => return Err(TreeError::Malformed("\"branches\" is not an object".into())),
    }
    Ok(StrategyTree { guess, branches })
}
