//! One play-through of a game: the candidate set, the transcript and, when a
//! strategy tree is loaded, where the transcript sits in it.
//!
//! A session is a pure fold over feedback events, so replaying its
//! transcript from scratch rebuilds it exactly.

use std::sync::Arc;

use guesscert::valuation::choose_guess;
use guesscert::{CandidateSet, CombinedValuation, Game, Response, StrategyTree};
use serde::Serialize;

/// Sample size reported with each update.
pub const SAMPLE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeedbackError {
    UnknownGuess(String),
    BadResponse(String),
    AlreadySolved,
    /// No secret is consistent with the transcript plus this feedback.
    Contradiction {
        guess: String,
        response: String,
        candidates_before: usize,
    },
}

impl std::fmt::Display for FeedbackError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FeedbackError::UnknownGuess(w) => write!(f, "{w:?} is not an allowed guess"),
            FeedbackError::BadResponse(why) => write!(f, "{why}"),
            FeedbackError::AlreadySolved => write!(f, "the session is already solved"),
            FeedbackError::Contradiction {
                guess,
                response,
                candidates_before,
            } => write!(
                f,
                "no secret is consistent with {guess} -> {response} (had {candidates_before} candidates)"
            ),
        }
    }
}

impl std::error::Error for FeedbackError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuggestionSource {
    Tree,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Snapshot {
    pub suggestion: Option<String>,
    pub suggestion_source: Option<SuggestionSource>,
    pub candidate_count: usize,
    pub sample_candidates: Vec<String>,
    pub solved: bool,
}

pub struct Session {
    game: Arc<Game>,
    tree: Option<Arc<StrategyTree>>,
    candidates: CandidateSet,
    transcript: Vec<(usize, Response)>,
    on_tree: bool,
    solved: bool,
}

impl Session {
    pub fn new(game: Arc<Game>, tree: Option<Arc<StrategyTree>>) -> Session {
        let candidates = game.all_secrets();
        Session {
            on_tree: tree.is_some(),
            game,
            tree,
            candidates,
            transcript: Vec::new(),
            solved: false,
        }
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn candidates(&self) -> &CandidateSet {
        &self.candidates
    }

    pub fn transcript(&self) -> &[(usize, Response)] {
        &self.transcript
    }

    pub fn is_solved(&self) -> bool {
        self.solved
    }

    /// The tree node reached by the transcript, if it never left the tree.
    fn node(&self) -> Option<&StrategyTree> {
        if !self.on_tree {
            return None;
        }
        let mut node = self.tree.as_deref()?;
        for (g, r) in &self.transcript {
            if *g != node.guess {
                return None;
            }
            node = node.branches.get(r)?;
        }
        Some(node)
    }

    pub fn suggestion(&self) -> Option<(usize, SuggestionSource)> {
        if self.solved || self.candidates.is_empty() {
            return None;
        }
        if let Some(node) = self.node() {
            return Some((node.guess, SuggestionSource::Tree));
        }
        let g = choose_guess(&self.game, &CombinedValuation::default_ordering(), &self.candidates)
            .expect("non-empty candidate set always has a choice");
        Some((g, SuggestionSource::Fallback))
    }

    pub fn snapshot(&self) -> Snapshot {
        let suggestion = self.suggestion();
        Snapshot {
            suggestion: suggestion.map(|(g, _)| self.game.word(g).to_string()),
            suggestion_source: suggestion.map(|(_, s)| s),
            candidate_count: self.candidates.len(),
            sample_candidates: self
                .candidates
                .ids()
                .iter()
                .take(SAMPLE_LIMIT)
                .map(|&s| self.game.secret_word(s).to_string())
                .collect(),
            solved: self.solved,
        }
    }

    /// Records that `guess` was played and coloured `response` (digits or
    /// B/Y/G letters). Leaves the session untouched on error.
    pub fn feedback(&mut self, guess: &str, response: &str) -> Result<Snapshot, FeedbackError> {
        if self.solved {
            return Err(FeedbackError::AlreadySolved);
        }
        let game = &self.game;
        let g = game
            .guess_index(guess)
            .ok_or_else(|| FeedbackError::UnknownGuess(guess.to_string()))?;
        let r = Response::parse(response, game.word_len()).map_err(|e| FeedbackError::BadResponse(e.to_string()))?;
        let next = game.filter(&self.candidates, g, r);
        if next.is_empty() {
            return Err(FeedbackError::Contradiction {
                guess: game.word(g).to_string(),
                response: r.render(game.word_len()),
                candidates_before: self.candidates.len(),
            });
        }
        let stays = self.node().is_some_and(|n| n.guess == g && n.branches.contains_key(&r));
        self.on_tree = stays;
        self.solved = r == game.affirmative();
        self.candidates = next;
        self.transcript.push((g, r));
        Ok(self.snapshot())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Arc<Game> {
        let words: Vec<String> = ["ABC", "ACB", "BAC", "BCA", "CAB", "CBA"].iter().map(|w| w.to_string()).collect();
        Arc::new(Game::new("toy", 3, "ABC", &words, &words).unwrap())
    }

    #[test]
    fn affirmative_solves() {
        let mut s = Session::new(toy(), None);
        let snap = s.feedback("BCA", "222").unwrap();
        assert!(snap.solved);
        assert_eq!(snap.suggestion, None);
        assert_eq!(snap.candidate_count, 1);
        assert_eq!(s.feedback("ABC", "000"), Err(FeedbackError::AlreadySolved));
    }

    #[test]
    fn errors_leave_state_alone() {
        let mut s = Session::new(toy(), None);
        assert!(matches!(s.feedback("ABC", "2x2"), Err(FeedbackError::BadResponse(_))));
        assert!(matches!(s.feedback("ZZZ", "000"), Err(FeedbackError::UnknownGuess(_))));
        // ABC against a permutation of itself never scores all grey.
        assert!(matches!(s.feedback("ABC", "000"), Err(FeedbackError::Contradiction { .. })));
        assert_eq!(s.candidates().len(), 6);
        assert!(s.transcript().is_empty());
    }
}
