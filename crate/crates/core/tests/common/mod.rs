#![allow(dead_code)]

use std::sync::OnceLock;

use guesscert::corpus::wordle_original;
use guesscert::{CandidateSet, Game};

pub fn wordle() -> &'static Game {
    static GAME: OnceLock<Game> = OnceLock::new();
    GAME.get_or_init(wordle_original)
}

pub fn words(game: &Game, list: &[&str]) -> CandidateSet {
    game.candidates_from_words(list.iter().copied()).unwrap()
}

pub fn starting_with(game: &Game, letter: char) -> CandidateSet {
    let ids = (0..game.num_secrets() as u32)
        .filter(|&s| game.secret_word(s).starts_with(letter))
        .collect();
    CandidateSet::from_sorted(ids)
}

pub fn idx(game: &Game, word: &str) -> usize {
    game.guess_index(word).unwrap()
}

pub mod oracles;
