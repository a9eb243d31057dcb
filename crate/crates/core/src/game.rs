//! Guessing games: words, responses, candidate sets and splits.
//!
//! A [`Game`] owns an alphabetically sorted guess list `G` and a subset `S`
//! of secrets. Secrets are addressed by their position in `S` (a "secret id"),
//! guesses by their position in `G`. Responses are per-position colour codes
//! packed into a base-3 integer with the first position most significant, so
//! the integer order of responses is the lexicographic order of their digit
//! strings.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

/// Longest word we support; `3^10` still fits in a `u16` response code.
pub const MAX_WORD_LEN: usize = 10;
/// Largest alphabet we support.
pub const MAX_ALPHABET: usize = 64;
/// Default cap on the precomputed response matrix.
pub const DEFAULT_MATRIX_LIMIT_BYTES: usize = 1 << 30;

const NO_SECRET: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("word {word:?} has {found} symbols, expected {expected}")]
    WrongLength {
        word: String,
        expected: usize,
        found: usize,
    },
    #[error("word {word:?} contains {symbol:?}, which is not in the alphabet")]
    BadSymbol { word: String, symbol: char },
    #[error("unknown word {0:?}")]
    UnknownWord(String),
    #[error("secret {0:?} is not in the guess list")]
    SecretNotGuessable(String),
    #[error("word length must be between 1 and {MAX_WORD_LEN}, got {0}")]
    BadWordLength(usize),
    #[error("alphabet must have between 1 and {MAX_ALPHABET} distinct symbols")]
    BadAlphabet,
    #[error("invalid response {text:?}: {reason}")]
    BadResponse { text: String, reason: &'static str },
    #[error("secret id {0} is out of range")]
    BadSecretId(u32),
}

/// A response: one grey (0), yellow (1) or green (2) digit per position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Response(pub u16);

impl Response {
    /// The all-green response for words of `word_len` symbols.
    pub fn affirmative(word_len: usize) -> Response {
        Response((3u16.pow(word_len as u32)) - 1)
    }

    pub fn code(self) -> u16 {
        self.0
    }

    pub fn digits(self, word_len: usize) -> Vec<u8> {
        let mut out = vec![0u8; word_len];
        let mut code = self.0;
        for slot in out.iter_mut().rev() {
            *slot = (code % 3) as u8;
            code /= 3;
        }
        out
    }

    /// Renders the response as a digit string such as `"00120"`.
    pub fn render(self, word_len: usize) -> String {
        self.digits(word_len)
            .into_iter()
            .map(|d| char::from(b'0' + d))
            .collect()
    }

    /// Parses a digit string (`"01020"`) or a colour-letter string
    /// (`"BYBGB"`, B/grey = 0, Y = 1, G = 2). Case-insensitive.
    pub fn parse(text: &str, word_len: usize) -> Result<Response, GameError> {
        let bad = |reason| GameError::BadResponse {
            text: text.to_string(),
            reason,
        };
        let trimmed = text.trim();
        if trimmed.chars().count() != word_len {
            return Err(bad("wrong number of positions"));
        }
        let mut code: u16 = 0;
        for ch in trimmed.chars() {
            let digit = match ch.to_ascii_uppercase() {
                '0' | 'B' => 0,
                '1' | 'Y' => 1,
                '2' | 'G' => 2,
                _ => return Err(bad("expected digits 0/1/2 or letters B/Y/G")),
            };
            code = code * 3 + digit;
        }
        Ok(Response(code))
    }

    /// Strict parse of the canonical digit form only.
    pub fn parse_digits(text: &str, word_len: usize) -> Result<Response, GameError> {
        if !text.chars().all(|c| matches!(c, '0' | '1' | '2')) {
            return Err(GameError::BadResponse {
                text: text.to_string(),
                reason: "expected digits 0/1/2",
            });
        }
        Response::parse(text, word_len)
    }
}

/// Colours a guess against a secret, both given as alphabet codes.
///
/// Greens are assigned first and remove their letter from the pool of
/// unmatched secret letters; yellows are then assigned left to right only
/// while a matching unmatched letter remains.
pub fn score_codes(guess: &[u8], secret: &[u8]) -> Response {
    debug_assert_eq!(guess.len(), secret.len());
    let mut remaining = [0u8; MAX_ALPHABET];
    let mut digits = [0u8; MAX_WORD_LEN];
    for i in 0..guess.len() {
        if guess[i] == secret[i] {
            digits[i] = 2;
        } else {
            remaining[secret[i] as usize] += 1;
        }
    }
    let mut code: u16 = 0;
    for i in 0..guess.len() {
        if digits[i] != 2 {
            let slot = &mut remaining[guess[i] as usize];
            if *slot > 0 {
                *slot -= 1;
                digits[i] = 1;
            }
        }
        code = code * 3 + digits[i] as u16;
    }
    Response(code)
}

/// Canonicalises a word to upper case.
pub fn canonical_word(word: &str) -> String {
    word.trim().to_uppercase()
}

#[derive(Debug, Clone)]
enum ResponseTable {
    /// Row-major `|G| x |S|` matrix of response codes.
    Precomputed(Vec<u16>),
    OnDemand,
}

/// A concrete guessing game `(G, S, R, r*, a)` with coloured-tile answers.
#[derive(Debug, Clone)]
pub struct Game {
    name: String,
    word_len: usize,
    alphabet: Vec<char>,
    guesses: Vec<String>,
    codes: Vec<u8>,
    secrets: Vec<u32>,
    secret_of_guess: Vec<u32>,
    table: ResponseTable,
}

impl Game {
    /// Builds a game, precomputing the response matrix when it fits in
    /// [`DEFAULT_MATRIX_LIMIT_BYTES`].
    pub fn new(
        name: &str,
        word_len: usize,
        alphabet: &str,
        guesses: &[String],
        secrets: &[String],
    ) -> Result<Game, GameError> {
        Game::with_matrix_limit(
            name,
            word_len,
            alphabet,
            guesses,
            secrets,
            DEFAULT_MATRIX_LIMIT_BYTES,
        )
    }

    pub fn with_matrix_limit(
        name: &str,
        word_len: usize,
        alphabet: &str,
        guesses: &[String],
        secrets: &[String],
        matrix_limit_bytes: usize,
    ) -> Result<Game, GameError> {
        if word_len == 0 || word_len > MAX_WORD_LEN {
            return Err(GameError::BadWordLength(word_len));
        }
        let mut symbols: Vec<char> = alphabet.chars().collect();
        symbols.sort_unstable();
        symbols.dedup();
        if symbols.is_empty() || symbols.len() > MAX_ALPHABET {
            return Err(GameError::BadAlphabet);
        }

        let mut words: Vec<String> = guesses.iter().map(|w| canonical_word(w)).collect();
        words.sort();
        words.dedup();
        let mut codes = Vec::with_capacity(words.len() * word_len);
        for w in &words {
            codes.extend(encode_word(w, word_len, &symbols)?);
        }

        let mut secret_ids = Vec::with_capacity(secrets.len());
        for s in secrets {
            let s = canonical_word(s);
            encode_word(&s, word_len, &symbols)?;
            match words.binary_search(&s) {
                Ok(i) => secret_ids.push(i as u32),
                Err(_) => return Err(GameError::SecretNotGuessable(s)),
            }
        }
        secret_ids.sort_unstable();
        secret_ids.dedup();

        let mut secret_of_guess = vec![NO_SECRET; words.len()];
        for (pos, &g) in secret_ids.iter().enumerate() {
            secret_of_guess[g as usize] = pos as u32;
        }

        let mut game = Game {
            name: name.to_string(),
            word_len,
            alphabet: symbols,
            guesses: words,
            codes,
            secrets: secret_ids,
            secret_of_guess,
            table: ResponseTable::OnDemand,
        };
        let cells = game.guesses.len().saturating_mul(game.secrets.len());
        if cells.saturating_mul(2) <= matrix_limit_bytes {
            game.table = ResponseTable::Precomputed(game.build_matrix());
        }
        Ok(game)
    }

    fn build_matrix(&self) -> Vec<u16> {
        let ns = self.secrets.len();
        let mut matrix = vec![0u16; self.guesses.len() * ns];
        if ns == 0 {
            return matrix;
        }
        matrix
            .par_chunks_mut(ns)
            .enumerate()
            .for_each(|(g, row)| {
                let gc = self.word_codes(g);
                for (s, cell) in row.iter_mut().enumerate() {
                    *cell = score_codes(gc, self.word_codes(self.secrets[s] as usize)).0;
                }
            });
        matrix
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn word_len(&self) -> usize {
        self.word_len
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn guesses(&self) -> &[String] {
        &self.guesses
    }

    pub fn num_guesses(&self) -> usize {
        self.guesses.len()
    }

    pub fn num_secrets(&self) -> usize {
        self.secrets.len()
    }

    /// Number of possible responses, `3^word_len`.
    pub fn num_responses(&self) -> usize {
        3usize.pow(self.word_len as u32)
    }

    pub fn affirmative(&self) -> Response {
        Response::affirmative(self.word_len)
    }

    pub fn has_matrix(&self) -> bool {
        matches!(self.table, ResponseTable::Precomputed(_))
    }

    pub fn word(&self, guess: usize) -> &str {
        &self.guesses[guess]
    }

    pub fn guess_index(&self, word: &str) -> Option<usize> {
        self.guesses.binary_search(&canonical_word(word)).ok()
    }

    pub fn require_guess(&self, word: &str) -> Result<usize, GameError> {
        self.guess_index(word)
            .ok_or_else(|| GameError::UnknownWord(canonical_word(word)))
    }

    /// Guess index of a secret id.
    pub fn secret_guess(&self, secret: u32) -> usize {
        self.secrets[secret as usize] as usize
    }

    pub fn secret_word(&self, secret: u32) -> &str {
        self.word(self.secret_guess(secret))
    }

    /// Secret id of a guess, if the guess is a possible secret.
    pub fn secret_of_guess(&self, guess: usize) -> Option<u32> {
        match self.secret_of_guess[guess] {
            NO_SECRET => None,
            s => Some(s),
        }
    }

    pub fn secret_id(&self, word: &str) -> Option<u32> {
        self.guess_index(word).and_then(|g| self.secret_of_guess(g))
    }

    fn word_codes(&self, guess: usize) -> &[u8] {
        &self.codes[guess * self.word_len..(guess + 1) * self.word_len]
    }

    /// Response to guess `guess` when the secret is secret id `secret`.
    #[inline]
    pub fn response(&self, guess: usize, secret: u32) -> Response {
        match &self.table {
            ResponseTable::Precomputed(m) => {
                Response(m[guess * self.secrets.len() + secret as usize])
            }
            ResponseTable::OnDemand => score_codes(
                self.word_codes(guess),
                self.word_codes(self.secrets[secret as usize] as usize),
            ),
        }
    }

    /// Calls `f(secret, response_code)` for each secret in `candidates`.
    #[inline]
    pub fn for_each_response(&self, guess: usize, candidates: &[u32], mut f: impl FnMut(u32, u16)) {
        match &self.table {
            ResponseTable::Precomputed(m) => {
                let ns = self.secrets.len();
                let row = &m[guess * ns..(guess + 1) * ns];
                for &s in candidates {
                    f(s, row[s as usize]);
                }
            }
            ResponseTable::OnDemand => {
                let gc = self.word_codes(guess);
                for &s in candidates {
                    let sc = self.word_codes(self.secrets[s as usize] as usize);
                    f(s, score_codes(gc, sc).0);
                }
            }
        }
    }

    /// The answering function on arbitrary words of the game's alphabet.
    pub fn answer(&self, guess: &str, secret: &str) -> Result<Response, GameError> {
        let g = encode_word(&canonical_word(guess), self.word_len, &self.alphabet)?;
        let s = encode_word(&canonical_word(secret), self.word_len, &self.alphabet)?;
        Ok(score_codes(&g, &s))
    }

    /// The full secret set `S` as a candidate set.
    pub fn all_secrets(&self) -> CandidateSet {
        CandidateSet((0..self.secrets.len() as u32).collect())
    }

    /// Candidate set from secret words; unknown or non-secret words are errors.
    pub fn candidates_from_words<I, W>(&self, words: I) -> Result<CandidateSet, GameError>
    where
        I: IntoIterator<Item = W>,
        W: AsRef<str>,
    {
        let mut ids = Vec::new();
        for w in words {
            let w = w.as_ref();
            ids.push(
                self.secret_id(w)
                    .ok_or_else(|| GameError::UnknownWord(canonical_word(w)))?,
            );
        }
        CandidateSet::new(ids, self)
    }

    pub fn words_of(&self, set: &CandidateSet) -> Vec<&str> {
        set.ids().iter().map(|&s| self.secret_word(s)).collect()
    }

    /// `{c in C : answer(g, c) = r}`.
    pub fn filter(&self, candidates: &CandidateSet, guess: usize, response: Response) -> CandidateSet {
        let mut out = Vec::new();
        self.for_each_response(guess, candidates.ids(), |s, r| {
            if r == response.0 {
                out.push(s);
            }
        });
        CandidateSet(out)
    }

    /// All non-empty splits of `candidates` by `guess`, keyed by response.
    pub fn split(&self, candidates: &CandidateSet, guess: usize) -> SplitMap {
        let mut entries: BTreeMap<Response, CandidateSet> = BTreeMap::new();
        for (r, ids) in partition(self, guess, candidates.ids()) {
            entries.insert(r, CandidateSet(ids));
        }
        SplitMap { entries }
    }

    /// Number of non-empty splits.
    pub fn n_splits(&self, guess: usize, candidates: &CandidateSet) -> usize {
        let mut tally = SplitTally::new(self);
        tally.count(self, guess, candidates.ids()).len()
    }

    /// Whether `guess` is useful w.r.t. `candidates`.
    pub fn is_useful(&self, guess: usize, candidates: &CandidateSet) -> bool {
        if candidates.len() <= 1 {
            return self
                .secret_of_guess(guess)
                .is_some_and(|s| candidates.contains(s));
        }
        self.n_splits(guess, candidates) != 1
    }

    /// `UG(C)` in guess-list order.
    pub fn useful_guesses(&self, candidates: &CandidateSet) -> Vec<usize> {
        if candidates.len() <= 1 {
            return candidates.ids().iter().map(|&s| self.secret_guess(s)).collect();
        }
        let mut tally = SplitTally::new(self);
        (0..self.num_guesses())
            .filter(|&g| tally.count(self, g, candidates.ids()).len() != 1)
            .collect()
    }

    /// `max_g nSplits(g, C)` over the whole guess list.
    pub fn max_splits(&self, candidates: &CandidateSet) -> usize {
        if candidates.is_empty() {
            return 0;
        }
        (0..self.num_guesses())
            .into_par_iter()
            .map_init(
                || SplitTally::new(self),
                |tally, g| tally.count(self, g, candidates.ids()).len(),
            )
            .max()
            .unwrap_or(0)
    }
}

fn encode_word(word: &str, word_len: usize, alphabet: &[char]) -> Result<Vec<u8>, GameError> {
    let chars: Vec<char> = word.chars().collect();
    if chars.len() != word_len {
        return Err(GameError::WrongLength {
            word: word.to_string(),
            expected: word_len,
            found: chars.len(),
        });
    }
    chars
        .iter()
        .map(|c| {
            alphabet
                .binary_search(c)
                .map(|i| i as u8)
                .map_err(|_| GameError::BadSymbol {
                    word: word.to_string(),
                    symbol: *c,
                })
        })
        .collect()
}

/// A set of candidate secrets, held as sorted, duplicate-free secret ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CandidateSet(Vec<u32>);

impl CandidateSet {
    pub fn new(mut ids: Vec<u32>, game: &Game) -> Result<CandidateSet, GameError> {
        ids.sort_unstable();
        ids.dedup();
        if let Some(&bad) = ids.iter().find(|&&s| s as usize >= game.num_secrets()) {
            return Err(GameError::BadSecretId(bad));
        }
        Ok(CandidateSet(ids))
    }

    /// Wraps ids that are already sorted and duplicate-free.
    pub fn from_sorted(ids: Vec<u32>) -> CandidateSet {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        CandidateSet(ids)
    }

    pub fn empty() -> CandidateSet {
        CandidateSet(Vec::new())
    }

    pub fn ids(&self) -> &[u32] {
        &self.0
    }

    pub fn into_ids(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, secret: u32) -> bool {
        self.0.binary_search(&secret).is_ok()
    }

    pub fn is_subset_of(&self, other: &CandidateSet) -> bool {
        self.0.iter().all(|&s| other.contains(s))
    }
}

/// The non-empty splits of one candidate set by one guess.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMap {
    entries: BTreeMap<Response, CandidateSet>,
}

impl SplitMap {
    pub fn entries(&self) -> &BTreeMap<Response, CandidateSet> {
        &self.entries
    }

    pub fn get(&self, response: Response) -> Option<&CandidateSet> {
        self.entries.get(&response)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Response, &CandidateSet)> {
        self.entries.iter()
    }
}

/// Reusable scratch space for counting split sizes without allocating.
#[derive(Debug, Clone)]
pub struct SplitTally {
    counts: Vec<u32>,
    touched: Vec<u16>,
    out: Vec<(u16, u32)>,
}

impl SplitTally {
    pub fn new(game: &Game) -> SplitTally {
        SplitTally {
            counts: vec![0; game.num_responses()],
            touched: Vec::new(),
            out: Vec::new(),
        }
    }

    /// `(response code, split size)` for every non-empty split, in order of
    /// first appearance within `candidates`.
    pub fn count(&mut self, game: &Game, guess: usize, candidates: &[u32]) -> &[(u16, u32)] {
        let counts = &mut self.counts;
        let touched = &mut self.touched;
        game.for_each_response(guess, candidates, |_, r| {
            let slot = &mut counts[r as usize];
            if *slot == 0 {
                touched.push(r);
            }
            *slot += 1;
        });
        self.out.clear();
        for &r in self.touched.iter() {
            self.out.push((r, self.counts[r as usize]));
            self.counts[r as usize] = 0;
        }
        self.touched.clear();
        &self.out
    }
}

/// Splits `candidates` by `guess` into `(response, ids)` groups, sorted by
/// response. Each group keeps the ids sorted.
pub fn partition(game: &Game, guess: usize, candidates: &[u32]) -> Vec<(Response, Vec<u32>)> {
    let mut tagged: Vec<(u16, u32)> = Vec::with_capacity(candidates.len());
    game.for_each_response(guess, candidates, |s, r| tagged.push((r, s)));
    // stable, so ids stay sorted within a group
    tagged.sort_by_key(|&(r, _)| r);
    let mut groups: Vec<(Response, Vec<u32>)> = Vec::new();
    for (r, s) in tagged {
        match groups.last_mut() {
            Some((last, ids)) if last.0 == r => ids.push(s),
            _ => groups.push((Response(r), vec![s])),
        }
    }
    groups
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (|G| = {}, |S| = {}, length {})",
            self.name,
            self.guesses.len(),
            self.secrets.len(),
            self.word_len
        )
    }
}
