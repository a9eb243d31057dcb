//! Word lists, rule-defined corpus generators and corpus manifests.
//!
//! A word list on disk is UTF-8 text with one word per line. Loading
//! canonicalises to uppercase, skips blank lines, rejects lines of the wrong
//! length, drops repeats and sorts. Digests are SHA-256 over the canonical
//! list written one word per line with a trailing newline, so a list saved by
//! [`save_word_list`] hashes the same as its file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::game::{canonical_word, Game, GameError};

const WORDLE_GUESSES: &str = include_str!("../data/wordle/original_guesses.txt");
const WORDLE_SECRETS: &str = include_str!("../data/wordle/original_secrets.txt");

pub const WORDLE_GUESSES_DIGEST: &str = "1189f6673121519ae859d9e7009ab710d00584789a1825a8ca76c8691d0f2bac";
pub const WORDLE_SECRETS_DIGEST: &str = "9b31fd85051e0db5765a9bb94a3df0866bccb71f3984d17d646e4bb6d5d39ead";

const LETTERS: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
const DIGITS: &str = "0123456789";
const EQUATION_SYMBOLS: &str = "0123456789+-*/=";

pub const MANIFEST_FORMAT: u64 = 1;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error("no equation generator for length {0} (supported: 6, 8)")]
    UnsupportedLength(usize),
    #[error("unknown game {0:?}")]
    UnknownGame(String),
    #[error("unknown builtin source {0:?}")]
    UnknownSource(String),
    #[error("game {0:?} has no shipped word list; supply one through a corpus manifest")]
    MissingList(String),
    #[error("{game} {list}: expected {expected} words, found {found}")]
    SizeMismatch {
        game: String,
        list: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{game} {list}: digest {found} does not match pinned {expected}")]
    DigestMismatch {
        game: String,
        list: &'static str,
        expected: String,
        found: String,
    },
    #[error("malformed manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Parses word-list text; errors carry 1-based line numbers.
pub fn parse_word_list(text: &str, word_len: usize) -> Result<Vec<String>, CorpusError> {
    let mut words = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.chars().any(char::is_whitespace) {
            return Err(CorpusError::BadLine {
                line: i + 1,
                reason: format!("{line:?} contains whitespace"),
            });
        }
        let n = line.chars().count();
        if n != word_len {
            return Err(CorpusError::BadLine {
                line: i + 1,
                reason: format!("{line:?} has {n} symbols, expected {word_len}"),
            });
        }
        words.push(canonical_word(line));
    }
    words.sort();
    words.dedup();
    Ok(words)
}

pub fn load_word_list(path: &Path, word_len: usize) -> Result<Vec<String>, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_word_list(&text, word_len)
}

pub fn render_word_list(words: &[String]) -> String {
    let mut out = String::with_capacity(words.iter().map(|w| w.len() + 1).sum());
    for w in words {
        out.push_str(w);
        out.push('\n');
    }
    out
}

pub fn save_word_list(path: &Path, words: &[String]) -> Result<(), CorpusError> {
    fs::write(path, render_word_list(words)).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Hex SHA-256 of the canonical rendering of `words`.
pub fn list_digest<S: AsRef<str>>(words: &[S]) -> String {
    let mut h = Sha256::new();
    for w in words {
        h.update(w.as_ref().as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

/// Every five-digit prime, ascending.
pub fn generate_primel() -> Vec<String> {
    const LIMIT: usize = 100_000;
    let mut composite = vec![false; LIMIT];
    let mut p = 2;
    while p * p < LIMIT {
        if !composite[p] {
            for m in (p * p..LIMIT).step_by(p) {
                composite[m] = true;
            }
        }
        p += 1;
    }
    (10_000..LIMIT)
        .filter(|&n| !composite[n])
        .map(|n| n.to_string())
        .collect()
}

/// Every true equation of exactly `length` symbols, sorted.
///
/// The left side alternates positive integers (no leading zeros, no lone
/// zero) with `+ - * /`, evaluated with the usual precedence over the
/// rationals; the right side is the non-negative integer value written out.
/// Division by zero is invalid, but intermediate fractions are fine as long
/// as the final value is a whole number.
pub fn generate_nerdle(length: usize) -> Result<Vec<String>, CorpusError> {
    if length != 6 && length != 8 {
        return Err(CorpusError::UnsupportedLength(length));
    }
    let mut out = Vec::new();
    for lhs_len in 3..length - 1 {
        let rhs_len = length - 1 - lhs_len;
        let mut gen = LhsGen {
            max_number_len: length - 3,
            rhs_len,
            buf: String::new(),
            numbers: Vec::new(),
            ops: Vec::new(),
            out: &mut out,
        };
        gen.expr(lhs_len);
    }
    out.sort();
    Ok(out)
}

struct LhsGen<'a> {
    max_number_len: usize,
    rhs_len: usize,
    buf: String,
    numbers: Vec<i64>,
    ops: Vec<u8>,
    out: &'a mut Vec<String>,
}

impl LhsGen<'_> {
    /// Appends a number of every permitted width, then either stops or
    /// continues with an operator.
    fn expr(&mut self, remaining: usize) {
        for width in 1..=remaining.min(self.max_number_len) {
            let last = width == remaining;
            if !last && remaining - width < 2 {
                continue;
            }
            let lo = if width == 1 { 1 } else { 10i64.pow(width as u32 - 1) };
            let hi = 10i64.pow(width as u32);
            for n in lo..hi {
                let mark = self.buf.len();
                self.buf.push_str(&n.to_string());
                self.numbers.push(n);
                if last {
                    self.finish();
                } else {
                    for op in *b"+-*/" {
                        self.buf.push(op as char);
                        self.ops.push(op);
                        self.expr(remaining - width - 1);
                        self.ops.pop();
                        self.buf.pop();
                    }
                }
                self.numbers.pop();
                self.buf.truncate(mark);
            }
        }
    }

    fn finish(&mut self) {
        if self.ops.is_empty() {
            return;
        }
        let Some(v) = evaluate(&self.numbers, &self.ops) else {
            return;
        };
        if v.den != 1 || v.num < 0 {
            return;
        }
        let rhs = v.num.to_string();
        if rhs.len() == self.rhs_len {
            self.out.push(format!("{}={}", self.buf, rhs));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Ratio {
    num: i128,
    den: i128,
}

impl Ratio {
    fn int(n: i64) -> Ratio {
        Ratio { num: n as i128, den: 1 }
    }

    fn reduced(num: i128, den: i128) -> Ratio {
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i128;
        let s = if den < 0 { -1 } else { 1 };
        Ratio {
            num: s * num / g,
            den: s * den / g,
        }
    }

    fn add(self, o: Ratio, sign: i128) -> Ratio {
        Ratio::reduced(self.num * o.den + sign * o.num * self.den, self.den * o.den)
    }

    fn mul(self, o: Ratio) -> Ratio {
        Ratio::reduced(self.num * o.num, self.den * o.den)
    }

    fn div(self, o: Ratio) -> Option<Ratio> {
        (o.num != 0).then(|| Ratio::reduced(self.num * o.den, self.den * o.num))
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn evaluate(numbers: &[i64], ops: &[u8]) -> Option<Ratio> {
    let mut total = Ratio::int(0);
    let mut sign = 1;
    let mut term = Ratio::int(numbers[0]);
    for (&op, &n) in ops.iter().zip(&numbers[1..]) {
        let n = Ratio::int(n);
        match op {
            b'*' => term = term.mul(n),
            b'/' => term = term.div(n)?,
            _ => {
                total = total.add(term, sign);
                sign = if op == b'+' { 1 } else { -1 };
                term = n;
            }
        }
    }
    Some(total.add(term, sign))
}

/// Where a list comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusSource {
    /// A list shipped inside the crate, e.g. `wordle-original/guesses`.
    Builtin(String),
    /// A rule-defined generator: `primel`, `nerdle-6` or `nerdle-8`.
    Generator(String),
    /// A word-list file; relative paths resolve against the manifest.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ListDescriptor {
    pub source: CorpusSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digest: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusDescriptor {
    pub game: String,
    pub word_length: usize,
    pub alphabet: String,
    pub guesses: ListDescriptor,
    /// Absent when every guess is also a secret.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secrets: Option<ListDescriptor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u64,
    pub corpora: Vec<CorpusDescriptor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ListCheck {
    pub size: usize,
    pub digest: String,
    pub size_ok: Option<bool>,
    pub digest_ok: Option<bool>,
}

impl ListCheck {
    pub fn passed(&self) -> bool {
        self.size_ok != Some(false) && self.digest_ok != Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusReport {
    pub game: String,
    pub guesses: ListCheck,
    pub secrets: ListCheck,
    pub warnings: Vec<String>,
}

impl CorpusReport {
    pub fn passed(&self) -> bool {
        self.guesses.passed() && self.secrets.passed()
    }
}

/// A loaded corpus: the lists, the game built from them and the check report.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub descriptor: CorpusDescriptor,
    pub guesses: Vec<String>,
    pub secrets: Vec<String>,
    pub report: CorpusReport,
}

impl Corpus {
    pub fn game(&self) -> Result<Game, CorpusError> {
        Ok(Game::new(
            &self.descriptor.game,
            self.descriptor.word_length,
            &self.descriptor.alphabet,
            &self.guesses,
            &self.secrets,
        )?)
    }
}

fn pinned(source: CorpusSource, size: usize, digest: Option<&str>) -> ListDescriptor {
    ListDescriptor {
        source,
        expected_size: Some(size),
        digest: digest.map(str::to_string),
    }
}

/// Descriptors for the games known without a manifest.
///
/// `ffxivrdle` carries only its expected sizes: its lists are curated and
/// must be supplied as files.
pub fn builtin_descriptors() -> Vec<CorpusDescriptor> {
    let generated = |game: &str, len: usize, alphabet: &str, id: &str, size: usize| CorpusDescriptor {
        game: game.to_string(),
        word_length: len,
        alphabet: alphabet.to_string(),
        guesses: pinned(CorpusSource::Generator(id.to_string()), size, None),
        secrets: None,
    };
    vec![
        CorpusDescriptor {
            game: "wordle-original".to_string(),
            word_length: 5,
            alphabet: LETTERS.to_string(),
            guesses: pinned(
                CorpusSource::Builtin("wordle-original/guesses".into()),
                12972,
                Some(WORDLE_GUESSES_DIGEST),
            ),
            secrets: Some(pinned(
                CorpusSource::Builtin("wordle-original/secrets".into()),
                2315,
                Some(WORDLE_SECRETS_DIGEST),
            )),
        },
        generated("primel", 5, DIGITS, "primel", 8363),
        generated("mininerdle", 6, EQUATION_SYMBOLS, "nerdle-6", 206),
        generated("nerdle", 8, EQUATION_SYMBOLS, "nerdle-8", 17723),
        CorpusDescriptor {
            game: "ffxivrdle".to_string(),
            word_length: 5,
            alphabet: LETTERS.to_string(),
            guesses: pinned(CorpusSource::File("ffxivrdle/guesses.txt".into()), 849, None),
            secrets: Some(pinned(CorpusSource::File("ffxivrdle/secrets.txt".into()), 168, None)),
        },
    ]
}

pub fn builtin_descriptor(game: &str) -> Result<CorpusDescriptor, CorpusError> {
    builtin_descriptors()
        .into_iter()
        .find(|d| d.game == game)
        .ok_or_else(|| CorpusError::UnknownGame(game.to_string()))
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Manifest, CorpusError> {
        let m: Manifest = serde_json::from_str(text).map_err(|e| CorpusError::Manifest(e.to_string()))?;
        if m.format != MANIFEST_FORMAT {
            return Err(CorpusError::Manifest(format!("unsupported format {}", m.format)));
        }
        Ok(m)
    }

    /// Reads a manifest, resolving relative file sources against its directory.
    pub fn load(path: &Path) -> Result<Manifest, CorpusError> {
        let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut m = Manifest::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for d in &mut m.corpora {
            for list in std::iter::once(&mut d.guesses).chain(d.secrets.as_mut()) {
                if let CorpusSource::File(p) = &mut list.source {
                    if p.is_relative() {
                        *p = base.join(&*p);
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn find(&self, game: &str) -> Option<&CorpusDescriptor> {
        self.corpora.iter().find(|d| d.game == game)
    }
}

fn load_source(source: &CorpusSource, word_len: usize, game: &str) -> Result<Vec<String>, CorpusError> {
    match source {
        CorpusSource::Builtin(id) => match id.as_str() {
            "wordle-original/guesses" => parse_word_list(WORDLE_GUESSES, word_len),
            "wordle-original/secrets" => parse_word_list(WORDLE_SECRETS, word_len),
            _ => Err(CorpusError::UnknownSource(id.clone())),
        },
        CorpusSource::Generator(id) => match id.as_str() {
            "primel" => Ok(generate_primel()),
            "nerdle-6" => generate_nerdle(6),
            "nerdle-8" => generate_nerdle(8),
            _ => Err(CorpusError::UnknownSource(id.clone())),
        },
        CorpusSource::File(path) => {
            if !path.exists() && path.is_relative() {
                return Err(CorpusError::MissingList(game.to_string()));
            }
            load_word_list(path, word_len)
        }
    }
}

fn check_list(
    game: &str,
    list: &'static str,
    words: &[String],
    desc: &ListDescriptor,
    strict: bool,
    warnings: &mut Vec<String>,
) -> Result<ListCheck, CorpusError> {
    let digest = list_digest(words);
    let size_ok = desc.expected_size.map(|n| n == words.len());
    let digest_ok = desc.digest.as_ref().map(|d| d.eq_ignore_ascii_case(&digest));
    if size_ok == Some(false) {
        let err = CorpusError::SizeMismatch {
            game: game.to_string(),
            list,
            expected: desc.expected_size.unwrap_or_default(),
            found: words.len(),
        };
        if strict {
            return Err(err);
        }
        warnings.push(err.to_string());
    }
    if digest_ok == Some(false) {
        let err = CorpusError::DigestMismatch {
            game: game.to_string(),
            list,
            expected: desc.digest.clone().unwrap_or_default(),
            found: digest.clone(),
        };
        if strict {
            return Err(err);
        }
        warnings.push(err.to_string());
    }
    Ok(ListCheck {
        size: words.len(),
        digest,
        size_ok,
        digest_ok,
    })
}

/// Loads a corpus and checks it against its descriptor. Mismatches are
/// warnings in the report unless `strict`, where they are errors.
pub fn load_corpus(desc: &CorpusDescriptor, strict: bool) -> Result<Corpus, CorpusError> {
    let guesses = load_source(&desc.guesses.source, desc.word_length, &desc.game)?;
    let secrets = match &desc.secrets {
        Some(s) => load_source(&s.source, desc.word_length, &desc.game)?,
        None => guesses.clone(),
    };
    let mut warnings = Vec::new();
    let g = check_list(&desc.game, "guesses", &guesses, &desc.guesses, strict, &mut warnings)?;
    let s = match &desc.secrets {
        Some(sd) => check_list(&desc.game, "secrets", &secrets, sd, strict, &mut warnings)?,
        None => g.clone(),
    };
    Ok(Corpus {
        descriptor: desc.clone(),
        report: CorpusReport {
            game: desc.game.clone(),
            guesses: g,
            secrets: s,
            warnings,
        },
        guesses,
        secrets,
    })
}

/// Size and digest checks for a descriptor, without building the game.
pub fn verify_corpus(desc: &CorpusDescriptor, strict: bool) -> Result<CorpusReport, CorpusError> {
    load_corpus(desc, strict).map(|c| c.report)
}

/// Loads a game by name from `manifest` if given, else from the builtins.
pub fn load_game(name: &str, manifest: Option<&Manifest>, strict: bool) -> Result<(Game, CorpusReport), CorpusError> {
    let desc = match manifest.and_then(|m| m.find(name)) {
        Some(d) => d.clone(),
        None => builtin_descriptor(name)?,
    };
    let corpus = load_corpus(&desc, strict)?;
    Ok((corpus.game()?, corpus.report))
}

/// The reference Wordle game with its original lists.
pub fn wordle_original() -> Game {
    load_game("wordle-original", None, true)
        .expect("shipped Wordle lists are valid")
        .0
}

/// `{"guesses": digest, "secrets": digest}` for an already-built game.
pub fn game_checksums(game: &Game) -> serde_json::Value {
    let secrets: Vec<&str> = (0..game.num_secrets() as u32).map(|s| game.secret_word(s)).collect();
    serde_json::json!({
        "guesses": list_digest(game.guesses()),
        "secrets": list_digest(&secrets),
    })
}
