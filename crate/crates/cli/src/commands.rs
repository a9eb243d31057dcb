use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use guesscert::corpus::{builtin_descriptor, load_corpus, CorpusDescriptor, Manifest};
use guesscert::prover::{prove_optimal, EliminationConfig, LowerBounds, Progress};
use guesscert::search::ApproxSolver;
use guesscert::{CombinedValuation, Game, SearchConfig, StrategyTree};
use serde_json::json;

use crate::api::{router, AppState, LoadedGame};
use crate::session::Session;

/// Exit status for a proof that ran out of levels without a verdict.
pub const EXIT_INCONCLUSIVE: u8 = 3;
/// Exit status for bad input: flags, corpora, trees.
pub const EXIT_INVALID: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "guesscert", version, about = "Build, evaluate and certify strategies for Wordle-style games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for a strategy with the breadth-limited minimum-total search.
    Build(BuildArgs),
    /// Certify that a strategy tree is optimal.
    Prove(ProveArgs),
    /// Score a strategy tree.
    Evaluate(EvaluateArgs),
    /// Play interactively in the terminal.
    Assist(AssistArgs),
    /// Serve the assistant's HTTP API.
    Serve(ServeArgs),
    /// Load a corpus and report its sizes and checksums.
    Corpus(CorpusArgs),
}

#[derive(Debug, Args)]
pub struct CorpusFlags {
    /// Corpus name, e.g. wordle-original, mininerdle, primel.
    #[arg(long, default_value = "wordle-original")]
    pub game: String,
    /// JSON manifest describing additional or overriding corpora.
    #[arg(long)]
    pub corpus_manifest: Option<PathBuf>,
    /// Fail when a list's size or digest differs from its descriptor.
    #[arg(long)]
    pub strict_corpus: bool,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub corpus: CorpusFlags,
    /// Guesses explored per candidate set.
    #[arg(long, default_value_t = 10)]
    pub breadth: usize,
    /// Comma-separated valuation ordering.
    #[arg(long, default_value_t = CombinedValuation::default_ordering())]
    pub valuation: CombinedValuation,
    /// Where to write the tree document.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProveArgs {
    #[command(flatten)]
    pub corpus: CorpusFlags,
    /// Strategy tree whose total is the upper bound.
    #[arg(long)]
    pub tree: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub max_level: usize,
    /// Checkpoint file; an existing one is resumed.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Seconds between checkpoint writes.
    #[arg(long, default_value_t = 60)]
    pub checkpoint_interval: u64,
    /// Cap on cached lower bounds.
    #[arg(long)]
    pub cache_cap: Option<usize>,
    /// Where to write the certificate; standard output otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub corpus: CorpusFlags,
    #[arg(long)]
    pub tree: PathBuf,
}

#[derive(Debug, Args)]
pub struct AssistArgs {
    #[command(flatten)]
    pub corpus: CorpusFlags,
    /// Follow this tree while play stays on it.
    #[arg(long)]
    pub tree: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: String,
    /// Games to serve; may be repeated.
    #[arg(long = "game", default_value = "wordle-original")]
    pub games: Vec<String>,
    /// Strategy trees, matched to games by their "game" field; may be repeated.
    #[arg(long = "tree")]
    pub trees: Vec<PathBuf>,
    #[arg(long)]
    pub corpus_manifest: Option<PathBuf>,
    #[arg(long)]
    pub strict_corpus: bool,
    /// Idle sessions are dropped after this many hours.
    #[arg(long, default_value_t = 24.0)]
    pub ttl_hours: f64,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[command(flatten)]
    pub corpus: CorpusFlags,
}

/// Runs a command, printing errors to standard error.
pub fn run(cli: Cli) -> ExitCode {
    let outcome = match cli.command {
        Command::Build(a) => build(a),
        Command::Prove(a) => prove(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Assist(a) => assist(a),
        Command::Serve(a) => serve(a),
        Command::Corpus(a) => corpus(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

fn descriptor(name: &str, manifest: Option<&Path>) -> Result<CorpusDescriptor> {
    let manifest = manifest.map(Manifest::load).transpose()?;
    match manifest.as_ref().and_then(|m| m.find(name)) {
        Some(d) => Ok(d.clone()),
        None => Ok(builtin_descriptor(name)?),
    }
}

fn load(flags: &CorpusFlags) -> Result<(CorpusDescriptor, Game)> {
    let desc = descriptor(&flags.game, flags.corpus_manifest.as_deref())?;
    let corpus = load_corpus(&desc, flags.strict_corpus)?;
    for w in &corpus.report.warnings {
        eprintln!("warning: {w}");
    }
    let game = corpus.game()?;
    Ok((desc, game))
}

fn read_tree(path: &Path, game: &Game) -> Result<StrategyTree> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    StrategyTree::parse(&text, game).with_context(|| format!("parsing {}", path.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn build(a: BuildArgs) -> Result<ExitCode> {
    let (_, game) = load(&a.corpus)?;
    let config = SearchConfig::new(a.breadth)?.with_ordering(a.valuation.clone());
    let started = Instant::now();
    eprintln!("building {} with breadth {} and {}", game.name(), a.breadth, a.valuation);
    let (total, tree) = ApproxSolver::new(&game, config).solve(&game.all_secrets())?;
    let score = tree.score(&game, &game.all_secrets())?;
    debug_assert_eq!(score.total, total);
    eprintln!("done in {:.1}s", started.elapsed().as_secs_f64());
    if let Some(out) = &a.out {
        std::fs::write(out, tree.serialize_pretty(&game) + "\n").with_context(|| format!("writing {}", out.display()))?;
    }
    let summary = json!({
        "game": game.name(),
        "breadth": a.breadth,
        "valuation": a.valuation.to_string(),
        "total": total,
        "expected": total as f64 / game.num_secrets() as f64,
        "starter": game.word(tree.guess),
        "maxDepth": score.max_depth(),
        "histogram": score.histogram,
        "treeDigest": tree.digest(&game),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(ExitCode::SUCCESS)
}

/// Prints a progress line at most every `every`, plus the last of each level.
fn progress_printer(every: Duration) -> impl FnMut(&Progress<'_>) {
    let mut last = Instant::now();
    move |p: &Progress<'_>| {
        if p.evaluated == p.total || last.elapsed() >= every {
            last = Instant::now();
            eprintln!(
                "level {} {}/{} survivors {} elapsed {}s",
                p.level,
                p.evaluated,
                p.total,
                p.survivors,
                p.elapsed.as_secs()
            );
        }
    }
}

fn prove(a: ProveArgs) -> Result<ExitCode> {
    let (_, game) = load(&a.corpus)?;
    let tree = read_tree(&a.tree, &game)?;
    let config = EliminationConfig {
        max_level: a.max_level,
        checkpoint: a.checkpoint.clone(),
        checkpoint_interval: Duration::from_secs(a.checkpoint_interval),
        ..EliminationConfig::default()
    };
    let mut bounds = LowerBounds::new(&game).with_cache_cap(a.cache_cap);
    let cert = prove_optimal(&mut bounds, &tree, &config, &mut progress_printer(Duration::from_secs(10)))?;
    write_or_print(a.out.as_deref(), &cert.to_json_pretty())?;
    if cert.verdict.is_optimal() {
        eprintln!("certified: total {} is optimal", cert.ub);
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("inconclusive after level {}", a.max_level);
        Ok(ExitCode::from(EXIT_INCONCLUSIVE))
    }
}

fn evaluate(a: EvaluateArgs) -> Result<ExitCode> {
    let (_, game) = load(&a.corpus)?;
    let tree = read_tree(&a.tree, &game)?;
    let score = tree.score(&game, &game.all_secrets())?;
    let summary = json!({
        "game": game.name(),
        "starter": game.word(tree.guess),
        "total": score.total,
        "expected": score.total as f64 / game.num_secrets() as f64,
        "maxDepth": score.max_depth(),
        "histogram": score.histogram,
        "treeDigest": tree.digest(&game),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(ExitCode::SUCCESS)
}

const ASSIST_HELP: &str = "Enter the colouring of the suggested guess (digits 0/1/2 or letters B/Y/G), \
or `WORD COLOURING` if you played something else. `quit` ends the session.";

fn assist(a: AssistArgs) -> Result<ExitCode> {
    let (_, game) = load(&a.corpus)?;
    let tree = a.tree.as_deref().map(|p| read_tree(p, &game)).transpose()?;
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    assist_loop(Session::new(Arc::new(game), tree.map(Arc::new)), stdin.lock(), stdout.lock())?;
    Ok(ExitCode::SUCCESS)
}

/// The terminal loop behind `assist`, over arbitrary input and output.
pub fn assist_loop(mut session: Session, input: impl BufRead, mut out: impl std::io::Write) -> Result<()> {
    writeln!(out, "{ASSIST_HELP}")?;
    let report = |out: &mut dyn std::io::Write, s: &Session| -> Result<()> {
        let snap = s.snapshot();
        if snap.solved {
            writeln!(out, "solved in {} guesses", s.transcript().len())?;
        } else {
            writeln!(out, "{} candidates; suggestion: {}", snap.candidate_count, snap.suggestion.as_deref().unwrap_or("-"))?;
        }
        Ok(())
    };
    report(&mut out, &session)?;
    for line in input.lines() {
        let line = line?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        let (guess, response) = match parts.as_slice() {
            [] => continue,
            ["quit"] | ["exit"] => break,
            [response] => match session.suggestion() {
                Some((g, _)) => (session.game().word(g).to_string(), response.to_string()),
                None => break,
            },
            [guess, response] => (guess.to_string(), response.to_string()),
            _ => {
                writeln!(out, "{ASSIST_HELP}")?;
                continue;
            }
        };
        match session.feedback(&guess, &response) {
            Ok(_) => report(&mut out, &session)?,
            Err(e) => writeln!(out, "rejected: {e}")?,
        }
        if session.is_solved() {
            break;
        }
    }
    out.flush()?;
    Ok(())
}

fn serve(a: ServeArgs) -> Result<ExitCode> {
    if a.ttl_hours.is_nan() || a.ttl_hours <= 0.0 {
        bail!("--ttl-hours must be positive");
    }
    let mut games = Vec::new();
    for name in &a.games {
        let flags = CorpusFlags {
            game: name.clone(),
            corpus_manifest: a.corpus_manifest.clone(),
            strict_corpus: a.strict_corpus,
        };
        let (descriptor, game) = load(&flags)?;
        eprintln!("loaded {} ({} guesses, {} secrets)", name, game.num_guesses(), game.num_secrets());
        games.push(LoadedGame {
            descriptor,
            game: Arc::new(game),
            tree: None,
        });
    }
    for path in &a.trees {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let doc: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let name = doc.get("game").and_then(|g| g.as_str()).unwrap_or_default();
        let Some(slot) = games.iter_mut().find(|g| g.descriptor.game == name) else {
            bail!("{} is a tree for {name:?}, which is not being served", path.display());
        };
        let tree = StrategyTree::from_json(&doc, &slot.game).with_context(|| format!("parsing {}", path.display()))?;
        slot.tree = Some(Arc::new(tree));
    }
    let state = Arc::new(AppState::new(games, Duration::from_secs_f64(a.ttl_hours * 3600.0)));
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&a.bind)
            .await
            .with_context(|| format!("binding {}", a.bind))?;
        eprintln!("listening on {}", listener.local_addr()?);
        axum::serve(listener, router(state)).await?;
        anyhow::Ok(())
    })?;
    Ok(ExitCode::SUCCESS)
}

fn corpus(a: CorpusArgs) -> Result<ExitCode> {
    let desc = descriptor(&a.corpus.game, a.corpus.corpus_manifest.as_deref())?;
    let corpus = load_corpus(&desc, a.corpus.strict_corpus)?;
    println!("{}", serde_json::to_string_pretty(&corpus.report)?);
    Ok(if corpus.report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_INVALID)
    })
}
