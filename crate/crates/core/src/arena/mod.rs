//! Evaluation harness: simulated players, the two elimination baselines,
//! warmup pre-training and paired batch runs.

mod baseline;
mod metrics;
mod sim;

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::Answer;
use crate::engine::{EngineConfig, EngineError, GuessList, Knowledge, Phase, Question, SessionState};
use crate::kgraph::LearnedStats;

pub use baseline::{coverage_within, halving_choice, split_distance, BaselineKind, BaselineSession};
pub use metrics::{Buckets, GameRecord, RunMetrics, RANKS};
pub use sim::{derive_seed, simulate_answer, simulate_entity_answer, SimAnswerer, SimAnswererConfig};

#[derive(Debug, Error)]
pub enum ArenaError {
    #[error("unknown target movie {0:?}")]
    UnknownTarget(String),
    #[error("invalid batch: {0}")]
    InvalidBatch(String),
    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),
    #[error("protocol violation: {0}")]
    Protocol(&'static str),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Baseline1,
    Baseline2,
    Kg20q,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Baseline1, Strategy::Baseline2, Strategy::Kg20q];

    pub fn key(self) -> &'static str {
        match self {
            Strategy::Baseline1 => "baseline1",
            Strategy::Baseline2 => "baseline2",
            Strategy::Kg20q => "kg20q",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Strategy {
    type Err = ArenaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "baseline1" | "b1" => Ok(Strategy::Baseline1),
            "baseline2" | "b2" => Ok(Strategy::Baseline2),
            "kg20q" => Ok(Strategy::Kg20q),
            other => Err(ArenaError::UnknownStrategy(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameStatus {
    Playing,
    Solved,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Move {
    Ask(Question),
    Guess(GuessList),
}

/// The session interface shared by every strategy.
pub trait Questioner {
    /// The next question or guess, or `None` once the game is over.
    fn next_move(&mut self) -> Result<Option<Move>, ArenaError>;
    fn answer(&mut self, question: &Question, answer: Answer) -> Result<(), ArenaError>;
    fn feedback(&mut self, accepted: bool, movie: Option<&str>) -> Result<(), ArenaError>;
    fn status(&self) -> GameStatus;
    fn questions_used(&self) -> u32;
    /// Whether the strategy still considers `movie_id` possible.
    fn still_possible(&self, movie_id: &str) -> bool;
}

/// KG20Q behind the shared interface. Owns its copy of the stats so batch
/// games stay independent.
pub struct Kg20qPlayer<'a> {
    knowledge: &'a Knowledge,
    config: &'a EngineConfig,
    stats: LearnedStats,
    state: SessionState,
}

impl<'a> Kg20qPlayer<'a> {
    pub fn new(
        knowledge: &'a Knowledge,
        config: &'a EngineConfig,
        stats: LearnedStats,
        birth_year: Option<i32>,
        seed: u64,
    ) -> Result<Self, ArenaError> {
        let state = SessionState::start(knowledge, config, birth_year, seed)?;
        Ok(Kg20qPlayer {
            knowledge,
            config,
            stats,
            state,
        })
    }

    pub fn state(&self) -> &SessionState {
        &self.state
    }

    pub fn into_stats(self) -> LearnedStats {
        self.stats
    }
}

impl Questioner for Kg20qPlayer<'_> {
    fn next_move(&mut self) -> Result<Option<Move>, ArenaError> {
        match self.state.phase {
            Phase::Solved | Phase::Exhausted => return Ok(None),
            Phase::AwaitingGuessFeedback => return Err(ArenaError::Protocol("guess feedback pending")),
            Phase::Asking => {}
        }
        if !self.state.should_guess(self.knowledge, &self.stats, self.config) {
            match self.state.next_question(self.knowledge, &self.stats, self.config) {
                Ok(q) => return Ok(Some(Move::Ask(q))),
                Err(EngineError::MustGuess) => {}
                Err(e) => return Err(e.into()),
            }
        }
        match self.state.make_guess(self.knowledge, self.config) {
            Ok(guess) => Ok(Some(Move::Guess(guess))),
            Err(EngineError::NoCandidates | EngineError::BudgetSpent) => {
                self.state.phase = Phase::Exhausted;
                Ok(None)
            }
            Err(e) => Err(e.into()),
        }
    }

    fn answer(&mut self, question: &Question, answer: Answer) -> Result<(), ArenaError> {
        Ok(self
            .state
            .process_answer(question, answer, self.knowledge, self.config)?)
    }

    fn feedback(&mut self, accepted: bool, movie: Option<&str>) -> Result<(), ArenaError> {
        Ok(self
            .state
            .process_guess_feedback(accepted, movie, self.knowledge, &mut self.stats, self.config)?)
    }

    fn status(&self) -> GameStatus {
        match self.state.phase {
            Phase::Solved => GameStatus::Solved,
            Phase::Exhausted => GameStatus::Exhausted,
            Phase::Asking | Phase::AwaitingGuessFeedback => GameStatus::Playing,
        }
    }

    fn questions_used(&self) -> u32 {
        self.state.questions_used
    }

    fn still_possible(&self, movie_id: &str) -> bool {
        self.state.belief.prob(movie_id) > 0.0
    }
}

/// What happened in one game, before it is labelled with strategy and repeat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameOutcome {
    pub solved_at: Option<u32>,
    pub questions_used: u32,
    pub first_guess_rank: Option<usize>,
    /// False once any answer removed the target from consideration.
    pub true_movie_survived: bool,
}

/// Plays one game to completion. A game that makes no progress is cut off
/// after a generous number of moves.
pub fn play_game(
    questioner: &mut dyn Questioner,
    answerer: &mut SimAnswerer,
    knowledge: &Knowledge,
) -> Result<GameOutcome, ArenaError> {
    let target = answerer.config.target_movie.clone();
    if !knowledge.indices.contains_movie(&target) {
        return Err(ArenaError::UnknownTarget(target));
    }
    let mut first_guess_rank = None;
    let mut guessed = false;
    let mut survived = true;
    for _ in 0..1000 {
        let Some(mv) = questioner.next_move()? else { break };
        match mv {
            Move::Ask(question) => {
                let answer = answerer.answer(&question, knowledge)?;
                questioner.answer(&question, answer)?;
            }
            Move::Guess(guess) => {
                if !guessed {
                    guessed = true;
                    first_guess_rank = guess.rank_of(&target);
                }
                let accepted = answerer.accepts(guess.entries.iter().map(|e| e.movie_id.as_str()));
                questioner.feedback(accepted, accepted.then_some(target.as_str()))?;
            }
        }
        survived &= questioner.still_possible(&target) || questioner.status() == GameStatus::Solved;
    }
    let questions_used = questioner.questions_used();
    Ok(GameOutcome {
        solved_at: (questioner.status() == GameStatus::Solved).then_some(questions_used),
        questions_used,
        first_guess_rank,
        true_movie_survived: survived,
    })
}

/// Builds a fresh session for `strategy`.
pub fn new_session<'a>(
    strategy: Strategy,
    knowledge: &'a Knowledge,
    stats: &'a LearnedStats,
    config: &'a EngineConfig,
    birth_year: Option<i32>,
    seed: u64,
) -> Result<Box<dyn Questioner + 'a>, ArenaError> {
    Ok(match strategy {
        Strategy::Baseline1 => Box::new(BaselineSession::new(
            BaselineKind::Halving,
            knowledge,
            stats,
            config,
            birth_year,
        )),
        Strategy::Baseline2 => Box::new(BaselineSession::new(
            BaselineKind::Hierarchical,
            knowledge,
            stats,
            config,
            birth_year,
        )),
        Strategy::Kg20q => Box::new(Kg20qPlayer::new(knowledge, config, stats.clone(), birth_year, seed)?),
    })
}

/// Pre-trains election counts with zero-error games on uniformly drawn
/// targets. Only solved games are recorded.
pub fn warmup(
    stats: &LearnedStats,
    knowledge: &Knowledge,
    config: &EngineConfig,
    n_games: usize,
    seed: u64,
) -> Result<LearnedStats, ArenaError> {
    let ids: Vec<&str> = knowledge.catalog.ids().collect();
    let mut stats = stats.clone();
    if ids.is_empty() {
        return Ok(stats);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[b"warmup", &seed.to_le_bytes()]));
    for game in 0..n_games {
        let target = ids[rng.random_range(0..ids.len())];
        let game_seed = derive_seed(&[b"warmup-game", &seed.to_le_bytes(), &(game as u64).to_le_bytes()]);
        let mut player = Kg20qPlayer::new(knowledge, config, stats, None, game_seed)?;
        let mut answerer = SimAnswerer::new(SimAnswererConfig::truthful(target, game_seed));
        play_game(&mut player, &mut answerer, knowledge)?;
        stats = player.into_stats();
    }
    tracing::debug!(n_games, recorded = stats.games_recorded(), "warmup finished");
    Ok(stats)
}

/// How simulated players report their birth year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BirthYearModel {
    /// No birth year is given.
    Unknown,
    /// Release year minus `offset`, plus a uniform jitter in `[-jitter, jitter]`.
    AroundRelease { offset: i32, jitter: i32 },
}

impl Default for BirthYearModel {
    fn default() -> Self {
        BirthYearModel::AroundRelease { offset: 20, jitter: 5 }
    }
}

impl BirthYearModel {
    pub fn sample(&self, release_year: Option<i32>, seed: u64) -> Option<i32> {
        match *self {
            BirthYearModel::Unknown => None,
            BirthYearModel::AroundRelease { offset, jitter } => {
                let year = release_year?;
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[b"birth-year", &seed.to_le_bytes()]));
                Some(year - offset + rng.random_range(-jitter..=jitter))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub strategies: Vec<Strategy>,
    pub n_movies: usize,
    pub repeats: usize,
    pub error_rate: f64,
    pub maybe_rate: f64,
    pub seed: u64,
    #[serde(default)]
    pub birth_years: BirthYearModel,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            strategies: Strategy::ALL.to_vec(),
            n_movies: 50,
            repeats: 5,
            error_rate: 0.1,
            maybe_rate: 0.05,
            seed: 7,
            birth_years: BirthYearModel::default(),
        }
    }
}

impl BatchConfig {
    pub fn validate(&self, knowledge: &Knowledge) -> Result<(), ArenaError> {
        let bad = |m: String| Err(ArenaError::InvalidBatch(m));
        if self.n_movies > knowledge.catalog.len() {
            return bad(format!(
                "{} movies requested, catalog has {}",
                self.n_movies,
                knowledge.catalog.len()
            ));
        }
        for (name, p) in [("error_rate", self.error_rate), ("maybe_rate", self.maybe_rate)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must be in [0, 1], got {p}"));
            }
        }
        if self.strategies.is_empty() {
            return bad("no strategies".into());
        }
        Ok(())
    }
}

/// One scheduled game: the noise seed and birth year are shared by every
/// strategy that plays it.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub index: usize,
    pub target: String,
    pub repeat: usize,
    pub seed: u64,
    pub birth_year: Option<i32>,
}

/// The games a batch will play, in order.
pub fn schedule(knowledge: &Knowledge, batch: &BatchConfig) -> Result<Vec<Fixture>, ArenaError> {
    batch.validate(knowledge)?;
    let ids: Vec<&str> = knowledge.catalog.ids().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[b"targets", &batch.seed.to_le_bytes()]));
    let targets: Vec<&str> = ids.choose_multiple(&mut rng, batch.n_movies).copied().collect();
    let mut fixtures = Vec::with_capacity(targets.len() * batch.repeats);
    for target in targets {
        for repeat in 0..batch.repeats {
            let seed = derive_seed(&[
                b"game",
                &batch.seed.to_le_bytes(),
                target.as_bytes(),
                &(repeat as u64).to_le_bytes(),
            ]);
            let release = knowledge.catalog.get(target).and_then(|m| m.release_year);
            fixtures.push(Fixture {
                index: fixtures.len(),
                target: target.to_string(),
                repeat,
                seed,
                birth_year: batch.birth_years.sample(release, seed),
            });
        }
    }
    Ok(fixtures)
}

/// Plays every scheduled game with every strategy against the same noisy
/// answerer realization.
pub fn run_batch(
    knowledge: &Knowledge,
    stats: &LearnedStats,
    config: &EngineConfig,
    batch: &BatchConfig,
) -> Result<RunMetrics, ArenaError> {
    config.validate()?;
    let fixtures = schedule(knowledge, batch)?;
    let play = |fixture: &Fixture, strategy: Strategy| -> Result<GameRecord, ArenaError> {
        let mut session = new_session(strategy, knowledge, stats, config, fixture.birth_year, fixture.seed)?;
        let mut answerer = SimAnswerer::new(SimAnswererConfig {
            target_movie: fixture.target.clone(),
            error_rate: batch.error_rate,
            maybe_rate: batch.maybe_rate,
            seed: fixture.seed,
            birth_year: fixture.birth_year,
        });
        let outcome = play_game(session.as_mut(), &mut answerer, knowledge)?;
        Ok(GameRecord::new(strategy, fixture, outcome))
    };

    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    let chunk = fixtures.len().div_ceil(workers).max(1);
    let strategies = &batch.strategies;
    let chunks: Vec<Result<Vec<GameRecord>, ArenaError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = fixtures
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    let mut out = Vec::with_capacity(part.len() * strategies.len());
                    for fixture in part {
                        for &strategy in strategies {
                            out.push(play(fixture, strategy)?);
                        }
                    }
                    Ok(out)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("batch worker panicked"))
            .collect()
    });
    let mut games = Vec::with_capacity(fixtures.len() * strategies.len());
    for part in chunks {
        games.extend(part?);
    }
    Ok(RunMetrics::new(batch.clone(), games))
}

/// One game against an answerer that lies exactly once about an entity the
/// target has, otherwise truthful.
pub fn forced_flip_game(
    strategy: Strategy,
    knowledge: &Knowledge,
    stats: &LearnedStats,
    config: &EngineConfig,
    target: &str,
    birth_year: Option<i32>,
    seed: u64,
) -> Result<(GameOutcome, bool), ArenaError> {
    let mut session = new_session(strategy, knowledge, stats, config, birth_year, seed)?;
    let mut answerer = SimAnswerer::with_forced_flip(SimAnswererConfig::truthful(target, seed));
    let outcome = play_game(session.as_mut(), &mut answerer, knowledge)?;
    Ok((outcome, answerer.flipped_entity().is_some()))
}
