//! Game session state machine.
//!
//! ```text
//! Asking --should_guess--> AwaitingGuessFeedback --accepted--> Solved
//!   ^                               |
//!   +-----------rejected------------+--rejected, budget spent--> Exhausted
//! ```
//!
//! Questions start in the primary layer, visiting Era, Genre and Subject once
//! each in that order. The session then moves to the secondary layer for good,
//! or earlier once few movies still carry meaningful probability. A guess
//! spends one unit of the question budget, as does a maybe answer.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::belief::{Answer, AnswerSignal, Belief, BeliefError};
use crate::catalog::Catalog;
use crate::kgraph::{Entity, GraphError, IndexPair, LearnedStats};
use crate::level::{Layer, Level};
use crate::scoring::{primary_score, secondary_score, EstimatorConfig, ScoringError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub estimator: EstimatorConfig,
    pub max_questions: u32,
    pub guess_size: usize,
    pub guess_threshold: f64,
    pub update_alpha: f64,
    /// Switch to the secondary layer once at most this many movies hold
    /// more than a tenth of the uniform share.
    pub layer_switch_candidates: usize,
    /// Secondary entities covering less belief mass than this are skipped.
    pub min_secondary_mass: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            estimator: EstimatorConfig::default(),
            max_questions: 20,
            guess_size: 5,
            guess_threshold: 0.5,
            update_alpha: 1.0,
            layer_switch_candidates: 30,
            min_secondary_mass: 0.01,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        self.estimator.validate()?;
        let bad = |msg: String| Err(EngineError::InvalidConfig(msg));
        if self.max_questions == 0 {
            return bad("max_questions must be at least 1".into());
        }
        if self.guess_size == 0 {
            return bad("guess_size must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.guess_threshold) {
            return bad(format!("guess_threshold {} outside [0, 1]", self.guess_threshold));
        }
        if !(self.update_alpha > 0.0 && self.update_alpha.is_finite()) {
            return bad(format!("update_alpha {} must be positive", self.update_alpha));
        }
        if !(0.0..=1.0).contains(&self.min_secondary_mass) {
            return bad(format!("min_secondary_mass {} outside [0, 1]", self.min_secondary_mass));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("operation needs phase {expected:?}, session is {actual:?}")]
    WrongPhase { expected: Phase, actual: Phase },
    #[error("no askable entity remains; a guess is due")]
    MustGuess,
    #[error("question {0} is not the pending question")]
    StaleQuestion(u32),
    #[error("question budget is spent")]
    BudgetSpent,
    #[error("accepted guess needs the confirmed movie")]
    MissingConfirmation,
    #[error("movie `{0}` was not part of the guess")]
    NotInGuess(String),
    #[error("no movie has positive probability")]
    NoCandidates,
    #[error("invalid engine config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Catalog plus its inverted indices; immutable and shareable.
#[derive(Debug, Clone)]
pub struct Knowledge {
    pub catalog: Catalog,
    pub indices: IndexPair,
}

impl Knowledge {
    pub fn new(catalog: Catalog) -> Self {
        let indices = IndexPair::build(&catalog);
        Knowledge { catalog, indices }
    }

    pub fn title<'a>(&'a self, movie_id: &'a str) -> &'a str {
        self.catalog.get(movie_id).map(|m| m.title.as_str()).unwrap_or(movie_id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Asking,
    AwaitingGuessFeedback,
    Solved,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub entity: Entity,
    pub layer: Layer,
    pub text: String,
    pub ordinal: u32,
}

impl Question {
    pub fn new(entity: Entity, ordinal: u32) -> Self {
        Question {
            layer: entity.level.layer(),
            text: entity.question_text(),
            entity,
            ordinal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuessEntry {
    pub movie_id: String,
    pub title: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuessList {
    pub ordinal: u32,
    pub entries: Vec<GuessEntry>,
}

impl GuessList {
    pub fn contains(&self, movie_id: &str) -> bool {
        self.entries.iter().any(|e| e.movie_id == movie_id)
    }

    /// 1-based position of a movie in the list.
    pub fn rank_of(&self, movie_id: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.movie_id == movie_id).map(|i| i + 1)
    }

    pub fn ids(&self) -> BTreeSet<String> {
        self.entries.iter().map(|e| e.movie_id.clone()).collect()
    }

    pub fn cumulative(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }

    pub fn prompt(&self) -> String {
        let titles: Vec<&str> = self.entries.iter().map(|e| e.title.as_str()).collect();
        format!("Is your movie one of: {}?", titles.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum GuessOutcome {
    Pending,
    Rejected,
    Confirmed { movie_id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TranscriptEntry {
    Asked { question: Question, answer: Answer },
    Guessed { guess: GuessList, outcome: GuessOutcome },
}

impl TranscriptEntry {
    pub fn ordinal(&self) -> u32 {
        match self {
            TranscriptEntry::Asked { question, .. } => question.ordinal,
            TranscriptEntry::Guessed { guess, .. } => guess.ordinal,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn questions(&self) -> impl Iterator<Item = (&Question, Answer)> {
        self.entries.iter().filter_map(|e| match e {
            TranscriptEntry::Asked { question, answer } => Some((question, *answer)),
            TranscriptEntry::Guessed { .. } => None,
        })
    }

    pub fn guesses(&self) -> impl Iterator<Item = (&GuessList, &GuessOutcome)> {
        self.entries.iter().filter_map(|e| match e {
            TranscriptEntry::Guessed { guess, outcome } => Some((guess, outcome)),
            TranscriptEntry::Asked { .. } => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Plan {
    Primary(usize),
    Secondary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionState {
    pub phase: Phase,
    pub belief: Belief,
    pub transcript: Transcript,
    pub asked: BTreeSet<Entity>,
    pub questions_used: u32,
    pub birth_year: Option<i32>,
    pub seed: u64,
    primary_visits: usize,
    secondary_locked: bool,
    pending_guess: Option<GuessList>,
}

/// True when the answer to a question about `entity` can move the belief:
/// the entity must cover some, but not all, of the positive-mass movies.
fn splits_mass(belief: &Belief, carriers: &BTreeSet<String>) -> bool {
    let covered = belief.mass(carriers);
    let positive_carriers = carriers.iter().filter(|m| belief.prob(m) > 0.0).count();
    positive_carriers > 0 && positive_carriers < belief.positive_count() && covered > 0.0
}

impl SessionState {
    pub fn start(
        knowledge: &Knowledge,
        config: &EngineConfig,
        birth_year: Option<i32>,
        seed: u64,
    ) -> Result<Self, EngineError> {
        config.validate()?;
        let belief = Belief::uniform(knowledge.catalog.ids())?;
        let mut state = SessionState {
            phase: Phase::Asking,
            belief,
            transcript: Transcript::default(),
            asked: BTreeSet::new(),
            questions_used: 0,
            birth_year,
            seed,
            primary_visits: 0,
            secondary_locked: false,
            pending_guess: None,
        };
        state.refresh_layer(config);
        Ok(state)
    }

    fn expect_phase(&self, expected: Phase) -> Result<(), EngineError> {
        if self.phase != expected {
            return Err(EngineError::WrongPhase {
                expected,
                actual: self.phase,
            });
        }
        Ok(())
    }

    pub fn pending_guess(&self) -> Option<&GuessList> {
        self.pending_guess.as_ref()
    }

    pub fn current_layer(&self, knowledge: &Knowledge) -> Layer {
        match self.plan(knowledge) {
            Plan::Primary(_) => Layer::Primary,
            Plan::Secondary => Layer::Secondary,
        }
    }

    /// Movies holding more than a tenth of the uniform share.
    pub fn effective_candidates(&self) -> usize {
        let n = self.belief.len() as f64;
        self.belief.count_above(1.0 / (10.0 * n))
    }

    fn refresh_layer(&mut self, config: &EngineConfig) {
        if self.primary_visits >= Level::PRIMARY.len() || self.effective_candidates() <= config.layer_switch_candidates
        {
            self.secondary_locked = true;
        }
    }

    fn plan(&self, knowledge: &Knowledge) -> Plan {
        if self.secondary_locked {
            return Plan::Secondary;
        }
        (self.primary_visits..Level::PRIMARY.len())
            .find(|&visit| {
                knowledge
                    .indices
                    .entities_at(Level::PRIMARY[visit])
                    .any(|e| self.is_askable(knowledge, e))
            })
            .map_or(Plan::Secondary, Plan::Primary)
    }

    fn is_askable(&self, knowledge: &Knowledge, entity: &Entity) -> bool {
        !self.asked.contains(entity) && splits_mass(&self.belief, knowledge.indices.backward(entity))
    }

    /// The best question under the layer policy. Does not modify the session.
    pub fn next_question(
        &self,
        knowledge: &Knowledge,
        stats: &LearnedStats,
        config: &EngineConfig,
    ) -> Result<Question, EngineError> {
        self.expect_phase(Phase::Asking)?;
        // The last unit of budget is reserved for a guess.
        if self.questions_used + 1 >= config.max_questions {
            return Err(EngineError::MustGuess);
        }
        let indices = &knowledge.indices;
        let mut best: Option<(f64, &Entity)> = None;
        match self.plan(knowledge) {
            Plan::Primary(visit) => {
                for entity in indices.entities_at(Level::PRIMARY[visit]) {
                    if !self.is_askable(knowledge, entity) {
                        continue;
                    }
                    let score = primary_score(entity, indices, stats, self.birth_year, &config.estimator)?;
                    if best.is_none_or(|(b, _)| score.total > b) {
                        best = Some((score.total, entity));
                    }
                }
            }
            Plan::Secondary => {
                for level in Level::SECONDARY {
                    for entity in indices.entities_at(level) {
                        if !self.is_askable(knowledge, entity) {
                            continue;
                        }
                        if self.belief.mass(indices.backward(entity)) < config.min_secondary_mass {
                            continue;
                        }
                        let score = secondary_score(entity, indices, stats, &self.belief, &config.estimator)?;
                        if best.is_none_or(|(b, _)| score.total > b) {
                            best = Some((score.total, entity));
                        }
                    }
                }
            }
        }
        best.map(|(_, entity)| Question::new(entity.clone(), self.questions_used + 1))
            .ok_or(EngineError::MustGuess)
    }

    pub fn process_answer(
        &mut self,
        question: &Question,
        answer: Answer,
        knowledge: &Knowledge,
        config: &EngineConfig,
    ) -> Result<(), EngineError> {
        self.expect_phase(Phase::Asking)?;
        if question.ordinal != self.questions_used + 1 || self.asked.contains(&question.entity) {
            return Err(EngineError::StaleQuestion(question.ordinal));
        }
        if self.questions_used >= config.max_questions {
            return Err(EngineError::BudgetSpent);
        }
        let signal = AnswerSignal::from_answer(&self.belief, knowledge.indices.backward(&question.entity), answer);
        self.belief = self.belief.apply_answer(&signal, config.update_alpha)?;
        self.asked.insert(question.entity.clone());
        self.questions_used += 1;
        if let Some(pos) = Level::PRIMARY.iter().position(|&l| l == question.entity.level) {
            self.primary_visits = self.primary_visits.max(pos + 1);
        } else {
            self.secondary_locked = true;
        }
        self.transcript.entries.push(TranscriptEntry::Asked {
            question: question.clone(),
            answer,
        });
        self.refresh_layer(config);
        Ok(())
    }

    /// Cumulative probability of the current top guesses.
    pub fn top_mass(&self, config: &EngineConfig) -> f64 {
        self.belief.top_k(config.guess_size).iter().map(|p| p.1).sum()
    }

    pub fn should_guess(&self, knowledge: &Knowledge, stats: &LearnedStats, config: &EngineConfig) -> bool {
        if self.phase != Phase::Asking {
            return false;
        }
        self.questions_used + 1 >= config.max_questions
            || self.top_mass(config) >= config.guess_threshold
            || matches!(
                self.next_question(knowledge, stats, config),
                Err(EngineError::MustGuess)
            )
    }

    pub fn make_guess(&mut self, knowledge: &Knowledge, config: &EngineConfig) -> Result<GuessList, EngineError> {
        self.expect_phase(Phase::Asking)?;
        if self.questions_used >= config.max_questions {
            return Err(EngineError::BudgetSpent);
        }
        let entries: Vec<GuessEntry> = self
            .belief
            .top_k(config.guess_size)
            .into_iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|(movie_id, probability)| GuessEntry {
                title: knowledge.title(&movie_id).to_string(),
                movie_id,
                probability,
            })
            .collect();
        if entries.is_empty() {
            return Err(EngineError::NoCandidates);
        }
        self.questions_used += 1;
        let guess = GuessList {
            ordinal: self.questions_used,
            entries,
        };
        self.transcript.entries.push(TranscriptEntry::Guessed {
            guess: guess.clone(),
            outcome: GuessOutcome::Pending,
        });
        self.pending_guess = Some(guess.clone());
        self.phase = Phase::AwaitingGuessFeedback;
        Ok(guess)
    }

    pub fn process_guess_feedback(
        &mut self,
        accepted: bool,
        confirmed_movie: Option<&str>,
        knowledge: &Knowledge,
        stats: &mut LearnedStats,
        config: &EngineConfig,
    ) -> Result<(), EngineError> {
        self.expect_phase(Phase::AwaitingGuessFeedback)?;
        let guess = self.pending_guess.clone().ok_or(EngineError::NoCandidates)?;
        let outcome = if accepted {
            let movie = confirmed_movie.ok_or(EngineError::MissingConfirmation)?;
            if !guess.contains(movie) {
                return Err(EngineError::NotInGuess(movie.to_string()));
            }
            stats.record_election(&knowledge.indices, movie)?;
            self.phase = Phase::Solved;
            GuessOutcome::Confirmed {
                movie_id: movie.to_string(),
            }
        } else {
            match self.belief.eliminate_and_redistribute(&guess.ids()) {
                Ok(belief) => {
                    self.belief = belief;
                    self.phase = if self.questions_used >= config.max_questions {
                        Phase::Exhausted
                    } else {
                        Phase::Asking
                    };
                }
                // Every remaining candidate was just rejected.
                Err(BeliefError::NoMass) => self.phase = Phase::Exhausted,
                Err(e) => return Err(e.into()),
            }
            self.refresh_layer(config);
            GuessOutcome::Rejected
        };
        if let Some(TranscriptEntry::Guessed { outcome: slot, .. }) = self.transcript.entries.last_mut() {
            *slot = outcome;
        }
        self.pending_guess = None;
        Ok(())
    }

    /// Post-game report of every answer, checked against the revealed movie
    /// (looked up by id, then by title) when it is in the catalog.
    pub fn trace(&self, revealed_movie: Option<&str>, knowledge: &Knowledge) -> Result<TraceReport, EngineError> {
        if !matches!(self.phase, Phase::Exhausted | Phase::Solved) {
            return Err(EngineError::WrongPhase {
                expected: Phase::Exhausted,
                actual: self.phase,
            });
        }
        let movie = revealed_movie.and_then(|key| {
            knowledge
                .catalog
                .get(key)
                .or_else(|| knowledge.catalog.find_by_title(key))
        });
        let note = match (revealed_movie, movie) {
            (Some(key), None) => Some(format!("`{key}` is not in the catalog")),
            _ => None,
        };
        let lines = self
            .transcript
            .entries
            .iter()
            .filter_map(|entry| {
                let (ordinal, question, answer, fact) = match entry {
                    TranscriptEntry::Asked { question, answer } => (
                        question.ordinal,
                        question.text.clone(),
                        *answer,
                        movie.map(|m| Answer::from_truth(m.has(question.entity.level, &question.entity.value))),
                    ),
                    TranscriptEntry::Guessed { guess, outcome } => {
                        let answer = match outcome {
                            GuessOutcome::Pending => return None,
                            GuessOutcome::Rejected => Answer::No,
                            GuessOutcome::Confirmed { .. } => Answer::Yes,
                        };
                        (
                            guess.ordinal,
                            guess.prompt(),
                            answer,
                            movie.map(|m| Answer::from_truth(guess.contains(&m.id))),
                        )
                    }
                };
                let verdict = match fact {
                    Some(fact) if answer.is_definitive() => Some(if fact == answer {
                        Verdict::Match
                    } else {
                        Verdict::Mismatch
                    }),
                    _ => None,
                };
                Some(TraceLine {
                    ordinal,
                    question,
                    answer,
                    fact,
                    verdict,
                })
            })
            .collect();
        Ok(TraceReport {
            movie_id: movie.map(|m| m.id.clone()),
            movie_title: movie.map(|m| m.title.clone()),
            note,
            lines,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Match,
    Mismatch,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Match => "MATCH",
            Verdict::Mismatch => "MISMATCH",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceLine {
    pub ordinal: u32,
    pub question: String,
    pub answer: Answer,
    pub fact: Option<Answer>,
    pub verdict: Option<Verdict>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceReport {
    pub movie_id: Option<String>,
    pub movie_title: Option<String>,
    pub note: Option<String>,
    pub lines: Vec<TraceLine>,
}

impl TraceReport {
    pub fn mismatches(&self) -> usize {
        self.lines
            .iter()
            .filter(|l| l.verdict == Some(Verdict::Mismatch))
            .count()
    }

    /// Plain-text table: question | your answer | fact | verdict.
    pub fn render(&self) -> String {
        let rows: Vec<[String; 4]> = self
            .lines
            .iter()
            .map(|l| {
                [
                    format!("{:>2}. {}", l.ordinal, l.question),
                    l.answer.to_string(),
                    l.fact.map_or_else(|| "-".to_string(), |f| f.to_string()),
                    l.verdict.map_or_else(|| "-".to_string(), |v| v.to_string()),
                ]
            })
            .collect();
        let header = ["question", "your answer", "fact", "verdict"];
        let mut widths = header.map(str::len);
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        if let Some(title) = &self.movie_title {
            let _ = writeln!(out, "Revealed movie: {title}");
        }
        if let Some(note) = &self.note {
            let _ = writeln!(out, "Note: {note}");
        }
        let line = |cells: [&str; 4], out: &mut String| {
            let padded: Vec<String> = cells.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "{}", padded.join(" | ").trim_end());
        };
        line(header, &mut out);
        let _ = writeln!(out, "{}", widths.map(|w| "-".repeat(w)).join("-+-"));
        for row in &rows {
            line([&row[0], &row[1], &row[2], &row[3]], &mut out);
        }
        out
    }
}

pub fn start_session(
    knowledge: &Knowledge,
    config: &EngineConfig,
    birth_year: Option<i32>,
    seed: u64,
) -> Result<SessionState, EngineError> {
    SessionState::start(knowledge, config, birth_year, seed)
}
