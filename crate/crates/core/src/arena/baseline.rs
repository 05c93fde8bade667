//! Strict-elimination baselines.
//!
//! Both keep an explicit candidate set. A "yes" keeps the candidates carrying
//! the asked entity, a "no" drops them, a maybe changes nothing. There is no
//! way back from a wrong answer: once the true movie leaves the candidate set
//! the game is lost.
//!
//! Baseline 1 asks whichever entity splits the candidates closest to half.
//! Baseline 2 walks the levels in a fixed hierarchy (era, genre, subject,
//! actor, director, music composer), staying on a level until it hears a
//! "yes" there, and inside a level ranks entities by the blended
//! level/history probability plus the birth-year era prior.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::belief::Answer;
use crate::engine::{EngineConfig, GuessEntry, GuessList, Knowledge, Question};
use crate::kgraph::{Entity, LearnedStats};
use crate::level::Level;
use crate::scoring::{combined_score, era_log_likelihood, history_probability, level_probability};

use super::{ArenaError, GameStatus, Move, Questioner};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    /// Closest-to-half splitting.
    Halving,
    /// Hierarchical traversal ranked by learned popularity.
    Hierarchical,
}

/// Halving criterion: distance of a split from an even cut (`|2c - n|`).
pub fn split_distance(covered: usize, candidates: usize) -> usize {
    (2 * covered).abs_diff(candidates)
}

/// Number of candidates carrying `entity`.
pub fn coverage_within(knowledge: &Knowledge, entity: &Entity, candidates: &BTreeSet<String>) -> usize {
    let backward = knowledge.indices.backward(entity);
    if backward.len() < candidates.len() {
        backward.iter().filter(|m| candidates.contains(*m)).count()
    } else {
        candidates.iter().filter(|m| backward.contains(*m)).count()
    }
}

/// The closest-to-half entity among those that split the candidates.
/// Ties go to the larger coverage, then the smaller entity.
pub fn halving_choice<'k>(
    knowledge: &'k Knowledge,
    candidates: &BTreeSet<String>,
    asked: &BTreeSet<Entity>,
) -> Option<&'k Entity> {
    let n = candidates.len();
    let mut best: Option<(usize, usize, &Entity)> = None;
    for entity in knowledge.indices.entities() {
        if asked.contains(entity) {
            continue;
        }
        let c = coverage_within(knowledge, entity, candidates);
        if c == 0 || c == n {
            continue;
        }
        let d = split_distance(c, n);
        let better = match best {
            None => true,
            Some((bd, bc, _)) => d < bd || (d == bd && c > bc),
        };
        if better {
            best = Some((d, c, entity));
        }
    }
    best.map(|(_, _, e)| e)
}

pub struct BaselineSession<'a> {
    kind: BaselineKind,
    knowledge: &'a Knowledge,
    stats: &'a LearnedStats,
    config: &'a EngineConfig,
    birth_year: Option<i32>,
    candidates: BTreeSet<String>,
    asked: BTreeSet<Entity>,
    questions_used: u32,
    status: GameStatus,
    pending_guess: Option<GuessList>,
    /// Index into `Level::ALL` for the hierarchical walk.
    level_cursor: usize,
}

impl<'a> BaselineSession<'a> {
    pub fn new(
        kind: BaselineKind,
        knowledge: &'a Knowledge,
        stats: &'a LearnedStats,
        config: &'a EngineConfig,
        birth_year: Option<i32>,
    ) -> Self {
        BaselineSession {
            kind,
            knowledge,
            stats,
            config,
            birth_year,
            candidates: knowledge.catalog.ids().map(str::to_string).collect(),
            asked: BTreeSet::new(),
            questions_used: 0,
            status: GameStatus::Playing,
            pending_guess: None,
            level_cursor: 0,
        }
    }

    pub fn candidates(&self) -> &BTreeSet<String> {
        &self.candidates
    }

    fn entity_popularity(&self, entity: &Entity) -> f64 {
        match self.kind {
            BaselineKind::Halving => self.knowledge.indices.coverage(entity) as f64,
            BaselineKind::Hierarchical => self.eq1_score(entity),
        }
    }

    fn eq1_score(&self, entity: &Entity) -> f64 {
        let indices = &self.knowledge.indices;
        let est = &self.config.estimator;
        let lp = level_probability(entity, indices);
        let hp =
            history_probability(entity, self.stats, indices.entities_at(entity.level), est.smoothing).unwrap_or(0.0);
        combined_score(lp, hp, est)
    }

    fn movie_popularity(&self, movie_id: &str) -> f64 {
        self.knowledge
            .indices
            .forward(movie_id)
            .iter()
            .map(|e| self.entity_popularity(e))
            .sum()
    }

    fn guess(&self) -> GuessList {
        let mut ranked: Vec<(f64, &String)> = self.candidates.iter().map(|m| (self.movie_popularity(m), m)).collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
        let entries: Vec<GuessEntry> = ranked
            .into_iter()
            .take(self.config.guess_size)
            .map(|(_, id)| GuessEntry {
                movie_id: id.clone(),
                title: self.knowledge.title(id).to_string(),
                probability: 1.0 / self.candidates.len() as f64,
            })
            .collect();
        GuessList {
            ordinal: self.questions_used + 1,
            entries,
        }
    }

    fn splits(&self, entity: &Entity) -> Option<usize> {
        if self.asked.contains(entity) {
            return None;
        }
        let c = coverage_within(self.knowledge, entity, &self.candidates);
        (c > 0 && c < self.candidates.len()).then_some(c)
    }

    fn hierarchical_choice(&self) -> Option<(usize, Entity)> {
        let n = self.candidates.len();
        let levels = Level::ALL.len();
        for step in 0..levels {
            let cursor = (self.level_cursor + step) % levels;
            let level = Level::ALL[cursor];
            let mut best: Option<(f64, usize, &Entity)> = None;
            for entity in self.knowledge.indices.entities_at(level) {
                let Some(c) = self.splits(entity) else { continue };
                let mut score = self.eq1_score(entity);
                if level == Level::Era {
                    score += era_log_likelihood(&entity.value, self.birth_year, &self.config.estimator)
                        .unwrap_or(f64::NEG_INFINITY);
                }
                let better = match best {
                    None => true,
                    Some((bs, bc, _)) => match score.total_cmp(&bs) {
                        Ordering::Greater => true,
                        Ordering::Less => false,
                        Ordering::Equal => split_distance(c, n) < split_distance(bc, n),
                    },
                };
                if better {
                    best = Some((score, c, entity));
                }
            }
            if let Some((_, _, entity)) = best {
                return Some((cursor, entity.clone()));
            }
        }
        None
    }

    fn choose(&self) -> Option<(usize, Entity)> {
        match self.kind {
            BaselineKind::Halving => {
                halving_choice(self.knowledge, &self.candidates, &self.asked).map(|e| (0, e.clone()))
            }
            BaselineKind::Hierarchical => self.hierarchical_choice(),
        }
    }
}

impl Questioner for BaselineSession<'_> {
    fn next_move(&mut self) -> Result<Option<Move>, ArenaError> {
        if self.status != GameStatus::Playing {
            return Ok(None);
        }
        if self.pending_guess.is_some() {
            return Err(ArenaError::Protocol("guess feedback pending"));
        }
        if self.candidates.is_empty() || self.questions_used >= self.config.max_questions {
            self.status = GameStatus::Exhausted;
            return Ok(None);
        }
        let must_guess =
            self.candidates.len() <= self.config.guess_size || self.questions_used + 1 >= self.config.max_questions;
        let choice = if must_guess { None } else { self.choose() };
        match choice {
            Some((cursor, entity)) => {
                if self.kind == BaselineKind::Hierarchical {
                    self.level_cursor = cursor;
                }
                Ok(Some(Move::Ask(Question::new(entity, self.questions_used + 1))))
            }
            None => {
                let guess = self.guess();
                self.pending_guess = Some(guess.clone());
                self.questions_used += 1;
                Ok(Some(Move::Guess(guess)))
            }
        }
    }

    fn answer(&mut self, question: &Question, answer: Answer) -> Result<(), ArenaError> {
        if self.status != GameStatus::Playing || self.pending_guess.is_some() {
            return Err(ArenaError::Protocol("not expecting an answer"));
        }
        let backward = self.knowledge.indices.backward(&question.entity);
        match answer {
            Answer::Yes => self.candidates.retain(|m| backward.contains(m)),
            Answer::No => self.candidates.retain(|m| !backward.contains(m)),
            Answer::Maybe => {}
        }
        if self.kind == BaselineKind::Hierarchical && answer == Answer::Yes {
            self.level_cursor = (self.level_cursor + 1) % Level::ALL.len();
        }
        self.asked.insert(question.entity.clone());
        self.questions_used += 1;
        if self.candidates.is_empty() {
            self.status = GameStatus::Exhausted;
        }
        Ok(())
    }

    fn feedback(&mut self, accepted: bool, movie: Option<&str>) -> Result<(), ArenaError> {
        let guess = self
            .pending_guess
            .take()
            .ok_or(ArenaError::Protocol("no guess pending"))?;
        if accepted {
            let movie = movie.ok_or(ArenaError::Protocol("accepted guess without movie"))?;
            if !guess.contains(movie) {
                return Err(ArenaError::Protocol("confirmed movie not in guess"));
            }
            self.status = GameStatus::Solved;
        } else {
            for entry in &guess.entries {
                self.candidates.remove(&entry.movie_id);
            }
            if self.candidates.is_empty() || self.questions_used >= self.config.max_questions {
                self.status = GameStatus::Exhausted;
            }
        }
        Ok(())
    }

    fn status(&self) -> GameStatus {
        self.status
    }

    fn questions_used(&self) -> u32 {
        self.questions_used
    }

    fn still_possible(&self, movie_id: &str) -> bool {
        self.candidates.contains(movie_id)
    }
}
