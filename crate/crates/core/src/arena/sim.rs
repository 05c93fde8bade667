use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::belief::Answer;
use crate::engine::{Knowledge, Question};
use crate::kgraph::Entity;

use super::ArenaError;

/// Stable 64-bit seed derived from a list of labelled parts.
pub fn derive_seed(parts: &[&[u8]]) -> u64 {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part);
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimAnswererConfig {
    pub target_movie: String,
    /// Probability of flipping a definitive answer.
    pub error_rate: f64,
    /// Probability of answering maybe; drawn before the flip.
    pub maybe_rate: f64,
    pub seed: u64,
    pub birth_year: Option<i32>,
}

impl SimAnswererConfig {
    pub fn truthful(target: impl Into<String>, seed: u64) -> Self {
        SimAnswererConfig {
            target_movie: target.into(),
            error_rate: 0.0,
            maybe_rate: 0.0,
            seed,
            birth_year: None,
        }
    }
}

/// Answer to a question about `entity`. The noise draw depends only on the
/// seed, the target and the entity, so every strategy asking the same
/// question in the same game hears the same answer.
pub fn simulate_entity_answer(
    config: &SimAnswererConfig,
    entity: &Entity,
    knowledge: &Knowledge,
) -> Result<Answer, ArenaError> {
    if !knowledge.indices.contains_movie(&config.target_movie) {
        return Err(ArenaError::UnknownTarget(config.target_movie.clone()));
    }
    let truth = knowledge.indices.forward(&config.target_movie).contains(entity);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[
        &config.seed.to_le_bytes(),
        config.target_movie.as_bytes(),
        entity.level.key().as_bytes(),
        entity.value.as_bytes(),
    ]));
    let maybe_draw: f64 = rng.random();
    let flip_draw: f64 = rng.random();
    if maybe_draw < config.maybe_rate {
        return Ok(Answer::Maybe);
    }
    let answer = Answer::from_truth(truth);
    Ok(if flip_draw < config.error_rate {
        answer.flipped()
    } else {
        answer
    })
}

pub fn simulate_answer(
    config: &SimAnswererConfig,
    question: &Question,
    knowledge: &Knowledge,
) -> Result<Answer, ArenaError> {
    simulate_entity_answer(config, &question.entity, knowledge)
}

/// A simulated player. Optionally lies exactly once, answering "no" to the
/// first question about an entity its movie actually has.
#[derive(Debug, Clone)]
pub struct SimAnswerer {
    pub config: SimAnswererConfig,
    pub force_one_flip: bool,
    flipped: Option<Entity>,
}

impl SimAnswerer {
    pub fn new(config: SimAnswererConfig) -> Self {
        SimAnswerer {
            config,
            force_one_flip: false,
            flipped: None,
        }
    }

    pub fn with_forced_flip(config: SimAnswererConfig) -> Self {
        SimAnswerer {
            config,
            force_one_flip: true,
            flipped: None,
        }
    }

    /// The entity whose answer was forced wrong, once it happened.
    pub fn flipped_entity(&self) -> Option<&Entity> {
        self.flipped.as_ref()
    }

    pub fn answer(&mut self, question: &Question, knowledge: &Knowledge) -> Result<Answer, ArenaError> {
        if self.force_one_flip && self.flipped.is_none() {
            if !knowledge.indices.contains_movie(&self.config.target_movie) {
                return Err(ArenaError::UnknownTarget(self.config.target_movie.clone()));
            }
            if knowledge
                .indices
                .forward(&self.config.target_movie)
                .contains(&question.entity)
            {
                self.flipped = Some(question.entity.clone());
                return Ok(Answer::No);
            }
        }
        simulate_answer(&self.config, question, knowledge)
    }

    pub fn accepts(&self, guess_ids: impl IntoIterator<Item = impl AsRef<str>>) -> bool {
        guess_ids.into_iter().any(|id| id.as_ref() == self.config.target_movie)
    }
}
