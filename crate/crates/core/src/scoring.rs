//! Likelihood estimator used to rank candidate question entities.
//!
//! Every entity gets a static level probability (share of the catalog it
//! covers) and a learned history probability (its share of elections among
//! entities of the same level). They are blended with weight `alpha`.
//! Era entities additionally receive a Gaussian log-likelihood term centred
//! on the user's birth year plus `mean_offset`, summed over the ten years of
//! the decade. Secondary-layer entities add `beta` times the belief mass
//! currently resting on the movies they cover.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::kgraph::{Entity, IndexPair, LearnedStats};
use crate::level::{Layer, Level};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoringError {
    #[error("invalid estimator config: {0}")]
    InvalidConfig(String),
    #[error("malformed era label `{0}`")]
    MalformedEra(String),
    #[error("level has no entities")]
    EmptyLevel,
    #[error("entity {0} is not among the level entities")]
    NotInLevel(String),
    #[error("entity {0} is on the wrong layer for this score")]
    WrongLayer(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub mean_offset: f64,
    pub smoothing: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            alpha: 0.2,
            beta: 1.0,
            sigma: 10.0,
            mean_offset: 20.0,
            smoothing: 1.0,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<(), ScoringError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(ScoringError::InvalidConfig(format!(
                "alpha {} outside [0, 1]",
                self.alpha
            )));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(ScoringError::InvalidConfig(format!("beta {} must be >= 0", self.beta)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(ScoringError::InvalidConfig(format!("sigma {} must be > 0", self.sigma)));
        }
        if !self.mean_offset.is_finite() {
            return Err(ScoringError::InvalidConfig("mean_offset must be finite".into()));
        }
        if !(self.smoothing > 0.0 && self.smoothing.is_finite()) {
            return Err(ScoringError::InvalidConfig(format!(
                "smoothing {} must be > 0",
                self.smoothing
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub level_prob: f64,
    pub history_prob: f64,
    pub combined: f64,
    pub era_term: f64,
    pub run_mass_term: f64,
    pub total: f64,
}

pub fn level_probability(entity: &Entity, indices: &IndexPair) -> f64 {
    let n = indices.movie_count();
    if n == 0 {
        return 0.0;
    }
    indices.coverage(entity) as f64 / n as f64
}

/// Smoothed share of elections for `entity` among `level_entities`.
pub fn history_probability<'a>(
    entity: &Entity,
    stats: &LearnedStats,
    level_entities: impl IntoIterator<Item = &'a Entity>,
    smoothing: f64,
) -> Result<f64, ScoringError> {
    let mut total = 0.0;
    let mut seen = false;
    let mut count = 0usize;
    for e in level_entities {
        if e.level != entity.level {
            return Err(ScoringError::NotInLevel(e.to_string()));
        }
        seen |= e == entity;
        total += stats.elections(e) as f64 + smoothing;
        count += 1;
    }
    if count == 0 {
        return Err(ScoringError::EmptyLevel);
    }
    if !seen {
        return Err(ScoringError::NotInLevel(entity.to_string()));
    }
    Ok((stats.elections(entity) as f64 + smoothing) / total)
}

pub fn combined_score(level_prob: f64, history_prob: f64, config: &EstimatorConfig) -> f64 {
    config.alpha * level_prob + (1.0 - config.alpha) * history_prob
}

/// First year of a decade label such as "1990s".
pub fn parse_era(era: &str) -> Result<i32, ScoringError> {
    let bad = || ScoringError::MalformedEra(era.to_string());
    let digits = era.strip_suffix('s').ok_or_else(bad)?;
    if digits.is_empty() || digits.len() > 6 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let year: i32 = digits.parse().map_err(|_| bad())?;
    if year % 10 != 0 {
        return Err(bad());
    }
    Ok(year)
}

/// Gaussian log-density of the user's "prime" year summed over the decade.
/// Zero when no birth year is known.
pub fn era_log_likelihood(era: &str, birth_year: Option<i32>, config: &EstimatorConfig) -> Result<f64, ScoringError> {
    let start = parse_era(era)?;
    let Some(birth_year) = birth_year else {
        return Ok(0.0);
    };
    let mu = birth_year as f64 + config.mean_offset;
    let log_norm = (1.0 / (config.sigma * (2.0 * PI).sqrt())).ln();
    let two_var = 2.0 * config.sigma * config.sigma;
    Ok((start..start + 10)
        .map(|y| {
            let d = y as f64 - mu;
            log_norm - d * d / two_var
        })
        .sum())
}

fn static_parts(
    entity: &Entity,
    indices: &IndexPair,
    stats: &LearnedStats,
    config: &EstimatorConfig,
) -> Result<(f64, f64, f64), ScoringError> {
    let level_prob = level_probability(entity, indices);
    let history_prob = history_probability(entity, stats, indices.entities_at(entity.level), config.smoothing)?;
    Ok((
        level_prob,
        history_prob,
        combined_score(level_prob, history_prob, config),
    ))
}

pub fn primary_score(
    entity: &Entity,
    indices: &IndexPair,
    stats: &LearnedStats,
    birth_year: Option<i32>,
    config: &EstimatorConfig,
) -> Result<ScoreBreakdown, ScoringError> {
    if entity.level.layer() != Layer::Primary {
        return Err(ScoringError::WrongLayer(entity.to_string()));
    }
    let (level_prob, history_prob, combined) = static_parts(entity, indices, stats, config)?;
    let era_term = if entity.level == Level::Era {
        era_log_likelihood(&entity.value, birth_year, config)?
    } else {
        0.0
    };
    Ok(ScoreBreakdown {
        level_prob,
        history_prob,
        combined,
        era_term,
        run_mass_term: 0.0,
        total: combined + era_term,
    })
}

pub fn secondary_score(
    entity: &Entity,
    indices: &IndexPair,
    stats: &LearnedStats,
    belief: &Belief,
    config: &EstimatorConfig,
) -> Result<ScoreBreakdown, ScoringError> {
    if entity.level.layer() != Layer::Secondary {
        return Err(ScoringError::WrongLayer(entity.to_string()));
    }
    let (level_prob, history_prob, combined) = static_parts(entity, indices, stats, config)?;
    let run_mass_term = config.beta * belief.mass(indices.backward(entity));
    Ok(ScoreBreakdown {
        level_prob,
        history_prob,
        combined,
        era_term: 0.0,
        run_mass_term,
        total: combined + run_mass_term,
    })
}
