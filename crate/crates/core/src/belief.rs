//! Probability distribution over candidate movies.
//!
//! A definitive answer reweights the distribution multiplicatively: movies
//! consistent with the answer are scaled by `exp(+alpha)`, the rest by
//! `exp(-alpha)`, then everything is renormalized. A maybe leaves it alone.
//! Rejected guesses are zeroed and their mass is handed back to the surviving
//! movies in equal additive shares, which keeps every pairwise difference
//! between survivors intact.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Maybe,
}

impl Answer {
    pub fn is_definitive(self) -> bool {
        !matches!(self, Answer::Maybe)
    }

    pub fn flipped(self) -> Answer {
        match self {
            Answer::Yes => Answer::No,
            Answer::No => Answer::Yes,
            Answer::Maybe => Answer::Maybe,
        }
    }

    pub fn from_truth(truth: bool) -> Answer {
        if truth {
            Answer::Yes
        } else {
            Answer::No
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Maybe => "maybe",
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Answer {
    type Err = BeliefError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "y" | "yes" => Ok(Answer::Yes),
            "n" | "no" => Ok(Answer::No),
            "m" | "maybe" => Ok(Answer::Maybe),
            other => Err(BeliefError::BadAnswer(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BeliefError {
    #[error("belief support must be non-empty")]
    EmptySupport,
    #[error("movie `{0}` is not in the belief support")]
    UnknownMovie(String),
    #[error("movie `{0}` is in both the yes and the no set")]
    OverlappingSignal(String),
    #[error("definitive answer sets do not cover movie `{0}`")]
    IncompleteSignal(String),
    #[error("maybe signal must carry empty sets")]
    NonEmptyMaybe,
    #[error("update alpha must be positive and finite, got {0}")]
    BadAlpha(f64),
    #[error("no probability mass left to renormalize")]
    NoMass,
    #[error("cannot parse answer `{0}`")]
    BadAnswer(String),
}

/// Movies consistent (`yes_set`) and inconsistent (`no_set`) with an answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerSignal {
    pub yes_set: BTreeSet<String>,
    pub no_set: BTreeSet<String>,
    pub kind: Answer,
}

impl AnswerSignal {
    pub fn maybe() -> Self {
        AnswerSignal {
            yes_set: BTreeSet::new(),
            no_set: BTreeSet::new(),
            kind: Answer::Maybe,
        }
    }

    /// Splits the support by whether a movie carries the asked entity, then
    /// orients the split by the answer: for a "no", the movies lacking the
    /// entity are the consistent ones.
    pub fn from_answer<'a>(belief: &Belief, carriers: impl IntoIterator<Item = &'a String>, answer: Answer) -> Self {
        if answer == Answer::Maybe {
            return Self::maybe();
        }
        let has: BTreeSet<String> = carriers
            .into_iter()
            .filter(|id| belief.index_of(id).is_some())
            .cloned()
            .collect();
        let lacks: BTreeSet<String> = belief
            .ids()
            .filter(|id| !has.contains(*id))
            .map(str::to_string)
            .collect();
        let (yes_set, no_set) = match answer {
            Answer::Yes => (has, lacks),
            _ => (lacks, has),
        };
        AnswerSignal {
            yes_set,
            no_set,
            kind: answer,
        }
    }
}

/// Normalized distribution over a fixed, sorted set of movie ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    ids: Arc<[String]>,
    probs: Vec<f64>,
}

impl Belief {
    pub fn uniform<I, S>(movie_ids: I) -> Result<Self, BeliefError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = movie_ids.into_iter().map(Into::into).collect();
        if set.is_empty() {
            return Err(BeliefError::EmptySupport);
        }
        let n = set.len();
        Ok(Belief {
            ids: set.into_iter().collect::<Vec<_>>().into(),
            probs: vec![1.0 / n as f64; n],
        })
    }

    /// Builds a belief from explicit weights, normalizing them.
    pub fn from_weights<I, S>(weights: I) -> Result<Self, BeliefError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut pairs: Vec<(String, f64)> = weights.into_iter().map(|(s, w)| (s.into(), w)).collect();
        if pairs.is_empty() {
            return Err(BeliefError::EmptySupport);
        }
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        pairs.dedup_by(|a, b| a.0 == b.0);
        let total: f64 = pairs.iter().map(|p| p.1.max(0.0)).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(BeliefError::NoMass);
        }
        let (ids, probs): (Vec<String>, Vec<f64>) = pairs.into_iter().map(|(s, w)| (s, w.max(0.0) / total)).unzip();
        Ok(Belief { ids: ids.into(), probs })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.ids.iter().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.ids.iter().map(String::as_str).zip(self.probs.iter().copied())
    }

    fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.binary_search_by(|probe| probe.as_str().cmp(id)).ok()
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.index_of(id).map(|i| self.probs[i])
    }

    pub fn prob(&self, id: &str) -> f64 {
        self.get(id).unwrap_or(0.0)
    }

    /// Total probability of the given movies; ids outside the support count 0.
    pub fn mass<'a>(&self, ids: impl IntoIterator<Item = &'a String>) -> f64 {
        ids.into_iter().map(|id| self.prob(id)).sum()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn positive_count(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }

    /// Movies whose probability exceeds `threshold`.
    pub fn count_above(&self, threshold: f64) -> usize {
        self.probs.iter().filter(|&&p| p > threshold).count()
    }

    pub fn apply_answer(&self, signal: &AnswerSignal, update_alpha: f64) -> Result<Belief, BeliefError> {
        if !(update_alpha > 0.0 && update_alpha.is_finite()) {
            return Err(BeliefError::BadAlpha(update_alpha));
        }
        if signal.kind == Answer::Maybe {
            if !signal.yes_set.is_empty() || !signal.no_set.is_empty() {
                return Err(BeliefError::NonEmptyMaybe);
            }
            return Ok(self.clone());
        }
        if let Some(id) = signal.yes_set.intersection(&signal.no_set).next() {
            return Err(BeliefError::OverlappingSignal(id.clone()));
        }
        for id in signal.yes_set.iter().chain(&signal.no_set) {
            if self.index_of(id).is_none() {
                return Err(BeliefError::UnknownMovie(id.clone()));
            }
        }
        if signal.yes_set.len() + signal.no_set.len() != self.len() {
            let missing = self
                .ids()
                .find(|id| !signal.yes_set.contains(*id) && !signal.no_set.contains(*id))
                .unwrap_or_default();
            return Err(BeliefError::IncompleteSignal(missing.to_string()));
        }

        let up = update_alpha.exp();
        let down = (-update_alpha).exp();
        let mut probs = self.probs.clone();
        for (p, id) in probs.iter_mut().zip(self.ids.iter()) {
            *p *= if signal.yes_set.contains(id) { up } else { down };
        }
        let norm: f64 = probs.iter().sum();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(BeliefError::NoMass);
        }
        for p in &mut probs {
            *p /= norm;
        }
        Ok(Belief {
            ids: Arc::clone(&self.ids),
            probs,
        })
    }

    pub fn eliminate_and_redistribute<'a>(
        &self,
        rejected: impl IntoIterator<Item = &'a String>,
    ) -> Result<Belief, BeliefError> {
        let mut is_rejected = vec![false; self.len()];
        for id in rejected {
            let i = self.index_of(id).ok_or_else(|| BeliefError::UnknownMovie(id.clone()))?;
            is_rejected[i] = true;
        }
        let freed: f64 = self
            .probs
            .iter()
            .zip(&is_rejected)
            .filter(|(_, &r)| r)
            .map(|(p, _)| p)
            .sum();
        // Previously zeroed movies stay out of the share.
        let survivors = self
            .probs
            .iter()
            .zip(&is_rejected)
            .filter(|(&p, &r)| !r && p > 0.0)
            .count();
        if survivors == 0 {
            return Err(BeliefError::NoMass);
        }
        let share = freed / survivors as f64;
        let probs = self
            .probs
            .iter()
            .zip(&is_rejected)
            .map(|(&p, &r)| {
                if r {
                    0.0
                } else if p > 0.0 {
                    p + share
                } else {
                    0.0
                }
            })
            .collect();
        Ok(Belief {
            ids: Arc::clone(&self.ids),
            probs,
        })
    }

    /// The `k` most probable movies, descending; ties go to the smaller id.
    pub fn top_k(&self, k: usize) -> Vec<(String, f64)> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.probs[b]
                .total_cmp(&self.probs[a])
                .then_with(|| self.ids[a].cmp(&self.ids[b]))
        });
        order
            .into_iter()
            .take(k)
            .map(|i| (self.ids[i].clone(), self.probs[i]))
            .collect()
    }
}

pub fn init_uniform<I, S>(movie_ids: I) -> Result<Belief, BeliefError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    Belief::uniform(movie_ids)
}

pub fn apply_answer(belief: &Belief, signal: &AnswerSignal, update_alpha: f64) -> Result<Belief, BeliefError> {
    belief.apply_answer(signal, update_alpha)
}

pub fn eliminate_and_redistribute(belief: &Belief, rejected: &BTreeSet<String>) -> Result<Belief, BeliefError> {
    belief.eliminate_and_redistribute(rejected)
}

pub fn top_k(belief: &Belief, k: usize) -> Vec<(String, f64)> {
    belief.top_k(k)
}
