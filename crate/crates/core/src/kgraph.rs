//! Two-way inverted index over the catalog and the cross-game election
//! counts that weight it.
//!
//! The forward index maps a movie to its `(level, value)` entities, the
//! backward index maps an entity to the movies carrying it. Together they are
//! the edge set of a bipartite movie/entity graph. Learned weights are stored
//! as integer election counts per entity; probabilities are derived from them
//! by the scoring module.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::level::Level;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Entity {
    pub level: Level,
    pub value: String,
}

impl Entity {
    pub fn new(level: Level, value: impl Into<String>) -> Self {
        Entity {
            level,
            value: value.into(),
        }
    }

    pub fn question_text(&self) -> String {
        self.level.render_question(&self.value)
    }
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.level, self.value)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("unknown movie `{0}`")]
    UnknownMovie(String),
    #[error("stats store is corrupt: {0}")]
    CorruptStats(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndexPair {
    forward: BTreeMap<String, BTreeSet<Entity>>,
    backward: BTreeMap<Entity, BTreeSet<String>>,
}

static EMPTY_ENTITIES: BTreeSet<Entity> = BTreeSet::new();
static EMPTY_MOVIES: BTreeSet<String> = BTreeSet::new();

impl IndexPair {
    pub fn build(catalog: &Catalog) -> Self {
        let mut forward: BTreeMap<String, BTreeSet<Entity>> = BTreeMap::new();
        let mut backward: BTreeMap<Entity, BTreeSet<String>> = BTreeMap::new();
        for movie in catalog.movies() {
            let entities = forward.entry(movie.id.clone()).or_default();
            for (level, values) in &movie.attributes {
                for value in values {
                    let entity = Entity::new(*level, value.clone());
                    backward.entry(entity.clone()).or_default().insert(movie.id.clone());
                    entities.insert(entity);
                }
            }
        }
        IndexPair { forward, backward }
    }

    pub fn forward(&self, movie_id: &str) -> &BTreeSet<Entity> {
        self.forward.get(movie_id).unwrap_or(&EMPTY_ENTITIES)
    }

    pub fn backward(&self, entity: &Entity) -> &BTreeSet<String> {
        self.backward.get(entity).unwrap_or(&EMPTY_MOVIES)
    }

    pub fn contains_movie(&self, movie_id: &str) -> bool {
        self.forward.contains_key(movie_id)
    }

    pub fn movie_count(&self) -> usize {
        self.forward.len()
    }

    pub fn movie_ids(&self) -> impl Iterator<Item = &str> {
        self.forward.keys().map(String::as_str)
    }

    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.backward.keys()
    }

    /// All entities of one level, in ascending value order.
    pub fn entities_at(&self, level: Level) -> impl Iterator<Item = &Entity> {
        let start = Entity::new(level, String::new());
        self.backward
            .range(start..)
            .map(|(e, _)| e)
            .take_while(move |e| e.level == level)
    }

    pub fn coverage(&self, entity: &Entity) -> usize {
        self.backward(entity).len()
    }

    pub fn forward_map(&self) -> &BTreeMap<String, BTreeSet<Entity>> {
        &self.forward
    }

    pub fn backward_map(&self) -> &BTreeMap<Entity, BTreeSet<String>> {
        &self.backward
    }
}

pub fn build_indices(catalog: &Catalog) -> IndexPair {
    IndexPair::build(catalog)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EntityStats {
    pub coverage: u64,
    pub elections: u64,
}

/// Cross-game election counts keyed by entity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LearnedStats {
    elections: BTreeMap<Entity, u64>,
    games_recorded: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoredStats {
    games_recorded: u64,
    entities: Vec<StoredEntity>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoredEntity {
    level: Level,
    value: String,
    elections: u64,
}

impl LearnedStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn elections(&self, entity: &Entity) -> u64 {
        self.elections.get(entity).copied().unwrap_or(0)
    }

    pub fn games_recorded(&self) -> u64 {
        self.games_recorded
    }

    pub fn entity_stats(&self, indices: &IndexPair, entity: &Entity) -> EntityStats {
        EntityStats {
            coverage: indices.coverage(entity) as u64,
            elections: self.elections(entity),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Entity, u64)> {
        self.elections.iter().map(|(e, &n)| (e, n))
    }

    /// Credits every entity of a user-confirmed movie with one election.
    pub fn record_election(&mut self, indices: &IndexPair, movie_id: &str) -> Result<(), GraphError> {
        if !indices.contains_movie(movie_id) {
            return Err(GraphError::UnknownMovie(movie_id.to_string()));
        }
        for entity in indices.forward(movie_id) {
            *self.elections.entry(entity.clone()).or_insert(0) += 1;
        }
        self.games_recorded += 1;
        Ok(())
    }

    pub fn save<W: Write>(&self, writer: W) -> Result<(), GraphError> {
        let stored = StoredStats {
            games_recorded: self.games_recorded,
            entities: self
                .elections
                .iter()
                .map(|(e, &n)| StoredEntity {
                    level: e.level,
                    value: e.value.clone(),
                    elections: n,
                })
                .collect(),
        };
        serde_json::to_writer_pretty(writer, &stored).map_err(|e| GraphError::Io(std::io::Error::other(e)))
    }

    /// Loads a stats store. A blank store is the empty stats; anything that
    /// does not parse is an error rather than a silent reset.
    pub fn load<R: Read>(mut reader: R) -> Result<Self, GraphError> {
        let mut text = String::new();
        reader.read_to_string(&mut text).map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => GraphError::CorruptStats(e.to_string()),
            _ => GraphError::Io(e),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, GraphError> {
        if text.trim().is_empty() {
            return Ok(Self::default());
        }
        let stored: StoredStats = serde_json::from_str(text).map_err(|e| GraphError::CorruptStats(e.to_string()))?;
        let mut elections = BTreeMap::new();
        for se in stored.entities {
            if se.value.is_empty() {
                return Err(GraphError::CorruptStats("empty entity value".into()));
            }
            let entity = Entity::new(se.level, se.value);
            if elections.insert(entity.clone(), se.elections).is_some() {
                return Err(GraphError::CorruptStats(format!("duplicate entity {entity}")));
            }
        }
        Ok(LearnedStats {
            elections,
            games_recorded: stored.games_recorded,
        })
    }
}

pub fn record_election(stats: &mut LearnedStats, indices: &IndexPair, movie_id: &str) -> Result<(), GraphError> {
    stats.record_election(indices, movie_id)
}

pub fn save_stats<W: Write>(stats: &LearnedStats, sink: W) -> Result<(), GraphError> {
    stats.save(sink)
}

pub fn load_stats<R: Read>(source: R) -> Result<LearnedStats, GraphError> {
    LearnedStats::load(source)
}
