//! Movie catalog loading, validation and preprocessing.
//!
//! The on-disk format is a JSON document with a top-level `movies` array.
//! Each record carries an id, a title, an optional release year and a map of
//! level keys (`genre`, `subject`, `actor`, `director`, `music_composer`) to
//! value lists. The `era` level is never read from input; it is always
//! derived from the release year during preprocessing.
//!
//! Preprocessing derives eras, merges manual overrides, applies per-level
//! allowlists and prunes sparse `(level, value)` entities. Pruning can drop
//! movies, which lowers the pruning bound, so the whole pass is repeated until
//! nothing changes. That makes `preprocess` idempotent.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use tracing::warn;

use crate::level::Level;

/// Earliest release year accepted for era derivation.
pub const MIN_RELEASE_YEAR: i32 = 1800;

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate movie id `{0}`")]
    DuplicateId(String),
    #[error("empty catalog")]
    Empty,
    #[error("movie id must be non-empty")]
    EmptyId,
    #[error("movie `{0}` has an empty title")]
    EmptyTitle(String),
    #[error("release year {0} is before {MIN_RELEASE_YEAR}")]
    YearOutOfRange(i64),
    #[error("override references unknown movie `{0}`")]
    UnknownOverrideMovie(String),
    #[error("invalid preprocess options: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for CatalogError {
    fn from(err: serde_json::Error) -> Self {
        if err.is_io() {
            return CatalogError::Io(err.into());
        }
        CatalogError::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MovieRecord {
    pub id: String,
    pub title: String,
    pub release_year: Option<i32>,
    pub attributes: BTreeMap<Level, BTreeSet<String>>,
}

impl MovieRecord {
    pub fn new(id: impl Into<String>, title: impl Into<String>, release_year: Option<i32>) -> Self {
        MovieRecord {
            id: id.into(),
            title: title.into(),
            release_year,
            attributes: BTreeMap::new(),
        }
    }

    /// Builder-style helper, mostly for tests and fixtures.
    pub fn with(mut self, level: Level, values: &[&str]) -> Self {
        self.attributes
            .entry(level)
            .or_default()
            .extend(values.iter().map(|v| v.to_string()));
        self
    }

    pub fn values(&self, level: Level) -> impl Iterator<Item = &str> {
        self.attributes
            .get(&level)
            .into_iter()
            .flat_map(|set| set.iter().map(String::as_str))
    }

    pub fn has(&self, level: Level, value: &str) -> bool {
        self.attributes.get(&level).is_some_and(|set| set.contains(value))
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.values().map(BTreeSet::len).sum()
    }
}

/// A validated set of movies: non-empty, unique non-empty ids, non-empty titles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    movies: Vec<MovieRecord>,
    provenance: String,
    by_id: BTreeMap<String, usize>,
}

impl Catalog {
    pub fn new(movies: Vec<MovieRecord>, provenance: impl Into<String>) -> Result<Self, CatalogError> {
        if movies.is_empty() {
            return Err(CatalogError::Empty);
        }
        let mut by_id = BTreeMap::new();
        for (i, movie) in movies.iter().enumerate() {
            if movie.id.is_empty() {
                return Err(CatalogError::EmptyId);
            }
            if movie.title.trim().is_empty() {
                return Err(CatalogError::EmptyTitle(movie.id.clone()));
            }
            if let Some(year) = movie.release_year {
                if year < MIN_RELEASE_YEAR {
                    return Err(CatalogError::YearOutOfRange(year.into()));
                }
            }
            if by_id.insert(movie.id.clone(), i).is_some() {
                return Err(CatalogError::DuplicateId(movie.id.clone()));
            }
        }
        let mut movies = movies;
        for movie in &mut movies {
            for set in movie.attributes.values_mut() {
                set.retain(|v| !v.is_empty());
            }
            movie.attributes.retain(|_, set| !set.is_empty());
        }
        Ok(Catalog {
            movies,
            provenance: provenance.into(),
            by_id,
        })
    }

    pub fn movies(&self) -> &[MovieRecord] {
        &self.movies
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.movies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.movies.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&MovieRecord> {
        self.by_id.get(id).map(|&i| &self.movies[i])
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.movies.iter().map(|m| m.id.as_str())
    }

    /// Case-insensitive exact title lookup.
    pub fn find_by_title(&self, title: &str) -> Option<&MovieRecord> {
        let needle = title.trim().to_lowercase();
        self.movies.iter().find(|m| m.title.trim().to_lowercase() == needle)
    }
}

/// A catalog together with the non-fatal issues found while reading it.
#[derive(Debug)]
pub struct Loaded<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

#[derive(Deserialize)]
struct RawCatalog {
    movies: Vec<RawMovie>,
    #[serde(flatten)]
    extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Deserialize)]
struct RawMovie {
    id: String,
    title: String,
    #[serde(default)]
    release_year: Option<i64>,
    #[serde(default)]
    attributes: BTreeMap<String, Vec<String>>,
    #[serde(flatten)]
    extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Serialize)]
struct OutCatalog<'a> {
    movies: Vec<OutMovie<'a>>,
}

#[derive(Serialize)]
struct OutMovie<'a> {
    id: &'a str,
    title: &'a str,
    release_year: Option<i32>,
    attributes: BTreeMap<&'static str, &'a BTreeSet<String>>,
}

/// Maps an input attribute key to a level; `era` is always derived so it is
/// treated like any other unknown key.
fn input_level(key: &str) -> Option<Level> {
    match key.parse::<Level>() {
        Ok(Level::Era) | Err(_) => None,
        Ok(level) => Some(level),
    }
}

fn convert_attributes(
    movie_id: &str,
    raw: BTreeMap<String, Vec<String>>,
    warnings: &mut Vec<String>,
) -> BTreeMap<Level, BTreeSet<String>> {
    let mut attributes: BTreeMap<Level, BTreeSet<String>> = BTreeMap::new();
    for (key, values) in raw {
        let Some(level) = input_level(&key) else {
            warnings.push(format!("movie `{movie_id}`: ignoring attribute key `{key}`"));
            continue;
        };
        for value in values {
            let value = value.trim();
            if value.is_empty() {
                warnings.push(format!("movie `{movie_id}`: dropping empty {key} value"));
                continue;
            }
            attributes.entry(level).or_default().insert(value.to_string());
        }
    }
    attributes
}

fn convert_year(year: Option<i64>) -> Result<Option<i32>, CatalogError> {
    match year {
        None => Ok(None),
        Some(y) if y < MIN_RELEASE_YEAR as i64 || y > i32::MAX as i64 => Err(CatalogError::YearOutOfRange(y)),
        Some(y) => Ok(Some(y as i32)),
    }
}

/// Parses a catalog document, collecting warnings for ignored keys.
pub fn parse_catalog(text: &str, provenance: &str) -> Result<Loaded<Catalog>, CatalogError> {
    let raw: RawCatalog = serde_json::from_str(text)?;
    let mut warnings = Vec::new();
    for key in raw.extra.keys() {
        warnings.push(format!("ignoring top-level field `{key}`"));
    }
    let mut movies = Vec::with_capacity(raw.movies.len());
    for rm in raw.movies {
        for key in rm.extra.keys() {
            warnings.push(format!("movie `{}`: ignoring field `{key}`", rm.id));
        }
        let release_year = convert_year(rm.release_year)?;
        let attributes = convert_attributes(&rm.id, rm.attributes, &mut warnings);
        movies.push(MovieRecord {
            id: rm.id,
            title: rm.title,
            release_year,
            attributes,
        });
    }
    let catalog = Catalog::new(movies, provenance)?;
    Ok(Loaded {
        value: catalog,
        warnings,
    })
}

/// Reads a catalog from any byte stream. Warnings are logged.
pub fn load_catalog<R: Read>(mut reader: R, provenance: &str) -> Result<Catalog, CatalogError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let loaded = parse_catalog(&text, provenance)?;
    for w in &loaded.warnings {
        warn!("{w}");
    }
    Ok(loaded.value)
}

pub fn load_catalog_file(path: impl AsRef<Path>) -> Result<Catalog, CatalogError> {
    let path = path.as_ref();
    let file = BufReader::new(File::open(path)?);
    load_catalog(file, &path.display().to_string())
}

/// Writes the catalog in the input format. Era values are omitted since they
/// are re-derived on load.
pub fn write_catalog<W: Write>(catalog: &Catalog, writer: W) -> Result<(), CatalogError> {
    let out = OutCatalog {
        movies: catalog
            .movies
            .iter()
            .map(|m| OutMovie {
                id: &m.id,
                title: &m.title,
                release_year: m.release_year,
                attributes: m
                    .attributes
                    .iter()
                    .filter(|(level, _)| **level != Level::Era)
                    .map(|(level, set)| (level.key(), set))
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_writer_pretty(writer, &out)?;
    Ok(())
}

/// Decade label for a release year, e.g. 1994 -> "1990s".
pub fn derive_era(release_year: i32) -> Result<String, CatalogError> {
    if release_year < MIN_RELEASE_YEAR {
        return Err(CatalogError::YearOutOfRange(release_year.into()));
    }
    Ok(format!("{}s", release_year.div_euclid(10) * 10))
}

/// A manual attribute addition for one movie.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Override {
    pub movie_id: String,
    pub level: Level,
    pub values: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessOptions {
    /// Entities present in strictly fewer than this fraction of movies are pruned.
    pub min_tag_fraction: f64,
    pub value_allowlists: BTreeMap<Level, BTreeSet<String>>,
    pub overrides: Vec<Override>,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            min_tag_fraction: 0.10,
            value_allowlists: BTreeMap::new(),
            overrides: Vec::new(),
        }
    }
}

impl PreprocessOptions {
    pub fn validate(&self) -> Result<(), CatalogError> {
        if !(0.0..=1.0).contains(&self.min_tag_fraction) {
            return Err(CatalogError::InvalidOptions(format!(
                "min_tag_fraction {} outside [0, 1]",
                self.min_tag_fraction
            )));
        }
        if self.value_allowlists.contains_key(&Level::Era) {
            return Err(CatalogError::InvalidOptions(
                "era values are derived and cannot be allowlisted".into(),
            ));
        }
        if let Some(ov) = self.overrides.iter().find(|o| o.level == Level::Era) {
            return Err(CatalogError::InvalidOptions(format!(
                "override for `{}` targets the derived era level",
                ov.movie_id
            )));
        }
        Ok(())
    }
}

/// Parses an overrides document: same shape as a catalog, partial records
/// merged by id. Only attribute lists are used.
pub fn parse_overrides(text: &str) -> Result<Loaded<Vec<Override>>, CatalogError> {
    #[derive(Deserialize)]
    struct RawOverrides {
        movies: Vec<RawPartial>,
    }
    #[derive(Deserialize)]
    struct RawPartial {
        id: String,
        #[serde(default)]
        attributes: BTreeMap<String, Vec<String>>,
        #[serde(flatten)]
        extra: BTreeMap<String, serde_json::Value>,
    }

    let raw: RawOverrides = serde_json::from_str(text)?;
    let mut warnings = Vec::new();
    let mut overrides = Vec::new();
    for partial in raw.movies {
        if partial.id.is_empty() {
            return Err(CatalogError::EmptyId);
        }
        for key in partial.extra.keys() {
            warnings.push(format!("override `{}`: ignoring field `{key}`", partial.id));
        }
        let attrs = convert_attributes(&partial.id, partial.attributes, &mut warnings);
        for (level, values) in attrs {
            overrides.push(Override {
                movie_id: partial.id.clone(),
                level,
                values,
            });
        }
    }
    Ok(Loaded {
        value: overrides,
        warnings,
    })
}

/// Parses `{"genre": [...], "subject": [...]}` into per-level allowlists.
pub fn parse_allowlists(text: &str) -> Result<Loaded<BTreeMap<Level, BTreeSet<String>>>, CatalogError> {
    let raw: BTreeMap<String, Vec<String>> = serde_json::from_str(text)?;
    let mut warnings = Vec::new();
    let lists = convert_attributes("<allowlist>", raw, &mut warnings);
    Ok(Loaded { value: lists, warnings })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PreprocessReport {
    pub passes: usize,
    pub pruned_entities: BTreeSet<(Level, String)>,
    pub dropped_movies: Vec<String>,
}

pub fn preprocess(catalog: &Catalog, options: &PreprocessOptions) -> Result<Catalog, CatalogError> {
    let (out, report) = preprocess_with_report(catalog, options)?;
    for id in &report.dropped_movies {
        warn!("dropping movie `{id}`: no attributes survive preprocessing");
    }
    Ok(out)
}

pub fn preprocess_with_report(
    catalog: &Catalog,
    options: &PreprocessOptions,
) -> Result<(Catalog, PreprocessReport), CatalogError> {
    options.validate()?;
    for ov in &options.overrides {
        if catalog.get(&ov.movie_id).is_none() {
            return Err(CatalogError::UnknownOverrideMovie(ov.movie_id.clone()));
        }
    }

    let mut report = PreprocessReport::default();
    let mut movies = catalog.movies.clone();
    loop {
        report.passes += 1;
        let before = movies.clone();

        for movie in &mut movies {
            movie.attributes.remove(&Level::Era);
            if let Some(year) = movie.release_year {
                movie.attributes.insert(Level::Era, BTreeSet::from([derive_era(year)?]));
            }
        }

        for ov in &options.overrides {
            if let Some(movie) = movies.iter_mut().find(|m| m.id == ov.movie_id) {
                movie
                    .attributes
                    .entry(ov.level)
                    .or_default()
                    .extend(ov.values.iter().filter(|v| !v.is_empty()).cloned());
            }
        }

        for movie in &mut movies {
            for (level, allowed) in &options.value_allowlists {
                if let Some(values) = movie.attributes.get_mut(level) {
                    values.retain(|v| allowed.contains(v));
                }
            }
        }

        let mut coverage: BTreeMap<(Level, &str), usize> = BTreeMap::new();
        for movie in &movies {
            for (level, values) in &movie.attributes {
                for v in values {
                    *coverage.entry((*level, v.as_str())).or_default() += 1;
                }
            }
        }
        let bound = options.min_tag_fraction * movies.len() as f64;
        let pruned: BTreeSet<(Level, String)> = coverage
            .into_iter()
            .filter(|&(_, count)| (count as f64) + 1e-9 < bound)
            .map(|((level, value), _)| (level, value.to_string()))
            .collect();
        for movie in &mut movies {
            for (level, values) in movie.attributes.iter_mut() {
                values.retain(|v| !pruned.contains(&(*level, v.clone())));
            }
            movie.attributes.retain(|_, values| !values.is_empty());
        }
        report.pruned_entities.extend(pruned);

        movies.retain(|m| {
            let keep = !m.attributes.is_empty();
            if !keep {
                report.dropped_movies.push(m.id.clone());
            }
            keep
        });

        if movies == before {
            break;
        }
    }

    let out = Catalog::new(movies, catalog.provenance.clone())?;
    // Entities that were pruned in an early pass but survive the fixpoint are
    // not reported as pruned.
    report
        .pruned_entities
        .retain(|(level, value)| !out.movies.iter().any(|m| m.has(*level, value)));
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_movie_doc() -> &'static str {
        r#"{"movies": [
            {"id": "m1", "title": "One", "release_year": 1994,
             "attributes": {"genre": ["Drama"], "actor": ["A", "B"]}},
            {"id": "m2", "title": "Two", "release_year": null,
             "attributes": {"director": ["D"], "music_composer": ["C"]}}
        ]}"#
    }

    #[test]
    fn loads_two_records() {
        let loaded = parse_catalog(two_movie_doc(), "test").unwrap();
        let c = loaded.value;
        assert_eq!(c.len(), 2);
        assert!(loaded.warnings.is_empty());
        let m1 = c.get("m1").unwrap();
        assert_eq!(m1.release_year, Some(1994));
        assert!(m1.has(Level::Actor, "B"));
        assert_eq!(c.get("m2").unwrap().release_year, None);
    }

    #[test]
    fn duplicate_id_is_named() {
        let doc = r#"{"movies": [
            {"id": "m1", "title": "One", "attributes": {}},
            {"id": "m1", "title": "Again", "attributes": {}}
        ]}"#;
        match parse_catalog(doc, "t") {
            Err(CatalogError::DuplicateId(id)) => assert_eq!(id, "m1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_movie_list_is_rejected() {
        let err = parse_catalog(r#"{"movies": []}"#, "t").unwrap_err();
        assert!(matches!(err, CatalogError::Empty));
        assert_eq!(err.to_string(), "empty catalog");
    }

    #[test]
    fn malformed_document_reports_position() {
        let doc = "{\"movies\": [\n  {\"id\": \"m1\", \"title\": }\n]}";
        match parse_catalog(doc, "t") {
            Err(CatalogError::Parse { line, column, .. }) => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_levels_and_era_are_ignored_with_warnings() {
        let doc = r#"{"movies": [
            {"id": "m1", "title": "One", "release_year": 2001, "runtime": 120,
             "attributes": {"era": ["1950s"], "producer": ["P"], "genre": ["G", ""]}}
        ]}"#;
        let loaded = parse_catalog(doc, "t").unwrap();
        assert_eq!(loaded.warnings.len(), 4, "{:?}", loaded.warnings);
        let m = loaded.value.get("m1").unwrap();
        assert!(!m.attributes.contains_key(&Level::Era));
        assert_eq!(m.values(Level::Genre).collect::<Vec<_>>(), vec!["G"]);
    }

    #[test]
    fn early_years_are_rejected_on_load() {
        let doc = r#"{"movies": [{"id": "m1", "title": "Old", "release_year": 1700}]}"#;
        assert!(matches!(
            parse_catalog(doc, "t"),
            Err(CatalogError::YearOutOfRange(1700))
        ));
    }

    #[test]
    fn era_labels() {
        assert_eq!(derive_era(1994).unwrap(), "1990s");
        assert_eq!(derive_era(2000).unwrap(), "2000s");
        assert_eq!(derive_era(1800).unwrap(), "1800s");
        assert!(derive_era(1799).is_err());
    }

    fn catalog_with(n: usize, decorate: impl Fn(usize, MovieRecord) -> MovieRecord) -> Catalog {
        let movies = (0..n)
            .map(|i| {
                let m = MovieRecord::new(format!("m{i:03}"), format!("Movie {i}"), Some(1990))
                    .with(Level::Genre, &["Common"]);
                decorate(i, m)
            })
            .collect();
        Catalog::new(movies, "fixture").unwrap()
    }

    #[test]
    fn sparse_director_is_pruned_everywhere() {
        // 5 of 200 movies = 2.5%
        let c = catalog_with(200, |i, m| if i < 5 { m.with(Level::Director, &["X"]) } else { m });
        let out = preprocess(&c, &PreprocessOptions::default()).unwrap();
        assert_eq!(out.len(), 200);
        assert!(out.movies().iter().all(|m| !m.has(Level::Director, "X")));
    }

    #[test]
    fn exact_threshold_is_kept() {
        // 1 of 10 = 10%, strictly-less rule keeps it
        let c = catalog_with(10, |i, m| if i == 0 { m.with(Level::Genre, &["G"]) } else { m });
        let out = preprocess(&c, &PreprocessOptions::default()).unwrap();
        assert!(out.get("m000").unwrap().has(Level::Genre, "G"));
    }

    #[test]
    fn allowlist_filters_subject_values() {
        let c = catalog_with(1, |_, m| {
            m.with(Level::Subject, &["Indian crime films", "circus films"])
        });
        let mut options = PreprocessOptions::default();
        options
            .value_allowlists
            .insert(Level::Subject, BTreeSet::from(["Indian crime films".to_string()]));
        let out = preprocess(&c, &options).unwrap();
        let subjects: Vec<_> = out.get("m000").unwrap().values(Level::Subject).collect();
        assert_eq!(subjects, vec!["Indian crime films"]);
    }

    #[test]
    fn era_is_derived_before_pruning() {
        let c = catalog_with(4, |i, mut m| {
            if i == 3 {
                m.release_year = Some(2011);
            }
            m
        });
        let options = PreprocessOptions {
            min_tag_fraction: 0.5,
            ..Default::default()
        };
        let out = preprocess(&c, &options).unwrap();
        assert!(out.get("m000").unwrap().has(Level::Era, "1990s"));
        // 2010s covers 1 of 4 < 50%
        assert!(!out.get("m003").unwrap().has(Level::Era, "2010s"));
    }

    #[test]
    fn overrides_rescue_sparse_values() {
        let c = catalog_with(10, |i, m| if i == 0 { m.with(Level::Director, &["Y"]) } else { m });
        let options = PreprocessOptions {
            min_tag_fraction: 0.2,
            overrides: vec![Override {
                movie_id: "m001".into(),
                level: Level::Director,
                values: BTreeSet::from(["Y".to_string()]),
            }],
            ..Default::default()
        };
        let out = preprocess(&c, &options).unwrap();
        assert!(out.get("m000").unwrap().has(Level::Director, "Y"));
        assert!(out.get("m001").unwrap().has(Level::Director, "Y"));
    }

    #[test]
    fn override_for_unknown_movie_fails() {
        let c = catalog_with(2, |_, m| m);
        let options = PreprocessOptions {
            overrides: vec![Override {
                movie_id: "nope".into(),
                level: Level::Actor,
                values: BTreeSet::from(["A".to_string()]),
            }],
            ..Default::default()
        };
        assert!(matches!(
            preprocess(&c, &options),
            Err(CatalogError::UnknownOverrideMovie(id)) if id == "nope"
        ));
    }

    #[test]
    fn movies_without_surviving_attributes_are_dropped() {
        let mut movies: Vec<MovieRecord> = (0..9)
            .map(|i| MovieRecord::new(format!("m{i}"), "T", None).with(Level::Genre, &["G"]))
            .collect();
        movies.push(MovieRecord::new("lonely", "T", None).with(Level::Actor, &["Solo"]));
        let c = Catalog::new(movies, "t").unwrap();
        let (out, report) = preprocess_with_report(
            &c,
            &PreprocessOptions {
                min_tag_fraction: 0.5,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(out.len(), 9);
        assert_eq!(report.dropped_movies, vec!["lonely".to_string()]);
    }

    #[test]
    fn fraction_out_of_range_is_invalid() {
        let c = catalog_with(2, |_, m| m);
        let options = PreprocessOptions {
            min_tag_fraction: 1.5,
            ..Default::default()
        };
        assert!(matches!(preprocess(&c, &options), Err(CatalogError::InvalidOptions(_))));
    }

    #[test]
    fn write_then_parse_preserves_non_era_attributes() {
        let c = parse_catalog(two_movie_doc(), "t").unwrap().value;
        let pre = preprocess(
            &c,
            &PreprocessOptions {
                min_tag_fraction: 0.0,
                ..Default::default()
            },
        )
        .unwrap();
        let mut buf = Vec::new();
        write_catalog(&pre, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.contains("\"era\""));
        let back = parse_catalog(&text, "t").unwrap().value;
        assert_eq!(back, c);
    }

    #[test]
    fn overrides_document() {
        let doc =
            r#"{"movies": [{"id": "m2", "title": "ignored", "attributes": {"director": ["Z"], "era": ["1990s"]}}]}"#;
        let loaded = parse_overrides(doc).unwrap();
        assert_eq!(loaded.value.len(), 1);
        assert_eq!(loaded.value[0].level, Level::Director);
        assert_eq!(loaded.warnings.len(), 2);
    }
}
