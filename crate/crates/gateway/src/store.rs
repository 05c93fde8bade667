//! Learned statistics on disk.

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use tempfile::NamedTempFile;
use twentyq_core::catalog::{parse_catalog, preprocess_with_report};
use twentyq_core::{Knowledge, LearnedStats};

use crate::config::{parent_dir, AppConfig};

#[derive(Debug)]
pub struct StatsStore {
    path: PathBuf,
    stats: LearnedStats,
}

impl StatsStore {
    /// A missing file is an empty store.
    pub fn open(path: impl Into<PathBuf>) -> anyhow::Result<Self> {
        let path = path.into();
        let stats = match File::open(&path) {
            Ok(f) => {
                LearnedStats::load(BufReader::new(f)).with_context(|| format!("loading stats {}", path.display()))?
            }
            Err(e) if e.kind() == ErrorKind::NotFound => LearnedStats::new(),
            Err(e) => return Err(e).with_context(|| format!("opening stats {}", path.display())),
        };
        Ok(StatsStore { path, stats })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn stats(&self) -> &LearnedStats {
        &self.stats
    }

    pub fn stats_mut(&mut self) -> &mut LearnedStats {
        &mut self.stats
    }

    pub fn replace(&mut self, stats: LearnedStats) {
        self.stats = stats;
    }

    /// Writes to a temporary file beside the target, then renames it over.
    pub fn persist(&self) -> anyhow::Result<()> {
        write_atomically(&self.path, |w| Ok(self.stats.save(w)?))
    }
}

pub fn write_atomically(
    path: &Path,
    fill: impl FnOnce(&mut BufWriter<&mut NamedTempFile>) -> anyhow::Result<()>,
) -> anyhow::Result<()> {
    let mut tmp = NamedTempFile::new_in(parent_dir(path))
        .with_context(|| format!("creating temporary file for {}", path.display()))?;
    {
        let mut w = BufWriter::new(&mut tmp);
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Reads, preprocesses, and indexes the configured catalog.
pub fn load_knowledge(config: &AppConfig) -> anyhow::Result<Knowledge> {
    let text = std::fs::read_to_string(&config.catalog)
        .with_context(|| format!("reading catalog {}", config.catalog.display()))?;
    let loaded = parse_catalog(&text, &config.catalog.display().to_string())?;
    for w in &loaded.warnings {
        tracing::warn!("{w}");
    }
    let (catalog, report) = preprocess_with_report(&loaded.value, &config.preprocess_options())?;
    tracing::info!(
        movies = catalog.len(),
        pruned = report.pruned_entities.len(),
        dropped = report.dropped_movies.len(),
        "catalog loaded"
    );
    Ok(Knowledge::new(catalog))
}
