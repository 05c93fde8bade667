//! Command-line surface.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand};
use twentyq_core::arena::{self, BirthYearModel};
use twentyq_core::catalog::{parse_allowlists, parse_catalog, parse_overrides, preprocess_with_report, write_catalog};
use twentyq_core::{BatchConfig, Strategy};

use crate::api::{router, AppState};
use crate::config::{AppConfig, ConfigArgs};
use crate::play::{play, PlayOptions, PlayResult};
use crate::store::{load_knowledge, write_atomically, StatsStore};

#[derive(Debug, Parser)]
#[command(name = "twentyq", version, about = "Movie guessing game in twenty questions")]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play in the terminal.
    Play {
        #[arg(long)]
        birth_year: Option<i32>,
        /// Print the full transcript at the end.
        #[arg(long)]
        verbose: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the HTTP API.
    Serve,
    /// Validate and preprocess a raw catalog, then write the normalized file.
    Ingest {
        /// Raw catalog; defaults to the configured catalog.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        /// JSON file of per-movie attribute corrections.
        #[arg(long)]
        overrides: Option<PathBuf>,
        /// JSON map from level to permitted values.
        #[arg(long)]
        allowlists: Option<PathBuf>,
    },
    /// Pre-train the statistics file with simulated truthful games.
    Warmup {
        #[arg(long, default_value_t = 50)]
        games: usize,
        #[arg(long, default_value_t = 50)]
        seed: u64,
    },
    /// Compare strategies against simulated players.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = Strategy::ALL.to_vec())]
        strategies: Vec<Strategy>,
        #[arg(long, default_value_t = 50)]
        movies: usize,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, default_value_t = 0.1)]
        error_rate: f64,
        #[arg(long, default_value_t = 0.05)]
        maybe_rate: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Simulated players report no birth year.
        #[arg(long)]
        no_birth_year: bool,
        /// Warm-up games played on a copy of the statistics first.
        #[arg(long, default_value_t = 0)]
        warmup: usize,
        /// Write the JSON report here instead of printing it.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let config = AppConfig::resolve(&cli.config)?;
    match cli.command {
        Command::Play {
            birth_year,
            verbose,
            seed,
        } => cmd_play(&config, birth_year, verbose, seed),
        Command::Serve => cmd_serve(&config),
        Command::Ingest {
            input,
            output,
            overrides,
            allowlists,
        } => cmd_ingest(&config, input, &output, overrides, allowlists),
        Command::Warmup { games, seed } => cmd_warmup(&config, games, seed),
        Command::Bench {
            strategies,
            movies,
            repeats,
            error_rate,
            maybe_rate,
            seed,
            no_birth_year,
            warmup,
            report,
        } => {
            let batch = BatchConfig {
                strategies,
                n_movies: movies,
                repeats,
                error_rate,
                maybe_rate,
                seed,
                birth_years: if no_birth_year {
                    BirthYearModel::Unknown
                } else {
                    BirthYearModel::default()
                },
            };
            cmd_bench(&config, &batch, warmup, report)
        }
    }
}

fn cmd_play(config: &AppConfig, birth_year: Option<i32>, verbose: bool, seed: u64) -> anyhow::Result<()> {
    config.check_paths()?;
    let knowledge = load_knowledge(config)?;
    let mut store = StatsStore::open(&config.stats)?;
    let mut stats = store.stats().clone();
    let options = PlayOptions {
        birth_year,
        verbose,
        seed,
    };
    let stdin = std::io::stdin();
    let mut out = std::io::stdout();
    let result = play(
        &knowledge,
        &config.engine(),
        &mut stats,
        &options,
        &mut stdin.lock(),
        &mut out,
    )?;
    if let PlayResult::Solved { .. } = result {
        store.replace(stats);
        store.persist()?;
    }
    Ok(())
}

fn cmd_serve(config: &AppConfig) -> anyhow::Result<()> {
    config.check_paths()?;
    let addr = config.listen_addr()?;
    let knowledge = load_knowledge(config)?;
    let store = StatsStore::open(&config.stats)?;
    let idle = config.session_idle();
    let state = Arc::new(AppState::new(knowledge, config.engine(), store, idle));
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let sweeper = state.clone();
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(idle.min(std::time::Duration::from_secs(60)));
            loop {
                tick.tick().await;
                let dropped = sweeper.sweep();
                if dropped > 0 {
                    tracing::debug!(dropped, "expired idle games");
                }
            }
        });
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("binding {addr}"))?;
        tracing::info!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, router(state))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}

fn cmd_ingest(
    config: &AppConfig,
    input: Option<PathBuf>,
    output: &Path,
    overrides: Option<PathBuf>,
    allowlists: Option<PathBuf>,
) -> anyhow::Result<()> {
    let input = input.unwrap_or_else(|| config.catalog.clone());
    let read = |p: &PathBuf| std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()));
    let mut warnings = Vec::new();
    let loaded = parse_catalog(&read(&input)?, &input.display().to_string())?;
    warnings.extend(loaded.warnings);
    let mut options = config.preprocess_options();
    if let Some(p) = &overrides {
        let parsed = parse_overrides(&read(p)?)?;
        warnings.extend(parsed.warnings);
        options.overrides = parsed.value;
    }
    if let Some(p) = &allowlists {
        let parsed = parse_allowlists(&read(p)?)?;
        warnings.extend(parsed.warnings);
        options.value_allowlists = parsed.value;
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let (catalog, report) = preprocess_with_report(&loaded.value, &options)?;
    write_atomically(output, |w| Ok(write_catalog(&catalog, w)?))?;
    println!(
        "{} movies in, {} out ({} dropped); {} entities pruned in {} passes; wrote {}",
        loaded.value.len(),
        catalog.len(),
        report.dropped_movies.len(),
        report.pruned_entities.len(),
        report.passes,
        output.display()
    );
    Ok(())
}

fn cmd_warmup(config: &AppConfig, games: usize, seed: u64) -> anyhow::Result<()> {
    config.check_paths()?;
    let knowledge = load_knowledge(config)?;
    let mut store = StatsStore::open(&config.stats)?;
    let before = store.stats().games_recorded();
    let trained = arena::warmup(store.stats(), &knowledge, &config.engine(), games, seed)?;
    store.replace(trained);
    store.persist()?;
    println!(
        "{} of {games} warm-up games solved; {} elections recorded in {}",
        store.stats().games_recorded() - before,
        store.stats().games_recorded(),
        config.stats.display()
    );
    Ok(())
}

fn cmd_bench(config: &AppConfig, batch: &BatchConfig, warmup: usize, report: Option<PathBuf>) -> anyhow::Result<()> {
    config.check_paths()?;
    let knowledge = load_knowledge(config)?;
    let engine = config.engine();
    let store = StatsStore::open(&config.stats)?;
    let stats = arena::warmup(store.stats(), &knowledge, &engine, warmup, batch.seed)?;
    let metrics = arena::run_batch(&knowledge, &stats, &engine, batch)?;
    let mut out = std::io::stdout().lock();
    write!(out, "{}", metrics.render_table())?;
    match report {
        Some(path) => {
            write_atomically(&path, |w| Ok(w.write_all(metrics.to_json().as_bytes())?))?;
            writeln!(out, "report written to {}", path.display())?;
        }
        None => writeln!(out, "{}", metrics.to_json())?,
    }
    Ok(())
}
