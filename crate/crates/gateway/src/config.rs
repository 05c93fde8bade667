//! Application configuration: defaults, then an optional TOML file, then
//! `TWENTYQ_*` environment variables, then command-line flags.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context};
use clap::Args;
use serde::{Deserialize, Serialize};
use twentyq_core::catalog::PreprocessOptions;
use twentyq_core::{EngineConfig, EstimatorConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub catalog: PathBuf,
    pub stats: PathBuf,
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub mean_offset: f64,
    pub smoothing: f64,
    pub max_questions: u32,
    pub guess_size: usize,
    pub guess_threshold: f64,
    pub min_tag_fraction: f64,
    pub listen: String,
    /// Seconds of inactivity after which an HTTP game is discarded.
    pub session_idle_secs: u64,
}

impl Default for AppConfig {
    fn default() -> Self {
        let estimator = EstimatorConfig::default();
        let engine = EngineConfig::default();
        AppConfig {
            catalog: PathBuf::from("data/reference_catalog.json"),
            stats: PathBuf::from("data/stats.json"),
            alpha: estimator.alpha,
            beta: estimator.beta,
            sigma: estimator.sigma,
            mean_offset: estimator.mean_offset,
            smoothing: estimator.smoothing,
            max_questions: engine.max_questions,
            guess_size: engine.guess_size,
            guess_threshold: engine.guess_threshold,
            min_tag_fraction: PreprocessOptions::default().min_tag_fraction,
            listen: "127.0.0.1:8080".to_string(),
            session_idle_secs: 1800,
        }
    }
}

/// Flags shared by every subcommand. Each one can also come from the
/// environment variable named after it.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// TOML file with any of the keys below.
    #[arg(long, global = true, env = "TWENTYQ_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = "TWENTYQ_CATALOG")]
    pub catalog: Option<PathBuf>,
    #[arg(long, global = true, env = "TWENTYQ_STATS")]
    pub stats: Option<PathBuf>,
    #[arg(long, global = true, env = "TWENTYQ_ALPHA")]
    pub alpha: Option<f64>,
    #[arg(long, global = true, env = "TWENTYQ_BETA")]
    pub beta: Option<f64>,
    #[arg(long, global = true, env = "TWENTYQ_SIGMA")]
    pub sigma: Option<f64>,
    #[arg(long, global = true, env = "TWENTYQ_MEAN_OFFSET")]
    pub mean_offset: Option<f64>,
    #[arg(long, global = true, env = "TWENTYQ_SMOOTHING")]
    pub smoothing: Option<f64>,
    #[arg(long, global = true, env = "TWENTYQ_MAX_QUESTIONS")]
    pub max_questions: Option<u32>,
    #[arg(long, global = true, env = "TWENTYQ_GUESS_SIZE")]
    pub guess_size: Option<usize>,
    #[arg(long, global = true, env = "TWENTYQ_GUESS_THRESHOLD")]
    pub guess_threshold: Option<f64>,
    #[arg(long, global = true, env = "TWENTYQ_MIN_TAG_FRACTION")]
    pub min_tag_fraction: Option<f64>,
    #[arg(long, global = true, env = "TWENTYQ_LISTEN")]
    pub listen: Option<String>,
    #[arg(long, global = true, env = "TWENTYQ_SESSION_IDLE_SECS")]
    pub session_idle_secs: Option<u64>,
}

macro_rules! overlay {
    ($cfg:ident, $args:ident, $($field:ident),+) => {
        $(if let Some(v) = $args.$field.clone() { $cfg.$field = v; })+
    };
}

impl AppConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn resolve(args: &ConfigArgs) -> anyhow::Result<Self> {
        let mut cfg = match &args.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
                Self::from_toml(&text).with_context(|| format!("parsing config {}", path.display()))?
            }
            None => AppConfig::default(),
        };
        overlay!(
            cfg,
            args,
            catalog,
            stats,
            alpha,
            beta,
            sigma,
            mean_offset,
            smoothing,
            max_questions,
            guess_size,
            guess_threshold,
            min_tag_fraction,
            listen,
            session_idle_secs
        );
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn estimator(&self) -> EstimatorConfig {
        EstimatorConfig {
            alpha: self.alpha,
            beta: self.beta,
            sigma: self.sigma,
            mean_offset: self.mean_offset,
            smoothing: self.smoothing,
        }
    }

    pub fn engine(&self) -> EngineConfig {
        EngineConfig {
            estimator: self.estimator(),
            max_questions: self.max_questions,
            guess_size: self.guess_size,
            guess_threshold: self.guess_threshold,
            ..EngineConfig::default()
        }
    }

    pub fn preprocess_options(&self) -> PreprocessOptions {
        PreprocessOptions {
            min_tag_fraction: self.min_tag_fraction,
            ..PreprocessOptions::default()
        }
    }

    pub fn session_idle(&self) -> Duration {
        Duration::from_secs(self.session_idle_secs)
    }

    pub fn listen_addr(&self) -> anyhow::Result<SocketAddr> {
        self.listen
            .parse()
            .with_context(|| format!("listen address `{}`", self.listen))
    }

    /// Numeric ranges only; paths are checked by [`AppConfig::check_paths`].
    pub fn validate(&self) -> anyhow::Result<()> {
        self.engine().validate()?;
        self.preprocess_options().validate()?;
        self.listen_addr()?;
        if self.session_idle_secs == 0 {
            bail!("session_idle_secs must be at least 1");
        }
        Ok(())
    }

    /// The catalog must be readable and the stats file, if absent, creatable.
    pub fn check_paths(&self) -> anyhow::Result<()> {
        std::fs::File::open(&self.catalog)
            .with_context(|| format!("catalog {} is not readable", self.catalog.display()))?;
        if self.stats.exists() {
            std::fs::File::open(&self.stats)
                .with_context(|| format!("stats {} is not readable", self.stats.display()))?;
        } else {
            let dir = parent_dir(&self.stats);
            if !dir.is_dir() {
                bail!("stats directory {} does not exist", dir.display());
            }
        }
        Ok(())
    }
}

pub(crate) fn parent_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}
