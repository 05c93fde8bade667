//! Front ends for the twentyq engine: a terminal game, batch commands, and
//! an HTTP session API.

pub mod api;
pub mod cli;
pub mod config;
pub mod game;
pub mod play;
pub mod store;

pub use api::{router, AppState};
pub use config::{AppConfig, ConfigArgs};
pub use store::StatsStore;
