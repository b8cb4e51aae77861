//! Operator tooling behind the `arena` binary: offline matches, round-robin
//! tournaments with cross tables, the rating-convergence simulation, and
//! CSV exports.

use thiserror::Error;

pub mod agent_spec;
pub mod convergence;
pub mod export;
pub mod play;
pub mod tournament;

pub use agent_spec::{AgentKind, AgentSpec};
pub use convergence::{kendall_tau, simulate_convergence, ConvergenceConfig, ConvergenceReport, SeedOutcome};
pub use export::{export_reports, ExportSummary};
pub use play::{roster_names, run_offline_match};
pub use tournament::{run_tournament, schedule, AgentRow, CrossTable, PairRow, ScheduledGame, SeatRow, TournamentOutcome, TournamentPlan};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, agent strings or input files.
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Driver(#[from] arena_agents::DriverError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Report(#[from] arena_rating::ReportError),
    #[error(transparent)]
    Rating(#[from] arena_rating::RatingError),
    #[error(transparent)]
    Store(#[from] arena_server::StoreError),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    /// 1 for configuration problems, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            _ => 2,
        }
    }
}

/// Checks that `env_id` exists and seats `players`.
pub fn check_env(env_id: &str, players: usize) -> Result<(), CliError> {
    let rules = arena_core::registry()
        .rules(env_id)
        .ok_or_else(|| CliError::Config(format!("unknown environment {env_id:?}")))?;
    if !rules.accepts(players) {
        return Err(CliError::Config(format!(
            "{env_id} seats {}..={} players, not {players}",
            rules.min_players, rules.max_players
        )));
    }
    Ok(())
}
