//! Skill estimation for arena participants: TrueSkill with an adjacent-rank
//! chain for multiplayer matches, a logistic Elo baseline, the leaderboard
//! that folds every human into one entity, and per-skill profiles.

use thiserror::Error;

pub mod elo;
pub mod leaderboard;
pub mod profile;
pub mod report;
pub mod trueskill;

pub use elo::{elo_expectation, update_elo, EloUpdate};
pub use leaderboard::{Competitor, Entry, EntityChange, Leaderboard, MatchResult, RatedStat, HUMANITY};
pub use profile::{normalize_skills, skill_profile, skill_profiles, SkillProfile};
pub use report::{
    leaderboard_rows, profile_rows, read_leaderboard_csv, read_profiles_csv, write_leaderboard_csv, write_profiles_csv,
    LeaderboardRow, ProfileRow,
    ReportError,
};
pub use trueskill::{
    draw_margin_for, init_rating, two_player_shifts, update_multiplayer, update_two_player, Rating, RatingConfig, Shift,
    MU0, SIGMA0,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RatingError {
    #[error("rating inputs must be finite with sigma > 0")]
    NonFiniteInput,
    #[error("a rated match needs at least 2 participants, got {0}")]
    TooFewPlayers(usize),
    #[error("invalid rating config: {0}")]
    InvalidConfig(String),
    #[error("participant has no rated environments")]
    NoRatedEnvironments,
    #[error("invalid match result: {0}")]
    InvalidMatch(String),
}
