//! Persisted match trajectories and their replay.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{Env, EnvError};
use crate::outcome::Rewards;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatingPoint {
    pub mu: f64,
    pub sigma: f64,
}

/// Rating of one seat's rated entity before and after the match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingChange {
    pub global_before: RatingPoint,
    pub global_after: RatingPoint,
    pub env_before: RatingPoint,
    pub env_after: RatingPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub seat: usize,
    pub observation: String,
    /// `None` when the seat produced nothing (clock expiry, disconnect).
    pub raw_action: Option<String>,
    /// `None` when no token could be extracted.
    pub parsed_token: Option<String>,
    /// Milliseconds the seat took to answer.
    pub wall_ms: u64,
}

/// One completed match, sufficient to replay its rewards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub match_id: String,
    pub env_id: String,
    pub seed: u64,
    pub num_players: usize,
    /// Rated entity per seat.
    pub participants: Vec<String>,
    pub turns: Vec<TurnRecord>,
    pub rewards: Rewards,
    /// Per seat, aligned with `participants`. Empty when the match was unrated.
    #[serde(default)]
    pub ratings: Vec<RatingChange>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplayError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("turn {index}: recorded seat {recorded}, environment expects {actual}")]
    SeatMismatch {
        index: usize,
        recorded: usize,
        actual: usize,
    },
    #[error("record ends before the game does")]
    Truncated,
    #[error("game ended at turn {0} but the record continues")]
    Overlong(usize),
}

impl MatchRecord {
    /// Re-runs the seed and tokens through the bundled games and returns the
    /// rewards the environment produces.
    pub fn replay(&self) -> Result<Rewards, ReplayError> {
        let mut env = Env::make(&[self.env_id.as_str()], self.seed)?;
        env.reset(self.num_players)?;
        for (index, turn) in self.turns.iter().enumerate() {
            if env.is_done() {
                return Err(ReplayError::Overlong(index));
            }
            let (actual, _) = env.get_observation()?;
            if actual != turn.seat {
                return Err(ReplayError::SeatMismatch {
                    index,
                    recorded: turn.seat,
                    actual,
                });
            }
            match (&turn.parsed_token, &turn.raw_action) {
                (Some(token), _) => env.step_token(token)?,
                (None, Some(raw)) => env.step(raw)?,
                (None, None) => env.forfeit(turn.seat, "no action")?,
            };
        }
        if !env.is_done() {
            return Err(ReplayError::Truncated);
        }
        Ok(env.close()?)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}
