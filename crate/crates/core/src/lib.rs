//! Environment lifecycle, message model and the bundled text games.
//!
//! An [`Env`] wraps one game instance behind a five-call loop: [`Env::make`],
//! [`Env::reset`], [`Env::get_observation`], [`Env::step`] and [`Env::close`].

pub mod action;
pub mod env;
pub mod game;
pub mod games;
pub mod message;
pub mod outcome;
pub mod record;
pub mod registry;
pub mod seed;
pub mod skills;
pub mod words;
pub mod wrappers;

pub use action::{parse_bracketed_action, ParseError};
pub use env::{Env, EnvError, StepResult};
pub use game::{ActionGrammar, Game, GameError, GameRules, LegalActions};
pub use message::{Message, Observation, Sender, Visibility};
pub use outcome::{outcome_rewards, rank_rewards, Ranking, Rewards, TerminalInfo, TerminalKind};
pub use record::{MatchRecord, RatingChange, RatingPoint, TurnRecord};
pub use registry::{create_game, registry, GameSpec, Registry};
pub use seed::{mix_seed, SeedStreams};
pub use skills::{Skill, SkillTable};
pub use wrappers::{LlmObservationWrapper, ObservationWrapper, ValidActionsWrapper};
