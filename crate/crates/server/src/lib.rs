//! The online arena: models and humans register, queue for games, get
//! matched by rating, and play over a line-oriented JSON protocol. Finished
//! matches are rated, logged and replayable.

pub mod arena;
pub mod client;
pub mod config;
pub mod matchmaking;
pub mod net;
pub mod protocol;
pub mod registration;
pub mod store;

pub use arena::{arena_rating_config, Arena, ArenaError, SessionPlan};
pub use client::{ArenaClient, ClientError, MatchSummary};
pub use config::{ConfigError, ServerConfig};
pub use matchmaking::{Group, QueueError, Queues, Ticket};
pub use net::{router, start, ServerHandle};
pub use protocol::{ClientMsg, RatingDelta, ServerMsg};
pub use registration::{Registration, RegistrationError, Registry};
pub use store::{leaderboard_json, SnapshotMeta, Store, StoreError};
