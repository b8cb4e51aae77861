//! Agents map an observation to action text. This crate has seeded
//! baselines, a chat-completion client, a relay that waits on a remote seat,
//! and the loop that plays one match and records it.

use arena_core::{ActionGrammar, LegalActions};
use thiserror::Error;

pub mod driver;
pub mod llm;
pub mod nim;
pub mod random;
pub mod relay;

pub use driver::{play_match, DriverError, MatchOptions};
pub use llm::{LlmAgent, LlmConfig};
pub use nim::NimPerfectAgent;
pub use random::RandomAgent;
pub use relay::{RelayAgent, RelayHandle, RelayInput};

/// What an agent gets to see on its turn.
#[derive(Debug, Clone, Copy)]
pub struct Turn<'a> {
    pub env_id: &'a str,
    pub seat: usize,
    pub observation: &'a str,
    /// Present when the agent runs next to the environment; remote seats
    /// only get the text.
    pub legal: Option<&'a LegalActions>,
    pub grammar: ActionGrammar,
}

impl<'a> Turn<'a> {
    pub fn text_only(env_id: &'a str, seat: usize, observation: &'a str) -> Self {
        Self {
            env_id,
            seat,
            observation,
            legal: None,
            grammar: ActionGrammar::Bracketed,
        }
    }

    /// Legal tokens from the environment, else from a `Valid actions:` line.
    pub fn candidates(&self) -> Option<Vec<String>> {
        match self.legal {
            Some(l) if !l.candidates().is_empty() => Some(l.candidates().to_vec()),
            _ => arena_core::wrappers::parse_valid_actions(self.observation),
        }
    }

    /// Formats a token the way this game expects it in raw output.
    pub fn emit(&self, token: &str) -> String {
        match self.grammar {
            ActionGrammar::Bracketed => format!("[{token}]"),
            ActionGrammar::FreeText => token.to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("no answer after {attempts} attempts: {last}")]
    Timeout { attempts: u32, last: String },
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("request rejected with status {status}: {body}")]
    Rejected { status: u16, body: String },
    #[error("turn clock expired")]
    TurnTimeout,
    #[error("cancelled")]
    Cancelled,
    #[error("no legal action could be determined from the observation")]
    NoCandidates,
    #[error("invalid agent configuration: {0}")]
    Config(String),
}

impl AgentError {
    /// Errors that cost the seat the game rather than aborting the match.
    pub fn is_forfeit(&self) -> bool {
        matches!(self, AgentError::TurnTimeout)
    }
}

pub trait Agent: Send {
    fn name(&self) -> &str;

    fn description(&self) -> &str {
        ""
    }

    fn act(&mut self, turn: &Turn<'_>) -> Result<String, AgentError>;
}

impl<A: Agent + ?Sized> Agent for Box<A> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn description(&self) -> &str {
        (**self).description()
    }

    fn act(&mut self, turn: &Turn<'_>) -> Result<String, AgentError> {
        (**self).act(turn)
    }
}
