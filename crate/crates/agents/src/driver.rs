//! Plays one match locally and returns its record.

use std::time::Instant;

use arena_core::{
    parse_bracketed_action, ActionGrammar, Env, EnvError, MatchRecord, TurnRecord, ValidActionsWrapper,
};
use thiserror::Error;

use crate::{Agent, AgentError, Turn};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DriverError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("seat {seat}: {source}")]
    Agent { seat: usize, source: AgentError },
    #[error("{agents} agents given but {names} participant names")]
    NameCount { agents: usize, names: usize },
}

#[derive(Debug, Clone)]
pub struct MatchOptions {
    pub match_id: String,
    /// Rated entity per seat; defaults to the agents' names.
    pub participants: Option<Vec<String>>,
    /// Render the whole visible history plus the valid-action list, as an
    /// LLM would see it. Off gives the bare message log.
    pub llm_view: bool,
    /// Off keeps records byte-identical across runs.
    pub record_wall_time: bool,
    /// Turn any agent failure into a forfeit instead of aborting the match.
    /// Clock expiry always forfeits.
    pub forfeit_on_agent_error: bool,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            match_id: "local".into(),
            participants: None,
            llm_view: true,
            record_wall_time: false,
            forfeit_on_agent_error: false,
        }
    }
}

/// The token the environment will extract from `raw`, if any.
pub fn extract_token(grammar: ActionGrammar, raw: &str) -> Option<String> {
    match grammar {
        ActionGrammar::Bracketed => parse_bracketed_action(raw).ok(),
        ActionGrammar::FreeText => Some(raw.trim().to_owned()).filter(|t| !t.is_empty()),
    }
}

/// Seat `i` is played by `agents[i]`.
pub fn play_match<A: Agent + ?Sized>(
    env_id: &str,
    seed: u64,
    agents: &mut [Box<A>],
    opts: &MatchOptions,
) -> Result<MatchRecord, DriverError> {
    let participants = match &opts.participants {
        Some(names) if names.len() != agents.len() => {
            return Err(DriverError::NameCount {
                agents: agents.len(),
                names: names.len(),
            })
        }
        Some(names) => names.clone(),
        None => agents.iter().map(|a| a.name().to_owned()).collect(),
    };
    let mut env = Env::make(&[env_id], seed)?;
    if opts.llm_view {
        env = env.wrap_llm_observation()?.wrap(ValidActionsWrapper::default())?;
    }
    env.reset(agents.len())?;
    let mut turns = Vec::new();
    while !env.is_done() {
        let (seat, obs) = env.get_observation()?;
        let text = obs.text();
        let legal = env.legal_actions().ok();
        let grammar = env.game()?.grammar();
        let turn = Turn {
            env_id,
            seat,
            observation: &text,
            legal: legal.as_ref(),
            grammar,
        };
        let started = Instant::now();
        let answer = agents[seat].act(&turn);
        let wall_ms = if opts.record_wall_time {
            started.elapsed().as_millis() as u64
        } else {
            0
        };
        match answer {
            Ok(raw) => {
                let parsed_token = extract_token(grammar, &raw);
                env.step(&raw)?;
                turns.push(TurnRecord {
                    seat,
                    observation: text,
                    raw_action: Some(raw),
                    parsed_token,
                    wall_ms,
                });
            }
            Err(e) if e.is_forfeit() || opts.forfeit_on_agent_error => {
                env.forfeit(seat, &e.to_string())?;
                turns.push(TurnRecord {
                    seat,
                    observation: text,
                    raw_action: None,
                    parsed_token: None,
                    wall_ms,
                });
            }
            Err(source) => return Err(DriverError::Agent { seat, source }),
        }
    }
    Ok(MatchRecord {
        match_id: opts.match_id.clone(),
        env_id: env.env_id().to_owned(),
        seed,
        num_players: agents.len(),
        participants,
        turns,
        rewards: env.close()?,
        ratings: Vec::new(),
    })
}
