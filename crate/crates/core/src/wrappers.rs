//! Stackable observation wrappers.
//!
//! Wrappers only change how an observation is rendered. They never see or
//! alter the acting seat, termination, or rewards.

use std::fmt::Debug;

use crate::game::{Game, LegalActions};
use crate::message::{render_history, Observation};

pub struct WrapContext<'a> {
    pub env_id: &'a str,
    pub game: &'a dyn Game,
}

pub trait ObservationWrapper: Debug + Send + Sync {
    fn name(&self) -> &'static str;
    fn transform(&self, obs: Observation, ctx: &WrapContext<'_>) -> Observation;
}

/// Renders the full visible history as one prompt, each message prefixed by
/// `[GAME]` or `[Player k]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LlmObservationWrapper;

impl ObservationWrapper for LlmObservationWrapper {
    fn name(&self) -> &'static str {
        "llm_observation"
    }

    fn transform(&self, mut obs: Observation, _ctx: &WrapContext<'_>) -> Observation {
        if obs.prompt.is_none() {
            obs.prompt = Some(render_history(&obs.messages));
        }
        obs
    }
}

/// Appends a `Valid actions:` line listing the legal tokens when the set is
/// finite and short enough to print.
#[derive(Debug, Clone, Copy)]
pub struct ValidActionsWrapper {
    pub max_listed: usize,
}

impl Default for ValidActionsWrapper {
    fn default() -> Self {
        Self { max_listed: 64 }
    }
}

pub const VALID_ACTIONS_PREFIX: &str = "Valid actions: ";

impl ObservationWrapper for ValidActionsWrapper {
    fn name(&self) -> &'static str {
        "valid_actions"
    }

    fn transform(&self, mut obs: Observation, ctx: &WrapContext<'_>) -> Observation {
        let Ok(LegalActions::Finite(tokens)) = ctx.game.legal_actions() else {
            return obs;
        };
        if tokens.is_empty() || tokens.len() > self.max_listed {
            return obs;
        }
        let line = format!(
            "{VALID_ACTIONS_PREFIX}{}",
            tokens
                .iter()
                .map(|t| format!("[{t}]"))
                .collect::<Vec<_>>()
                .join(", ")
        );
        let base = obs
            .prompt
            .take()
            .unwrap_or_else(|| render_history(&obs.messages));
        if base.lines().last() == Some(line.as_str()) {
            obs.prompt = Some(base);
        } else {
            obs.prompt = Some(format!("{base}\n{line}"));
        }
        obs
    }
}

/// Extracts the tokens from a `Valid actions:` line, if the text has one.
pub fn parse_valid_actions(text: &str) -> Option<Vec<String>> {
    let line = text
        .lines()
        .rev()
        .find_map(|l| l.strip_prefix(VALID_ACTIONS_PREFIX))?;
    let tokens: Vec<String> = line
        .split(", ")
        .filter_map(|t| t.strip_prefix('[').and_then(|t| t.strip_suffix(']')))
        .map(str::to_owned)
        .collect();
    (!tokens.is_empty()).then_some(tokens)
}
