use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Agent, AgentError, Turn};

/// Picks uniformly among the legal tokens. Same seed, same choices.
#[derive(Debug, Clone)]
pub struct RandomAgent {
    name: String,
    rng: ChaCha8Rng,
}

impl RandomAgent {
    pub fn new(name: impl Into<String>, seed: u64) -> Self {
        Self {
            name: name.into(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Agent for RandomAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn description(&self) -> &str {
        "uniformly random legal action"
    }

    fn act(&mut self, turn: &Turn<'_>) -> Result<String, AgentError> {
        let options = turn.candidates().ok_or(AgentError::NoCandidates)?;
        if options.is_empty() {
            return Err(AgentError::NoCandidates);
        }
        let pick = &options[self.rng.random_range(0..options.len())];
        Ok(turn.emit(pick))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use arena_core::{ActionGrammar, LegalActions};

    #[test]
    fn falls_back_to_listed_actions() {
        let obs = "[GAME] your move\nValid actions: [1 1]";
        let mut a = RandomAgent::new("r", 0);
        assert_eq!(a.act(&Turn::text_only("Nim-v0", 0, obs)).unwrap(), "[1 1]");
        assert_eq!(a.act(&Turn::text_only("Nim-v0", 0, "no list")), Err(AgentError::NoCandidates));
    }

    #[test]
    fn free_text_is_not_bracketed() {
        let legal = LegalActions::Open {
            samples: vec!["hello".into()],
        };
        let turn = Turn {
            legal: Some(&legal),
            grammar: ActionGrammar::FreeText,
            ..Turn::text_only("DontSayIt-v0", 0, "")
        };
        assert_eq!(RandomAgent::new("r", 1).act(&turn).unwrap(), "hello");
    }
}
