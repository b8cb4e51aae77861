//! Scripted optimal Nim play.

use crate::{Agent, AgentError, Turn};

/// Plays the nim-sum strategy. Pile sizes are read back from the legal move
/// list (`"pile count"` tokens), so the agent also works from text alone when
/// the observation lists valid actions.
#[derive(Debug, Clone)]
pub struct NimPerfectAgent {
    name: String,
}

impl NimPerfectAgent {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into() }
    }
}

fn piles_from(tokens: &[String]) -> Option<Vec<u32>> {
    let mut piles: Vec<u32> = Vec::new();
    for t in tokens {
        let mut it = t.split_whitespace().map(str::parse::<u32>);
        let (Some(Ok(pile)), Some(Ok(count)), None) = (it.next(), it.next(), it.next()) else {
            return None;
        };
        let pile = pile as usize;
        if piles.len() <= pile {
            piles.resize(pile + 1, 0);
        }
        piles[pile] = piles[pile].max(count);
    }
    Some(piles)
}

/// A move to a zero nim-sum, or taking one object from the first nonempty
/// pile when the position is already lost.
pub fn best_move(piles: &[u32]) -> Option<(usize, u32)> {
    let sum = piles.iter().fold(0, |acc, &p| acc ^ p);
    if sum != 0 {
        if let Some((i, &p)) = piles.iter().enumerate().find(|(_, &p)| p ^ sum < p) {
            return Some((i, p - (p ^ sum)));
        }
    }
    piles.iter().position(|&p| p > 0).map(|i| (i, 1))
}

impl Agent for NimPerfectAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn description(&self) -> &str {
        "optimal Nim play by nim-sum"
    }

    fn act(&mut self, turn: &Turn<'_>) -> Result<String, AgentError> {
        let tokens = turn.candidates().ok_or(AgentError::NoCandidates)?;
        let piles = piles_from(&tokens).ok_or(AgentError::NoCandidates)?;
        let (pile, count) = best_move(&piles).ok_or(AgentError::NoCandidates)?;
        Ok(turn.emit(&format!("{pile} {count}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moves_to_zero_nim_sum() {
        assert_eq!(best_move(&[3, 4, 5]), Some((0, 2)));
        assert_eq!(best_move(&[0, 0, 1]), Some((2, 1)));
        assert_eq!(best_move(&[1, 1]), Some((0, 1)));
        assert_eq!(best_move(&[0, 0]), None);
    }

    #[test]
    fn reads_piles_from_tokens() {
        let tokens: Vec<String> = ["0 1", "0 2", "2 1"].map(String::from).to_vec();
        assert_eq!(piles_from(&tokens), Some(vec![2, 0, 1]));
        assert_eq!(piles_from(&["x".to_owned()]), None);
    }
}
