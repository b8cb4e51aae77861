//! The per-game rule machine contract.

use std::fmt::Debug;

use thiserror::Error;

use crate::message::{Message, Visibility};
use crate::outcome::{Ranking, TerminalInfo};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("illegal action {token:?}: {reason}")]
    IllegalAction { token: String, reason: String },
    #[error("game is already over")]
    Terminal,
    #[error("player {got} acted out of turn (expected {expected})")]
    NotYourTurn { expected: usize, got: usize },
    #[error("{env_id} seats {min}..={max} players, got {got}")]
    PlayerCountOutOfRange {
        env_id: String,
        min: usize,
        max: usize,
        got: usize,
    },
}

impl GameError {
    pub fn illegal(token: &str, reason: impl Into<String>) -> Self {
        GameError::IllegalAction {
            token: token.to_owned(),
            reason: reason.into(),
        }
    }
}

/// How the environment extracts a token from raw agent output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionGrammar {
    /// Last `[...]` group.
    Bracketed,
    /// The whole trimmed utterance.
    FreeText,
}

/// The legal moves for the seat to act.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LegalActions {
    /// The exact legal token set, in a stable order.
    Finite(Vec<String>),
    /// An open action space; `samples` are guaranteed legal, other tokens
    /// are checked by [`Game::validate`].
    Open { samples: Vec<String> },
}

impl LegalActions {
    pub fn candidates(&self) -> &[String] {
        match self {
            LegalActions::Finite(v) => v,
            LegalActions::Open { samples } => samples,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, LegalActions::Finite(_))
    }
}

/// Static description of a registered environment.
#[derive(Debug, Clone)]
pub struct GameRules {
    pub env_id: &'static str,
    pub min_players: usize,
    pub max_players: usize,
    /// Hard cap on environment steps; reaching it ends the game as `turn_limit`.
    pub turn_limit: usize,
    /// Whether a two-seat game can end level (used for draw-margin calibration).
    pub draws_possible: bool,
    pub description: &'static str,
    pub action_format: &'static str,
}

impl GameRules {
    pub fn accepts(&self, players: usize) -> bool {
        (self.min_players..=self.max_players).contains(&players)
    }

    pub fn rules_text(&self) -> String {
        format!("{}\nActions: {}", self.description, self.action_format)
    }
}

/// A deterministic turn-based rule machine.
///
/// Games are pure state machines: the environment owns the message log,
/// invalid-move handling and the global turn cap.
pub trait Game: Debug + Send + Sync + GameClone {
    fn num_players(&self) -> usize;

    /// Seat whose action is required next. Meaningless once terminal.
    fn to_move(&self) -> usize;

    fn legal_actions(&self) -> Result<LegalActions, GameError>;

    /// Advances the state. On error the state is left unchanged.
    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError>;

    /// Fixed-width text depiction hiding what `viewer` cannot see.
    fn render(&self, viewer: usize) -> String;

    fn terminal(&self) -> Option<&TerminalInfo>;

    /// Current ordering of seats (best first), used when the environment ends
    /// a game early.
    fn standing(&self) -> Ranking;

    fn grammar(&self) -> ActionGrammar {
        ActionGrammar::Bracketed
    }

    /// Who sees the raw utterance of `player`. Simultaneous-move games keep
    /// submissions private until resolution.
    fn action_visibility(&self, _player: usize) -> Visibility {
        Visibility::Broadcast
    }

    fn validate(&self, player: usize, token: &str) -> Result<(), GameError> {
        let mut probe = self.clone_box();
        probe.apply(player, token).map(|_| ())
    }
}

pub trait GameClone {
    fn clone_box(&self) -> Box<dyn Game>;
}

impl<T> GameClone for T
where
    T: Game + Clone + 'static,
{
    fn clone_box(&self) -> Box<dyn Game> {
        Box::new(self.clone())
    }
}

impl Clone for Box<dyn Game> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

pub(crate) fn ensure_turn(game: &dyn Game, player: usize) -> Result<(), GameError> {
    if game.terminal().is_some() {
        return Err(GameError::Terminal);
    }
    let expected = game.to_move();
    if expected != player {
        return Err(GameError::NotYourTurn {
            expected,
            got: player,
        });
    }
    Ok(())
}

/// Sorts seats into ranking groups by a key, higher key first.
pub(crate) fn rank_by_key<K: PartialOrd + Copy>(keys: &[K]) -> Ranking {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[b].partial_cmp(&keys[a]).unwrap_or(std::cmp::Ordering::Equal));
    let mut out: Ranking = Vec::new();
    for seat in order {
        match out.last_mut() {
            Some(group) if keys[group[0]] == keys[seat] => group.push(seat),
            _ => out.push(vec![seat]),
        }
    }
    out
}
