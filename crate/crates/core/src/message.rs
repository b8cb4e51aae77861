//! Sender-attributed text events and the per-viewer observations built from them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Who emitted a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sender {
    Game,
    Player(usize),
}

impl fmt::Display for Sender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sender::Game => f.write_str("[GAME]"),
            Sender::Player(id) => write!(f, "[Player {id}]"),
        }
    }
}

/// Which seats may see a message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Visibility {
    Broadcast,
    Players(BTreeSet<usize>),
}

impl Visibility {
    pub fn only(player: usize) -> Self {
        Visibility::Players(BTreeSet::from([player]))
    }

    pub fn includes(&self, viewer: usize) -> bool {
        match self {
            Visibility::Broadcast => true,
            Visibility::Players(set) => set.contains(&viewer),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub sender: Sender,
    pub content: String,
    pub visibility: Visibility,
}

impl Message {
    pub fn broadcast(content: impl Into<String>) -> Self {
        Self {
            sender: Sender::Game,
            content: content.into(),
            visibility: Visibility::Broadcast,
        }
    }

    pub fn private(player: usize, content: impl Into<String>) -> Self {
        Self {
            sender: Sender::Game,
            content: content.into(),
            visibility: Visibility::only(player),
        }
    }

    pub fn from_player(player: usize, content: impl Into<String>, visibility: Visibility) -> Self {
        Self {
            sender: Sender::Player(player),
            content: content.into(),
            visibility,
        }
    }

    /// Checks the message invariants against a seat count.
    pub fn is_well_formed(&self, seated: usize) -> bool {
        let visibility_ok = match &self.visibility {
            Visibility::Broadcast => true,
            Visibility::Players(set) => !set.is_empty() && set.iter().all(|&p| p < seated),
        };
        let sender_ok = match self.sender {
            Sender::Game => true,
            Sender::Player(p) => p < seated,
        };
        visibility_ok && sender_ok && !self.content.is_empty()
    }
}

/// The messages one seat may see, in emission order.
///
/// `prompt` is populated by rendering wrappers; without any wrapper it stays
/// `None` and [`Observation::text`] falls back to the history rendering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub viewer: usize,
    pub messages: Vec<Message>,
    pub prompt: Option<String>,
}

impl Observation {
    pub fn new(viewer: usize, log: &[Message]) -> Self {
        let messages = log
            .iter()
            .filter(|m| m.visibility.includes(viewer))
            .cloned()
            .collect();
        Self {
            viewer,
            messages,
            prompt: None,
        }
    }

    pub fn text(&self) -> String {
        match &self.prompt {
            Some(p) => p.clone(),
            None => render_history(&self.messages),
        }
    }
}

/// One line block per message, each prefixed by its sender label.
pub fn render_history(messages: &[Message]) -> String {
    let mut out = String::new();
    for (i, m) in messages.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&m.sender.to_string());
        out.push(' ');
        out.push_str(&m.content);
    }
    out
}
