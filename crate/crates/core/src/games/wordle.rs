use rand::seq::IndexedRandom;
use thiserror::Error;

use crate::game::{ensure_turn, Game, GameError, GameRules, LegalActions};
use crate::message::Message;
use crate::outcome::{Ranking, TerminalInfo};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;
use crate::words;

pub const ENV_ID: &str = "Wordle-v0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordleConfig {
    pub guesses: usize,
}

impl Default for WordleConfig {
    fn default() -> Self {
        Self { guesses: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expected two words of equal length, got {guess} and {secret} letters")]
pub struct BadLength {
    pub guess: usize,
    pub secret: usize,
}

/// Two-pass scoring: greens consume letters first, then yellows take what is left.
pub fn wordle_feedback(guess: &str, secret: &str) -> Result<String, BadLength> {
    let g: Vec<char> = guess.chars().collect();
    let s: Vec<char> = secret.chars().collect();
    if g.len() != s.len() || g.len() != 5 {
        return Err(BadLength {
            guess: g.len(),
            secret: s.len(),
        });
    }
    let mut marks = ['X'; 5];
    let mut unused: Vec<Option<char>> = s.iter().copied().map(Some).collect();
    for i in 0..5 {
        if g[i] == s[i] {
            marks[i] = 'G';
            unused[i] = None;
        }
    }
    for i in 0..5 {
        if marks[i] == 'G' {
            continue;
        }
        if let Some(slot) = unused.iter_mut().find(|c| **c == Some(g[i])) {
            *slot = None;
            marks[i] = 'Y';
        }
    }
    Ok(marks.iter().collect())
}

pub fn rules() -> GameRules {
    GameRules {
        env_id: ENV_ID,
        min_players: 1,
        max_players: 1,
        turn_limit: WordleConfig::default().guesses,
        draws_possible: false,
        description: "Guess the secret five-letter word in 6 tries. Every guess must be a word from the list. \
                      Feedback marks each letter G (right place), Y (in the word elsewhere) or X (not in \
                      the word, or no more copies of it).",
        action_format: "[crane]",
    }
}

pub fn spec() -> GameSpec {
    spec_with(WordleConfig::default())
}

pub fn spec_with(config: WordleConfig) -> GameSpec {
    let mut rules = rules();
    rules.turn_limit = config.guesses;
    GameSpec::new(rules, move |players, seeds| {
        let (g, m) = Wordle::with_config(config, players, seeds);
        (Box::new(g), m)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wordle {
    config: WordleConfig,
    secret: String,
    board: Vec<(String, String)>,
    terminal: Option<TerminalInfo>,
}

impl Wordle {
    pub fn new(players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        Self::with_config(WordleConfig::default(), players, seeds)
    }

    pub fn with_config(config: WordleConfig, _players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        let secret = words::five_letter()
            .choose(&mut seeds.stream("secret"))
            .expect("bundled word list is non-empty");
        let game = Self::with_secret(config, secret);
        let text = format!("Guess the five-letter word. You have {} guesses.", config.guesses);
        (game, vec![Message::private(0, text)])
    }

    pub fn with_secret(config: WordleConfig, secret: &str) -> Self {
        Self {
            config,
            secret: secret.to_owned(),
            board: Vec::new(),
            terminal: None,
        }
    }

    pub fn secret(&self) -> &str {
        &self.secret
    }

    pub fn remaining(&self) -> usize {
        self.config.guesses - self.board.len()
    }
}

impl Game for Wordle {
    fn num_players(&self) -> usize {
        1
    }

    fn to_move(&self) -> usize {
        0
    }

    fn legal_actions(&self) -> Result<LegalActions, GameError> {
        if self.terminal.is_some() {
            return Err(GameError::Terminal);
        }
        Ok(LegalActions::Finite(
            words::five_letter().iter().map(|w| w.to_string()).collect(),
        ))
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        ensure_turn(self, player)?;
        let guess = token.trim().to_ascii_lowercase();
        if !words::is_five_letter_word(&guess) {
            return Err(GameError::illegal(token, "not a five-letter word from the list"));
        }
        let marks = wordle_feedback(&guess, &self.secret)
            .map_err(|e| GameError::illegal(token, e.to_string()))?;
        self.board.push((guess.clone(), marks.clone()));
        let mut text = format!("{guess} -> {marks}.");
        if guess == self.secret {
            self.terminal = Some(TerminalInfo::success(format!("solved in {}", self.board.len())));
            text.push_str(" Solved!");
        } else if self.remaining() == 0 {
            self.terminal = Some(TerminalInfo::failure("out of guesses"));
            text.push_str(&format!(" Out of guesses; the word was \"{}\".", self.secret));
        } else {
            text.push_str(&format!(" {} guesses left.", self.remaining()));
        }
        Ok(vec![Message::private(0, text)])
    }

    fn render(&self, _viewer: usize) -> String {
        let mut rows: Vec<String> = self
            .board
            .iter()
            .map(|(g, m)| format!("{} {}", g.to_uppercase(), m))
            .collect();
        rows.extend(std::iter::repeat_n("_____ .....".to_owned(), self.remaining()));
        rows.join("\n")
    }

    fn terminal(&self) -> Option<&TerminalInfo> {
        self.terminal.as_ref()
    }

    fn standing(&self) -> Ranking {
        vec![vec![0]]
    }
}
