use std::collections::BTreeSet;

use rand::seq::IndexedRandom;

use crate::game::{ensure_turn, Game, GameError, GameRules, LegalActions};
use crate::message::Message;
use crate::outcome::{Ranking, TerminalInfo};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;
use crate::words;

pub const ENV_ID: &str = "Hangman-v0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HangmanConfig {
    pub max_wrong: usize,
}

impl Default for HangmanConfig {
    fn default() -> Self {
        Self { max_wrong: 6 }
    }
}

pub fn rules() -> GameRules {
    GameRules {
        env_id: ENV_ID,
        min_players: 1,
        max_players: 1,
        // 26 distinct letters plus at most 6 wrong word guesses
        turn_limit: 32,
        draws_possible: false,
        description: "Guess the hidden word. Each turn guess a single letter or the whole word. A letter \
                      that is in the word is revealed everywhere it appears; a wrong letter or wrong word \
                      costs one of your 6 lives. Guessing a letter twice is not allowed.",
        action_format: "[e] for a letter or [word] for the whole word",
    }
}

pub fn spec() -> GameSpec {
    spec_with(HangmanConfig::default())
}

pub fn spec_with(config: HangmanConfig) -> GameSpec {
    GameSpec::new(rules(), move |players, seeds| {
        let (g, m) = Hangman::with_config(config, players, seeds);
        (Box::new(g), m)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hangman {
    config: HangmanConfig,
    secret: String,
    guessed: BTreeSet<char>,
    wrong: usize,
    terminal: Option<TerminalInfo>,
}

impl Hangman {
    pub fn new(players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        Self::with_config(HangmanConfig::default(), players, seeds)
    }

    pub fn with_config(config: HangmanConfig, _players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        let word = words::general()
            .choose(&mut seeds.stream("secret"))
            .expect("bundled word list is non-empty");
        let game = Self::with_secret(config, word);
        let text = format!(
            "The word has {} letters: {}. You have {} lives.",
            game.secret.len(),
            game.pattern(),
            config.max_wrong
        );
        (game, vec![Message::private(0, text)])
    }

    pub fn with_secret(config: HangmanConfig, secret: &str) -> Self {
        Self {
            config,
            secret: secret.to_ascii_lowercase(),
            guessed: BTreeSet::new(),
            wrong: 0,
            terminal: None,
        }
    }

    pub fn secret(&self) -> &str {
        &self.secret
    }

    pub fn lives(&self) -> usize {
        self.config.max_wrong - self.wrong
    }

    /// Secret with unguessed letters shown as `_`.
    pub fn pattern(&self) -> String {
        self.secret
            .chars()
            .map(|c| if self.guessed.contains(&c) { c } else { '_' })
            .map(String::from)
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn solved(&self) -> bool {
        self.secret.chars().all(|c| self.guessed.contains(&c))
    }

    fn lose_life(&mut self) -> Option<String> {
        self.wrong += 1;
        (self.lives() == 0).then(|| {
            self.terminal = Some(TerminalInfo::failure("out of lives"));
            format!(" No lives left. The word was \"{}\".", self.secret)
        })
    }
}

impl Game for Hangman {
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
        let samples = ('a'..='z')
            .filter(|c| !self.guessed.contains(c))
            .map(String::from)
            .collect();
        Ok(LegalActions::Open { samples })
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        ensure_turn(self, player)?;
        let guess = token.trim().to_ascii_lowercase();
        if guess.is_empty() || !guess.chars().all(|c| c.is_ascii_lowercase()) {
            return Err(GameError::illegal(token, "guess letters a-z only"));
        }
        let mut text;
        if guess.chars().count() == 1 {
            let c = guess.chars().next().expect("one char");
            if !self.guessed.insert(c) {
                return Err(GameError::illegal(token, format!("'{c}' was already guessed")));
            }
            if self.secret.contains(c) {
                text = format!("Yes, '{c}' is in the word: {}", self.pattern());
                if self.solved() {
                    self.terminal = Some(TerminalInfo::success("word revealed"));
                    text.push_str(" You solved it!");
                }
            } else {
                text = format!("No '{c}'. Lives left: {}.", self.lives() - 1);
                if let Some(end) = self.lose_life() {
                    text.push_str(&end);
                }
            }
        } else if guess == self.secret {
            self.guessed.extend(self.secret.chars());
            self.terminal = Some(TerminalInfo::success("word guessed"));
            text = format!("Correct, the word is \"{}\"!", self.secret);
        } else {
            text = format!("\"{guess}\" is not the word. Lives left: {}.", self.lives() - 1);
            if let Some(end) = self.lose_life() {
                text.push_str(&end);
            }
        }
        Ok(vec![Message::private(0, text)])
    }

    fn render(&self, _viewer: usize) -> String {
        let tried: String = self.guessed.iter().collect();
        format!(
            "Word: {}\nGuessed: {}\nLives: {}",
            self.pattern(),
            if tried.is_empty() { "-".to_owned() } else { tried },
            self.lives()
        )
    }

    fn terminal(&self) -> Option<&TerminalInfo> {
        self.terminal.as_ref()
    }

    fn standing(&self) -> Ranking {
        vec![vec![0]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outcome::TerminalKind;

    #[test]
    fn letters_reveal_and_solve() {
        let mut g = Hangman::with_secret(HangmanConfig::default(), "tree");
        g.apply(0, "e").unwrap();
        assert_eq!(g.pattern(), "_ _ e e");
        assert!(g.apply(0, "E").is_err(), "repeat letter");
        g.apply(0, "t").unwrap();
        g.apply(0, "r").unwrap();
        assert_eq!(g.terminal().unwrap().kind, TerminalKind::Success);
    }

    #[test]
    fn six_misses_fail() {
        let mut g = Hangman::with_secret(HangmanConfig::default(), "tree");
        for c in ["a", "b", "c", "d", "wrongword"] {
            g.apply(0, c).unwrap();
        }
        assert!(g.terminal().is_none());
        assert_eq!(g.lives(), 1);
        g.apply(0, "f").unwrap();
        assert_eq!(g.terminal().unwrap().kind, TerminalKind::Failure);
    }

    #[test]
    fn whole_word_guess() {
        let mut g = Hangman::with_secret(HangmanConfig::default(), "tree");
        g.apply(0, "TREE").unwrap();
        assert_eq!(g.terminal().unwrap().kind, TerminalKind::Success);
        let mut g = Hangman::with_secret(HangmanConfig::default(), "tree");
        assert!(g.apply(0, "tr3e").is_err());
    }
}
