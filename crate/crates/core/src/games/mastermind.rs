use std::sync::OnceLock;

use rand::Rng;
use thiserror::Error;

use crate::game::{ensure_turn, Game, GameError, GameRules, LegalActions};
use crate::message::Message;
use crate::outcome::{Ranking, TerminalInfo};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;

pub const ENV_ID: &str = "Mastermind-v0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MastermindConfig {
    pub length: usize,
    pub symbols: u8,
    pub guesses: usize,
}

impl Default for MastermindConfig {
    fn default() -> Self {
        Self {
            length: 4,
            symbols: 6,
            guesses: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeedbackError {
    #[error("expected {expected} symbols, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("symbol {0} is outside 1..={1}")]
    BadSymbol(u8, u8),
}

/// Black = right symbol in the right place; white = right symbol elsewhere.
pub fn mastermind_feedback(guess: &[u8], secret: &[u8], symbols: u8) -> Result<(usize, usize), FeedbackError> {
    if guess.len() != secret.len() {
        return Err(FeedbackError::BadLength {
            expected: secret.len(),
            got: guess.len(),
        });
    }
    if let Some(&bad) = guess.iter().chain(secret).find(|&&s| s == 0 || s > symbols) {
        return Err(FeedbackError::BadSymbol(bad, symbols));
    }
    let black = guess.iter().zip(secret).filter(|(g, s)| g == s).count();
    let mut counts = [0usize; 256];
    for &s in secret {
        counts[s as usize] += 1;
    }
    let mut common = 0;
    for &g in guess {
        if counts[g as usize] > 0 {
            counts[g as usize] -= 1;
            common += 1;
        }
    }
    Ok((black, common - black))
}

pub fn rules() -> GameRules {
    GameRules {
        env_id: ENV_ID,
        min_players: 1,
        max_players: 1,
        turn_limit: MastermindConfig::default().guesses,
        draws_possible: false,
        description: "Crack a hidden code of 4 digits, each from 1 to 6 (repeats allowed), within 12 guesses. \
                      After each guess you get black pegs (right digit, right position) and white pegs \
                      (right digit, wrong position).",
        action_format: "[1 3 5 6] or [1356]",
    }
}

pub fn spec() -> GameSpec {
    spec_with(MastermindConfig::default())
}

pub fn spec_with(config: MastermindConfig) -> GameSpec {
    let mut rules = rules();
    rules.turn_limit = config.guesses;
    GameSpec::new(rules, move |players, seeds| {
        let (g, m) = Mastermind::with_config(config, players, seeds);
        (Box::new(g), m)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mastermind {
    config: MastermindConfig,
    secret: Vec<u8>,
    guesses: usize,
    terminal: Option<TerminalInfo>,
}

fn code_text(code: &[u8]) -> String {
    code.iter().map(u8::to_string).collect::<Vec<_>>().join(" ")
}

fn all_codes(config: &MastermindConfig) -> Vec<String> {
    let k = config.symbols as usize;
    let total = k.pow(config.length as u32);
    (0..total)
        .map(|mut i| {
            let mut code = vec![0u8; config.length];
            for slot in code.iter_mut().rev() {
                *slot = (i % k) as u8 + 1;
                i /= k;
            }
            code_text(&code)
        })
        .collect()
}

impl Mastermind {
    pub fn new(players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        Self::with_config(MastermindConfig::default(), players, seeds)
    }

    pub fn with_config(config: MastermindConfig, _players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        let mut rng = seeds.stream("secret");
        let secret = (0..config.length)
            .map(|_| rng.random_range(1..=config.symbols))
            .collect();
        let game = Self::with_secret(config, secret);
        let text = format!(
            "A {}-digit code over 1-{} has been set. You have {} guesses.",
            config.length, config.symbols, config.guesses
        );
        (game, vec![Message::private(0, text)])
    }

    pub fn with_secret(config: MastermindConfig, secret: Vec<u8>) -> Self {
        Self {
            config,
            secret,
            guesses: 0,
            terminal: None,
        }
    }

    pub fn secret(&self) -> &[u8] {
        &self.secret
    }

    fn parse(&self, token: &str) -> Result<Vec<u8>, GameError> {
        let t = token.trim();
        let parts: Vec<&str> = if t.contains(char::is_whitespace) {
            t.split_whitespace().collect()
        } else {
            t.split("").filter(|s| !s.is_empty()).collect()
        };
        let code: Vec<u8> = parts
            .iter()
            .map(|p| p.parse::<u8>())
            .collect::<Result<_, _>>()
            .map_err(|_| GameError::illegal(token, "code must be digits"))?;
        mastermind_feedback(&code, &self.secret, self.config.symbols)
            .map_err(|e| GameError::illegal(token, e.to_string()))?;
        Ok(code)
    }
}

impl Game for Mastermind {
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
        // the default code space is the same for every game, so build it once
        static DEFAULT_CODES: OnceLock<Vec<String>> = OnceLock::new();
        let codes = if self.config == MastermindConfig::default() {
            DEFAULT_CODES.get_or_init(|| all_codes(&self.config)).clone()
        } else {
            all_codes(&self.config)
        };
        Ok(LegalActions::Finite(codes))
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        ensure_turn(self, player)?;
        let code = self.parse(token)?;
        let (black, white) = mastermind_feedback(&code, &self.secret, self.config.symbols)
            .expect("validated in parse");
        self.guesses += 1;
        let left = self.config.guesses - self.guesses;
        let mut text = format!("Guess {}: {} black, {} white.", code_text(&code), black, white);
        if black == self.config.length {
            self.terminal = Some(TerminalInfo::success(format!("cracked in {} guesses", self.guesses)));
            text.push_str(" Code cracked!");
        } else if left == 0 {
            self.terminal = Some(TerminalInfo::failure("out of guesses"));
            text.push_str(&format!(" Out of guesses; the code was {}.", code_text(&self.secret)));
        } else {
            text.push_str(&format!(" {left} guesses left."));
        }
        Ok(vec![Message::private(0, text)])
    }

    fn render(&self, _viewer: usize) -> String {
        format!(
            "Code: {}\nGuesses used: {}/{}",
            vec!["?"; self.config.length].join(" "),
            self.guesses,
            self.config.guesses
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
    fn feedback_examples() {
        assert_eq!(mastermind_feedback(&[1, 2, 3, 4], &[1, 2, 3, 4], 6), Ok((4, 0)));
        assert_eq!(mastermind_feedback(&[1, 3, 5, 6], &[1, 2, 3, 4], 6), Ok((1, 1)));
        assert_eq!(mastermind_feedback(&[2, 2, 1, 1], &[1, 1, 2, 2], 6), Ok((0, 4)));
        assert!(matches!(mastermind_feedback(&[1, 2], &[1, 2, 3, 4], 6), Err(FeedbackError::BadLength { .. })));
        assert_eq!(mastermind_feedback(&[1, 2, 3, 7], &[1, 2, 3, 4], 6), Err(FeedbackError::BadSymbol(7, 6)));
    }

    #[test]
    fn both_input_forms() {
        let mut g = Mastermind::with_secret(MastermindConfig::default(), vec![1, 2, 3, 4]);
        let m = g.apply(0, "1 3 5 6").unwrap();
        assert!(m[0].content.contains("1 black, 1 white"));
        g.apply(0, "1234").unwrap();
        assert_eq!(g.terminal().unwrap().kind, TerminalKind::Success);
    }

    #[test]
    fn legal_set_is_every_code() {
        let g = Mastermind::with_secret(MastermindConfig::default(), vec![1, 1, 1, 1]);
        let legal = g.legal_actions().unwrap();
        assert_eq!(legal.candidates().len(), 1296);
        assert_eq!(legal.candidates()[0], "1 1 1 1");
        assert!(g.validate(0, "0 1 1 1").is_err());
        assert!(g.validate(0, "11111").is_err());
    }
}
