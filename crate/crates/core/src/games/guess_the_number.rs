use rand::Rng;

use crate::game::{ensure_turn, Game, GameError, GameRules, LegalActions};
use crate::message::Message;
use crate::outcome::{Ranking, TerminalInfo};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;

pub const ENV_ID: &str = "GuessTheNumber-v0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GuessConfig {
    pub low: u32,
    pub high: u32,
    pub guesses: usize,
}

impl Default for GuessConfig {
    fn default() -> Self {
        Self {
            low: 1,
            high: 20,
            guesses: 5,
        }
    }
}

pub fn rules() -> GameRules {
    GameRules {
        env_id: ENV_ID,
        min_players: 1,
        max_players: 1,
        turn_limit: GuessConfig::default().guesses,
        draws_possible: false,
        description: "A secret whole number between 1 and 20 (inclusive) has been chosen. You have 5 guesses. \
                      After each wrong guess you are told whether the secret is higher or lower.",
        action_format: "[n], e.g. [12]",
    }
}

pub fn spec() -> GameSpec {
    spec_with(GuessConfig::default())
}

pub fn spec_with(config: GuessConfig) -> GameSpec {
    let mut rules = rules();
    rules.turn_limit = config.guesses;
    GameSpec::new(rules, move |players, seeds| {
        let (g, m) = GuessTheNumber::with_config(config, players, seeds);
        (Box::new(g), m)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessTheNumber {
    config: GuessConfig,
    secret: u32,
    history: Vec<u32>,
    terminal: Option<TerminalInfo>,
}

impl GuessTheNumber {
    pub fn new(players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        Self::with_config(GuessConfig::default(), players, seeds)
    }

    pub fn with_config(config: GuessConfig, _players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        let secret = seeds.stream("secret").random_range(config.low..=config.high);
        let game = Self::with_secret(config, secret);
        let text = format!(
            "I am thinking of a number between {} and {}. You have {} guesses.",
            config.low, config.high, config.guesses
        );
        (game, vec![Message::private(0, text)])
    }

    pub fn with_secret(config: GuessConfig, secret: u32) -> Self {
        Self {
            config,
            secret,
            history: Vec::new(),
            terminal: None,
        }
    }

    pub fn secret(&self) -> u32 {
        self.secret
    }

    pub fn remaining(&self) -> usize {
        self.config.guesses - self.history.len()
    }
}

impl Game for GuessTheNumber {
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
            (self.config.low..=self.config.high).map(|n| n.to_string()).collect(),
        ))
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        ensure_turn(self, player)?;
        let guess: u32 = token
            .trim()
            .parse()
            .map_err(|_| GameError::illegal(token, "expected a whole number"))?;
        if !(self.config.low..=self.config.high).contains(&guess) {
            return Err(GameError::illegal(
                token,
                format!("guess must be between {} and {}", self.config.low, self.config.high),
            ));
        }
        self.history.push(guess);
        let text = if guess == self.secret {
            self.terminal = Some(TerminalInfo::success(format!("found {} in {} guesses", guess, self.history.len())));
            format!("Correct! The number was {guess}.")
        } else {
            let hint = if self.secret > guess { "higher" } else { "lower" };
            if self.remaining() == 0 {
                self.terminal = Some(TerminalInfo::failure("out of guesses"));
                format!("Wrong: the number is {hint}. Out of guesses; it was {}.", self.secret)
            } else {
                format!("Wrong: the number is {hint}. {} guesses left.", self.remaining())
            }
        };
        Ok(vec![Message::private(0, text)])
    }

    fn render(&self, _viewer: usize) -> String {
        let past: Vec<String> = self.history.iter().map(u32::to_string).collect();
        format!(
            "Range: {}-{}\nGuesses so far: {}\nRemaining: {}",
            self.config.low,
            self.config.high,
            if past.is_empty() { "-".to_owned() } else { past.join(", ") },
            self.remaining()
        )
    }

    fn terminal(&self) -> Option<&TerminalInfo> {
        self.terminal.as_ref()
    }

    fn standing(&self) -> Ranking {
        vec![vec![0]]
    }
}
