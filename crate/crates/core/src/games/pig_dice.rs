use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::game::{ensure_turn, rank_by_key, Game, GameError, GameRules, LegalActions};
use crate::message::Message;
use crate::outcome::{Ranking, TerminalInfo};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;

pub const ENV_ID: &str = "PigDice-v0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PigDiceConfig {
    pub target: u32,
    pub die_sides: u32,
    pub max_steps: usize,
}

impl Default for PigDiceConfig {
    fn default() -> Self {
        Self {
            target: 100,
            die_sides: 6,
            max_steps: 1000,
        }
    }
}

pub fn rules() -> GameRules {
    GameRules {
        env_id: ENV_ID,
        min_players: 2,
        max_players: 2,
        turn_limit: PigDiceConfig::default().max_steps,
        draws_possible: true,
        description: "Pig. On your turn roll a six-sided die as often as you like, adding each roll to your \
                      turn total. Rolling a 1 loses the turn total and ends your turn. Holding banks the \
                      turn total into your score and passes the turn. First to 100 banked points wins. \
                      If the step cap is reached, the higher banked score wins.",
        action_format: "[roll] or [hold]",
    }
}

pub fn spec() -> GameSpec {
    spec_with(PigDiceConfig::default())
}

pub fn spec_with(config: PigDiceConfig) -> GameSpec {
    let mut rules = rules();
    rules.turn_limit = config.max_steps;
    GameSpec::new(rules, move |players, seeds| {
        let (g, m) = PigDice::with_config(config, players, seeds);
        (Box::new(g), m)
    })
}

#[derive(Debug, Clone)]
pub struct PigDice {
    config: PigDiceConfig,
    scores: [u32; 2],
    turn_total: u32,
    to_move: usize,
    dice: ChaCha8Rng,
    terminal: Option<TerminalInfo>,
}

impl PigDice {
    pub fn new(players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        Self::with_config(PigDiceConfig::default(), players, seeds)
    }

    pub fn with_config(config: PigDiceConfig, _players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        let game = Self {
            config,
            scores: [0, 0],
            turn_total: 0,
            to_move: 0,
            dice: seeds.stream("dice"),
            terminal: None,
        };
        (game, vec![Message::broadcast("Scores: Player 0 = 0, Player 1 = 0. Player 0 starts.")])
    }

    pub fn scores(&self) -> [u32; 2] {
        self.scores
    }

    pub fn turn_total(&self) -> u32 {
        self.turn_total
    }

    /// Replaces the die stream; used to force rolls in tests.
    pub fn set_dice(&mut self, rng: ChaCha8Rng) {
        self.dice = rng;
    }

    fn pass_turn(&mut self) {
        self.turn_total = 0;
        self.to_move = 1 - self.to_move;
    }
}

impl Game for PigDice {
    fn num_players(&self) -> usize {
        2
    }

    fn to_move(&self) -> usize {
        self.to_move
    }

    fn legal_actions(&self) -> Result<LegalActions, GameError> {
        if self.terminal.is_some() {
            return Err(GameError::Terminal);
        }
        Ok(LegalActions::Finite(vec!["hold".into(), "roll".into()]))
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        ensure_turn(self, player)?;
        let text = match token.trim().to_ascii_lowercase().as_str() {
            "roll" => {
                let roll = self.dice.random_range(1..=self.config.die_sides);
                if roll == 1 {
                    let lost = self.turn_total;
                    self.pass_turn();
                    format!(
                        "Player {player} rolled a 1 and loses the turn total of {lost}. Player {} to move.",
                        self.to_move
                    )
                } else {
                    self.turn_total += roll;
                    if self.scores[player] + self.turn_total >= self.config.target {
                        self.scores[player] += self.turn_total;
                        self.turn_total = 0;
                        self.terminal = Some(TerminalInfo::win(
                            player,
                            format!("Player {player} reached {}", self.scores[player]),
                        ));
                        format!(
                            "Player {player} rolled a {roll}, reaching {} points, and wins.",
                            self.scores[player]
                        )
                    } else {
                        format!(
                            "Player {player} rolled a {roll}. Turn total: {}.",
                            self.turn_total
                        )
                    }
                }
            }
            "hold" => {
                let banked = self.turn_total;
                self.scores[player] += banked;
                self.pass_turn();
                format!(
                    "Player {player} holds and banks {banked}. Scores: Player 0 = {}, Player 1 = {}.",
                    self.scores[0], self.scores[1]
                )
            }
            _ => return Err(GameError::illegal(token, "expected roll or hold")),
        };
        Ok(vec![Message::broadcast(text)])
    }

    fn render(&self, _viewer: usize) -> String {
        format!(
            "Player 0: {:>3}\nPlayer 1: {:>3}\nTurn total: {} (Player {} to move)",
            self.scores[0], self.scores[1], self.turn_total, self.to_move
        )
    }

    fn terminal(&self) -> Option<&TerminalInfo> {
        self.terminal.as_ref()
    }

    fn standing(&self) -> Ranking {
        rank_by_key(&self.scores)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    /// A stream whose first roll (on a d6) is 1.
    fn stream_rolling_one() -> ChaCha8Rng {
        (0u64..)
            .map(ChaCha8Rng::seed_from_u64)
            .find(|rng| rng.clone().random_range(1..=6u32) == 1)
            .unwrap()
    }

    #[test]
    fn bust_zeroes_turn_total_and_passes() {
        let (mut g, _) = PigDice::new(2, &SeedStreams::new(0));
        g.turn_total = 9;
        g.set_dice(stream_rolling_one());
        let msgs = g.apply(0, "roll").unwrap();
        assert_eq!(g.turn_total(), 0);
        assert_eq!(g.to_move(), 1);
        assert_eq!(g.scores(), [0, 0]);
        assert!(msgs[0].content.contains("rolled a 1"));
    }

    #[test]
    fn hold_banks() {
        let (mut g, _) = PigDice::new(2, &SeedStreams::new(0));
        g.turn_total = 12;
        g.apply(0, "HOLD").unwrap();
        assert_eq!(g.scores(), [12, 0]);
        assert_eq!(g.to_move(), 1);
        assert!(g.apply(1, "pass").is_err());
    }
}
