use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::game::{ensure_turn, rank_by_key, Game, GameError, GameRules, LegalActions};
use crate::message::Message;
use crate::outcome::{Ranking, TerminalInfo, TerminalKind};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;

pub const ENV_ID: &str = "LiarsDice-v0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiarsDiceConfig {
    pub dice_per_player: usize,
}

impl Default for LiarsDiceConfig {
    fn default() -> Self {
        Self { dice_per_player: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Bid {
    pub quantity: usize,
    pub face: u8,
}

pub fn rules() -> GameRules {
    GameRules {
        env_id: ENV_ID,
        min_players: 2,
        max_players: 6,
        // rounds are bounded by the dice in play and bids by quantity x face
        turn_limit: 6000,
        draws_possible: false,
        description: "Liar's dice. Everyone starts with 5 hidden six-sided dice. Players take turns either \
                      raising the bid, a claim that at least q dice on the table show face f, or calling the \
                      previous bid. A raise must increase the quantity, or keep it and increase the face. \
                      Ones are not wild. On a call all dice are revealed: if the bid holds the caller loses a \
                      die, otherwise the bidder does. The loser starts the next round with fresh rolls. A \
                      player with no dice is out; the last player standing wins.",
        action_format: "[bid q f], e.g. [bid 3 4], or [call]",
    }
}

pub fn spec() -> GameSpec {
    spec_with(LiarsDiceConfig::default())
}

pub fn spec_with(config: LiarsDiceConfig) -> GameSpec {
    GameSpec::new(rules(), move |players, seeds| {
        let (g, m) = LiarsDice::with_config(config, players, seeds);
        (Box::new(g), m)
    })
}

#[derive(Debug, Clone)]
pub struct LiarsDice {
    dice: Vec<Vec<u8>>,
    bid: Option<(usize, Bid)>,
    to_move: usize,
    /// Seats in the order they were knocked out.
    eliminated: Vec<usize>,
    rng: ChaCha8Rng,
    round: usize,
    terminal: Option<TerminalInfo>,
}

impl LiarsDice {
    pub fn new(players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        Self::with_config(LiarsDiceConfig::default(), players, seeds)
    }

    pub fn with_config(config: LiarsDiceConfig, players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        let mut game = Self {
            dice: vec![vec![0; config.dice_per_player]; players],
            bid: None,
            to_move: 0,
            eliminated: Vec::new(),
            rng: seeds.stream("dice"),
            round: 0,
            terminal: None,
        };
        let msgs = game.roll();
        (game, msgs)
    }

    /// A fixed position for tests: explicit dice, player 0 to open.
    pub fn with_dice(dice: Vec<Vec<u8>>, seeds: &SeedStreams) -> Self {
        Self {
            dice,
            bid: None,
            to_move: 0,
            eliminated: Vec::new(),
            rng: seeds.stream("dice"),
            round: 1,
            terminal: None,
        }
    }

    pub fn dice(&self, player: usize) -> &[u8] {
        &self.dice[player]
    }

    pub fn current_bid(&self) -> Option<Bid> {
        self.bid.map(|(_, b)| b)
    }

    pub fn eliminated(&self) -> &[usize] {
        &self.eliminated
    }

    fn total_dice(&self) -> usize {
        self.dice.iter().map(Vec::len).sum()
    }

    fn alive(&self, p: usize) -> bool {
        !self.dice[p].is_empty()
    }

    fn next_alive(&self, from: usize) -> usize {
        let n = self.dice.len();
        (1..=n)
            .map(|k| (from + k) % n)
            .find(|&p| self.alive(p))
            .unwrap_or(from)
    }

    fn roll(&mut self) -> Vec<Message> {
        self.round += 1;
        let mut msgs = Vec::new();
        for (p, hand) in self.dice.iter_mut().enumerate() {
            for d in hand.iter_mut() {
                *d = self.rng.random_range(1..=6);
            }
            if !hand.is_empty() {
                hand.sort_unstable();
                msgs.push(Message::private(p, format!("Round {}: your dice are {:?}.", self.round, hand)));
            }
        }
        msgs.push(Message::broadcast(format!(
            "Round {} begins with {} dice in play. Player {} opens.",
            self.round,
            self.total_dice(),
            self.to_move
        )));
        msgs
    }

    fn parse(&self, token: &str) -> Result<Option<Bid>, GameError> {
        let parts: Vec<String> = token.split_whitespace().map(str::to_ascii_lowercase).collect();
        match parts.iter().map(String::as_str).collect::<Vec<_>>()[..] {
            ["call"] => {
                if self.bid.is_none() {
                    return Err(GameError::illegal(token, "there is no bid to call"));
                }
                Ok(None)
            }
            ["bid", q, f] => {
                let (Ok(quantity), Ok(face)) = (q.parse::<usize>(), f.parse::<u8>()) else {
                    return Err(GameError::illegal(token, "quantity and face must be numbers"));
                };
                if !(1..=6).contains(&face) {
                    return Err(GameError::illegal(token, "face must be 1-6"));
                }
                if quantity == 0 || quantity > self.total_dice() {
                    return Err(GameError::illegal(
                        token,
                        format!("quantity must be between 1 and {}", self.total_dice()),
                    ));
                }
                let bid = Bid { quantity, face };
                if let Some((_, prev)) = self.bid {
                    if bid <= prev {
                        return Err(GameError::illegal(
                            token,
                            format!("must raise over {} x {}", prev.quantity, prev.face),
                        ));
                    }
                }
                Ok(Some(bid))
            }
            _ => Err(GameError::illegal(token, "expected `bid q f` or `call`")),
        }
    }

    fn finish_ranking(&self) -> Ranking {
        let mut ranking: Ranking = (0..self.dice.len())
            .filter(|&p| self.alive(p))
            .map(|p| vec![p])
            .collect();
        ranking.extend(self.eliminated.iter().rev().map(|&p| vec![p]));
        ranking
    }
}

impl Game for LiarsDice {
    fn num_players(&self) -> usize {
        self.dice.len()
    }

    fn to_move(&self) -> usize {
        self.to_move
    }

    fn legal_actions(&self) -> Result<LegalActions, GameError> {
        if self.terminal.is_some() {
            return Err(GameError::Terminal);
        }
        let mut out = Vec::new();
        if self.bid.is_some() {
            out.push("call".to_owned());
        }
        let floor = self.bid.map(|(_, b)| b);
        for quantity in 1..=self.total_dice() {
            for face in 1..=6u8 {
                let b = Bid { quantity, face };
                if floor.is_none_or(|f| b > f) {
                    out.push(format!("bid {quantity} {face}"));
                }
            }
        }
        Ok(LegalActions::Finite(out))
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        ensure_turn(self, player)?;
        match self.parse(token)? {
            Some(bid) => {
                self.bid = Some((player, bid));
                self.to_move = self.next_alive(player);
                Ok(vec![Message::broadcast(format!(
                    "Player {player} bids {} x {}. Player {} to act.",
                    bid.quantity, bid.face, self.to_move
                ))])
            }
            None => {
                let (bidder, bid) = self.bid.take().expect("validated");
                let count = self.dice.iter().flatten().filter(|&&d| d == bid.face).count();
                let reveal: Vec<String> = self
                    .dice
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| !d.is_empty())
                    .map(|(p, d)| format!("Player {p}: {d:?}"))
                    .collect();
                let loser = if count >= bid.quantity { player } else { bidder };
                self.dice[loser].pop();
                let mut text = format!(
                    "Player {player} calls {} x {}. Dice: {}. There are {count}. Player {loser} loses a die.",
                    bid.quantity,
                    bid.face,
                    reveal.join("; ")
                );
                if !self.alive(loser) {
                    self.eliminated.push(loser);
                    text.push_str(&format!(" Player {loser} is out."));
                }
                let mut msgs = vec![Message::broadcast(text)];
                let survivors: Vec<usize> = (0..self.dice.len()).filter(|&p| self.alive(p)).collect();
                if survivors.len() == 1 {
                    let w = survivors[0];
                    self.terminal = Some(TerminalInfo::new(
                        TerminalKind::Rank,
                        self.finish_ranking(),
                        format!("Player {w} is the last one standing"),
                    ));
                    msgs.push(Message::broadcast(format!("Player {w} wins.")));
                } else {
                    self.to_move = if self.alive(loser) { loser } else { self.next_alive(loser) };
                    msgs.extend(self.roll());
                }
                Ok(msgs)
            }
        }
    }

    fn render(&self, viewer: usize) -> String {
        let mut lines = Vec::new();
        for (p, hand) in self.dice.iter().enumerate() {
            if p == viewer {
                lines.push(format!("You (Player {p}): {hand:?}"));
            } else {
                lines.push(format!("Player {p}: {} dice", hand.len()));
            }
        }
        lines.push(match self.bid {
            Some((who, b)) => format!("Current bid: {} x {} by Player {who}", b.quantity, b.face),
            None => "Current bid: none".to_owned(),
        });
        lines.join("\n")
    }

    fn terminal(&self) -> Option<&TerminalInfo> {
        self.terminal.as_ref()
    }

    fn standing(&self) -> Ranking {
        // survivors by dice held, then the knocked-out in reverse order
        let n = self.dice.len();
        let keys: Vec<usize> = (0..n)
            .map(|p| match self.eliminated.iter().position(|&e| e == p) {
                Some(i) => i,
                None => n + self.dice[p].len(),
            })
            .collect();
        rank_by_key(&keys)
    }
}
