//! Single-hand Kuhn poker: three cards, one ante, at most one bet.

use std::fmt;

use rand::seq::SliceRandom;

use crate::game::{ensure_turn, Game, GameError, GameRules, LegalActions};
use crate::message::Message;
use crate::outcome::{Ranking, TerminalInfo};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;

pub const ENV_ID: &str = "KuhnPoker-v0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Card {
    Jack,
    Queen,
    King,
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Card::Jack => "J",
            Card::Queen => "Q",
            Card::King => "K",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bet {
    Check,
    Bet,
    Call,
    Fold,
}

impl Bet {
    fn as_str(&self) -> &'static str {
        match self {
            Bet::Check => "check",
            Bet::Bet => "bet",
            Bet::Call => "call",
            Bet::Fold => "fold",
        }
    }
}

pub fn rules() -> GameRules {
    GameRules {
        env_id: ENV_ID,
        min_players: 2,
        max_players: 2,
        turn_limit: 3,
        draws_possible: false,
        description: "Kuhn poker. The deck is J < Q < K; each player antes 1 chip and receives one private \
                      card. Player 0 acts first. With no bet outstanding you may check or bet 1 chip; facing \
                      a bet you may call or fold. Two checks or a call go to showdown where the higher card \
                      takes the pot; a fold concedes it. Winning the pot wins the game.",
        action_format: "[check], [bet], [call] or [fold]",
    }
}

pub fn spec() -> GameSpec {
    GameSpec::new(rules(), |players, seeds| {
        let (g, m) = KuhnPoker::new(players, seeds);
        (Box::new(g), m)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KuhnPoker {
    cards: [Card; 2],
    history: Vec<Bet>,
    to_move: usize,
    /// Net chips won by player 0 once the hand is over.
    payoff: i32,
    terminal: Option<TerminalInfo>,
}

impl KuhnPoker {
    pub fn new(_players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        let mut deck = [Card::Jack, Card::Queen, Card::King];
        deck.shuffle(&mut seeds.stream("deal"));
        let game = Self::with_cards([deck[0], deck[1]]);
        let msgs = (0..2)
            .map(|p| Message::private(p, format!("Your card is {}.", game.cards[p])))
            .chain(std::iter::once(Message::broadcast(
                "Both players ante 1 chip. Pot: 2. Player 0 to act.",
            )))
            .collect();
        (game, msgs)
    }

    pub fn with_cards(cards: [Card; 2]) -> Self {
        Self {
            cards,
            history: Vec::new(),
            to_move: 0,
            payoff: 0,
            terminal: None,
        }
    }

    pub fn cards(&self) -> [Card; 2] {
        self.cards
    }

    pub fn history(&self) -> &[Bet] {
        &self.history
    }

    /// Net chips won by player 0 (meaningful once terminal).
    pub fn chip_payoff(&self) -> i32 {
        self.payoff
    }

    fn facing_bet(&self) -> bool {
        self.history.last() == Some(&Bet::Bet)
    }

    fn pot(&self) -> i32 {
        2 + self.history.iter().filter(|b| matches!(b, Bet::Bet | Bet::Call)).count() as i32
    }

    fn finish(&mut self, winner: usize, how: &str) -> String {
        // a folder only ever put in the ante
        let loser_in = if self.history.last() == Some(&Bet::Fold) {
            1
        } else {
            self.pot() / 2
        };
        self.payoff = if winner == 0 { loser_in } else { -loser_in };
        self.terminal = Some(TerminalInfo::win(
            winner,
            format!("Player {winner} {how} (net {loser_in} chip{})", if loser_in == 1 { "" } else { "s" }),
        ));
        format!("Player {winner} {how} and wins the pot of {}.", self.pot())
    }

    fn showdown(&mut self) -> String {
        let winner = if self.cards[0] > self.cards[1] { 0 } else { 1 };
        let reveal = format!("Showdown: Player 0 shows {}, Player 1 shows {}. ", self.cards[0], self.cards[1]);
        reveal + &self.finish(winner, "has the higher card")
    }
}

impl Game for KuhnPoker {
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
        let moves = if self.facing_bet() {
            vec!["call".into(), "fold".into()]
        } else {
            vec!["bet".into(), "check".into()]
        };
        Ok(LegalActions::Finite(moves))
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        ensure_turn(self, player)?;
        let bet = match token.trim().to_ascii_lowercase().as_str() {
            "check" => Bet::Check,
            "bet" => Bet::Bet,
            "call" => Bet::Call,
            "fold" => Bet::Fold,
            _ => return Err(GameError::illegal(token, "expected check, bet, call or fold")),
        };
        let allowed = if self.facing_bet() {
            matches!(bet, Bet::Call | Bet::Fold)
        } else {
            matches!(bet, Bet::Check | Bet::Bet)
        };
        if !allowed {
            return Err(GameError::illegal(token, "not available at this point of the hand"));
        }
        self.history.push(bet);
        let mut text = format!("Player {player} {}s.", bet.as_str());
        let outcome = match self.history.as_slice() {
            [Bet::Check, Bet::Check] | [Bet::Bet, Bet::Call] | [Bet::Check, Bet::Bet, Bet::Call] => {
                Some(self.showdown())
            }
            [.., Bet::Fold] => Some(self.finish(1 - player, "collects after a fold")),
            _ => None,
        };
        match outcome {
            Some(end) => {
                text.push(' ');
                text.push_str(&end);
            }
            None => {
                self.to_move = 1 - player;
                text.push_str(&format!(" Pot: {}. Player {} to act.", self.pot(), self.to_move));
            }
        }
        Ok(vec![Message::broadcast(text)])
    }

    fn render(&self, viewer: usize) -> String {
        let opponent = if self.terminal.is_some() && self.history.last() != Some(&Bet::Fold) {
            self.cards[1 - viewer].to_string()
        } else {
            "?".to_owned()
        };
        let history: Vec<&str> = self.history.iter().map(Bet::as_str).collect();
        format!(
            "Your card: {}\nOpponent card: {opponent}\nPot: {}\nActions: {}",
            self.cards[viewer],
            self.pot(),
            if history.is_empty() { "-".to_owned() } else { history.join(", ") }
        )
    }

    fn terminal(&self) -> Option<&TerminalInfo> {
        self.terminal.as_ref()
    }

    fn standing(&self) -> Ranking {
        vec![vec![0, 1]]
    }
}
