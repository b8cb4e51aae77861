//! Two-party barter over five resource kinds with private unit values.

use std::fmt;
use std::sync::OnceLock;

use rand::Rng;
use regex::Regex;

use crate::game::{ensure_turn, Game, GameError, GameRules, LegalActions};
use crate::message::Message;
use crate::outcome::{Ranking, TerminalInfo};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;

pub const ENV_ID: &str = "SimpleNegotiation-v0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Resource {
    Wheat,
    Wood,
    Sheep,
    Brick,
    Ore,
}

impl Resource {
    pub const ALL: [Resource; 5] = [
        Resource::Wheat,
        Resource::Wood,
        Resource::Sheep,
        Resource::Brick,
        Resource::Ore,
    ];

    fn parse(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.to_string().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Resource::Wheat => "Wheat",
            Resource::Wood => "Wood",
            Resource::Sheep => "Sheep",
            Resource::Brick => "Brick",
            Resource::Ore => "Ore",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NegotiationConfig {
    pub max_turns: usize,
    pub endowment: (u32, u32),
    pub value: (u32, u32),
}

impl Default for NegotiationConfig {
    fn default() -> Self {
        Self {
            max_turns: 10,
            endowment: (5, 25),
            value: (5, 15),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Offer {
    pub from: usize,
    pub give: (u32, Resource),
    pub receive: (u32, Resource),
}

impl fmt::Display for Offer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Offer: give {} {} -> receive {} {}",
            self.give.0, self.give.1, self.receive.0, self.receive.1
        )
    }
}

enum Move {
    Offer(Offer),
    Accept,
    Deny,
}

pub fn rules() -> GameRules {
    GameRules {
        env_id: ENV_ID,
        min_players: 2,
        max_players: 2,
        turn_limit: NegotiationConfig::default().max_turns,
        draws_possible: true,
        description: "Two traders each hold Wheat, Wood, Sheep, Brick and Ore and privately value each unit. \
                      Players alternate turns; on your turn make an offer, accept the opponent's pending \
                      offer, or deny it. After 10 turns the player whose inventory gained more value by \
                      their own valuation wins; if no trade happened, or the gains are equal, it is a draw.",
        action_format: "[Offer: give X Resource -> receive Y Resource], [Accept] or [Deny]",
    }
}

pub fn spec() -> GameSpec {
    spec_with(NegotiationConfig::default())
}

pub fn spec_with(config: NegotiationConfig) -> GameSpec {
    let mut rules = rules();
    rules.turn_limit = config.max_turns;
    GameSpec::new(rules, move |players, seeds| {
        let (g, m) = SimpleNegotiation::with_config(config, players, seeds);
        (Box::new(g), m)
    })
}

fn offer_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?i)^offer:\s*give\s+(\d+)\s+([a-z]+)\s*->\s*receive\s+(\d+)\s+([a-z]+)$")
            .expect("static regex")
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleNegotiation {
    config: NegotiationConfig,
    initial: [[u32; 5]; 2],
    inventory: [[u32; 5]; 2],
    values: [[u32; 5]; 2],
    pending: Option<Offer>,
    trades: usize,
    turns: usize,
    to_move: usize,
    terminal: Option<TerminalInfo>,
}

fn describe(stock: &[u32; 5]) -> String {
    Resource::ALL
        .iter()
        .zip(stock)
        .map(|(r, n)| format!("{r}: {n}"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl SimpleNegotiation {
    pub fn new(players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        Self::with_config(NegotiationConfig::default(), players, seeds)
    }

    pub fn with_config(config: NegotiationConfig, _players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        let mut endow = seeds.stream("endowment");
        let mut vals = seeds.stream("values");
        let mut inventory = [[0u32; 5]; 2];
        let mut values = [[0u32; 5]; 2];
        for p in 0..2 {
            for r in 0..5 {
                inventory[p][r] = endow.random_range(config.endowment.0..=config.endowment.1);
                values[p][r] = vals.random_range(config.value.0..=config.value.1);
            }
        }
        let game = Self::with_holdings(config, inventory, values);
        let msgs = (0..2)
            .map(|p| {
                Message::private(
                    p,
                    format!(
                        "Your resources: {}.\nYour value per unit: {}.",
                        describe(&game.inventory[p]),
                        describe(&game.values[p])
                    ),
                )
            })
            .collect();
        (game, msgs)
    }

    pub fn with_holdings(config: NegotiationConfig, inventory: [[u32; 5]; 2], values: [[u32; 5]; 2]) -> Self {
        Self {
            config,
            initial: inventory,
            inventory,
            values,
            pending: None,
            trades: 0,
            turns: 0,
            to_move: 0,
            terminal: None,
        }
    }

    pub fn inventory(&self, player: usize) -> [u32; 5] {
        self.inventory[player]
    }

    pub fn pending(&self) -> Option<Offer> {
        self.pending
    }

    /// Change in own-valuation worth of `player`'s holdings.
    pub fn gain(&self, player: usize) -> i64 {
        (0..5)
            .map(|r| {
                i64::from(self.values[player][r])
                    * (i64::from(self.inventory[player][r]) - i64::from(self.initial[player][r]))
            })
            .sum()
    }

    fn parse(&self, player: usize, token: &str) -> Result<Move, GameError> {
        let t = token.trim();
        if t.eq_ignore_ascii_case("accept") {
            let Some(offer) = self.pending else {
                return Err(GameError::illegal(token, "there is no offer to accept"));
            };
            let (n, res) = offer.receive;
            if self.inventory[player][res as usize] < n {
                return Err(GameError::illegal(token, format!("you do not hold {n} {res}")));
            }
            return Ok(Move::Accept);
        }
        if t.eq_ignore_ascii_case("deny") {
            return Ok(Move::Deny);
        }
        let caps = offer_pattern()
            .captures(t)
            .ok_or_else(|| GameError::illegal(token, "expected an offer, Accept or Deny"))?;
        let count = |i: usize| -> Result<u32, GameError> {
            caps[i]
                .parse::<u32>()
                .map_err(|_| GameError::illegal(token, "bad quantity"))
        };
        let resource = |i: usize| -> Result<Resource, GameError> {
            Resource::parse(&caps[i]).ok_or_else(|| GameError::illegal(token, format!("unknown resource {}", &caps[i])))
        };
        let give = (count(1)?, resource(2)?);
        let receive = (count(3)?, resource(4)?);
        if give.0 == 0 || receive.0 == 0 {
            return Err(GameError::illegal(token, "quantities must be positive"));
        }
        if give.1 == receive.1 {
            return Err(GameError::illegal(token, "must trade two different resources"));
        }
        if self.inventory[player][give.1 as usize] < give.0 {
            return Err(GameError::illegal(token, format!("you do not hold {} {}", give.0, give.1)));
        }
        Ok(Move::Offer(Offer {
            from: player,
            give,
            receive,
        }))
    }

    fn settle(&mut self) -> String {
        let gains = [self.gain(0), self.gain(1)];
        let summary = format!("Final value gains: Player 0 = {}, Player 1 = {}.", gains[0], gains[1]);
        let info = if self.trades == 0 {
            TerminalInfo::draw(2, "no trade was made")
        } else if gains[0] == gains[1] {
            TerminalInfo::draw(2, "equal value gains")
        } else {
            let w = if gains[0] > gains[1] { 0 } else { 1 };
            TerminalInfo::win(w, format!("Player {w} gained more value"))
        };
        let verdict = info.detail.clone();
        self.terminal = Some(info);
        format!("Negotiation over. {summary} {verdict}.")
    }
}

impl Game for SimpleNegotiation {
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
        let me = self.to_move;
        let mut samples = vec!["Deny".to_owned()];
        if self.parse(me, "Accept").is_ok() {
            samples.push("Accept".to_owned());
        }
        for give in Resource::ALL {
            for receive in Resource::ALL {
                if give == receive {
                    continue;
                }
                for x in 1..=2u32 {
                    if self.inventory[me][give as usize] < x {
                        continue;
                    }
                    for y in 1..=2u32 {
                        samples.push(format!("Offer: give {x} {give} -> receive {y} {receive}"));
                    }
                }
            }
        }
        Ok(LegalActions::Open { samples })
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        ensure_turn(self, player)?;
        let mv = self.parse(player, token)?;
        let mut text = match mv {
            Move::Offer(offer) => {
                self.pending = Some(offer);
                format!("Player {player} proposes: {offer}.")
            }
            Move::Accept => {
                let offer = self.pending.take().expect("validated");
                let (gn, gr) = offer.give;
                let (rn, rr) = offer.receive;
                self.inventory[offer.from][gr as usize] -= gn;
                self.inventory[player][gr as usize] += gn;
                self.inventory[player][rr as usize] -= rn;
                self.inventory[offer.from][rr as usize] += rn;
                self.trades += 1;
                format!(
                    "Player {player} accepts. Player {} gave {gn} {gr} and received {rn} {rr}.",
                    offer.from
                )
            }
            Move::Deny => match self.pending.take() {
                Some(_) => format!("Player {player} rejects the offer."),
                None => format!("Player {player} passes."),
            },
        };
        self.turns += 1;
        if self.turns >= self.config.max_turns {
            text.push(' ');
            text.push_str(&self.settle());
        } else {
            self.to_move = 1 - player;
        }
        Ok(vec![Message::broadcast(text)])
    }

    fn render(&self, viewer: usize) -> String {
        let pending = match self.pending {
            Some(o) => format!("Player {} offers: {o}", o.from),
            None => "none".to_owned(),
        };
        format!(
            "Your resources: {}\nYour values: {}\nPending offer: {pending}\nTurn {}/{}",
            describe(&self.inventory[viewer]),
            describe(&self.values[viewer]),
            self.turns,
            self.config.max_turns
        )
    }

    fn terminal(&self) -> Option<&TerminalInfo> {
        self.terminal.as_ref()
    }

    fn standing(&self) -> Ranking {
        if self.trades == 0 {
            return vec![vec![0, 1]];
        }
        crate::game::rank_by_key(&[self.gain(0), self.gain(1)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game() -> SimpleNegotiation {
        SimpleNegotiation::with_holdings(
            NegotiationConfig { max_turns: 4, ..Default::default() },
            [[10, 10, 10, 10, 10], [10, 10, 10, 10, 10]],
            [[5, 15, 10, 10, 10], [15, 5, 10, 10, 10]],
        )
    }

    #[test]
    fn offer_accept_moves_goods() {
        let mut g = game();
        g.apply(0, "Offer: give 3 Wheat -> receive 3 Wood").unwrap();
        assert!(g.pending().is_some());
        g.apply(1, "accept").unwrap();
        assert_eq!(g.inventory(0), [7, 13, 10, 10, 10]);
        assert_eq!(g.inventory(1), [13, 7, 10, 10, 10]);
        assert_eq!(g.gain(0), -15 + 45);
        assert_eq!(g.gain(1), 45 - 15);
        g.apply(0, "Deny").unwrap();
        g.apply(1, "Deny").unwrap();
        // equal gains
        assert_eq!(g.terminal().unwrap().ranking, vec![vec![0, 1]]);
    }

    #[test]
    fn no_trade_is_a_draw() {
        let mut g = game();
        for i in 0..4 {
            g.apply(i % 2, "Deny").unwrap();
        }
        assert_eq!(g.terminal().unwrap().detail, "no trade was made");
    }

    #[test]
    fn rejects_bad_offers() {
        let mut g = game();
        assert!(g.apply(0, "Accept").is_err());
        assert!(g.apply(0, "Offer: give 11 Ore -> receive 1 Wood").is_err());
        assert!(g.apply(0, "Offer: give 1 Ore -> receive 1 Ore").is_err());
        assert!(g.apply(0, "Offer: give 1 Gold -> receive 1 Ore").is_err());
        assert!(g.apply(0, "Offer: give 0 Ore -> receive 1 Wood").is_err());
        assert!(g.apply(0, "offer: GIVE 1 ore -> receive 2 wheat").is_ok());
    }

    #[test]
    fn samples_are_legal() {
        let g = game();
        for s in g.legal_actions().unwrap().candidates() {
            assert!(g.validate(0, s).is_ok(), "{s}");
        }
    }
}
