//! Sealed-bid, first-price auction of several items at once.

use rand::Rng;

use crate::game::{ensure_turn, rank_by_key, Game, GameError, GameRules, LegalActions};
use crate::message::{Message, Visibility};
use crate::outcome::{Ranking, TerminalInfo, TerminalKind};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;

pub const ENV_ID: &str = "BlindAuction-v0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuctionConfig {
    pub items: usize,
    pub value: (u32, u32),
    pub budget: u32,
}

impl Default for AuctionConfig {
    fn default() -> Self {
        Self {
            items: 5,
            value: (5, 100),
            budget: 1000,
        }
    }
}

pub fn rules() -> GameRules {
    GameRules {
        env_id: ENV_ID,
        min_players: 3,
        max_players: 6,
        turn_limit: 6,
        draws_possible: true,
        description: "Sealed-bid auction of 5 items. Each player privately values every item between 5 and 100 \
                      and has a budget of 1000. Every player submits one secret bid per item, in one action, \
                      with the bids summing to at most the budget. The highest bid takes each item (ties go \
                      to the lower player number; an all-zero item goes unsold) and the winner pays their \
                      bid. Your score is the value of items won minus what you paid; players are ranked by \
                      score.",
        action_format: "[bid b1 b2 b3 b4 b5], e.g. [bid 10 0 35 0 5]",
    }
}

pub fn spec() -> GameSpec {
    spec_with(AuctionConfig::default())
}

pub fn spec_with(config: AuctionConfig) -> GameSpec {
    GameSpec::new(rules(), move |players, seeds| {
        let (g, m) = BlindAuction::with_config(config, players, seeds);
        (Box::new(g), m)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlindAuction {
    config: AuctionConfig,
    values: Vec<Vec<u32>>,
    bids: Vec<Option<Vec<u32>>>,
    payoffs: Vec<i64>,
    terminal: Option<TerminalInfo>,
}

impl BlindAuction {
    pub fn new(players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        Self::with_config(AuctionConfig::default(), players, seeds)
    }

    pub fn with_config(config: AuctionConfig, players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        let mut rng = seeds.stream("valuations");
        let values = (0..players)
            .map(|_| {
                (0..config.items)
                    .map(|_| rng.random_range(config.value.0..=config.value.1))
                    .collect()
            })
            .collect();
        let game = Self::with_values(config, values);
        let msgs = (0..players)
            .map(|p| {
                Message::private(
                    p,
                    format!("Your item values: {:?}. Budget: {}.", game.values[p], config.budget),
                )
            })
            .collect();
        (game, msgs)
    }

    pub fn with_values(config: AuctionConfig, values: Vec<Vec<u32>>) -> Self {
        let n = values.len();
        Self {
            config,
            values,
            bids: vec![None; n],
            payoffs: vec![0; n],
            terminal: None,
        }
    }

    pub fn payoffs(&self) -> &[i64] {
        &self.payoffs
    }

    fn parse(&self, token: &str) -> Result<Vec<u32>, GameError> {
        let mut parts = token.split_whitespace();
        if !parts.next().is_some_and(|w| w.eq_ignore_ascii_case("bid")) {
            return Err(GameError::illegal(token, "expected `bid` followed by one amount per item"));
        }
        let amounts: Vec<u32> = parts
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| GameError::illegal(token, "amounts must be whole numbers"))?;
        if amounts.len() != self.config.items {
            return Err(GameError::illegal(token, format!("need exactly {} amounts", self.config.items)));
        }
        let total: u64 = amounts.iter().map(|&a| u64::from(a)).sum();
        if total > u64::from(self.config.budget) {
            return Err(GameError::illegal(token, format!("bids total {total}, over the budget")));
        }
        Ok(amounts)
    }

    fn resolve(&mut self) -> String {
        let bids: Vec<Vec<u32>> = self.bids.iter().map(|b| b.clone().expect("all in")).collect();
        let mut lines = Vec::new();
        for item in 0..self.config.items {
            let (winner, top) = bids
                .iter()
                .enumerate()
                .map(|(p, b)| (p, b[item]))
                .fold((0, 0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if top == 0 {
                lines.push(format!("Item {item}: no bids"));
                continue;
            }
            self.payoffs[winner] += i64::from(self.values[winner][item]) - i64::from(top);
            lines.push(format!("Item {item}: Player {winner} wins for {top}"));
        }
        let ranking = rank_by_key(&self.payoffs);
        self.terminal = Some(TerminalInfo::new(TerminalKind::Rank, ranking, "auction closed"));
        let scores: Vec<String> = self
            .payoffs
            .iter()
            .enumerate()
            .map(|(p, s)| format!("Player {p}: {s}"))
            .collect();
        format!("All bids are in.\n{}\nScores: {}", lines.join("\n"), scores.join(", "))
    }
}

impl Game for BlindAuction {
    fn num_players(&self) -> usize {
        self.values.len()
    }

    fn to_move(&self) -> usize {
        self.bids.iter().position(Option::is_none).unwrap_or(0)
    }

    fn legal_actions(&self) -> Result<LegalActions, GameError> {
        if self.terminal.is_some() {
            return Err(GameError::Terminal);
        }
        let own = &self.values[self.to_move()];
        let fmt = |v: Vec<u32>| {
            let s: Vec<String> = v.iter().map(u32::to_string).collect();
            format!("bid {}", s.join(" "))
        };
        let mut samples: Vec<String> = [0u32, 25, 50, 75, 100]
            .iter()
            .map(|pct| fmt(own.iter().map(|v| v * pct / 100).collect()))
            .collect();
        for item in 0..self.config.items {
            let mut v = vec![0; self.config.items];
            v[item] = own[item];
            samples.push(fmt(v));
        }
        samples.retain(|s| self.parse(s).is_ok());
        Ok(LegalActions::Open { samples })
    }

    fn action_visibility(&self, player: usize) -> Visibility {
        Visibility::only(player)
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        ensure_turn(self, player)?;
        let amounts = self.parse(token)?;
        self.bids[player] = Some(amounts);
        if self.bids.iter().any(Option::is_none) {
            return Ok(vec![Message::private(player, "Your sealed bids are recorded.")]);
        }
        let text = self.resolve();
        Ok(vec![Message::broadcast(text)])
    }

    fn render(&self, viewer: usize) -> String {
        let submitted = self.bids.iter().filter(|b| b.is_some()).count();
        let mine = match &self.bids[viewer] {
            Some(b) => format!("{b:?}"),
            None => "not yet submitted".to_owned(),
        };
        format!(
            "Your values: {:?}\nBudget: {}\nYour bids: {mine}\nSubmitted: {submitted}/{}",
            self.values[viewer],
            self.config.budget,
            self.values.len()
        )
    }

    fn terminal(&self) -> Option<&TerminalInfo> {
        self.terminal.as_ref()
    }

    fn standing(&self) -> Ranking {
        rank_by_key(&self.payoffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn auction() -> BlindAuction {
        BlindAuction::with_values(
            AuctionConfig::default(),
            vec![vec![50, 10, 10, 10, 10], vec![40, 90, 10, 10, 10], vec![10, 10, 10, 10, 60]],
        )
    }

    #[test]
    fn highest_bid_wins_lowest_index_breaks_ties() {
        let mut g = auction();
        g.apply(0, "bid 30 0 0 0 0").unwrap();
        g.apply(1, "bid 30 50 0 0 0").unwrap();
        g.apply(2, "bid 0 0 0 0 20").unwrap();
        assert_eq!(g.payoffs(), &[20, 40, 40]);
        assert_eq!(g.terminal().unwrap().ranking, vec![vec![1, 2], vec![0]]);
    }

    #[test]
    fn budget_and_format_enforced() {
        let g = auction();
        assert!(g.validate(0, "bid 600 500 0 0 0").is_err());
        assert!(g.validate(0, "bid 1 2 3 4").is_err());
        assert!(g.validate(0, "offer 1 2 3 4 5").is_err());
        assert!(g.validate(0, "bid 1000 0 0 0 0").is_ok());
    }

    #[test]
    fn bids_stay_private() {
        let mut g = auction();
        let m = g.apply(0, "bid 1 1 1 1 1").unwrap();
        assert!(!m[0].visibility.includes(1));
        assert!(!g.render(1).contains("[1, 1, 1, 1, 1]"));
        assert_eq!(g.to_move(), 1);
    }

    #[test]
    fn samples_are_legal() {
        let (g, _) = BlindAuction::new(3, &SeedStreams::new(2));
        let legal = g.legal_actions().unwrap();
        assert!(legal.candidates().len() >= 5);
        for s in legal.candidates() {
            assert!(g.validate(0, s).is_ok());
        }
    }
}
