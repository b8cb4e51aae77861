//! Repeated prisoner's dilemma. Each round both players choose in private
//! (player 0 then player 1) and the choices are revealed together.

use crate::game::{ensure_turn, rank_by_key, Game, GameError, GameRules, LegalActions};
use crate::message::{Message, Visibility};
use crate::outcome::{Ranking, TerminalInfo};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;

pub const ENV_ID: &str = "IteratedPrisonersDilemma-v0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    Cooperate,
    Defect,
}

impl Choice {
    fn as_str(&self) -> &'static str {
        match self {
            Choice::Cooperate => "cooperate",
            Choice::Defect => "defect",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrisonersConfig {
    pub rounds: usize,
    /// Temptation, reward, punishment, sucker.
    pub payoffs: (i32, i32, i32, i32),
}

impl Default for PrisonersConfig {
    fn default() -> Self {
        Self {
            rounds: 10,
            payoffs: (5, 3, 1, 0),
        }
    }
}

impl PrisonersConfig {
    pub fn payoff(&self, a: Choice, b: Choice) -> (i32, i32) {
        let (t, r, p, s) = self.payoffs;
        match (a, b) {
            (Choice::Cooperate, Choice::Cooperate) => (r, r),
            (Choice::Cooperate, Choice::Defect) => (s, t),
            (Choice::Defect, Choice::Cooperate) => (t, s),
            (Choice::Defect, Choice::Defect) => (p, p),
        }
    }
}

pub fn rules() -> GameRules {
    let c = PrisonersConfig::default();
    GameRules {
        env_id: ENV_ID,
        min_players: 2,
        max_players: 2,
        turn_limit: 2 * c.rounds,
        draws_possible: true,
        description: "Iterated prisoner's dilemma over 10 rounds. Each round both players secretly choose to \
                      cooperate or defect; choices are revealed together. Both cooperate: 3 points each. \
                      Both defect: 1 each. A defector facing a cooperator gets 5 and the cooperator 0. \
                      Higher total wins; equal totals draw.",
        action_format: "[cooperate] or [defect]",
    }
}

pub fn spec() -> GameSpec {
    spec_with(PrisonersConfig::default())
}

pub fn spec_with(config: PrisonersConfig) -> GameSpec {
    let mut rules = rules();
    rules.turn_limit = 2 * config.rounds;
    GameSpec::new(rules, move |players, seeds| {
        let (g, m) = IteratedPrisonersDilemma::with_config(config, players, seeds);
        (Box::new(g), m)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IteratedPrisonersDilemma {
    config: PrisonersConfig,
    history: Vec<(Choice, Choice)>,
    pending: Option<Choice>,
    scores: [i32; 2],
    terminal: Option<TerminalInfo>,
}

impl IteratedPrisonersDilemma {
    pub fn new(players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        Self::with_config(PrisonersConfig::default(), players, seeds)
    }

    pub fn with_config(config: PrisonersConfig, _players: usize, _seeds: &SeedStreams) -> (Self, Vec<Message>) {
        let game = Self::start(config);
        (game, vec![Message::broadcast(format!("Round 1 of {}. Choose.", config.rounds))])
    }

    pub fn start(config: PrisonersConfig) -> Self {
        Self {
            config,
            history: Vec::new(),
            pending: None,
            scores: [0, 0],
            terminal: None,
        }
    }

    pub fn scores(&self) -> [i32; 2] {
        self.scores
    }

    pub fn history(&self) -> &[(Choice, Choice)] {
        &self.history
    }
}

impl Game for IteratedPrisonersDilemma {
    fn num_players(&self) -> usize {
        2
    }

    fn to_move(&self) -> usize {
        usize::from(self.pending.is_some())
    }

    fn legal_actions(&self) -> Result<LegalActions, GameError> {
        if self.terminal.is_some() {
            return Err(GameError::Terminal);
        }
        Ok(LegalActions::Finite(vec!["cooperate".into(), "defect".into()]))
    }

    fn action_visibility(&self, player: usize) -> Visibility {
        Visibility::only(player)
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        ensure_turn(self, player)?;
        let choice = match token.trim().to_ascii_lowercase().as_str() {
            "cooperate" => Choice::Cooperate,
            "defect" => Choice::Defect,
            _ => return Err(GameError::illegal(token, "expected cooperate or defect")),
        };
        let Some(first) = self.pending.take() else {
            self.pending = Some(choice);
            return Ok(vec![Message::private(0, format!("You chose to {}.", choice.as_str()))]);
        };
        let (a, b) = self.config.payoff(first, choice);
        self.scores[0] += a;
        self.scores[1] += b;
        self.history.push((first, choice));
        let round = self.history.len();
        let mut text = format!(
            "Round {round}: Player 0 chose {}, Player 1 chose {}. Payoffs {a} and {b}. Totals: {} to {}.",
            first.as_str(),
            choice.as_str(),
            self.scores[0],
            self.scores[1]
        );
        if round >= self.config.rounds {
            let info = if self.scores[0] == self.scores[1] {
                TerminalInfo::draw(2, "equal totals")
            } else {
                let w = usize::from(self.scores[1] > self.scores[0]);
                TerminalInfo::win(w, format!("Player {w} scored more"))
            };
            text.push_str(&format!(" Game over: {}.", info.detail));
            self.terminal = Some(info);
        } else {
            text.push_str(&format!(" Round {} of {}.", round + 1, self.config.rounds));
        }
        Ok(vec![Message::broadcast(text)])
    }

    fn render(&self, _viewer: usize) -> String {
        let rows: Vec<String> = self
            .history
            .iter()
            .enumerate()
            .map(|(i, (a, b))| format!("{:>2}: {} / {}", i + 1, a.as_str(), b.as_str()))
            .collect();
        format!(
            "Scores: Player 0 = {}, Player 1 = {}\n{}",
            self.scores[0],
            self.scores[1],
            if rows.is_empty() { "No rounds yet".to_owned() } else { rows.join("\n") }
        )
    }

    fn terminal(&self) -> Option<&TerminalInfo> {
        self.terminal.as_ref()
    }

    fn standing(&self) -> Ranking {
        rank_by_key(&self.scores)
    }
}
