use crate::game::{ensure_turn, Game, GameError, GameRules, LegalActions};
use crate::message::Message;
use crate::outcome::{Ranking, TerminalInfo};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;

pub const ENV_ID: &str = "Nim-v0";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NimConfig {
    pub piles: Vec<u32>,
}

impl Default for NimConfig {
    fn default() -> Self {
        Self {
            piles: vec![3, 4, 5],
        }
    }
}

pub fn rules() -> GameRules {
    GameRules {
        env_id: ENV_ID,
        min_players: 2,
        max_players: 2,
        turn_limit: 12,
        draws_possible: false,
        description: "Normal-play Nim. Piles of objects lie on the table; on your turn remove one or more \
                      objects from a single pile. Whoever takes the last object wins.",
        action_format: "[pile count] with a 0-based pile index, e.g. [2 3] takes 3 from pile 2",
    }
}

pub fn spec() -> GameSpec {
    spec_with(NimConfig::default())
}

pub fn spec_with(config: NimConfig) -> GameSpec {
    let mut rules = rules();
    rules.turn_limit = config.piles.iter().sum::<u32>().max(1) as usize;
    GameSpec::new(rules, move |players, seeds| {
        let (g, m) = Nim::with_config(config.clone(), players, seeds);
        (Box::new(g), m)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nim {
    piles: Vec<u32>,
    to_move: usize,
    terminal: Option<TerminalInfo>,
}

impl Nim {
    pub fn new(players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        Self::with_config(NimConfig::default(), players, seeds)
    }

    pub fn with_config(config: NimConfig, _players: usize, _seeds: &SeedStreams) -> (Self, Vec<Message>) {
        let game = Self::from_piles(config.piles);
        let text = format!("Starting piles: {}", game.render(0));
        (game, vec![Message::broadcast(text)])
    }

    /// A position with player 0 to move. All-empty piles are already terminal,
    /// won by player 1 (who notionally took the last object).
    pub fn from_piles(piles: Vec<u32>) -> Self {
        let terminal = piles
            .iter()
            .all(|&p| p == 0)
            .then(|| TerminalInfo::win(1, "no objects to take"));
        Self {
            piles,
            to_move: 0,
            terminal,
        }
    }

    pub fn piles(&self) -> &[u32] {
        &self.piles
    }

    fn parse(&self, token: &str) -> Result<(usize, u32), GameError> {
        let parts: Vec<&str> = token.split_whitespace().collect();
        let [pile, count] = parts[..] else {
            return Err(GameError::illegal(token, "expected `pile count`"));
        };
        let pile: usize = pile
            .parse()
            .map_err(|_| GameError::illegal(token, "pile must be a number"))?;
        let count: u32 = count
            .parse()
            .map_err(|_| GameError::illegal(token, "count must be a number"))?;
        if pile >= self.piles.len() {
            return Err(GameError::illegal(token, "no such pile"));
        }
        if count == 0 || count > self.piles[pile] {
            return Err(GameError::illegal(token, "count must be between 1 and the pile size"));
        }
        Ok((pile, count))
    }
}

impl Game for Nim {
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
        let mut out = Vec::new();
        for (pile, &size) in self.piles.iter().enumerate() {
            for count in 1..=size {
                out.push(format!("{pile} {count}"));
            }
        }
        Ok(LegalActions::Finite(out))
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        ensure_turn(self, player)?;
        let (pile, count) = self.parse(token)?;
        self.piles[pile] -= count;
        let mut text = format!(
            "Player {player} took {count} from pile {pile}. Piles: {}",
            self.render(player)
        );
        if self.piles.iter().all(|&p| p == 0) {
            self.terminal = Some(TerminalInfo::win(player, format!("Player {player} took the last object")));
            text.push_str(&format!("\nPlayer {player} took the last object and wins."));
        } else {
            self.to_move = 1 - player;
        }
        Ok(vec![Message::broadcast(text)])
    }

    fn render(&self, _viewer: usize) -> String {
        let sizes: Vec<String> = self.piles.iter().map(u32::to_string).collect();
        format!("[{}]", sizes.join(", "))
    }

    fn terminal(&self) -> Option<&TerminalInfo> {
        self.terminal.as_ref()
    }

    fn standing(&self) -> Ranking {
        vec![vec![0, 1]]
    }
}
