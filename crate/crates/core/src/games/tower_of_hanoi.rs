use crate::game::{ensure_turn, Game, GameError, GameRules, LegalActions};
use crate::message::Message;
use crate::outcome::{Ranking, TerminalInfo};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;

pub const ENV_ID: &str = "TowerOfHanoi-v0";
const PEGS: [char; 3] = ['A', 'B', 'C'];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HanoiConfig {
    pub disks: u32,
    pub max_moves: usize,
}

impl Default for HanoiConfig {
    fn default() -> Self {
        Self {
            disks: 3,
            max_moves: 50,
        }
    }
}

pub fn rules() -> GameRules {
    GameRules {
        env_id: ENV_ID,
        min_players: 1,
        max_players: 1,
        turn_limit: HanoiConfig::default().max_moves,
        draws_possible: false,
        description: "Tower of Hanoi with 3 disks stacked on peg A, largest at the bottom. Move the whole stack \
                      to peg C within 50 moves. Move one top disk at a time and never place a larger disk on \
                      a smaller one.",
        action_format: "[src dst], e.g. [A C]",
    }
}

pub fn spec() -> GameSpec {
    spec_with(HanoiConfig::default())
}

pub fn spec_with(config: HanoiConfig) -> GameSpec {
    let mut rules = rules();
    rules.turn_limit = config.max_moves;
    GameSpec::new(rules, move |players, seeds| {
        let (g, m) = TowerOfHanoi::with_config(config, players, seeds);
        (Box::new(g), m)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerOfHanoi {
    config: HanoiConfig,
    pegs: [Vec<u32>; 3],
    moves: usize,
    terminal: Option<TerminalInfo>,
}

fn peg_index(s: &str) -> Option<usize> {
    match s.to_ascii_uppercase().as_str() {
        "A" => Some(0),
        "B" => Some(1),
        "C" => Some(2),
        _ => None,
    }
}

impl TowerOfHanoi {
    pub fn new(players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        Self::with_config(HanoiConfig::default(), players, seeds)
    }

    pub fn with_config(config: HanoiConfig, _players: usize, _seeds: &SeedStreams) -> (Self, Vec<Message>) {
        let game = Self::start(config);
        let text = format!("Starting position:\n{}", game.render(0));
        (game, vec![Message::private(0, text)])
    }

    pub fn start(config: HanoiConfig) -> Self {
        Self {
            config,
            pegs: [(1..=config.disks).rev().collect(), Vec::new(), Vec::new()],
            moves: 0,
            terminal: None,
        }
    }

    pub fn pegs(&self) -> &[Vec<u32>; 3] {
        &self.pegs
    }

    pub fn moves(&self) -> usize {
        self.moves
    }

    fn parse(&self, token: &str) -> Result<(usize, usize), GameError> {
        let parts: Vec<&str> = token.split_whitespace().collect();
        let [a, b] = parts[..] else {
            return Err(GameError::illegal(token, "expected `src dst`"));
        };
        let (Some(src), Some(dst)) = (peg_index(a), peg_index(b)) else {
            return Err(GameError::illegal(token, "pegs are A, B and C"));
        };
        let Some(&disk) = self.pegs[src].last() else {
            return Err(GameError::illegal(token, format!("peg {} is empty", PEGS[src])));
        };
        if src == dst {
            return Err(GameError::illegal(token, "source and destination are the same"));
        }
        if self.pegs[dst].last().is_some_and(|&top| top < disk) {
            return Err(GameError::illegal(token, "cannot place a larger disk on a smaller one"));
        }
        Ok((src, dst))
    }
}

impl Game for TowerOfHanoi {
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
        let mut out = Vec::new();
        for s in PEGS {
            for d in PEGS {
                let token = format!("{s} {d}");
                if self.parse(&token).is_ok() {
                    out.push(token);
                }
            }
        }
        Ok(LegalActions::Finite(out))
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        ensure_turn(self, player)?;
        let (src, dst) = self.parse(token)?;
        let disk = self.pegs[src].pop().expect("checked non-empty");
        self.pegs[dst].push(disk);
        self.moves += 1;
        let mut text = format!("Moved disk {disk} from {} to {}.\n{}", PEGS[src], PEGS[dst], self.render(0));
        if self.pegs[2].len() == self.config.disks as usize {
            self.terminal = Some(TerminalInfo::success(format!("solved in {} moves", self.moves)));
            text.push_str("\nSolved!");
        } else if self.moves >= self.config.max_moves {
            self.terminal = Some(TerminalInfo::failure("move limit reached"));
            text.push_str("\nMove limit reached.");
        }
        Ok(vec![Message::private(0, text)])
    }

    fn render(&self, _viewer: usize) -> String {
        PEGS.iter()
            .zip(&self.pegs)
            .map(|(name, disks)| {
                let d: Vec<String> = disks.iter().map(u32::to_string).collect();
                format!("{name}: [{}]", d.join(" "))
            })
            .collect::<Vec<_>>()
            .join("\n")
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
    fn optimal_solution_takes_seven_moves() {
        let mut g = TowerOfHanoi::start(HanoiConfig::default());
        for m in ["A C", "A B", "C B", "A C", "B A", "B C", "A C"] {
            g.apply(0, m).unwrap();
        }
        assert_eq!(g.terminal().unwrap().kind, TerminalKind::Success);
        assert_eq!(g.moves(), 7);
    }

    #[test]
    fn illegal_moves() {
        let mut g = TowerOfHanoi::start(HanoiConfig::default());
        assert!(g.apply(0, "B C").is_err());
        assert!(g.apply(0, "A A").is_err());
        g.apply(0, "a c").unwrap();
        assert!(g.apply(0, "A C").is_err(), "2 onto 1");
        assert_eq!(g.legal_actions().unwrap().candidates(), ["A B", "C A", "C B"]);
    }
}
