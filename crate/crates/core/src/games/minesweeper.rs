use std::collections::VecDeque;

use rand::seq::index::sample;

use crate::game::{ensure_turn, Game, GameError, GameRules, LegalActions};
use crate::message::Message;
use crate::outcome::{Ranking, TerminalInfo};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;

pub const ENV_ID: &str = "Minesweeper-v0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinesweeperConfig {
    pub rows: usize,
    pub cols: usize,
    pub mines: usize,
}

impl Default for MinesweeperConfig {
    fn default() -> Self {
        Self {
            rows: 8,
            cols: 8,
            mines: 10,
        }
    }
}

pub fn rules() -> GameRules {
    let c = MinesweeperConfig::default();
    GameRules {
        env_id: ENV_ID,
        min_players: 1,
        max_players: 1,
        turn_limit: c.rows * c.cols - c.mines,
        draws_possible: false,
        description: "Minesweeper on an 8x8 grid with 10 hidden mines. Reveal a cell by giving its row and \
                      column (0-based). A revealed number counts the mines among the 8 neighbours; zeros \
                      open their neighbourhood automatically. Your first reveal is always safe. Reveal \
                      every safe cell to win; revealing a mine loses.",
        action_format: "[row col], e.g. [3 5]",
    }
}

pub fn spec() -> GameSpec {
    spec_with(MinesweeperConfig::default())
}

pub fn spec_with(config: MinesweeperConfig) -> GameSpec {
    let mut rules = rules();
    rules.turn_limit = config.rows * config.cols - config.mines;
    GameSpec::new(rules, move |players, seeds| {
        let (g, m) = Minesweeper::with_config(config, players, seeds);
        (Box::new(g), m)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Minesweeper {
    config: MinesweeperConfig,
    mines: Vec<bool>,
    revealed: Vec<bool>,
    started: bool,
    terminal: Option<TerminalInfo>,
}

impl Minesweeper {
    pub fn new(players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        Self::with_config(MinesweeperConfig::default(), players, seeds)
    }

    pub fn with_config(config: MinesweeperConfig, _players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        let cells = config.rows * config.cols;
        let mut mines = vec![false; cells];
        for i in sample(&mut seeds.stream("mines"), cells, config.mines.min(cells - 1)) {
            mines[i] = true;
        }
        let game = Self::with_mines(config, mines);
        let text = format!(
            "{}x{} board with {} mines. Your first reveal is safe.\n{}",
            config.rows,
            config.cols,
            config.mines,
            game.render(0)
        );
        (game, vec![Message::private(0, text)])
    }

    /// Board with an explicit mine layout (row-major).
    pub fn with_mines(config: MinesweeperConfig, mines: Vec<bool>) -> Self {
        let cells = config.rows * config.cols;
        assert_eq!(mines.len(), cells, "mine layout must cover the board");
        Self {
            config,
            mines,
            revealed: vec![false; cells],
            started: false,
            terminal: None,
        }
    }

    pub fn is_mine(&self, row: usize, col: usize) -> bool {
        self.mines[row * self.config.cols + col]
    }

    pub fn is_revealed(&self, row: usize, col: usize) -> bool {
        self.revealed[row * self.config.cols + col]
    }

    fn neighbours(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let (r, c) = ((idx / self.config.cols) as isize, (idx % self.config.cols) as isize);
        let (rows, cols) = (self.config.rows as isize, self.config.cols as isize);
        (-1..=1)
            .flat_map(move |dr| (-1..=1).map(move |dc| (r + dr, c + dc)))
            .filter(move |&(nr, nc)| (nr, nc) != (r, c) && nr >= 0 && nc >= 0 && nr < rows && nc < cols)
            .map(move |(nr, nc)| (nr * cols + nc) as usize)
    }

    pub fn adjacent_mines(&self, row: usize, col: usize) -> usize {
        self.neighbours(row * self.config.cols + col)
            .filter(|&n| self.mines[n])
            .count()
    }

    fn parse(&self, token: &str) -> Result<usize, GameError> {
        let parts: Vec<&str> = token.split_whitespace().collect();
        let [r, c] = parts[..] else {
            return Err(GameError::illegal(token, "expected `row col`"));
        };
        let (Ok(r), Ok(c)) = (r.parse::<usize>(), c.parse::<usize>()) else {
            return Err(GameError::illegal(token, "row and column must be numbers"));
        };
        if r >= self.config.rows || c >= self.config.cols {
            return Err(GameError::illegal(token, "off the board"));
        }
        let idx = r * self.config.cols + c;
        if self.revealed[idx] {
            return Err(GameError::illegal(token, "cell already revealed"));
        }
        Ok(idx)
    }

    fn flood(&mut self, start: usize) {
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            if self.revealed[i] {
                continue;
            }
            self.revealed[i] = true;
            let (r, c) = (i / self.config.cols, i % self.config.cols);
            if self.adjacent_mines(r, c) == 0 {
                let next: Vec<usize> = self.neighbours(i).filter(|&n| !self.revealed[n]).collect();
                queue.extend(next);
            }
        }
    }
}

impl Game for Minesweeper {
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
        let out = (0..self.revealed.len())
            .filter(|&i| !self.revealed[i])
            .map(|i| format!("{} {}", i / self.config.cols, i % self.config.cols))
            .collect();
        Ok(LegalActions::Finite(out))
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        ensure_turn(self, player)?;
        let idx = self.parse(token)?;
        if !self.started {
            self.started = true;
            if self.mines[idx] {
                // relocate to the first free cell in row-major order
                let free = (0..self.mines.len())
                    .find(|&i| i != idx && !self.mines[i])
                    .expect("board has a free cell");
                self.mines[idx] = false;
                self.mines[free] = true;
            }
        }
        let (r, c) = (idx / self.config.cols, idx % self.config.cols);
        if self.mines[idx] {
            self.revealed[idx] = true;
            self.terminal = Some(TerminalInfo::failure(format!("hit a mine at {r} {c}")));
            return Ok(vec![Message::private(0, format!("Boom! ({r}, {c}) was a mine.\n{}", self.render(0)))]);
        }
        self.flood(idx);
        let hidden_safe = (0..self.mines.len())
            .filter(|&i| !self.revealed[i] && !self.mines[i])
            .count();
        let mut text = format!("Revealed ({r}, {c}).\n{}", self.render(0));
        if hidden_safe == 0 {
            self.terminal = Some(TerminalInfo::success("cleared the board"));
            text.push_str("\nAll safe cells revealed. You win!");
        }
        Ok(vec![Message::private(0, text)])
    }

    fn render(&self, _viewer: usize) -> String {
        let done = self.terminal.is_some();
        (0..self.config.rows)
            .map(|r| {
                (0..self.config.cols)
                    .map(|c| {
                        let i = r * self.config.cols + c;
                        if self.revealed[i] && self.mines[i] {
                            '*'
                        } else if self.revealed[i] {
                            match self.adjacent_mines(r, c) {
                                0 => '.',
                                n => char::from_digit(n as u32, 10).unwrap_or('?'),
                            }
                        } else if done && self.mines[i] {
                            '*'
                        } else {
                            '#'
                        }
                    })
                    .map(String::from)
                    .collect::<Vec<_>>()
                    .join(" ")
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
