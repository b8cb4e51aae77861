use crate::game::{ensure_turn, Game, GameError, GameRules, LegalActions};
use crate::message::Message;
use crate::outcome::{Ranking, TerminalInfo};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;

pub const ENV_ID: &str = "ConnectFour-v0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConnectFourConfig {
    pub columns: usize,
    pub rows: usize,
}

impl Default for ConnectFourConfig {
    fn default() -> Self {
        Self { columns: 7, rows: 6 }
    }
}

pub fn rules() -> GameRules {
    GameRules {
        env_id: ENV_ID,
        min_players: 2,
        max_players: 2,
        turn_limit: 42,
        draws_possible: true,
        description: "Players take turns dropping a disc into one of 7 columns of a 6-row grid; the disc \
                      falls to the lowest empty cell. Four of your discs in a line (horizontal, vertical \
                      or diagonal) wins. A full grid is a draw. Player 0 plays X, Player 1 plays O.",
        action_format: "a column number 0-6 in brackets, e.g. [3]",
    }
}

pub fn spec() -> GameSpec {
    spec_with(ConnectFourConfig::default())
}

pub fn spec_with(config: ConnectFourConfig) -> GameSpec {
    let mut rules = rules();
    rules.turn_limit = config.columns * config.rows;
    GameSpec::new(rules, move |players, seeds| {
        let (g, m) = ConnectFour::with_config(config, players, seeds);
        (Box::new(g), m)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectFour {
    config: ConnectFourConfig,
    /// `cells[row][col]`, row 0 at the bottom.
    cells: Vec<Vec<Option<usize>>>,
    to_move: usize,
    terminal: Option<TerminalInfo>,
}

impl ConnectFour {
    pub fn new(players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        Self::with_config(ConnectFourConfig::default(), players, seeds)
    }

    pub fn with_config(
        config: ConnectFourConfig,
        _players: usize,
        _seeds: &SeedStreams,
    ) -> (Self, Vec<Message>) {
        let game = Self {
            config,
            cells: vec![vec![None; config.columns]; config.rows],
            to_move: 0,
            terminal: None,
        };
        let board = game.render(0);
        (game, vec![Message::broadcast(format!("Empty grid:\n{board}"))])
    }

    pub fn cells(&self) -> &[Vec<Option<usize>>] {
        &self.cells
    }

    fn column_height(&self, col: usize) -> usize {
        self.cells.iter().take_while(|row| row[col].is_some()).count()
    }

    fn connects_four(&self, row: usize, col: usize) -> bool {
        let Some(owner) = self.cells[row][col] else {
            return false;
        };
        let rows = self.config.rows as isize;
        let cols = self.config.columns as isize;
        [(0isize, 1isize), (1, 0), (1, 1), (1, -1)].iter().any(|&(dr, dc)| {
            let mut count = 1;
            for sign in [1isize, -1] {
                let (mut r, mut c) = (row as isize + sign * dr, col as isize + sign * dc);
                while (0..rows).contains(&r)
                    && (0..cols).contains(&c)
                    && self.cells[r as usize][c as usize] == Some(owner)
                {
                    count += 1;
                    r += sign * dr;
                    c += sign * dc;
                }
            }
            count >= 4
        })
    }
}

impl Game for ConnectFour {
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
        Ok(LegalActions::Finite(
            (0..self.config.columns)
                .filter(|&c| self.column_height(c) < self.config.rows)
                .map(|c| c.to_string())
                .collect(),
        ))
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        ensure_turn(self, player)?;
        let col: usize = token
            .trim()
            .parse()
            .map_err(|_| GameError::illegal(token, "expected a column number"))?;
        if col >= self.config.columns {
            return Err(GameError::illegal(token, "column out of range"));
        }
        let row = self.column_height(col);
        if row >= self.config.rows {
            return Err(GameError::illegal(token, "column is full"));
        }
        self.cells[row][col] = Some(player);
        let mut text = format!(
            "Player {player} dropped a disc in column {col}.\n{}",
            self.render(player)
        );
        if self.connects_four(row, col) {
            self.terminal = Some(TerminalInfo::win(player, format!("Player {player} connected four")));
            text.push_str(&format!("\nPlayer {player} connects four and wins."));
        } else if self.cells.iter().flatten().all(Option::is_some) {
            self.terminal = Some(TerminalInfo::draw(2, "grid full"));
            text.push_str("\nThe grid is full: draw.");
        } else {
            self.to_move = 1 - player;
        }
        Ok(vec![Message::broadcast(text)])
    }

    fn render(&self, _viewer: usize) -> String {
        let mut lines: Vec<String> = self
            .cells
            .iter()
            .rev()
            .map(|row| {
                row.iter()
                    .map(|c| match c {
                        None => ".",
                        Some(0) => "X",
                        Some(_) => "O",
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        lines.push(
            (0..self.config.columns)
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        );
        lines.join("\n")
    }

    fn terminal(&self) -> Option<&TerminalInfo> {
        self.terminal.as_ref()
    }

    fn standing(&self) -> Ranking {
        vec![vec![0, 1]]
    }
}
