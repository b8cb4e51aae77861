use crate::game::{ensure_turn, Game, GameError, GameRules, LegalActions};
use crate::message::Message;
use crate::outcome::{Ranking, TerminalInfo};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;

pub const ENV_ID: &str = "TicTacToe-v0";

const LINES: [[usize; 3]; 8] = [
    [0, 1, 2],
    [3, 4, 5],
    [6, 7, 8],
    [0, 3, 6],
    [1, 4, 7],
    [2, 5, 8],
    [0, 4, 8],
    [2, 4, 6],
];

pub fn rules() -> GameRules {
    GameRules {
        env_id: ENV_ID,
        min_players: 2,
        max_players: 2,
        turn_limit: 9,
        draws_possible: true,
        description: "Two players alternate marking cells of a 3x3 grid (Player 0 is X, Player 1 is O). \
                      Three of your marks in a row, column or diagonal wins; a full board is a draw.",
        action_format: "the cell number 0-8 in brackets, row by row from the top-left, e.g. [4]",
    }
}

pub fn spec() -> GameSpec {
    GameSpec::new(rules(), |players, seeds| {
        let (g, m) = TicTacToe::new(players, seeds);
        (Box::new(g), m)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TicTacToe {
    board: [Option<usize>; 9],
    to_move: usize,
    terminal: Option<TerminalInfo>,
}

fn mark(player: usize) -> char {
    if player == 0 {
        'X'
    } else {
        'O'
    }
}

impl TicTacToe {
    pub fn new(_players: usize, _seeds: &SeedStreams) -> (Self, Vec<Message>) {
        let game = Self {
            board: [None; 9],
            to_move: 0,
            terminal: None,
        };
        let board = game.render(0);
        (game, vec![Message::broadcast(format!("Empty board:\n{board}"))])
    }

    pub fn board(&self) -> &[Option<usize>; 9] {
        &self.board
    }

    pub fn winner(board: &[Option<usize>; 9]) -> Option<usize> {
        LINES.iter().find_map(|line| match line.map(|i| board[i]) {
            [Some(a), Some(b), Some(c)] if a == b && b == c => Some(a),
            _ => None,
        })
    }
}

impl Game for TicTacToe {
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
            (0..9)
                .filter(|&i| self.board[i].is_none())
                .map(|i| i.to_string())
                .collect(),
        ))
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        ensure_turn(self, player)?;
        let cell: usize = token
            .trim()
            .parse()
            .map_err(|_| GameError::illegal(token, "expected a cell number 0-8"))?;
        if cell > 8 {
            return Err(GameError::illegal(token, "cell out of range"));
        }
        if self.board[cell].is_some() {
            return Err(GameError::illegal(token, "cell already taken"));
        }
        self.board[cell] = Some(player);
        let mut text = format!(
            "Player {player} placed {} on cell {cell}.\n{}",
            mark(player),
            self.render(player)
        );
        if let Some(w) = Self::winner(&self.board) {
            self.terminal = Some(TerminalInfo::win(w, format!("Player {w} completed a line")));
            text.push_str(&format!("\nPlayer {w} wins."));
        } else if self.board.iter().all(Option::is_some) {
            self.terminal = Some(TerminalInfo::draw(2, "board full"));
            text.push_str("\nThe board is full: draw.");
        } else {
            self.to_move = 1 - player;
        }
        Ok(vec![Message::broadcast(text)])
    }

    fn render(&self, _viewer: usize) -> String {
        self.board
            .chunks(3)
            .map(|row| {
                row.iter()
                    .map(|c| c.map_or('.', mark).to_string())
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
        vec![vec![0, 1]]
    }
}
