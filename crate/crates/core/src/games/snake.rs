//! Multi-snake arena. Moves are collected from each living snake in seat order,
//! then the tick is resolved at once.

use std::collections::{BTreeMap, VecDeque};

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::game::{ensure_turn, rank_by_key, Game, GameError, GameRules, LegalActions};
use crate::message::{Message, Visibility};
use crate::outcome::{Ranking, TerminalInfo, TerminalKind};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;

pub const ENV_ID: &str = "Snake-v0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SnakeConfig {
    pub width: i32,
    pub height: i32,
    pub apples: usize,
    pub max_ticks: usize,
}

impl Default for SnakeConfig {
    fn default() -> Self {
        Self {
            width: 10,
            height: 10,
            apples: 3,
            max_ticks: 100,
        }
    }
}

type Cell = (i32, i32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Up,
    Down,
    Left,
    Right,
}

impl Dir {
    fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "up" => Some(Dir::Up),
            "down" => Some(Dir::Down),
            "left" => Some(Dir::Left),
            "right" => Some(Dir::Right),
            _ => None,
        }
    }

    /// Row 0 is the top of the board.
    fn step(self, (x, y): Cell) -> Cell {
        match self {
            Dir::Up => (x, y - 1),
            Dir::Down => (x, y + 1),
            Dir::Left => (x - 1, y),
            Dir::Right => (x + 1, y),
        }
    }
}

pub fn rules() -> GameRules {
    let c = SnakeConfig::default();
    GameRules {
        env_id: ENV_ID,
        min_players: 2,
        max_players: 4,
        turn_limit: c.max_ticks * 4,
        draws_possible: true,
        description: "Snake on a 10x10 board shared by 2-4 snakes with 3 apples. Each tick every living snake \
                      chooses a direction in private; all snakes then move together. Eating an apple grows \
                      you by one. A snake dies on hitting a wall, any snake's body, or another head. The game \
                      lasts at most 100 ticks or until one snake is left. Longer survival ranks higher, then \
                      greater length.",
        action_format: "[up], [down], [left] or [right]",
    }
}

pub fn spec() -> GameSpec {
    spec_with(SnakeConfig::default())
}

pub fn spec_with(config: SnakeConfig) -> GameSpec {
    let mut rules = rules();
    rules.turn_limit = config.max_ticks * rules.max_players;
    GameSpec::new(rules, move |players, seeds| {
        let (g, m) = Snake::with_config(config, players, seeds);
        (Box::new(g), m)
    })
}

#[derive(Debug, Clone)]
pub struct Snake {
    config: SnakeConfig,
    /// Head at the front.
    bodies: Vec<VecDeque<Cell>>,
    apples: Vec<Cell>,
    /// Tick at which each snake died; `None` while alive.
    died: Vec<Option<usize>>,
    pending: BTreeMap<usize, Dir>,
    tick: usize,
    rng: ChaCha8Rng,
    terminal: Option<TerminalInfo>,
}

impl Snake {
    pub fn new(players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        Self::with_config(SnakeConfig::default(), players, seeds)
    }

    pub fn with_config(config: SnakeConfig, players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        let cells = (config.width * config.height) as usize;
        let starts: Vec<Cell> = sample(&mut seeds.stream("board"), cells, players)
            .into_iter()
            .map(|i| ((i as i32) % config.width, (i as i32) / config.width))
            .collect();
        let mut game = Self::with_layout(config, starts.into_iter().map(|c| vec![c]).collect(), Vec::new(), seeds);
        for _ in 0..config.apples {
            game.spawn_apple();
        }
        let text = format!("Tick 0. Board:\n{}", game.render(0));
        (game, vec![Message::broadcast(text)])
    }

    /// Explicit bodies (head first) and apples; used by tests.
    pub fn with_layout(config: SnakeConfig, bodies: Vec<Vec<Cell>>, apples: Vec<Cell>, seeds: &SeedStreams) -> Self {
        let n = bodies.len();
        Self {
            config,
            bodies: bodies.into_iter().map(VecDeque::from).collect(),
            apples,
            died: vec![None; n],
            pending: BTreeMap::new(),
            tick: 0,
            rng: seeds.stream("apples"),
            terminal: None,
        }
    }

    pub fn body(&self, player: usize) -> Vec<Cell> {
        self.bodies[player].iter().copied().collect()
    }

    pub fn is_alive(&self, player: usize) -> bool {
        self.died[player].is_none()
    }

    pub fn apples(&self) -> &[Cell] {
        &self.apples
    }

    pub fn tick(&self) -> usize {
        self.tick
    }

    fn occupied(&self, cell: Cell) -> bool {
        self.apples.contains(&cell) || self.bodies.iter().any(|b| b.contains(&cell))
    }

    fn spawn_apple(&mut self) {
        let free: Vec<Cell> = (0..self.config.height)
            .flat_map(|y| (0..self.config.width).map(move |x| (x, y)))
            .filter(|&c| !self.occupied(c))
            .collect();
        if !free.is_empty() {
            let pick = free[self.rng.random_range(0..free.len())];
            self.apples.push(pick);
        }
    }

    fn in_bounds(&self, (x, y): Cell) -> bool {
        x >= 0 && y >= 0 && x < self.config.width && y < self.config.height
    }

    fn resolve(&mut self) -> String {
        self.tick += 1;
        let moves = std::mem::take(&mut self.pending);
        let movers: Vec<usize> = moves.keys().copied().collect();
        let heads: BTreeMap<usize, Cell> = moves
            .iter()
            .map(|(&p, &d)| (p, d.step(self.bodies[p][0])))
            .collect();
        let eats: BTreeMap<usize, bool> = heads.iter().map(|(&p, h)| (p, self.apples.contains(h))).collect();

        // bodies after tails move; heads are checked against these
        let mut after: Vec<VecDeque<Cell>> = self.bodies.clone();
        for &p in &movers {
            if !eats[&p] {
                after[p].pop_back();
            }
        }

        let mut dead = Vec::new();
        for &p in &movers {
            let h = heads[&p];
            let wall = !self.in_bounds(h);
            let body = after.iter().any(|b| b.contains(&h));
            let head_on = movers.iter().any(|&q| q != p && heads[&q] == h);
            let swap = movers
                .iter()
                .any(|&q| q != p && heads[&q] == self.bodies[p][0] && h == self.bodies[q][0]);
            if wall || body || head_on || swap {
                dead.push(p);
            }
        }

        let mut notes = Vec::new();
        for &p in &movers {
            if dead.contains(&p) {
                continue;
            }
            let h = heads[&p];
            after[p].push_front(h);
            if eats[&p] {
                self.apples.retain(|&a| a != h);
                notes.push(format!("Player {p} ate an apple"));
            }
        }
        for &p in &dead {
            self.died[p] = Some(self.tick);
            after[p].clear();
            notes.push(format!("Player {p} died"));
        }
        self.bodies = after;
        while self.apples.len() < self.config.apples {
            let before = self.apples.len();
            self.spawn_apple();
            if self.apples.len() == before {
                break;
            }
        }

        let alive = self.died.iter().filter(|d| d.is_none()).count();
        if alive <= 1 || self.tick >= self.config.max_ticks {
            let ranking = self.standing();
            let detail = if alive <= 1 { "at most one snake left" } else { "tick limit reached" };
            self.terminal = Some(TerminalInfo::new(TerminalKind::Rank, ranking, detail));
            notes.push(format!("Game over ({detail})"));
        }
        let summary = if notes.is_empty() { "All snakes moved".to_owned() } else { notes.join(". ") };
        format!("Tick {}: {summary}.\n{}", self.tick, self.render(0))
    }
}

impl Game for Snake {
    fn num_players(&self) -> usize {
        self.bodies.len()
    }

    fn to_move(&self) -> usize {
        (0..self.bodies.len())
            .find(|&p| self.is_alive(p) && !self.pending.contains_key(&p))
            .unwrap_or(0)
    }

    fn legal_actions(&self) -> Result<LegalActions, GameError> {
        if self.terminal.is_some() {
            return Err(GameError::Terminal);
        }
        Ok(LegalActions::Finite(
            ["down", "left", "right", "up"].map(String::from).to_vec(),
        ))
    }

    fn action_visibility(&self, player: usize) -> Visibility {
        Visibility::only(player)
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        ensure_turn(self, player)?;
        let dir = Dir::parse(token).ok_or_else(|| GameError::illegal(token, "expected up, down, left or right"))?;
        self.pending.insert(player, dir);
        let waiting = (0..self.bodies.len()).any(|p| self.is_alive(p) && !self.pending.contains_key(&p));
        if waiting {
            return Ok(vec![Message::private(player, format!("Move {} recorded.", token.trim().to_ascii_lowercase()))]);
        }
        let text = self.resolve();
        Ok(vec![Message::broadcast(text)])
    }

    fn render(&self, _viewer: usize) -> String {
        let mut grid = vec![vec!['.'; self.config.width as usize]; self.config.height as usize];
        for &(x, y) in &self.apples {
            grid[y as usize][x as usize] = '@';
        }
        for (p, body) in self.bodies.iter().enumerate() {
            for (i, &(x, y)) in body.iter().enumerate() {
                grid[y as usize][x as usize] = if i == 0 {
                    char::from_digit(p as u32, 10).unwrap_or('?')
                } else {
                    (b'a' + p as u8) as char
                };
            }
        }
        let mut out: Vec<String> = grid.into_iter().map(|r| r.into_iter().collect()).collect();
        for p in 0..self.bodies.len() {
            out.push(match self.died[p] {
                Some(t) => format!("Player {p}: dead at tick {t}"),
                None => format!("Player {p}: length {}", self.bodies[p].len()),
            });
        }
        out.join("\n")
    }

    fn terminal(&self) -> Option<&TerminalInfo> {
        self.terminal.as_ref()
    }

    fn standing(&self) -> Ranking {
        let keys: Vec<(usize, usize)> = (0..self.bodies.len())
            .map(|p| match self.died[p] {
                Some(t) => (t, 0),
                None => (usize::MAX, self.bodies[p].len()),
            })
            .collect();
        rank_by_key(&keys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(bodies: Vec<Vec<Cell>>, apples: Vec<Cell>) -> Snake {
        Snake::with_layout(SnakeConfig { apples: 0, ..Default::default() }, bodies, apples, &SeedStreams::new(0))
    }

    #[test]
    fn wall_kills() {
        let mut g = layout(vec![vec![(0, 0)], vec![(5, 5)]], vec![]);
        g.apply(0, "up").unwrap();
        g.apply(1, "up").unwrap();
        assert!(!g.is_alive(0));
        let t = g.terminal().unwrap();
        assert_eq!(t.ranking, vec![vec![1], vec![0]]);
    }

    #[test]
    fn head_on_kills_both() {
        let mut g = layout(vec![vec![(2, 2)], vec![(4, 2)], vec![(8, 8)]], vec![]);
        g.apply(0, "right").unwrap();
        g.apply(1, "left").unwrap();
        g.apply(2, "up").unwrap();
        assert!(!g.is_alive(0) && !g.is_alive(1));
        assert_eq!(g.terminal().unwrap().ranking, vec![vec![2], vec![0, 1]]);
    }

    #[test]
    fn swap_kills_both() {
        let mut g = layout(vec![vec![(2, 2)], vec![(3, 2)], vec![(8, 8)]], vec![]);
        g.apply(0, "right").unwrap();
        g.apply(1, "left").unwrap();
        g.apply(2, "up").unwrap();
        assert!(!g.is_alive(0) && !g.is_alive(1));
    }

    #[test]
    fn eating_grows_and_tail_vacates() {
        let mut g = layout(vec![vec![(2, 2), (2, 3)], vec![(7, 7)]], vec![(3, 2)]);
        g.apply(0, "right").unwrap();
        g.apply(1, "up").unwrap();
        assert_eq!(g.body(0), vec![(3, 2), (2, 2), (2, 3)]);
        // following one's own tail is safe
        let mut g = layout(vec![vec![(2, 2), (3, 2), (3, 3), (2, 3)], vec![(7, 7)]], vec![]);
        g.apply(0, "down").unwrap();
        g.apply(1, "up").unwrap();
        assert!(g.is_alive(0));
    }

    #[test]
    fn moves_are_private_until_resolution() {
        let mut g = layout(vec![vec![(2, 2)], vec![(7, 7)]], vec![]);
        let m = g.apply(0, "left").unwrap();
        assert_eq!(m[0].visibility, Visibility::only(0));
        assert_eq!(g.to_move(), 1);
        assert_eq!(g.body(0), vec![(2, 2)]);
    }

    #[test]
    fn fresh_board() {
        let (g, _) = Snake::new(4, &SeedStreams::new(9));
        assert_eq!(g.apples().len(), 3);
        assert_eq!(g.num_players(), 4);
    }
}
