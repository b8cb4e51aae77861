//! Oracles and property checks shared by the integration tests and the
//! acceptance run. Each check returns a one-line summary on success and a
//! reason on failure.

#![allow(dead_code)]

use std::collections::HashMap;

use arena_core::game::{ActionGrammar, Game, LegalActions};
use arena_core::games::connect_four::ConnectFour;
use arena_core::games::kuhn_poker::{Card, KuhnPoker};
use arena_core::games::mastermind::mastermind_feedback;
use arena_core::games::nim::Nim;
use arena_core::games::tictactoe::TicTacToe;
use arena_core::games::wordle::wordle_feedback;
use arena_core::outcome::{outcome_rewards, TerminalKind};
use arena_core::{registry, words, Env, Message, Rewards, SeedStreams, TerminalInfo};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

// ---------------------------------------------------------------- random play

pub struct Episode {
    pub env_id: String,
    pub players: usize,
    pub seed: u64,
    pub log: Vec<Message>,
    /// Seat and token for every step taken.
    pub tokens: Vec<(usize, String)>,
    /// Observation text of every seat before each step.
    pub views: Vec<Vec<String>>,
    pub terminal: TerminalInfo,
    pub rewards: Rewards,
}

fn wrap(grammar: ActionGrammar, token: &str) -> String {
    match grammar {
        ActionGrammar::Bracketed => format!("[{token}]"),
        ActionGrammar::FreeText => token.to_owned(),
    }
}

/// Plays one game with uniformly random legal tokens.
pub fn random_episode(env_id: &str, players: usize, seed: u64, record_views: bool) -> Episode {
    let mut env = Env::make(&[env_id], seed).expect("known env");
    env.reset(players).expect("valid player count");
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ 0xa5a5);
    let mut tokens = Vec::new();
    let mut views = Vec::new();
    while !env.is_done() {
        if record_views {
            views.push(
                (0..players)
                    .map(|p| env.observation_for(p).expect("seat").text())
                    .collect(),
            );
        }
        let (seat, _) = env.get_observation().expect("live");
        let legal = env.legal_actions().expect("live");
        let options = legal.candidates();
        assert!(!options.is_empty(), "{env_id}: no legal candidates");
        let token = options[rng.random_range(0..options.len())].clone();
        let grammar = env.game().expect("reset").grammar();
        env.step(&wrap(grammar, &token)).expect("live");
        tokens.push((seat, token));
    }
    Episode {
        env_id: env_id.to_owned(),
        players,
        seed,
        log: env.log().to_vec(),
        tokens,
        views,
        terminal: env.terminal_info().expect("done").clone(),
        rewards: env.close().expect("done"),
    }
}

/// Replays recorded tokens with the same seed and returns the new episode.
pub fn replay_episode(ep: &Episode) -> Result<Episode, String> {
    let mut env = Env::make(&[ep.env_id.as_str()], ep.seed).map_err(|e| e.to_string())?;
    env.reset(ep.players).map_err(|e| e.to_string())?;
    let mut views = Vec::new();
    for (seat, token) in &ep.tokens {
        ensure!(!env.is_done(), "{}: replay ended early", ep.env_id);
        views.push(
            (0..ep.players)
                .map(|p| env.observation_for(p).expect("seat").text())
                .collect(),
        );
        let (actual, _) = env.get_observation().map_err(|e| e.to_string())?;
        ensure!(actual == *seat, "{}: seat {actual} acted where {seat} was recorded", ep.env_id);
        let grammar = env.game().expect("reset").grammar();
        env.step(&wrap(grammar, token)).map_err(|e| e.to_string())?;
    }
    ensure!(env.is_done(), "{}: replay did not finish", ep.env_id);
    Ok(Episode {
        env_id: ep.env_id.clone(),
        players: ep.players,
        seed: ep.seed,
        log: env.log().to_vec(),
        tokens: ep.tokens.clone(),
        views,
        terminal: env.terminal_info().expect("done").clone(),
        rewards: env.close().expect("done"),
    })
}

/// Every (env, player count) pair the registry supports.
pub fn all_configurations() -> Vec<(String, usize)> {
    let reg = registry();
    let mut out = Vec::new();
    for id in reg.env_ids() {
        let rules = reg.rules(id).expect("listed");
        for n in rules.min_players..=rules.max_players {
            out.push((id.to_owned(), n));
        }
    }
    out
}

// ---------------------------------------------------------------- game oracles

fn minimax(game: &dyn Game, memo: &mut HashMap<String, i32>) -> i32 {
    // value from player 0's perspective: +1 win, 0 draw, -1 loss
    if let Some(t) = game.terminal() {
        let r = outcome_rewards(t, 2);
        return r.get(0).expect("seat 0") as i32;
    }
    let key = game.render(0) + &game.to_move().to_string();
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let me = game.to_move();
    let LegalActions::Finite(moves) = game.legal_actions().expect("live") else {
        unreachable!("finite game")
    };
    let values = moves.iter().map(|m| {
        let mut next = game.clone_box();
        next.apply(me, m).expect("legal move applies");
        minimax(next.as_ref(), memo)
    });
    let v = if me == 0 { values.max() } else { values.min() }.expect("moves exist");
    memo.insert(key, v);
    v
}

pub fn tictactoe_minimax() -> Check {
    let (game, _) = TicTacToe::new(2, &SeedStreams::new(0));
    let mut memo = HashMap::new();
    let v = minimax(&game, &mut memo);
    ensure!(v == 0, "minimax value {v}, expected a draw");
    Ok(format!("game value 0 (draw) over {} positions", memo.len()))
}

pub fn nim_retrograde(max_pile: u32) -> Check {
    fn first_player_wins(piles: Vec<u32>, memo: &mut HashMap<Vec<u32>, bool>) -> bool {
        if let Some(&v) = memo.get(&piles) {
            return v;
        }
        let game = Nim::from_piles(piles.clone());
        let win = match game.terminal() {
            Some(t) => t.ranking[0] == vec![0],
            None => {
                let LegalActions::Finite(moves) = game.legal_actions().expect("live") else {
                    unreachable!()
                };
                moves.iter().any(|m| {
                    let mut next = game.clone();
                    next.apply(0, m).expect("legal");
                    match next.terminal() {
                        Some(t) => t.ranking[0] == vec![0],
                        None => !first_player_wins(next.piles().to_vec(), memo),
                    }
                })
            }
        };
        memo.insert(piles, win);
        win
    }
    let mut memo = HashMap::new();
    let mut checked = 0;
    for a in 0..=max_pile {
        for b in 0..=max_pile {
            for c in 0..=max_pile {
                let wins = first_player_wins(vec![a, b, c], &mut memo);
                ensure!(
                    wins == (a ^ b ^ c != 0),
                    "piles [{a},{b},{c}]: engine says first player {}",
                    if wins { "wins" } else { "loses" }
                );
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} pile configurations agree with the nim-sum rule"))
}

/// Any four-in-a-row owned by `owner`, by scanning every window.
fn scan_four(cells: &[Vec<Option<usize>>], owner: usize) -> bool {
    let rows = cells.len() as isize;
    let cols = cells[0].len() as isize;
    let at = |r: isize, c: isize| (0..rows).contains(&r) && (0..cols).contains(&c) && cells[r as usize][c as usize] == Some(owner);
    for r in 0..rows {
        for c in 0..cols {
            for (dr, dc) in [(0, 1), (1, 0), (1, 1), (1, -1)] {
                if (0..4).all(|k| at(r + k * dr, c + k * dc)) {
                    return true;
                }
            }
        }
    }
    false
}

pub fn connect_four_windows(boards: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut wins = 0;
    while checked < boards {
        let (mut game, _) = ConnectFour::new(2, &SeedStreams::new(0));
        while game.terminal().is_none() && checked < boards {
            let me = game.to_move();
            let LegalActions::Finite(moves) = game.legal_actions().expect("live") else {
                unreachable!()
            };
            for m in &moves {
                let col: usize = m.parse().expect("column");
                ensure!(game.cells().last().expect("rows")[col].is_none(), "column {col} offered while full");
            }
            let m = &moves[rng.random_range(0..moves.len())];
            game.apply(me, m).expect("legal");
            checked += 1;
            let scanned = scan_four(game.cells(), me);
            let engine = matches!(game.terminal(), Some(t) if t.kind == TerminalKind::Win);
            ensure!(scanned == engine, "board {checked}: scan={scanned} engine={engine}\n{}", game.render(0));
            wins += usize::from(engine);
        }
    }
    Ok(format!("{checked} boards ({wins} wins) agree with the window scan"))
}

/// Independent Kuhn payoff for player 0: `sign` is +1 when player 0 holds the higher card.
fn kuhn_oracle_line(line: &[&str], sign: f64) -> Option<(f64, f64)> {
    // (reward, chips) for a complete betting line
    match line {
        ["check", "check"] => Some((sign, sign)),
        ["bet", "call"] | ["check", "bet", "call"] => Some((sign, 2.0 * sign)),
        ["bet", "fold"] => Some((1.0, 1.0)),
        ["check", "bet", "fold"] => Some((-1.0, -1.0)),
        _ => None,
    }
}

pub fn kuhn_enumeration() -> Check {
    fn walk(game: &KuhnPoker, prob: f64, leaves: &mut usize, ev: &mut (f64, f64)) {
        if let Some(t) = game.terminal() {
            *leaves += 1;
            ev.0 += prob * outcome_rewards(t, 2).get(0).expect("seat");
            ev.1 += prob * f64::from(game.chip_payoff());
            return;
        }
        let moves = game.legal_actions().expect("live");
        let moves = moves.candidates();
        for m in moves {
            let mut next = game.clone();
            next.apply(game.to_move(), m).expect("legal");
            walk(&next, prob / moves.len() as f64, leaves, ev);
        }
    }
    let cards = [Card::Jack, Card::Queen, Card::King];
    let mut leaves = 0;
    let mut engine = (0.0, 0.0);
    let mut oracle = (0.0, 0.0);
    for a in cards {
        for b in cards {
            if a == b {
                continue;
            }
            let game = KuhnPoker::with_cards([a, b]);
            walk(&game, 1.0 / 6.0, &mut leaves, &mut engine);

            // showdown ordering K > Q > J
            let mut sd = KuhnPoker::with_cards([a, b]);
            sd.apply(0, "check").expect("legal");
            sd.apply(1, "check").expect("legal");
            let expect_first = if a > b { 0 } else { 1 };
            ensure!(sd.terminal().expect("showdown").ranking[0] == vec![expect_first], "{a} vs {b} showdown");

            let sign = if a > b { 1.0 } else { -1.0 };
            let lines: [(&[&str], f64); 5] = [
                (&["check", "check"], 0.25),
                (&["check", "bet", "call"], 0.125),
                (&["check", "bet", "fold"], 0.125),
                (&["bet", "call"], 0.25),
                (&["bet", "fold"], 0.25),
            ];
            for (line, p) in lines {
                let (r, c) = kuhn_oracle_line(line, sign).expect("complete line");
                oracle.0 += p * r / 6.0;
                oracle.1 += p * c / 6.0;
            }
        }
    }
    ensure!(leaves == 30, "{leaves} terminal histories, expected 30");
    ensure!((engine.0 - oracle.0).abs() < 1e-12, "reward EV engine {} oracle {}", engine.0, oracle.0);
    ensure!((engine.1 - oracle.1).abs() < 1e-12, "chip EV engine {} oracle {}", engine.1, oracle.1);
    Ok(format!(
        "30 terminal histories; uniform-play EV for player 0 = {:.4} reward, {:.4} chips",
        engine.0, engine.1
    ))
}

/// Wordle reference: a letter is yellow when the secret has more unmatched
/// copies of it than earlier non-green occurrences in the guess.
fn wordle_oracle(guess: &[u8], secret: &[u8]) -> String {
    (0..5)
        .map(|i| {
            if guess[i] == secret[i] {
                return 'G';
            }
            let c = guess[i];
            let spare = (0..5).filter(|&j| secret[j] == c && guess[j] != secret[j]).count();
            let used = (0..i).filter(|&k| guess[k] == c && guess[k] != secret[k]).count();
            if spare > used {
                'Y'
            } else {
                'X'
            }
        })
        .collect()
}

fn mastermind_oracle(guess: &[u8], secret: &[u8], symbols: u8) -> (usize, usize) {
    let black = guess.iter().zip(secret).filter(|(a, b)| a == b).count();
    let common: usize = (1..=symbols)
        .map(|s| {
            let g = guess.iter().filter(|&&x| x == s).count();
            let t = secret.iter().filter(|&&x| x == s).count();
            g.min(t)
        })
        .sum();
    (black, common - black)
}

pub fn feedback_oracles(pairs: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let list = words::five_letter();
    for i in 0..pairs {
        // half from the word list, half from a small alphabet to force repeats
        let (g, s): (Vec<u8>, Vec<u8>) = if i % 2 == 0 {
            (
                list[rng.random_range(0..list.len())].bytes().collect(),
                list[rng.random_range(0..list.len())].bytes().collect(),
            )
        } else {
            (
                (0..5).map(|_| rng.random_range(b'a'..=b'd')).collect(),
                (0..5).map(|_| rng.random_range(b'a'..=b'd')).collect(),
            )
        };
        let gs = String::from_utf8(g.clone()).expect("ascii");
        let ss = String::from_utf8(s.clone()).expect("ascii");
        let engine = wordle_feedback(&gs, &ss).map_err(|e| e.to_string())?;
        ensure!(engine == wordle_oracle(&g, &s), "wordle({gs},{ss}) = {engine}");

        let guess: Vec<u8> = (0..4).map(|_| rng.random_range(1..=6)).collect();
        let secret: Vec<u8> = (0..4).map(|_| rng.random_range(1..=6)).collect();
        let engine = mastermind_feedback(&guess, &secret, 6).map_err(|e| e.to_string())?;
        ensure!(
            engine == mastermind_oracle(&guess, &secret, 6),
            "mastermind({guess:?},{secret:?}) = {engine:?}"
        );
    }
    Ok(format!("{pairs} Wordle and {pairs} Mastermind pairs agree with reference scoring"))
}

// ---------------------------------------------------------------- framework

/// Same seed and tokens give identical logs, for every game and player count.
pub fn determinism(seeds: u64) -> Check {
    let mut games = 0;
    for (id, n) in all_configurations() {
        for seed in 0..seeds {
            let a = random_episode(&id, n, seed, false);
            let b = random_episode(&id, n, seed, false);
            ensure!(a.log == b.log, "{id}/{n} seed {seed}: logs differ across runs");
            let c = replay_episode(&a)?;
            ensure!(a.log == c.log, "{id}/{n} seed {seed}: replayed log differs");
            ensure!(a.rewards == c.rewards, "{id}/{n} seed {seed}: replayed rewards differ");
            games += 1;
        }
    }
    let envs = registry().len();
    Ok(format!("{games} games over {envs} environments reproduce byte-identical logs"))
}

pub fn two_player_zero_sum(games: usize) -> Check {
    let two: Vec<String> = registry()
        .env_ids()
        .filter(|id| registry().rules(id).is_some_and(|r| r.min_players == 2 && r.max_players == 2))
        .map(str::to_owned)
        .collect();
    let mut draws = 0;
    for i in 0..games {
        let id = &two[i % two.len()];
        let ep = random_episode(id, 2, 10_000 + i as u64, false);
        ensure!(ep.rewards.len() == 2, "{id}: {} rewards", ep.rewards.len());
        ensure!(ep.rewards.sum() == 0.0, "{id} seed {}: rewards {:?}", ep.seed, ep.rewards);
        for (_, r) in ep.rewards.iter() {
            ensure!([-1.0, 0.0, 1.0].contains(&r), "{id}: reward {r}");
        }
        draws += usize::from(ep.rewards.get(0) == Some(0.0));
    }
    Ok(format!("{games} random games over {} two-player envs are zero-sum ({draws} draws)", two.len()))
}

/// Each seat's observation is exactly the log filtered by visibility, and
/// replaying the same tokens shows every seat the same text at every step.
pub fn visibility_soundness(seeds: u64) -> Check {
    let mut checked = 0;
    for (id, n) in all_configurations() {
        for seed in 0..seeds {
            let ep = random_episode(&id, n, seed, true);
            for m in &ep.log {
                ensure!(m.is_well_formed(n), "{id}: malformed message {m:?}");
            }
            let mut env = Env::make(&[id.as_str()], seed).map_err(|e| e.to_string())?;
            env.reset(n).map_err(|e| e.to_string())?;
            for (step, (_, token)) in ep.tokens.iter().enumerate() {
                for v in 0..n {
                    let obs = env.observation_for(v).map_err(|e| e.to_string())?;
                    let expected: Vec<&Message> = env.log().iter().filter(|m| m.visibility.includes(v)).collect();
                    ensure!(
                        obs.messages.iter().collect::<Vec<_>>() == expected,
                        "{id} seed {seed} step {step}: seat {v} sees messages outside its visibility"
                    );
                    ensure!(obs.text() == ep.views[step][v], "{id} seed {seed} step {step}: seat {v} view changed on replay");
                    for hidden in env.log().iter().filter(|m| !m.visibility.includes(v)) {
                        ensure!(!obs.messages.contains(hidden), "{id}: seat {v} received a private message");
                    }
                }
                let grammar = env.game().expect("reset").grammar();
                env.step(&wrap(grammar, token)).map_err(|e| e.to_string())?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} steps replayed with per-seat views matching the visibility filter"))
}

pub fn multiplayer_rank_rewards(seeds: u64) -> Check {
    let mut games = 0;
    for (id, n) in all_configurations().into_iter().filter(|(_, n)| *n >= 3) {
        for seed in 0..seeds {
            let ep = random_episode(&id, n, seed, false);
            ensure!(ep.terminal.covers(n), "{id}/{n}: ranking does not cover the seats");
            ensure!(ep.rewards.sum().abs() < 1e-9, "{id}/{n} seed {seed}: rewards sum {}", ep.rewards.sum());
            let mut prev: Option<f64> = None;
            for group in &ep.terminal.ranking {
                let r = ep.rewards.get(group[0]).expect("seat");
                for &p in group {
                    ensure!(ep.rewards.get(p) == Some(r), "{id}: tied seats rewarded differently");
                }
                if let Some(above) = prev {
                    ensure!(r < above, "{id}/{n} seed {seed}: rewards not monotone in rank");
                }
                prev = Some(r);
            }
            games += 1;
        }
    }
    Ok(format!("{games} multi-player games: rank rewards sum to 0 and decrease with rank"))
}

/// Random legal play ends every game within its step budget.
pub fn termination(seeds: u64) -> Check {
    let mut forced = 0;
    let mut total = 0;
    for id in registry().env_ids() {
        let rules = registry().rules(id).expect("listed");
        for seed in 0..seeds {
            let n = rules.min_players + (seed as usize % (rules.max_players - rules.min_players + 1));
            let ep = random_episode(id, n, seed, false);
            ensure!(ep.tokens.len() <= rules.turn_limit, "{id}: {} steps over limit {}", ep.tokens.len(), rules.turn_limit);
            ensure!(ep.terminal.kind != TerminalKind::InvalidMove, "{id} seed {seed}: random legal play was invalid: {}", ep.terminal.detail);
            forced += usize::from(ep.terminal.kind == TerminalKind::TurnLimit);
            total += 1;
        }
    }
    Ok(format!("{total} random games terminated ({forced} by the step cap)"))
}
