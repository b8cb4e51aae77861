//! Round-robin tournaments and their cross tables.
//!
//! Games may run in parallel, but ratings are folded in schedule order, so
//! every output is the same whatever the job count.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};

use arena_agents::{play_match, Agent, MatchOptions};
use arena_core::{mix_seed, MatchRecord, SkillTable};
use arena_rating::{skill_profiles, write_leaderboard_csv, write_profiles_csv, Leaderboard, MatchResult, RatingConfig};
use arena_server::leaderboard_json;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{check_env, roster_names, AgentSpec, CliError};

#[derive(Debug, Clone)]
pub struct TournamentPlan {
    pub env_ids: Vec<String>,
    pub roster: Vec<AgentSpec>,
    /// Games per unordered pairing per environment.
    pub games: usize,
    pub seed: u64,
    /// Swap seats every other game; off keeps the first-listed agent in seat 0.
    pub alternate_seats: bool,
}

impl TournamentPlan {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.roster.len() < 2 {
            return Err(CliError::Config("a tournament needs at least 2 agents".into()));
        }
        if self.games == 0 {
            return Err(CliError::Config("games per pairing must be at least 1".into()));
        }
        if self.env_ids.is_empty() {
            return Err(CliError::Config("no environments given".into()));
        }
        for env in &self.env_ids {
            check_env(env, 2)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduledGame {
    pub index: usize,
    pub env_id: String,
    /// Roster index per seat.
    pub seats: [usize; 2],
    pub seed: u64,
}

/// Environments in the given order, then pairings (i < j), then games.
pub fn schedule(plan: &TournamentPlan) -> Vec<ScheduledGame> {
    let n = plan.roster.len();
    let mut out = Vec::new();
    for env in &plan.env_ids {
        for i in 0..n {
            for j in i + 1..n {
                for g in 0..plan.games {
                    let seats = if plan.alternate_seats && g % 2 == 1 { [j, i] } else { [i, j] };
                    let index = out.len();
                    out.push(ScheduledGame {
                        index,
                        env_id: env.clone(),
                        seats,
                        seed: mix_seed(&[plan.seed, index as u64]),
                    });
                }
            }
        }
    }
    out
}

/// One direction of a pairing in one environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub env_id: String,
    pub agent: String,
    pub opponent: String,
    pub games: u64,
    pub wins: u64,
    pub draws: u64,
    pub losses: u64,
    pub win_rate: f64,
    pub draw_rate: f64,
    pub loss_rate: f64,
    pub mean_reward: f64,
}

/// An agent's results in one environment, with its rating after the
/// whole tournament.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentRow {
    pub agent: String,
    pub env_id: String,
    pub games: u64,
    pub wins: u64,
    pub draws: u64,
    pub losses: u64,
    pub win_rate: f64,
    pub mean_reward: f64,
    pub env_mu: f64,
    pub env_sigma: f64,
    pub mu: f64,
    pub sigma: f64,
    pub conservative: f64,
}

/// Results by seat, whoever sat there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeatRow {
    pub env_id: String,
    pub seat: usize,
    pub games: u64,
    pub wins: u64,
    pub draws: u64,
    pub win_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CrossTable {
    pub pairs: Vec<PairRow>,
    pub agents: Vec<AgentRow>,
    pub seats: Vec<SeatRow>,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    games: u64,
    wins: u64,
    draws: u64,
    losses: u64,
    reward: f64,
}

impl Tally {
    fn add(&mut self, mine: f64, theirs: f64) {
        self.games += 1;
        self.reward += mine;
        match mine.total_cmp(&theirs) {
            std::cmp::Ordering::Greater => self.wins += 1,
            std::cmp::Ordering::Equal => self.draws += 1,
            std::cmp::Ordering::Less => self.losses += 1,
        }
    }

    fn rate(&self, k: u64) -> f64 {
        if self.games == 0 {
            0.0
        } else {
            k as f64 / self.games as f64
        }
    }
}

impl CrossTable {
    /// Tallies two-seat records; the board supplies the ratings columns.
    pub fn from_records(records: &[MatchRecord], board: &Leaderboard) -> Self {
        let mut pairs: BTreeMap<(String, String, String), Tally> = BTreeMap::new();
        let mut agents: BTreeMap<(String, String), Tally> = BTreeMap::new();
        let mut seats: BTreeMap<(String, usize), Tally> = BTreeMap::new();
        for r in records {
            if r.num_players != 2 {
                continue;
            }
            let reward = |s: usize| r.rewards.get(s).unwrap_or(0.0);
            for seat in 0..2 {
                let (me, them) = (&r.participants[seat], &r.participants[1 - seat]);
                let (mine, theirs) = (reward(seat), reward(1 - seat));
                pairs.entry((r.env_id.clone(), me.clone(), them.clone())).or_default().add(mine, theirs);
                agents.entry((me.clone(), r.env_id.clone())).or_default().add(mine, theirs);
                seats.entry((r.env_id.clone(), seat)).or_default().add(mine, theirs);
            }
        }
        let pairs = pairs
            .into_iter()
            .map(|((env_id, agent, opponent), t)| PairRow {
                env_id,
                agent,
                opponent,
                games: t.games,
                wins: t.wins,
                draws: t.draws,
                losses: t.losses,
                win_rate: t.rate(t.wins),
                draw_rate: t.rate(t.draws),
                loss_rate: t.rate(t.losses),
                mean_reward: t.reward / t.games as f64,
            })
            .collect();
        let agents = agents
            .into_iter()
            .map(|((agent, env_id), t)| {
                let entry = board.get(&agent);
                let global = entry.map(|e| e.global);
                let env = entry.and_then(|e| e.per_env.get(&env_id).copied());
                AgentRow {
                    games: t.games,
                    wins: t.wins,
                    draws: t.draws,
                    losses: t.losses,
                    win_rate: t.rate(t.wins),
                    mean_reward: t.reward / t.games as f64,
                    env_mu: env.map_or(f64::NAN, |s| s.mu),
                    env_sigma: env.map_or(f64::NAN, |s| s.sigma),
                    mu: global.map_or(f64::NAN, |s| s.mu),
                    sigma: global.map_or(f64::NAN, |s| s.sigma),
                    conservative: global.map_or(f64::NAN, |s| s.conservative()),
                    agent,
                    env_id,
                }
            })
            .collect();
        let seats = seats
            .into_iter()
            .map(|((env_id, seat), t)| SeatRow {
                env_id,
                seat,
                games: t.games,
                wins: t.wins,
                draws: t.draws,
                win_rate: t.rate(t.wins),
            })
            .collect();
        Self { pairs, agents, seats }
    }

    /// A row for `agent` against `opponent` in `env_id`.
    pub fn pair(&self, env_id: &str, agent: &str, opponent: &str) -> Option<&PairRow> {
        self.pairs
            .iter()
            .find(|p| p.env_id == env_id && p.agent == agent && p.opponent == opponent)
    }

    pub fn seat(&self, env_id: &str, seat: usize) -> Option<&SeatRow> {
        self.seats.iter().find(|s| s.env_id == env_id && s.seat == seat)
    }
}

#[derive(Debug)]
pub struct TournamentOutcome {
    /// Completed games in schedule order, ratings filled in.
    pub records: Vec<MatchRecord>,
    pub leaderboard: Leaderboard,
    pub table: CrossTable,
    /// The failure that stopped the run early, if any.
    pub failure: Option<CliError>,
}

fn play_one(plan: &TournamentPlan, names: &[String], game: &ScheduledGame) -> Result<MatchRecord, CliError> {
    let mut agents: Vec<Box<dyn Agent>> = game
        .seats
        .iter()
        .enumerate()
        .map(|(seat, &who)| plan.roster[who].build(mix_seed(&[game.seed, seat as u64])))
        .collect::<Result<_, _>>()?;
    let opts = MatchOptions {
        match_id: format!("t{:06}", game.index),
        participants: Some(game.seats.iter().map(|&who| names[who].clone()).collect()),
        ..MatchOptions::default()
    };
    Ok(play_match(&game.env_id, game.seed, &mut agents, &opts)?)
}

/// Plays the whole schedule on up to `jobs` threads. An agent failure stops
/// the run; games completed before it in schedule order are kept.
pub fn run_tournament(plan: &TournamentPlan, jobs: usize, rating: &RatingConfig) -> Result<TournamentOutcome, CliError> {
    plan.validate()?;
    let names = roster_names(&plan.roster);
    let games = schedule(plan);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let stop = AtomicBool::new(false);
    let results: Vec<Option<Result<MatchRecord, CliError>>> = pool.install(|| {
        games
            .par_iter()
            .map(|g| {
                if stop.load(Ordering::Relaxed) {
                    return None;
                }
                let r = play_one(plan, &names, g);
                if r.is_err() {
                    stop.store(true, Ordering::Relaxed);
                }
                Some(r)
            })
            .collect()
    });

    let mut board = Leaderboard::new();
    for name in &names {
        board.register(name, rating);
    }
    let mut records = Vec::with_capacity(results.len());
    let mut failure = None;
    for r in results {
        match r {
            Some(Ok(mut rec)) => {
                let changes = board.apply_match(&MatchResult::from_record(&rec), rating)?;
                rec.ratings = rec
                    .participants
                    .iter()
                    .map(|p| {
                        changes
                            .iter()
                            .find(|c| &c.entity == p)
                            .map(|c| c.change.clone())
                            .expect("every seat was rated")
                    })
                    .collect();
                records.push(rec);
            }
            Some(Err(e)) => {
                failure = Some(e);
                break;
            }
            None => {
                failure.get_or_insert(CliError::Runtime("stopped after an earlier failure".into()));
                break;
            }
        }
    }
    let table = CrossTable::from_records(&records, &board);
    Ok(TournamentOutcome {
        records,
        leaderboard: board,
        table,
        failure,
    })
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(arena_rating::ReportError::from)?;
    for row in rows {
        w.serialize(row).map_err(arena_rating::ReportError::from)?;
    }
    w.flush()?;
    Ok(())
}

impl TournamentOutcome {
    /// Writes records.jsonl, the cross-table CSVs, leaderboard.json and the
    /// leaderboard and skill-profile CSVs into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        let mut out = BufWriter::new(File::create(dir.join("records.jsonl"))?);
        for r in &self.records {
            writeln!(out, "{}", r.to_json_line())?;
        }
        out.flush()?;
        write_csv(&dir.join("cross_table.csv"), &self.table.pairs)?;
        write_csv(&dir.join("agent_summary.csv"), &self.table.agents)?;
        write_csv(&dir.join("seat_summary.csv"), &self.table.seats)?;
        fs::write(dir.join("leaderboard.json"), leaderboard_json(&self.leaderboard))?;
        write_leaderboard_csv(&self.leaderboard, File::create(dir.join("leaderboard.csv"))?)?;
        let profiles = skill_profiles(&self.leaderboard, &SkillTable::bundled());
        write_profiles_csv(&profiles, File::create(dir.join("skill_profiles.csv"))?)?;
        Ok(())
    }
}
