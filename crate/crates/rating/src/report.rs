//! CSV exports for plotting. Floats are written in Rust's shortest
//! round-trip form, so reading a file back gives the in-memory values bit
//! for bit.

use std::io::{Read, Write};

use arena_core::Skill;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::leaderboard::Leaderboard;
use crate::profile::SkillProfile;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub const LEADERBOARD_HEADER: [&str; 5] = ["name", "mu", "sigma", "conservative", "matches"];
pub const PROFILE_HEADER: [&str; 4] = ["name", "skill", "raw", "normalized"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardRow {
    pub name: String,
    pub mu: f64,
    pub sigma: f64,
    pub conservative: f64,
    pub matches: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub name: String,
    pub skill: Skill,
    pub raw: f64,
    pub normalized: f64,
}

/// Global ratings in leaderboard order.
pub fn leaderboard_rows(board: &Leaderboard) -> Vec<LeaderboardRow> {
    board
        .standings()
        .into_iter()
        .map(|(name, e)| LeaderboardRow {
            name: name.to_owned(),
            mu: e.global.mu,
            sigma: e.global.sigma,
            conservative: e.global.conservative(),
            matches: e.global.matches,
        })
        .collect()
}

/// One row per (participant, skill), participants in the given order.
pub fn profile_rows(profiles: &[SkillProfile]) -> Vec<ProfileRow> {
    profiles
        .iter()
        .flat_map(|p| {
            p.raw.iter().map(|(&skill, &raw)| ProfileRow {
                name: p.participant.clone(),
                skill,
                raw,
                normalized: p.normalized.get(&skill).copied().unwrap_or(f64::NAN),
            })
        })
        .collect()
}

fn write_rows<W: Write, T: Serialize>(out: W, header: &[&str], rows: &[T]) -> Result<(), ReportError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(input: R) -> Result<Vec<T>, ReportError> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(ReportError::from)).collect()
}

pub fn write_leaderboard_csv<W: Write>(board: &Leaderboard, out: W) -> Result<(), ReportError> {
    write_rows(out, &LEADERBOARD_HEADER, &leaderboard_rows(board))
}

pub fn read_leaderboard_csv<R: Read>(input: R) -> Result<Vec<LeaderboardRow>, ReportError> {
    read_rows(input)
}

pub fn write_profiles_csv<W: Write>(profiles: &[SkillProfile], out: W) -> Result<(), ReportError> {
    write_rows(out, &PROFILE_HEADER, &profile_rows(profiles))
}

pub fn read_profiles_csv<R: Read>(input: R) -> Result<Vec<ProfileRow>, ReportError> {
    read_rows(input)
}
