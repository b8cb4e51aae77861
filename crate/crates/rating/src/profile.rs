//! Soft-skill profiles: each skill is the weight-averaged conservative score
//! of the environments tagged with it, then min-max scaled per skill across
//! the population.

use std::collections::BTreeMap;

use arena_core::{Skill, SkillTable};
use serde::{Deserialize, Serialize};

use crate::leaderboard::{Entry, Leaderboard};
use crate::RatingError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillProfile {
    pub participant: String,
    pub raw: BTreeMap<Skill, f64>,
    /// Filled by [`normalize_skills`]; empty until then.
    pub normalized: BTreeMap<Skill, f64>,
}

fn profile_of(participant: &str, entry: &Entry, table: &SkillTable) -> Result<SkillProfile, RatingError> {
    if entry.per_env.is_empty() {
        return Err(RatingError::NoRatedEnvironments);
    }
    let mut sums: BTreeMap<Skill, (f64, f64)> = BTreeMap::new();
    for (env_id, stat) in &entry.per_env {
        let Some(row) = table.for_env(env_id) else { continue };
        let score = stat.conservative();
        for (&skill, &w) in row {
            let acc = sums.entry(skill).or_insert((0.0, 0.0));
            acc.0 += w * score;
            acc.1 += w;
        }
    }
    let raw = sums
        .into_iter()
        .filter(|(_, (_, total))| *total > 0.0)
        .map(|(skill, (weighted, total))| (skill, weighted / total))
        .collect();
    Ok(SkillProfile {
        participant: participant.to_owned(),
        raw,
        normalized: BTreeMap::new(),
    })
}

/// Raw (unnormalized) profile of one participant.
pub fn skill_profile(board: &Leaderboard, table: &SkillTable, participant: &str) -> Result<SkillProfile, RatingError> {
    let entry = board.get(participant).ok_or(RatingError::NoRatedEnvironments)?;
    profile_of(participant, entry, table)
}

/// Normalized profiles of every participant with at least one rated
/// environment, in leaderboard order.
pub fn skill_profiles(board: &Leaderboard, table: &SkillTable) -> Vec<SkillProfile> {
    let raw: Vec<SkillProfile> = board
        .standings()
        .into_iter()
        .filter_map(|(name, entry)| profile_of(name, entry, table).ok())
        .collect();
    normalize_skills(raw)
}

/// Per-skill min-max scaling over the participants that have the skill.
/// A column with a single distinct value maps to 0.5.
pub fn normalize_skills(mut profiles: Vec<SkillProfile>) -> Vec<SkillProfile> {
    let mut ranges: BTreeMap<Skill, (f64, f64)> = BTreeMap::new();
    for p in &profiles {
        for (&skill, &x) in &p.raw {
            let r = ranges.entry(skill).or_insert((x, x));
            r.0 = r.0.min(x);
            r.1 = r.1.max(x);
        }
    }
    for p in &mut profiles {
        p.normalized = p
            .raw
            .iter()
            .map(|(&skill, &x)| {
                let (lo, hi) = ranges[&skill];
                let n = if hi > lo { (x - lo) / (hi - lo) } else { 0.5 };
                (skill, n)
            })
            .collect();
    }
    profiles
}
