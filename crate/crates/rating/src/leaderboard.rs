//! Global and per-environment ratings for every rated entity.
//!
//! Models are rated under their own name. Every human, whatever they call
//! themselves, is rated as the single entity [`HUMANITY`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use arena_core::{MatchRecord, RatingChange, RatingPoint};
use serde::{Deserialize, Serialize};

use crate::trueskill::{update_multiplayer, Rating, RatingConfig};
use crate::RatingError;

pub const HUMANITY: &str = "Humanity";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "name", rename_all = "snake_case")]
pub enum Competitor {
    Model(String),
    Human(String),
}

impl Competitor {
    pub fn model(name: impl Into<String>) -> Self {
        Competitor::Model(name.into())
    }

    pub fn human(name: impl Into<String>) -> Self {
        Competitor::Human(name.into())
    }

    /// Name of the leaderboard row this competitor's results count towards.
    pub fn entity(&self) -> &str {
        match self {
            Competitor::Model(name) => name,
            Competitor::Human(_) => HUMANITY,
        }
    }
}

/// Finishing order of one match: `ranking[0]` holds the winners, and
/// competitors sharing a group tied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub env_id: String,
    pub ranking: Vec<Vec<Competitor>>,
    pub timestamp_ms: u64,
}

impl MatchResult {
    pub fn new(env_id: impl Into<String>, ranking: Vec<Vec<Competitor>>, timestamp_ms: u64) -> Self {
        Self {
            env_id: env_id.into(),
            ranking,
            timestamp_ms,
        }
    }

    /// The rating input a stored record stands for: seats grouped by equal
    /// reward, best first. Seats played for Humanity become anonymous humans.
    pub fn from_record(record: &MatchRecord) -> Self {
        let mut seats: Vec<(usize, f64)> = (0..record.num_players)
            .map(|s| (s, record.rewards.get(s).unwrap_or(f64::NEG_INFINITY)))
            .collect();
        seats.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut ranking: Vec<Vec<Competitor>> = Vec::new();
        let mut last = None;
        for (seat, reward) in seats {
            let name = record.participants.get(seat).cloned().unwrap_or_default();
            let c = if name == HUMANITY {
                Competitor::human(format!("seat {seat}"))
            } else {
                Competitor::model(name)
            };
            if last == Some(reward) {
                ranking.last_mut().expect("group exists").push(c);
            } else {
                ranking.push(vec![c]);
                last = Some(reward);
            }
        }
        Self::new(record.env_id.clone(), ranking, 0)
    }

    /// Entities with their best (lowest) rank group; several humans in one
    /// match collapse into a single Humanity entry.
    pub fn entity_ranks(&self) -> Result<Vec<(String, usize)>, RatingError> {
        let mut seen = BTreeSet::new();
        let mut ranks: Vec<(String, usize)> = Vec::new();
        for (rank, group) in self.ranking.iter().enumerate() {
            for c in group {
                if !seen.insert(c) {
                    return Err(RatingError::InvalidMatch(format!("{c:?} appears twice")));
                }
                let entity = c.entity();
                if !ranks.iter().any(|(e, _)| e == entity) {
                    ranks.push((entity.to_owned(), rank));
                }
            }
        }
        if ranks.is_empty() {
            return Err(RatingError::InvalidMatch("empty ranking".into()));
        }
        Ok(ranks)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatedStat {
    pub mu: f64,
    pub sigma: f64,
    pub matches: u64,
}

impl RatedStat {
    pub fn fresh(rating: Rating) -> Self {
        Self {
            mu: rating.mu,
            sigma: rating.sigma,
            matches: 0,
        }
    }

    pub fn rating(&self) -> Rating {
        Rating::new(self.mu, self.sigma)
    }

    pub fn conservative(&self) -> f64 {
        self.rating().conservative()
    }

    fn point(&self) -> RatingPoint {
        RatingPoint {
            mu: self.mu,
            sigma: self.sigma,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub global: RatedStat,
    #[serde(default)]
    pub per_env: BTreeMap<String, RatedStat>,
}

impl Entry {
    pub fn fresh(rating: Rating) -> Self {
        Self {
            global: RatedStat::fresh(rating),
            per_env: BTreeMap::new(),
        }
    }
}

/// What a match did to one entity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityChange {
    pub entity: String,
    pub change: RatingChange,
}

/// Serializes as a plain `name -> entry` map, the `leaderboard.json` layout.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Leaderboard {
    entries: BTreeMap<String, Entry>,
}

impl Leaderboard {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.entries.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Entry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Adds `name` at the initial rating; no-op if already present.
    pub fn register(&mut self, name: &str, cfg: &RatingConfig) -> &Entry {
        self.entries
            .entry(name.to_owned())
            .or_insert_with(|| Entry::fresh(cfg.initial()))
    }

    /// Pure form of [`Leaderboard::apply_match`].
    pub fn record_match(&self, result: &MatchResult, cfg: &RatingConfig) -> Result<Leaderboard, RatingError> {
        let mut next = self.clone();
        next.apply_match(result, cfg)?;
        Ok(next)
    }

    /// Updates the global and per-environment rating of every entity in
    /// `result` and bumps their match counts. Either everything changes or,
    /// on error, nothing does.
    ///
    /// A match with a single distinct entity (solo games, or humans only)
    /// counts towards `matches` but cannot move a rating.
    pub fn apply_match(&mut self, result: &MatchResult, cfg: &RatingConfig) -> Result<Vec<EntityChange>, RatingError> {
        cfg.validate()?;
        let ranks = result.entity_ranks()?;
        let env_cfg = cfg.for_env(&result.env_id);
        let initial = RatedStat::fresh(cfg.initial());
        let lookup = |name: &str| {
            let entry = self.entries.get(name);
            let global = entry.map_or(initial, |e| e.global);
            let env = entry
                .and_then(|e| e.per_env.get(&result.env_id))
                .copied()
                .unwrap_or(initial);
            (global, env)
        };
        let before: Vec<(RatedStat, RatedStat)> = ranks.iter().map(|(n, _)| lookup(n)).collect();

        let (global_after, env_after): (Vec<Rating>, Vec<Rating>) = if ranks.len() >= 2 {
            let g: Vec<(Rating, usize)> = before.iter().zip(&ranks).map(|((g, _), (_, r))| (g.rating(), *r)).collect();
            let e: Vec<(Rating, usize)> = before.iter().zip(&ranks).map(|((_, e), (_, r))| (e.rating(), *r)).collect();
            (update_multiplayer(&g, &env_cfg)?, update_multiplayer(&e, &env_cfg)?)
        } else {
            before.iter().map(|(g, e)| (g.rating(), e.rating())).unzip()
        };

        let mut changes = Vec::with_capacity(ranks.len());
        for (i, (name, _)) in ranks.iter().enumerate() {
            let (g0, e0) = before[i];
            let g1 = RatedStat {
                mu: global_after[i].mu,
                sigma: global_after[i].sigma,
                matches: g0.matches + 1,
            };
            let e1 = RatedStat {
                mu: env_after[i].mu,
                sigma: env_after[i].sigma,
                matches: e0.matches + 1,
            };
            let entry = self
                .entries
                .entry(name.clone())
                .or_insert_with(|| Entry::fresh(cfg.initial()));
            entry.global = g1;
            entry.per_env.insert(result.env_id.clone(), e1);
            changes.push(EntityChange {
                entity: name.clone(),
                change: RatingChange {
                    global_before: g0.point(),
                    global_after: g1.point(),
                    env_before: e0.point(),
                    env_after: e1.point(),
                },
            });
        }
        Ok(changes)
    }

    /// Rows ordered by conservative score, best first; ties by name.
    pub fn standings(&self) -> Vec<(&str, &Entry)> {
        let mut rows: Vec<(&str, &Entry)> = self.iter().collect();
        rows.sort_by(|a, b| match b.1.global.conservative().total_cmp(&a.1.global.conservative()) {
            Ordering::Equal => a.0.cmp(b.0),
            other => other,
        });
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trueskill::{init_rating, update_two_player};

    fn win(env: &str, w: Competitor, l: Competitor) -> MatchResult {
        MatchResult::new(env, vec![vec![w], vec![l]], 0)
    }

    #[test]
    fn first_match_starts_from_the_prior() {
        let cfg = RatingConfig::default();
        let lb = Leaderboard::new()
            .record_match(&win("TicTacToe-v0", Competitor::model("a"), Competitor::model("b")), &cfg)
            .unwrap();
        let (w, l) = update_two_player(init_rating(), init_rating(), false, &cfg).unwrap();
        let a = lb.get("a").unwrap();
        assert_eq!(a.global.rating(), w);
        assert_eq!(a.per_env["TicTacToe-v0"].rating(), w);
        assert_eq!(lb.get("b").unwrap().global.rating(), l);
        assert_eq!(a.global.matches, 1);
    }

    #[test]
    fn humans_share_one_row() {
        let cfg = RatingConfig::default();
        let mut lb = Leaderboard::new();
        lb.apply_match(&win("TicTacToe-v0", Competitor::human("alice"), Competitor::model("m")), &cfg)
            .unwrap();
        lb.apply_match(&win("Nim-v0", Competitor::model("m"), Competitor::human("bob")), &cfg)
            .unwrap();
        assert!(lb.contains(HUMANITY));
        assert!(!lb.contains("alice") && !lb.contains("bob"));
        assert_eq!(lb.len(), 2);
        assert_eq!(lb.get(HUMANITY).unwrap().global.matches, 2);
    }

    #[test]
    fn record_is_pure() {
        let cfg = RatingConfig::default();
        let base = Leaderboard::new();
        let r = win("Nim-v0", Competitor::model("x"), Competitor::model("y"));
        assert_eq!(base.record_match(&r, &cfg).unwrap(), base.clone().record_match(&r, &cfg).unwrap());
        assert!(base.is_empty());
    }

    #[test]
    fn solo_match_counts_but_does_not_move() {
        let cfg = RatingConfig::default();
        let mut lb = Leaderboard::new();
        lb.apply_match(&MatchResult::new("Wordle-v0", vec![vec![Competitor::model("s")]], 0), &cfg)
            .unwrap();
        let e = lb.get("s").unwrap();
        assert_eq!(e.global.rating(), init_rating());
        assert_eq!(e.per_env["Wordle-v0"].matches, 1);
    }

    #[test]
    fn invalid_results_leave_board_untouched() {
        let cfg = RatingConfig::default();
        let mut lb = Leaderboard::new();
        let dup = win("Nim-v0", Competitor::model("x"), Competitor::model("x"));
        assert!(matches!(lb.apply_match(&dup, &cfg), Err(RatingError::InvalidMatch(_))));
        assert!(lb.is_empty());
    }

    #[test]
    fn standings_sort_by_conservative_score() {
        let cfg = RatingConfig::default();
        let mut lb = Leaderboard::new();
        lb.register("idle", &cfg);
        lb.apply_match(&win("Nim-v0", Competitor::model("w"), Competitor::model("l")), &cfg)
            .unwrap();
        let names: Vec<&str> = lb.standings().iter().map(|(n, _)| *n).collect();
        assert_eq!(names, ["w", "idle", "l"]);
    }

    #[test]
    fn ranking_from_record_rewards() {
        let record = |rewards: &[(usize, f64)], names: [&str; 2]| MatchRecord {
            match_id: "m".into(),
            env_id: "TicTacToe-v0".into(),
            seed: 1,
            num_players: 2,
            participants: names.iter().map(|s| s.to_string()).collect(),
            turns: vec![],
            rewards: arena_core::Rewards(rewards.iter().copied().collect()),
            ratings: vec![],
        };
        let r = MatchResult::from_record(&record(&[(0, -1.0), (1, 1.0)], ["x", "y"]));
        assert_eq!(r.ranking, vec![vec![Competitor::model("y")], vec![Competitor::model("x")]]);
        let r = MatchResult::from_record(&record(&[(0, 0.0), (1, 0.0)], ["x", HUMANITY]));
        assert_eq!(r.ranking, vec![vec![Competitor::model("x"), Competitor::human("seat 1")]]);
    }

    #[test]
    fn json_is_a_plain_map() {
        let cfg = RatingConfig::default();
        let mut lb = Leaderboard::new();
        lb.register("m", &cfg);
        let v: serde_json::Value = serde_json::to_value(&lb).unwrap();
        assert_eq!(v["m"]["global"]["matches"], 0);
        assert!(v["m"]["per_env"].is_object());
        let back: Leaderboard = serde_json::from_value(v).unwrap();
        assert_eq!(back, lb);
    }
}
