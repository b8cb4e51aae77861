//! Terminal envelopes and their mapping to per-seat rewards.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalKind {
    Win,
    Draw,
    Rank,
    Success,
    Failure,
    InvalidMove,
    TurnLimit,
}

impl TerminalKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminalKind::Win => "win",
            TerminalKind::Draw => "draw",
            TerminalKind::Rank => "rank",
            TerminalKind::Success => "success",
            TerminalKind::Failure => "failure",
            TerminalKind::InvalidMove => "invalid_move",
            TerminalKind::TurnLimit => "turn_limit",
        }
    }
}

impl fmt::Display for TerminalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordered groups of seats, best first; seats sharing a group are tied.
pub type Ranking = Vec<Vec<usize>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerminalInfo {
    pub kind: TerminalKind,
    pub ranking: Ranking,
    pub detail: String,
}

impl TerminalInfo {
    pub fn new(kind: TerminalKind, ranking: Ranking, detail: impl Into<String>) -> Self {
        Self {
            kind,
            ranking,
            detail: detail.into(),
        }
    }

    /// Two-seat win for `winner`.
    pub fn win(winner: usize, detail: impl Into<String>) -> Self {
        Self::new(TerminalKind::Win, vec![vec![winner], vec![1 - winner]], detail)
    }

    pub fn draw(players: usize, detail: impl Into<String>) -> Self {
        Self::new(TerminalKind::Draw, vec![(0..players).collect()], detail)
    }

    pub fn success(detail: impl Into<String>) -> Self {
        Self::new(TerminalKind::Success, vec![vec![0]], detail)
    }

    pub fn failure(detail: impl Into<String>) -> Self {
        Self::new(TerminalKind::Failure, vec![vec![0]], detail)
    }

    /// True when every seat in `0..players` appears exactly once.
    pub fn covers(&self, players: usize) -> bool {
        let mut seen = vec![false; players];
        for &p in self.ranking.iter().flatten() {
            if p >= players || seen[p] {
                return false;
            }
            seen[p] = true;
        }
        seen.into_iter().all(|s| s)
    }
}

/// Reward per seat, every seated participant exactly once.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Rewards(pub BTreeMap<usize, f64>);

impl Rewards {
    pub fn get(&self, seat: usize) -> Option<f64> {
        self.0.get(&seat).copied()
    }

    pub fn sum(&self) -> f64 {
        self.0.values().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }
}

/// `1 - 2(r-1)/(n-1)` with tied seats sharing their mean rank.
pub fn rank_rewards(ranking: &Ranking, players: usize) -> Rewards {
    let mut out = BTreeMap::new();
    if players == 1 {
        for &p in ranking.iter().flatten() {
            out.insert(p, 1.0);
        }
        return Rewards(out);
    }
    let denom = (players - 1) as f64;
    let mut next_rank = 1usize;
    for group in ranking {
        let mean_rank = next_rank as f64 + (group.len() as f64 - 1.0) / 2.0;
        let reward = 1.0 - 2.0 * (mean_rank - 1.0) / denom;
        for &p in group {
            out.insert(p, reward);
        }
        next_rank += group.len();
    }
    Rewards(out)
}

/// Maps a terminal envelope to rewards for a table of `players` seats.
pub fn outcome_rewards(info: &TerminalInfo, players: usize) -> Rewards {
    if players == 1 {
        let r = match info.kind {
            TerminalKind::Success | TerminalKind::Win => 1.0,
            _ => -1.0,
        };
        return Rewards(BTreeMap::from([(0, r)]));
    }
    rank_rewards(&info.ranking, players)
}

/// Moves `offender` to a last-place group of its own, keeping the others' order.
pub fn demote_to_last(ranking: &Ranking, offender: usize) -> Ranking {
    let mut out: Ranking = ranking
        .iter()
        .map(|g| g.iter().copied().filter(|&p| p != offender).collect::<Vec<_>>())
        .filter(|g| !g.is_empty())
        .collect();
    out.push(vec![offender]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn four_player_ranking() {
        let r = rank_rewards(&vec![vec![2], vec![0], vec![3], vec![1]], 4);
        assert!(close(r.get(2).unwrap(), 1.0));
        assert!(close(r.get(0).unwrap(), 1.0 / 3.0));
        assert!(close(r.get(3).unwrap(), -1.0 / 3.0));
        assert!(close(r.get(1).unwrap(), -1.0));
        assert!(r.sum().abs() < 1e-12);
    }

    #[test]
    fn tie_for_first_of_three() {
        let r = rank_rewards(&vec![vec![0, 1], vec![2]], 3);
        assert!(close(r.get(0).unwrap(), 0.5));
        assert!(close(r.get(1).unwrap(), 0.5));
        assert!(close(r.get(2).unwrap(), -1.0));
    }

    #[test]
    fn two_player_mapping() {
        let win = outcome_rewards(&TerminalInfo::win(0, ""), 2);
        assert_eq!(win.get(0), Some(1.0));
        assert_eq!(win.get(1), Some(-1.0));
        let draw = outcome_rewards(&TerminalInfo::draw(2, ""), 2);
        assert_eq!(draw.get(0), Some(0.0));
        assert_eq!(draw.get(1), Some(0.0));
    }

    #[test]
    fn single_player_mapping() {
        assert_eq!(outcome_rewards(&TerminalInfo::success(""), 1).get(0), Some(1.0));
        assert_eq!(outcome_rewards(&TerminalInfo::failure(""), 1).get(0), Some(-1.0));
        let limit = TerminalInfo::new(TerminalKind::TurnLimit, vec![vec![0]], "");
        assert_eq!(outcome_rewards(&limit, 1).get(0), Some(-1.0));
    }

    #[test]
    fn demotion_keeps_order() {
        let r = demote_to_last(&vec![vec![1, 2], vec![0], vec![3]], 2);
        assert_eq!(r, vec![vec![1], vec![0], vec![3], vec![2]]);
    }

    fn arb_ranking() -> impl Strategy<Value = (Ranking, usize)> {
        (2usize..8).prop_flat_map(|n| {
            (Just(n), proptest::collection::vec(0usize..n, n), Just(()))
                .prop_map(|(n, keys, _)| {
                    // group seats by a random key; lower key ranks higher
                    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
                    for (seat, k) in keys.into_iter().enumerate() {
                        groups.entry(k).or_default().push(seat);
                    }
                    (groups.into_values().collect(), n)
                })
        })
    }

    proptest! {
        #[test]
        fn rank_rewards_sum_to_zero_and_are_monotone((ranking, n) in arb_ranking()) {
            let r = rank_rewards(&ranking, n);
            prop_assert_eq!(r.len(), n);
            prop_assert!(r.sum().abs() < 1e-9);
            let per_group: Vec<f64> = ranking.iter().map(|g| r.get(g[0]).unwrap()).collect();
            for w in per_group.windows(2) {
                prop_assert!(w[0] > w[1]);
            }
            for (_, v) in r.iter() {
                prop_assert!((-1.0..=1.0).contains(&v));
            }
        }
    }
}
