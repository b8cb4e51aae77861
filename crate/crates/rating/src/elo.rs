//! Logistic Elo, kept as the baseline the convergence study compares against.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EloUpdate {
    pub winner: f64,
    pub loser: f64,
    /// Points moved from loser to winner (negative when the favourite draws).
    /// The winner is credited exactly this amount and the loser debited exactly
    /// this amount; only the final additions round.
    pub delta: f64,
}

impl EloUpdate {
    pub fn winner_change(&self) -> f64 {
        self.delta
    }

    pub fn loser_change(&self) -> f64 {
        -self.delta
    }
}

/// Expected score of `a` against `b`.
pub fn elo_expectation(a: f64, b: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf((b - a) / 400.0))
}

pub fn update_elo(winner: f64, loser: f64, k: f64, draw: bool) -> EloUpdate {
    let expected = elo_expectation(winner, loser);
    let target = if draw { 0.5 } else { 1.0 };
    let delta = k * (target - expected);
    EloUpdate {
        winner: winner + delta,
        loser: loser - delta,
        delta,
    }
}
