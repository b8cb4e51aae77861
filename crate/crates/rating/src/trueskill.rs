//! Two-player TrueSkill updates in closed form, and the adjacent-pair chain
//! used for matches with more than two ranked participants.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::RatingError;

pub const MU0: f64 = 25.0;
pub const SIGMA0: f64 = 25.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rating {
    pub mu: f64,
    pub sigma: f64,
}

impl Rating {
    pub fn new(mu: f64, sigma: f64) -> Self {
        Self { mu, sigma }
    }

    /// `mu - 3 sigma`, the leaderboard sort key.
    pub fn conservative(&self) -> f64 {
        self.mu - 3.0 * self.sigma
    }

    fn check(&self) -> Result<(), RatingError> {
        if self.mu.is_finite() && self.sigma.is_finite() && self.sigma > 0.0 {
            Ok(())
        } else {
            Err(RatingError::NonFiniteInput)
        }
    }
}

impl Default for Rating {
    fn default() -> Self {
        init_rating()
    }
}

pub fn init_rating() -> Rating {
    Rating { mu: MU0, sigma: SIGMA0 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingConfig {
    pub mu0: f64,
    pub sigma0: f64,
    /// Per-match performance noise.
    pub beta: f64,
    /// Skill drift, added in quadrature to sigma before every update.
    pub tau: f64,
    /// Draw margin used when an environment has no entry below.
    pub draw_margin: f64,
    #[serde(default)]
    pub env_draw_margins: BTreeMap<String, f64>,
}

impl Default for RatingConfig {
    fn default() -> Self {
        Self {
            mu0: MU0,
            sigma0: SIGMA0,
            beta: SIGMA0 / 2.0,
            tau: SIGMA0 / 100.0,
            draw_margin: 0.0,
            env_draw_margins: BTreeMap::new(),
        }
    }
}

impl RatingConfig {
    pub fn validate(&self) -> Result<(), RatingError> {
        let finite = [self.mu0, self.sigma0, self.beta, self.tau, self.draw_margin]
            .iter()
            .chain(self.env_draw_margins.values())
            .all(|v| v.is_finite());
        if !finite || self.sigma0 <= 0.0 || self.beta <= 0.0 || self.tau < 0.0 {
            return Err(RatingError::InvalidConfig("need sigma0 > 0, beta > 0, tau >= 0".into()));
        }
        if self.draw_margin < 0.0 || self.env_draw_margins.values().any(|&e| e < 0.0) {
            return Err(RatingError::InvalidConfig("draw margins must be >= 0".into()));
        }
        Ok(())
    }

    pub fn initial(&self) -> Rating {
        Rating::new(self.mu0, self.sigma0)
    }

    pub fn margin_for(&self, env_id: &str) -> f64 {
        self.env_draw_margins.get(env_id).copied().unwrap_or(self.draw_margin)
    }

    /// A copy whose default margin is the one for `env_id`.
    pub fn for_env(&self, env_id: &str) -> RatingConfig {
        RatingConfig {
            draw_margin: self.margin_for(env_id),
            ..self.clone()
        }
    }

    /// Sets a margin for every draw-capable environment so that two equally
    /// rated players draw with probability `draw_probability`.
    pub fn with_calibrated_margins<'a>(mut self, draw_capable: impl IntoIterator<Item = &'a str>, draw_probability: f64) -> Self {
        let eps = draw_margin_for(draw_probability, self.beta);
        for env in draw_capable {
            self.env_draw_margins.insert(env.to_owned(), eps);
        }
        self
    }
}

/// Margin giving draw probability `p` between two equal players.
pub fn draw_margin_for(p: f64, beta: f64) -> f64 {
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    std.inverse_cdf((p + 1.0) / 2.0) * SQRT_2 * beta
}

fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF, accurate in the lower tail.
fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Additive and multiplicative corrections for a win with margin `eps`
/// (both in units of `c`).
fn v_w_win(t: f64, eps: f64) -> (f64, f64) {
    let x = t - eps;
    let denom = cdf(x);
    let v = if denom > 1e-300 {
        pdf(x) / denom
    } else {
        // Mills-ratio asymptote deep in the lower tail
        -x / (1.0 - 1.0 / (x * x) + 3.0 / x.powi(4))
    };
    let w = (v * (v + x)).clamp(0.0, 1.0);
    (v, w)
}

/// Corrections for a draw: the performance difference is truncated to
/// `[-eps, eps]`. With a zero margin this is the point-mass limit.
fn v_w_draw(t: f64, eps: f64) -> (f64, f64) {
    if eps <= 0.0 {
        return (-t, 1.0);
    }
    let (a, b) = (-eps - t, eps - t);
    let denom = cdf(b) - cdf(a);
    if denom < 1e-300 {
        let nearest = t.clamp(-eps, eps);
        return (nearest - t, 1.0);
    }
    let v = (pdf(a) - pdf(b)) / denom;
    let w = v * v + (b * pdf(b) - a * pdf(a)) / denom;
    (v, w.clamp(0.0, 1.0))
}

/// Effect of one match on one participant: the shift of `mu` (computed
/// directly rather than as a difference of posteriors, so equal priors give
/// exactly opposite shifts) and the posterior `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shift {
    pub mu_delta: f64,
    pub sigma: f64,
}

/// Shifts for `winner` and `loser`, or for both sides of a draw when `draw`
/// is set.
pub fn two_player_shifts(winner: Rating, loser: Rating, draw: bool, cfg: &RatingConfig) -> Result<(Shift, Shift), RatingError> {
    winner.check()?;
    loser.check()?;
    cfg.validate()?;
    let var_w = winner.sigma.powi(2) + cfg.tau.powi(2);
    let var_l = loser.sigma.powi(2) + cfg.tau.powi(2);
    let c2 = 2.0 * cfg.beta.powi(2) + var_w + var_l;
    let c = c2.sqrt();
    let t = (winner.mu - loser.mu) / c;
    let eps = cfg.draw_margin / c;
    let (v, w) = if draw { v_w_draw(t, eps) } else { v_w_win(t, eps) };
    let shift = |var: f64, sign: f64| Shift {
        mu_delta: sign * (var / c * v),
        sigma: (var * (1.0 - var / c2 * w)).max(f64::MIN_POSITIVE).sqrt(),
    };
    Ok((shift(var_w, 1.0), shift(var_l, -1.0)))
}

/// Posterior ratings after `winner` beats `loser`, or after a draw when
/// `draw` is set (labels are then interchangeable).
pub fn update_two_player(winner: Rating, loser: Rating, draw: bool, cfg: &RatingConfig) -> Result<(Rating, Rating), RatingError> {
    let (a, b) = two_player_shifts(winner, loser, draw, cfg)?;
    Ok((
        Rating::new(winner.mu + a.mu_delta, a.sigma),
        Rating::new(loser.mu + b.mu_delta, b.sigma),
    ))
}

/// Chain approximation over rank groups (lower rank is better), every pair
/// update starting from the priors:
///
/// * inside a group of tied players, each adjacent pair is a draw;
/// * between neighbouring groups, every member of the upper group beats
///   every member of the lower one, and each participant takes the mean of
///   those shifts, so group size does not inflate the update.
///
/// Shifts add up; each participant keeps the smallest posterior sigma it saw.
/// With two entries this is exactly [`update_two_player`].
pub fn update_multiplayer(entries: &[(Rating, usize)], cfg: &RatingConfig) -> Result<Vec<Rating>, RatingError> {
    if entries.len() < 2 {
        return Err(RatingError::TooFewPlayers(entries.len()));
    }
    let mut ranks: Vec<usize> = entries.iter().map(|e| e.1).collect();
    ranks.sort_unstable();
    ranks.dedup();
    let groups: Vec<Vec<usize>> = ranks
        .iter()
        .map(|&r| (0..entries.len()).filter(|&i| entries[i].1 == r).collect())
        .collect();

    let mut delta = vec![0.0; entries.len()];
    let mut sigma: Vec<Option<f64>> = vec![None; entries.len()];
    let mut keep = |i: usize, s: f64| sigma[i] = Some(sigma[i].map_or(s, |old: f64| old.min(s)));

    for group in &groups {
        for pair in group.windows(2) {
            let (a, b) = two_player_shifts(entries[pair[0]].0, entries[pair[1]].0, true, cfg)?;
            delta[pair[0]] += a.mu_delta;
            delta[pair[1]] += b.mu_delta;
            keep(pair[0], a.sigma);
            keep(pair[1], b.sigma);
        }
    }
    for adjacent in groups.windows(2) {
        let (upper, lower) = (&adjacent[0], &adjacent[1]);
        // running means stay exact when every term is identical
        let mut up_mean = vec![0.0; upper.len()];
        let mut low_mean = vec![0.0; lower.len()];
        for (ui, &u) in upper.iter().enumerate() {
            for (li, &l) in lower.iter().enumerate() {
                let (a, b) = two_player_shifts(entries[u].0, entries[l].0, false, cfg)?;
                up_mean[ui] += (a.mu_delta - up_mean[ui]) / (li + 1) as f64;
                low_mean[li] += (b.mu_delta - low_mean[li]) / (ui + 1) as f64;
                keep(u, a.sigma);
                keep(l, b.sigma);
            }
        }
        for (ui, &u) in upper.iter().enumerate() {
            delta[u] += up_mean[ui];
        }
        for (li, &l) in lower.iter().enumerate() {
            delta[l] += low_mean[li];
        }
    }
    Ok(entries
        .iter()
        .enumerate()
        .map(|(i, (r, _))| Rating::new(r.mu + delta[i], sigma[i].unwrap_or(r.sigma)))
        .collect())
}
