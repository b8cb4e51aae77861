//! How fast TrueSkill and Elo recover a known skill order.
//!
//! Synthetic agents have fixed latent skills; a match between i and j goes
//! to i with probability Φ((s_i − s_j)/(√2·β)). Both systems see the same
//! uniformly scheduled matches and outcomes. After every match we compare
//! each system's order with the latent order by Kendall's tau and note the
//! first match at which tau reaches the threshold. As a second view we also
//! note when each system settles: the match after which tau never drops
//! below the threshold again within the schedule.

use std::io::Write;

use arena_core::{mix_seed, SeedStreams};
use arena_rating::{update_elo, update_two_player, Rating, RatingConfig, RatingError};
use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceConfig {
    pub agents: usize,
    /// Latent skills are evenly spaced over this many multiples of β.
    pub spread_betas: f64,
    pub schedule_len: usize,
    pub seeds: u64,
    pub base_seed: u64,
    pub elo_k: f64,
    pub elo_initial: f64,
    pub threshold: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            agents: 8,
            spread_betas: 2.0,
            schedule_len: 2000,
            seeds: 20,
            base_seed: 0,
            elo_k: 32.0,
            elo_initial: 1500.0,
            threshold: 0.9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeedOutcome {
    pub seed: u64,
    /// Matches played when tau first reached the threshold; None if it never did.
    pub trueskill: Option<usize>,
    pub elo: Option<usize>,
    /// First match from which tau stays at or above the threshold to the end
    /// of the schedule; None if it is below at the end.
    pub trueskill_settled: Option<usize>,
    pub elo_settled: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub config: ConvergenceConfig,
    pub latent: Vec<f64>,
    /// Latent skills are all equal, so there is no order to recover.
    pub no_signal: bool,
    pub outcomes: Vec<SeedOutcome>,
}

fn censored(x: Option<usize>, len: usize) -> f64 {
    x.unwrap_or(len) as f64
}

impl ConvergenceReport {
    /// Mean matches-to-threshold; seeds that never got there count as the
    /// full schedule length.
    pub fn trueskill_mean(&self) -> f64 {
        self.mean(|o| o.trueskill)
    }

    pub fn elo_mean(&self) -> f64 {
        self.mean(|o| o.elo)
    }

    fn mean(&self, pick: impl Fn(&SeedOutcome) -> Option<usize>) -> f64 {
        if self.outcomes.is_empty() {
            return f64::NAN;
        }
        let n = self.config.schedule_len;
        self.outcomes.iter().map(|o| censored(pick(o), n)).sum::<f64>() / self.outcomes.len() as f64
    }

    pub fn trueskill_settled_mean(&self) -> f64 {
        self.mean(|o| o.trueskill_settled)
    }

    pub fn elo_settled_mean(&self) -> f64 {
        self.mean(|o| o.elo_settled)
    }

    pub fn trueskill_reached(&self) -> usize {
        self.outcomes.iter().filter(|o| o.trueskill.is_some()).count()
    }

    pub fn elo_reached(&self) -> usize {
        self.outcomes.iter().filter(|o| o.elo.is_some()).count()
    }

    pub fn summary(&self) -> String {
        if self.no_signal {
            return format!(
                "no signal: {} agents share one latent skill, so no order exists to recover",
                self.config.agents
            );
        }
        format!(
            "{} agents over {}β, {} seeds x {} matches: first reach tau>={}: TrueSkill mean {:.1} (reached {}/{}), Elo k={} mean {:.1} (reached {}/{}); settled: TrueSkill {:.1}, Elo {:.1}",
            self.config.agents,
            self.config.spread_betas,
            self.outcomes.len(),
            self.config.schedule_len,
            self.config.threshold,
            self.trueskill_mean(),
            self.trueskill_reached(),
            self.outcomes.len(),
            self.config.elo_k,
            self.elo_mean(),
            self.elo_reached(),
            self.outcomes.len(),
            self.trueskill_settled_mean(),
            self.elo_settled_mean(),
        )
    }

    /// One row per seed; unreached or unsettled seeds are written as the
    /// schedule length with the matching flag false.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "seed",
            "trueskill_matches",
            "trueskill_reached",
            "elo_matches",
            "elo_reached",
            "trueskill_settled",
            "trueskill_settled_reached",
            "elo_settled",
            "elo_settled_reached",
        ])?;
        let n = self.config.schedule_len;
        for o in &self.outcomes {
            w.write_record([
                o.seed.to_string(),
                censored(o.trueskill, n).to_string(),
                o.trueskill.is_some().to_string(),
                censored(o.elo, n).to_string(),
                o.elo.is_some().to_string(),
                censored(o.trueskill_settled, n).to_string(),
                o.trueskill_settled.is_some().to_string(),
                censored(o.elo_settled, n).to_string(),
                o.elo_settled.is_some().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Kendall's tau-b between an estimate and the truth. None when the truth
/// has no order at all; an estimate with no order scores 0.
pub fn kendall_tau(estimate: &[f64], truth: &[f64]) -> Option<f64> {
    assert_eq!(estimate.len(), truth.len());
    let (mut concordant, mut discordant, mut tied_est, mut tied_truth, mut pairs) = (0i64, 0i64, 0i64, 0i64, 0i64);
    for i in 0..truth.len() {
        for j in i + 1..truth.len() {
            pairs += 1;
            let e = estimate[i].total_cmp(&estimate[j]) as i64;
            let t = truth[i].total_cmp(&truth[j]) as i64;
            if e == 0 {
                tied_est += 1;
            }
            if t == 0 {
                tied_truth += 1;
            }
            match e * t {
                1 => concordant += 1,
                -1 => discordant += 1,
                _ => {}
            }
        }
    }
    if tied_truth == pairs {
        return None;
    }
    if tied_est == pairs {
        return Some(0.0);
    }
    let denom = (((pairs - tied_est) * (pairs - tied_truth)) as f64).sqrt();
    Some((concordant - discordant) as f64 / denom)
}

/// Latent skills evenly spaced over `spread_betas`·β, starting at μ0.
pub fn latent_skills(cfg: &ConvergenceConfig, rating: &RatingConfig) -> Vec<f64> {
    let n = cfg.agents;
    let width = cfg.spread_betas * rating.beta;
    (0..n)
        .map(|i| {
            let frac = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
            rating.mu0 + width * frac
        })
        .collect()
}

fn run_seed(cfg: &ConvergenceConfig, rating: &RatingConfig, latent: &[f64], seed: u64) -> Result<SeedOutcome, RatingError> {
    let n = latent.len();
    let mut rng = SeedStreams::new(mix_seed(&[cfg.base_seed, seed])).stream("convergence");
    let noise = Normal::new(0.0, std::f64::consts::SQRT_2 * rating.beta).expect("beta > 0");
    let mut ts = vec![rating.initial(); n];
    let mut elo = vec![cfg.elo_initial; n];
    // first match at or above the threshold, and the last match below it
    let mut first = [None, None];
    let mut last_below = [0usize, 0];
    for played in 1..=cfg.schedule_len {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let p_i = noise.cdf(latent[i] - latent[j]);
        let (w, l) = if rng.random::<f64>() < p_i { (i, j) } else { (j, i) };

        let (rw, rl) = update_two_player(ts[w], ts[l], false, rating)?;
        ts[w] = rw;
        ts[l] = rl;
        let u = update_elo(elo[w], elo[l], cfg.elo_k, false);
        elo[w] = u.winner;
        elo[l] = u.loser;

        let conservative: Vec<f64> = ts.iter().map(Rating::conservative).collect();
        for (k, est) in [&conservative, &elo].into_iter().enumerate() {
            if kendall_tau(est, latent).is_some_and(|t| t >= cfg.threshold) {
                first[k].get_or_insert(played);
            } else {
                last_below[k] = played;
            }
        }
    }
    let settled = |k: usize| (last_below[k] < cfg.schedule_len).then_some(last_below[k] + 1);
    Ok(SeedOutcome {
        seed,
        trueskill: first[0],
        elo: first[1],
        trueskill_settled: settled(0),
        elo_settled: settled(1),
    })
}

pub fn simulate_convergence(cfg: &ConvergenceConfig, rating: &RatingConfig) -> Result<ConvergenceReport, RatingError> {
    if cfg.agents < 2 {
        return Err(RatingError::TooFewPlayers(cfg.agents));
    }
    if !(cfg.spread_betas.is_finite() && cfg.spread_betas >= 0.0 && cfg.elo_k.is_finite()) {
        return Err(RatingError::InvalidConfig("spread and k must be finite, spread >= 0".into()));
    }
    rating.validate()?;
    let latent = latent_skills(cfg, rating);
    let no_signal = kendall_tau(&latent, &latent).is_none();
    let outcomes = if no_signal {
        Vec::new()
    } else {
        (0..cfg.seeds)
            .map(|seed| run_seed(cfg, rating, &latent, seed))
            .collect::<Result<_, _>>()?
    };
    Ok(ConvergenceReport {
        config: cfg.clone(),
        latent,
        no_signal,
        outcomes,
    })
}
