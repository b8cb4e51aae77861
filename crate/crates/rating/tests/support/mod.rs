//! Independent checks for the rating engine, shared with the workspace
//! acceptance run. Each returns a one-line summary on success.

#![allow(dead_code)]

use std::collections::BTreeMap;

use arena_core::{Skill, SkillTable};
use arena_rating::{
    init_rating, normalize_skills, skill_profile, update_elo, update_two_player, Competitor, Leaderboard,
    MatchResult, Rating, RatingConfig, SkillProfile,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

pub type Check = Result<String, String>;

pub fn initialization() -> Check {
    let r = init_rating();
    if r.mu == 25.0 && r.sigma == 25.0 / 3.0 && RatingConfig::default().initial() == r {
        Ok(format!("mu={} sigma={}", r.mu, r.sigma))
    } else {
        Err(format!("got {r:?}"))
    }
}

/// Posterior mean and standard deviation of both skills, by brute-force 2-D
/// integration of prior × outcome likelihood.
///
/// Skills are s ~ N(mu, sigma² + tau²); performances add N(0, beta²) noise.
/// Given skills, the difference of performances is N(s_w − s_l, 2 beta²), so a
/// win has likelihood P(d > eps) and a draw P(|d| ≤ eps).
pub fn quadrature_posterior(w: Rating, l: Rating, draw: bool, cfg: &RatingConfig) -> (Rating, Rating) {
    let unit = Normal::new(0.0, 1.0).unwrap();
    let sw = (w.sigma.powi(2) + cfg.tau.powi(2)).sqrt();
    let sl = (l.sigma.powi(2) + cfg.tau.powi(2)).sqrt();
    let noise = 2f64.sqrt() * cfg.beta;
    let eps = cfg.draw_margin;
    let likelihood = |d: f64| {
        if draw {
            unit.cdf((eps - d) / noise) - unit.cdf((-eps - d) / noise)
        } else {
            unit.cdf((d - eps) / noise)
        }
    };
    // 10 sigma each side; the integrand is smooth so a fine midpoint rule is
    // accurate far beyond the tolerance used here
    const N: usize = 600;
    let axis = |mu: f64, s: f64| -> Vec<(f64, f64)> {
        let h = 20.0 * s / N as f64;
        (0..N)
            .map(|i| {
                let x = mu - 10.0 * s + (i as f64 + 0.5) * h;
                (x, unit.pdf((x - mu) / s) / s * h)
            })
            .collect()
    };
    let xs = axis(w.mu, sw);
    let ys = axis(l.mu, sl);
    let (mut z, mut m1w, mut m2w, mut m1l, mut m2l) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, px) in &xs {
        for &(y, py) in &ys {
            let p = px * py * likelihood(x - y);
            z += p;
            m1w += p * x;
            m2w += p * x * x;
            m1l += p * y;
            m2l += p * y * y;
        }
    }
    let (ew, el) = (m1w / z, m1l / z);
    (
        Rating::new(ew, (m2w / z - ew * ew).max(0.0).sqrt()),
        Rating::new(el, (m2l / z - el * el).max(0.0).sqrt()),
    )
}

/// 50 prior pairs: 25 decisive results and 25 draws, across mean gaps,
/// uncertainty shapes, margins and drift settings.
pub fn quadrature_grid() -> Vec<(Rating, Rating, bool, RatingConfig)> {
    let gaps = [-10.0, -4.0, 0.0, 4.0, 10.0];
    let sigmas = [(25.0 / 3.0, 25.0 / 3.0), (25.0 / 3.0, 2.0), (1.0, 4.0), (3.0, 3.0), (6.0, 1.0)];
    let mut cases = Vec::new();
    for (gi, &gap) in gaps.iter().enumerate() {
        for (si, &(a, b)) in sigmas.iter().enumerate() {
            for draw in [false, true] {
                let k = gi * sigmas.len() + si;
                let cfg = RatingConfig {
                    tau: if k % 2 == 0 { 0.0 } else { 25.0 / 300.0 },
                    draw_margin: match (draw, k % 3) {
                        (false, 0) => 0.0,
                        (false, _) => 0.74,
                        (true, 0) => 0.5,
                        (true, 1) => 1.5,
                        (true, _) => 3.0,
                    },
                    ..RatingConfig::default()
                };
                cases.push((Rating::new(25.0 + gap / 2.0, a), Rating::new(25.0 - gap / 2.0, b), draw, cfg));
            }
        }
    }
    cases
}

pub fn trueskill_quadrature(tolerance: f64) -> Check {
    let cases = quadrature_grid();
    let mut worst = 0.0f64;
    let mut draws = 0;
    for (w, l, draw, cfg) in &cases {
        let (cw, cl) = update_two_player(*w, *l, *draw, cfg).map_err(|e| e.to_string())?;
        let (qw, ql) = quadrature_posterior(*w, *l, *draw, cfg);
        let err = [cw.mu - qw.mu, cw.sigma - qw.sigma, cl.mu - ql.mu, cl.sigma - ql.sigma]
            .iter()
            .fold(0.0f64, |m, d| m.max(d.abs()));
        if err > tolerance {
            return Err(format!(
                "{w:?} vs {l:?} draw={draw} eps={}: closed form {cw:?}/{cl:?}, quadrature {qw:?}/{ql:?}",
                cfg.draw_margin
            ));
        }
        worst = worst.max(err);
        draws += usize::from(*draw);
    }
    Ok(format!("{} cases ({draws} draws), max abs error {worst:.2e}", cases.len()))
}

/// Elo on random pairs against the logistic formula written out directly.
pub fn elo_pairs(n: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..n {
        let w: f64 = rng.random_range(800.0..2400.0);
        let l: f64 = rng.random_range(800.0..2400.0);
        let k: f64 = rng.random_range(8.0..48.0);
        let draw = rng.random_bool(0.2);
        let u = update_elo(w, l, k, draw);
        if u.winner_change() + u.loser_change() != 0.0 {
            return Err(format!("pair {i}: changes {} and {} do not cancel", u.winner_change(), u.loser_change()));
        }
        let expected = 10f64.powf(w / 400.0) / (10f64.powf(w / 400.0) + 10f64.powf(l / 400.0));
        let target = if draw { 0.5 } else { 1.0 };
        let want = k * (target - expected);
        let err = [u.delta - want, u.winner - w - want, l - u.loser - want]
            .iter()
            .fold(0.0f64, |m, d| m.max(d.abs()));
        if err > 1e-9 {
            return Err(format!("pair {i}: {w} vs {l} k={k}: got {u:?}, formula gives {want}"));
        }
        worst = worst.max(err);
    }
    Ok(format!("{n} pairs, transfers cancel exactly, max deviation {worst:.1e}"))
}

/// A participant rated only in Nim profiles exactly Nim's tagged skills, and
/// min-max scaling hits 0 and 1 while keeping every per-skill order.
pub fn nim_profile_and_normalization() -> Check {
    let cfg = RatingConfig::default();
    let table = SkillTable::bundled();
    let mut board = Leaderboard::new();
    board
        .apply_match(
            &MatchResult::new("Nim-v0", vec![vec![Competitor::model("nim-only")], vec![Competitor::model("rival")]], 0),
            &cfg,
        )
        .map_err(|e| e.to_string())?;
    let profile = skill_profile(&board, &table, "nim-only").map_err(|e| e.to_string())?;
    let skills: Vec<Skill> = profile.raw.keys().copied().collect();
    if skills != [Skill::StrategicPlanning, Skill::LogicalReasoning] {
        return Err(format!("Nim-only profile has skills {skills:?}"));
    }
    let score = board.get("nim-only").unwrap().per_env["Nim-v0"].conservative();
    if profile.raw.values().any(|&x| x != score) {
        return Err(format!("raw {:?} differs from the Nim conservative score {score}", profile.raw));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let population: Vec<SkillProfile> = (0..12)
        .map(|i| SkillProfile {
            participant: format!("p{i}"),
            raw: Skill::ALL
                .iter()
                .filter_map(|&s| {
                    let x = (rng.random_range(-20.0f64..40.0) * 4.0).round() / 4.0;
                    rng.random_bool(0.8).then_some((s, x))
                })
                .collect(),
            normalized: BTreeMap::new(),
        })
        .collect();
    let out = normalize_skills(population);
    for skill in Skill::ALL {
        let col: Vec<(f64, f64)> = out
            .iter()
            .filter_map(|p| Some((*p.raw.get(&skill)?, p.normalized[&skill])))
            .collect();
        if col.len() < 2 {
            continue;
        }
        let lo = col.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let hi = col.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        let distinct = col.iter().any(|c| c.0 != col[0].0);
        if distinct && (lo != 0.0 || hi != 1.0) {
            return Err(format!("{skill}: normalized range [{lo}, {hi}]"));
        }
        for a in &col {
            for b in &col {
                if a.0.partial_cmp(&b.0) != a.1.partial_cmp(&b.1) {
                    return Err(format!("{skill}: raw {} vs {} reorders to {} vs {}", a.0, b.0, a.1, b.1));
                }
            }
        }
    }
    Ok(format!("Nim-only skills {skills:?}; 12-participant population scaled to [0,1] with order kept"))
}
