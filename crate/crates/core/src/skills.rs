//! Soft-skill tags per environment.
//!
//! The bundled table lists, for each environment, the skills it exercises
//! with a weight. Weights are renormalized on load so each environment's
//! nonzero weights sum to one.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const BUNDLED_TABLE: &str = include_str!("../data/skill_weights.tsv");

/// Maximum number of skills an environment may be tagged with.
pub const MAX_SKILLS_PER_ENV: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Skill {
    StrategicPlanning,
    SpatialThinking,
    PatternRecognition,
    TheoryOfMind,
    LogicalReasoning,
    MemoryRecall,
    Bluffing,
    Persuasion,
    UncertaintyEstimation,
    Adaptability,
}

impl Skill {
    pub const ALL: [Skill; 10] = [
        Skill::StrategicPlanning,
        Skill::SpatialThinking,
        Skill::PatternRecognition,
        Skill::TheoryOfMind,
        Skill::LogicalReasoning,
        Skill::MemoryRecall,
        Skill::Bluffing,
        Skill::Persuasion,
        Skill::UncertaintyEstimation,
        Skill::Adaptability,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            Skill::StrategicPlanning => "strategic_planning",
            Skill::SpatialThinking => "spatial_thinking",
            Skill::PatternRecognition => "pattern_recognition",
            Skill::TheoryOfMind => "theory_of_mind",
            Skill::LogicalReasoning => "logical_reasoning",
            Skill::MemoryRecall => "memory_recall",
            Skill::Bluffing => "bluffing",
            Skill::Persuasion => "persuasion",
            Skill::UncertaintyEstimation => "uncertainty_estimation",
            Skill::Adaptability => "adaptability",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Skill::StrategicPlanning => "Strategic Planning",
            Skill::SpatialThinking => "Spatial Thinking",
            Skill::PatternRecognition => "Pattern Recognition",
            Skill::TheoryOfMind => "Theory of Mind",
            Skill::LogicalReasoning => "Logical Reasoning",
            Skill::MemoryRecall => "Memory Recall",
            Skill::Bluffing => "Bluffing",
            Skill::Persuasion => "Persuasion",
            Skill::UncertaintyEstimation => "Uncertainty Estimation",
            Skill::Adaptability => "Adaptability",
        }
    }
}

impl fmt::Display for Skill {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Skill {
    type Err = SkillTableError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Skill::ALL
            .iter()
            .copied()
            .find(|k| k.key() == s)
            .ok_or_else(|| SkillTableError::UnknownSkill(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SkillTableError {
    #[error("line {line}: expected `env_id<TAB>skill<TAB>weight`")]
    Malformed { line: usize },
    #[error("unknown skill {0:?}")]
    UnknownSkill(String),
    #[error("line {line}: weight {weight} outside [0, 1]")]
    BadWeight { line: usize, weight: f64 },
    #[error("{env_id} is tagged with {count} skills (at most {MAX_SKILLS_PER_ENV})")]
    TooManySkills { env_id: String, count: usize },
    #[error("{0} has no positive weight")]
    NoWeight(String),
}

/// Environment → skill → weight.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SkillTable {
    weights: BTreeMap<String, BTreeMap<Skill, f64>>,
}

impl SkillTable {
    /// The table shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_TABLE).expect("bundled skill table is valid")
    }

    /// Parses a tab-separated `(env_id, skill, weight)` table; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, SkillTableError> {
        let mut weights: BTreeMap<String, BTreeMap<Skill, f64>> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [env, skill, weight] = cols[..] else {
                return Err(SkillTableError::Malformed { line: idx + 1 });
            };
            let skill: Skill = skill.parse()?;
            let weight: f64 = weight
                .parse()
                .map_err(|_| SkillTableError::Malformed { line: idx + 1 })?;
            if !(0.0..=1.0).contains(&weight) {
                return Err(SkillTableError::BadWeight {
                    line: idx + 1,
                    weight,
                });
            }
            if weight > 0.0 {
                weights.entry(env.to_owned()).or_default().insert(skill, weight);
            }
        }
        for (env, row) in weights.iter_mut() {
            if row.len() > MAX_SKILLS_PER_ENV {
                return Err(SkillTableError::TooManySkills {
                    env_id: env.clone(),
                    count: row.len(),
                });
            }
            let total: f64 = row.values().sum();
            if total <= 0.0 {
                return Err(SkillTableError::NoWeight(env.clone()));
            }
            for w in row.values_mut() {
                *w /= total;
            }
        }
        Ok(Self { weights })
    }

    pub fn for_env(&self, env_id: &str) -> Option<&BTreeMap<Skill, f64>> {
        self.weights.get(env_id)
    }

    pub fn weight(&self, env_id: &str, skill: Skill) -> f64 {
        self.for_env(env_id)
            .and_then(|row| row.get(&skill))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn env_ids(&self) -> impl Iterator<Item = &str> {
        self.weights.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BTreeMap<Skill, f64>)> {
        self.weights.iter().map(|(k, v)| (k.as_str(), v))
    }
}
