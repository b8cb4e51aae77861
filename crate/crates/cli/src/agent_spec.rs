//! Agent strings of the form `kind:key=value,...`, e.g. `random:seed=3`,
//! `nim-perfect`, or `llm:model=gpt-x,base=http://localhost:8000`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use arena_agents::{Agent, LlmAgent, LlmConfig, NimPerfectAgent, RandomAgent};
use arena_core::mix_seed;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentKind {
    Random,
    NimPerfect,
    Llm,
}

impl AgentKind {
    fn keys(self) -> &'static [&'static str] {
        match self {
            AgentKind::Random => &["name", "seed"],
            AgentKind::NimPerfect => &["name"],
            AgentKind::Llm => &[
                "name",
                "model",
                "base",
                "key_env",
                "timeout",
                "retries",
                "temperature",
                "backoff_ms",
            ],
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            AgentKind::Random => "random",
            AgentKind::NimPerfect => "nim-perfect",
            AgentKind::Llm => "llm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentSpec {
    pub kind: AgentKind,
    pub params: BTreeMap<String, String>,
}

impl FromStr for AgentSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |why: String| CliError::Config(format!("agent {s:?}: {why}"));
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let kind = match kind.trim() {
            "random" => AgentKind::Random,
            "nim-perfect" => AgentKind::NimPerfect,
            "llm" => AgentKind::Llm,
            other => return Err(bad(format!("unknown kind {other:?} (random, nim-perfect, llm)"))),
        };
        let mut params = BTreeMap::new();
        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair.split_once('=').ok_or_else(|| bad(format!("{pair:?} is not key=value")))?;
            let k = k.trim();
            if !kind.keys().contains(&k) {
                return Err(bad(format!("{} takes {}, not {k:?}", kind.as_str(), kind.keys().join(", "))));
            }
            if params.insert(k.to_owned(), v.trim().to_owned()).is_some() {
                return Err(bad(format!("{k} given twice")));
            }
        }
        let spec = Self { kind, params };
        spec.validate().map_err(|e| bad(e.to_string()))?;
        Ok(spec)
    }
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.as_str())?;
        let mut sep = ':';
        for (k, v) in &self.params {
            write!(f, "{sep}{k}={v}")?;
            sep = ',';
        }
        Ok(())
    }
}

impl AgentSpec {
    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.params
            .get(key)
            .map(|v| v.parse().map_err(|_| CliError::Config(format!("{key}={v:?} is not valid"))))
            .transpose()
    }

    fn validate(&self) -> Result<(), CliError> {
        self.parsed::<u64>("seed")?;
        if self.kind == AgentKind::Llm {
            self.llm_config()?.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }

    fn llm_config(&self) -> Result<LlmConfig, CliError> {
        let mut cfg = LlmConfig::default();
        if let Some(m) = self.params.get("model") {
            cfg.model = m.clone();
        }
        if let Some(b) = self.params.get("base") {
            cfg.base_url = b.clone();
        }
        if let Some(k) = self.params.get("key_env") {
            cfg.api_key_env = k.clone();
        }
        if let Some(t) = self.parsed("timeout")? {
            cfg.timeout_secs = t;
        }
        if let Some(r) = self.parsed("retries")? {
            cfg.max_retries = r;
        }
        if let Some(t) = self.parsed("temperature")? {
            cfg.temperature = t;
        }
        if let Some(b) = self.parsed("backoff_ms")? {
            cfg.backoff_ms = b;
        }
        Ok(cfg)
    }

    /// Display name: `name=` if given, else the agent string itself.
    pub fn name(&self) -> String {
        match self.params.get("name") {
            Some(n) => n.clone(),
            None => self.to_string(),
        }
    }

    /// A fresh agent for one game. Random agents draw from `seed=` mixed
    /// with the game's `salt`, so every game gets its own stream.
    pub fn build(&self, salt: u64) -> Result<Box<dyn Agent>, CliError> {
        let name = self.name();
        Ok(match self.kind {
            AgentKind::Random => {
                let seed = self.parsed::<u64>("seed")?.unwrap_or(0);
                Box::new(RandomAgent::new(name, mix_seed(&[seed, salt])))
            }
            AgentKind::NimPerfect => Box::new(NimPerfectAgent::new(name)),
            AgentKind::Llm => Box::new(LlmAgent::new(name, self.llm_config()?).map_err(|e| CliError::Config(e.to_string()))?),
        })
    }
}
