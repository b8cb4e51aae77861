//! Server settings: one TOML file, then `ARENA_*` environment overrides.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("parsing config: {0}")]
    Parse(String),
    #[error("{var}={value:?}: {reason}")]
    Override { var: &'static str, value: String, reason: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerConfig {
    /// Newline-delimited JSON over TCP.
    pub listen: SocketAddr,
    /// HTTP queries and the WebSocket endpoint `/ws`.
    pub http_listen: SocketAddr,
    pub data_dir: PathBuf,
    pub sweep_interval_ms: u64,
    pub human_clock_secs: f64,
    pub model_clock_secs: f64,
    /// How long a dropped seat may take to come back mid-turn.
    pub disconnect_grace_secs: f64,
    /// Sweeps after which a waiting ticket is served before closer matches.
    pub patience_sweeps: u64,
    /// Root of every match seed.
    pub seed: u64,
    /// Draw probability between equals, used to calibrate per-game draw margins.
    pub draw_probability: f64,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            listen: "127.0.0.1:7878".parse().expect("literal address"),
            http_listen: "127.0.0.1:7879".parse().expect("literal address"),
            data_dir: PathBuf::from("arena-data"),
            sweep_interval_ms: 1000,
            human_clock_secs: 120.0,
            model_clock_secs: 60.0,
            disconnect_grace_secs: 10.0,
            patience_sweeps: 30,
            seed: 0,
            draw_probability: 0.1,
        }
    }
}

fn secs(v: f64) -> Duration {
    Duration::from_secs_f64(v)
}

impl ServerConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path` if given (defaults otherwise), then applies overrides
    /// from the process environment.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Read {
                    path: p.to_owned(),
                    source,
                })?;
                Self::from_toml(&text)?
            }
            None => Self::default(),
        };
        cfg.apply_overrides(|k| std::env::var(k).ok())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_overrides(&mut self, get: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        fn parse<T: std::str::FromStr>(var: &'static str, value: String) -> Result<T, ConfigError>
        where
            T::Err: std::fmt::Display,
        {
            value.parse().map_err(|e: T::Err| ConfigError::Override {
                var,
                value: value.clone(),
                reason: e.to_string(),
            })
        }
        macro_rules! over {
            ($var:literal, $field:expr) => {
                if let Some(v) = get($var) {
                    $field = parse($var, v)?;
                }
            };
        }
        over!("ARENA_LISTEN", self.listen);
        over!("ARENA_HTTP_LISTEN", self.http_listen);
        over!("ARENA_DATA_DIR", self.data_dir);
        over!("ARENA_SWEEP_INTERVAL_MS", self.sweep_interval_ms);
        over!("ARENA_HUMAN_CLOCK_SECS", self.human_clock_secs);
        over!("ARENA_MODEL_CLOCK_SECS", self.model_clock_secs);
        over!("ARENA_DISCONNECT_GRACE_SECS", self.disconnect_grace_secs);
        over!("ARENA_PATIENCE_SWEEPS", self.patience_sweeps);
        over!("ARENA_SEED", self.seed);
        over!("ARENA_DRAW_PROBABILITY", self.draw_probability);
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let clocks = [self.human_clock_secs, self.model_clock_secs, self.disconnect_grace_secs];
        if clocks.iter().any(|c| !c.is_finite() || *c <= 0.0) {
            return Err(ConfigError::Invalid("turn clocks and grace must be positive".into()));
        }
        if self.sweep_interval_ms == 0 {
            return Err(ConfigError::Invalid("sweep interval must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.draw_probability) {
            return Err(ConfigError::Invalid("draw probability must be in [0, 1)".into()));
        }
        Ok(())
    }

    pub fn sweep_interval(&self) -> Duration {
        Duration::from_millis(self.sweep_interval_ms)
    }

    pub fn clock(&self, human: bool) -> Duration {
        secs(if human { self.human_clock_secs } else { self.model_clock_secs })
    }

    pub fn grace(&self) -> Duration {
        secs(self.disconnect_grace_secs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_environment() {
        let mut cfg = ServerConfig::from_toml("listen = \"0.0.0.0:9000\"\nseed = 4\n").unwrap();
        assert_eq!(cfg.listen.port(), 9000);
        assert_eq!(cfg.human_clock_secs, 120.0);
        cfg.apply_overrides(|k| (k == "ARENA_SEED").then(|| "11".to_owned())).unwrap();
        assert_eq!(cfg.seed, 11);
        let bad = cfg.apply_overrides(|k| (k == "ARENA_SWEEP_INTERVAL_MS").then(|| "soon".to_owned()));
        assert!(matches!(bad, Err(ConfigError::Override { .. })));
    }

    #[test]
    fn rejects_nonsense() {
        assert!(ServerConfig::from_toml("human_clock_secs = 0").is_err());
        assert!(ServerConfig::from_toml("colour = 1").is_err());
    }
}
