//! The immutable table of registered environments.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use regex::Regex;
use thiserror::Error;

use crate::game::{Game, GameError, GameRules};
use crate::games;
use crate::message::Message;
use crate::seed::SeedStreams;

pub type Factory = dyn Fn(usize, &SeedStreams) -> (Box<dyn Game>, Vec<Message>) + Send + Sync;

/// Rules plus a constructor producing the initial state and setup messages.
#[derive(Clone)]
pub struct GameSpec {
    pub rules: GameRules,
    factory: Arc<Factory>,
}

impl std::fmt::Debug for GameSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GameSpec").field("rules", &self.rules).finish()
    }
}

impl GameSpec {
    pub fn new<F>(rules: GameRules, factory: F) -> Self
    where
        F: Fn(usize, &SeedStreams) -> (Box<dyn Game>, Vec<Message>) + Send + Sync + 'static,
    {
        Self {
            rules,
            factory: Arc::new(factory),
        }
    }

    /// Builds a fresh game. Private randomness comes from labeled seed streams.
    pub fn create(
        &self,
        num_players: usize,
        seed: u64,
    ) -> Result<(Box<dyn Game>, Vec<Message>), GameError> {
        if !self.rules.accepts(num_players) {
            return Err(GameError::PlayerCountOutOfRange {
                env_id: self.rules.env_id.to_owned(),
                min: self.rules.min_players,
                max: self.rules.max_players,
                got: num_players,
            });
        }
        Ok((self.factory)(num_players, &SeedStreams::new(seed)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("environment id {0:?} does not match `<Name>-v<digit>`")]
    BadEnvId(String),
    #[error("environment {0} registered twice")]
    Duplicate(String),
}

#[derive(Debug, Clone, Default)]
pub struct Registry {
    specs: BTreeMap<String, Arc<GameSpec>>,
}

fn env_id_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[A-Za-z][A-Za-z0-9]*-v[0-9]$").expect("static regex"))
}

pub fn is_valid_env_id(id: &str) -> bool {
    env_id_pattern().is_match(id)
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, spec: GameSpec) -> Result<(), RegistryError> {
        let id = spec.rules.env_id.to_owned();
        if !is_valid_env_id(&id) {
            return Err(RegistryError::BadEnvId(id));
        }
        if self.specs.contains_key(&id) {
            return Err(RegistryError::Duplicate(id));
        }
        self.specs.insert(id, Arc::new(spec));
        Ok(())
    }

    pub fn get(&self, env_id: &str) -> Option<&Arc<GameSpec>> {
        self.specs.get(env_id)
    }

    pub fn rules(&self, env_id: &str) -> Option<&GameRules> {
        self.get(env_id).map(|s| &s.rules)
    }

    pub fn env_ids(&self) -> impl Iterator<Item = &str> {
        self.specs.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }
}

/// All bundled games with their default configurations.
pub fn registry() -> &'static Registry {
    static REGISTRY: OnceLock<Registry> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut r = Registry::new();
        for spec in games::all_specs() {
            r.register(spec).expect("bundled specs are unique and well-named");
        }
        r
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CreateError {
    #[error("unknown environment {0}")]
    UnknownEnvId(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Creates a bundled game in its initial state.
pub fn create_game(
    env_id: &str,
    num_players: usize,
    seed: u64,
) -> Result<(Box<dyn Game>, Vec<Message>), CreateError> {
    let spec = registry()
        .get(env_id)
        .ok_or_else(|| CreateError::UnknownEnvId(env_id.to_owned()))?;
    Ok(spec.create(num_players, seed)?)
}
