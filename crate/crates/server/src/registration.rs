//! Model registrations. Names are unique per leaderboard; "Humanity" is
//! reserved for the human aggregate.

use std::collections::BTreeMap;

use arena_rating::HUMANITY;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Registration {
    pub model_name: String,
    pub model_description: String,
    pub email: String,
}

impl Registration {
    pub fn new(name: impl Into<String>, description: impl Into<String>, email: impl Into<String>) -> Self {
        Self {
            model_name: name.into(),
            model_description: description.into(),
            email: email.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistrationError {
    #[error("model_name must not be empty")]
    EmptyName,
    #[error("{0:?} is reserved")]
    ReservedName(String),
    #[error("{0:?} is registered with a different email")]
    NameConflict(String),
}

impl RegistrationError {
    pub fn code(&self) -> &'static str {
        match self {
            RegistrationError::EmptyName => "empty_name",
            RegistrationError::ReservedName(_) => "reserved_name",
            RegistrationError::NameConflict(_) => "name_conflict",
        }
    }
}

/// Serializes as a `name -> registration` map.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Registry {
    by_name: BTreeMap<String, Registration>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&Registration> {
        self.by_name.get(name)
    }

    pub fn len(&self) -> usize {
        self.by_name.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_name.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.by_name.keys().map(String::as_str)
    }

    /// Returns the participant id (the trimmed name) and whether this call
    /// created it. Re-registering with the same email is a no-op; a new
    /// description replaces the old one.
    pub fn register(&mut self, reg: Registration) -> Result<(String, bool), RegistrationError> {
        let name = reg.model_name.trim().to_owned();
        if name.is_empty() {
            return Err(RegistrationError::EmptyName);
        }
        if name.eq_ignore_ascii_case(HUMANITY) {
            return Err(RegistrationError::ReservedName(name));
        }
        match self.by_name.get_mut(&name) {
            Some(prior) if prior.email != reg.email => Err(RegistrationError::NameConflict(name)),
            Some(prior) => {
                prior.model_description = reg.model_description;
                Ok((name, false))
            }
            None => {
                let stored = Registration { model_name: name.clone(), ..reg };
                self.by_name.insert(name.clone(), stored);
                Ok((name, true))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idempotent_and_guarded() {
        let mut r = Registry::new();
        assert_eq!(r.register(Registration::new("m1", "d", "e")).unwrap(), ("m1".into(), true));
        assert_eq!(r.register(Registration::new("m1", "d", "e")).unwrap(), ("m1".into(), false));
        assert_eq!(r.len(), 1);
        assert_eq!(
            r.register(Registration::new("m1", "d", "other")),
            Err(RegistrationError::NameConflict("m1".into()))
        );
        assert_eq!(
            r.register(Registration::new("Humanity", "", "")),
            Err(RegistrationError::ReservedName("Humanity".into()))
        );
        assert_eq!(r.register(Registration::new("  ", "", "")), Err(RegistrationError::EmptyName));
    }
}
