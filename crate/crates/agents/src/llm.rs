//! Chat-completion client for OpenAI- and OpenRouter-style endpoints.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{Agent, AgentError, Turn};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmConfig {
    /// Everything before `/chat/completions`.
    pub base_url: String,
    pub model: String,
    /// Environment variable holding the bearer token.
    pub api_key_env: String,
    pub timeout_secs: f64,
    /// Extra attempts after the first one on transient failures.
    pub max_retries: u32,
    pub temperature: f64,
    /// First backoff delay; doubles after every failed attempt.
    pub backoff_ms: u64,
}

impl Default for LlmConfig {
    fn default() -> Self {
        Self {
            base_url: "https://openrouter.ai/api/v1".into(),
            model: String::new(),
            api_key_env: "OPENROUTER_API_KEY".into(),
            timeout_secs: 60.0,
            max_retries: 3,
            temperature: 0.7,
            backoff_ms: 500,
        }
    }
}

impl LlmConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        if self.model.trim().is_empty() {
            return Err(AgentError::Config("model is required".into()));
        }
        if !(self.timeout_secs > 0.0 && self.timeout_secs.is_finite()) {
            return Err(AgentError::Config("timeout must be positive".into()));
        }
        if self.base_url.is_empty() || self.api_key_env.is_empty() {
            return Err(AgentError::Config("base url and key variable are required".into()));
        }
        Ok(())
    }

    pub fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

pub fn system_line(env_id: &str) -> String {
    format!(
        "You are playing the text game {env_id}. Read the game log and reply with your next move. \
         Put the action in square brackets, as the rules describe."
    )
}

pub fn request_body(cfg: &LlmConfig, env_id: &str, observation: &str) -> Value {
    json!({
        "model": cfg.model,
        "messages": [
            {"role": "system", "content": system_line(env_id)},
            {"role": "user", "content": observation},
        ],
        "temperature": cfg.temperature,
    })
}

/// `choices[0].message.content` of a completion response.
pub fn completion_text(body: &str) -> Result<String, AgentError> {
    let v: Value = serde_json::from_str(body).map_err(|e| AgentError::MalformedResponse(e.to_string()))?;
    v.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_owned)
        .ok_or_else(|| AgentError::MalformedResponse("no choices[0].message.content".into()))
}

enum Attempt {
    Done(String),
    Transient(String),
    Fatal(AgentError),
}

pub struct LlmAgent {
    name: String,
    cfg: LlmConfig,
    http: ureq::Agent,
}

impl std::fmt::Debug for LlmAgent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LlmAgent").field("name", &self.name).field("cfg", &self.cfg).finish()
    }
}

impl LlmAgent {
    pub fn new(name: impl Into<String>, cfg: LlmConfig) -> Result<Self, AgentError> {
        cfg.validate()?;
        let http = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(cfg.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(Self {
            name: name.into(),
            cfg,
            http,
        })
    }

    pub fn config(&self) -> &LlmConfig {
        &self.cfg
    }

    fn api_key(&self) -> Result<String, AgentError> {
        match std::env::var(&self.cfg.api_key_env) {
            Ok(k) if !k.trim().is_empty() => Ok(k),
            _ => Err(AgentError::Auth(format!("{} is not set", self.cfg.api_key_env))),
        }
    }

    fn attempt(&self, key: &str, body: &str) -> Attempt {
        let sent = self
            .http
            .post(self.cfg.endpoint())
            .header("Authorization", format!("Bearer {key}"))
            .content_type("application/json")
            .send(body);
        let mut resp = match sent {
            Ok(r) => r,
            Err(ureq::Error::Timeout(t)) => return Attempt::Transient(format!("timed out ({t})")),
            Err(e) => return Attempt::Transient(e.to_string()),
        };
        let status = resp.status().as_u16();
        let text = match resp.body_mut().read_to_string() {
            Ok(t) => t,
            Err(ureq::Error::Timeout(t)) => return Attempt::Transient(format!("timed out reading body ({t})")),
            Err(e) => return Attempt::Transient(e.to_string()),
        };
        match status {
            200..=299 => match completion_text(&text) {
                Ok(content) => Attempt::Done(content),
                Err(e) => Attempt::Fatal(e),
            },
            401 | 403 => Attempt::Fatal(AgentError::Auth(format!("status {status}"))),
            408 | 429 | 500..=599 => Attempt::Transient(format!("status {status}")),
            _ => Attempt::Fatal(AgentError::Rejected { status, body: text }),
        }
    }
}

impl Agent for LlmAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn description(&self) -> &str {
        &self.cfg.model
    }

    /// Returns the completion text untouched; extracting the action is the
    /// environment's job.
    fn act(&mut self, turn: &Turn<'_>) -> Result<String, AgentError> {
        let key = self.api_key()?;
        let body = request_body(&self.cfg, turn.env_id, turn.observation).to_string();
        let attempts = self.cfg.max_retries + 1;
        let mut last = String::new();
        for n in 0..attempts {
            if n > 0 {
                let shift = (n - 1).min(16);
                std::thread::sleep(Duration::from_millis(self.cfg.backoff_ms.saturating_mul(1 << shift)));
            }
            match self.attempt(&key, &body) {
                Attempt::Done(text) => return Ok(text),
                Attempt::Fatal(e) => return Err(e),
                Attempt::Transient(why) => last = why,
            }
        }
        Err(AgentError::Timeout { attempts, last })
    }
}
