//! Blocking wire-protocol client, for scripted agents and tests.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::Duration;

use arena_agents::{Agent, AgentError, Turn};
use thiserror::Error;

use crate::protocol::{ClientMsg, RatingDelta, ServerMsg};

#[derive(Debug, Error)]
pub enum ClientError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("server closed the connection")]
    Closed,
    #[error("unreadable server message {line:?}: {source}")]
    Decode { line: String, source: serde_json::Error },
    #[error("server error {code}: {detail}")]
    Server { code: String, detail: String },
    #[error("unexpected message {0:?}")]
    Unexpected(Box<ServerMsg>),
    #[error(transparent)]
    Agent(#[from] AgentError),
}

/// What one seat saw of a finished match.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchSummary {
    pub match_id: String,
    pub env_id: String,
    pub player_id: usize,
    pub num_players: usize,
    pub observations: Vec<String>,
    pub actions: Vec<String>,
    pub rewards: BTreeMap<String, f64>,
    pub rating: RatingDelta,
}

pub struct ArenaClient {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl ArenaClient {
    pub fn connect(addr: impl ToSocketAddrs) -> Result<Self, ClientError> {
        let writer = TcpStream::connect(addr)?;
        writer.set_nodelay(true)?;
        Ok(Self {
            reader: BufReader::new(writer.try_clone()?),
            writer,
        })
    }

    /// Bounds every blocking read; None waits forever.
    pub fn set_read_timeout(&self, t: Option<Duration>) -> Result<(), ClientError> {
        Ok(self.writer.set_read_timeout(t)?)
    }

    pub fn send(&mut self, msg: &ClientMsg) -> Result<(), ClientError> {
        let mut line = serde_json::to_string(msg).expect("client messages serialize");
        line.push('\n');
        self.writer.write_all(line.as_bytes())?;
        Ok(())
    }

    /// Sends a raw line, bypassing serialization.
    pub fn send_raw(&mut self, line: &str) -> Result<(), ClientError> {
        self.writer.write_all(line.as_bytes())?;
        self.writer.write_all(b"\n")?;
        Ok(())
    }

    pub fn recv(&mut self) -> Result<ServerMsg, ClientError> {
        let mut line = String::new();
        if self.reader.read_line(&mut line)? == 0 {
            return Err(ClientError::Closed);
        }
        serde_json::from_str(line.trim_end()).map_err(|source| ClientError::Decode { line, source })
    }

    pub fn hello(&mut self, name: &str, description: &str, email: &str) -> Result<(), ClientError> {
        self.send(&ClientMsg::Hello {
            model_name: name.to_owned(),
            model_description: description.to_owned(),
            email: email.to_owned(),
            human: false,
        })
    }

    pub fn hello_human(&mut self, name: &str) -> Result<(), ClientError> {
        self.send(&ClientMsg::Hello {
            model_name: name.to_owned(),
            model_description: String::new(),
            email: String::new(),
            human: true,
        })
    }

    /// Enqueues and waits for the acknowledgment.
    pub fn enqueue(&mut self, env_ids: &[&str]) -> Result<(), ClientError> {
        self.send(&ClientMsg::Enqueue {
            env_ids: env_ids.iter().map(|s| s.to_string()).collect(),
        })?;
        match self.recv()? {
            ServerMsg::Queued => Ok(()),
            ServerMsg::Error { code, detail } => Err(ClientError::Server { code, detail }),
            other => Err(ClientError::Unexpected(Box::new(other))),
        }
    }

    /// Plays one match with `agent` until `match_end`.
    pub fn play(&mut self, agent: &mut dyn Agent) -> Result<MatchSummary, ClientError> {
        let mut summary: Option<MatchSummary> = None;
        loop {
            match self.recv()? {
                ServerMsg::MatchFound {
                    match_id,
                    env_id,
                    player_id,
                    num_players,
                } => {
                    summary = Some(MatchSummary {
                        match_id,
                        env_id,
                        player_id,
                        num_players,
                        observations: Vec::new(),
                        actions: Vec::new(),
                        rewards: BTreeMap::new(),
                        rating: RatingDelta {
                            mu_before: f64::NAN,
                            sigma_before: f64::NAN,
                            mu_after: f64::NAN,
                            sigma_after: f64::NAN,
                        },
                    })
                }
                ServerMsg::Observation { match_id, player_id, text } => {
                    let Some(s) = summary.as_mut() else {
                        return Err(ClientError::Unexpected(Box::new(ServerMsg::Observation { match_id, player_id, text })));
                    };
                    let action = agent.act(&Turn::text_only(&s.env_id, player_id, &text))?;
                    s.observations.push(text);
                    s.actions.push(action.clone());
                    self.send(&ClientMsg::Action { match_id, text: action })?;
                }
                ServerMsg::MatchEnd { match_id, rewards, rating } => {
                    let mut s = summary.ok_or_else(|| {
                        ClientError::Unexpected(Box::new(ServerMsg::MatchEnd {
                            match_id: match_id.clone(),
                            rewards: rewards.clone(),
                            rating,
                        }))
                    })?;
                    s.rewards = rewards;
                    s.rating = rating;
                    return Ok(s);
                }
                ServerMsg::Error { code, detail } => return Err(ClientError::Server { code, detail }),
                ServerMsg::Queued => {}
            }
        }
    }
}
