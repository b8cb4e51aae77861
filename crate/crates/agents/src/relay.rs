//! A seat played from elsewhere: a human at a browser or a model connected
//! over the wire protocol. The agent pushes each observation out and blocks
//! until text comes back or the turn clock runs out.

use std::sync::mpsc::{channel, Receiver, RecvTimeoutError, Sender};
use std::time::{Duration, Instant};

use crate::{Agent, AgentError, Turn};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelayInput {
    Text(String),
    Disconnected,
    Reconnected,
    /// Stop waiting for good, e.g. on server shutdown.
    Cancel,
}

/// The session's end of the relay. Cheap to clone.
#[derive(Debug, Clone)]
pub struct RelayHandle {
    tx: Sender<RelayInput>,
}

impl RelayHandle {
    /// Returns false once the agent is gone.
    pub fn send(&self, input: RelayInput) -> bool {
        self.tx.send(input).is_ok()
    }

    pub fn submit(&self, text: impl Into<String>) -> bool {
        self.send(RelayInput::Text(text.into()))
    }
}

type Outbound = Box<dyn FnMut(usize, &str) + Send>;

pub struct RelayAgent {
    name: String,
    clock: Duration,
    grace: Duration,
    rx: Receiver<RelayInput>,
    outbound: Outbound,
    connected: bool,
    cancelled: bool,
}

impl std::fmt::Debug for RelayAgent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RelayAgent")
            .field("name", &self.name)
            .field("clock", &self.clock)
            .field("grace", &self.grace)
            .field("connected", &self.connected)
            .finish()
    }
}

impl RelayAgent {
    /// `outbound(seat, text)` is called with every observation the seat must
    /// answer. `clock` bounds each turn; after a disconnect the seat has
    /// `grace` (at most the remaining clock) to come back and answer.
    pub fn new(
        name: impl Into<String>,
        clock: Duration,
        grace: Duration,
        outbound: impl FnMut(usize, &str) + Send + 'static,
    ) -> (Self, RelayHandle) {
        let (tx, rx) = channel();
        let agent = Self {
            name: name.into(),
            clock,
            grace,
            rx,
            outbound: Box::new(outbound),
            connected: true,
            cancelled: false,
        };
        (agent, RelayHandle { tx })
    }

    fn note(&mut self, input: &RelayInput) {
        match input {
            RelayInput::Disconnected => self.connected = false,
            RelayInput::Reconnected => self.connected = true,
            RelayInput::Cancel => self.cancelled = true,
            RelayInput::Text(_) => {}
        }
    }
}

impl Agent for RelayAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn description(&self) -> &str {
        "remote seat"
    }

    fn act(&mut self, turn: &Turn<'_>) -> Result<String, AgentError> {
        // anything typed before this observation went out answers nothing
        while let Ok(stale) = self.rx.try_recv() {
            self.note(&stale);
        }
        if self.cancelled {
            return Err(AgentError::Cancelled);
        }
        let start = Instant::now();
        let full = start + self.clock;
        let mut deadline = if self.connected { full } else { full.min(start + self.grace) };
        if self.connected {
            (self.outbound)(turn.seat, turn.observation);
        }
        loop {
            let now = Instant::now();
            if now >= deadline {
                return Err(AgentError::TurnTimeout);
            }
            match self.rx.recv_timeout(deadline - now) {
                Ok(RelayInput::Text(text)) => return Ok(text),
                Ok(RelayInput::Cancel) => {
                    self.cancelled = true;
                    return Err(AgentError::Cancelled);
                }
                Ok(RelayInput::Disconnected) => {
                    self.connected = false;
                    deadline = deadline.min(Instant::now() + self.grace);
                }
                Ok(RelayInput::Reconnected) => {
                    self.connected = true;
                    deadline = full;
                    (self.outbound)(turn.seat, turn.observation);
                }
                Err(RecvTimeoutError::Timeout) => return Err(AgentError::TurnTimeout),
                Err(RecvTimeoutError::Disconnected) => {
                    // every handle dropped: nobody can answer, but the seat
                    // still gets its grace period before forfeiting
                    self.connected = false;
                    let until = deadline.min(Instant::now() + self.grace);
                    std::thread::sleep(until.saturating_duration_since(Instant::now()));
                    return Err(AgentError::TurnTimeout);
                }
            }
        }
    }
}
