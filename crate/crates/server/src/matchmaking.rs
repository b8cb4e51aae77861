//! Queues and the matchmaking sweep.
//!
//! Within each environment queue, waiting tickets are grouped by closeness of
//! conservative score: the group with the smallest score spread forms first,
//! and the age of its oldest ticket breaks ties. Tickets that have sat
//! through `patience` sweeps are served first, with their nearest partners.
//! A group never holds two tickets of the same rated entity, so nobody is
//! matched against themselves.

use std::collections::BTreeSet;

use thiserror::Error;

pub type TicketId = u64;

#[derive(Debug, Clone, PartialEq)]
pub struct Ticket {
    pub id: TicketId,
    /// Connection that owns the ticket.
    pub owner: u64,
    /// Rated entity ("Humanity" for humans).
    pub entity: String,
    pub env_ids: Vec<String>,
    /// Sweeps survived so far.
    pub waited: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueueError {
    #[error("already queued")]
    AlreadyQueued,
    #[error("unknown environment {0}")]
    UnknownEnvId(String),
    #[error("no environments requested")]
    NoEnvIds,
}

impl QueueError {
    pub fn code(&self) -> &'static str {
        match self {
            QueueError::AlreadyQueued => "already_queued",
            QueueError::UnknownEnvId(_) => "unknown_env_id",
            QueueError::NoEnvIds => "no_env_ids",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub env_id: String,
    /// Oldest ticket first.
    pub tickets: Vec<Ticket>,
}

#[derive(Debug, Clone, Default)]
pub struct Queues {
    tickets: Vec<Ticket>,
    next_id: TicketId,
}

impl Queues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.tickets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tickets.is_empty()
    }

    pub fn tickets(&self) -> &[Ticket] {
        &self.tickets
    }

    /// `exclusive` entities (models) may hold only one ticket at a time;
    /// humans queue per connection.
    pub fn enqueue(
        &mut self,
        owner: u64,
        entity: &str,
        exclusive: bool,
        env_ids: &[String],
        known: impl Fn(&str) -> bool,
    ) -> Result<TicketId, QueueError> {
        if env_ids.is_empty() {
            return Err(QueueError::NoEnvIds);
        }
        if let Some(bad) = env_ids.iter().find(|e| !known(e)) {
            return Err(QueueError::UnknownEnvId(bad.clone()));
        }
        if self
            .tickets
            .iter()
            .any(|t| t.owner == owner || (exclusive && t.entity == entity))
        {
            return Err(QueueError::AlreadyQueued);
        }
        let mut envs = Vec::new();
        for e in env_ids {
            if !envs.contains(e) {
                envs.push(e.clone());
            }
        }
        let id = self.next_id;
        self.next_id += 1;
        self.tickets.push(Ticket {
            id,
            owner,
            entity: entity.to_owned(),
            env_ids: envs,
            waited: 0,
        });
        Ok(id)
    }

    /// Drops every ticket of `owner`; true if there was one.
    pub fn remove_owner(&mut self, owner: u64) -> bool {
        let before = self.tickets.len();
        self.tickets.retain(|t| t.owner != owner);
        before != self.tickets.len()
    }

    /// Forms as many groups as the queues allow. `score` gives an entity's
    /// conservative score and `group_size` the player count to use for an
    /// environment. Matched tickets leave every queue.
    pub fn sweep(
        &mut self,
        score: impl Fn(&str) -> f64,
        group_size: impl Fn(&str) -> usize,
        patience: u64,
    ) -> Vec<Group> {
        for t in &mut self.tickets {
            t.waited += 1;
        }
        let mut pool: Vec<(Ticket, f64)> = self
            .tickets
            .drain(..)
            .map(|t| {
                let s = score(&t.entity);
                (t, s)
            })
            .collect();
        let mut groups = Vec::new();

        // starving tickets first, oldest first
        let mut impatient: Vec<TicketId> = pool
            .iter()
            .filter(|(t, _)| t.waited > patience)
            .map(|(t, _)| t.id)
            .collect();
        impatient.sort_unstable();
        for id in impatient {
            let Some(pos) = pool.iter().position(|(t, _)| t.id == id) else { continue };
            let anchor = pool[pos].clone();
            for env in &anchor.0.env_ids {
                let k = group_size(env);
                if let Some(members) = nearest_partners(&pool, &anchor, env, k) {
                    groups.push(take_group(&mut pool, env, members));
                    break;
                }
            }
        }

        while let Some((env, members)) = tightest_group(&pool, &group_size) {
            groups.push(take_group(&mut pool, &env, members));
        }
        self.tickets = pool.into_iter().map(|(t, _)| t).collect();
        self.tickets.sort_by_key(|t| t.id);
        groups
    }
}

fn take_group(pool: &mut Vec<(Ticket, f64)>, env: &str, members: Vec<TicketId>) -> Group {
    let mut tickets: Vec<Ticket> = Vec::new();
    pool.retain(|(t, _)| {
        if members.contains(&t.id) {
            tickets.push(t.clone());
            false
        } else {
            true
        }
    });
    tickets.sort_by_key(|t| t.id);
    Group {
        env_id: env.to_owned(),
        tickets,
    }
}

/// The anchor plus its k-1 closest eligible partners, or None.
fn nearest_partners(pool: &[(Ticket, f64)], anchor: &(Ticket, f64), env: &str, k: usize) -> Option<Vec<TicketId>> {
    let mut others: Vec<&(Ticket, f64)> = pool
        .iter()
        .filter(|(t, _)| t.id != anchor.0.id && t.env_ids.iter().any(|e| e == env))
        .collect();
    others.sort_by(|a, b| {
        (a.1 - anchor.1)
            .abs()
            .total_cmp(&(b.1 - anchor.1).abs())
            .then(a.0.id.cmp(&b.0.id))
    });
    let mut entities = BTreeSet::from([anchor.0.entity.as_str()]);
    let mut members = vec![anchor.0.id];
    for (t, _) in others {
        if members.len() == k {
            break;
        }
        if entities.insert(t.entity.as_str()) {
            members.push(t.id);
        }
    }
    (members.len() == k).then_some(members)
}

/// Smallest-spread group over all environments; ties go to the group whose
/// oldest ticket is oldest, then to the environment name.
fn tightest_group(pool: &[(Ticket, f64)], group_size: &impl Fn(&str) -> usize) -> Option<(String, Vec<TicketId>)> {
    let envs: BTreeSet<&str> = pool
        .iter()
        .flat_map(|(t, _)| t.env_ids.iter().map(String::as_str))
        .collect();
    let mut best: Option<((f64, TicketId), String, Vec<TicketId>)> = None;
    for env in envs {
        let k = group_size(env).max(1);
        let mut queue: Vec<&(Ticket, f64)> = pool.iter().filter(|(t, _)| t.env_ids.iter().any(|e| e == env)).collect();
        queue.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.id.cmp(&b.0.id)));
        for start in 0..queue.len() {
            let mut entities = BTreeSet::new();
            let mut members = Vec::new();
            let mut hi = queue[start].1;
            for (t, s) in &queue[start..] {
                if members.len() == k {
                    break;
                }
                if entities.insert(t.entity.as_str()) {
                    members.push(t.id);
                    hi = *s;
                }
            }
            if members.len() < k {
                continue;
            }
            let key = (hi - queue[start].1, *members.iter().min().expect("nonempty"));
            let better = match &best {
                None => true,
                Some((b, _, _)) => key.0 < b.0 || (key.0 == b.0 && key.1 < b.1),
            };
            if better {
                best = Some((key, env.to_owned(), members));
            }
        }
    }
    best.map(|(_, env, members)| (env, members))
}
