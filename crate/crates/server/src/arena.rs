//! Shared arena state: connections, queues, live sessions and the rated
//! leaderboard.
//!
//! Everything mutable sits behind one mutex, which also makes the commit
//! path the single writer of the leaderboard. Readers take an `Arc`
//! snapshot and never block a commit for longer than the pointer copy.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard};

use arena_agents::{play_match, MatchOptions, RelayAgent, RelayHandle, RelayInput};
use arena_core::{mix_seed, registry, MatchRecord, SeedStreams, SkillTable};
use arena_rating::{skill_profiles, Leaderboard, MatchResult, RatingConfig, RatingError, SkillProfile, HUMANITY};
use rand::seq::SliceRandom;
use thiserror::Error;
use tokio::sync::mpsc::UnboundedSender;

use crate::config::ServerConfig;
use crate::matchmaking::Queues;
use crate::protocol::{ClientMsg, RatingDelta, ServerMsg};
use crate::registration::{Registration, RegistrationError, Registry};
use crate::store::{Store, StoreError};

pub type Outbox = UnboundedSender<ServerMsg>;

#[derive(Debug, Error)]
pub enum ArenaError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Rating(#[from] RatingError),
    #[error(transparent)]
    Registration(#[from] RegistrationError),
}

#[derive(Debug, Clone)]
struct Identity {
    entity: String,
    human: bool,
}

struct Conn {
    tx: Outbox,
    identity: Option<Identity>,
    live: Option<String>,
}

struct Seat {
    conn: Option<u64>,
    tx: Arc<Mutex<Outbox>>,
    relay: RelayHandle,
    awaiting: Arc<AtomicBool>,
    entity: String,
    human: bool,
}

struct Live {
    env_id: String,
    seats: Vec<Seat>,
}

struct Inner {
    registry: Registry,
    conns: HashMap<u64, Conn>,
    queues: Queues,
    live: BTreeMap<String, Live>,
    board: Arc<Leaderboard>,
    applied: u64,
    next_match: u64,
    closed: bool,
}

/// A session ready to be driven on a blocking thread.
pub struct SessionPlan {
    pub match_id: String,
    pub env_id: String,
    pub seed: u64,
    pub participants: Vec<String>,
    agents: Vec<Box<RelayAgent>>,
}

impl std::fmt::Debug for SessionPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SessionPlan")
            .field("match_id", &self.match_id)
            .field("env_id", &self.env_id)
            .field("seed", &self.seed)
            .field("participants", &self.participants)
            .finish()
    }
}

pub struct Arena {
    cfg: ServerConfig,
    rating: RatingConfig,
    store: Store,
    skills: SkillTable,
    inner: Mutex<Inner>,
    next_conn: AtomicU64,
}

fn lock(m: &Mutex<Inner>) -> MutexGuard<'_, Inner> {
    m.lock().unwrap_or_else(|p| p.into_inner())
}

fn send(tx: &Arc<Mutex<Outbox>>, msg: ServerMsg) {
    let tx = tx.lock().unwrap_or_else(|p| p.into_inner());
    // a closed outbox means the socket is gone; the relay handles that
    let _ = tx.send(msg);
}

/// Rating settings the arena uses: defaults with draw margins calibrated
/// for every game that can end level.
pub fn arena_rating_config(draw_probability: f64) -> RatingConfig {
    let drawable: Vec<&str> = registry()
        .env_ids()
        .filter(|id| registry().rules(id).is_some_and(|r| r.draws_possible))
        .collect();
    RatingConfig::default().with_calibrated_margins(drawable, draw_probability)
}

fn match_number(id: &str) -> Option<u64> {
    id.strip_prefix('m')?.parse().ok()
}

impl Arena {
    /// Opens the data directory and brings the leaderboard up to date with
    /// the match log.
    pub fn open(cfg: ServerConfig) -> Result<Arc<Self>, ArenaError> {
        let store = Store::open(&cfg.data_dir)?;
        let rating = arena_rating_config(cfg.draw_probability);
        let registry = store.read_registrations()?;
        let records = store.read_records()?;
        let (mut board, applied) = match store.read_snapshot()? {
            Some((board, applied)) if applied as usize <= records.len() => (board, applied as usize),
            _ => (Leaderboard::new(), 0),
        };
        let mut dirty = applied < records.len();
        for rec in &records[applied..] {
            if let Err(e) = board.apply_match(&MatchResult::from_record(rec), &rating) {
                tracing::warn!(match_id = %rec.match_id, "skipping unratable record: {e}");
            }
        }
        for name in registry.names() {
            if !board.contains(name) {
                board.register(name, &rating);
                dirty = true;
            }
        }
        if dirty {
            store.write_snapshot(&board, records.len() as u64)?;
        }
        let next_match = records
            .iter()
            .filter_map(|r| match_number(&r.match_id))
            .max()
            .map_or(0, |n| n + 1);
        tracing::info!(records = records.len(), replayed = records.len() - applied, "arena state recovered");
        Ok(Arc::new(Self {
            skills: SkillTable::bundled(),
            inner: Mutex::new(Inner {
                registry,
                conns: HashMap::new(),
                queues: Queues::new(),
                live: BTreeMap::new(),
                board: Arc::new(board),
                applied: records.len() as u64,
                next_match,
                closed: false,
            }),
            cfg,
            rating,
            store,
            next_conn: AtomicU64::new(1),
        }))
    }

    pub fn config(&self) -> &ServerConfig {
        &self.cfg
    }

    pub fn rating_config(&self) -> &RatingConfig {
        &self.rating
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    /// Immutable snapshot of the current ratings.
    pub fn leaderboard(&self) -> Arc<Leaderboard> {
        lock(&self.inner).board.clone()
    }

    pub fn skill_profiles(&self) -> Vec<SkillProfile> {
        skill_profiles(&self.leaderboard(), &self.skills)
    }

    pub fn live_sessions(&self) -> usize {
        lock(&self.inner).live.len()
    }

    pub fn queued(&self) -> usize {
        lock(&self.inner).queues.len()
    }

    /// Registers a model and gives it a leaderboard row at the initial
    /// rating. Idempotent for the same name and email.
    pub fn register(&self, reg: Registration) -> Result<String, ArenaError> {
        let mut inner = lock(&self.inner);
        self.register_locked(&mut inner, reg)
    }

    fn register_locked(&self, inner: &mut Inner, reg: Registration) -> Result<String, ArenaError> {
        let mut next = inner.registry.clone();
        let (name, created) = next.register(reg)?;
        if created {
            self.store.write_registrations(&next)?;
        }
        inner.registry = next;
        if !inner.board.contains(&name) {
            let mut board = (*inner.board).clone();
            board.register(&name, &self.rating);
            self.store.write_snapshot(&board, inner.applied)?;
            inner.board = Arc::new(board);
        }
        Ok(name)
    }

    /// A new connection whose outgoing messages go to `tx`.
    pub fn connect(&self, tx: Outbox) -> u64 {
        let id = self.next_conn.fetch_add(1, Ordering::Relaxed);
        lock(&self.inner).conns.insert(
            id,
            Conn {
                tx,
                identity: None,
                live: None,
            },
        );
        id
    }

    /// The connection is gone: its tickets leave the queues and any seat it
    /// held starts its grace period.
    pub fn disconnect(&self, conn: u64) {
        let mut inner = lock(&self.inner);
        inner.queues.remove_owner(conn);
        if let Some(c) = inner.conns.remove(&conn) {
            if let Some(live) = c.live.and_then(|id| inner.live.get_mut(&id)) {
                for seat in live.seats.iter_mut().filter(|s| s.conn == Some(conn)) {
                    seat.conn = None;
                    seat.relay.send(RelayInput::Disconnected);
                }
            }
        }
    }

    fn reply(inner: &Inner, conn: u64, msg: ServerMsg) {
        if let Some(c) = inner.conns.get(&conn) {
            let _ = c.tx.send(msg);
        }
    }

    /// Parses and handles one raw client line.
    pub fn handle_line(&self, conn: u64, line: &str) {
        match serde_json::from_str::<ClientMsg>(line) {
            Ok(msg) => self.handle(conn, msg),
            Err(e) => Self::reply(&lock(&self.inner), conn, ServerMsg::error("bad_message", e.to_string())),
        }
    }

    pub fn handle(&self, conn: u64, msg: ClientMsg) {
        let mut inner = lock(&self.inner);
        let out = match msg {
            ClientMsg::Hello {
                model_name,
                model_description,
                email,
                human,
            } => self.hello(&mut inner, conn, Registration::new(model_name, model_description, email), human),
            ClientMsg::Enqueue { env_ids } => self.enqueue(&mut inner, conn, &env_ids),
            ClientMsg::Action { match_id, text } => Self::action(&mut inner, conn, &match_id, text),
        };
        if let Some(msg) = out {
            Self::reply(&inner, conn, msg);
        }
    }

    fn hello(&self, inner: &mut Inner, conn: u64, reg: Registration, human: bool) -> Option<ServerMsg> {
        let identity = if human {
            Identity {
                entity: HUMANITY.to_owned(),
                human: true,
            }
        } else {
            match self.register_locked(inner, reg) {
                Ok(name) => Identity {
                    entity: name,
                    human: false,
                },
                Err(ArenaError::Registration(e)) => return Some(ServerMsg::error(e.code(), e.to_string())),
                Err(e) => return Some(ServerMsg::error("internal", e.to_string())),
            }
        };
        let current = inner.conns.get(&conn)?.identity.clone();
        if let Some(id) = current {
            if id.entity != identity.entity || id.human != identity.human {
                return Some(ServerMsg::error("already_identified", format!("connection speaks for {}", id.entity)));
            }
            return None;
        }
        // a model coming back to a seat it dropped picks the seat up again
        let mut resumed = None;
        if !identity.human {
            for (match_id, live) in inner.live.iter_mut() {
                let num_players = live.seats.len();
                for (player_id, seat) in live.seats.iter_mut().enumerate() {
                    if seat.conn.is_none() && !seat.human && seat.entity == identity.entity {
                        let tx = inner.conns[&conn].tx.clone();
                        *seat.tx.lock().unwrap_or_else(|p| p.into_inner()) = tx;
                        seat.conn = Some(conn);
                        send(
                            &seat.tx,
                            ServerMsg::MatchFound {
                                match_id: match_id.clone(),
                                env_id: live.env_id.clone(),
                                player_id,
                                num_players,
                            },
                        );
                        seat.relay.send(RelayInput::Reconnected);
                        resumed = Some(match_id.clone());
                        break;
                    }
                }
                if resumed.is_some() {
                    break;
                }
            }
        }
        let c = inner.conns.get_mut(&conn)?;
        c.identity = Some(identity);
        c.live = resumed;
        None
    }

    fn enqueue(&self, inner: &mut Inner, conn: u64, env_ids: &[String]) -> Option<ServerMsg> {
        let Some(c) = inner.conns.get(&conn) else { return None };
        let Some(id) = c.identity.clone() else {
            return Some(ServerMsg::error("not_registered", "send hello first"));
        };
        let busy = c.live.is_some()
            || (!id.human
                && inner
                    .live
                    .values()
                    .any(|l| l.seats.iter().any(|s| !s.human && s.entity == id.entity)));
        if busy {
            return Some(ServerMsg::error("in_match", "already playing a live match"));
        }
        let known = |e: &str| registry().get(e).is_some();
        match inner.queues.enqueue(conn, &id.entity, !id.human, env_ids, known) {
            Ok(_) => Some(ServerMsg::Queued),
            Err(e) => Some(ServerMsg::error(e.code(), e.to_string())),
        }
    }

    fn action(inner: &mut Inner, conn: u64, match_id: &str, text: String) -> Option<ServerMsg> {
        let Some(live) = inner.live.get(match_id) else {
            return Some(ServerMsg::error("unknown_match", format!("no live match {match_id}")));
        };
        let Some(seat) = live.seats.iter().find(|s| s.conn == Some(conn)) else {
            return Some(ServerMsg::error("not_in_match", format!("you hold no seat in {match_id}")));
        };
        if !seat.awaiting.swap(false, Ordering::SeqCst) {
            return Some(ServerMsg::error("not_your_turn", "no observation is waiting for an answer"));
        }
        seat.relay.submit(text);
        None
    }

    /// One matchmaking pass. Every returned plan has had `match_found` sent
    /// to its seats and must be driven with [`Arena::run_session`].
    pub fn sweep(&self) -> Vec<SessionPlan> {
        let mut inner = lock(&self.inner);
        if inner.closed {
            return Vec::new();
        }
        let board = inner.board.clone();
        let score = |entity: &str| board.get(entity).map_or(self.rating.initial().conservative(), |e| e.global.conservative());
        let size = |env: &str| registry().rules(env).map_or(2, |r| r.min_players);
        let groups = inner.queues.sweep(score, size, self.cfg.patience_sweeps);
        let mut plans = Vec::with_capacity(groups.len());
        for group in groups {
            let number = inner.next_match;
            inner.next_match += 1;
            let match_id = format!("m{number:06}");
            let seed = mix_seed(&[self.cfg.seed, number]);
            let mut tickets = group.tickets;
            tickets.shuffle(&mut SeedStreams::new(seed).stream("seats"));
            let num_players = tickets.len();
            let mut seats = Vec::with_capacity(num_players);
            let mut agents = Vec::with_capacity(num_players);
            let mut participants = Vec::with_capacity(num_players);
            for (player_id, t) in tickets.into_iter().enumerate() {
                let Some(c) = inner.conns.get_mut(&t.owner) else { continue };
                let human = c.identity.as_ref().is_some_and(|i| i.human);
                c.live = Some(match_id.clone());
                let tx = Arc::new(Mutex::new(c.tx.clone()));
                let awaiting = Arc::new(AtomicBool::new(false));
                let outbound = {
                    let (tx, awaiting, match_id) = (tx.clone(), awaiting.clone(), match_id.clone());
                    move |player_id: usize, text: &str| {
                        awaiting.store(true, Ordering::SeqCst);
                        send(
                            &tx,
                            ServerMsg::Observation {
                                match_id: match_id.clone(),
                                player_id,
                                text: text.to_owned(),
                            },
                        );
                    }
                };
                let (agent, relay) = RelayAgent::new(&t.entity, self.cfg.clock(human), self.cfg.grace(), outbound);
                send(
                    &tx,
                    ServerMsg::MatchFound {
                        match_id: match_id.clone(),
                        env_id: group.env_id.clone(),
                        player_id,
                        num_players,
                    },
                );
                agents.push(Box::new(agent));
                participants.push(t.entity.clone());
                seats.push(Seat {
                    conn: Some(t.owner),
                    tx,
                    relay,
                    awaiting,
                    entity: t.entity,
                    human,
                });
            }
            inner.live.insert(
                match_id.clone(),
                Live {
                    env_id: group.env_id.clone(),
                    seats,
                },
            );
            plans.push(SessionPlan {
                match_id,
                env_id: group.env_id,
                seed,
                participants,
                agents,
            });
        }
        plans
    }

    /// Drives a session to the end on the calling (blocking) thread, then
    /// rates and stores it. Returns the stored record, or None if the match
    /// was aborted.
    pub fn run_session(&self, plan: SessionPlan) -> Option<MatchRecord> {
        let SessionPlan {
            match_id,
            env_id,
            seed,
            participants,
            mut agents,
        } = plan;
        let opts = MatchOptions {
            match_id: match_id.clone(),
            participants: Some(participants),
            llm_view: true,
            record_wall_time: true,
            forfeit_on_agent_error: false,
        };
        let outcome = play_match(&env_id, seed, &mut agents, &opts);
        drop(agents);
        match outcome {
            Ok(record) => match self.commit(record) {
                Ok(record) => Some(record),
                Err(e) => {
                    tracing::error!(%match_id, "commit failed: {e}");
                    self.abort(&match_id, "internal", &e.to_string());
                    None
                }
            },
            Err(e) => {
                tracing::warn!(%match_id, "match aborted: {e}");
                self.abort(&match_id, "match_aborted", &e.to_string());
                None
            }
        }
    }

    fn end_live(inner: &mut Inner, match_id: &str) -> Option<Live> {
        let live = inner.live.remove(match_id)?;
        for conn in live.seats.iter().filter_map(|s| s.conn) {
            if let Some(c) = inner.conns.get_mut(&conn) {
                c.live = None;
            }
        }
        Some(live)
    }

    fn abort(&self, match_id: &str, code: &str, detail: &str) {
        let mut inner = lock(&self.inner);
        if let Some(live) = Self::end_live(&mut inner, match_id) {
            for seat in &live.seats {
                send(&seat.tx, ServerMsg::error(code, format!("{match_id}: {detail}")));
            }
        }
    }

    /// Rates a finished match and makes it durable: the record (with the
    /// rating changes) reaches the log before the leaderboard moves.
    pub fn commit(&self, mut record: MatchRecord) -> Result<MatchRecord, ArenaError> {
        let mut inner = lock(&self.inner);
        let mut next = (*inner.board).clone();
        let changes = next.apply_match(&MatchResult::from_record(&record), &self.rating)?;
        record.ratings = record
            .participants
            .iter()
            .map(|p| {
                changes
                    .iter()
                    .find(|c| &c.entity == p)
                    .map(|c| c.change.clone())
                    .expect("every seat's entity was rated")
            })
            .collect();
        self.store.append_record(&record)?;
        inner.board = Arc::new(next);
        inner.applied += 1;
        if let Err(e) = self.store.write_snapshot(&inner.board, inner.applied) {
            // the log already holds the record; recovery replays it
            tracing::error!("snapshot write failed: {e}");
        }
        let rewards: BTreeMap<String, f64> = record.rewards.0.iter().map(|(s, r)| (s.to_string(), *r)).collect();
        if let Some(live) = Self::end_live(&mut inner, &record.match_id) {
            for (seat, change) in live.seats.iter().zip(&record.ratings) {
                send(
                    &seat.tx,
                    ServerMsg::MatchEnd {
                        match_id: record.match_id.clone(),
                        rewards: rewards.clone(),
                        rating: RatingDelta {
                            mu_before: change.global_before.mu,
                            sigma_before: change.global_before.sigma,
                            mu_after: change.global_after.mu,
                            sigma_after: change.global_after.sigma,
                        },
                    },
                );
            }
        }
        Ok(record)
    }

    /// Stops matchmaking and cancels every live session; cancelled matches
    /// are not recorded.
    pub fn shutdown(&self) {
        let mut inner = lock(&self.inner);
        inner.closed = true;
        inner.queues = Queues::new();
        for live in inner.live.values() {
            for seat in &live.seats {
                seat.relay.send(RelayInput::Cancel);
            }
        }
    }
}
