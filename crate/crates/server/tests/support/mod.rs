//! A server on ephemeral ports plus helpers, shared with the acceptance
//! suite.

#![allow(dead_code)]

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::path::Path;
use std::thread;
use std::time::{Duration, Instant};

use arena_agents::RandomAgent;
use arena_rating::{Leaderboard, MU0, SIGMA0};
use arena_server::{start, Arena, ArenaClient, MatchSummary, ServerConfig, ServerHandle, Store};
use tokio::runtime::Runtime;

pub struct Harness {
    pub rt: Runtime,
    pub server: Option<ServerHandle>,
    pub dir: tempfile::TempDir,
}

pub fn quick_config(data_dir: &Path) -> ServerConfig {
    ServerConfig {
        listen: "127.0.0.1:0".parse().unwrap(),
        http_listen: "127.0.0.1:0".parse().unwrap(),
        data_dir: data_dir.to_owned(),
        sweep_interval_ms: 25,
        model_clock_secs: 10.0,
        human_clock_secs: 10.0,
        disconnect_grace_secs: 2.0,
        ..ServerConfig::default()
    }
}

impl Harness {
    pub fn new(tweak: impl FnOnce(&mut ServerConfig)) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let mut h = Self {
            rt: tokio::runtime::Builder::new_multi_thread()
                .worker_threads(2)
                .enable_all()
                .build()
                .unwrap(),
            server: None,
            dir,
        };
        h.boot(tweak);
        h
    }

    pub fn boot(&mut self, tweak: impl FnOnce(&mut ServerConfig)) {
        let mut cfg = quick_config(self.dir.path());
        tweak(&mut cfg);
        let arena = Arena::open(cfg).unwrap();
        self.server = Some(self.rt.block_on(start(arena)).unwrap());
    }

    pub fn stop(&mut self) {
        if let Some(s) = self.server.take() {
            self.rt.block_on(s.shutdown());
        }
    }

    pub fn arena(&self) -> &Arena {
        self.server.as_ref().unwrap().arena()
    }

    pub fn tcp(&self) -> SocketAddr {
        self.server.as_ref().unwrap().tcp_addr
    }

    pub fn client(&self) -> ArenaClient {
        let c = ArenaClient::connect(self.tcp()).unwrap();
        c.set_read_timeout(Some(Duration::from_secs(30))).unwrap();
        c
    }

    pub fn store(&self) -> Store {
        Store::open(self.dir.path()).unwrap()
    }

    /// Status code and body of a plain GET against the HTTP listener.
    pub fn get(&self, path: &str) -> (u16, String) {
        http_get(self.server.as_ref().unwrap().http_addr, path)
    }
}

impl Drop for Harness {
    fn drop(&mut self) {
        self.stop();
    }
}

pub fn http_get(addr: SocketAddr, path: &str) -> (u16, String) {
    let mut s = TcpStream::connect(addr).unwrap();
    s.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
    write!(s, "GET {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").unwrap();
    let mut raw = Vec::new();
    s.read_to_end(&mut raw).unwrap();
    let text = String::from_utf8(raw).unwrap();
    let (head, body) = text.split_once("\r\n\r\n").unwrap();
    let status = head.split_whitespace().nth(1).unwrap().parse().unwrap();
    let chunked = head.to_ascii_lowercase().contains("transfer-encoding: chunked");
    (status, if chunked { dechunk(body) } else { body.to_owned() })
}

fn dechunk(mut body: &str) -> String {
    let mut out = String::new();
    loop {
        let (size, rest) = body.split_once("\r\n").unwrap();
        let n = usize::from_str_radix(size.trim(), 16).unwrap();
        if n == 0 {
            return out;
        }
        out.push_str(&rest[..n]);
        body = &rest[n + 2..];
    }
}

/// Registers, queues for `env`, and plays one match with a seeded random agent.
pub fn spawn_random(addr: SocketAddr, name: &'static str, env: &'static str, seed: u64) -> thread::JoinHandle<Result<MatchSummary, String>> {
    thread::spawn(move || {
        let mut c = ArenaClient::connect(addr).map_err(|e| e.to_string())?;
        c.set_read_timeout(Some(Duration::from_secs(30))).map_err(|e| e.to_string())?;
        c.hello(name, "uniform over legal moves", "bots@example.org").map_err(|e| e.to_string())?;
        c.enqueue(&[env]).map_err(|e| e.to_string())?;
        c.play(&mut RandomAgent::new(name, seed)).map_err(|e| e.to_string())
    })
}

macro_rules! check {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Two scripted random agents play TicTacToe over the wire protocol. The
/// stored record must replay to the rewards both seats were told, ratings
/// must be on disk and survive a restart.
pub fn online_tictactoe() -> Result<String, String> {
    let started = Instant::now();
    let mut h = Harness::new(|_| {});
    let a = spawn_random(h.tcp(), "rand-a", "TicTacToe-v0", 11);
    let b = spawn_random(h.tcp(), "rand-b", "TicTacToe-v0", 12);
    let sa = a.join().map_err(|_| "client a panicked")??;
    let sb = b.join().map_err(|_| "client b panicked")??;
    check!(sa.match_id == sb.match_id, "different matches {} / {}", sa.match_id, sb.match_id);
    check!(sa.rewards == sb.rewards, "seats disagree on rewards");
    let total: f64 = sa.rewards.values().sum();
    check!(total == 0.0 && sa.rewards.len() == 2, "rewards not zero-sum: {:?}", sa.rewards);
    for s in [&sa, &sb] {
        check!(s.rating.mu_before == MU0 && s.rating.sigma_before == SIGMA0, "first match must start from the prior");
        check!(
            (s.rating.mu_after, s.rating.sigma_after) != (s.rating.mu_before, s.rating.sigma_before),
            "rating unchanged for seat {}",
            s.player_id
        );
    }

    let records = h.store().read_records().map_err(|e| e.to_string())?;
    check!(records.len() == 1, "{} records stored", records.len());
    let rec = &records[0];
    let replayed = rec.replay().map_err(|e| format!("replay failed: {e}"))?;
    check!(replayed == rec.rewards, "replay gives {replayed:?}, stored {:?}", rec.rewards);
    let told: Vec<(String, f64)> = rec.rewards.0.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    check!(told == sa.rewards.clone().into_iter().collect::<Vec<_>>(), "clients were told other rewards");
    check!(rec.ratings.len() == 2, "record lacks per-seat ratings");
    check!(rec.turns.len() <= 9 && rec.turns.len() >= 5, "{} turns in TicTacToe", rec.turns.len());

    let on_disk: Leaderboard =
        serde_json::from_str(&std::fs::read_to_string(h.dir.path().join("leaderboard.json")).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    check!(on_disk == *h.arena().leaderboard(), "leaderboard.json differs from memory");
    for (seat, name) in rec.participants.iter().enumerate() {
        let e = on_disk.get(name).ok_or(format!("{name} missing from leaderboard.json"))?;
        let r = &rec.ratings[seat];
        check!(e.global.mu == r.global_after.mu && e.global.sigma == r.global_after.sigma, "{name}: stored rating differs");
        check!(e.per_env["TicTacToe-v0"].matches == 1, "{name}: per-env count");
    }

    h.stop();
    h.boot(|_| {});
    check!(*h.arena().leaderboard() == on_disk, "ratings lost across restart");
    Ok(format!(
        "{} in {} turns, rewards {:?}, mu {:.3}/{:.3}, {:.1}s",
        rec.match_id,
        rec.turns.len(),
        sa.rewards,
        on_disk.get("rand-a").unwrap().global.mu,
        on_disk.get("rand-b").unwrap().global.mu,
        started.elapsed().as_secs_f64()
    ))
}
