//! Transports: newline-delimited JSON over TCP, plus an HTTP listener for
//! leaderboard queries and a WebSocket endpoint carrying the same messages.

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use arena_rating::{leaderboard_rows, write_leaderboard_csv, write_profiles_csv};
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use futures_util::{SinkExt, StreamExt};
use serde::Serialize;
use tokio::io::{AsyncBufReadExt, AsyncWriteExt, BufReader};
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::{mpsc, watch};
use tokio::task::JoinHandle;

use crate::arena::Arena;
use crate::store::leaderboard_json;

/// A running server. Dropping it without [`ServerHandle::shutdown`] leaves
/// the tasks running until the runtime stops.
pub struct ServerHandle {
    pub tcp_addr: SocketAddr,
    pub http_addr: SocketAddr,
    arena: Arc<Arena>,
    stop: watch::Sender<bool>,
    tasks: Vec<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn arena(&self) -> &Arc<Arena> {
        &self.arena
    }

    /// Stops accepting, cancels live matches and waits (up to five seconds)
    /// for their sessions to unwind.
    pub async fn shutdown(self) {
        let _ = self.stop.send(true);
        self.arena.shutdown();
        for t in self.tasks {
            t.abort();
        }
        let until = Instant::now() + Duration::from_secs(5);
        while self.arena.live_sessions() > 0 && Instant::now() < until {
            tokio::time::sleep(Duration::from_millis(20)).await;
        }
    }
}

/// Binds both listeners from the arena's config and starts the sweeper.
pub async fn start(arena: Arc<Arena>) -> std::io::Result<ServerHandle> {
    let tcp = TcpListener::bind(arena.config().listen).await?;
    let http = TcpListener::bind(arena.config().http_listen).await?;
    let (stop, stopped) = watch::channel(false);
    let handle = ServerHandle {
        tcp_addr: tcp.local_addr()?,
        http_addr: http.local_addr()?,
        arena: arena.clone(),
        stop,
        tasks: vec![
            tokio::spawn(accept_loop(tcp, arena.clone())),
            tokio::spawn(sweeper(arena.clone())),
            tokio::spawn(serve_http(http, arena, stopped)),
        ],
    };
    tracing::info!(tcp = %handle.tcp_addr, http = %handle.http_addr, "arena listening");
    Ok(handle)
}

async fn sweeper(arena: Arc<Arena>) {
    let mut tick = tokio::time::interval(arena.config().sweep_interval());
    tick.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
    loop {
        tick.tick().await;
        for plan in arena.sweep() {
            tracing::info!(match_id = %plan.match_id, env = %plan.env_id, players = ?plan.participants, "match formed");
            let arena = arena.clone();
            tokio::task::spawn_blocking(move || arena.run_session(plan));
        }
    }
}

async fn accept_loop(listener: TcpListener, arena: Arc<Arena>) {
    loop {
        match listener.accept().await {
            Ok((stream, peer)) => {
                tracing::debug!(%peer, "tcp connection");
                tokio::spawn(serve_tcp(stream, arena.clone()));
            }
            Err(e) => {
                tracing::warn!("accept failed: {e}");
                tokio::time::sleep(Duration::from_millis(100)).await;
            }
        }
    }
}

async fn serve_tcp(stream: TcpStream, arena: Arc<Arena>) {
    let (rd, mut wr) = stream.into_split();
    let (tx, mut rx) = mpsc::unbounded_channel();
    let conn = arena.connect(tx);
    let writer = tokio::spawn(async move {
        while let Some(msg) = rx.recv().await {
            let mut line = msg.to_line();
            line.push('\n');
            if wr.write_all(line.as_bytes()).await.is_err() {
                break;
            }
        }
    });
    let mut lines = BufReader::new(rd).lines();
    while let Ok(Some(line)) = lines.next_line().await {
        if !line.trim().is_empty() {
            arena.handle_line(conn, &line);
        }
    }
    arena.disconnect(conn);
    writer.abort();
}

async fn serve_http(listener: TcpListener, arena: Arc<Arena>, mut stopped: watch::Receiver<bool>) {
    let app = router(arena);
    let shutdown = async move {
        let _ = stopped.wait_for(|s| *s).await;
    };
    if let Err(e) = axum::serve(listener, app).with_graceful_shutdown(shutdown).await {
        tracing::error!("http server failed: {e}");
    }
}

pub fn router(arena: Arc<Arena>) -> Router {
    Router::new()
        .route("/leaderboard.json", get(leaderboard_file))
        .route("/leaderboard.csv", get(leaderboard_csv))
        .route("/skill_profiles.csv", get(profiles_csv))
        .route("/api/leaderboard", get(standings))
        .route("/api/skill-profiles", get(profiles))
        .route("/api/envs", get(envs))
        .route("/ws", get(ws_upgrade))
        .with_state(arena)
}

fn typed(content_type: &'static str, body: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, content_type)], body).into_response()
}

async fn leaderboard_file(State(arena): State<Arc<Arena>>) -> Response {
    typed("application/json", leaderboard_json(&arena.leaderboard()).into_bytes())
}

async fn leaderboard_csv(State(arena): State<Arc<Arena>>) -> Response {
    let mut buf = Vec::new();
    match write_leaderboard_csv(&arena.leaderboard(), &mut buf) {
        Ok(()) => typed("text/csv", buf),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

async fn profiles_csv(State(arena): State<Arc<Arena>>) -> Response {
    let mut buf = Vec::new();
    match write_profiles_csv(&arena.skill_profiles(), &mut buf) {
        Ok(()) => typed("text/csv", buf),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

async fn standings(State(arena): State<Arc<Arena>>) -> Response {
    Json(leaderboard_rows(&arena.leaderboard())).into_response()
}

async fn profiles(State(arena): State<Arc<Arena>>) -> Response {
    Json(arena.skill_profiles()).into_response()
}

#[derive(Serialize)]
struct EnvInfo {
    env_id: &'static str,
    min_players: usize,
    max_players: usize,
    description: &'static str,
}

async fn envs() -> Response {
    let reg = arena_core::registry();
    let list: Vec<EnvInfo> = reg
        .env_ids()
        .filter_map(|id| reg.rules(id))
        .map(|r| EnvInfo {
            env_id: r.env_id,
            min_players: r.min_players,
            max_players: r.max_players,
            description: r.description,
        })
        .collect();
    Json(list).into_response()
}

async fn ws_upgrade(State(arena): State<Arc<Arena>>, ws: WebSocketUpgrade) -> Response {
    ws.on_upgrade(move |socket| serve_ws(socket, arena))
}

async fn serve_ws(socket: WebSocket, arena: Arc<Arena>) {
    let (mut sink, mut stream) = socket.split();
    let (tx, mut rx) = mpsc::unbounded_channel();
    let conn = arena.connect(tx);
    let writer = tokio::spawn(async move {
        while let Some(msg) = rx.recv().await {
            if sink.send(Message::Text(msg.to_line().into())).await.is_err() {
                break;
            }
        }
    });
    while let Some(Ok(frame)) = stream.next().await {
        match frame {
            Message::Text(text) => arena.handle_line(conn, text.as_str()),
            Message::Close(_) => break,
            _ => {}
        }
    }
    arena.disconnect(conn);
    writer.abort();
}
