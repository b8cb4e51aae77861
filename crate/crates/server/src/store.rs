//! On-disk state under the data directory:
//!
//! - `matches.jsonl`: append-only, one MatchRecord per line, fsynced before
//!   any rating moves.
//! - `leaderboard.json`: the `name -> {global, per_env}` snapshot.
//! - `leaderboard.meta.json`: how many records the snapshot includes and a
//!   checksum of the snapshot bytes, so a torn pair is detected.
//! - `registrations.json`: every registered model.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use arena_core::MatchRecord;
use arena_rating::Leaderboard;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::registration::Registry;

pub const MATCHES_FILE: &str = "matches.jsonl";
pub const LEADERBOARD_FILE: &str = "leaderboard.json";
pub const META_FILE: &str = "leaderboard.meta.json";
pub const REGISTRATIONS_FILE: &str = "registrations.json";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path} line {line}: {source}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub version: u32,
    pub applied_records: u64,
    /// FNV-1a of the `leaderboard.json` bytes this meta describes.
    pub checksum: u64,
}

/// Leaderboard as served and stored, so both are byte-identical.
pub fn leaderboard_json(board: &Leaderboard) -> String {
    serde_json::to_string_pretty(board).expect("leaderboards serialize")
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

#[derive(Debug, Clone)]
pub struct Store {
    dir: PathBuf,
}

impl Store {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| StoreError::Io { path: dir.clone(), source })?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }

    fn io(&self, file: &str) -> impl Fn(std::io::Error) -> StoreError {
        let path = self.path(file);
        move |source| StoreError::Io { path: path.clone(), source }
    }

    /// Appends one line and waits for it to reach the disk.
    pub fn append_record(&self, record: &MatchRecord) -> Result<(), StoreError> {
        let err = self.io(MATCHES_FILE);
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.path(MATCHES_FILE))
            .map_err(&err)?;
        let mut line = record.to_json_line();
        line.push('\n');
        f.write_all(line.as_bytes()).map_err(&err)?;
        f.sync_data().map_err(&err)
    }

    /// Every complete record. A final line without its newline is a write
    /// cut short by a crash and is ignored; any other bad line is an error.
    pub fn read_records(&self) -> Result<Vec<MatchRecord>, StoreError> {
        let path = self.path(MATCHES_FILE);
        let f = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(source) => return Err(StoreError::Io { path, source }),
        };
        let mut out = Vec::new();
        let mut reader = BufReader::new(f);
        let mut buf = String::new();
        let mut line = 0;
        loop {
            buf.clear();
            let n = reader
                .read_line(&mut buf)
                .map_err(|source| StoreError::Io { path: path.clone(), source })?;
            if n == 0 {
                break;
            }
            line += 1;
            let complete = buf.ends_with('\n');
            if buf.trim().is_empty() {
                continue;
            }
            match serde_json::from_str(buf.trim_end()) {
                Ok(r) => out.push(r),
                Err(_) if !complete => break,
                Err(source) => return Err(StoreError::Corrupt { path, line, source }),
            }
        }
        Ok(out)
    }

    fn write_atomic(&self, file: &str, bytes: &[u8]) -> Result<(), StoreError> {
        let err = self.io(file);
        let tmp = self.path(&format!(".{file}.tmp"));
        {
            let mut f = File::create(&tmp).map_err(&err)?;
            f.write_all(bytes).map_err(&err)?;
            f.sync_data().map_err(&err)?;
        }
        fs::rename(&tmp, self.path(file)).map_err(&err)
    }

    pub fn write_snapshot(&self, board: &Leaderboard, applied_records: u64) -> Result<(), StoreError> {
        let text = leaderboard_json(board);
        self.write_atomic(LEADERBOARD_FILE, text.as_bytes())?;
        let meta = SnapshotMeta {
            version: 1,
            applied_records,
            checksum: fnv1a(text.as_bytes()),
        };
        let meta = serde_json::to_vec_pretty(&meta).expect("meta serializes");
        self.write_atomic(META_FILE, &meta)
    }

    /// The snapshot and how many records it covers, if the pair on disk is
    /// present and consistent.
    pub fn read_snapshot(&self) -> Result<Option<(Leaderboard, u64)>, StoreError> {
        let (Ok(text), Ok(meta)) = (
            fs::read_to_string(self.path(LEADERBOARD_FILE)),
            fs::read_to_string(self.path(META_FILE)),
        ) else {
            return Ok(None);
        };
        let Ok(meta) = serde_json::from_str::<SnapshotMeta>(&meta) else {
            return Ok(None);
        };
        if meta.checksum != fnv1a(text.as_bytes()) {
            return Ok(None);
        }
        let board = serde_json::from_str(&text).map_err(|source| StoreError::Json {
            path: self.path(LEADERBOARD_FILE),
            source,
        })?;
        Ok(Some((board, meta.applied_records)))
    }

    pub fn write_registrations(&self, reg: &Registry) -> Result<(), StoreError> {
        let text = serde_json::to_vec_pretty(reg).expect("registrations serialize");
        self.write_atomic(REGISTRATIONS_FILE, &text)
    }

    pub fn read_registrations(&self) -> Result<Registry, StoreError> {
        let path = self.path(REGISTRATIONS_FILE);
        match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text).map_err(|source| StoreError::Json { path, source }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Registry::new()),
            Err(source) => Err(StoreError::Io { path, source }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use arena_core::Rewards;
    use std::collections::BTreeMap;

    fn record(id: &str, rewards: &[(usize, f64)], names: &[&str]) -> MatchRecord {
        MatchRecord {
            match_id: id.into(),
            env_id: "TicTacToe-v0".into(),
            seed: 1,
            num_players: names.len(),
            participants: names.iter().map(|s| s.to_string()).collect(),
            turns: vec![],
            rewards: Rewards(rewards.iter().copied().collect::<BTreeMap<_, _>>()),
            ratings: vec![],
        }
    }

    #[test]
    fn torn_tail_is_ignored_but_corruption_is_not() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        assert!(store.read_records().unwrap().is_empty());
        let rec = record("m1", &[(0, 1.0), (1, -1.0)], &["x", "y"]);
        store.append_record(&rec).unwrap();
        let mut f = OpenOptions::new().append(true).open(store.path(MATCHES_FILE)).unwrap();
        f.write_all(b"{\"match_id\":\"m2\",\"env").unwrap();
        assert_eq!(store.read_records().unwrap(), vec![rec]);
        f.write_all(b"\n").unwrap();
        assert!(matches!(store.read_records(), Err(StoreError::Corrupt { line: 2, .. })));
    }

    #[test]
    fn snapshot_checksum_catches_a_torn_pair() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        assert!(store.read_snapshot().unwrap().is_none());
        let mut lb = Leaderboard::new();
        lb.register("m", &Default::default());
        store.write_snapshot(&lb, 3).unwrap();
        assert_eq!(store.read_snapshot().unwrap(), Some((lb.clone(), 3)));
        lb.register("n", &Default::default());
        fs::write(store.path(LEADERBOARD_FILE), leaderboard_json(&lb)).unwrap();
        assert!(store.read_snapshot().unwrap().is_none());
    }
}
