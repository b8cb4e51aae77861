//! CSV reports from a server data directory or a bare leaderboard.json.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use arena_core::SkillTable;
use arena_rating::{skill_profiles, write_leaderboard_csv, write_profiles_csv, Leaderboard};
use arena_server::store::{LEADERBOARD_FILE, MATCHES_FILE};
use arena_server::Store;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct ExportSummary {
    pub participants: usize,
    pub profiles: usize,
    /// Records copied to `matches.jsonl`, when the source had a match log.
    pub records: Option<usize>,
    pub files: Vec<PathBuf>,
}

/// `source` is a data directory (leaderboard.json, optionally matches.jsonl)
/// or a leaderboard.json file. Writes leaderboard.csv and skill_profiles.csv
/// into `out`, plus matches.jsonl (optionally limited to `env_filter`) when
/// the source has a match log.
pub fn export_reports(source: &Path, out: &Path, env_filter: Option<&str>) -> Result<ExportSummary, CliError> {
    let (board_path, data_dir) = if source.is_dir() {
        (source.join(LEADERBOARD_FILE), Some(source))
    } else {
        (source.to_owned(), None)
    };
    let text = fs::read_to_string(&board_path)
        .map_err(|e| CliError::Config(format!("reading {}: {e}", board_path.display())))?;
    let board: Leaderboard = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{} is not a leaderboard: {e}", board_path.display())))?;

    fs::create_dir_all(out)?;
    let mut files = vec![out.join("leaderboard.csv"), out.join("skill_profiles.csv")];
    write_leaderboard_csv(&board, File::create(&files[0])?)?;
    let profiles = skill_profiles(&board, &SkillTable::bundled());
    write_profiles_csv(&profiles, File::create(&files[1])?)?;

    let mut records = None;
    if let Some(dir) = data_dir.filter(|d| d.join(MATCHES_FILE).exists()) {
        let all = Store::open(dir)?.read_records()?;
        let path = out.join(MATCHES_FILE);
        let mut w = BufWriter::new(File::create(&path)?);
        let mut n = 0;
        for r in all.iter().filter(|r| env_filter.is_none_or(|e| r.env_id == e)) {
            writeln!(w, "{}", r.to_json_line())?;
            n += 1;
        }
        w.flush()?;
        records = Some(n);
        files.push(path);
    }
    Ok(ExportSummary {
        participants: board.len(),
        profiles: profiles.len(),
        records,
        files,
    })
}
