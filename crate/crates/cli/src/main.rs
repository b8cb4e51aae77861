use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use arena_cli::{
    export_reports, run_offline_match, run_tournament, simulate_convergence, AgentSpec, CliError, ConvergenceConfig,
    TournamentPlan,
};
use arena_rating::RatingConfig;
use arena_server::{arena_rating_config, Arena, ServerConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "arena", version, about = "Text-game arena: local play, tournaments, rating studies and the online server")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one local match and print its record as JSON.
    Play {
        #[arg(long)]
        env: String,
        /// One agent per seat, e.g. `random:seed=1` or `nim-perfect`.
        #[arg(long, required = true, num_args = 1..)]
        agents: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the record here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Round-robin over every pair of agents in every environment.
    Tournament {
        #[arg(long, required = true, num_args = 1..)]
        env: Vec<String>,
        #[arg(long, required = true, num_args = 2..)]
        agents: Vec<String>,
        /// Games per pair per environment.
        #[arg(long, default_value_t = 10)]
        games: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Keep the first-listed agent of each pair in seat 0.
        #[arg(long)]
        fixed_seats: bool,
        /// Draw rate between equals used to set draw margins.
        #[arg(long, default_value_t = 0.1)]
        draw_probability: f64,
        #[arg(long, default_value = "tournament-out")]
        out: PathBuf,
    },
    /// Compare how fast TrueSkill and Elo recover a known skill order.
    SimulateRatings {
        #[arg(long, default_value_t = 8)]
        agents: usize,
        /// Width of the latent skill range in multiples of beta.
        #[arg(long, default_value_t = 2.0)]
        spread: f64,
        #[arg(long, default_value_t = 2000)]
        matches: usize,
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32.0)]
        elo_k: f64,
        #[arg(long, default_value_t = 0.9)]
        threshold: f64,
        /// CSV destination; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Leaderboard and skill-profile CSVs from a data directory or leaderboard.json.
    Export {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "export")]
        out: PathBuf,
        /// Copy only this environment's records.
        #[arg(long)]
        env: Option<String>,
    },
    /// Run the online arena until interrupted.
    Serve {
        /// TOML config; ARENA_* variables override it.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn agents(raw: &[String]) -> Result<Vec<AgentSpec>, CliError> {
    raw.iter().map(|s| s.parse()).collect()
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Play { env, agents: raw, seed, out } => {
            let record = run_offline_match(&env, &agents(&raw)?, seed)?;
            let text = serde_json::to_string_pretty(&record)?;
            match out {
                Some(path) => fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?,
                None => println!("{text}"),
            }
        }
        Command::Tournament {
            env,
            agents: raw,
            games,
            seed,
            jobs,
            fixed_seats,
            draw_probability,
            out,
        } => {
            if !(0.0..1.0).contains(&draw_probability) {
                return Err(CliError::Config("--draw-probability must be in [0, 1)".into()).into());
            }
            let plan = TournamentPlan {
                env_ids: env,
                roster: agents(&raw)?,
                games,
                seed,
                alternate_seats: !fixed_seats,
            };
            let outcome = run_tournament(&plan, jobs, &arena_rating_config(draw_probability))?;
            outcome.write(&out)?;
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{:<28} {:<16} {:>6} {:>7} {:>7} {:>8}", "agent", "env", "games", "win%", "draw%", "reward")?;
            for a in &outcome.table.agents {
                writeln!(
                    stdout,
                    "{:<28} {:<16} {:>6} {:>7.1} {:>7.1} {:>8.3}",
                    a.agent,
                    a.env_id,
                    a.games,
                    100.0 * a.win_rate,
                    100.0 * a.draws as f64 / a.games as f64,
                    a.mean_reward
                )?;
            }
            writeln!(stdout, "{} games written to {}", outcome.records.len(), out.display())?;
            if let Some(e) = outcome.failure {
                return Err(e.into());
            }
        }
        Command::SimulateRatings {
            agents,
            spread,
            matches,
            seeds,
            seed,
            elo_k,
            threshold,
            out,
        } => {
            let cfg = ConvergenceConfig {
                agents,
                spread_betas: spread,
                schedule_len: matches,
                seeds,
                base_seed: seed,
                elo_k,
                threshold,
                ..ConvergenceConfig::default()
            };
            let report = simulate_convergence(&cfg, &RatingConfig::default()).map_err(|e| CliError::Config(e.to_string()))?;
            match out {
                Some(path) => report.write_csv(fs::File::create(&path)?)?,
                None => report.write_csv(std::io::stdout().lock())?,
            }
            eprintln!("{}", report.summary());
        }
        Command::Export { data, out, env } => {
            let s = export_reports(&data, &out, env.as_deref())?;
            println!("{} participants, {} profiles exported to {}", s.participants, s.profiles, out.display());
            if let Some(n) = s.records {
                println!("{n} match records copied");
            }
        }
        Command::Serve { config } => {
            let cfg = ServerConfig::load(config.as_deref()).map_err(|e| CliError::Config(e.to_string()))?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async {
                let arena = Arena::open(cfg)?;
                let server = arena_server::start(arena).await?;
                println!("arena: protocol on {}, http on {}", server.tcp_addr, server.http_addr);
                tokio::signal::ctrl_c().await?;
                tracing::info!("shutting down");
                server.shutdown().await;
                anyhow::Ok(())
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<CliError>().map_or(2, CliError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
