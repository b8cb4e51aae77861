//! One local match, no server involved.

use arena_agents::{play_match, Agent, MatchOptions};
use arena_core::{mix_seed, MatchRecord};

use crate::{check_env, AgentSpec, CliError};

/// Display names for a roster; repeated names get ` #2`, ` #3`, ... so every
/// seat is a distinct rated entity.
pub fn roster_names(roster: &[AgentSpec]) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(roster.len());
    for spec in roster {
        let base = spec.name();
        let mut name = base.clone();
        let mut k = 1;
        while out.contains(&name) {
            k += 1;
            name = format!("{base} #{k}");
        }
        out.push(name);
    }
    out
}

/// Seat `i` is played by `agents[i]`. Records are byte-identical for the
/// same arguments.
pub fn run_offline_match(env_id: &str, agents: &[AgentSpec], seed: u64) -> Result<MatchRecord, CliError> {
    check_env(env_id, agents.len())?;
    let names = roster_names(agents);
    let mut seats: Vec<Box<dyn Agent>> = agents
        .iter()
        .enumerate()
        .map(|(seat, spec)| spec.build(mix_seed(&[seed, seat as u64])))
        .collect::<Result<_, _>>()?;
    let opts = MatchOptions {
        match_id: format!("local-{seed}"),
        participants: Some(names),
        ..MatchOptions::default()
    };
    Ok(play_match(env_id, seed, &mut seats, &opts)?)
}
