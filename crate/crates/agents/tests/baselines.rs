use std::collections::BTreeMap;

use arena_agents::{play_match, Agent, MatchOptions, NimPerfectAgent, RandomAgent, Turn};
use arena_core::games::{nim::Nim, simple_negotiation};
use arena_core::{registry, ActionGrammar, Env, Game, LegalActions, SeedStreams, TerminalKind};

#[test]
fn empty_board_choices_are_uniform() {
    let env = {
        let mut e = Env::make(&["TicTacToe-v0"], 3).unwrap();
        e.reset(2).unwrap();
        e
    };
    let legal = env.legal_actions().unwrap();
    assert_eq!(legal.candidates().len(), 9);
    let turn = Turn {
        legal: Some(&legal),
        ..Turn::text_only("TicTacToe-v0", 0, "")
    };
    let mut agent = RandomAgent::new("r", 2024);
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    for _ in 0..90_000 {
        *counts.entry(agent.act(&turn).unwrap()).or_default() += 1;
    }
    assert_eq!(counts.len(), 9);
    // 10,000 expected per cell, sd ≈ 94; allow about 4.5 sd
    for (cell, n) in &counts {
        assert!((9_580..=10_420).contains(n), "{cell}: {n}");
    }
}

#[test]
fn single_legal_nim_move_is_always_chosen() {
    let game = Nim::from_piles(vec![0, 0, 1]);
    let legal = game.legal_actions().unwrap();
    let turn = Turn {
        legal: Some(&legal),
        ..Turn::text_only("Nim-v0", 0, "")
    };
    for seed in 0..50 {
        assert_eq!(RandomAgent::new("r", seed).act(&turn).unwrap(), "[2 1]");
    }
    assert_eq!(NimPerfectAgent::new("p").act(&turn).unwrap(), "[2 1]");
}

#[test]
fn negotiation_outputs_pass_the_validator() {
    let mut checked = 0;
    for seed in 0..200u64 {
        let (mut game, _) = simple_negotiation::SimpleNegotiation::new(2, &SeedStreams::new(seed));
        let mut agent = RandomAgent::new("r", seed);
        while game.terminal().is_none() {
            let legal = game.legal_actions().unwrap();
            let seat = game.to_move();
            let turn = Turn {
                legal: Some(&legal),
                ..Turn::text_only(simple_negotiation::ENV_ID, seat, "")
            };
            let raw = agent.act(&turn).unwrap();
            let token = arena_core::parse_bracketed_action(&raw).unwrap();
            assert!(token == "Deny" || token == "Accept" || token.starts_with("Offer"), "{token}");
            game.validate(seat, &token).unwrap();
            game.apply(seat, &token).unwrap();
            checked += 1;
        }
    }
    assert!(checked > 200);
}

/// Random agents play every bundled environment 10,000 times; none of those
/// games may end because a random agent made an illegal move.
#[test]
fn random_agents_never_move_illegally() {
    let ids: Vec<String> = registry().env_ids().map(str::to_owned).collect();
    assert_eq!(ids.len(), 17);
    let totals: Vec<(String, usize)> = std::thread::scope(|s| {
        let handles: Vec<_> = ids
            .iter()
            .map(|id| {
                s.spawn(move || {
                    let rules = registry().rules(id).unwrap();
                    let mut finished = 0;
                    for g in 0..10_000u64 {
                        let players = rules.min_players + (g as usize % (rules.max_players - rules.min_players + 1));
                        let mut agents: Vec<Box<RandomAgent>> =
                            (0..players).map(|p| Box::new(RandomAgent::new(format!("r{p}"), g * 31 + p as u64))).collect();
                        let mut env = Env::make(&[id.as_str()], g).unwrap();
                        env.reset(players).unwrap();
                        while !env.is_done() {
                            // the agent reads the legal set, so the text is not rendered
                            let seat = env.game().unwrap().to_move();
                            let legal = env.legal_actions().unwrap();
                            let grammar = env.game().unwrap().grammar();
                            let turn = Turn {
                                env_id: id,
                                seat,
                                observation: "",
                                legal: Some(&legal),
                                grammar,
                            };
                            let raw = agents[seat].act(&turn).unwrap();
                            env.step(&raw).unwrap();
                        }
                        let info = env.terminal_info().unwrap();
                        assert_ne!(info.kind, TerminalKind::InvalidMove, "{id} game {g}: {}", info.detail);
                        finished += 1;
                    }
                    (id.clone(), finished)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert!(totals.iter().all(|(_, n)| *n == 10_000));
}

fn nim_record(seed: u64) -> arena_core::MatchRecord {
    let mut agents: Vec<Box<dyn Agent>> = vec![Box::new(NimPerfectAgent::new("perfect")), Box::new(RandomAgent::new("random", seed))];
    play_match("Nim-v0", seed, &mut agents, &MatchOptions::default()).unwrap()
}

#[test]
fn perfect_nim_player_moving_first_always_wins() {
    for seed in 0..100 {
        let record = nim_record(seed);
        assert_eq!(record.rewards.get(0), Some(1.0), "seed {seed}");
        assert_eq!(record.replay().unwrap(), record.rewards);
    }
}

#[test]
fn tictactoe_between_random_agents_is_short_and_reproducible() {
    let run = || {
        let mut agents: Vec<Box<dyn Agent>> = vec![Box::new(RandomAgent::new("a", 1)), Box::new(RandomAgent::new("b", 2))];
        play_match("TicTacToe-v0", 1, &mut agents, &MatchOptions::default()).unwrap()
    };
    let first = run();
    assert!(first.turns.len() <= 9);
    assert_eq!(first.rewards.sum(), 0.0);
    assert_eq!(first.to_json_line(), run().to_json_line());
    assert_eq!(first.replay().unwrap(), first.rewards);
    assert!(first.turns.iter().all(|t| t.wall_ms == 0 && t.parsed_token.is_some()));
}

#[test]
fn free_text_game_plays_through_the_driver() {
    let mut agents: Vec<Box<dyn Agent>> = vec![Box::new(RandomAgent::new("a", 5)), Box::new(RandomAgent::new("b", 6))];
    let record = play_match("DontSayIt-v0", 9, &mut agents, &MatchOptions::default()).unwrap();
    assert!(record.turns.iter().all(|t| !t.raw_action.as_deref().unwrap().starts_with('[')));
    assert_eq!(record.replay().unwrap(), record.rewards);
    let legal = LegalActions::Finite(vec!["x".into()]);
    let turn = Turn {
        legal: Some(&legal),
        grammar: ActionGrammar::FreeText,
        ..Turn::text_only("DontSayIt-v0", 0, "")
    };
    assert_eq!(RandomAgent::new("r", 0).act(&turn).unwrap(), "x");
}
