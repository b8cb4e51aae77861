use std::collections::{BTreeMap, BTreeSet};

use arena_server::Queues;
use proptest::prelude::*;

const ENVS: [&str; 4] = ["A-v0", "B-v0", "C-v0", "D-v0"];

fn size(env: &str) -> usize {
    match env {
        "C-v0" => 3,
        "D-v0" => 1,
        _ => 2,
    }
}

prop_compose! {
    fn ticket()(entity in 0usize..6, mask in 1u8..16, human in any::<bool>()) -> (String, Vec<String>, bool) {
        let envs = ENVS.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, e)| e.to_string()).collect();
        let entity = if human { "Humanity".to_owned() } else { format!("m{entity}") };
        (entity, envs, human)
    }
}

fn build(tickets: &[(String, Vec<String>, bool)]) -> Queues {
    let mut q = Queues::new();
    for (owner, (entity, envs, human)) in tickets.iter().enumerate() {
        let _ = q.enqueue(owner as u64, entity, !human, envs, |_| true);
    }
    q
}

proptest! {
    #[test]
    fn sweep_invariants(
        tickets in prop::collection::vec(ticket(), 0..14),
        scores in prop::collection::vec(-10.0f64..40.0, 7),
        patience in 0u64..3,
        rounds in 1usize..4,
    ) {
        let score = |e: &str| if e == "Humanity" { scores[6] } else { scores[e[1..].parse::<usize>().unwrap()] };
        let mut q = build(&tickets);
        let mut seen = BTreeSet::new();
        for _ in 0..rounds {
            let before: BTreeMap<u64, Vec<String>> = q.tickets().iter().map(|t| (t.id, t.env_ids.clone())).collect();
            let groups = q.sweep(score, size, patience);
            for g in &groups {
                prop_assert_eq!(g.tickets.len(), size(&g.env_id));
                let entities: BTreeSet<&str> = g.tickets.iter().map(|t| t.entity.as_str()).collect();
                prop_assert_eq!(entities.len(), g.tickets.len(), "self-match in {:?}", g);
                for t in &g.tickets {
                    prop_assert!(before[&t.id].contains(&g.env_id), "ticket not eligible for {}", g.env_id);
                    prop_assert!(seen.insert(t.id), "ticket matched twice");
                    prop_assert!(!q.tickets().iter().any(|r| r.id == t.id), "matched ticket still queued");
                }
            }
            // liveness: whatever is left could not have formed another group
            for env in ENVS {
                let waiting: BTreeSet<&str> = q
                    .tickets()
                    .iter()
                    .filter(|t| t.env_ids.iter().any(|e| e == env))
                    .map(|t| t.entity.as_str())
                    .collect();
                prop_assert!(waiting.len() < size(env), "{env}: {waiting:?} left waiting");
            }
        }
    }
}
