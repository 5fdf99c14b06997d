//! Inspect the weighted exchange graph and the path choices behind the
//! solver's second phase.

use manna::exchange::{augment, build_weighted_graph, check_clean_state, CleanState, PathTarget};
use manna::instgen::fixtures;
use manna::solver::phase1;
use manna::{AgentId, ItemId};

fn items(path: &[ItemId]) -> String {
    path.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(" ")
}

fn main() {
    // One agent, two items: the first is worth c, then the second costs 1.
    // Both singleton paths exist; the one already in the agent's zero part
    // is cheaper, and picking the other would break cleanness.
    let inst = fixtures::ex_classic();
    let start = phase1(&inst).unwrap();
    let state = CleanState::new(start.xc, start.x0);
    let graph = build_weighted_graph(&inst, &state).unwrap();
    let path = graph.min_weight_path(AgentId::new(1), PathTarget::Unallocated).unwrap();
    println!("ex_classic: path ({}) with doubled weight {}", items(&path.items), path.doubled_weight);
    let next = augment(&state, &path);
    println!("  after augmenting: c-part {}, clean: {:?}", next.xc.bundle(AgentId::new(1)), check_clean_state(&inst, &next));

    // Walk the full second phase on ex_ef1, printing the graph each round.
    let inst = fixtures::ex_ef1(2);
    let start = phase1(&inst).unwrap();
    let mut state = CleanState::new(start.xc, start.x0);
    loop {
        let graph = build_weighted_graph(&inst, &state).unwrap();
        let step = inst.agents().find_map(|a| graph.min_weight_path(a, PathTarget::Unallocated));
        let Some(path) = step else { break };
        print!("edges:\n{}", graph.dump());
        println!("agent {} takes path ({}) (w = {})", path.source_agent, items(&path.items), path.doubled_weight);
        state = augment(&state, &path);
    }
    for a in inst.agents() {
        println!("agent {a}: c-part {} zero part {}", state.xc.bundle(a), state.x0.bundle(a));
    }
}
