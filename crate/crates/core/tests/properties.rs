use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;
use pwpath::gen::GenSpec;
use pwpath::grammar::{l_values, pda_to_cfg, shortest_word, Length};
use pwpath::network::{capabilities, Network};
use pwpath::pathfinder::{run_pipeline, solve, Objective, Solution};
use pwpath::pda::{
    accepts, build_pda, compress_g, enumerate_accepted, expand_f, passive_distances, transform_pda,
    PdaState, TransitionKind,
};
use pwpath::trace::{is_feasible_path, is_valid_sequence, transition_sequence, Route};

fn network() -> impl Strategy<Value = Network> {
    (2usize..7, 1usize..4, 0.2f64..0.8, 0.1f64..0.6, any::<u64>()).prop_map(
        |(node_count, protocol_count, edge_probability, function_density, seed)| {
            GenSpec { node_count, protocol_count, edge_probability, function_density, seed }
                .generate()
                .unwrap()
        },
    )
}

fn bfs_distance(pda: &pwpath::pda::Pda, from: PdaState, to: PdaState) -> Option<u32> {
    let mut dist = std::collections::HashMap::from([(from, 0u32)]);
    let mut queue = VecDeque::from([from]);
    while let Some(s) = queue.pop_front() {
        if s == to {
            return dist.get(&s).copied();
        }
        for t in pda.transitions().iter().filter(|t| t.from == s && t.kind() == TransitionKind::Passive) {
            if !dist.contains_key(&t.to) {
                dist.insert(t.to, dist[&s] + 1);
                queue.push_back(t.to);
            }
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn automaton_bounds(net in network()) {
        let pda = build_pda(&net);
        let v = net.node_count();
        let a = net.protocol_count();
        prop_assert!(pda.states().len() <= 2 + (v - 1) * a);
        // per link: |A|^2 passive, |A|^3 push and |A|^2 pop at most
        prop_assert!(pda.transitions().len() <= net.link_count() * (2 * a * a + a * a * a) + a);
        let tpda = transform_pda(&pda);
        prop_assert!(pda.transitions().is_subset(tpda.transitions()));
        prop_assert!(pda.input_alphabet().is_subset(tpda.input_alphabet()));
        prop_assert_eq!(pda.states(), tpda.states());
        for s in tpda.input_alphabet() {
            prop_assert!(s.index >= 1 && s.index as usize <= a * v);
        }
    }

    #[test]
    fn passive_distances_match_bfs(net in network()) {
        let pda = build_pda(&net);
        for x in net.protocols() {
            let d = passive_distances(&pda, x);
            for &u in d.states() {
                for &w in d.states() {
                    prop_assert_eq!(d.get(u, w), bfs_distance(&pda, u, w));
                }
            }
        }
    }

    #[test]
    fn grammar_bounds(net in network()) {
        for pda in [build_pda(&net), transform_pda(&build_pda(&net))] {
            let cfg = pda_to_cfg(&pda);
            let q = pda.states().len();
            prop_assert!(cfg.productions().len() <= 1 + q + pda.transitions().len() * q * q);
            let l = l_values(&cfg);
            prop_assert!(l.sweeps() <= cfg.nonterminals().len());
            match shortest_word(&cfg, &l) {
                Ok(d) => {
                    prop_assert_eq!(Length::finite(d.word.len() as u32), l.get(cfg.axiom()));
                    prop_assert!(d.steps.len() <= cfg.nonterminals().len() * d.word.len());
                    prop_assert!(accepts(&pda, &d.word));
                }
                Err(_) => prop_assert!(!l.get(cfg.axiom()).is_finite()),
            }
        }
    }

    #[test]
    fn solved_paths_are_feasible(net in network()) {
        for objective in [Objective::MinHops, Objective::MinAdaptations] {
            let (sol, stats) = run_pipeline(&net, objective).unwrap();
            match sol {
                Solution::Feasible(r) => {
                    prop_assert!(is_feasible_path(&net, r.path.route()));
                    prop_assert_eq!(r.path.trace(), &r.trace);
                    prop_assert_eq!(r.hops, r.trace.len());
                    let seq = transition_sequence(r.path.route()).unwrap();
                    prop_assert_eq!(seq.len(), r.trace.len() - 1);
                    prop_assert!(is_valid_sequence(&seq.well_parenthesized()));
                    prop_assert_eq!(r.adaptations, seq.adaptations());
                    match objective {
                        Objective::MinHops => prop_assert_eq!(r.word.len(), r.hops),
                        Objective::MinAdaptations => {
                            prop_assert_eq!(r.adaptations, r.word.len() - 1);
                            prop_assert_eq!(r.hops, expand_f(&r.word).len());
                            for w in r.word.windows(2) {
                                prop_assert_ne!(w[0].protocol, w[1].protocol);
                            }
                        }
                    }
                }
                Solution::Infeasible => prop_assert!(!stats.axiom_length.is_finite()),
            }
        }
    }

    #[test]
    fn objectives_agree_on_feasibility(net in network()) {
        let hops = solve(&net, Objective::MinHops).unwrap();
        let adapt = solve(&net, Objective::MinAdaptations).unwrap();
        prop_assert_eq!(hops.feasible().is_some(), adapt.feasible().is_some());
        if let (Some(h), Some(a)) = (hops.feasible(), adapt.feasible()) {
            prop_assert!(h.hops <= a.hops);
            prop_assert!(a.adaptations <= h.adaptations);
        }
    }

    #[test]
    fn capabilities_are_monotone(net in network(), extra in 0usize..64) {
        let mut doc = net.to_document();
        let protocols = doc.protocols.clone();
        let i = extra % doc.nodes.len();
        let node = doc.nodes[i].id.clone();
        let before = capabilities(&net, &node).unwrap();
        doc.nodes[i].functions.push(pwpath::network::FunctionDoc::passive(&protocols[extra % protocols.len()]));
        doc.nodes[i].functions.sort_by_key(|f| format!("{f:?}"));
        doc.nodes[i].functions.dedup();
        let bigger = Network::from_document(&doc).unwrap();
        let after = capabilities(&bigger, &node).unwrap();
        prop_assert!(before.incoming.is_subset(&after.incoming));
        prop_assert!(before.outgoing.is_subset(&after.outgoing));
        prop_assert!(before.passive.is_subset(&after.passive));
    }
}

#[test]
fn sampled_words_cross_between_automata() {
    for seed in 0..30u64 {
        let net = GenSpec { node_count: 4, protocol_count: 2, edge_probability: 0.5, function_density: 0.4, seed }
            .generate()
            .unwrap();
        let pda = build_pda(&net);
        let tpda = transform_pda(&pda);
        for w in enumerate_accepted(&tpda, 6, |s| s.index as usize) {
            assert!(accepts(&pda, &expand_f(&w)), "seed {seed}");
        }
        for w in enumerate_accepted(&pda, 6, |_| 1) {
            assert!(accepts(&tpda, &w), "seed {seed}");
        }
    }
}

#[test]
fn minimal_preimage_need_not_be_accepted() {
    // n2 -> n3 -> n2 -> n3 -> D forwards b passively; the only bypasses span
    // shortest passive runs, so the single letter b4 is not read anywhere
    let net = GenSpec { node_count: 4, protocol_count: 2, edge_probability: 0.5, function_density: 0.4, seed: 14 }
        .generate()
        .unwrap();
    let pda = build_pda(&net);
    let tpda = transform_pda(&pda);
    let w = pwpath::pda::parse_word(net.names(), "b b b b").unwrap();
    assert!(accepts(&pda, &w));
    assert!(accepts(&tpda, &w));
    assert_eq!(compress_g(&w).len(), 1);
    assert!(!accepts(&tpda, &compress_g(&w)));
}

#[test]
fn enumerated_traces_are_feasible_paths() {
    // every accepted trace must be carried by some feasible path
    for seed in 0..30u64 {
        let net = GenSpec { node_count: 4, protocol_count: 2, edge_probability: 0.5, function_density: 0.4, seed }
            .generate()
            .unwrap();
        let lang: BTreeSet<_> = enumerate_accepted(&build_pda(&net), 5, |_| 1);
        for w in lang {
            let trace = pwpath::trace::Trace::new(w.iter().map(|s| s.link_symbol().unwrap()).collect());
            let path = pwpath::pathfinder::find_path(&net, &trace).unwrap();
            assert!(is_feasible_path(&net, path.route()));
            let route = Route::new(path.nodes().to_vec(), trace);
            assert!(is_feasible_path(&net, &route));
        }
    }
}
