#![allow(dead_code)]

use classmatch::crmm::{delete_cut_arcs, prune_higher_rank};
use classmatch::flow::{
    add_preference_arcs, build_base_network, decompose, max_flow_ordered, residual, FlowGraph,
    NeighborOrder,
};
use classmatch::gen::GenParams;
use classmatch::{Edge, Instance, RawInstance};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Laminar instances at the oracle scale.
pub fn small_params() -> GenParams {
    GenParams::default()
}

/// Many-to-one instances at the oracle scale.
pub fn many_to_one_params(seed: u64) -> GenParams {
    // every other seed uses scarcer, less tied posts so that instances
    // without a popular matching show up often enough to matter
    if seed.is_multiple_of(2) {
        GenParams {
            many_to_one: true,
            ..GenParams::default()
        }
    } else {
        GenParams {
            posts: 3,
            tie_prob: 0.1,
            max_quota: 1,
            many_to_one: true,
            ..GenParams::default()
        }
    }
}

/// The network handed to each round's max-flow when every round uses the
/// ascending neighbor order. Index `k - 1` holds `H_{k-1}` plus the rank-k
/// arcs that survived pruning.
pub fn round_networks(inst: &Instance) -> Vec<FlowGraph> {
    let r = inst.max_rank();
    let mut graph = build_base_network(inst).unwrap();
    let mut remaining: Vec<Vec<Edge>> = vec![Vec::new(); r];
    for e in inst.edges() {
        remaining[e.rank - 1].push(*e);
    }
    let mut out = Vec::new();
    for k in 1..=r {
        let added = std::mem::take(&mut remaining[k - 1]);
        add_preference_arcs(&mut graph, &added).unwrap();
        out.push(graph.clone());
        let flow = max_flow_ordered(&graph, NeighborOrder::Ascending);
        let mut next = residual(&graph, &flow);
        let d = decompose(&next).unwrap();
        delete_cut_arcs(&mut next, &d);
        prune_higher_rank(&next, &mut remaining[k..], &d);
        graph = next;
    }
    out
}

/// A laminar instance with exactly `edges` edges and three strict ranks;
/// one applicant lists fewer posts when `edges` is not a multiple of three. Posts
/// split their applicants into classes of four (quota two) and pairs
/// (quota one); applicants with quota two cap their first two choices at one.
pub fn scaling_instance(edges: usize, seed: u64) -> Instance {
    let n = edges.div_ceil(3);
    let posts = (n / 4).max(3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = RawInstance::new();
    let mut lists = Vec::new();
    for a in 0..n {
        let q = rng.gen_range(1..=2);
        raw.applicant(format!("a{a}"), q);
        let choice: Vec<usize> = (0..posts)
            .collect::<Vec<_>>()
            .choose_multiple(&mut rng, 3.min(edges - 3 * a))
            .copied()
            .collect();
        lists.push((q, choice));
    }
    let mut neighbors = vec![Vec::new(); posts];
    for (a, (_, list)) in lists.iter().enumerate() {
        for &p in list {
            neighbors[p].push(format!("a{a}"));
        }
    }
    for (p, ns) in neighbors.iter().enumerate() {
        raw.post(format!("p{p}"), (ns.len() as i64 / 2).max(1));
    }
    for (a, (q, list)) in lists.iter().enumerate() {
        let names: Vec<String> = list.iter().map(|p| format!("p{p}")).collect();
        let groups: Vec<&[String]> = names.chunks(1).collect();
        raw.pref(&format!("a{a}"), &groups);
        if *q == 2 && names.len() > 2 {
            raw.class(&format!("a{a}"), 1, &names[..2]);
        }
    }
    for (p, ns) in neighbors.iter().enumerate() {
        let owner = format!("p{p}");
        for quad in ns.chunks(4).filter(|c| c.len() > 1) {
            if quad.len() < ns.len() {
                raw.class(&owner, 2, quad);
            }
            for pair in quad
                .chunks(2)
                .filter(|c| c.len() == 2 && c.len() < ns.len())
            {
                raw.class(&owner, 1, pair);
            }
        }
    }
    raw.build().unwrap()
}

/// Monotone 1-in-3 formulas with every variable in some clause. All with
/// at most five variables and three clauses happen to be satisfiable, so
/// the last entry adds a fourth clause to get an unsatisfiable one.
pub const FORMULAS: &[&str] = &[
    "p mono1in3 3 1\n1 2 3\n",
    "p mono1in3 4 2\n1 2 3\n1 2 4\n",
    "p mono1in3 4 2\n1 2 3\n2 3 4\n",
    "p mono1in3 5 2\n1 2 3\n3 4 5\n",
    "p mono1in3 4 3\n1 2 3\n1 2 4\n1 3 4\n",
    "p mono1in3 5 3\n1 2 3\n1 4 5\n2 4 5\n",
    "p mono1in3 5 3\n1 2 3\n1 2 4\n1 2 5\n",
    "p mono1in3 5 3\n1 2 3\n3 4 5\n1 4 5\n",
    "p mono1in3 5 3\n1 2 3\n2 3 4\n3 4 5\n",
    "p mono1in3 4 4\n1 2 3\n1 2 4\n1 3 4\n2 3 4\n",
];
