//! Rank-maximal matchings under laminar classifications by iterated
//! max-flow: one round per rank, each round adding that rank's surviving
//! edges, augmenting, and then locking in the result by deleting the arcs
//! that cross the min cut backwards and the higher-rank edges that can no
//! longer be used without losing what was gained.

use serde::Serialize;

use crate::error::Result;
use crate::flow::{
    add_preference_arcs, build_base_network, decompose, extract_matching, max_flow_ordered,
    min_cut_check, residual, rl_counts, Arc, ArcKind, Decomposition, FlowAssignment, FlowGraph,
    NeighborOrder, NodeId, Part,
};
use crate::instance::{Edge, Instance};
use crate::matching::{signature_of, Matching, Signature};

/// A residual arc removed in one round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArcRecord {
    pub tail: String,
    pub head: String,
    pub cap: u64,
    pub tag: String,
    #[serde(skip)]
    pub nodes: (NodeId, NodeId),
}

/// An instance edge dropped from a later round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeRecord {
    pub applicant: String,
    pub post: String,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Iteration {
    pub rank: usize,
    pub arcs_added: usize,
    pub flow_value: u64,
    pub deleted_arcs: Vec<ArcRecord>,
    pub pruned_edges: Vec<EdgeRecord>,
    /// R-L preference arcs per rank after the round, index 0 is rank 1.
    pub rl_counts: Vec<u64>,
    pub min_cut_ok: bool,
    /// First round only: every preference arc carrying flow had exactly one
    /// of its two tree paths cut, never both. Later rounds run on residual
    /// graphs where flow can reroute through reversed tree arcs, so the
    /// property is not checked there.
    pub path_cut_ok: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CrmmTrace {
    pub iterations: Vec<Iteration>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrmmOutcome {
    pub matching: Matching,
    pub signature: Signature,
    pub trace: CrmmTrace,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CrmmOptions {
    pub order: NeighborOrder,
}

pub fn solve_crmm(inst: &Instance) -> Result<CrmmOutcome> {
    solve_crmm_with(inst, CrmmOptions::default())
}

pub fn solve_crmm_with(inst: &Instance, opts: CrmmOptions) -> Result<CrmmOutcome> {
    let r = inst.max_rank();
    let mut graph = build_base_network(inst)?;
    // remaining[j - 1] is E'_j
    let mut remaining: Vec<Vec<Edge>> = vec![Vec::new(); r];
    for e in inst.edges() {
        remaining[e.rank - 1].push(*e);
    }
    let mut trace = CrmmTrace::default();
    for k in 1..=r {
        let added = std::mem::take(&mut remaining[k - 1]);
        add_preference_arcs(&mut graph, &added)?;
        let flow = max_flow_ordered(&graph, opts.order);
        let mut next = residual(&graph, &flow);
        let d = decompose(&next)?;
        let min_cut_ok = min_cut_check(&graph, &flow, &d);
        let deleted = delete_cut_arcs(&mut next, &d);
        let path_cut_ok = (k == 1).then(|| paths_cut_once(&graph, &flow, &deleted));
        let pruned = prune_higher_rank(&next, &mut remaining[k..], &d);
        trace.iterations.push(Iteration {
            rank: k,
            arcs_added: added.len(),
            flow_value: flow.value,
            deleted_arcs: deleted
                .iter()
                .map(|&(u, v, arc)| ArcRecord {
                    tail: next.label(u).to_string(),
                    head: next.label(v).to_string(),
                    cap: arc.cap,
                    tag: arc.kind.tag(),
                    nodes: (u, v),
                })
                .collect(),
            pruned_edges: pruned
                .iter()
                .map(|e| EdgeRecord {
                    applicant: inst.applicant_name(e.applicant).to_string(),
                    post: inst.post_name(e.post).to_string(),
                    rank: e.rank,
                })
                .collect(),
            rl_counts: rl_counts(&next, r),
            min_cut_ok,
            path_cut_ok,
        });
        graph = next;
    }
    let matching = extract_matching(&graph);
    let signature = signature_of(inst, &matching);
    Ok(CrmmOutcome {
        matching,
        signature,
        trace,
    })
}

/// Removes every arc from `T ∪ U` into `S`. Returns the removed arcs as
/// `(tail, head, arc)` in arc order.
pub fn delete_cut_arcs(
    g_residual: &mut FlowGraph,
    d: &Decomposition,
) -> Vec<(NodeId, NodeId, Arc)> {
    let doomed: Vec<(NodeId, NodeId)> = g_residual
        .arcs()
        .filter(|&(u, v, _)| !d.in_s(u) && d.in_s(v))
        .map(|(u, v, _)| (u, v))
        .collect();
    doomed
        .into_iter()
        .map(|(u, v)| {
            let arc = g_residual.remove_arc(u, v).expect("arc listed above");
            (u, v, arc)
        })
        .collect()
}

/// Drops from the later edge sets every edge whose applicant leaf is
/// outside `S` or whose post leaf is outside `T`. Returns the dropped edges.
pub fn prune_higher_rank(g: &FlowGraph, later: &mut [Vec<Edge>], d: &Decomposition) -> Vec<Edge> {
    let mut pruned = Vec::new();
    for edges in later.iter_mut() {
        edges.retain(|e| {
            let (l, r) = g.leaves_of(e.applicant, e.post).expect("edge has leaves");
            let keep = d.part(l) == Part::S && d.part(r) == Part::T;
            if !keep {
                pruned.push(*e);
            }
            keep
        });
    }
    pruned
}

fn paths_cut_once(g: &FlowGraph, flow: &FlowAssignment, deleted: &[(NodeId, NodeId, Arc)]) -> bool {
    let hit = |path: &[(NodeId, NodeId)]| {
        path.iter().any(|&(x, y)| {
            deleted
                .iter()
                .any(|&(u, v, _)| (u, v) == (x, y) || (u, v) == (y, x))
        })
    };
    g.arcs().all(|(u, v, arc)| match arc.kind {
        ArcKind::Preference {
            applicant, post, ..
        } if g.is_l_leaf(u) && flow.flow(u, v) > 0 => {
            hit(&g.source_path(applicant, post)) != hit(&g.sink_path(applicant, post))
        }
        _ => true,
    })
}
