//! The classification flow network and the max-flow machinery the solvers
//! run on it.
//!
//! The base network has a source feeding the root of every applicant tree,
//! applicant tree arcs pointing from parent to child, post tree arcs
//! pointing from child to parent, and every post root draining into the
//! sink. Preference arcs join an applicant leaf `C_a^p` (side L) to the
//! post leaf `C_p^a` (side R). A solver's working graph is a residual graph
//! with deletions, so arcs may point either way between the same pair of
//! nodes over time.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{ApplicantId, Edge, Instance, PostId, Side, Vertex};
use crate::matching::Matching;
use crate::tree::build_tree;

pub type NodeId = usize;

pub const SOURCE: NodeId = 0;
pub const SINK: NodeId = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Source,
    Sink,
    Class {
        owner: Vertex,
        /// Index of the node in the owner's classification tree.
        tree_node: usize,
        /// Set on leaves: the pair the leaf stands for.
        pair: Option<(ApplicantId, PostId)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNode {
    pub kind: NodeKind,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcKind {
    Source,
    Sink,
    Tree,
    Preference {
        rank: usize,
        applicant: ApplicantId,
        post: PostId,
    },
}

impl ArcKind {
    pub fn tag(&self) -> String {
        match self {
            ArcKind::Source => "source".into(),
            ArcKind::Sink => "sink".into(),
            ArcKind::Tree => "tree".into(),
            ArcKind::Preference { rank, .. } => format!("pref-r{rank}"),
        }
    }

    pub fn is_preference(&self) -> bool {
        matches!(self, ArcKind::Preference { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub cap: u64,
    pub kind: ArcKind,
}

/// Capacitated digraph over classification-tree nodes plus source and sink.
/// At most one arc exists per ordered node pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowGraph {
    nodes: Vec<FlowNode>,
    out: Vec<BTreeMap<NodeId, Arc>>,
    inc: Vec<BTreeSet<NodeId>>,
    leaves: HashMap<(ApplicantId, PostId), (NodeId, NodeId)>,
    /// Parent of each node in its classification tree; roots map to the
    /// source or sink.
    tree_parent: Vec<Option<NodeId>>,
    applicant_roots: Vec<NodeId>,
    post_roots: Vec<NodeId>,
}

impl FlowGraph {
    fn with_terminals() -> Self {
        let mut g = FlowGraph {
            nodes: Vec::new(),
            out: Vec::new(),
            inc: Vec::new(),
            leaves: HashMap::new(),
            tree_parent: Vec::new(),
            applicant_roots: Vec::new(),
            post_roots: Vec::new(),
        };
        g.push_node(NodeKind::Source, "s".into(), None);
        g.push_node(NodeKind::Sink, "t".into(), None);
        g
    }

    fn push_node(&mut self, kind: NodeKind, label: String, parent: Option<NodeId>) -> NodeId {
        self.nodes.push(FlowNode { kind, label });
        self.out.push(BTreeMap::new());
        self.inc.push(BTreeSet::new());
        self.tree_parent.push(parent);
        self.nodes.len() - 1
    }

    /// Copy of the node set with no arcs.
    fn empty_like(&self) -> FlowGraph {
        FlowGraph {
            nodes: self.nodes.clone(),
            out: vec![BTreeMap::new(); self.nodes.len()],
            inc: vec![BTreeSet::new(); self.nodes.len()],
            leaves: self.leaves.clone(),
            tree_parent: self.tree_parent.clone(),
            applicant_roots: self.applicant_roots.clone(),
            post_roots: self.post_roots.clone(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(BTreeMap::len).sum()
    }

    pub fn node(&self, id: NodeId) -> &FlowNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[FlowNode] {
        &self.nodes
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.nodes[id].label
    }

    /// All arcs ordered by tail, then head.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId, Arc)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, m)| m.iter().map(move |(&v, &arc)| (u, v, arc)))
    }

    pub fn out_arcs(&self, u: NodeId) -> impl Iterator<Item = (NodeId, Arc)> + '_ {
        self.out[u].iter().map(|(&v, &a)| (v, a))
    }

    pub fn in_neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.inc[v].iter().copied()
    }

    pub fn arc(&self, tail: NodeId, head: NodeId) -> Option<Arc> {
        self.out[tail].get(&head).copied()
    }

    pub fn has_arc_between(&self, u: NodeId, v: NodeId) -> bool {
        self.out[u].contains_key(&v) || self.out[v].contains_key(&u)
    }

    pub fn add_arc(&mut self, tail: NodeId, head: NodeId, cap: u64, kind: ArcKind) -> Result<()> {
        if self.out[tail].contains_key(&head) {
            return Err(self.duplicate(tail, head));
        }
        self.insert_arc(tail, head, cap, kind);
        Ok(())
    }

    fn duplicate(&self, tail: NodeId, head: NodeId) -> Error {
        Error::DuplicateArc {
            tail: self.label(tail).to_string(),
            head: self.label(head).to_string(),
        }
    }

    fn insert_arc(&mut self, tail: NodeId, head: NodeId, cap: u64, kind: ArcKind) {
        debug_assert!(cap > 0);
        self.out[tail].insert(head, Arc { cap, kind });
        self.inc[head].insert(tail);
    }

    /// Adds `cap` to an existing arc, or creates it.
    fn merge_arc(&mut self, tail: NodeId, head: NodeId, cap: u64, kind: ArcKind) {
        match self.out[tail].get_mut(&head) {
            Some(arc) => arc.cap += cap,
            None => self.insert_arc(tail, head, cap, kind),
        }
    }

    pub fn remove_arc(&mut self, tail: NodeId, head: NodeId) -> Option<Arc> {
        let arc = self.out[tail].remove(&head)?;
        self.inc[head].remove(&tail);
        Some(arc)
    }

    /// The `(L, R)` leaf nodes standing for edge `(a, p)`.
    pub fn leaves_of(&self, a: ApplicantId, p: PostId) -> Option<(NodeId, NodeId)> {
        self.leaves.get(&(a, p)).copied()
    }

    pub fn applicant_root(&self, a: ApplicantId) -> NodeId {
        self.applicant_roots[a.0]
    }

    pub fn post_root(&self, p: PostId) -> NodeId {
        self.post_roots[p.0]
    }

    pub fn tree_parent(&self, n: NodeId) -> Option<NodeId> {
        self.tree_parent[n]
    }

    pub fn side(&self, n: NodeId) -> Option<Side> {
        match &self.nodes[n].kind {
            NodeKind::Class { owner, .. } => Some(owner.side()),
            _ => None,
        }
    }

    pub fn is_l_leaf(&self, n: NodeId) -> bool {
        matches!(
            &self.nodes[n].kind,
            NodeKind::Class {
                owner: Vertex::Applicant(_),
                pair: Some(_),
                ..
            }
        )
    }

    pub fn is_r_leaf(&self, n: NodeId) -> bool {
        matches!(
            &self.nodes[n].kind,
            NodeKind::Class {
                owner: Vertex::Post(_),
                pair: Some(_),
                ..
            }
        )
    }

    /// Tree path from the source down to the L leaf of `(a, p)`, as
    /// consecutive node pairs (parent, child).
    pub fn source_path(&self, a: ApplicantId, p: PostId) -> Vec<(NodeId, NodeId)> {
        let (l, _) = self.leaves_of(a, p).expect("edge has leaves");
        self.walk_up(l).into_iter().map(|(c, p)| (p, c)).collect()
    }

    /// Tree path from the R leaf of `(a, p)` up to the sink, as consecutive
    /// node pairs (child, parent).
    pub fn sink_path(&self, a: ApplicantId, p: PostId) -> Vec<(NodeId, NodeId)> {
        let (_, r) = self.leaves_of(a, p).expect("edge has leaves");
        self.walk_up(r)
    }

    fn walk_up(&self, mut n: NodeId) -> Vec<(NodeId, NodeId)> {
        let mut path = Vec::new();
        while let Some(p) = self.tree_parent[n] {
            path.push((n, p));
            n = p;
        }
        path
    }

    /// Readable arc list: `src -> dst cap=<c> flow=<f> tag=<kind>`.
    pub fn dump(&self, flow: Option<&FlowAssignment>) -> String {
        let mut out = String::new();
        for (u, v, arc) in self.arcs() {
            let f = flow.map_or(0, |f| f.flow(u, v));
            let _ = writeln!(
                out,
                "{} -> {} cap={} flow={} tag={}",
                self.label(u),
                self.label(v),
                arc.cap,
                f,
                arc.kind.tag()
            );
        }
        out
    }
}

fn node_label(
    inst: &Instance,
    owner: Vertex,
    node: &crate::tree::TreeNode,
    is_root: bool,
) -> String {
    let name = inst.name(owner);
    if let Some(w) = node.leaf {
        format!("C_{}^{}", name, inst.partner_name(owner, w))
    } else if is_root {
        format!("C*_{name}")
    } else {
        let members: Vec<&str> = node
            .members
            .iter()
            .map(|&m| inst.partner_name(owner, m))
            .collect();
        format!("C_{}{{{}}}", name, members.join(","))
    }
}

/// Builds the network with no preference arcs: source, sink, and the
/// classification tree of every vertex. Nodes are created in a fixed order
/// (source, sink, applicant trees, post trees; each tree in preorder).
pub fn build_base_network(inst: &Instance) -> Result<FlowGraph> {
    let mut g = FlowGraph::with_terminals();
    let mut l_leaf: HashMap<(ApplicantId, PostId), NodeId> = HashMap::new();
    let mut r_leaf: HashMap<(ApplicantId, PostId), NodeId> = HashMap::new();
    let owners = inst
        .applicants()
        .map(Vertex::Applicant)
        .chain(inst.posts().map(Vertex::Post));
    for owner in owners {
        let tree = build_tree(inst, owner)?;
        let mut ids = Vec::with_capacity(tree.len());
        for (i, node) in tree.nodes().iter().enumerate() {
            let pair = node.leaf.map(|w| match owner {
                Vertex::Applicant(a) => (a, PostId(w)),
                Vertex::Post(p) => (ApplicantId(w), p),
            });
            let parent = match node.parent {
                Some(p) => ids[p],
                None if owner.side() == Side::Applicant => SOURCE,
                None => SINK,
            };
            let id = g.push_node(
                NodeKind::Class {
                    owner,
                    tree_node: i,
                    pair,
                },
                node_label(inst, owner, node, i == 0),
                Some(parent),
            );
            ids.push(id);
            match (owner, pair) {
                (Vertex::Applicant(_), Some(pair)) => {
                    l_leaf.insert(pair, id);
                }
                (Vertex::Post(_), Some(pair)) => {
                    r_leaf.insert(pair, id);
                }
                _ => {}
            }
            let cap = node.quota as u64;
            match (owner, node.parent) {
                (Vertex::Applicant(_), None) => g.insert_arc(SOURCE, id, cap, ArcKind::Source),
                (Vertex::Applicant(_), Some(p)) => g.insert_arc(ids[p], id, cap, ArcKind::Tree),
                (Vertex::Post(_), None) => g.insert_arc(id, SINK, cap, ArcKind::Sink),
                (Vertex::Post(_), Some(p)) => g.insert_arc(id, ids[p], cap, ArcKind::Tree),
            }
        }
        match owner {
            Vertex::Applicant(_) => g.applicant_roots.push(ids[0]),
            Vertex::Post(_) => g.post_roots.push(ids[0]),
        }
    }
    for (pair, l) in l_leaf {
        g.leaves.insert(pair, (l, r_leaf[&pair]));
    }
    Ok(g)
}

/// Adds a unit arc `C_a^p -> C_p^a` for every edge.
pub fn add_preference_arcs(g: &mut FlowGraph, edges: &[Edge]) -> Result<()> {
    for e in edges {
        let (l, r) = g.leaves_of(e.applicant, e.post).ok_or_else(|| {
            Error::InvalidMatching(format!(
                "no leaves for edge ({}, {})",
                e.applicant.0, e.post.0
            ))
        })?;
        if g.has_arc_between(l, r) {
            return Err(g.duplicate(l, r));
        }
        g.insert_arc(
            l,
            r,
            1,
            ArcKind::Preference {
                rank: e.rank,
                applicant: e.applicant,
                post: e.post,
            },
        );
    }
    Ok(())
}

/// An integral flow on the arcs of one graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlowAssignment {
    flow: BTreeMap<(NodeId, NodeId), u64>,
    pub value: u64,
}

impl FlowAssignment {
    pub fn flow(&self, tail: NodeId, head: NodeId) -> u64 {
        self.flow.get(&(tail, head)).copied().unwrap_or(0)
    }

    /// Arcs carrying positive flow.
    pub fn positive(&self) -> impl Iterator<Item = ((NodeId, NodeId), u64)> + '_ {
        self.flow.iter().map(|(&k, &v)| (k, v))
    }

    /// Net flow out of `n` (out minus in), against the arcs of `g`.
    pub fn excess_out(&self, n: NodeId) -> i64 {
        self.flow
            .iter()
            .map(|(&(u, v), &f)| {
                if u == n {
                    f as i64
                } else if v == n {
                    -(f as i64)
                } else {
                    0
                }
            })
            .sum()
    }
}

/// Order in which a node's residual neighbors are scanned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeighborOrder {
    /// Increasing node id, which is creation order.
    #[default]
    Ascending,
    Descending,
}

/// Maximum flow by shortest augmenting paths with neighbors scanned in
/// creation order.
pub fn max_flow(g: &FlowGraph) -> FlowAssignment {
    max_flow_ordered(g, NeighborOrder::Ascending)
}

pub fn max_flow_ordered(g: &FlowGraph, order: NeighborOrder) -> FlowAssignment {
    let n = g.node_count();
    let arcs: Vec<(NodeId, NodeId, u64)> = g.arcs().map(|(u, v, a)| (u, v, a.cap)).collect();
    // residual edge 2k is arc k, 2k+1 its reverse
    let mut head = Vec::with_capacity(arcs.len() * 2);
    let mut cap = Vec::with_capacity(arcs.len() * 2);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, &(u, v, c)) in arcs.iter().enumerate() {
        head.push(v);
        cap.push(c);
        head.push(u);
        cap.push(0);
        adj[u].push(2 * k);
        adj[v].push(2 * k + 1);
    }
    for list in &mut adj {
        list.sort_by_key(|&e| (head[e], e & 1));
        if order == NeighborOrder::Descending {
            list.reverse();
        }
    }

    let mut value = 0u64;
    let mut pred = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    loop {
        pred.iter_mut().for_each(|p| *p = usize::MAX);
        queue.clear();
        queue.push_back(SOURCE);
        let mut reached = false;
        'bfs: while let Some(u) = queue.pop_front() {
            for &e in &adj[u] {
                let v = head[e];
                if cap[e] > 0 && v != SOURCE && pred[v] == usize::MAX {
                    pred[v] = e;
                    if v == SINK {
                        reached = true;
                        break 'bfs;
                    }
                    queue.push_back(v);
                }
            }
        }
        if !reached {
            break;
        }
        let mut bottleneck = u64::MAX;
        let mut v = SINK;
        while v != SOURCE {
            let e = pred[v];
            bottleneck = bottleneck.min(cap[e]);
            v = head[e ^ 1];
        }
        let mut v = SINK;
        while v != SOURCE {
            let e = pred[v];
            cap[e] -= bottleneck;
            cap[e ^ 1] += bottleneck;
            v = head[e ^ 1];
        }
        value += bottleneck;
    }

    let mut flow: BTreeMap<(NodeId, NodeId), u64> = BTreeMap::new();
    for (k, &(u, v, _)) in arcs.iter().enumerate() {
        let f = cap[2 * k + 1];
        if f > 0 {
            flow.insert((u, v), f);
        }
    }
    // cancel flow running both ways between a pair of nodes
    let pairs: Vec<(NodeId, NodeId)> = flow.keys().copied().collect();
    for (u, v) in pairs {
        if u < v {
            if let (Some(&x), Some(&y)) = (flow.get(&(u, v)), flow.get(&(v, u))) {
                let m = x.min(y);
                for (key, val) in [((u, v), x - m), ((v, u), y - m)] {
                    if val == 0 {
                        flow.remove(&key);
                    } else {
                        flow.insert(key, val);
                    }
                }
            }
        }
    }
    FlowAssignment { flow, value }
}

/// Residual graph of `g` under `f`. Leftover capacity stays on the arc,
/// flow shows up as a reverse arc with the same provenance, and arcs with
/// nothing left are dropped.
pub fn residual(g: &FlowGraph, f: &FlowAssignment) -> FlowGraph {
    let mut r = g.empty_like();
    for (u, v, arc) in g.arcs() {
        let used = f.flow(u, v);
        debug_assert!(used <= arc.cap);
        if arc.cap > used {
            r.merge_arc(u, v, arc.cap - used, arc.kind);
        }
        if used > 0 {
            r.merge_arc(v, u, used, arc.kind);
        }
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Part {
    S,
    T,
    U,
}

/// Partition of the nodes of a residual graph: `S` is reachable from the
/// source, `T` reaches the sink, `U` is everything else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    parts: Vec<Part>,
}

impl Decomposition {
    pub fn part(&self, n: NodeId) -> Part {
        self.parts[n]
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn nodes_in(&self, part: Part) -> Vec<NodeId> {
        (0..self.parts.len())
            .filter(|&n| self.parts[n] == part)
            .collect()
    }

    pub fn in_s(&self, n: NodeId) -> bool {
        self.parts[n] == Part::S
    }
}

pub fn decompose(g_residual: &FlowGraph) -> Result<Decomposition> {
    let n = g_residual.node_count();
    let mut forward = vec![false; n];
    let mut queue = VecDeque::from([SOURCE]);
    forward[SOURCE] = true;
    while let Some(u) = queue.pop_front() {
        for (v, _) in g_residual.out_arcs(u) {
            if !forward[v] {
                forward[v] = true;
                queue.push_back(v);
            }
        }
    }
    if forward[SINK] {
        return Err(Error::SourceReachesSink);
    }
    let mut backward = vec![false; n];
    queue.push_back(SINK);
    backward[SINK] = true;
    while let Some(v) = queue.pop_front() {
        for u in g_residual.in_neighbors(v) {
            if !backward[u] {
                backward[u] = true;
                queue.push_back(u);
            }
        }
    }
    let parts = (0..n)
        .map(|i| match (forward[i], backward[i]) {
            (true, _) => Part::S,
            (false, true) => Part::T,
            (false, false) => Part::U,
        })
        .collect();
    Ok(Decomposition { parts })
}

/// Every arc leaving `S` is saturated and every arc entering `S` is empty.
pub fn min_cut_check(g: &FlowGraph, f: &FlowAssignment, d: &Decomposition) -> bool {
    g.arcs().all(|(u, v, arc)| match (d.in_s(u), d.in_s(v)) {
        (true, false) => f.flow(u, v) == arc.cap,
        (false, true) => f.flow(u, v) == 0,
        _ => true,
    })
}

/// Total capacity of arcs from `S` to the rest.
pub fn cut_capacity(g: &FlowGraph, d: &Decomposition) -> u64 {
    g.arcs()
        .filter(|&(u, v, _)| d.in_s(u) && !d.in_s(v))
        .map(|(_, _, a)| a.cap)
        .sum()
}

/// Pairs whose preference arc currently points from R to L.
pub fn extract_matching(g_residual: &FlowGraph) -> Matching {
    let mut m = Matching::new();
    for (u, _, arc) in g_residual.arcs() {
        if let ArcKind::Preference {
            applicant, post, ..
        } = arc.kind
        {
            if g_residual.is_r_leaf(u) {
                m.insert_unchecked(applicant, post);
            }
        }
    }
    m
}

/// Number of R-L preference arcs per rank (index 0 is rank 1).
pub fn rl_counts(g: &FlowGraph, max_rank: usize) -> Vec<u64> {
    let mut counts = vec![0u64; max_rank];
    for (u, _, arc) in g.arcs() {
        if let ArcKind::Preference { rank, .. } = arc.kind {
            if g.is_r_leaf(u) {
                counts[rank - 1] += 1;
            }
        }
    }
    counts
}
