//! Popular matchings when every applicant takes one post and only posts
//! carry classes.
//!
//! Each applicant gets a private worst-choice post standing for "unmatched".
//! One max-flow over the rank-1 edges splits the network; from the split,
//! every applicant's `f` set (its rank-1 posts) and `s` set (its best posts
//! whose post-side leaf can still reach the sink) follow. A second max-flow
//! restricted to `f` and `s` edges either matches everyone, giving a popular
//! matching, or shows none exists.

use serde::Serialize;

use crate::crmm::delete_cut_arcs;
use crate::error::{Error, Result};
use crate::flow::{
    add_preference_arcs, build_base_network, decompose, extract_matching, max_flow, residual,
    Decomposition, FlowGraph, Part,
};
use crate::instance::{is_valid_name, ApplicantId, Edge, Instance, PostId};
use crate::matching::{is_feasible, signature_of, Matching, Signature};

/// Name for the last-resort post of `applicant`: the applicant name behind
/// as many `~` as needed to avoid every existing post name.
fn last_resort_name(inst: &Instance, applicant: &str) -> String {
    let mut name = format!("~{applicant}");
    while inst.find_post(&name).is_some() {
        name.insert(0, '~');
    }
    debug_assert!(is_valid_name(&name));
    name
}

/// Appends one quota-1 post per applicant as that applicant's new last
/// rank group. The original posts keep their ids; the last resort of
/// applicant `i` is post `|P| + i`.
pub fn add_last_resorts(inst: &Instance) -> Result<Instance> {
    inst.require_many_to_one()?;
    let mut raw = inst.to_raw();
    let names: Vec<String> = inst
        .applicants()
        .map(|a| last_resort_name(inst, inst.applicant_name(a)))
        .collect();
    for name in &names {
        raw.post(name.clone(), 1);
    }
    for (prefs, name) in raw.prefs.iter_mut().zip(&names) {
        prefs.groups.push(vec![name.clone()]);
    }
    raw.build()
}

/// Last-resort post of `a` in an instance built by `add_last_resorts`
/// from an instance with `original_posts` posts.
pub fn last_resort_of(original_posts: usize, a: ApplicantId) -> PostId {
    PostId(original_posts + a.0)
}

/// The `f` and `s` sets of every applicant in an augmented instance, with
/// the network state they were read from.
#[derive(Debug, Clone)]
pub struct FsAnalysis {
    pub f: Vec<Vec<PostId>>,
    /// Empty for applicants whose root is outside `S` after the rank-1 flow.
    pub s: Vec<Vec<PostId>>,
    /// Value of the max-flow over rank-1 edges.
    pub rank1_flow: u64,
    pub decomposition: Decomposition,
    /// Residual network after the rank-1 flow with cut arcs removed.
    pub graph: FlowGraph,
}

/// Computes the `f` and `s` sets of an instance that already has its last
/// resorts.
pub fn compute_fs_sets(aug: &Instance) -> Result<FsAnalysis> {
    let mut g = build_base_network(aug)?;
    let rank1: Vec<Edge> = aug
        .edges()
        .iter()
        .copied()
        .filter(|e| e.rank == 1)
        .collect();
    add_preference_arcs(&mut g, &rank1)?;
    let flow = max_flow(&g);
    let mut h = residual(&g, &flow);
    let d = decompose(&h)?;
    delete_cut_arcs(&mut h, &d);

    let f: Vec<Vec<PostId>> = aug
        .applicants()
        .map(|a| aug.preferences(a).first().cloned().unwrap_or_default())
        .collect();
    let s = aug
        .applicants()
        .map(|a| {
            if d.part(h.applicant_root(a)) != Part::S {
                return Vec::new();
            }
            aug.preferences(a)
                .iter()
                .map(|group| {
                    group
                        .iter()
                        .copied()
                        .filter(|&p| {
                            let (_, r) = h.leaves_of(a, p).expect("edge has leaves");
                            d.part(r) == Part::T
                        })
                        .collect::<Vec<_>>()
                })
                .find(|group| !group.is_empty())
                .unwrap_or_default()
        })
        .collect();
    Ok(FsAnalysis {
        f,
        s,
        rank1_flow: flow.value,
        decomposition: d,
        graph: h,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CpmOutcome {
    Popular {
        #[serde(skip)]
        matching: Matching,
        #[serde(skip)]
        unmatched: Vec<ApplicantId>,
        rank1_count: u64,
        signature: Signature,
    },
    None,
}

impl CpmOutcome {
    pub fn matching(&self) -> Option<&Matching> {
        match self {
            CpmOutcome::Popular { matching, .. } => Some(matching),
            CpmOutcome::None => None,
        }
    }
}

/// A popular matching of `inst`, or `CpmOutcome::None` if there is none.
/// Applicants left on their last resort are reported as unmatched and are
/// not part of the matching.
pub fn solve_cpm(inst: &Instance) -> Result<CpmOutcome> {
    let aug = add_last_resorts(inst)?;
    let fs = compute_fs_sets(&aug)?;
    let mut h = fs.graph;
    let mut extra = Vec::new();
    for a in aug.applicants() {
        for &p in &fs.s[a.0] {
            if !fs.f[a.0].contains(&p) {
                let rank = aug.rank(a, p).expect("s-post is a neighbor");
                extra.push(Edge {
                    applicant: a,
                    post: p,
                    rank,
                });
            }
        }
    }
    add_preference_arcs(&mut h, &extra)?;
    let flow = max_flow(&h);
    let found = extract_matching(&residual(&h, &flow));
    if found.len() < aug.applicant_count() {
        return Ok(CpmOutcome::None);
    }
    let original_posts = inst.post_count();
    let mut matching = Matching::new();
    let mut unmatched = Vec::new();
    for (a, p) in found.pairs() {
        if p.0 < original_posts {
            matching.insert_unchecked(a, p);
        } else {
            unmatched.push(a);
        }
    }
    debug_assert!(is_feasible(inst, &matching));
    let signature = signature_of(inst, &matching);
    Ok(CpmOutcome::Popular {
        rank1_count: signature.0.first().copied().unwrap_or(0),
        matching,
        unmatched,
        signature,
    })
}

/// Checks a matching of the original instance against the structural
/// description of popular matchings: its rank-1 part is as large as any
/// feasible rank-1 matching, and every applicant (sent to its last resort
/// when unmatched) holds a post from its `f` or `s` set.
pub fn verify_popular_characterization(inst: &Instance, m: &Matching) -> Result<bool> {
    if !is_feasible(inst, m) {
        return Err(Error::InvalidMatching("matching is not feasible".into()));
    }
    let aug = add_last_resorts(inst)?;
    let fs = compute_fs_sets(&aug)?;
    let rank1 = m
        .pairs()
        .filter(|&(a, p)| inst.rank(a, p) == Some(1))
        .count() as u64;
    if rank1 != fs.rank1_flow {
        return Ok(false);
    }
    Ok(inst.applicants().all(|a| {
        let p = m
            .post_of(a)
            .unwrap_or_else(|| last_resort_of(inst.post_count(), a));
        fs.f[a.0].contains(&p) || fs.s[a.0].contains(&p)
    }))
}
