//! Exhaustive ground truth for small instances. Nothing here assumes the
//! classes are laminar: feasibility is checked against every vertex and
//! class quota directly.
//!
//! The searches run depth-first with running quota counters, so an
//! infeasible branch is cut as soon as it appears. The optimizing searches
//! also cut a branch when an upper bound on what it can still reach is no
//! better than what is already known.

use crate::error::{Error, Result};
use crate::instance::{Edge, Instance, Vertex};
use crate::matching::{compare_signatures, vote, Matching, Signature};

/// Largest edge count the oracles accept unless told otherwise.
pub const DEFAULT_CAP: usize = 16;

/// Quota constraints as counters. Constraint ids: applicants first, then
/// posts, then classes in instance order.
struct Model {
    edges: Vec<Edge>,
    touches: Vec<Vec<usize>>,
    cap: Vec<u32>,
    applicants: usize,
    posts: usize,
    /// Edge indices of each applicant, best rank first.
    by_applicant: Vec<Vec<usize>>,
}

impl Model {
    fn new(inst: &Instance, cap: usize) -> Result<Model> {
        let edges = inst.edges().to_vec();
        if edges.len() > cap {
            return Err(Error::TooLarge {
                what: "edges",
                size: edges.len(),
                cap,
            });
        }
        let (na, np) = (inst.applicant_count(), inst.post_count());
        let mut caps: Vec<u32> = inst.applicants().map(|a| inst.applicant_quota(a)).collect();
        caps.extend(inst.posts().map(|p| inst.post_quota(p)));
        caps.extend(inst.classes().iter().map(|c| c.quota));
        let mut by_applicant = vec![Vec::new(); na];
        let touches = edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                by_applicant[e.applicant.0].push(i);
                let mut t = vec![e.applicant.0, na + e.post.0];
                for (ci, c) in inst.classes().iter().enumerate() {
                    let hit = match c.owner {
                        Vertex::Applicant(a) => {
                            a == e.applicant && c.members.binary_search(&e.post.0).is_ok()
                        }
                        Vertex::Post(p) => {
                            p == e.post && c.members.binary_search(&e.applicant.0).is_ok()
                        }
                    };
                    if hit {
                        t.push(na + np + ci);
                    }
                }
                t
            })
            .collect();
        for list in &mut by_applicant {
            list.sort_by_key(|&i| edges[i].rank);
        }
        Ok(Model {
            edges,
            touches,
            cap: caps,
            applicants: na,
            posts: np,
            by_applicant,
        })
    }

    fn addable(&self, used: &[u32], e: usize) -> bool {
        self.touches[e].iter().all(|&c| used[c] < self.cap[c])
    }

    fn add(&self, used: &mut [u32], e: usize) {
        for &c in &self.touches[e] {
            used[c] += 1;
        }
    }

    fn remove(&self, used: &mut [u32], e: usize) {
        for &c in &self.touches[e] {
            used[c] -= 1;
        }
    }

    fn matching(&self, chosen: &[bool]) -> Matching {
        chosen
            .iter()
            .zip(&self.edges)
            .filter(|(c, _)| **c)
            .map(|(_, e)| (e.applicant, e.post))
            .collect()
    }
}

/// Calls `visit` once for every feasible matching.
pub fn for_each_feasible(
    inst: &Instance,
    cap: usize,
    mut visit: impl FnMut(&Matching),
) -> Result<()> {
    let model = Model::new(inst, cap)?;
    let mut used = vec![0u32; model.cap.len()];
    let mut chosen = vec![false; model.edges.len()];
    fn rec(
        m: &Model,
        i: usize,
        used: &mut [u32],
        chosen: &mut [bool],
        visit: &mut dyn FnMut(&Matching),
    ) {
        if i == m.edges.len() {
            visit(&m.matching(chosen));
            return;
        }
        rec(m, i + 1, used, chosen, visit);
        if m.addable(used, i) {
            m.add(used, i);
            chosen[i] = true;
            rec(m, i + 1, used, chosen, visit);
            chosen[i] = false;
            m.remove(used, i);
        }
    }
    rec(&model, 0, &mut used, &mut chosen, &mut visit);
    Ok(())
}

/// Every feasible matching, each exactly once.
pub fn enumerate_feasible(inst: &Instance, cap: usize) -> Result<Vec<Matching>> {
    let mut out = Vec::new();
    for_each_feasible(inst, cap, |m| out.push(m.clone()))?;
    Ok(out)
}

enum Goal {
    Maximize,
    AtLeast(Vec<u64>),
}

/// Branch and bound over edge subsets with a per-rank count objective.
struct SigSearch<'m> {
    m: &'m Model,
    /// Objective slot of each edge.
    slot: Vec<usize>,
    width: usize,
    used: Vec<u32>,
    chosen: Vec<bool>,
    counts: Vec<u64>,
    goal: Goal,
    best: Option<(Vec<u64>, Vec<bool>)>,
    per_applicant: Vec<u32>,
    per_post: Vec<u32>,
}

impl SigSearch<'_> {
    fn lex(a: &[u64], b: &[u64]) -> std::cmp::Ordering {
        a.cmp(b)
    }

    /// Componentwise bound on the counts reachable from edge `i` on: for
    /// each slot, the current count plus the smaller of what the applicants
    /// and the posts could still absorb through addable undecided edges.
    fn bound(&mut self, i: usize) -> Vec<u64> {
        let (na, np, w) = (self.m.applicants, self.m.posts, self.width);
        self.per_applicant.iter_mut().for_each(|x| *x = 0);
        self.per_post.iter_mut().for_each(|x| *x = 0);
        for j in i..self.m.edges.len() {
            if self.m.addable(&self.used, j) {
                let e = &self.m.edges[j];
                self.per_applicant[e.applicant.0 * w + self.slot[j]] += 1;
                self.per_post[e.post.0 * w + self.slot[j]] += 1;
            }
        }
        let mut u = self.counts.clone();
        for (k, uk) in u.iter_mut().enumerate() {
            let a_side: u64 = (0..na)
                .map(|a| {
                    let room = self.m.cap[a] - self.used[a];
                    room.min(self.per_applicant[a * w + k]) as u64
                })
                .sum();
            let p_side: u64 = (0..np)
                .map(|p| {
                    let room = self.m.cap[na + p] - self.used[na + p];
                    room.min(self.per_post[p * w + k]) as u64
                })
                .sum();
            *uk += a_side.min(p_side);
        }
        u
    }

    /// Returns true once an `AtLeast` goal is met.
    fn run(&mut self, i: usize) -> bool {
        match &self.goal {
            Goal::AtLeast(target) => {
                if Self::lex(&self.counts, target).is_ge() {
                    self.best = Some((self.counts.clone(), self.chosen.clone()));
                    return true;
                }
            }
            Goal::Maximize => {
                let better = match &self.best {
                    None => true,
                    Some((b, _)) => Self::lex(&self.counts, b).is_gt(),
                };
                if better {
                    self.best = Some((self.counts.clone(), self.chosen.clone()));
                }
            }
        }
        if i == self.m.edges.len() {
            return false;
        }
        let u = self.bound(i);
        let hopeless = match &self.goal {
            Goal::AtLeast(target) => Self::lex(&u, target).is_lt(),
            Goal::Maximize => self
                .best
                .as_ref()
                .is_some_and(|(b, _)| Self::lex(&u, b).is_le()),
        };
        if hopeless {
            return false;
        }
        if self.m.addable(&self.used, i) {
            self.m.add(&mut self.used, i);
            self.chosen[i] = true;
            self.counts[self.slot[i]] += 1;
            let done = self.run(i + 1);
            self.counts[self.slot[i]] -= 1;
            self.chosen[i] = false;
            self.m.remove(&mut self.used, i);
            if done {
                return true;
            }
        }
        self.run(i + 1)
    }
}

fn sig_search(
    m: &Model,
    slot: Vec<usize>,
    width: usize,
    goal: Goal,
) -> Option<(Vec<u64>, Matching)> {
    let mut s = SigSearch {
        m,
        slot,
        width,
        used: vec![0; m.cap.len()],
        chosen: vec![false; m.edges.len()],
        counts: vec![0; width],
        goal,
        best: None,
        per_applicant: vec![0; m.applicants * width],
        per_post: vec![0; m.posts * width],
    };
    s.run(0);
    s.best.map(|(c, chosen)| (c, m.matching(&chosen)))
}

/// The best signature over all feasible matchings, with a witness.
pub fn oracle_rmm_signature(inst: &Instance, cap: usize) -> Result<(Signature, Matching)> {
    let m = Model::new(inst, cap)?;
    let slot = m.edges.iter().map(|e| e.rank - 1).collect();
    let (counts, witness) =
        sig_search(&m, slot, inst.max_rank(), Goal::Maximize).expect("empty matching is feasible");
    Ok((Signature(counts), witness))
}

/// Whether some feasible matching has a signature at least `target`.
pub fn oracle_decision(inst: &Instance, target: &Signature, cap: usize) -> Result<bool> {
    Ok(oracle_decision_witness(inst, target, cap)?.is_some())
}

pub fn oracle_decision_witness(
    inst: &Instance,
    target: &Signature,
    cap: usize,
) -> Result<Option<Matching>> {
    let m = Model::new(inst, cap)?;
    let width = inst.max_rank().max(target.len());
    // a target longer than the instance's lists can only be met by zeros
    let target = target.padded(width);
    let slot = m.edges.iter().map(|e| e.rank - 1).collect();
    let found = sig_search(&m, slot, width, Goal::AtLeast(target.0.clone()));
    debug_assert!(found.as_ref().is_none_or(|(c, _)| compare_signatures(
        &Signature(c.clone()),
        &target
    )
    .is_ge()));
    Ok(found.map(|(_, w)| w))
}

/// Size of a largest feasible matching.
pub fn oracle_max_cardinality(inst: &Instance, cap: usize) -> Result<usize> {
    let m = Model::new(inst, cap)?;
    let slot = vec![0; m.edges.len()];
    let (counts, _) = sig_search(&m, slot, 1, Goal::Maximize).expect("empty matching is feasible");
    Ok(counts[0] as usize)
}

/// Searches for a feasible matching that outvotes a reference matching.
///
/// An applicant's vote is counted relative to being unmatched: leaving it
/// unmatched is worth `base` (−1 if the reference matches it, else 0) and
/// giving it post `p` adds `gain(p) = vote(p, ref) − base`. Edges with zero
/// gain never help and are skipped, since dropping an edge keeps a matching
/// feasible. The balance of the best matching is `Σ base + max Σ gain`.
struct VoteSearch<'m> {
    m: &'m Model,
    /// Edges with positive gain per applicant, largest gain first.
    useful: Vec<Vec<(usize, u32)>>,
    used: Vec<u32>,
    /// Gain still needed to get a positive balance.
    need: i64,
    /// Edges of the matching under construction.
    stack: Vec<usize>,
    per_post: Vec<[u32; 3]>,
}

impl VoteSearch<'_> {
    fn new<'m>(m: &'m Model, reference: &[Option<usize>]) -> VoteSearch<'m> {
        let mut base_total = 0i64;
        let useful = (0..m.applicants)
            .map(|a| {
                let base = vote(None, reference[a]);
                base_total += base;
                let mut list: Vec<(usize, u32)> = m.by_applicant[a]
                    .iter()
                    .map(|&e| (e, (vote(Some(m.edges[e].rank), reference[a]) - base) as u32))
                    .filter(|&(_, g)| g > 0)
                    .collect();
                list.sort_by_key(|&(e, g)| (std::cmp::Reverse(g), e));
                list
            })
            .collect();
        VoteSearch {
            m,
            useful,
            used: vec![0; m.cap.len()],
            need: 1 - base_total,
            stack: Vec::new(),
            per_post: vec![[0; 3]; m.posts],
        }
    }

    /// Upper bound on the gain applicants `a..` can still add: the smaller
    /// of the applicant-side and post-side totals over addable edges.
    fn bound(&mut self, a: usize) -> i64 {
        self.per_post.iter_mut().for_each(|c| *c = [0; 3]);
        let mut a_side = 0i64;
        for x in a..self.m.applicants {
            let mut best = 0;
            for &(e, g) in &self.useful[x] {
                if self.m.addable(&self.used, e) {
                    best = best.max(g);
                    self.per_post[self.m.edges[e].post.0][g as usize] += 1;
                }
            }
            a_side += best as i64;
        }
        let na = self.m.applicants;
        let p_side: i64 = self
            .per_post
            .iter()
            .enumerate()
            .map(|(p, c)| {
                let room = self.m.cap[na + p] - self.used[na + p];
                let twos = room.min(c[2]);
                let ones = (room - twos).min(c[1]);
                (2 * twos + ones) as i64
            })
            .sum();
        a_side.min(p_side)
    }

    /// Whether applicants `a..` can add at least `self.need - got` gain.
    fn beats(&mut self, a: usize, got: i64) -> bool {
        if got >= self.need {
            return true;
        }
        if a == self.m.applicants || got + self.bound(a) < self.need {
            return false;
        }
        for idx in 0..self.useful[a].len() {
            let (e, g) = self.useful[a][idx];
            if self.m.addable(&self.used, e) {
                self.m.add(&mut self.used, e);
                self.stack.push(e);
                let found = self.beats(a + 1, got + g as i64);
                if found {
                    return true;
                }
                self.stack.pop();
                self.m.remove(&mut self.used, e);
            }
        }
        self.beats(a + 1, got)
    }
}

fn reference_ranks(inst: &Instance, m: &Matching) -> Vec<Option<usize>> {
    inst.applicants()
        .map(|a| m.post_of(a).and_then(|p| inst.rank(a, p)))
        .collect()
}

/// A feasible matching with more votes than the reference, as the rank
/// each applicant gets in it.
fn outvoting(model: &Model, reference: &[Option<usize>]) -> Option<Vec<Option<usize>>> {
    let mut s = VoteSearch::new(model, reference);
    if !s.beats(0, 0) {
        return None;
    }
    let mut ranks = vec![None; model.applicants];
    for &e in &s.stack {
        ranks[model.edges[e].applicant.0] = Some(model.edges[e].rank);
    }
    Some(ranks)
}

fn is_popular_in(model: &Model, inst: &Instance, m: &Matching) -> bool {
    outvoting(model, &reference_ranks(inst, m)).is_none()
}

/// True iff no feasible matching gets more votes than `m`.
pub fn oracle_is_popular(inst: &Instance, m: &Matching, cap: usize) -> Result<bool> {
    inst.require_many_to_one()?;
    if !crate::matching::is_feasible(inst, m) {
        return Err(Error::InvalidMatching("matching is not feasible".into()));
    }
    let model = Model::new(inst, cap)?;
    Ok(is_popular_in(&model, inst, m))
}

/// Candidate search for `oracle_popular`. A popular matching leaves no
/// applicant able to move alone to a post it prefers (a matched applicant
/// always prefers any post to none). After each decision the search checks
/// that every such move already blocked, or still blockable by applicants
/// not yet placed, could end up blocked; otherwise the branch is dropped.
struct Candidates<'m> {
    m: &'m Model,
    used: Vec<u32>,
    chosen_by: Vec<Option<usize>>,
    /// `reach[a * c + k]`: applicants `a..` with an edge on constraint `k`.
    reach: Vec<u32>,
    /// Matchings that outvoted earlier candidates, as per-applicant ranks;
    /// tried first on every new candidate.
    rivals: Vec<Vec<Option<usize>>>,
}

impl<'m> Candidates<'m> {
    fn new(m: &'m Model) -> Self {
        let c = m.cap.len();
        let mut reach = vec![0u32; (m.applicants + 1) * c];
        for a in (0..m.applicants).rev() {
            let (head, tail) = reach.split_at_mut((a + 1) * c);
            head[a * c..].copy_from_slice(&tail[..c]);
            let mut seen = std::collections::BTreeSet::new();
            for &e in &m.by_applicant[a] {
                seen.extend(m.touches[e].iter().copied());
            }
            for k in seen {
                reach[a * c + k] += 1;
            }
        }
        Candidates {
            m,
            used: vec![0; c],
            chosen_by: vec![None; m.applicants],
            reach,
            rivals: Vec::new(),
        }
    }

    /// Whether every improving single move of a placed applicant can still
    /// be blocked once applicants `next..` are placed.
    fn moves_blockable(&self, next: usize) -> bool {
        let c = self.m.cap.len();
        (0..next).all(|a| {
            let current = self.chosen_by[a];
            let current_rank = current.map(|e| self.m.edges[e].rank);
            self.m.by_applicant[a].iter().all(|&e| {
                if vote(Some(self.m.edges[e].rank), current_rank) <= 0 {
                    return true;
                }
                self.m.touches[e].iter().any(|&k| {
                    let own = current.is_some_and(|x| self.m.touches[x].contains(&k)) as u32;
                    self.used[k] - own + self.reach[next * c + k] >= self.m.cap[k]
                })
            })
        })
    }

    fn search(&mut self, a: usize) -> Option<Matching> {
        if !self.moves_blockable(a) {
            return None;
        }
        if a == self.m.applicants {
            let reference: Vec<Option<usize>> = self
                .chosen_by
                .iter()
                .map(|c| c.map(|e| self.m.edges[e].rank))
                .collect();
            let beaten = self.rivals.iter().any(|n| {
                n.iter()
                    .zip(&reference)
                    .map(|(&x, &y)| vote(x, y))
                    .sum::<i64>()
                    > 0
            });
            if beaten {
                return None;
            }
            if let Some(n) = outvoting(self.m, &reference) {
                self.rivals.push(n);
                return None;
            }
            return Some(
                self.chosen_by
                    .iter()
                    .flatten()
                    .map(|&e| (self.m.edges[e].applicant, self.m.edges[e].post))
                    .collect(),
            );
        }
        for idx in 0..self.m.by_applicant[a].len() {
            let e = self.m.by_applicant[a][idx];
            if self.m.addable(&self.used, e) {
                self.m.add(&mut self.used, e);
                self.chosen_by[a] = Some(e);
                let found = self.search(a + 1);
                self.chosen_by[a] = None;
                self.m.remove(&mut self.used, e);
                if found.is_some() {
                    return found;
                }
            }
        }
        self.search(a + 1)
    }
}

/// Searches every feasible matching for a popular one. Returns the first
/// found in a fixed order (applicants in order, each trying its posts best
/// first and then staying unmatched).
pub fn oracle_popular(inst: &Instance, cap: usize) -> Result<Option<Matching>> {
    inst.require_many_to_one()?;
    let model = Model::new(inst, cap)?;
    Ok(Candidates::new(&model).search(0))
}
