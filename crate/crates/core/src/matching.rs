//! Matchings, feasibility, signatures and popularity votes.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{ApplicantId, Instance, PostId, Vertex};

/// A set of applicant-post pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Matching {
    pairs: BTreeSet<(ApplicantId, PostId)>,
}

impl Matching {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a matching, checking that every pair is an edge of `inst`
    /// and that no pair repeats.
    pub fn from_pairs(
        inst: &Instance,
        pairs: impl IntoIterator<Item = (ApplicantId, PostId)>,
    ) -> Result<Matching> {
        let mut m = Matching::new();
        for (a, p) in pairs {
            if inst.rank(a, p).is_none() {
                return Err(Error::InvalidMatching(format!(
                    "({}, {}) is not an edge",
                    inst.applicant_name(a),
                    inst.post_name(p)
                )));
            }
            if !m.pairs.insert((a, p)) {
                return Err(Error::InvalidMatching(format!(
                    "pair ({}, {}) is listed twice",
                    inst.applicant_name(a),
                    inst.post_name(p)
                )));
            }
        }
        Ok(m)
    }

    /// Same as [`Matching::from_pairs`] but with vertex names.
    pub fn from_names<'a>(
        inst: &Instance,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Matching> {
        let resolved = pairs
            .into_iter()
            .map(|(a, p)| {
                let ai = inst
                    .find_applicant(a)
                    .ok_or_else(|| Error::InvalidMatching(format!("unknown applicant `{a}`")))?;
                let pi = inst
                    .find_post(p)
                    .ok_or_else(|| Error::InvalidMatching(format!("unknown post `{p}`")))?;
                Ok((ai, pi))
            })
            .collect::<Result<Vec<_>>>()?;
        Matching::from_pairs(inst, resolved)
    }

    /// Parses the matching file format: one `<applicant> <post>` pair per
    /// line, `#` starting a comment.
    pub fn parse(inst: &Instance, text: &str) -> Result<Matching> {
        let mut pairs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let [a, p] = tokens.as_slice() else {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "expected `<applicant> <post>`".into(),
                });
            };
            pairs.push((*a, *p));
        }
        Matching::from_names(inst, pairs)
    }

    pub(crate) fn insert_unchecked(&mut self, a: ApplicantId, p: PostId) -> bool {
        self.pairs.insert((a, p))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (ApplicantId, PostId)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn contains(&self, a: ApplicantId, p: PostId) -> bool {
        self.pairs.contains(&(a, p))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn posts_of(&self, a: ApplicantId) -> impl Iterator<Item = PostId> + '_ {
        self.pairs
            .range((a, PostId(0))..=(a, PostId(usize::MAX)))
            .map(|&(_, p)| p)
    }

    pub fn applicants_of(&self, p: PostId) -> impl Iterator<Item = ApplicantId> + '_ {
        self.pairs
            .iter()
            .filter(move |&&(_, q)| q == p)
            .map(|&(a, _)| a)
    }

    /// The partners of `v` in this matching, as indices on the other side.
    pub fn partners(&self, v: Vertex) -> Vec<usize> {
        match v {
            Vertex::Applicant(a) => self.posts_of(a).map(|p| p.0).collect(),
            Vertex::Post(p) => self.applicants_of(p).map(|a| a.0).collect(),
        }
    }

    /// The post of `a` in a many-to-one matching.
    pub fn post_of(&self, a: ApplicantId) -> Option<PostId> {
        self.posts_of(a).next()
    }

    pub fn union(&self, other: &Matching) -> Matching {
        Matching {
            pairs: self.pairs.union(&other.pairs).copied().collect(),
        }
    }

    pub fn to_text(&self, inst: &Instance) -> String {
        self.pairs
            .iter()
            .map(|&(a, p)| format!("{} {}\n", inst.applicant_name(a), inst.post_name(p)))
            .collect()
    }
}

impl FromIterator<(ApplicantId, PostId)> for Matching {
    fn from_iter<I: IntoIterator<Item = (ApplicantId, PostId)>>(iter: I) -> Self {
        Matching {
            pairs: iter.into_iter().collect(),
        }
    }
}

/// Number of matched edges per rank, index 0 holding rank 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Signature(pub Vec<u64>);

impl Signature {
    pub fn zero(len: usize) -> Self {
        Signature(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn padded(&self, len: usize) -> Signature {
        let mut counts = self.0.clone();
        if counts.len() < len {
            counts.resize(len, 0);
        }
        Signature(counts)
    }

    /// Parses `(x1, x2, ...)`; the parentheses are optional.
    pub fn parse(text: &str) -> Option<Signature> {
        let inner = text.trim();
        let inner = inner
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .unwrap_or(inner)
            .trim();
        if inner.is_empty() {
            return Some(Signature(Vec::new()));
        }
        inner
            .split(',')
            .map(|t| t.trim().parse::<u64>().ok())
            .collect::<Option<Vec<_>>>()
            .map(Signature)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl PartialOrd for Signature {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Signature {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_signatures(self, other)
    }
}

/// Lexicographic comparison: more rank-1 edges wins, then rank-2, and so on.
/// The shorter vector is treated as padded with zeros.
pub fn compare_signatures(x: &Signature, y: &Signature) -> Ordering {
    let len = x.len().max(y.len());
    (0..len)
        .map(|i| {
            let xi = x.0.get(i).copied().unwrap_or(0);
            let yi = y.0.get(i).copied().unwrap_or(0);
            xi.cmp(&yi)
        })
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

pub fn signature_of(inst: &Instance, m: &Matching) -> Signature {
    let mut counts = vec![0u64; inst.max_rank()];
    for (a, p) in m.pairs() {
        let rank = inst.rank(a, p).expect("matching pair is an edge");
        counts[rank - 1] += 1;
    }
    Signature(counts)
}

/// A quota broken by a matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    VertexQuota {
        vertex: Vertex,
        load: usize,
        quota: u32,
    },
    ClassQuota {
        owner: Vertex,
        members: Vec<usize>,
        load: usize,
        quota: u32,
    },
}

impl Violation {
    pub fn describe(&self, inst: &Instance) -> String {
        match self {
            Violation::VertexQuota {
                vertex,
                load,
                quota,
            } => format!(
                "quota exceeded at {} ({load} > {quota})",
                inst.name(*vertex)
            ),
            Violation::ClassQuota { owner, members, .. } => {
                let names: Vec<&str> = members
                    .iter()
                    .map(|&m| inst.partner_name(*owner, m))
                    .collect();
                format!(
                    "class quota exceeded at {} class {{{}}}",
                    inst.name(*owner),
                    names.join(" ")
                )
            }
        }
    }
}

/// Every vertex and class quota that `m` exceeds. Works for arbitrary,
/// not necessarily laminar, classes.
pub fn violations(inst: &Instance, m: &Matching) -> Vec<Violation> {
    let mut out = Vec::new();
    let vertices = inst
        .applicants()
        .map(Vertex::Applicant)
        .chain(inst.posts().map(Vertex::Post));
    for v in vertices {
        let load = m.partners(v).len();
        if load > inst.quota(v) as usize {
            out.push(Violation::VertexQuota {
                vertex: v,
                load,
                quota: inst.quota(v),
            });
        }
    }
    for class in inst.classes() {
        let partners = m.partners(class.owner);
        let load = partners
            .iter()
            .filter(|x| class.members.binary_search(x).is_ok())
            .count();
        if load > class.quota as usize {
            out.push(Violation::ClassQuota {
                owner: class.owner,
                members: class.members.clone(),
                load,
                quota: class.quota,
            });
        }
    }
    out
}

pub fn is_feasible(inst: &Instance, m: &Matching) -> bool {
    violations(inst, m).is_empty()
}

/// Votes for `m1` minus votes for `m2`. Each applicant compares the ranks of
/// its posts; being matched beats being unmatched.
pub fn more_popular_than(inst: &Instance, m1: &Matching, m2: &Matching) -> Result<i64> {
    if inst.applicants().any(|a| inst.applicant_quota(a) != 1) {
        return Err(Error::ManyToManyUnsupported);
    }
    let mut balance = 0i64;
    for a in inst.applicants() {
        let r1 = m1.post_of(a).and_then(|p| inst.rank(a, p));
        let r2 = m2.post_of(a).and_then(|p| inst.rank(a, p));
        balance += vote(r1, r2);
    }
    Ok(balance)
}

/// +1 if rank `r1` is preferred to `r2`, -1 if the reverse, 0 otherwise.
/// `None` means unmatched.
pub(crate) fn vote(r1: Option<usize>, r2: Option<usize>) -> i64 {
    match (r1, r2) {
        (Some(x), Some(y)) if x < y => 1,
        (Some(x), Some(y)) if x > y => -1,
        (Some(_), None) => 1,
        (None, Some(_)) => -1,
        _ => 0,
    }
}
