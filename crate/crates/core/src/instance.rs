//! Problem instances: applicants with preference lists, posts, quotas and
//! classifications.
//!
//! Instances are read from a line-oriented text format into a
//! [`RawInstance`] that still refers to vertices by name. [`validate`]
//! reports every problem with a raw instance, and [`RawInstance::build`]
//! resolves names into the indexed, immutable [`Instance`] used by the
//! solvers.
//!
//! ```text
//! # comment
//! applicant a1 quota=1
//! post p1 quota=2
//! pref a1 : p1 ; p2 p3     # p2 and p3 are tied at rank 2
//! class p1 quota=1 : a1 a2
//! ```

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ApplicantId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PostId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Applicant,
    Post,
}

/// A vertex of the bipartite graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Applicant(ApplicantId),
    Post(PostId),
}

impl Vertex {
    pub fn side(self) -> Side {
        match self {
            Vertex::Applicant(_) => Side::Applicant,
            Vertex::Post(_) => Side::Post,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Vertex::Applicant(ApplicantId(i)) | Vertex::Post(PostId(i)) => i,
        }
    }
}

/// A class of one vertex: a subset of its neighbors with an upper quota.
///
/// `members` holds indices on the side opposite to `owner`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Class {
    pub owner: Vertex,
    pub members: Vec<usize>,
    pub quota: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub applicant: ApplicantId,
    pub post: PostId,
    /// 1-based position of the post's group in the applicant's list.
    pub rank: usize,
}

// ---------------------------------------------------------------------------
// Raw (name based) form
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawVertex {
    pub name: String,
    pub quota: i64,
    pub line: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPreferences {
    pub applicant: String,
    pub groups: Vec<Vec<String>>,
    pub line: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawClass {
    pub owner: String,
    pub quota: i64,
    pub members: Vec<String>,
    pub line: Option<usize>,
}

/// An instance as written in a file, before name resolution.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawInstance {
    pub applicants: Vec<RawVertex>,
    pub posts: Vec<RawVertex>,
    pub prefs: Vec<RawPreferences>,
    pub classes: Vec<RawClass>,
}

impl RawInstance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn applicant(&mut self, name: impl Into<String>, quota: i64) -> &mut Self {
        self.applicants.push(RawVertex {
            name: name.into(),
            quota,
            line: None,
        });
        self
    }

    pub fn post(&mut self, name: impl Into<String>, quota: i64) -> &mut Self {
        self.posts.push(RawVertex {
            name: name.into(),
            quota,
            line: None,
        });
        self
    }

    /// Adds a preference list; each inner slice is one rank group.
    pub fn pref<S: AsRef<str>>(&mut self, applicant: &str, groups: &[&[S]]) -> &mut Self {
        self.prefs.push(RawPreferences {
            applicant: applicant.to_string(),
            groups: groups
                .iter()
                .map(|g| g.iter().map(|s| s.as_ref().to_string()).collect())
                .collect(),
            line: None,
        });
        self
    }

    pub fn class<S: AsRef<str>>(&mut self, owner: &str, quota: i64, members: &[S]) -> &mut Self {
        self.classes.push(RawClass {
            owner: owner.to_string(),
            quota,
            members: members.iter().map(|s| s.as_ref().to_string()).collect(),
            line: None,
        });
        self
    }

    pub fn build(&self) -> Result<Instance> {
        let diags = validate(self);
        if !diags.is_empty() {
            return Err(Error::Invalid(diags));
        }
        Ok(Instance::resolve(self))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.applicants {
            out.push_str(&format!("applicant {} quota={}\n", v.name, v.quota));
        }
        for v in &self.posts {
            out.push_str(&format!("post {} quota={}\n", v.name, v.quota));
        }
        for p in &self.prefs {
            let groups: Vec<String> = p.groups.iter().map(|g| g.join(" ")).collect();
            out.push_str(&format!("pref {} : {}\n", p.applicant, groups.join(" ; ")));
        }
        for c in &self.classes {
            out.push_str(&format!(
                "class {} quota={} : {}\n",
                c.owner,
                c.quota,
                c.members.join(" ")
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '#' | '(' | ')' | ';' | ':'))
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_quota(token: &str, line: usize) -> Result<i64> {
    let value = token
        .strip_prefix("quota=")
        .ok_or_else(|| parse_err(line, format!("expected `quota=<int>`, found `{token}`")))?;
    value
        .parse::<i64>()
        .map_err(|_| parse_err(line, format!("quota `{value}` is not an integer")))
}

/// Parses the instance text format. Only syntax is checked here; see
/// [`validate`] for semantic checks.
pub fn parse_instance(text: &str) -> Result<RawInstance> {
    let mut raw = RawInstance::new();
    for (idx, full_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match full_line.find('#') {
            Some(pos) => &full_line[..pos],
            None => full_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match keyword {
            "applicant" | "post" => {
                let tokens: Vec<&str> = rest.split_whitespace().collect();
                let (name, quota) = match tokens.as_slice() {
                    [name] => (*name, 1),
                    [name, q] => (*name, parse_quota(q, line_no)?),
                    _ => {
                        return Err(parse_err(
                            line_no,
                            format!("expected `{keyword} <name> quota=<int>`"),
                        ))
                    }
                };
                if !is_valid_name(name) {
                    return Err(parse_err(line_no, format!("invalid name `{name}`")));
                }
                let v = RawVertex {
                    name: name.to_string(),
                    quota,
                    line: Some(line_no),
                };
                if keyword == "applicant" {
                    raw.applicants.push(v);
                } else {
                    raw.posts.push(v);
                }
            }
            "pref" => {
                let (head, body) = rest
                    .split_once(':')
                    .ok_or_else(|| parse_err(line_no, "expected `pref <applicant> : <groups>`"))?;
                let head: Vec<&str> = head.split_whitespace().collect();
                let [applicant] = head.as_slice() else {
                    return Err(parse_err(
                        line_no,
                        "expected exactly one applicant before `:`",
                    ));
                };
                let mut groups = Vec::new();
                if !body.trim().is_empty() {
                    for group in body.split(';') {
                        let names: Vec<String> =
                            group.split_whitespace().map(str::to_string).collect();
                        if names.is_empty() {
                            return Err(parse_err(line_no, "empty rank group"));
                        }
                        if let Some(bad) = names.iter().find(|n| !is_valid_name(n)) {
                            return Err(parse_err(line_no, format!("invalid name `{bad}`")));
                        }
                        groups.push(names);
                    }
                }
                raw.prefs.push(RawPreferences {
                    applicant: applicant.to_string(),
                    groups,
                    line: Some(line_no),
                });
            }
            "class" => {
                let (head, body) = rest.split_once(':').ok_or_else(|| {
                    parse_err(line_no, "expected `class <vertex> quota=<int> : <names>`")
                })?;
                let head: Vec<&str> = head.split_whitespace().collect();
                let [owner, quota] = head.as_slice() else {
                    return Err(parse_err(
                        line_no,
                        "expected `class <vertex> quota=<int> : <names>`",
                    ));
                };
                let quota = parse_quota(quota, line_no)?;
                let members: Vec<String> = body.split_whitespace().map(str::to_string).collect();
                if let Some(bad) = members.iter().find(|n| !is_valid_name(n)) {
                    return Err(parse_err(line_no, format!("invalid name `{bad}`")));
                }
                raw.classes.push(RawClass {
                    owner: owner.to_string(),
                    quota,
                    members,
                    line: Some(line_no),
                });
            }
            other => return Err(parse_err(line_no, format!("unknown directive `{other}`"))),
        }
    }
    Ok(raw)
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticKind {
    InvalidName { name: String },
    DuplicateName { name: String },
    NameOnBothSides { name: String },
    NonPositiveQuota { what: String, quota: i64 },
    UnknownApplicant { name: String },
    UnknownPost { name: String, applicant: String },
    DuplicatePreferenceList { applicant: String },
    DuplicateRank { applicant: String, post: String },
    EmptyPreferenceList { applicant: String },
    UnknownVertex { name: String },
    ClassMemberNotNeighbor { owner: String, member: String },
    EmptyClass { owner: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub kind: DiagnosticKind,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DiagnosticKind::*;
        match self {
            InvalidName { name } => write!(f, "invalid name `{name}`"),
            DuplicateName { name } => write!(f, "duplicate vertex name `{name}`"),
            NameOnBothSides { name } => {
                write!(f, "`{name}` is used both as an applicant and as a post")
            }
            NonPositiveQuota { what, quota } => {
                write!(f, "quota must be positive: {what} has quota {quota}")
            }
            UnknownApplicant { name } => write!(f, "unknown applicant `{name}`"),
            UnknownPost { name, applicant } => {
                write!(
                    f,
                    "unknown post `{name}` in preference list of `{applicant}`"
                )
            }
            DuplicatePreferenceList { applicant } => {
                write!(f, "more than one preference list for `{applicant}`")
            }
            DuplicateRank { applicant, post } => {
                write!(
                    f,
                    "`{post}` appears more than once in the list of `{applicant}`"
                )
            }
            EmptyPreferenceList { applicant } => {
                write!(f, "empty preference list for `{applicant}`")
            }
            UnknownVertex { name } => write!(f, "class owner `{name}` is not a vertex"),
            ClassMemberNotNeighbor { owner, member } => write!(
                f,
                "class member not a neighbor: `{member}` in a class of `{owner}`"
            ),
            EmptyClass { owner } => write!(f, "empty class for `{owner}`"),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

/// Reports every semantic problem of a raw instance. An empty result means
/// [`RawInstance::build`] will succeed.
pub fn validate(raw: &RawInstance) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut push =
        |line: Option<usize>, kind: DiagnosticKind| diags.push(Diagnostic { line, kind });

    let mut applicant_names: HashSet<&str> = HashSet::new();
    let mut post_names: HashSet<&str> = HashSet::new();
    for (side, list, names) in [
        ("applicant", &raw.applicants, &mut applicant_names),
        ("post", &raw.posts, &mut post_names),
    ] {
        for v in list {
            if !is_valid_name(&v.name) {
                push(
                    v.line,
                    DiagnosticKind::InvalidName {
                        name: v.name.clone(),
                    },
                );
            }
            if !names.insert(v.name.as_str()) {
                push(
                    v.line,
                    DiagnosticKind::DuplicateName {
                        name: v.name.clone(),
                    },
                );
            }
            if v.quota <= 0 {
                push(
                    v.line,
                    DiagnosticKind::NonPositiveQuota {
                        what: format!("{side} `{}`", v.name),
                        quota: v.quota,
                    },
                );
            }
        }
    }
    for v in &raw.posts {
        if applicant_names.contains(v.name.as_str()) {
            push(
                v.line,
                DiagnosticKind::NameOnBothSides {
                    name: v.name.clone(),
                },
            );
        }
    }

    // neighbor sets induced by the preference lists
    let mut neighbors: HashMap<&str, HashSet<&str>> = HashMap::new();
    let mut seen_pref: HashSet<&str> = HashSet::new();
    for pref in &raw.prefs {
        let a = pref.applicant.as_str();
        if !applicant_names.contains(a) {
            push(
                pref.line,
                DiagnosticKind::UnknownApplicant {
                    name: a.to_string(),
                },
            );
            continue;
        }
        if !seen_pref.insert(a) {
            push(
                pref.line,
                DiagnosticKind::DuplicatePreferenceList {
                    applicant: a.to_string(),
                },
            );
            continue;
        }
        let mut listed: HashSet<&str> = HashSet::new();
        for p in pref.groups.iter().flatten() {
            if !post_names.contains(p.as_str()) {
                push(
                    pref.line,
                    DiagnosticKind::UnknownPost {
                        name: p.clone(),
                        applicant: a.to_string(),
                    },
                );
                continue;
            }
            if !listed.insert(p.as_str()) {
                push(
                    pref.line,
                    DiagnosticKind::DuplicateRank {
                        applicant: a.to_string(),
                        post: p.clone(),
                    },
                );
                continue;
            }
            neighbors.entry(a).or_default().insert(p.as_str());
            neighbors.entry(p.as_str()).or_default().insert(a);
        }
    }
    for v in &raw.applicants {
        let has_list = raw
            .prefs
            .iter()
            .any(|p| p.applicant == v.name && !p.groups.is_empty());
        if !has_list {
            push(
                v.line,
                DiagnosticKind::EmptyPreferenceList {
                    applicant: v.name.clone(),
                },
            );
        }
    }

    for class in &raw.classes {
        let owner = class.owner.as_str();
        if !applicant_names.contains(owner) && !post_names.contains(owner) {
            push(
                class.line,
                DiagnosticKind::UnknownVertex {
                    name: owner.to_string(),
                },
            );
            continue;
        }
        if class.quota <= 0 {
            push(
                class.line,
                DiagnosticKind::NonPositiveQuota {
                    what: format!("a class of `{owner}`"),
                    quota: class.quota,
                },
            );
        }
        if class.members.is_empty() {
            push(
                class.line,
                DiagnosticKind::EmptyClass {
                    owner: owner.to_string(),
                },
            );
        }
        let nbrs = neighbors.get(owner);
        for m in &class.members {
            if !nbrs.is_some_and(|n| n.contains(m.as_str())) {
                push(
                    class.line,
                    DiagnosticKind::ClassMemberNotNeighbor {
                        owner: owner.to_string(),
                        member: m.clone(),
                    },
                );
            }
        }
    }
    diags
}

// ---------------------------------------------------------------------------
// Resolved instance
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
struct Agent {
    name: String,
    quota: u32,
}

/// A validated instance. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    applicants: Vec<Agent>,
    posts: Vec<Agent>,
    prefs: Vec<Vec<Vec<PostId>>>,
    classes: Vec<Class>,
    edges: Vec<Edge>,
    ranks: HashMap<(ApplicantId, PostId), usize>,
    applicant_neighbors: Vec<Vec<PostId>>,
    post_neighbors: Vec<Vec<ApplicantId>>,
    max_rank: usize,
}

impl Instance {
    pub fn parse(text: &str) -> Result<Instance> {
        parse_instance(text)?.build()
    }

    fn resolve(raw: &RawInstance) -> Instance {
        let agent = |v: &RawVertex| Agent {
            name: v.name.clone(),
            quota: v.quota as u32,
        };
        let applicants: Vec<Agent> = raw.applicants.iter().map(agent).collect();
        let posts: Vec<Agent> = raw.posts.iter().map(agent).collect();
        let a_index: HashMap<&str, usize> = raw
            .applicants
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.as_str(), i))
            .collect();
        let p_index: HashMap<&str, usize> = raw
            .posts
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.as_str(), i))
            .collect();

        let mut prefs = vec![Vec::new(); applicants.len()];
        for pref in &raw.prefs {
            let a = a_index[pref.applicant.as_str()];
            prefs[a] = pref
                .groups
                .iter()
                .map(|g| g.iter().map(|p| PostId(p_index[p.as_str()])).collect())
                .collect();
        }

        let mut edges = Vec::new();
        let mut ranks = HashMap::new();
        let mut applicant_neighbors = vec![Vec::new(); applicants.len()];
        let mut post_neighbors = vec![Vec::new(); posts.len()];
        let mut max_rank = 0;
        for (a, groups) in prefs.iter().enumerate() {
            for (g, group) in groups.iter().enumerate() {
                let rank = g + 1;
                max_rank = max_rank.max(rank);
                for &p in group {
                    let applicant = ApplicantId(a);
                    edges.push(Edge {
                        applicant,
                        post: p,
                        rank,
                    });
                    ranks.insert((applicant, p), rank);
                    applicant_neighbors[a].push(p);
                    post_neighbors[p.0].push(applicant);
                }
            }
        }

        let classes = raw
            .classes
            .iter()
            .map(|c| {
                let (owner, lookup) = match a_index.get(c.owner.as_str()) {
                    Some(&i) => (Vertex::Applicant(ApplicantId(i)), &p_index),
                    None => (Vertex::Post(PostId(p_index[c.owner.as_str()])), &a_index),
                };
                let members: BTreeSet<usize> =
                    c.members.iter().map(|m| lookup[m.as_str()]).collect();
                Class {
                    owner,
                    members: members.into_iter().collect(),
                    quota: c.quota as u32,
                }
            })
            .collect();

        Instance {
            applicants,
            posts,
            prefs,
            classes,
            edges,
            ranks,
            applicant_neighbors,
            post_neighbors,
            max_rank,
        }
    }

    pub fn applicant_count(&self) -> usize {
        self.applicants.len()
    }

    pub fn post_count(&self) -> usize {
        self.posts.len()
    }

    pub fn applicants(&self) -> impl Iterator<Item = ApplicantId> {
        (0..self.applicants.len()).map(ApplicantId)
    }

    pub fn posts(&self) -> impl Iterator<Item = PostId> {
        (0..self.posts.len()).map(PostId)
    }

    pub fn applicant_name(&self, a: ApplicantId) -> &str {
        &self.applicants[a.0].name
    }

    pub fn post_name(&self, p: PostId) -> &str {
        &self.posts[p.0].name
    }

    pub fn name(&self, v: Vertex) -> &str {
        match v {
            Vertex::Applicant(a) => self.applicant_name(a),
            Vertex::Post(p) => self.post_name(p),
        }
    }

    pub fn applicant_quota(&self, a: ApplicantId) -> u32 {
        self.applicants[a.0].quota
    }

    pub fn post_quota(&self, p: PostId) -> u32 {
        self.posts[p.0].quota
    }

    pub fn quota(&self, v: Vertex) -> u32 {
        match v {
            Vertex::Applicant(a) => self.applicant_quota(a),
            Vertex::Post(p) => self.post_quota(p),
        }
    }

    pub fn find_applicant(&self, name: &str) -> Option<ApplicantId> {
        self.applicants
            .iter()
            .position(|v| v.name == name)
            .map(ApplicantId)
    }

    pub fn find_post(&self, name: &str) -> Option<PostId> {
        self.posts.iter().position(|v| v.name == name).map(PostId)
    }

    pub fn find_vertex(&self, name: &str) -> Option<Vertex> {
        self.find_applicant(name)
            .map(Vertex::Applicant)
            .or_else(|| self.find_post(name).map(Vertex::Post))
    }

    /// Rank groups of `a`, best first.
    pub fn preferences(&self, a: ApplicantId) -> &[Vec<PostId>] {
        &self.prefs[a.0]
    }

    pub fn rank(&self, a: ApplicantId, p: PostId) -> Option<usize> {
        self.ranks.get(&(a, p)).copied()
    }

    /// Largest rank used by any applicant.
    pub fn max_rank(&self) -> usize {
        self.max_rank
    }

    /// All edges, grouped by applicant and ordered by rank within each list.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn classes(&self) -> &[Class] {
        &self.classes
    }

    pub fn classes_of(&self, v: Vertex) -> impl Iterator<Item = &Class> {
        self.classes.iter().filter(move |c| c.owner == v)
    }

    pub fn applicant_neighbors(&self, a: ApplicantId) -> &[PostId] {
        &self.applicant_neighbors[a.0]
    }

    pub fn post_neighbors(&self, p: PostId) -> &[ApplicantId] {
        &self.post_neighbors[p.0]
    }

    /// Neighbors of `v` as indices on the opposite side.
    pub fn neighbor_indices(&self, v: Vertex) -> Vec<usize> {
        match v {
            Vertex::Applicant(a) => self.applicant_neighbors(a).iter().map(|p| p.0).collect(),
            Vertex::Post(p) => self.post_neighbors(p).iter().map(|a| a.0).collect(),
        }
    }

    /// Name of the vertex with index `i` on the side opposite to `owner`.
    pub fn partner_name(&self, owner: Vertex, i: usize) -> &str {
        match owner {
            Vertex::Applicant(_) => self.post_name(PostId(i)),
            Vertex::Post(_) => self.applicant_name(ApplicantId(i)),
        }
    }

    /// Fails unless every applicant has quota 1 and no applicant has
    /// classes.
    pub fn require_many_to_one(&self) -> Result<()> {
        if let Some(a) = self.applicants().find(|&a| self.applicant_quota(a) != 1) {
            return Err(Error::NotManyToOne {
                reason: format!(
                    "applicant `{}` has quota {}",
                    self.applicant_name(a),
                    self.applicant_quota(a)
                ),
            });
        }
        if let Some(c) = self
            .classes
            .iter()
            .find(|c| c.owner.side() == Side::Applicant)
        {
            return Err(Error::NotManyToOne {
                reason: format!("applicant `{}` has classes", self.name(c.owner)),
            });
        }
        Ok(())
    }

    pub fn is_many_to_one(&self) -> bool {
        self.applicants.iter().all(|a| a.quota == 1)
            && self
                .classes
                .iter()
                .all(|c| matches!(c.owner, Vertex::Post(_)))
    }

    pub fn to_raw(&self) -> RawInstance {
        let vertex = |a: &Agent| RawVertex {
            name: a.name.clone(),
            quota: a.quota as i64,
            line: None,
        };
        RawInstance {
            applicants: self.applicants.iter().map(vertex).collect(),
            posts: self.posts.iter().map(vertex).collect(),
            prefs: self
                .applicants()
                .map(|a| RawPreferences {
                    applicant: self.applicant_name(a).to_string(),
                    groups: self
                        .preferences(a)
                        .iter()
                        .map(|g| g.iter().map(|&p| self.post_name(p).to_string()).collect())
                        .collect(),
                    line: None,
                })
                .collect(),
            classes: self
                .classes
                .iter()
                .map(|c| RawClass {
                    owner: self.name(c.owner).to_string(),
                    quota: c.quota as i64,
                    members: c
                        .members
                        .iter()
                        .map(|&m| self.partner_name(c.owner, m).to_string())
                        .collect(),
                    line: None,
                })
                .collect(),
        }
    }

    pub fn to_text(&self) -> String {
        self.to_raw().to_text()
    }
}

/// Small worked example: five applicants, five posts, and a laminar
/// classification on `p1` that rules out giving `p1` to both `a1` and `a2`.
pub const SAMPLE: &str = "\
applicant a1 quota=1
applicant a2 quota=1
applicant a3 quota=1
applicant a4 quota=1
applicant a5 quota=1
post p1 quota=2
post p2 quota=1
post p3 quota=1
post p4 quota=1
post p5 quota=1
pref a1 : p1 ; p4
pref a2 : p1 ; p5
pref a3 : p1 p2 p3
pref a4 : p5 ; p1
pref a5 : p5 ; p2
class p1 quota=1 : a1 a2 a3
class p1 quota=1 : a4
";

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(raw: &RawInstance) -> Vec<DiagnosticKind> {
        validate(raw).into_iter().map(|d| d.kind).collect()
    }

    #[test]
    fn sample_is_valid() {
        let raw = parse_instance(SAMPLE).unwrap();
        assert!(validate(&raw).is_empty());
        let inst = raw.build().unwrap();
        assert_eq!(inst.applicant_count(), 5);
        assert_eq!(inst.post_count(), 5);
        assert_eq!(inst.max_rank(), 2);
        assert_eq!(inst.edges().len(), 11);
        let a3 = inst.find_applicant("a3").unwrap();
        assert_eq!(inst.preferences(a3).len(), 1);
        assert_eq!(inst.preferences(a3)[0].len(), 3);
        let p4 = inst.find_post("p4").unwrap();
        assert_eq!(inst.rank(ApplicantId(0), p4), Some(2));
    }

    #[test]
    fn class_with_post_member_is_rejected() {
        let text = SAMPLE.replace("class p1 quota=1 : a4", "class p1 quota=1 : p2");
        let raw = parse_instance(&text).unwrap();
        let diags = validate(&raw);
        assert_eq!(diags.len(), 1);
        assert!(matches!(
            &diags[0].kind,
            DiagnosticKind::ClassMemberNotNeighbor { owner, member } if owner == "p1" && member == "p2"
        ));
        assert!(diags[0].to_string().contains("class member not a neighbor"));
    }

    #[test]
    fn zero_quota_is_rejected() {
        let text = SAMPLE.replace("post p1 quota=2", "post p1 quota=0");
        let diags = validate(&parse_instance(&text).unwrap());
        assert_eq!(diags.len(), 1);
        assert!(diags[0].to_string().contains("quota must be positive"));
        assert_eq!(diags[0].line, Some(6));
    }

    #[test]
    fn reports_every_violation() {
        let mut raw = RawInstance::new();
        raw.applicant("a", 1)
            .applicant("b", 1)
            .applicant("x", -1)
            .post("p", 1)
            .post("a", 1)
            .pref("a", &[&["p", "q"][..], &["p"][..]])
            .pref("ghost", &[&["p"][..]])
            .class("p", 0, &["b"]);
        let kinds = kinds(&raw);
        assert!(kinds.contains(&DiagnosticKind::NameOnBothSides { name: "a".into() }));
        assert!(kinds.contains(&DiagnosticKind::UnknownPost {
            name: "q".into(),
            applicant: "a".into()
        }));
        assert!(kinds.contains(&DiagnosticKind::DuplicateRank {
            applicant: "a".into(),
            post: "p".into()
        }));
        assert!(kinds.contains(&DiagnosticKind::UnknownApplicant {
            name: "ghost".into()
        }));
        assert!(kinds.contains(&DiagnosticKind::EmptyPreferenceList {
            applicant: "b".into()
        }));
        assert!(kinds.contains(&DiagnosticKind::EmptyPreferenceList {
            applicant: "x".into()
        }));
        assert!(kinds.contains(&DiagnosticKind::ClassMemberNotNeighbor {
            owner: "p".into(),
            member: "b".into()
        }));
        assert_eq!(
            kinds
                .iter()
                .filter(|k| matches!(k, DiagnosticKind::NonPositiveQuota { .. }))
                .count(),
            2
        );
    }

    #[test]
    fn duplicate_preference_lists_are_rejected() {
        let text = format!("{SAMPLE}pref a1 : p4\n");
        let kinds = kinds(&parse_instance(&text).unwrap());
        assert_eq!(
            kinds,
            vec![DiagnosticKind::DuplicatePreferenceList {
                applicant: "a1".into()
            }]
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_instance("applicant a\npref a p1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_instance("post p quota=two\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_instance("applicant a\npref a : p ; ; q\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_instance("frobnicate\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn text_round_trip() {
        let inst = Instance::parse(SAMPLE).unwrap();
        let again = Instance::parse(&inst.to_text()).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn many_to_one_detection() {
        let inst = Instance::parse(SAMPLE).unwrap();
        assert!(inst.is_many_to_one());
        let text = format!("{SAMPLE}class a3 quota=1 : p1 p2\n");
        assert!(!Instance::parse(&text).unwrap().is_many_to_one());
    }
}
