//! Seeded random instances with laminar classes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Instance, RawInstance};

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub applicants: usize,
    pub posts: usize,
    pub max_rank: usize,
    /// Chance that a post joins the previous post's rank group.
    pub tie_prob: f64,
    /// Nesting depth of generated classes below the root.
    pub depth: usize,
    /// Chance that a node of a class tree is split into classes.
    pub class_prob: f64,
    pub max_quota: u32,
    /// Upper bound on the number of edges; every applicant gets at least one.
    pub max_edges: usize,
    /// Unit applicant quotas and no applicant classes.
    pub many_to_one: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            applicants: 5,
            posts: 4,
            max_rank: 3,
            tie_prob: 0.25,
            depth: 2,
            class_prob: 0.6,
            max_quota: 2,
            max_edges: 12,
            many_to_one: false,
        }
    }
}

fn quota(rng: &mut ChaCha8Rng, max: u32) -> i64 {
    rng.gen_range(1..=max.max(1)) as i64
}

/// Appends random nested classes over `members` to `raw` for `owner`.
fn laminar_classes(
    rng: &mut ChaCha8Rng,
    raw: &mut RawInstance,
    owner: &str,
    members: &[String],
    depth: usize,
    p: &GenParams,
) {
    if depth == 0 || members.len() < 2 || !rng.gen_bool(p.class_prob) {
        return;
    }
    let mut pool = members.to_vec();
    pool.shuffle(rng);
    let parts = rng.gen_range(1..=pool.len().min(3));
    let mut cuts: Vec<usize> = (1..pool.len()).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort_unstable();
    let mut start = 0;
    for end in cuts.into_iter().chain(std::iter::once(pool.len())) {
        let chunk = &pool[start..end];
        start = end;
        // a chunk equal to the whole set would only duplicate its parent
        if chunk.len() == members.len() || rng.gen_bool(0.3) {
            laminar_classes(rng, raw, owner, chunk, depth - 1, p);
            continue;
        }
        let mut sorted = chunk.to_vec();
        sorted.sort();
        raw.class(owner, quota(rng, p.max_quota), &sorted);
        laminar_classes(rng, raw, owner, chunk, depth - 1, p);
    }
}

pub fn generate_raw(seed: u64, p: &GenParams) -> RawInstance {
    assert!(p.applicants > 0 && p.posts > 0 && p.max_rank > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a_names: Vec<String> = (1..=p.applicants).map(|i| format!("a{i}")).collect();
    let p_names: Vec<String> = (1..=p.posts).map(|i| format!("p{i}")).collect();

    // neighbor sets: one post each, then extra edges up to the budget
    let mut lists: Vec<Vec<usize>> = (0..p.applicants)
        .map(|_| vec![rng.gen_range(0..p.posts)])
        .collect();
    let budget = p.max_edges.max(p.applicants).min(p.applicants * p.posts);
    let target = rng.gen_range(p.applicants..=budget);
    let mut edges = p.applicants;
    while edges < target {
        let a = rng.gen_range(0..p.applicants);
        let post = rng.gen_range(0..p.posts);
        if !lists[a].contains(&post) {
            lists[a].push(post);
            edges += 1;
        }
    }

    let mut raw = RawInstance::new();
    for name in &a_names {
        let q = if p.many_to_one {
            1
        } else {
            quota(&mut rng, p.max_quota)
        };
        raw.applicant(name.clone(), q);
    }
    for name in &p_names {
        raw.post(name.clone(), quota(&mut rng, p.max_quota));
    }
    for (a, list) in lists.iter_mut().enumerate() {
        list.shuffle(&mut rng);
        let mut groups: Vec<Vec<String>> = Vec::new();
        for &post in list.iter() {
            let join =
                !groups.is_empty() && (groups.len() == p.max_rank || rng.gen_bool(p.tie_prob));
            if join {
                groups.last_mut().unwrap().push(p_names[post].clone());
            } else {
                groups.push(vec![p_names[post].clone()]);
            }
        }
        let slices: Vec<&[String]> = groups.iter().map(Vec::as_slice).collect();
        raw.pref(&a_names[a], &slices);
    }
    if !p.many_to_one {
        for (a, list) in lists.iter().enumerate() {
            let members: Vec<String> = list.iter().map(|&x| p_names[x].clone()).collect();
            laminar_classes(&mut rng, &mut raw, &a_names[a], &members, p.depth, p);
        }
    }
    for (post, name) in p_names.iter().enumerate() {
        let members: Vec<String> = (0..p.applicants)
            .filter(|&a| lists[a].contains(&post))
            .map(|a| a_names[a].clone())
            .collect();
        laminar_classes(&mut rng, &mut raw, name, &members, p.depth, p);
    }
    raw
}

/// A valid instance with laminar classes, fully determined by `seed` and
/// the parameters.
pub fn generate(seed: u64, p: &GenParams) -> Instance {
    generate_raw(seed, p)
        .build()
        .expect("generated instances are valid")
}
