//! Laminar classifications and their tree representation.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::{Instance, Vertex};

/// How two sorted member lists relate.
fn nested_or_disjoint(x: &[usize], y: &[usize]) -> bool {
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    common == 0 || common == x.len() || common == y.len()
}

/// True iff every pair of sets is nested or disjoint. Each set must be
/// sorted.
pub fn is_laminar<S: AsRef<[usize]>>(sets: &[S]) -> bool {
    sets.iter().enumerate().all(|(i, x)| {
        sets[i + 1..]
            .iter()
            .all(|y| nested_or_disjoint(x.as_ref(), y.as_ref()))
    })
}

/// Laminarity of the user-supplied classes of one vertex.
pub fn vertex_is_laminar(inst: &Instance, v: Vertex) -> bool {
    let sets: Vec<&[usize]> = inst.classes_of(v).map(|c| c.members.as_slice()).collect();
    is_laminar(&sets)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    /// Sorted member indices (opposite side of the owner).
    pub members: Vec<usize>,
    pub quota: u32,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// For a leaf, the single neighbor it stands for.
    pub leaf: Option<usize>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.leaf.is_some()
    }
}

/// The classification of one vertex after preprocessing: a root holding
/// every neighbor with the vertex quota, the user classes, and one
/// singleton leaf of quota 1 per neighbor. Nodes are stored in preorder,
/// so index 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationTree {
    pub owner: Vertex,
    nodes: Vec<TreeNode>,
}

impl ClassificationTree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn leaf_of(&self, neighbor: usize) -> Option<usize> {
        self.nodes.iter().position(|n| n.leaf == Some(neighbor))
    }

    /// Node indices from `node` up to the root, inclusive.
    pub fn path_to_root(&self, node: usize) -> Vec<usize> {
        let mut path = vec![node];
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path
    }
}

/// Builds the classification tree of `u`.
///
/// Classes with identical member sets (including a class equal to the whole
/// neighborhood) are merged into one node with the smallest quota. Leaves
/// are always separate nodes, even below a singleton class or a root with a
/// single neighbor.
pub fn build_tree(inst: &Instance, u: Vertex) -> Result<ClassificationTree> {
    if !vertex_is_laminar(inst, u) {
        return Err(Error::NonLaminar {
            vertex: inst.name(u).to_string(),
        });
    }
    let neighbors = inst.neighbor_indices(u);
    let mut position = BTreeMap::new();
    for (i, &w) in neighbors.iter().enumerate() {
        position.insert(w, i);
    }

    let mut root_members = neighbors.clone();
    root_members.sort_unstable();
    let mut internal: BTreeMap<Vec<usize>, u32> = BTreeMap::new();
    internal.insert(root_members.clone(), inst.quota(u));
    for class in inst.classes_of(u) {
        let q = internal.entry(class.members.clone()).or_insert(class.quota);
        *q = (*q).min(class.quota);
    }

    // Internal classes, largest first; the root is strictly the largest.
    let mut sets: Vec<(Vec<usize>, u32)> = internal.into_iter().collect();
    sets.sort_by_key(|(set, _)| std::cmp::Reverse(set.len()));
    let contains =
        |big: &[usize], small: &[usize]| small.iter().all(|x| big.binary_search(x).is_ok());
    let smallest_container = |members: &[usize], candidates: &[(Vec<usize>, u32)]| -> usize {
        candidates
            .iter()
            .enumerate()
            .filter(|(_, (set, _))| set.len() > members.len() && contains(set, members))
            .min_by_key(|(_, (set, _))| set.len())
            .map(|(i, _)| i)
            .expect("root contains every class")
    };

    // Flat node list before reordering: internal nodes then leaves.
    let mut flat: Vec<TreeNode> = Vec::new();
    for (i, (members, quota)) in sets.iter().enumerate() {
        let parent = (i > 0).then(|| smallest_container(members, &sets));
        flat.push(TreeNode {
            members: members.clone(),
            quota: *quota,
            parent,
            children: Vec::new(),
            leaf: None,
        });
    }
    for &w in &neighbors {
        let parent = sets
            .iter()
            .enumerate()
            .filter(|(_, (set, _))| set.binary_search(&w).is_ok())
            .min_by_key(|(_, (set, _))| set.len())
            .map(|(i, _)| i)
            .expect("root contains every neighbor");
        flat.push(TreeNode {
            members: vec![w],
            quota: 1,
            parent: Some(parent),
            children: Vec::new(),
            leaf: Some(w),
        });
    }
    let first_pos = |n: &TreeNode| n.members.iter().map(|w| position[w]).min().unwrap_or(0);
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); flat.len()];
    for (i, node) in flat.iter().enumerate() {
        if let Some(p) = node.parent {
            children[p].push(i);
        }
    }
    for list in &mut children {
        list.sort_by_key(|&c| (first_pos(&flat[c]), flat[c].is_leaf()));
    }

    // Preorder renumbering.
    let mut order = Vec::with_capacity(flat.len());
    let mut stack = vec![0usize];
    while let Some(n) = stack.pop() {
        order.push(n);
        for &c in children[n].iter().rev() {
            stack.push(c);
        }
    }
    let mut new_index = vec![0usize; flat.len()];
    for (new, &old) in order.iter().enumerate() {
        new_index[old] = new;
    }
    let nodes = order
        .iter()
        .map(|&old| {
            let n = &flat[old];
            TreeNode {
                members: n.members.clone(),
                quota: n.quota,
                parent: n.parent.map(|p| new_index[p]),
                children: children[old].iter().map(|&c| new_index[c]).collect(),
                leaf: n.leaf,
            }
        })
        .collect();
    Ok(ClassificationTree { owner: u, nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{PostId, RawInstance, SAMPLE};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn laminar_examples() {
        assert!(is_laminar(&[vec![1, 2, 3], vec![4]]));
        assert!(is_laminar::<Vec<usize>>(&[]));
        assert!(is_laminar(&[vec![7, 8]]));
        // {a_ij, a_i'j, a_i''j} against {a_ij, b_ij}
        assert!(!is_laminar(&[vec![0, 2, 4], vec![0, 1]]));
        assert!(is_laminar(&[vec![0, 1, 2], vec![0, 1], vec![2]]));
    }

    #[test]
    fn sample_post_tree() {
        let inst = Instance::parse(SAMPLE).unwrap();
        let t = build_tree(&inst, Vertex::Post(PostId(0))).unwrap();
        // root, C1 with three leaves, C2 with one leaf
        assert_eq!(t.len(), 7);
        let root = t.root();
        assert_eq!(root.quota, 2);
        assert_eq!(root.members, vec![0, 1, 2, 3]);
        assert_eq!(root.children.len(), 2);
        let c1 = &t.nodes()[root.children[0]];
        assert_eq!(c1.members, vec![0, 1, 2]);
        assert_eq!(c1.quota, 1);
        assert_eq!(c1.children.len(), 3);
        assert!(c1.children.iter().all(|&c| t.nodes()[c].is_leaf()));
        let c2 = &t.nodes()[root.children[1]];
        assert_eq!(c2.members, vec![3]);
        assert_eq!(c2.quota, 1);
        assert_eq!(c2.children.len(), 1);
        assert_eq!(t.nodes()[c2.children[0]].leaf, Some(3));
    }

    #[test]
    fn plain_vertex_has_root_and_leaves() {
        let inst = Instance::parse(SAMPLE).unwrap();
        let t = build_tree(&inst, Vertex::Post(PostId(1))).unwrap();
        // p2 is ranked by a3 and a5
        assert_eq!(t.len(), 3);
        assert_eq!(t.root().children.len(), 2);
        assert_eq!(t.root().quota, 1);
    }

    #[test]
    fn class_equal_to_neighborhood_merges_into_root() {
        let mut raw = RawInstance::new();
        raw.applicant("a1", 1)
            .applicant("a2", 1)
            .applicant("a3", 1)
            .post("p", 3)
            .pref("a1", &[&["p"][..]])
            .pref("a2", &[&["p"][..]])
            .pref("a3", &[&["p"][..]])
            .class("p", 2, &["a1", "a2", "a3"]);
        let inst = raw.build().unwrap();
        let t = build_tree(&inst, Vertex::Post(PostId(0))).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.root().quota, 2);
    }

    #[test]
    fn single_neighbor_keeps_root_and_leaf_apart() {
        let mut raw = RawInstance::new();
        raw.applicant("a", 1).post("p", 1).pref("a", &[&["p"][..]]);
        let inst = raw.build().unwrap();
        let t = build_tree(&inst, Vertex::Post(PostId(0))).unwrap();
        assert_eq!(t.len(), 2);
        assert!(!t.root().is_leaf());
        assert!(t.nodes()[1].is_leaf());
    }

    #[test]
    fn rejects_overlapping_classes() {
        let text = format!("{SAMPLE}class p1 quota=1 : a3 a4\n");
        let inst = Instance::parse(&text).unwrap();
        assert!(matches!(
            build_tree(&inst, Vertex::Post(PostId(0))),
            Err(Error::NonLaminar { .. })
        ));
    }

    fn set_strategy() -> impl Strategy<Value = Vec<usize>> {
        proptest::collection::btree_set(0usize..8, 0..6).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #[test]
        fn laminarity_is_symmetric(x in set_strategy(), y in set_strategy()) {
            prop_assert_eq!(is_laminar(&[x.clone(), y.clone()]), is_laminar(&[y.clone(), x.clone()]));
            let xs: BTreeSet<_> = x.iter().collect();
            if y.iter().all(|e| !xs.contains(e)) {
                prop_assert!(is_laminar(&[x, y]));
            }
        }
    }
}
