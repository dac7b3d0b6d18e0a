//! Rooted ultrametric trees.
//!
//! Leaves are the points of the space. Every internal node carries a positive
//! height, heights never decrease toward the root, and two leaves are at
//! distance `2 * height(lca)`. Trees are stored in an arena; leaves also carry
//! a fixed index order which is the row order of [`tree_to_metric`].

mod dp;
mod newick;

pub use dp::{cross_term_check, solve_ultrametric, CrossTerm, EnergyTable, UltrametricSolution};
pub use newick::parse_newick;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result, Triple};
use crate::metric::{MetricInstance, REL_TOL};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Leaf { label: String },
    Internal { height: f64, children: Vec<NodeId> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct UltrametricTree {
    nodes: Vec<Node>,
    root: NodeId,
    /// Leaf node ids in point-index order.
    leaves: Vec<NodeId>,
}

impl UltrametricTree {
    /// Validates an arena. `leaf_order` fixes the point indices; `None` uses
    /// the left-to-right (depth-first) order of the leaves.
    pub fn from_parts(nodes: Vec<Node>, root: NodeId, leaf_order: Option<Vec<NodeId>>) -> Result<Self> {
        if root >= nodes.len() {
            return invalid(format!("root {root} out of range"));
        }
        let mut parent_seen = vec![false; nodes.len()];
        let mut dfs_leaves = Vec::new();
        let mut stack = vec![root];
        parent_seen[root] = true;
        while let Some(id) = stack.pop() {
            match &nodes[id] {
                Node::Leaf { .. } => dfs_leaves.push(id),
                Node::Internal { height, children } => {
                    if !(height.is_finite() && *height > 0.0) {
                        return invalid(format!("node {id}: height must be positive, got {height}"));
                    }
                    if children.len() < 2 {
                        return invalid(format!("node {id}: internal nodes need at least two children"));
                    }
                    for &c in children.iter().rev() {
                        if c >= nodes.len() {
                            return invalid(format!("node {id}: child {c} out of range"));
                        }
                        if std::mem::replace(&mut parent_seen[c], true) {
                            return invalid(format!("node {c} is reachable twice"));
                        }
                        if let Node::Internal { height: ch, .. } = nodes[c] {
                            if ch > *height {
                                return invalid(format!(
                                    "node {c}: height {ch} exceeds parent height {height}"
                                ));
                            }
                        }
                        stack.push(c);
                    }
                }
            }
        }
        if let Some(orphan) = parent_seen.iter().position(|seen| !seen) {
            return invalid(format!("node {orphan} is not reachable from the root"));
        }
        let leaves = match leaf_order {
            None => dfs_leaves,
            Some(order) => {
                let mut sorted = order.clone();
                sorted.sort_unstable();
                let mut expected = dfs_leaves;
                expected.sort_unstable();
                if sorted != expected {
                    return invalid("leaf order must list every leaf exactly once");
                }
                order
            }
        };
        Ok(UltrametricTree { nodes, root, leaves })
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Leaf node ids in point-index order.
    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    pub fn leaf_labels(&self) -> Vec<String> {
        self.leaves
            .iter()
            .map(|&id| match &self.nodes[id] {
                Node::Leaf { label } => label.clone(),
                Node::Internal { .. } => unreachable!("leaf list holds only leaves"),
            })
            .collect()
    }

    /// Height of a node; zero for leaves.
    pub fn height(&self, id: NodeId) -> f64 {
        match self.nodes[id] {
            Node::Leaf { .. } => 0.0,
            Node::Internal { height, .. } => height,
        }
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        match &self.nodes[id] {
            Node::Leaf { .. } => &[],
            Node::Internal { children, .. } => children,
        }
    }

    pub fn is_binary(&self) -> bool {
        self.nodes.iter().all(|n| match n {
            Node::Leaf { .. } => true,
            Node::Internal { children, .. } => children.len() == 2,
        })
    }

    /// Node ids with every child before its parent.
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            order.push(id);
            stack.extend_from_slice(self.children(id));
        }
        order.reverse();
        order
    }

    /// For each node, the sorted point indices of the leaves below it.
    pub(crate) fn leaf_sets(&self) -> Vec<Vec<usize>> {
        let mut index_of = vec![usize::MAX; self.nodes.len()];
        for (i, &id) in self.leaves.iter().enumerate() {
            index_of[id] = i;
        }
        let mut sets: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for id in self.postorder() {
            let set = match &self.nodes[id] {
                Node::Leaf { .. } => vec![index_of[id]],
                Node::Internal { children, .. } => {
                    let mut merged: Vec<usize> =
                        children.iter().flat_map(|&c| sets[c].iter().copied()).collect();
                    merged.sort_unstable();
                    merged
                }
            };
            sets[id] = set;
        }
        sets
    }

    /// Smallest internal height, `None` for a single leaf.
    pub fn min_height(&self) -> Option<f64> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Internal { height, .. } => Some(*height),
                Node::Leaf { .. } => None,
            })
            .reduce(f64::min)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let json: TreeJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("tree JSON: {e}")))?;
        let mut nodes = Vec::new();
        let root = push_json(&json, &mut nodes);
        UltrametricTree::from_parts(nodes, root, None)
    }

    pub fn to_json(&self) -> TreeJson {
        fn build(t: &UltrametricTree, id: NodeId) -> TreeJson {
            match &t.nodes[id] {
                Node::Leaf { label } => TreeJson::Leaf { leaf: label.clone() },
                Node::Internal { height, children } => TreeJson::Internal {
                    height: *height,
                    children: children.iter().map(|&c| build(t, c)).collect(),
                },
            }
        }
        build(self, self.root)
    }
}

/// `{"height": h, "children": [...]}` or `{"leaf": "name"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeJson {
    Leaf { leaf: String },
    Internal { height: f64, children: Vec<TreeJson> },
}

fn push_json(json: &TreeJson, nodes: &mut Vec<Node>) -> NodeId {
    match json {
        TreeJson::Leaf { leaf } => {
            nodes.push(Node::Leaf { label: leaf.clone() });
            nodes.len() - 1
        }
        TreeJson::Internal { height, children } => {
            let id = nodes.len();
            nodes.push(Node::Internal { height: *height, children: Vec::new() });
            let ids: Vec<NodeId> = children.iter().map(|c| push_json(c, nodes)).collect();
            if let Node::Internal { children, .. } = &mut nodes[id] {
                *children = ids;
            }
            id
        }
    }
}

/// Reads the JSON tree format or Newick with branch lengths.
pub fn parse_tree(text: &str) -> Result<UltrametricTree> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        UltrametricTree::from_json_str(text)
    } else {
        parse_newick(text)
    }
}

/// Leaf-to-leaf distances `2 * height(lca)` in point-index order.
pub fn tree_to_metric(t: &UltrametricTree) -> MetricInstance {
    let n = t.leaf_count();
    let sets = t.leaf_sets();
    let mut dist = vec![vec![0.0; n]; n];
    for id in t.postorder() {
        if let Node::Internal { height, children } = &t.nodes[id] {
            let d = 2.0 * height;
            for (a, &ca) in children.iter().enumerate() {
                for &cb in &children[a + 1..] {
                    for &i in &sets[ca] {
                        for &j in &sets[cb] {
                            dist[i][j] = d;
                            dist[j][i] = d;
                        }
                    }
                }
            }
        }
    }
    MetricInstance::new(t.leaf_labels(), dist).expect("tree distances form a square finite matrix")
}

/// First triple whose two largest distances differ by more than the relative
/// tolerance.
pub fn ultrametric_violation(m: &MetricInstance, rel_tol: f64) -> Option<Triple> {
    let n = m.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut d = [m.dist(i, j), m.dist(i, k), m.dist(j, k)];
                d.sort_by(f64::total_cmp);
                if d[2] - d[1] > rel_tol * d[2] {
                    return Some(Triple(i, j, k));
                }
            }
        }
    }
    None
}

/// Rebuilds a tree from an ultrametric matrix by repeatedly merging the two
/// closest clusters at half their distance. Leaf indices keep the matrix order.
pub fn build_tree_from_matrix(m: &MetricInstance) -> Result<UltrametricTree> {
    if let Some(witness) = ultrametric_violation(m, REL_TOL) {
        return Err(Error::NotUltrametric(witness));
    }
    let n = m.len();
    if n == 0 {
        return invalid("cannot build a tree with no leaves");
    }
    let mut nodes: Vec<Node> = m
        .labels()
        .iter()
        .map(|l| Node::Leaf { label: l.clone() })
        .collect();
    let leaf_order: Vec<NodeId> = (0..n).collect();
    // Single-linkage cluster distances; exact for ultrametrics.
    let mut cd: Vec<Vec<f64>> = m.matrix().to_vec();
    let mut active: Vec<(NodeId, f64)> = (0..n).map(|i| (i, 0.0)).collect();
    let mut slot: Vec<usize> = (0..n).collect();
    while slot.len() > 1 {
        let mut best = (0, 1, f64::INFINITY);
        for a in 0..slot.len() {
            for b in a + 1..slot.len() {
                let d = cd[slot[a]][slot[b]];
                if d < best.2 {
                    best = (a, b, d);
                }
            }
        }
        let (a, b, d) = best;
        if d.is_nan() || d <= 0.0 {
            return invalid(format!(
                "points {} and {} are at non-positive distance",
                slot[a], slot[b]
            ));
        }
        let (sa, sb) = (slot[a], slot[b]);
        let height = (d / 2.0).max(active[sa].1).max(active[sb].1);
        let id = nodes.len();
        nodes.push(Node::Internal { height, children: vec![active[sa].0, active[sb].0] });
        active[sa] = (id, height);
        for &other in &slot {
            if other != sa && other != sb {
                let merged = cd[sa][other].min(cd[sb][other]);
                cd[sa][other] = merged;
                cd[other][sa] = merged;
            }
        }
        slot.remove(b);
    }
    let root = active[slot[0]].0;
    UltrametricTree::from_parts(nodes, root, Some(leaf_order))
}

/// Replaces every multiway node by a left comb of binary nodes at the same
/// height. The induced leaf metric and the leaf order are unchanged.
pub fn binarize(t: &UltrametricTree) -> UltrametricTree {
    if t.is_binary() {
        return t.clone();
    }
    let mut nodes = t.nodes.clone();
    for id in 0..t.nodes.len() {
        if let Node::Internal { height, children } = &t.nodes[id] {
            if children.len() <= 2 {
                continue;
            }
            let mut acc = children[0];
            for &c in &children[1..children.len() - 1] {
                nodes.push(Node::Internal { height: *height, children: vec![acc, c] });
                acc = nodes.len() - 1;
            }
            nodes[id] = Node::Internal {
                height: *height,
                children: vec![acc, *children.last().expect("at least three children")],
            };
        }
    }
    UltrametricTree { nodes, root: t.root, leaves: t.leaves.clone() }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const SIX_TAXA_JSON: &str = r#"{"height": 5.5, "children": [
        {"height": 3.5, "children": [{"leaf": "a"}, {"leaf": "b"}]},
        {"height": 4, "children": [{"leaf": "c"}, {"leaf": "d"}]},
        {"leaf": "e"}, {"leaf": "f"}]}"#;

    pub(crate) fn six_taxa_tree() -> UltrametricTree {
        UltrametricTree::from_json_str(SIX_TAXA_JSON).unwrap()
    }

    fn expected_six_taxa_distance(i: usize, j: usize) -> f64 {
        match (i.min(j), i.max(j)) {
            (0, 1) => 7.0,
            (2, 3) => 8.0,
            _ => 11.0,
        }
    }

    #[test]
    fn six_taxa_metric() {
        let t = six_taxa_tree();
        assert_eq!(t.leaf_labels(), ["a", "b", "c", "d", "e", "f"]);
        let m = tree_to_metric(&t);
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 0.0 } else { expected_six_taxa_distance(i, j) };
                assert_eq!(m.dist(i, j), want, "({i},{j})");
            }
        }
        assert!(crate::metric::validate_metric(&m).unwrap().is_valid());
        assert!(ultrametric_violation(&m, REL_TOL).is_none());
    }

    #[test]
    fn single_leaf_and_cherry() {
        let t = parse_tree(r#"{"leaf": "x"}"#).unwrap();
        assert_eq!(t.leaf_count(), 1);
        assert_eq!(tree_to_metric(&t).matrix(), &[vec![0.0]]);
        let cherry = parse_tree(r#"{"height": 1, "children": [{"leaf": "p"}, {"leaf": "q"}]}"#).unwrap();
        assert_eq!(tree_to_metric(&cherry).dist(0, 1), 2.0);
    }

    #[test]
    fn star_metric() {
        let t = parse_tree(
            r#"{"height": 1.5, "children": [{"leaf": "a"}, {"leaf": "b"}, {"leaf": "c"}, {"leaf": "d"}]}"#,
        )
        .unwrap();
        let m = tree_to_metric(&t);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(m.dist(i, j), 3.0);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_heights() {
        let child_above = r#"{"height": 1, "children": [
            {"height": 2, "children": [{"leaf": "a"}, {"leaf": "b"}]}, {"leaf": "c"}]}"#;
        assert!(parse_tree(child_above).is_err());
        let zero = r#"{"height": 0, "children": [{"leaf": "a"}, {"leaf": "b"}]}"#;
        assert!(parse_tree(zero).is_err());
        let unary = r#"{"height": 1, "children": [{"leaf": "a"}]}"#;
        assert!(parse_tree(unary).is_err());
        assert!(parse_tree(r#"{"height": 1, "kids": []}"#).is_err());
    }

    #[test]
    fn build_from_six_taxa_matrix() {
        let m = tree_to_metric(&six_taxa_tree());
        let t = build_tree_from_matrix(&m).unwrap();
        let mut heights: Vec<f64> = (0..t.node_count())
            .filter(|&id| matches!(t.node(id), Node::Internal { .. }))
            .map(|id| t.height(id))
            .collect();
        heights.sort_by(f64::total_cmp);
        heights.dedup();
        assert_eq!(heights, [3.5, 4.0, 5.5]);
        assert_eq!(tree_to_metric(&t), m);
    }

    #[test]
    fn build_two_points_and_reject_non_ultrametric() {
        let two = MetricInstance::from_line(&[0.0, 3.0]).unwrap();
        let t = build_tree_from_matrix(&two).unwrap();
        assert_eq!(t.height(t.root()), 1.5);
        let tri = MetricInstance::from_fn(crate::metric::index_labels(3), |i, j| match (i, j) {
            (0, 1) => 1.0,
            (0, 2) => 2.0,
            _ => 2.5,
        })
        .unwrap();
        assert!(matches!(
            build_tree_from_matrix(&tri),
            Err(Error::NotUltrametric(Triple(0, 1, 2)))
        ));
    }

    #[test]
    fn binarize_star_and_identity() {
        let star = parse_tree(
            r#"{"height": 2, "children": [{"leaf": "a"}, {"leaf": "b"}, {"leaf": "c"}, {"leaf": "d"}]}"#,
        )
        .unwrap();
        let bin = binarize(&star);
        assert!(bin.is_binary());
        let internal: Vec<f64> = (0..bin.node_count())
            .filter(|&id| matches!(bin.node(id), Node::Internal { .. }))
            .map(|id| bin.height(id))
            .collect();
        assert_eq!(internal, [2.0, 2.0, 2.0]);
        assert_eq!(tree_to_metric(&bin), tree_to_metric(&star));

        let cherry = parse_tree(r#"{"height": 1, "children": [{"leaf": "p"}, {"leaf": "q"}]}"#).unwrap();
        assert_eq!(binarize(&cherry), cherry);
    }

    #[test]
    fn json_round_trip() {
        let t = six_taxa_tree();
        let text = serde_json::to_string(&t.to_json()).unwrap();
        assert_eq!(UltrametricTree::from_json_str(&text).unwrap(), t);
    }
}
