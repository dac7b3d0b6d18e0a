//! Exact minimum-energy subset selection on ultrametric trees.
//!
//! At an internal node `u` every leaf of one child is at the same distance
//! `delta_u = 2 * height(u)` from every leaf of the other child, so a subset
//! split as `A ∪ B` across the children has energy
//! `E(A) + E(B) + |A| |B| delta_u^-s`. The table `F_u(t)` is filled bottom-up
//! with a knapsack-style convolution over the two children, O(n k^2) time and
//! O(n k) space.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{binarize, tree_to_metric, Node, NodeId, UltrametricTree};
use crate::error::{invalid, Result};
use crate::metric::{riesz_energy, Exponent, Subset};

/// Candidates within this relative distance of a cell's minimum count as ties
/// during reconstruction.
const TIE_REL: f64 = 1e-12;

/// Per-node DP values for one `(tree, k, s)` solve.
///
/// Values are stored for the binarized tree with heights normalized so the
/// closest pair of leaves is at distance 1; [`EnergyTable::value`] converts
/// back to the input's units.
#[derive(Clone, Debug)]
pub struct EnergyTable {
    k: usize,
    values: Vec<Vec<f64>>,
    splits: Vec<Vec<usize>>,
    children: Vec<Option<(NodeId, NodeId)>>,
    cross: Vec<f64>,
    scale: f64,
}

impl EnergyTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    /// `F_u(t)` in input units; `+inf` when fewer than `t` leaves lie below `u`.
    pub fn value(&self, node: NodeId, t: usize) -> f64 {
        let v = self.values[node][t];
        if v == 0.0 || v.is_infinite() {
            v
        } else {
            v * self.scale
        }
    }

    /// Row of normalized values `F_u(0..=k)`.
    pub fn normalized_row(&self, node: NodeId) -> &[f64] {
        &self.values[node]
    }

    /// Smallest optimal left-child count `t_v` for an internal node, `None`
    /// for leaves and infeasible cells.
    pub fn split(&self, node: NodeId, t: usize) -> Option<(usize, usize)> {
        let tv = *self.splits[node].get(t)?;
        (tv != usize::MAX).then(|| (tv, t - tv))
    }

    /// Multiplier from normalized values to input units.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `node,t,F` rows for every cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,t,F\n");
        for (node, row) in self.values.iter().enumerate() {
            for t in 0..row.len() {
                let v = self.value(node, t);
                if v.is_infinite() {
                    let _ = writeln!(out, "{node},{t},inf");
                } else {
                    let _ = writeln!(out, "{node},{t},{v}");
                }
            }
        }
        out
    }

    fn candidate(&self, node: NodeId, t: usize, tv: usize) -> f64 {
        let (v, w) = self.children[node].expect("internal node");
        let tw = t - tv;
        self.values[v][tv] + self.values[w][tw] + (tv * tw) as f64 * self.cross[node]
    }
}

#[derive(Clone, Debug)]
pub struct UltrametricSolution {
    pub energy: f64,
    pub subset: Subset,
    pub labels: Vec<String>,
    pub table: EnergyTable,
    /// The binarized tree whose node ids index `table`.
    pub tree: UltrametricTree,
}

pub fn solve_ultrametric(t: &UltrametricTree, k: usize, s: Exponent) -> Result<UltrametricSolution> {
    let n = t.leaf_count();
    if k == 0 || k > n {
        return invalid(format!("k must lie in 1..={n}, got {k}"));
    }
    let tree = binarize(t);
    let s = s.get();
    let h_min = tree.min_height().unwrap_or(0.5);
    let node_count = tree.node_count();

    let mut size = vec![0usize; node_count];
    let mut values = vec![Vec::new(); node_count];
    let mut splits = vec![Vec::new(); node_count];
    let mut children = vec![None; node_count];
    let mut cross = vec![0.0; node_count];

    for u in tree.postorder() {
        match tree.node(u) {
            Node::Leaf { .. } => {
                size[u] = 1;
                let mut row = vec![f64::INFINITY; k + 1];
                row[0] = 0.0;
                row[1] = 0.0;
                values[u] = row;
            }
            Node::Internal { height, children: ch } => {
                let (v, w) = (ch[0], ch[1]);
                children[u] = Some((v, w));
                size[u] = size[v] + size[w];
                let delta_pow = (height / h_min).powf(-s);
                cross[u] = delta_pow;
                let mut row = vec![f64::INFINITY; k + 1];
                let mut split = vec![usize::MAX; k + 1];
                for t in 0..=k.min(size[u]) {
                    let lo = t.saturating_sub(size[w]);
                    let hi = t.min(size[v]);
                    for tv in lo..=hi {
                        let tw = t - tv;
                        let cand = values[v][tv] + values[w][tw] + (tv * tw) as f64 * delta_pow;
                        if cand < row[t] {
                            row[t] = cand;
                            split[t] = tv;
                        }
                    }
                }
                values[u] = row;
                splits[u] = split;
            }
        }
    }

    let table = EnergyTable {
        k,
        values,
        splits,
        children,
        cross,
        scale: (2.0 * h_min).powf(-s),
    };
    let indices = reconstruct(&tree, &table, k);
    let subset = Subset::from_sorted(indices);
    let labels = {
        let all = tree.leaf_labels();
        subset.indices().iter().map(|&i| all[i].clone()).collect()
    };
    Ok(UltrametricSolution {
        energy: table.value(tree.root(), k),
        subset,
        labels,
        table,
        tree,
    })
}

/// Lexicographically smallest optimal subset. Explores every tied split; for
/// equal-size sets the order is decided by the smallest element of the
/// symmetric difference, so combining the children's smallest witnesses is
/// exact for each split.
fn reconstruct(tree: &UltrametricTree, table: &EnergyTable, k: usize) -> Vec<usize> {
    let node_count = tree.node_count();
    let mut ties: Vec<HashMap<usize, Vec<usize>>> = vec![HashMap::new(); node_count];
    let mut stack = vec![(tree.root(), k)];
    while let Some((u, t)) = stack.pop() {
        if ties[u].contains_key(&t) {
            continue;
        }
        let tied = match table.children[u] {
            None => Vec::new(),
            Some((v, w)) => {
                let best = table.values[u][t];
                let limit = best + TIE_REL * best;
                let tied: Vec<usize> = (0..=t)
                    .filter(|&tv| {
                        table.values[v][tv].is_finite()
                            && table.values[w][t - tv].is_finite()
                            && table.candidate(u, t, tv) <= limit
                    })
                    .collect();
                for &tv in &tied {
                    stack.push((v, tv));
                    stack.push((w, t - tv));
                }
                tied
            }
        };
        ties[u].insert(t, tied);
    }

    let mut leaf_index = vec![usize::MAX; node_count];
    for (i, &id) in tree.leaves().iter().enumerate() {
        leaf_index[id] = i;
    }
    let mut best: Vec<HashMap<usize, Vec<usize>>> = vec![HashMap::new(); node_count];
    for u in tree.postorder() {
        let cells = std::mem::take(&mut ties[u]);
        for (t, tied) in cells {
            let chosen = match table.children[u] {
                None if t == 1 => vec![leaf_index[u]],
                None => Vec::new(),
                Some((v, w)) => tied
                    .iter()
                    .map(|&tv| merge_sorted(&best[v][&tv], &best[w][&(t - tv)]))
                    .min()
                    .expect("every reachable cell has a tied split"),
            };
            best[u].insert(t, chosen);
        }
    }
    best[tree.root()].remove(&k).expect("root cell reached")
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Both sides of the cross-term identity for one split.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossTerm {
    /// `E_s(A ∪ B)` evaluated pair by pair.
    pub direct: f64,
    /// `E_s(A) + E_s(B) + |A| |B| delta_u^-s`.
    pub recurrence: f64,
    pub difference: f64,
}

/// Evaluates the split identity for `A` and `B` lying below two distinct
/// children of a common internal node.
pub fn cross_term_check(t: &UltrametricTree, a: &Subset, b: &Subset, s: Exponent) -> Result<CrossTerm> {
    let m = tree_to_metric(t);
    let union = Subset::new(a.indices().iter().chain(b.indices()).copied().collect())?;
    let direct = riesz_energy(&m, &union, s)?;
    let separate = riesz_energy(&m, a, s)? + riesz_energy(&m, b, s)?;
    let recurrence = if a.is_empty() || b.is_empty() {
        separate
    } else {
        let sets = t.leaf_sets();
        let contains = |node: NodeId, sub: &Subset| {
            sub.indices().iter().all(|i| sets[node].binary_search(i).is_ok())
        };
        let mut u = t.root();
        while let Some(&c) = t.children(u).iter().find(|&&c| contains(c, &union)) {
            u = c;
        }
        let ca = t.children(u).iter().find(|&&c| contains(c, a));
        let cb = t.children(u).iter().find(|&&c| contains(c, b));
        match (ca, cb) {
            (Some(ca), Some(cb)) if ca != cb => {
                let delta = 2.0 * t.height(u);
                separate + (a.len() * b.len()) as f64 * delta.powf(-s.get())
            }
            _ => return invalid("A and B do not lie below sibling subtrees of a common node"),
        }
    };
    Ok(CrossTerm { direct, recurrence, difference: (direct - recurrence).abs() })
}
