//! Seeded instance generators for tests, examples and searches.
//!
//! All generators take a caller-owned [`rand::Rng`]; use [`seeded`] for a
//! reproducible stream.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::metric::{index_labels, MetricInstance};
use crate::reductions::{Graph, PlanarInstance};
use crate::ultrametric::{Node, NodeId, UltrametricTree};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random rooted binary ultrametric tree on `n >= 1` leaves named `t0..`.
/// Clusters are merged uniformly at random; each merge sits a random
/// increment in `[0.05, 1)` above its taller child.
pub fn binary_ultrametric<R: Rng>(rng: &mut R, n: usize) -> UltrametricTree {
    assert!(n >= 1, "need at least one leaf");
    let mut nodes: Vec<Node> = (0..n).map(|i| Node::Leaf { label: format!("t{i}") }).collect();
    let mut clusters: Vec<(NodeId, f64)> = (0..n).map(|i| (i, 0.0)).collect();
    while clusters.len() > 1 {
        let a = clusters.swap_remove(rng.gen_range(0..clusters.len()));
        let b = clusters.swap_remove(rng.gen_range(0..clusters.len()));
        let height = a.1.max(b.1) + rng.gen_range(0.05..1.0);
        nodes.push(Node::Internal { height, children: vec![a.0, b.0] });
        clusters.push((nodes.len() - 1, height));
    }
    let root = clusters[0].0;
    UltrametricTree::from_parts(nodes, root, Some((0..n).collect()))
        .expect("generated tree is valid")
}

/// Random ultrametric tree whose internal nodes have 2 to 4 children.
pub fn multiway_ultrametric<R: Rng>(rng: &mut R, n: usize) -> UltrametricTree {
    assert!(n >= 1, "need at least one leaf");
    let mut nodes: Vec<Node> = (0..n).map(|i| Node::Leaf { label: format!("t{i}") }).collect();
    let mut clusters: Vec<(NodeId, f64)> = (0..n).map(|i| (i, 0.0)).collect();
    while clusters.len() > 1 {
        let arity = rng.gen_range(2..=4).min(clusters.len());
        let mut picked = Vec::with_capacity(arity);
        for _ in 0..arity {
            picked.push(clusters.swap_remove(rng.gen_range(0..clusters.len())));
        }
        let top = picked.iter().map(|c| c.1).fold(0.0, f64::max);
        let height = top + rng.gen_range(0.05..1.0);
        nodes.push(Node::Internal { height, children: picked.iter().map(|c| c.0).collect() });
        clusters.push((nodes.len() - 1, height));
    }
    let root = clusters[0].0;
    UltrametricTree::from_parts(nodes, root, Some((0..n).collect()))
        .expect("generated tree is valid")
}

/// Distances drawn uniformly from `[1, 2)`; any such matrix is a metric since
/// every side is less than the sum of two others.
pub fn bounded_ratio_metric<R: Rng>(rng: &mut R, n: usize) -> MetricInstance {
    MetricInstance::from_fn(index_labels(n), |_, _| rng.gen_range(1.0..2.0))
        .expect("finite distances")
}

/// Euclidean metric of `n` uniform points in the unit square.
pub fn euclidean_metric<R: Rng>(rng: &mut R, n: usize) -> MetricInstance {
    let points: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen(), rng.gen()]).collect();
    MetricInstance::from_planar(&points).expect("finite distances")
}

/// Erdős–Rényi graph with edge probability `p`.
pub fn graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("generated edges are valid")
}

/// `n` distinct points on the integer grid `0..side` scaled by `1/4`, with a
/// threshold `delta` drawn in `[0.5, 2)`. Coordinates are exact binary
/// fractions.
pub fn planar_instance<R: Rng>(rng: &mut R, n: usize, side: usize, k: usize) -> PlanarInstance {
    assert!(n <= side * side, "grid too small for {n} distinct points");
    let cells = sample(rng, side * side, n);
    let points = cells
        .iter()
        .map(|c| [(c % side) as f64 * 0.25, (c / side) as f64 * 0.25])
        .collect();
    let delta = rng.gen_range(0.5..2.0);
    PlanarInstance::new(points, delta, k).expect("distinct grid points and positive delta")
}

/// `n` distinct sorted positions, either uniform in `[0, 1)` or distinct
/// integers below `grid` when `grid` is given.
pub fn line_points<R: Rng>(rng: &mut R, n: usize, grid: Option<usize>) -> Vec<f64> {
    let mut xs: Vec<f64> = match grid {
        Some(g) => {
            assert!(n <= g, "grid too small for {n} distinct points");
            sample(rng, g, n).iter().map(|i| i as f64).collect()
        }
        None => loop {
            let mut xs: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
            xs.sort_by(f64::total_cmp);
            if xs.windows(2).all(|w| w[0] < w[1]) {
                break xs;
            }
        },
    };
    xs.sort_by(f64::total_cmp);
    xs
}
