//! Seeded random graph generators.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Dataset, Graph};

/// Uniform random graph with `n` nodes and `m` distinct edges
/// (Erdős–Rényi `G(n, m)`).
pub fn gnm<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Graph {
    let possible = n * n.saturating_sub(1) / 2;
    let m = m.min(possible);
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if seen.insert(key) {
            edges.push(key);
        }
    }
    Graph::from_edges(n, edges, None, 0).expect("generated edges are in range")
}

/// Each pair is an edge independently with probability `p`.
pub fn gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges, None, 0).expect("generated edges are in range")
}

/// Preferential attachment: every new node links to `k` existing nodes
/// chosen proportionally to degree.
pub fn preferential_attachment<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Graph {
    let k = k.max(1);
    let mut ends: Vec<usize> = Vec::new();
    let mut edges = Vec::new();
    for v in 1..n {
        let mut targets = HashSet::new();
        let want = k.min(v);
        while targets.len() < want {
            let t = if ends.is_empty() {
                rng.gen_range(0..v)
            } else {
                ends[rng.gen_range(0..ends.len())]
            };
            targets.insert(t);
        }
        let mut targets: Vec<usize> = targets.into_iter().collect();
        targets.sort_unstable();
        for t in targets {
            edges.push((t, v));
            ends.push(t);
            ends.push(v);
        }
    }
    Graph::from_edges(n, edges, None, 0).expect("generated edges are in range")
}

/// Two-class dataset: class 0 holds uniform random graphs, class 1
/// preferential-attachment graphs of similar size and density. With
/// `node_labels`, each node is labelled by `degree mod 3`.
pub fn two_class_dataset(name: &str, per_class: usize, seed: u64, node_labels: bool) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graphs = Vec::with_capacity(2 * per_class);
    for i in 0..2 * per_class {
        let class = i % 2;
        let n = rng.gen_range(12..30);
        let g = if class == 0 {
            gnm(n, 2 * n, &mut rng)
        } else {
            preferential_attachment(n, 2, &mut rng)
        };
        let labels = node_labels.then(|| {
            g.adjacency().iter().map(|l| (l.len() % 3) as u32).collect()
        });
        let edges: Vec<_> = g.edges().collect();
        graphs.push(Graph::from_edges(n, edges, labels, class).expect("valid graph"));
    }
    Dataset::new(name, graphs, 2).expect("non-empty dataset")
}
