use std::collections::VecDeque;

use crate::graph::Graph;

/// `counts[d]` is the number of unordered node pairs at shortest-path
/// distance `d`. Index 0 is always zero; unreachable pairs are not counted.
pub fn distance_counts(g: &Graph) -> Vec<u64> {
    let n = g.node_count();
    let adjacency = g.adjacency();
    let mut counts = vec![0u64];
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for source in 0..n {
        dist.fill(usize::MAX);
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            for &w in &adjacency[u] {
                if dist[w] == usize::MAX {
                    dist[w] = du + 1;
                    queue.push_back(w);
                    // each pair once, from its smaller endpoint
                    if w > source {
                        if counts.len() <= du + 1 {
                            counts.resize(du + 2, 0);
                        }
                        counts[du + 1] += 1;
                    }
                }
            }
        }
    }
    counts
}

/// Sorted multiset of finite pairwise shortest-path distances, one entry
/// per unordered pair.
pub fn distance_multiset(g: &Graph) -> Vec<u32> {
    distance_counts(g)
        .iter()
        .enumerate()
        .flat_map(|(d, &c)| std::iter::repeat_n(d as u32, c as usize))
        .collect()
}
