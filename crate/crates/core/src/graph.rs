//! Undirected simple graphs and labelled graph collections.

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node index {index} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { index: usize, node_count: usize },
    #[error("node label vector has length {got}, expected {expected}")]
    LabelLength { got: usize, expected: usize },
    #[error("adjacency is not a valid simple undirected graph: {0}")]
    InvalidAdjacency(String),
    #[error("dataset contains no graphs")]
    EmptyDataset,
    #[error("class label {label} outside [0, {num_classes})")]
    ClassOutOfRange { label: usize, num_classes: usize },
}

/// Immutable undirected simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    node_labels: Option<Vec<u32>>,
    class_label: usize,
}

impl Graph {
    /// Builds a graph from an arbitrary edge list. Both orientations of an
    /// edge collapse to one undirected edge and self-loops are dropped.
    pub fn from_edges(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        node_labels: Option<Vec<u32>>,
        class_label: usize,
    ) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); node_count];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= node_count {
                    return Err(GraphError::NodeOutOfRange {
                        index: w,
                        node_count,
                    });
                }
            }
            if u == v {
                continue;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Self::from_adjacency(adjacency, node_labels, class_label)
    }

    /// Builds a graph from adjacency lists that must already be sorted,
    /// duplicate free, loop free and symmetric.
    pub fn from_adjacency(
        adjacency: Vec<Vec<usize>>,
        node_labels: Option<Vec<u32>>,
        class_label: usize,
    ) -> Result<Self, GraphError> {
        let n = adjacency.len();
        if let Some(labels) = &node_labels {
            if labels.len() != n {
                return Err(GraphError::LabelLength {
                    got: labels.len(),
                    expected: n,
                });
            }
        }
        for (v, list) in adjacency.iter().enumerate() {
            if !list.windows(2).all(|w| w[0] < w[1]) {
                return Err(GraphError::InvalidAdjacency(format!(
                    "neighbors of {v} not strictly increasing"
                )));
            }
            for &u in list {
                if u >= n {
                    return Err(GraphError::NodeOutOfRange {
                        index: u,
                        node_count: n,
                    });
                }
                if u == v {
                    return Err(GraphError::InvalidAdjacency(format!("self-loop at {v}")));
                }
                if adjacency[u].binary_search(&v).is_err() {
                    return Err(GraphError::InvalidAdjacency(format!(
                        "edge ({v}, {u}) has no reverse entry"
                    )));
                }
            }
        }
        Ok(Self {
            adjacency,
            node_labels,
            class_label,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of undirected edges, each counted once.
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> Result<&[usize], GraphError> {
        self.adjacency
            .get(v)
            .map(Vec::as_slice)
            .ok_or(GraphError::NodeOutOfRange {
                index: v,
                node_count: self.node_count(),
            })
    }

    pub fn degree(&self, v: usize) -> Result<usize, GraphError> {
        self.neighbors(v).map(<[usize]>::len)
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn node_labels(&self) -> Option<&[u32]> {
        self.node_labels.as_deref()
    }

    pub fn class_label(&self) -> usize {
        self.class_label
    }

    /// Undirected edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Relabels nodes so that old node `v` becomes `perm[v]`. Node labels
    /// travel with their nodes.
    pub fn permute(&self, perm: &[usize]) -> Result<Self, GraphError> {
        let n = self.node_count();
        let distinct: BTreeSet<usize> = perm.iter().copied().collect();
        if perm.len() != n || distinct.len() != n || distinct.iter().any(|&p| p >= n) {
            return Err(GraphError::InvalidAdjacency(
                "permutation is not a bijection on the node set".into(),
            ));
        }
        let labels = self.node_labels.as_ref().map(|labels| {
            let mut out = vec![0; n];
            for (v, &l) in labels.iter().enumerate() {
                out[perm[v]] = l;
            }
            out
        });
        Self::from_edges(
            n,
            self.edges().map(|(u, v)| (perm[u], perm[v])),
            labels,
            self.class_label,
        )
    }
}

/// An ordered, non-empty collection of graphs with contiguous class ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    graphs: Vec<Graph>,
    num_classes: usize,
    num_node_label_values: usize,
    max_degree: usize,
}

impl Dataset {
    /// Validates class ids against `num_classes` and counts distinct node
    /// label values.
    pub fn new(
        name: impl Into<String>,
        graphs: Vec<Graph>,
        num_classes: usize,
    ) -> Result<Self, GraphError> {
        if graphs.is_empty() {
            return Err(GraphError::EmptyDataset);
        }
        if let Some(g) = graphs.iter().find(|g| g.class_label >= num_classes) {
            return Err(GraphError::ClassOutOfRange {
                label: g.class_label,
                num_classes,
            });
        }
        let distinct: BTreeSet<u32> = graphs
            .iter()
            .filter_map(Graph::node_labels)
            .flatten()
            .copied()
            .collect();
        let max_degree = graphs.iter().map(Graph::max_degree).max().unwrap_or(0);
        Ok(Self {
            name: name.into(),
            graphs,
            num_classes,
            num_node_label_values: distinct.len(),
            max_degree,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn num_node_label_values(&self) -> usize {
        self.num_node_label_values
    }

    pub fn has_node_labels(&self) -> bool {
        self.graphs.iter().all(|g| g.node_labels.is_some())
    }

    /// Largest node degree over every graph.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn class_labels(&self) -> Vec<usize> {
        self.graphs.iter().map(Graph::class_label).collect()
    }

    pub fn stats(&self) -> DatasetStats {
        dataset_stats(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetStats {
    pub graph_count: usize,
    pub class_count: usize,
    pub avg_nodes: f64,
    pub avg_edges: f64,
    pub label_count: usize,
}

pub fn dataset_stats(d: &Dataset) -> DatasetStats {
    let count = d.len();
    let nodes: usize = d.graphs.iter().map(Graph::node_count).sum();
    let edges: usize = d.graphs.iter().map(Graph::edge_count).sum();
    DatasetStats {
        graph_count: count,
        class_count: d.num_classes,
        avg_nodes: nodes as f64 / count as f64,
        avg_edges: edges as f64 / count as f64,
        label_count: d.num_node_label_values,
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn degrees_of_small_graphs() {
        assert_eq!(star(3).degree(0), Ok(3));
        assert_eq!(isolated(2).degree(1), Ok(0));
        assert_eq!(path(3).degree(1), Ok(2));
        assert_eq!(
            path(3).degree(3),
            Err(GraphError::NodeOutOfRange {
                index: 3,
                node_count: 3
            })
        );
    }

    #[test]
    fn duplicate_and_reverse_edges_merge() {
        let g = Graph::from_edges(2, [(0, 1), (1, 0), (0, 1)], None, 0).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.neighbors(0).unwrap(), &[1]);
    }

    #[test]
    fn self_loops_are_dropped() {
        let g = Graph::from_edges(2, [(0, 0), (0, 1)], None, 0).unwrap();
        assert_eq!(g.degree(0), Ok(1));
    }

    #[test]
    fn rejects_asymmetric_adjacency() {
        let err = Graph::from_adjacency(vec![vec![1], vec![]], None, 0).unwrap_err();
        assert!(matches!(err, GraphError::InvalidAdjacency(_)));
    }

    #[test]
    fn triangle_stats() {
        let d = Dataset::new("tri", vec![triangle()], 1).unwrap();
        let s = dataset_stats(&d);
        assert_eq!(s.avg_nodes, 3.0);
        assert_eq!(s.avg_edges, 3.0);
        assert_eq!(s.label_count, 0);
    }

    #[test]
    fn dataset_invariants() {
        assert_eq!(Dataset::new("x", vec![], 1), Err(GraphError::EmptyDataset));
        let g = Graph::from_edges(1, [], None, 2).unwrap();
        assert!(matches!(
            Dataset::new("x", vec![g], 2),
            Err(GraphError::ClassOutOfRange { .. })
        ));
        let labelled = Graph::from_edges(3, [(0, 1)], Some(vec![0, 4, 4]), 0).unwrap();
        let d = Dataset::new("x", vec![labelled], 1).unwrap();
        assert_eq!(d.num_node_label_values(), 2);
    }

    #[test]
    fn permute_carries_labels() {
        let g = Graph::from_edges(3, [(0, 1)], Some(vec![5, 6, 7]), 0).unwrap();
        let p = g.permute(&[2, 0, 1]).unwrap();
        assert_eq!(p.node_labels().unwrap(), &[6, 7, 5]);
        assert_eq!(p.neighbors(2).unwrap(), &[0]);
        assert!(g.permute(&[0, 0, 1]).is_err());
    }
}
