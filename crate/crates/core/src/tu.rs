//! Reader and writer for the multi-file plain-text benchmark format:
//!
//! - `<name>_A.txt`: one `row, col` pair per line, 1-based global node ids
//! - `<name>_graph_indicator.txt`: 1-based graph id of node `i` on line `i`
//! - `<name>_graph_labels.txt`: class label of graph `g` on line `g`
//! - `<name>_node_labels.txt` (optional): label of node `i` on line `i`
//!
//! Values may be separated by commas and/or whitespace; CRLF is accepted.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::graph::{Dataset, Graph, GraphError};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("node {node} refers to graph {graph}, but only {graph_count} graphs are labelled")]
    UnknownGraph {
        node: usize,
        graph: i64,
        graph_count: usize,
    },
    #[error("edge on line {line} references node {node}, but only {node_count} nodes exist")]
    UnknownNode {
        line: usize,
        node: i64,
        node_count: usize,
    },
    #[error("edge ({u}, {v}) on line {line} joins graphs {gu} and {gv}")]
    CrossGraphEdge {
        line: usize,
        u: usize,
        v: usize,
        gu: usize,
        gv: usize,
    },
    #[error("{file} has {got} entries, expected {expected}")]
    CountMismatch {
        file: String,
        got: usize,
        expected: usize,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn file_path(root: &Path, name: &str, suffix: &str) -> PathBuf {
    root.join(format!("{name}_{suffix}.txt"))
}

fn read_file(path: &Path) -> Result<String, ParseError> {
    fs::read_to_string(path).map_err(|source| {
        if source.kind() == io::ErrorKind::NotFound {
            ParseError::MissingFile(path.to_path_buf())
        } else {
            ParseError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })
}

/// Parses every non-blank line into exactly `arity` integers, returning
/// `(line_number, values)` pairs.
fn parse_rows(path: &Path, text: &str, arity: usize) -> Result<Vec<(usize, Vec<i64>)>, ParseError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.is_empty() {
            continue;
        }
        let malformed = |message: String| ParseError::Malformed {
            path: path.to_path_buf(),
            line: line_no,
            message,
        };
        if fields.len() != arity {
            return Err(malformed(format!(
                "expected {arity} integer(s), found {}",
                fields.len()
            )));
        }
        let values = fields
            .iter()
            .map(|f| {
                f.parse::<i64>()
                    .map_err(|_| malformed(format!("`{f}` is not an integer")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((line_no, values));
    }
    Ok(rows)
}

fn read_column(path: &Path) -> Result<Vec<i64>, ParseError> {
    let text = read_file(path)?;
    Ok(parse_rows(path, &text, 1)?
        .into_iter()
        .map(|(_, v)| v[0])
        .collect())
}

/// Maps raw values onto `0..distinct` preserving their sorted order.
fn contiguous_ids(raw: &[i64]) -> BTreeMap<i64, usize> {
    let mut ids: BTreeMap<i64, usize> = raw.iter().map(|&v| (v, 0)).collect();
    for (i, id) in ids.values_mut().enumerate() {
        *id = i;
    }
    ids
}

/// File prefixes of the public benchmark archives, keyed by the names
/// they are usually reported under.
pub const BENCHMARK_PREFIXES: [(&str, &str); 11] = [
    ("MUTAG", "MUTAG"),
    ("PTC", "PTC_MR"),
    ("ENZYME", "ENZYMES"),
    ("PROTEIN", "PROTEINS"),
    ("DD", "DD"),
    ("NCI1", "NCI1"),
    ("IMDB BINARY", "IMDB-BINARY"),
    ("IMDB MULTI", "IMDB-MULTI"),
    ("REDDIT BINARY", "REDDIT-BINARY"),
    ("REDDIT 5K", "REDDIT-MULTI-5K"),
    ("REDDIT 12K", "REDDIT-MULTI-12K"),
];

fn prefix_candidates(name: &str) -> Vec<String> {
    let mut out = vec![name.to_string()];
    if let Some((_, prefix)) = BENCHMARK_PREFIXES.iter().find(|(n, _)| n.eq_ignore_ascii_case(name)) {
        out.push(prefix.to_string());
    }
    out.push(name.replace(' ', "-"));
    out.push(name.replace(' ', "_"));
    out.dedup();
    out
}

/// Finds the directory and file prefix of dataset `name` under `data_dir`,
/// accepting either `data_dir/<prefix>/<prefix>_A.txt` (an unpacked archive)
/// or `data_dir/<prefix>_A.txt`. `name` may be a file prefix or one of the
/// names in [`BENCHMARK_PREFIXES`].
pub fn locate_dataset(data_dir: impl AsRef<Path>, name: &str) -> Result<(PathBuf, String), ParseError> {
    let data_dir = data_dir.as_ref();
    let candidates = prefix_candidates(name);
    for prefix in &candidates {
        for dir in [data_dir.join(prefix), data_dir.to_path_buf()] {
            if file_path(&dir, prefix, "graph_indicator").is_file() {
                return Ok((dir, prefix.clone()));
            }
        }
    }
    let prefix = BENCHMARK_PREFIXES
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map_or(name, |(_, p)| p);
    Err(ParseError::MissingFile(file_path(&data_dir.join(prefix), prefix, "graph_indicator")))
}

/// [`locate_dataset`] followed by [`parse_tu_dataset`].
pub fn load_dataset(data_dir: impl AsRef<Path>, name: &str) -> Result<Dataset, ParseError> {
    let (dir, prefix) = locate_dataset(data_dir, name)?;
    parse_tu_dataset(dir, &prefix)
}

pub fn parse_tu_dataset(root: impl AsRef<Path>, name: &str) -> Result<Dataset, ParseError> {
    let root = root.as_ref();
    let indicator_path = file_path(root, name, "graph_indicator");
    let labels_path = file_path(root, name, "graph_labels");
    let edges_path = file_path(root, name, "A");
    let node_labels_path = file_path(root, name, "node_labels");

    let indicator = read_column(&indicator_path)?;
    let raw_classes = read_column(&labels_path)?;
    let edges_text = read_file(&edges_path)?;
    let raw_node_labels = if node_labels_path.exists() {
        Some(read_column(&node_labels_path)?)
    } else {
        None
    };

    let graph_count = raw_classes.len();
    let node_count = indicator.len();

    // Global node -> (graph, local index).
    let mut placement = Vec::with_capacity(node_count);
    let mut sizes = vec![0usize; graph_count];
    for (node, &g) in indicator.iter().enumerate() {
        if g < 1 || g as usize > graph_count {
            return Err(ParseError::UnknownGraph {
                node: node + 1,
                graph: g,
                graph_count,
            });
        }
        let g = g as usize - 1;
        placement.push((g, sizes[g]));
        sizes[g] += 1;
    }

    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graph_count];
    for (line, pair) in parse_rows(&edges_path, &edges_text, 2)? {
        let mut ends = [0usize; 2];
        for (slot, &id) in ends.iter_mut().zip(&pair) {
            if id < 1 || id as usize > node_count {
                return Err(ParseError::UnknownNode {
                    line,
                    node: id,
                    node_count,
                });
            }
            *slot = id as usize - 1;
        }
        let (gu, lu) = placement[ends[0]];
        let (gv, lv) = placement[ends[1]];
        if gu != gv {
            return Err(ParseError::CrossGraphEdge {
                line,
                u: ends[0] + 1,
                v: ends[1] + 1,
                gu: gu + 1,
                gv: gv + 1,
            });
        }
        edges[gu].push((lu, lv));
    }

    let mut node_labels: Option<Vec<Vec<u32>>> = match &raw_node_labels {
        Some(raw) => {
            if raw.len() != node_count {
                return Err(ParseError::CountMismatch {
                    file: format!("{name}_node_labels.txt"),
                    got: raw.len(),
                    expected: node_count,
                });
            }
            let ids = contiguous_ids(raw);
            let mut per_graph: Vec<Vec<u32>> =
                sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
            for (node, value) in raw.iter().enumerate() {
                per_graph[placement[node].0].push(ids[value] as u32);
            }
            Some(per_graph)
        }
        None => None,
    };

    let class_ids = contiguous_ids(&raw_classes);
    let mut graphs = Vec::with_capacity(graph_count);
    for (g, graph_edges) in edges.into_iter().enumerate() {
        let labels = node_labels.as_mut().map(|l| std::mem::take(&mut l[g]));
        graphs.push(Graph::from_edges(
            sizes[g],
            graph_edges,
            labels,
            class_ids[&raw_classes[g]],
        )?);
    }
    Ok(Dataset::new(name, graphs, class_ids.len())?)
}

/// Writes `dataset` in the multi-file format under `root`. Class and node
/// labels are written as their contiguous ids, and every undirected edge
/// is written in both orientations.
pub fn write_tu_dataset(dataset: &Dataset, root: impl AsRef<Path>) -> io::Result<()> {
    let root = root.as_ref();
    let name = dataset.name();
    fs::create_dir_all(root)?;
    let create = |suffix: &str| -> io::Result<BufWriter<fs::File>> {
        Ok(BufWriter::new(fs::File::create(file_path(root, name, suffix))?))
    };

    let mut a = create("A")?;
    let mut indicator = create("graph_indicator")?;
    let mut classes = create("graph_labels")?;
    let mut node_labels = if dataset.has_node_labels() {
        Some(create("node_labels")?)
    } else {
        None
    };

    let mut offset = 1usize;
    for (g, graph) in dataset.graphs().iter().enumerate() {
        writeln!(classes, "{}", graph.class_label())?;
        for _ in 0..graph.node_count() {
            writeln!(indicator, "{}", g + 1)?;
        }
        for (v, list) in graph.adjacency().iter().enumerate() {
            for &u in list {
                writeln!(a, "{}, {}", v + offset, u + offset)?;
            }
        }
        if let (Some(out), Some(labels)) = (node_labels.as_mut(), graph.node_labels()) {
            for l in labels {
                writeln!(out, "{l}")?;
            }
        }
        offset += graph.node_count();
    }
    a.flush()?;
    indicator.flush()?;
    classes.flush()?;
    if let Some(mut out) = node_labels {
        out.flush()?;
    }
    Ok(())
}
