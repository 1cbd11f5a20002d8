//! Undirected simple graphs and the canonical constructions used by the
//! formulations: hypercubes, paths, cycles and the coil host graph.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest hypercube dimension accepted by [`hypercube`].
pub const MAX_HYPERCUBE_DIM: usize = 16;

/// Undirected simple graph on vertices `0..num_vertices`.
///
/// Edges are stored once as `(u, v)` with `u < v`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRecord", into = "GraphRecord")]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    labels: Option<Vec<String>>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRecord {
    num_vertices: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<GraphRecord> for Graph {
    type Error = Error;

    fn try_from(rec: GraphRecord) -> Result<Self> {
        let g = Graph::new(rec.num_vertices, rec.edges.iter().map(|e| (e[0], e[1])))?;
        match rec.labels {
            Some(labels) => g.with_labels(labels),
            None => Ok(g),
        }
    }
}

impl From<Graph> for GraphRecord {
    fn from(g: Graph) -> Self {
        GraphRecord {
            num_vertices: g.num_vertices,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
            labels: g.labels,
        }
    }
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges (in either
    /// orientation) collapse; self-loops and out-of-range endpoints are errors.
    pub fn new(num_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut normalized = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= num_vertices {
                    return Err(Error::VertexOutOfRange { index: w, num_vertices });
                }
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        normalized.dedup();

        let mut adjacency = vec![Vec::new(); num_vertices];
        for &(u, v) in &normalized {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph { num_vertices, edges: normalized, labels: None, adjacency })
    }

    /// Attaches one distinct label per vertex.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.num_vertices {
            return Err(Error::InvalidGraph(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.num_vertices
            )));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidGraph(format!("duplicate label {l:?}")));
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of `v`, falling back to its decimal index.
    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn is_edge(&self, u: usize, v: usize) -> Result<bool> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self.has_edge(u, v))
    }

    /// Unchecked variant of [`Graph::is_edge`] for callers that already
    /// validated their indices. Panics on out-of-range `u`.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.num_vertices {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { index: v, num_vertices: self.num_vertices })
        }
    }

    /// Dense adjacency matrix, row-major. Intended for small graphs.
    pub fn adjacency_matrix(&self) -> Vec<Vec<bool>> {
        let mut m = vec![vec![false; self.num_vertices]; self.num_vertices];
        for &(u, v) in &self.edges {
            m[u][v] = true;
            m[v][u] = true;
        }
        m
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization is infallible")
    }
}

/// The `n`-dimensional hypercube. Vertex `v` is the bitstring of `v`
/// written with `n` digits, most significant bit first.
pub fn hypercube(n: usize) -> Result<Graph> {
    if !(1..=MAX_HYPERCUBE_DIM).contains(&n) {
        return Err(Error::DimensionOutOfRange { n, min: 1, max: MAX_HYPERCUBE_DIM });
    }
    let size = 1usize << n;
    let edges = (0..size).flat_map(|v| {
        (0..n).filter_map(move |b| {
            let w = v ^ (1 << b);
            (v < w).then_some((v, w))
        })
    });
    let labels = (0..size).map(|v| bit_label(v, n)).collect();
    Graph::new(size, edges)?.with_labels(labels)
}

/// `n`-digit binary label of `v`, most significant bit first.
pub fn bit_label(v: usize, n: usize) -> String {
    format!("{v:0n$b}")
}

/// Parses an `n`-digit bitstring back into its vertex index.
pub fn parse_bit_label(label: &str, n: usize) -> Result<usize> {
    let trimmed = label.trim().trim_start_matches('(').trim_end_matches(')');
    if trimmed.len() != n {
        return Err(Error::InvalidLabel {
            label: label.to_string(),
            reason: format!("expected {n} binary digits, found {}", trimmed.len()),
        });
    }
    if !trimmed.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::InvalidLabel {
            label: label.to_string(),
            reason: "only the digits 0 and 1 are allowed".into(),
        });
    }
    Ok(usize::from_str_radix(trimmed, 2).expect("validated bitstring"))
}

pub fn path(m: usize) -> Result<Graph> {
    if m == 0 {
        return Err(Error::EmptyGraph);
    }
    Graph::new(m, (1..m).map(|i| (i - 1, i)))
}

pub fn cycle(m: usize) -> Result<Graph> {
    if m < 3 {
        return Err(Error::DegenerateCycle(m));
    }
    Graph::new(m, (0..m).map(|i| (i, (i + 1) % m)))
}

/// Host graph for the coil formulation: a chain of path vertices
/// `1 → 2 → … → L` plus, for every `k` in `3..=L`, a cycle vertex `(1,k)`
/// joined to path vertices `1` and `k` and oriented `k → (1,k) → 1`.
///
/// Selecting `{1..m} ∪ {(1,m)}` yields an induced cycle on `m + 1` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitbHostGraph {
    pub graph: Graph,
    /// Index of path vertex `j` is `path_vertices[j - 1]`.
    pub path_vertices: Vec<usize>,
    /// Index of cycle vertex `(1,k)` is `cycle_vertices[k - 3]`.
    pub cycle_vertices: Vec<usize>,
    /// Out-neighbors of each path vertex, in the same order as `path_vertices`.
    pub successors: Vec<Vec<usize>>,
}

impl CitbHostGraph {
    /// Host for a path of `path_len` vertices. Requires `path_len >= 1`.
    pub fn with_path_len(path_len: usize) -> Result<Self> {
        if path_len == 0 {
            return Err(Error::EmptyGraph);
        }
        let num_cycle = path_len.saturating_sub(2);
        let path_index = |j: usize| j - 1;
        let cycle_index = |k: usize| path_len + (k - 3);

        let mut edges = Vec::with_capacity(path_len - 1 + 2 * num_cycle);
        edges.extend((1..path_len).map(|j| (path_index(j), path_index(j + 1))));
        for k in 3..=path_len {
            edges.push((path_index(1), cycle_index(k)));
            edges.push((path_index(k), cycle_index(k)));
        }

        let mut labels: Vec<String> = (1..=path_len).map(|j| j.to_string()).collect();
        labels.extend((3..=path_len).map(|k| format!("(1,{k})")));
        let graph = Graph::new(path_len + num_cycle, edges)?.with_labels(labels)?;

        let successors = (1..=path_len)
            .map(|j| {
                let mut out = Vec::with_capacity(2);
                if j < path_len {
                    out.push(path_index(j + 1));
                }
                if j >= 3 {
                    out.push(cycle_index(j));
                }
                out
            })
            .collect();

        Ok(CitbHostGraph {
            graph,
            path_vertices: (1..=path_len).map(path_index).collect(),
            cycle_vertices: (3..=path_len).map(cycle_index).collect(),
            successors,
        })
    }

    pub fn path_len(&self) -> usize {
        self.path_vertices.len()
    }

    /// Vertex index of path vertex `j` (1-based).
    pub fn path_vertex(&self, j: usize) -> usize {
        self.path_vertices[j - 1]
    }

    /// Vertex index of cycle vertex `(1,k)`, `3 <= k <= path_len`.
    pub fn cycle_vertex(&self, k: usize) -> usize {
        self.cycle_vertices[k - 3]
    }

    /// All directed edges `u → v`, including `(1,k) → 1`.
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (pos, succ) in self.successors.iter().enumerate() {
            out.extend(succ.iter().map(|&v| (self.path_vertices[pos], v)));
        }
        out.extend(self.cycle_vertices.iter().map(|&c| (c, self.path_vertex(1))));
        out
    }
}

/// Coil host graph for `Q_n`: `2ⁿ − 1` path vertices and `2ⁿ − 3` cycle
/// vertices, `2ⁿ⁺¹ − 4` in total.
pub fn citb_host_graph(n: usize) -> Result<CitbHostGraph> {
    if !(2..=MAX_HYPERCUBE_DIM).contains(&n) {
        return Err(Error::DimensionOutOfRange { n, min: 2, max: MAX_HYPERCUBE_DIM });
    }
    CitbHostGraph::with_path_len((1 << n) - 1)
}
