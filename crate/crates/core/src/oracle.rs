//! Exact combinatorial baselines that never touch a QUBO.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::Graph;

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;
pub const DEFAULT_MCIS_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Length in edges.
    pub best_length: usize,
    pub witness: Vec<usize>,
    pub nodes_expanded: u64,
    /// `false` when the budget ran out before the search finished.
    pub exact: bool,
}

/// Search options shared by the path and cycle oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of DFS node expansions.
    pub budget: u64,
    /// Every vertex is equivalent under an automorphism (hypercubes), so a
    /// single start vertex suffices.
    pub vertex_transitive: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: DEFAULT_BUDGET, vertex_transitive: false }
    }
}

impl SearchOptions {
    pub fn transitive(budget: u64) -> Self {
        SearchOptions { budget, vertex_transitive: true }
    }
}

/// `cover[w]` counts the vertices on the current walk that equal or touch `w`.
struct Walk<'g> {
    g: &'g Graph,
    cover: Vec<u32>,
    stack: Vec<usize>,
    expanded: u64,
    budget: u64,
    out_of_budget: bool,
}

impl<'g> Walk<'g> {
    fn new(g: &'g Graph, budget: u64) -> Self {
        Walk { g, cover: vec![0; g.num_vertices()], stack: Vec::new(), expanded: 0, budget, out_of_budget: false }
    }

    fn push(&mut self, v: usize, counted: bool) {
        if counted {
            self.cover[v] += 1;
            for &w in self.g.neighbors(v) {
                self.cover[w] += 1;
            }
        }
        self.stack.push(v);
    }

    fn pop(&mut self, counted: bool) {
        let v = self.stack.pop().expect("non-empty walk");
        if counted {
            self.cover[v] -= 1;
            for &w in self.g.neighbors(v) {
                self.cover[w] -= 1;
            }
        }
    }

    /// Charges one expansion; `false` once the budget is exhausted.
    fn expand(&mut self) -> bool {
        if self.expanded >= self.budget {
            self.out_of_budget = true;
            return false;
        }
        self.expanded += 1;
        true
    }
}

fn extend_path(walk: &mut Walk, best: &mut Vec<usize>) {
    if !walk.expand() {
        return;
    }
    if walk.stack.len() > best.len() {
        best.clone_from(&walk.stack);
    }
    let tip = *walk.stack.last().expect("walk has a start");
    for &w in walk.g.neighbors(tip) {
        // Only the tip may touch w; anything else is a chord or a revisit.
        if walk.cover[w] == 1 {
            walk.push(w, true);
            extend_path(walk, best);
            walk.pop(true);
            if walk.out_of_budget {
                return;
            }
        }
    }
}

/// Longest induced path by exhaustive DFS. A partial path grows only into
/// neighbors of its tip that touch no earlier path vertex.
pub fn longest_induced_path(g: &Graph, opts: SearchOptions) -> Result<OracleResult> {
    if g.num_vertices() == 0 {
        return Err(Error::EmptyGraph);
    }
    let starts = if opts.vertex_transitive { 1 } else { g.num_vertices() };
    let mut walk = Walk::new(g, opts.budget);
    let mut best = Vec::new();
    for s in 0..starts {
        walk.push(s, true);
        extend_path(&mut walk, &mut best);
        walk.pop(true);
        if walk.out_of_budget {
            break;
        }
    }
    Ok(OracleResult {
        best_length: best.len().saturating_sub(1),
        witness: best,
        nodes_expanded: walk.expanded,
        exact: !walk.out_of_budget,
    })
}

/// Grows a path from the anchor `stack[0]` through vertices above it. The
/// anchor is left out of `cover`, so a step may touch it only to close.
fn extend_cycle(walk: &mut Walk, anchor: usize, best: &mut Vec<usize>) {
    if !walk.expand() {
        return;
    }
    let tip = *walk.stack.last().expect("walk has an anchor");
    let depth = walk.stack.len();
    for &w in walk.g.neighbors(tip) {
        if w <= anchor {
            continue;
        }
        let touches_anchor = walk.g.has_edge(w, anchor);
        let free = if depth == 1 { walk.cover[w] == 0 } else { walk.cover[w] == 1 };
        if !free {
            continue;
        }
        if touches_anchor {
            if depth >= 2 && depth + 1 > best.len() {
                best.clone_from(&walk.stack);
                best.push(w);
            }
            // Any longer walk through w would carry the chord w–anchor.
            if depth >= 2 {
                continue;
            }
        }
        walk.push(w, true);
        extend_cycle(walk, anchor, best);
        walk.pop(true);
        if walk.out_of_budget {
            return;
        }
    }
}

/// Longest induced cycle (0 when the graph has none). Each cycle is found
/// from its smallest vertex; the closing edge back to it is the only
/// adjacency to the anchor allowed after the first step.
pub fn longest_induced_cycle(g: &Graph, opts: SearchOptions) -> Result<OracleResult> {
    if g.num_vertices() == 0 {
        return Err(Error::EmptyGraph);
    }
    let anchors = if opts.vertex_transitive { 1 } else { g.num_vertices() };
    let mut walk = Walk::new(g, opts.budget);
    let mut best = Vec::new();
    for a in 0..anchors {
        walk.push(a, false);
        extend_cycle(&mut walk, a, &mut best);
        walk.pop(false);
        if walk.out_of_budget {
            break;
        }
    }
    Ok(OracleResult {
        best_length: best.len(),
        witness: best,
        nodes_expanded: walk.expanded,
        exact: !walk.out_of_budget,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct McisResult {
    /// Vertex count of the common induced subgraph.
    pub size: usize,
    /// `(u, i)` pairs of an optimal structure-preserving injection.
    pub mapping: Vec<(usize, usize)>,
}

struct McisSearch {
    adj1: Vec<Vec<bool>>,
    adj2: Vec<Vec<bool>>,
    used: Vec<bool>,
    current: Vec<(usize, usize)>,
    best: Vec<(usize, usize)>,
}

impl McisSearch {
    fn run(&mut self, u: usize) {
        let n1 = self.adj1.len();
        if self.current.len() > self.best.len() {
            self.best.clone_from(&self.current);
        }
        if u == n1 || self.current.len() + (n1 - u) <= self.best.len() {
            return;
        }
        for i in 0..self.adj2.len() {
            if self.used[i] {
                continue;
            }
            let consistent = self.current.iter().all(|&(v, j)| self.adj1[u][v] == self.adj2[i][j]);
            if consistent {
                self.used[i] = true;
                self.current.push((u, i));
                self.run(u + 1);
                self.current.pop();
                self.used[i] = false;
            }
        }
        self.run(u + 1);
    }
}

/// Maximum common induced subgraph by enumerating injective partial maps
/// `V₁ → V₂` in vertex order, pruning on adjacency mismatches and on the
/// count of host vertices left.
pub fn max_common_induced_subgraph(g1: &Graph, g2: &Graph, cap: usize) -> Result<McisResult> {
    for (what, g) in [("first graph", g1), ("second graph", g2)] {
        if g.num_vertices() > cap {
            return Err(Error::GraphOverCap { what, size: g.num_vertices(), cap });
        }
    }
    let mut search = McisSearch {
        adj1: g1.adjacency_matrix(),
        adj2: g2.adjacency_matrix(),
        used: vec![false; g2.num_vertices()],
        current: Vec::new(),
        best: Vec::new(),
    };
    search.run(0);
    Ok(McisResult { size: search.best.len(), mapping: search.best })
}

/// `true` when `g1` embeds in `g2` as an induced subgraph.
pub fn is_induced_subgraph(g1: &Graph, g2: &Graph, cap: usize) -> Result<bool> {
    Ok(max_common_induced_subgraph(g1, g2, cap)?.size == g1.num_vertices())
}
