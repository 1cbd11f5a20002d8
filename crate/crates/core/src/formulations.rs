//! Penalty QUBOs for induced subgraph, maximum common induced subgraph,
//! snake-in-the-box and coil-in-the-box, plus their generalizations to
//! longest induced paths and cycles in arbitrary graphs.
//!
//! Every formulation maps vertices `u ∈ V₁` onto `i ∈ V₂` through
//! `x_{u,i}`, marks used host vertices with `p_u` and used target vertices
//! with `s_i`:
//!
//! ```text
//! H_A = Σ_u (p_u − Σ_i x_{u,i})² + Σ_i (s_i − Σ_u x_{u,i})²
//! H_B = Σ_{uv ∈ E₁} Σ_{ij ∉ E₂} x_{u,i} x_{v,j} + Σ_{uv ∉ E₁} Σ_{ij ∈ E₂} x_{u,i} x_{v,j}
//! H_O = −Σ_u p_u
//! ```
//!
//! The snake formulation adds `H_C = (1 − p_{v₀})² + Σ_{uv ∈ E₁} (p_u − p_v)²`
//! on a path host. The coil formulation uses the oriented host of
//! [`CitbHostGraph`] with `H_C = (1 − Σ_{cycle} p_u)²` and
//! `H_R = Σ_{u ∈ path} (p_u − Σ_{u→v} p_v)²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{self, CitbHostGraph, Graph};
use crate::qubo::{LinearExpr, Qubo};

/// Largest `n` the hypercube builders accept without an explicit override.
pub const DESK_SCALE_MAX_N: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    InducedSubgraph,
    Mcis,
    Sitb,
    Citb,
    LongestInducedPath,
    LongestInducedCycle,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::InducedSubgraph => "induced_subgraph",
            ProblemKind::Mcis => "mcis",
            ProblemKind::Sitb => "sitb",
            ProblemKind::Citb => "citb",
            ProblemKind::LongestInducedPath => "longest_induced_path",
            ProblemKind::LongestInducedCycle => "longest_induced_cycle",
        }
    }

    /// Snake-shaped formulations (path host, `H_C` anchored at `v₀`).
    pub fn is_path_like(self) -> bool {
        matches!(self, ProblemKind::Sitb | ProblemKind::LongestInducedPath)
    }

    /// Coil-shaped formulations (oriented host, `H_C` and `H_R`).
    pub fn is_cycle_like(self) -> bool {
        matches!(self, ProblemKind::Citb | ProblemKind::LongestInducedCycle)
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "induced_subgraph" | "induced-subgraph" => ProblemKind::InducedSubgraph,
            "mcis" => ProblemKind::Mcis,
            "sitb" | "snake" => ProblemKind::Sitb,
            "citb" | "coil" => ProblemKind::Citb,
            "longest_induced_path" | "longest-induced-path" | "lip" => ProblemKind::LongestInducedPath,
            "longest_induced_cycle" | "longest-induced-cycle" | "lic" => ProblemKind::LongestInducedCycle,
            other => return Err(Error::InvalidConfig(format!("unknown problem kind {other:?}"))),
        })
    }
}

/// Flat indexing of `x_{u,i}`, `p_u` and `s_i`.
///
/// `x(u,i) = u·|V₂| + i`, then the `p` block (absent for the plain induced
/// subgraph formulation), then the `s` block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableLayout {
    pub v1_size: usize,
    pub v2_size: usize,
    pub has_p: bool,
}

impl VariableLayout {
    pub fn new(v1_size: usize, v2_size: usize) -> Self {
        VariableLayout { v1_size, v2_size, has_p: true }
    }

    pub fn without_p(v1_size: usize, v2_size: usize) -> Self {
        VariableLayout { v1_size, v2_size, has_p: false }
    }

    #[inline]
    pub fn x(&self, u: usize, i: usize) -> usize {
        debug_assert!(u < self.v1_size && i < self.v2_size);
        u * self.v2_size + i
    }

    /// Panics when the layout has no `p` block.
    #[inline]
    pub fn p(&self, u: usize) -> usize {
        assert!(self.has_p, "layout has no p variables");
        self.v1_size * self.v2_size + u
    }

    #[inline]
    pub fn s(&self, i: usize) -> usize {
        let p_block = if self.has_p { self.v1_size } else { 0 };
        self.v1_size * self.v2_size + p_block + i
    }

    pub fn total(&self) -> usize {
        self.v1_size * self.v2_size + if self.has_p { self.v1_size } else { 0 } + self.v2_size
    }
}

/// Multipliers of `H_A, H_B, H_O, H_C, H_R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    pub delta: i64,
    pub epsilon: i64,
}

impl PenaltyWeights {
    pub const UNIT: PenaltyWeights = PenaltyWeights { alpha: 1, beta: 1, gamma: 1, delta: 1, epsilon: 1 };

    /// Checks the strict inequalities under which the QUBO minimum encodes
    /// an optimum of `kind`. `v2_size` is the order of the target graph.
    pub fn validate(&self, kind: ProblemKind, v2_size: usize) -> Result<()> {
        let w = self;
        let size = v2_size as i128;
        let (a, b, g, d, e) = (w.alpha as i128, w.beta as i128, w.gamma as i128, w.delta as i128, w.epsilon as i128);
        let bound_name = if matches!(kind, ProblemKind::Sitb | ProblemKind::Citb) { "2ⁿγ" } else { "|V₂|γ" };

        let mut named: Vec<(&str, i64)> = vec![("α", w.alpha), ("β", w.beta), ("γ", w.gamma)];
        match kind {
            ProblemKind::InducedSubgraph => return Ok(()),
            ProblemKind::Mcis => {}
            ProblemKind::Sitb | ProblemKind::LongestInducedPath => named.push(("δ", w.delta)),
            ProblemKind::Citb | ProblemKind::LongestInducedCycle => {
                named.push(("δ", w.delta));
                named.push(("ε", w.epsilon));
            }
        }
        for (name, value) in named {
            if value <= 0 {
                return Err(violation(format!("{name} > 0"), format!("{name} = {value}")));
            }
        }

        let strict = |lhs: i128, rhs: i128, ineq: &str, detail: String| -> Result<()> {
            if lhs > rhs { Ok(()) } else { Err(violation(ineq.to_string(), detail)) }
        };
        match kind {
            ProblemKind::InducedSubgraph => Ok(()),
            ProblemKind::Mcis => {
                strict(a, g, "α > γ", format!("α = {a}, γ = {g}"))?;
                strict(b, g, "β > γ", format!("β = {b}, γ = {g}"))
            }
            ProblemKind::Sitb | ProblemKind::LongestInducedPath => {
                let rhs = g + 2 * d;
                strict(a, rhs, "α > γ + 2δ", format!("α = {a}, γ + 2δ = {rhs}"))?;
                strict(b, rhs, "β > γ + 2δ", format!("β = {b}, γ + 2δ = {rhs}"))?;
                let ineq = format!("δ > {bound_name}");
                strict(d, size * g, &ineq, format!("δ = {d}, {bound_name} = {}", size * g))
            }
            ProblemKind::Citb | ProblemKind::LongestInducedCycle => {
                let rhs = g + d + e;
                strict(a, rhs, "α > γ + δ + ε", format!("α = {a}, γ + δ + ε = {rhs}"))?;
                strict(b, rhs, "β > γ + δ + ε", format!("β = {b}, γ + δ + ε = {rhs}"))?;
                let ineq = format!("δ > {bound_name}");
                strict(d, size * g, &ineq, format!("δ = {d}, {bound_name} = {}", size * g))?;
                let ineq = format!("ε > {bound_name}");
                strict(e, size * g, &ineq, format!("ε = {e}, {bound_name} = {}", size * g))
            }
        }
    }
}

fn violation(inequality: String, detail: String) -> Error {
    Error::WeightViolation { inequality, detail }
}

/// Smallest integer weights with `γ = 1` that satisfy the strict
/// inequalities for `kind`.
pub fn default_weights(kind: ProblemKind, v2_size: usize) -> PenaltyWeights {
    let gamma = 1;
    let size = v2_size.max(1) as i64;
    match kind {
        ProblemKind::InducedSubgraph => PenaltyWeights::UNIT,
        ProblemKind::Mcis => PenaltyWeights { alpha: 2, beta: 2, gamma, delta: 1, epsilon: 1 },
        ProblemKind::Sitb | ProblemKind::LongestInducedPath => {
            let delta = size * gamma + 1;
            let alpha = gamma + 2 * delta + 1;
            PenaltyWeights { alpha, beta: alpha, gamma, delta, epsilon: 1 }
        }
        ProblemKind::Citb | ProblemKind::LongestInducedCycle => {
            let delta = size * gamma + 1;
            let epsilon = delta;
            let alpha = gamma + delta + epsilon + 1;
            PenaltyWeights { alpha, beta: alpha, gamma, delta, epsilon }
        }
    }
}

/// Everything needed to interpret an assignment of a built QUBO.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    pub kind: ProblemKind,
    /// Hypercube dimension for `sitb`/`citb`.
    pub n: Option<usize>,
    pub g1: Graph,
    pub g2: Graph,
    pub layout: VariableLayout,
    pub weights: PenaltyWeights,
    pub citb_structure: Option<CitbHostGraph>,
    pub anchor: Option<usize>,
}

/// The `meta` object stored next to a QUBO in its JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub problem: ProblemKind,
    pub n: Option<usize>,
    pub v1_size: usize,
    pub v2_size: usize,
    pub weights: PenaltyWeights,
    pub anchor: Option<usize>,
    /// Host graph, present when it cannot be rebuilt from `n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g1: Option<Graph>,
    /// Target graph, present when it cannot be rebuilt from `n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2: Option<Graph>,
}

impl ProblemInstance {
    pub fn num_vars(&self) -> usize {
        self.layout.total()
    }

    pub fn meta(&self) -> InstanceMeta {
        let explicit = self.n.is_none();
        // Path and cycle hosts are determined by |V₂|.
        let host_derivable = self.kind.is_path_like() || self.kind.is_cycle_like();
        InstanceMeta {
            problem: self.kind,
            n: self.n,
            v1_size: self.layout.v1_size,
            v2_size: self.layout.v2_size,
            weights: self.weights,
            anchor: self.anchor,
            g1: (explicit && !host_derivable).then(|| self.g1.clone()),
            g2: explicit.then(|| self.g2.clone()),
        }
    }

    pub fn meta_json(&self) -> serde_json::Value {
        serde_json::to_value(self.meta()).expect("meta serialization is infallible")
    }

    /// Rebuilds the instance described by `meta` and checks it against the
    /// recorded sizes.
    pub fn from_meta(meta: &InstanceMeta) -> Result<ProblemInstance> {
        let missing = |what: &str| Error::Malformed(format!("meta for {} lacks {what}", meta.problem));
        let (_, inst) = match meta.problem {
            ProblemKind::Sitb => {
                build_sitb_with_limit(meta.n.ok_or_else(|| missing("n"))?, &meta.weights, graphs::MAX_HYPERCUBE_DIM)?
            }
            ProblemKind::Citb => {
                build_citb_with_limit(meta.n.ok_or_else(|| missing("n"))?, &meta.weights, graphs::MAX_HYPERCUBE_DIM)?
            }
            ProblemKind::LongestInducedPath => {
                build_longest_induced_path(meta.g2.as_ref().ok_or_else(|| missing("g2"))?, &meta.weights)?
            }
            ProblemKind::LongestInducedCycle => {
                build_longest_induced_cycle(meta.g2.as_ref().ok_or_else(|| missing("g2"))?, &meta.weights)?
            }
            ProblemKind::Mcis => build_mcis(
                meta.g1.as_ref().ok_or_else(|| missing("g1"))?,
                meta.g2.as_ref().ok_or_else(|| missing("g2"))?,
                &meta.weights,
            )?,
            ProblemKind::InducedSubgraph => build_induced_subgraph(
                meta.g1.as_ref().ok_or_else(|| missing("g1"))?,
                meta.g2.as_ref().ok_or_else(|| missing("g2"))?,
            )?,
        };
        if inst.layout.v1_size != meta.v1_size || inst.layout.v2_size != meta.v2_size || inst.anchor != meta.anchor {
            return Err(Error::Malformed("meta sizes do not match the rebuilt instance".into()));
        }
        Ok(inst)
    }

    pub fn from_meta_json(value: &serde_json::Value) -> Result<ProblemInstance> {
        let meta: InstanceMeta = serde_json::from_value(value.clone())?;
        Self::from_meta(&meta)
    }
}

fn check_nonempty(g: &Graph) -> Result<()> {
    if g.num_vertices() == 0 { Err(Error::EmptyGraph) } else { Ok(()) }
}

fn check_dimension(n: usize, min: usize, max: usize) -> Result<()> {
    if (min..=max).contains(&n) { Ok(()) } else { Err(Error::DimensionOutOfRange { n, min, max }) }
}

/// `Σ_u (head(u) − Σ_i x_{u,i})² + Σ_i (s_i − Σ_u x_{u,i})²` with
/// `head(u) = p_u`, or the constant 1 when the layout has no `p` block.
fn add_injectivity(q: &mut Qubo, layout: &VariableLayout, weight: i64) -> Result<()> {
    for u in 0..layout.v1_size {
        let mut e = if layout.has_p {
            LinearExpr::constant(0).term(layout.p(u), 1)
        } else {
            LinearExpr::constant(1)
        };
        for i in 0..layout.v2_size {
            e.add_term(layout.x(u, i), -1);
        }
        q.add_square(&e, weight)?;
    }
    for i in 0..layout.v2_size {
        let mut e = LinearExpr::constant(0).term(layout.s(i), 1);
        for u in 0..layout.v1_size {
            e.add_term(layout.x(u, i), -1);
        }
        q.add_square(&e, weight)?;
    }
    Ok(())
}

/// Edge-mismatch monomials over unordered `{u,v}` and ordered `(i,j)`, `i ≠ j`.
fn add_structure(q: &mut Qubo, layout: &VariableLayout, g1: &Graph, g2: &Graph, weight: i64) -> Result<()> {
    let (n1, n2) = (layout.v1_size, layout.v2_size);
    for u in 0..n1 {
        for v in u + 1..n1 {
            let host_edge = g1.has_edge(u, v);
            for i in 0..n2 {
                for j in 0..n2 {
                    if i != j && g2.has_edge(i, j) != host_edge {
                        q.add_product(layout.x(u, i), layout.x(v, j), weight)?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn add_objective(q: &mut Qubo, layout: &VariableLayout, weight: i64) -> Result<()> {
    for u in 0..layout.v1_size {
        q.add_linear(layout.p(u), -weight)?;
    }
    Ok(())
}

/// `Q = H_A + H_B` with `1` in place of `p_u`; minimum 0 iff `g1` is an
/// induced subgraph of `g2`.
pub fn build_induced_subgraph(g1: &Graph, g2: &Graph) -> Result<(Qubo, ProblemInstance)> {
    check_nonempty(g1)?;
    check_nonempty(g2)?;
    let layout = VariableLayout::without_p(g1.num_vertices(), g2.num_vertices());
    let mut q = Qubo::new(layout.total());
    add_injectivity(&mut q, &layout, 1)?;
    add_structure(&mut q, &layout, g1, g2, 1)?;
    let inst = ProblemInstance {
        kind: ProblemKind::InducedSubgraph,
        n: None,
        g1: g1.clone(),
        g2: g2.clone(),
        layout,
        weights: PenaltyWeights::UNIT,
        citb_structure: None,
        anchor: None,
    };
    Ok((q, inst))
}

/// `Q = αH_A + βH_B + γH_O`; minimum `−γ·|MCIS|` when `α, β > γ`.
pub fn build_mcis(g1: &Graph, g2: &Graph, w: &PenaltyWeights) -> Result<(Qubo, ProblemInstance)> {
    check_nonempty(g1)?;
    check_nonempty(g2)?;
    w.validate(ProblemKind::Mcis, g2.num_vertices())?;
    let layout = VariableLayout::new(g1.num_vertices(), g2.num_vertices());
    let mut q = Qubo::new(layout.total());
    add_injectivity(&mut q, &layout, w.alpha)?;
    add_structure(&mut q, &layout, g1, g2, w.beta)?;
    add_objective(&mut q, &layout, w.gamma)?;
    let inst = ProblemInstance {
        kind: ProblemKind::Mcis,
        n: None,
        g1: g1.clone(),
        g2: g2.clone(),
        layout,
        weights: *w,
        citb_structure: None,
        anchor: None,
    };
    Ok((q, inst))
}

fn build_path_like(kind: ProblemKind, n: Option<usize>, g: &Graph, w: &PenaltyWeights) -> Result<(Qubo, ProblemInstance)> {
    check_nonempty(g)?;
    w.validate(kind, g.num_vertices())?;
    let g1 = graphs::path(g.num_vertices())?;
    let anchor = 0;
    let layout = VariableLayout::new(g1.num_vertices(), g.num_vertices());
    let mut q = Qubo::new(layout.total());
    add_injectivity(&mut q, &layout, w.alpha)?;
    add_structure(&mut q, &layout, &g1, g, w.beta)?;
    add_objective(&mut q, &layout, w.gamma)?;

    q.add_square(&LinearExpr::constant(1).term(layout.p(anchor), -1), w.delta)?;
    for &(u, v) in g1.edges() {
        q.add_square(&LinearExpr::constant(0).term(layout.p(u), 1).term(layout.p(v), -1), w.delta)?;
    }

    let inst = ProblemInstance {
        kind,
        n,
        g1,
        g2: g.clone(),
        layout,
        weights: *w,
        citb_structure: None,
        anchor: Some(anchor),
    };
    Ok((q, inst))
}

fn build_cycle_like(kind: ProblemKind, n: Option<usize>, g: &Graph, w: &PenaltyWeights) -> Result<(Qubo, ProblemInstance)> {
    if g.num_vertices() < 3 {
        return Err(Error::GraphTooSmall { found: g.num_vertices(), min: 3 });
    }
    w.validate(kind, g.num_vertices())?;
    let host = CitbHostGraph::with_path_len(g.num_vertices() - 1)?;
    let layout = VariableLayout::new(host.graph.num_vertices(), g.num_vertices());
    let mut q = Qubo::new(layout.total());
    add_injectivity(&mut q, &layout, w.alpha)?;
    add_structure(&mut q, &layout, &host.graph, g, w.beta)?;
    add_objective(&mut q, &layout, w.gamma)?;

    let mut one_cycle_vertex = LinearExpr::constant(1);
    for &c in &host.cycle_vertices {
        one_cycle_vertex.add_term(layout.p(c), -1);
    }
    q.add_square(&one_cycle_vertex, w.delta)?;

    for (&u, succ) in host.path_vertices.iter().zip(&host.successors) {
        let mut e = LinearExpr::constant(0).term(layout.p(u), 1);
        for &v in succ {
            e.add_term(layout.p(v), -1);
        }
        q.add_square(&e, w.epsilon)?;
    }

    let inst = ProblemInstance {
        kind,
        n,
        g1: host.graph.clone(),
        g2: g.clone(),
        layout,
        weights: *w,
        citb_structure: Some(host),
        anchor: None,
    };
    Ok((q, inst))
}

/// Snake-in-the-box on `Q_n`, `1 <= n <= 5`.
pub fn build_sitb(n: usize, w: &PenaltyWeights) -> Result<(Qubo, ProblemInstance)> {
    build_sitb_with_limit(n, w, DESK_SCALE_MAX_N)
}

/// [`build_sitb`] with a caller-chosen upper bound on `n`.
pub fn build_sitb_with_limit(n: usize, w: &PenaltyWeights, max_n: usize) -> Result<(Qubo, ProblemInstance)> {
    check_dimension(n, 1, max_n.min(graphs::MAX_HYPERCUBE_DIM))?;
    build_path_like(ProblemKind::Sitb, Some(n), &graphs::hypercube(n)?, w)
}

/// Coil-in-the-box on `Q_n`, `2 <= n <= 5`.
pub fn build_citb(n: usize, w: &PenaltyWeights) -> Result<(Qubo, ProblemInstance)> {
    build_citb_with_limit(n, w, DESK_SCALE_MAX_N)
}

/// [`build_citb`] with a caller-chosen upper bound on `n`.
pub fn build_citb_with_limit(n: usize, w: &PenaltyWeights, max_n: usize) -> Result<(Qubo, ProblemInstance)> {
    check_dimension(n, 2, max_n.min(graphs::MAX_HYPERCUBE_DIM))?;
    build_cycle_like(ProblemKind::Citb, Some(n), &graphs::hypercube(n)?, w)
}

/// Snake formulation with `G₂ = g` and host `P_{|V(g)|}`.
pub fn build_longest_induced_path(g: &Graph, w: &PenaltyWeights) -> Result<(Qubo, ProblemInstance)> {
    build_path_like(ProblemKind::LongestInducedPath, None, g, w)
}

/// Coil formulation with `G₂ = g`; the host has `|V(g)| − 1` path vertices
/// and cycle vertices `(1,k)` for `3 <= k <= |V(g)| − 1`, so the shortest
/// representable cycle has four vertices.
pub fn build_longest_induced_cycle(g: &Graph, w: &PenaltyWeights) -> Result<(Qubo, ProblemInstance)> {
    build_cycle_like(ProblemKind::LongestInducedCycle, None, g, w)
}
