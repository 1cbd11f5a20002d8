//! Turning bit vectors back into embeddings, and checking snakes and coils
//! with plain graph predicates.
//!
//! Term energies are recomputed from their definitions on the raw bits and
//! never read off the [`Qubo`](crate::qubo::Qubo), so a builder bug cannot
//! certify itself.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulations::{ProblemInstance, ProblemKind};
use crate::graphs::{self, Graph};
use crate::qubo::Assignment;

/// Unweighted values of each penalty term. `h_c`/`h_r` are absent for
/// formulations that do not have them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TermEnergies {
    #[serde(rename = "H_A")]
    pub h_a: i64,
    #[serde(rename = "H_B")]
    pub h_b: i64,
    #[serde(rename = "H_O")]
    pub h_o: i64,
    #[serde(rename = "H_C", default, skip_serializing_if = "Option::is_none")]
    pub h_c: Option<i64>,
    #[serde(rename = "H_R", default, skip_serializing_if = "Option::is_none")]
    pub h_r: Option<i64>,
}

impl TermEnergies {
    /// `αH_A + βH_B + γH_O + δH_C + εH_R` (just `H_A + H_B` for the plain
    /// induced subgraph formulation).
    pub fn weighted_total(&self, inst: &ProblemInstance) -> i64 {
        let w = &inst.weights;
        if inst.kind == ProblemKind::InducedSubgraph {
            return self.h_a + self.h_b;
        }
        w.alpha * self.h_a
            + w.beta * self.h_b
            + w.gamma * self.h_o
            + w.delta * self.h_c.unwrap_or(0)
            + w.epsilon * self.h_r.unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedSolution {
    /// Pairs `(u, i)` with `x_{u,i} = 1`, ordered by `u` then `i`.
    pub phi: Vec<(usize, usize)>,
    pub a_x: BTreeSet<usize>,
    pub b_x: BTreeSet<usize>,
    pub term_energies: TermEnergies,
    /// `V₂` indices of the decoded snake or coil, in walk order.
    pub sequence: Vec<usize>,
    /// Labels of `sequence` in `G₂`.
    pub sequence_labels: Vec<String>,
    pub valid: bool,
    pub reason: Option<String>,
}

fn sq(v: i64) -> i64 {
    v * v
}

fn compute_terms(inst: &ProblemInstance, bits: &[bool]) -> TermEnergies {
    let l = &inst.layout;
    let x = |u: usize, i: usize| bits[l.x(u, i)] as i64;
    let p = |u: usize| bits[l.p(u)] as i64;

    let mut h_a = 0;
    for u in 0..l.v1_size {
        let head = if l.has_p { p(u) } else { 1 };
        h_a += sq(head - (0..l.v2_size).map(|i| x(u, i)).sum::<i64>());
    }
    for i in 0..l.v2_size {
        h_a += sq(bits[l.s(i)] as i64 - (0..l.v1_size).map(|u| x(u, i)).sum::<i64>());
    }

    let cells: Vec<(usize, usize)> = (0..l.v1_size)
        .flat_map(|u| (0..l.v2_size).map(move |i| (u, i)))
        .filter(|&(u, i)| x(u, i) == 1)
        .collect();
    let mut h_b = 0;
    for (a, &(u, i)) in cells.iter().enumerate() {
        for &(v, j) in &cells[a + 1..] {
            if u != v && i != j && inst.g1.has_edge(u, v) != inst.g2.has_edge(i, j) {
                h_b += 1;
            }
        }
    }

    let h_o = if l.has_p { -(0..l.v1_size).map(p).sum::<i64>() } else { 0 };

    let (h_c, h_r) = if let (true, Some(v0)) = (inst.kind.is_path_like(), inst.anchor) {
        let chain = sq(1 - p(v0)) + inst.g1.edges().iter().map(|&(u, v)| sq(p(u) - p(v))).sum::<i64>();
        (Some(chain), None)
    } else if let Some(host) = &inst.citb_structure {
        let one = sq(1 - host.cycle_vertices.iter().map(|&c| p(c)).sum::<i64>());
        let routed = host
            .path_vertices
            .iter()
            .zip(&host.successors)
            .map(|(&u, succ)| sq(p(u) - succ.iter().map(|&v| p(v)).sum::<i64>()))
            .sum();
        (Some(one), Some(routed))
    } else {
        (None, None)
    };

    TermEnergies { h_a, h_b, h_o, h_c, h_r }
}

/// Checks that `phi` is a function on its domain, injective, and preserves
/// adjacency and non-adjacency between `G₁` and `G₂`.
fn embedding_violation(inst: &ProblemInstance, phi: &[(usize, usize)]) -> Option<String> {
    for w in phi.windows(2) {
        if w[0].0 == w[1].0 {
            return Some(format!("host vertex {} is mapped to more than one target vertex", inst.g1.label(w[0].0)));
        }
    }
    let mut targets = BTreeSet::new();
    for &(u, i) in phi {
        if !targets.insert(i) {
            return Some(format!("target vertex {} is hit twice (second by {})", inst.g2.label(i), inst.g1.label(u)));
        }
    }
    for (a, &(u, i)) in phi.iter().enumerate() {
        for &(v, j) in &phi[a + 1..] {
            if inst.g1.has_edge(u, v) != inst.g2.has_edge(i, j) {
                return Some(format!(
                    "adjacency of {}–{} differs from {}–{}",
                    inst.g1.label(u),
                    inst.g1.label(v),
                    inst.g2.label(i),
                    inst.g2.label(j)
                ));
            }
        }
    }
    None
}

/// Decodes `a` against `inst`. A valid decode needs `H_A = 0` (the `p` and
/// `s` indicators agree with the `x` block) and the shape required by the
/// problem kind:
///
/// * `sitb` / `longest_induced_path`: a structure-preserving injection whose
///   domain is a prefix `v₀, v₁, …` of the path host.
/// * `citb` / `longest_induced_cycle`: domain exactly `{1..m} ∪ {(1,m)}`
///   for some `m >= 3`.
/// * `mcis`: any structure-preserving injection.
/// * `induced_subgraph`: a structure-preserving injection defined on all of `V₁`.
pub fn decode(inst: &ProblemInstance, a: &Assignment) -> Result<DecodedSolution> {
    if a.len() != inst.num_vars() {
        return Err(Error::LengthMismatch { expected: inst.num_vars(), found: a.len() });
    }
    let bits = a.bits();
    let l = &inst.layout;
    let phi: Vec<(usize, usize)> = (0..l.v1_size)
        .flat_map(|u| (0..l.v2_size).map(move |i| (u, i)))
        .filter(|&(u, i)| bits[l.x(u, i)])
        .collect();
    let a_x: BTreeSet<usize> = phi.iter().map(|&(u, _)| u).collect();
    let b_x: BTreeSet<usize> = phi.iter().map(|&(_, i)| i).collect();
    let term_energies = compute_terms(inst, bits);

    let image = |u: usize| phi.iter().find(|&&(v, _)| v == u).map(|&(_, i)| i).expect("u in a_x");

    let mut sequence = Vec::new();
    let mut reason = if phi.is_empty() && inst.kind != ProblemKind::Mcis {
        Some("empty selection".to_string())
    } else {
        embedding_violation(inst, &phi).or_else(|| {
            (term_energies.h_a != 0)
                .then(|| format!("indicator bits disagree with the mapping (H_A = {})", term_energies.h_a))
        })
    };

    if reason.is_none() {
        match inst.kind {
            ProblemKind::Sitb | ProblemKind::LongestInducedPath => {
                let m = a_x.len();
                if a_x.iter().copied().eq(0..m) {
                    sequence = (0..m).map(image).collect();
                } else {
                    reason = Some(format!("selected path vertices {a_x:?} are not a prefix anchored at v₀"));
                }
            }
            ProblemKind::Citb | ProblemKind::LongestInducedCycle => {
                let host = inst.citb_structure.as_ref().expect("cycle-like instance carries its host");
                let chosen_cycle: Vec<usize> = (3..=host.path_len()).filter(|&k| a_x.contains(&host.cycle_vertex(k))).collect();
                match chosen_cycle.as_slice() {
                    [m] => {
                        let m = *m;
                        let mut expected: BTreeSet<usize> = (1..=m).map(|j| host.path_vertex(j)).collect();
                        expected.insert(host.cycle_vertex(m));
                        if expected == a_x {
                            sequence = (1..=m).map(|j| image(host.path_vertex(j))).collect();
                            sequence.push(image(host.cycle_vertex(m)));
                        } else {
                            reason = Some(format!("selection is not {{1..{m}}} ∪ {{(1,{m})}}"));
                        }
                    }
                    [] => reason = Some("no cycle vertex selected".into()),
                    _ => reason = Some(format!("{} cycle vertices selected", chosen_cycle.len())),
                }
            }
            ProblemKind::InducedSubgraph => {
                if a_x.len() != l.v1_size {
                    reason = Some(format!("only {} of {} host vertices are mapped", a_x.len(), l.v1_size));
                }
            }
            ProblemKind::Mcis => {}
        }
    }

    // Independent cross-check on the target graph alone.
    if reason.is_none() && !sequence.is_empty() {
        let check = if inst.kind.is_path_like() {
            induced_path_violation(&inst.g2, &sequence)
        } else {
            induced_cycle_violation(&inst.g2, &sequence, 3)
        };
        reason = check;
    }

    let sequence_labels = sequence.iter().map(|&i| inst.g2.label(i)).collect();
    Ok(DecodedSolution {
        phi,
        a_x,
        b_x,
        term_energies,
        valid: reason.is_none(),
        sequence,
        sequence_labels,
        reason,
    })
}

fn check_indices(g: &Graph, seq: &[usize]) -> Result<()> {
    seq.iter().try_for_each(|&v| g.check_vertex(v))
}

fn duplicate(g: &Graph, seq: &[usize]) -> Option<String> {
    let mut seen = BTreeSet::new();
    seq.iter().find(|&&v| !seen.insert(v)).map(|&v| format!("vertex {} repeats", g.label(v)))
}

/// First reason `seq` is not an induced path of `g`, if any.
pub fn induced_path_violation(g: &Graph, seq: &[usize]) -> Option<String> {
    if let Some(r) = duplicate(g, seq) {
        return Some(r);
    }
    for (a, &u) in seq.iter().enumerate() {
        for (b, &v) in seq.iter().enumerate().skip(a + 1) {
            let adjacent = g.has_edge(u, v);
            if b == a + 1 && !adjacent {
                return Some(format!("consecutive vertices {} and {} are not adjacent", g.label(u), g.label(v)));
            }
            if b > a + 1 && adjacent {
                return Some(format!("chord between {} and {}", g.label(u), g.label(v)));
            }
        }
    }
    None
}

/// First reason `seq` is not an induced cycle of `g` with at least
/// `min_len` vertices, if any.
pub fn induced_cycle_violation(g: &Graph, seq: &[usize], min_len: usize) -> Option<String> {
    let len = seq.len();
    if len < min_len.max(3) {
        return Some(format!("{len} vertices, a cycle needs at least {}", min_len.max(3)));
    }
    if let Some(r) = duplicate(g, seq) {
        return Some(r);
    }
    for (a, &u) in seq.iter().enumerate() {
        for (b, &v) in seq.iter().enumerate().skip(a + 1) {
            let consecutive = b == a + 1 || (a == 0 && b == len - 1);
            let adjacent = g.has_edge(u, v);
            if consecutive && !adjacent {
                return Some(format!("consecutive vertices {} and {} are not adjacent", g.label(u), g.label(v)));
            }
            if !consecutive && adjacent {
                return Some(format!("chord between {} and {}", g.label(u), g.label(v)));
            }
        }
    }
    None
}

/// Distinct vertices, consecutive pairs adjacent, no other pair adjacent.
pub fn is_induced_path(g: &Graph, seq: &[usize]) -> Result<bool> {
    check_indices(g, seq)?;
    Ok(induced_path_violation(g, seq).is_none())
}

/// Induced cycle on at least three vertices (closing edge included).
pub fn is_induced_cycle(g: &Graph, seq: &[usize]) -> Result<bool> {
    is_induced_cycle_min(g, seq, 3)
}

pub fn is_induced_cycle_min(g: &Graph, seq: &[usize], min_len: usize) -> Result<bool> {
    check_indices(g, seq)?;
    Ok(induced_cycle_violation(g, seq, min_len).is_none())
}

/// Smallest coil accepted in a hypercube; `Q_n` is bipartite.
pub const MIN_HYPERCUBE_COIL: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    Snake,
    Coil,
}

impl SequenceKind {
    /// Length in edges of a walk over `vertices` vertices.
    pub fn length(self, vertices: usize) -> usize {
        match self {
            SequenceKind::Snake => vertices.saturating_sub(1),
            SequenceKind::Coil => vertices,
        }
    }
}

impl std::str::FromStr for SequenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snake" | "sitb" | "path" => Ok(SequenceKind::Snake),
            "coil" | "citb" | "cycle" => Ok(SequenceKind::Coil),
            other => Err(Error::InvalidConfig(format!("unknown sequence kind {other:?}"))),
        }
    }
}

/// Verification report, one JSON object per check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub valid: bool,
    pub reason: Option<String>,
    pub kind: String,
    pub n: Option<usize>,
    /// Edges for snakes and coils, mapped vertices otherwise.
    pub length: usize,
    pub sequence: Vec<String>,
    pub term_energies: Option<TermEnergies>,
    pub total_energy: Option<i64>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization is infallible")
    }
}

/// Parses comma-separated bitstrings such as `010,000,100`.
pub fn parse_sequence(text: &str) -> Vec<String> {
    text.split(|c: char| c == ',' || c.is_whitespace() || c == '→')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty() && *s != "->")
        .map(str::to_string)
        .collect()
}

/// Checks hypercube labels as a snake or coil of `Q_n`.
pub fn verify_sequence(kind: SequenceKind, n: usize, labels: &[String]) -> Result<VerifyReport> {
    let cube = graphs::hypercube(n)?;
    let seq = labels.iter().map(|l| graphs::parse_bit_label(l, n)).collect::<Result<Vec<_>>>()?;
    let reason = match kind {
        SequenceKind::Snake => induced_path_violation(&cube, &seq),
        SequenceKind::Coil => induced_cycle_violation(&cube, &seq, MIN_HYPERCUBE_COIL),
    };
    Ok(VerifyReport {
        valid: reason.is_none(),
        reason,
        kind: match kind {
            SequenceKind::Snake => "snake".into(),
            SequenceKind::Coil => "coil".into(),
        },
        n: Some(n),
        length: kind.length(seq.len()),
        sequence: seq.iter().map(|&v| cube.label(v)).collect(),
        term_energies: None,
        total_energy: None,
    })
}

/// Report for a decoded assignment, with term energies and the weighted total.
pub fn decode_report(inst: &ProblemInstance, a: &Assignment) -> Result<VerifyReport> {
    let d = decode(inst, a)?;
    let length = if inst.kind.is_path_like() {
        SequenceKind::Snake.length(d.sequence.len())
    } else if inst.kind.is_cycle_like() {
        SequenceKind::Coil.length(d.sequence.len())
    } else {
        d.a_x.len()
    };
    Ok(VerifyReport {
        valid: d.valid,
        reason: d.reason.clone(),
        kind: inst.kind.to_string(),
        n: inst.n,
        length,
        sequence: d.sequence_labels.clone(),
        term_energies: Some(d.term_energies),
        total_energy: Some(d.term_energies.weighted_total(inst)),
    })
}
