//! Reproduction of the table of best known snake and coil lengths.

use serde::{Deserialize, Serialize};

use crate::decode::decode;
use crate::error::{Error, Result};
use crate::formulations::{build_citb_with_limit, build_sitb_with_limit, default_weights, ProblemKind};
use crate::graphs::hypercube;
use crate::oracle::{longest_induced_cycle, longest_induced_path, SearchOptions};
use crate::solver::{anneal, anneal_with_threads, exact_solve, AnnealConfig, EXACT_VAR_CAP};

/// Published snake and coil lengths (edges) for one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownValue {
    pub n: usize,
    pub sitb: usize,
    pub citb: usize,
    /// Proven optimal, as opposed to best known.
    pub proven: bool,
}

pub const KNOWN_VALUES: [KnownValue; 7] = [
    KnownValue { n: 1, sitb: 1, citb: 0, proven: true },
    KnownValue { n: 2, sitb: 2, citb: 4, proven: true },
    KnownValue { n: 3, sitb: 4, citb: 6, proven: true },
    KnownValue { n: 4, sitb: 7, citb: 8, proven: true },
    KnownValue { n: 5, sitb: 13, citb: 14, proven: true },
    KnownValue { n: 6, sitb: 26, citb: 26, proven: true },
    KnownValue { n: 7, sitb: 50, citb: 48, proven: true },
];

pub fn known_value(n: usize) -> Option<KnownValue> {
    KNOWN_VALUES.iter().copied().find(|k| k.n == n)
}

pub const ORACLE_TABLE_MAX_N: usize = 6;
pub const QUBO_TABLE_MAX_N: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableMode {
    Oracle,
    Qubo,
}

impl std::str::FromStr for TableMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(TableMode::Oracle),
            "qubo" => Ok(TableMode::Qubo),
            other => Err(Error::InvalidConfig(format!("unknown table mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Oracle,
    Exact,
    Anneal,
    /// No formulation exists (a coil in `Q_1`); the value is 0 by definition.
    Trivial,
}

impl Method {
    fn as_str(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Exact => "exact",
            Method::Anneal => "anneal",
            Method::Trivial => "trivial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    /// Length in edges of the best valid structure found.
    pub value: usize,
    pub method: Method,
    /// The method certifies optimality (exhaustive search finished).
    pub certified: bool,
    pub known: Option<usize>,
    pub agrees: Option<bool>,
}

impl Cell {
    fn new(value: usize, method: Method, certified: bool, known: Option<usize>) -> Self {
        Cell { value, method, certified, known, agrees: known.map(|k| k == value) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub sitb: Cell,
    pub citb: Cell,
    pub proven: Option<bool>,
}

impl TableRow {
    pub fn all_agree(&self) -> bool {
        self.sitb.agrees != Some(false) && self.citb.agrees != Some(false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableOptions {
    pub mode: TableMode,
    pub budget: u64,
    pub anneal: AnnealConfig,
    pub threads: Option<usize>,
}

pub fn oracle_row(n: usize, budget: u64) -> Result<TableRow> {
    let cube = hypercube(n)?;
    let known = known_value(n);
    let snake = longest_induced_path(&cube, SearchOptions::transitive(budget))?;
    let coil = longest_induced_cycle(&cube, SearchOptions::transitive(budget))?;
    Ok(TableRow {
        n,
        sitb: Cell::new(snake.best_length, Method::Oracle, snake.exact, known.map(|k| k.sitb)),
        citb: Cell::new(coil.best_length, Method::Oracle, coil.exact, known.map(|k| k.citb)),
        proven: known.map(|k| k.proven),
    })
}

fn qubo_cell(kind: ProblemKind, n: usize, opts: &TableOptions, known: Option<usize>) -> Result<Cell> {
    let v2 = 1usize << n;
    let w = default_weights(kind, v2);
    let (q, inst) = match kind {
        ProblemKind::Sitb => build_sitb_with_limit(n, &w, QUBO_TABLE_MAX_N)?,
        _ => build_citb_with_limit(n, &w, QUBO_TABLE_MAX_N)?,
    };
    let (result, method) = if q.num_vars() <= EXACT_VAR_CAP {
        (exact_solve(&q, EXACT_VAR_CAP)?, Method::Exact)
    } else {
        let r = match opts.threads {
            Some(t) => anneal_with_threads(&q, &opts.anneal, t)?,
            None => anneal(&q, &opts.anneal)?,
        };
        (r, Method::Anneal)
    };
    let d = decode(&inst, &result.best_assignment)?;
    let value = match (d.valid, kind) {
        (false, _) => 0,
        (true, ProblemKind::Sitb) => d.sequence.len().saturating_sub(1),
        (true, _) => d.sequence.len(),
    };
    Ok(Cell::new(value, method, method == Method::Exact, known))
}

pub fn qubo_row(n: usize, opts: &TableOptions) -> Result<TableRow> {
    let known = known_value(n);
    let sitb = qubo_cell(ProblemKind::Sitb, n, opts, known.map(|k| k.sitb))?;
    let citb = if n == 1 {
        Cell::new(0, Method::Trivial, true, known.map(|k| k.citb))
    } else {
        qubo_cell(ProblemKind::Citb, n, opts, known.map(|k| k.citb))?
    };
    Ok(TableRow { n, sitb, citb, proven: known.map(|k| k.proven) })
}

/// Rows `1..=max_n`. The caller enforces the per-mode dimension caps.
pub fn build_table(max_n: usize, opts: &TableOptions) -> Result<Vec<TableRow>> {
    (1..=max_n)
        .map(|n| match opts.mode {
            TableMode::Oracle => oracle_row(n, opts.budget),
            TableMode::Qubo => qubo_row(n, opts),
        })
        .collect()
}

fn render_cell(c: &Cell) -> String {
    let known = match c.known {
        Some(k) => k.to_string(),
        None => "-".into(),
    };
    let flag = match c.agrees {
        Some(true) => "agree",
        Some(false) => "DIFFER",
        None => "-",
    };
    let mark = if c.certified { "" } else { "~" };
    format!("{:>4}{mark:<1} {:<7} {:>5} {:<6}", c.value, c.method.as_str(), known, flag)
}

/// Plain-text table. `*` marks rows whose published values are proven
/// optimal and `~` marks values not certified by the method that produced them.
pub fn render(rows: &[TableRow]) -> String {
    let mut out = String::new();
    out.push_str(" n | SITB  method  known  check  | CITB  method  known  check\n");
    for r in rows {
        let star = if r.proven == Some(true) { "*" } else { " " };
        out.push_str(&format!("{:>2}{star}| {} | {}\n", r.n, render_cell(&r.sitb), render_cell(&r.citb)));
    }
    out
}
