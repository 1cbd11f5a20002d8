//! The `snakebox` command line: build → solve → verify, plus the oracle and
//! table reproduction commands. Every command can leave a [`RunManifest`]
//! next to its output, and `replay` re-executes one.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::decode::{decode_report, induced_cycle_violation, induced_path_violation, parse_sequence, verify_sequence};
use crate::decode::{SequenceKind, MIN_HYPERCUBE_COIL};
use crate::error::Error;
use crate::formulations::{
    build_citb_with_limit, build_induced_subgraph, build_longest_induced_cycle, build_longest_induced_path, build_mcis,
    build_sitb_with_limit, default_weights, PenaltyWeights, ProblemInstance, ProblemKind, DESK_SCALE_MAX_N,
};
use crate::graphs::{hypercube, Graph, MAX_HYPERCUBE_DIM};
use crate::oracle::{
    longest_induced_cycle, longest_induced_path, max_common_induced_subgraph, SearchOptions, DEFAULT_BUDGET,
    DEFAULT_MCIS_CAP,
};
use crate::qubo::Qubo;
use crate::solver::{anneal, anneal_with_threads, exact_solve, AnnealConfig, SolveResult, EXACT_VAR_CAP};
use crate::table::{build_table, render, TableMode, TableOptions, ORACLE_TABLE_MAX_N, QUBO_TABLE_MAX_N};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Environment variable capping the number of annealing threads.
pub const THREADS_ENV: &str = "SNAKEBOX_THREADS";

/// Largest dimension `oracle` accepts without `--force`.
pub const ORACLE_DESK_MAX_N: usize = 6;

#[derive(Debug, Parser)]
#[command(name = "snakebox", version, about = "QUBO formulations and exact baselines for snakes and coils in the hypercube")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a QUBO file for a problem instance
    Build(BuildArgs),
    /// Minimize a QUBO file by annealing or exhaustive search
    Solve(SolveArgs),
    /// Check a label sequence, or decode a solve result against its QUBO
    Verify(VerifyArgs),
    /// Exact longest snake/coil (or MCIS) by combinatorial search
    Oracle(OracleArgs),
    /// Reproduce the table of best known lengths
    Table(TableArgs),
    /// Re-run the command recorded in a manifest
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// sitb, citb, longest_induced_path, longest_induced_cycle, mcis, induced_subgraph
    #[arg(long)]
    pub problem: ProblemKind,
    /// Hypercube dimension (sitb, citb)
    #[arg(long)]
    pub n: Option<usize>,
    /// Host graph file (the second graph for mcis and induced_subgraph)
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Pattern graph file for mcis and induced_subgraph
    #[arg(long)]
    pub g1: Option<PathBuf>,
    /// Start from the smallest integer weights that pass validation
    #[arg(long)]
    pub defaults: bool,
    #[arg(long)]
    pub alpha: Option<i64>,
    #[arg(long)]
    pub beta: Option<i64>,
    #[arg(long)]
    pub gamma: Option<i64>,
    #[arg(long)]
    pub delta: Option<i64>,
    #[arg(long)]
    pub epsilon: Option<i64>,
    /// Allow hypercube dimensions above the desk-scale limit
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub qubo: PathBuf,
    /// Exhaustive Gray-code search (at most 30 variables)
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub beta_hot: Option<f64>,
    #[arg(long)]
    pub beta_cold: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// snake or coil (sequence mode)
    #[arg(long)]
    pub problem: Option<SequenceKind>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated bitstrings, e.g. 010,000,100
    #[arg(long)]
    pub sequence: Option<String>,
    /// Solve result to decode (requires --qubo)
    #[arg(long)]
    pub result: Option<PathBuf>,
    #[arg(long)]
    pub qubo: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// sitb, citb, longest_induced_path, longest_induced_cycle or mcis
    #[arg(long)]
    pub problem: ProblemKind,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub g1: Option<PathBuf>,
    /// Node-expansion budget
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub max_n: usize,
    /// oracle or qubo
    #[arg(long, default_value = "oracle")]
    pub mode: TableMode,
    /// Emit JSON rows instead of the text table
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

/// Enough to re-run a command: `parameters` holds every flag that was given,
/// switches as `true` and everything else as strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub parameters: BTreeMap<String, Value>,
    pub output: Option<String>,
    pub timestamp: String,
    pub tool_version: String,
}

impl RunManifest {
    /// Command-line arguments (without the program name) that reproduce the run.
    pub fn to_args(&self) -> Vec<String> {
        let mut args = vec![self.command.clone()];
        for (k, v) in &self.parameters {
            match v {
                Value::Bool(true) => args.push(format!("--{k}")),
                Value::Bool(false) | Value::Null => {}
                Value::String(s) => {
                    args.push(format!("--{k}"));
                    args.push(s.clone());
                }
                other => {
                    args.push(format!("--{k}"));
                    args.push(other.to_string());
                }
            }
        }
        args
    }
}

/// Report for the `oracle` command, laid out like the verify report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub valid: bool,
    pub reason: Option<String>,
    pub kind: String,
    pub n: Option<usize>,
    pub length: usize,
    pub sequence: Vec<String>,
    pub witness: Vec<usize>,
    pub nodes_expanded: u64,
    pub exact: bool,
}

/// A command failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn resource(message: impl Into<String>) -> Self {
        Failure { code: EXIT_RESOURCE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TooManyVariables { .. } | Error::GraphOverCap { .. } => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

/// What a command produced: the bytes to write and the exit code to return.
struct Outcome {
    body: String,
    code: i32,
}

struct Recorder {
    command: &'static str,
    inputs: Vec<String>,
    parameters: BTreeMap<String, Value>,
}

impl Recorder {
    fn new(command: &'static str) -> Self {
        Recorder { command, inputs: Vec::new(), parameters: BTreeMap::new() }
    }

    fn opt<T: ToString>(&mut self, key: &str, v: &Option<T>) {
        if let Some(v) = v {
            self.parameters.insert(key.into(), Value::String(v.to_string()));
        }
    }

    fn val<T: ToString>(&mut self, key: &str, v: &T) {
        self.parameters.insert(key.into(), Value::String(v.to_string()));
    }

    fn flag(&mut self, key: &str, on: bool) {
        if on {
            self.parameters.insert(key.into(), Value::Bool(true));
        }
    }

    fn input(&mut self, key: &str, p: &Option<PathBuf>) {
        if let Some(p) = p {
            self.inputs.push(p.display().to_string());
            self.val(key, &p.display());
        }
    }

    fn manifest(self, output: Option<&Path>) -> RunManifest {
        RunManifest {
            command: self.command.into(),
            inputs: self.inputs,
            parameters: self.parameters,
            output: output.map(|p| p.display().to_string()),
            timestamp: chrono::Utc::now().to_rfc3339(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

fn read_to_string(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn read_graph(path: &Path) -> CmdResult<Graph> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_qubo(path: &Path) -> CmdResult<(Qubo, Option<Value>)> {
    let text = read_to_string(path)?;
    Qubo::from_json(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn require<T: Clone>(v: &Option<T>, what: &str) -> CmdResult<T> {
    v.clone().ok_or_else(|| Failure::usage(format!("missing --{what}")))
}

fn threads_from_env() -> CmdResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(Some(t)),
            _ => Err(Failure::usage(format!("{THREADS_ENV} must be a positive integer, got {s:?}"))),
        },
        Err(_) => Ok(None),
    }
}

fn anneal_config(
    sweeps: Option<usize>,
    restarts: Option<usize>,
    seed: Option<u64>,
    beta_hot: Option<f64>,
    beta_cold: Option<f64>,
) -> AnnealConfig {
    let d = AnnealConfig::default();
    AnnealConfig {
        sweeps: sweeps.unwrap_or(d.sweeps),
        restarts: restarts.unwrap_or(d.restarts),
        seed: seed.unwrap_or(d.seed),
        beta_hot: beta_hot.unwrap_or(d.beta_hot),
        beta_cold: beta_cold.unwrap_or(d.beta_cold),
    }
}

fn desk_guard(n: usize, max: usize, force: bool) -> CmdResult<()> {
    if n > max && !force {
        return Err(Failure::resource(format!("n = {n} exceeds the desk-scale limit {max}; pass --force to override")));
    }
    Ok(())
}

fn build_instance(a: &BuildArgs) -> CmdResult<(Qubo, ProblemInstance)> {
    let explicit = [a.alpha, a.beta, a.gamma, a.delta, a.epsilon].iter().any(Option::is_some);
    if !a.defaults && !explicit {
        return Err(Failure::usage("pass --defaults or explicit weights (--alpha .. --epsilon)"));
    }
    let host = |a: &BuildArgs| -> CmdResult<Graph> { read_graph(&require(&a.graph, "graph")?) };
    let (g1, g2, v2) = match a.problem {
        ProblemKind::Sitb | ProblemKind::Citb => {
            let n = require(&a.n, "n")?;
            desk_guard(n, DESK_SCALE_MAX_N, a.force)?;
            (None, None, 1usize.checked_shl(n as u32).unwrap_or(0))
        }
        ProblemKind::LongestInducedPath | ProblemKind::LongestInducedCycle => {
            let g = host(a)?;
            let v2 = g.num_vertices();
            (None, Some(g), v2)
        }
        ProblemKind::Mcis | ProblemKind::InducedSubgraph => {
            let g1 = read_graph(&require(&a.g1, "g1")?)?;
            let g2 = host(a)?;
            let v2 = g2.num_vertices();
            (Some(g1), Some(g2), v2)
        }
    };
    let mut w = default_weights(a.problem, v2);
    if let Some(x) = a.alpha {
        w.alpha = x;
    }
    if let Some(x) = a.beta {
        w.beta = x;
    }
    if let Some(x) = a.gamma {
        w.gamma = x;
    }
    if let Some(x) = a.delta {
        w.delta = x;
    }
    if let Some(x) = a.epsilon {
        w.epsilon = x;
    }
    let limit = if a.force { MAX_HYPERCUBE_DIM } else { DESK_SCALE_MAX_N };
    let built = match a.problem {
        ProblemKind::Sitb => build_sitb_with_limit(require(&a.n, "n")?, &w, limit)?,
        ProblemKind::Citb => build_citb_with_limit(require(&a.n, "n")?, &w, limit)?,
        ProblemKind::LongestInducedPath => build_longest_induced_path(g2.as_ref().expect("host read"), &w)?,
        ProblemKind::LongestInducedCycle => build_longest_induced_cycle(g2.as_ref().expect("host read"), &w)?,
        ProblemKind::Mcis => build_mcis(g1.as_ref().expect("g1 read"), g2.as_ref().expect("g2 read"), &w)?,
        ProblemKind::InducedSubgraph => {
            build_induced_subgraph(g1.as_ref().expect("g1 read"), g2.as_ref().expect("g2 read"))?
        }
    };
    Ok(built)
}

fn weight_report(kind: ProblemKind, w: &PenaltyWeights) -> String {
    match kind {
        ProblemKind::InducedSubgraph => format!("α=β={} (unit penalties)", w.alpha),
        ProblemKind::Mcis => format!("α={} β={} γ={}", w.alpha, w.beta, w.gamma),
        k if k.is_cycle_like() => {
            format!("α={} β={} γ={} δ={} ε={}", w.alpha, w.beta, w.gamma, w.delta, w.epsilon)
        }
        _ => format!("α={} β={} γ={} δ={}", w.alpha, w.beta, w.gamma, w.delta),
    }
}

fn cmd_build(a: &BuildArgs, rec: &mut Recorder) -> CmdResult<Outcome> {
    rec.val("problem", &a.problem);
    rec.opt("n", &a.n);
    rec.input("graph", &a.graph);
    rec.input("g1", &a.g1);
    rec.flag("defaults", a.defaults);
    rec.opt("alpha", &a.alpha);
    rec.opt("beta", &a.beta);
    rec.opt("gamma", &a.gamma);
    rec.opt("delta", &a.delta);
    rec.opt("epsilon", &a.epsilon);
    rec.flag("force", a.force);

    let (q, inst) = build_instance(a)?;
    eprintln!(
        "{}: {} variables, {} terms; weights {}",
        inst.kind,
        q.num_vars(),
        q.num_terms(),
        weight_report(inst.kind, &inst.weights)
    );
    let mut body = q.to_json(Some(inst.meta_json()));
    body.push('\n');
    Ok(Outcome { body, code: EXIT_OK })
}

fn cmd_solve(a: &SolveArgs, rec: &mut Recorder) -> CmdResult<Outcome> {
    rec.input("qubo", &Some(a.qubo.clone()));
    rec.flag("exact", a.exact);
    rec.opt("sweeps", &a.sweeps);
    rec.opt("restarts", &a.restarts);
    rec.opt("seed", &a.seed);
    rec.opt("beta-hot", &a.beta_hot);
    rec.opt("beta-cold", &a.beta_cold);

    let (q, _) = read_qubo(&a.qubo)?;
    let result = if a.exact {
        exact_solve(&q, EXACT_VAR_CAP)?
    } else {
        let cfg = anneal_config(a.sweeps, a.restarts, a.seed, a.beta_hot, a.beta_cold);
        match threads_from_env()? {
            Some(t) => anneal_with_threads(&q, &cfg, t)?,
            None => anneal(&q, &cfg)?,
        }
    };
    eprintln!("best energy {} (restart {})", result.best_energy, result.restart_of_best);
    let mut body = result.to_json();
    body.push('\n');
    Ok(Outcome { body, code: EXIT_OK })
}

fn cmd_verify(a: &VerifyArgs, rec: &mut Recorder) -> CmdResult<Outcome> {
    rec.opt("problem", &a.problem.map(|k| if k == SequenceKind::Snake { "snake" } else { "coil" }));
    rec.opt("n", &a.n);
    rec.opt("sequence", &a.sequence);
    rec.input("result", &a.result);
    rec.input("qubo", &a.qubo);

    let report = match (&a.sequence, &a.result) {
        (Some(seq), None) => {
            let kind = require(&a.problem, "problem")?;
            let n = require(&a.n, "n")?;
            verify_sequence(kind, n, &parse_sequence(seq))?
        }
        (None, Some(result_path)) => {
            let qubo_path = require(&a.qubo, "qubo")?;
            let result = SolveResult::from_json(&read_to_string(result_path)?)?;
            let (q, meta) = read_qubo(&qubo_path)?;
            let meta = meta.ok_or_else(|| Failure::usage(format!("{} has no meta block", qubo_path.display())))?;
            let inst = ProblemInstance::from_meta_json(&meta)?;
            if result.best_assignment.len() != q.num_vars() {
                return Err(Error::LengthMismatch { expected: q.num_vars(), found: result.best_assignment.len() }.into());
            }
            let report = decode_report(&inst, &result.best_assignment)?;
            let energy = q.energy(&result.best_assignment)?;
            if report.total_energy != Some(energy) {
                return Err(Failure::usage(format!(
                    "recomputed term energies total {:?} but the QUBO gives {energy}",
                    report.total_energy
                )));
            }
            report
        }
        _ => return Err(Failure::usage("pass either --sequence or --result with --qubo")),
    };
    let code = if report.valid { EXIT_OK } else { EXIT_INVALID };
    let mut body = report.to_json();
    body.push('\n');
    Ok(Outcome { body, code })
}

fn cmd_oracle(a: &OracleArgs, rec: &mut Recorder) -> CmdResult<Outcome> {
    rec.val("problem", &a.problem);
    rec.opt("n", &a.n);
    rec.input("graph", &a.graph);
    rec.input("g1", &a.g1);
    rec.opt("budget", &a.budget);
    rec.flag("force", a.force);

    let budget = a.budget.unwrap_or(DEFAULT_BUDGET);
    let (host, transitive) = match (a.n, &a.graph) {
        (Some(n), None) => {
            desk_guard(n, ORACLE_DESK_MAX_N, a.force)?;
            (hypercube(n)?, true)
        }
        (None, Some(path)) => (read_graph(path)?, false),
        _ => return Err(Failure::usage("pass exactly one of --n or --graph")),
    };
    let opts = SearchOptions { budget, vertex_transitive: transitive };

    let report = match a.problem {
        ProblemKind::Sitb | ProblemKind::LongestInducedPath => {
            let r = longest_induced_path(&host, opts)?;
            let reason = induced_path_violation(&host, &r.witness);
            oracle_report(a, &host, r.best_length, r.witness, r.nodes_expanded, r.exact, reason)
        }
        ProblemKind::Citb | ProblemKind::LongestInducedCycle => {
            let r = longest_induced_cycle(&host, opts)?;
            let min = if transitive { MIN_HYPERCUBE_COIL } else { 3 };
            let reason = if r.witness.is_empty() { None } else { induced_cycle_violation(&host, &r.witness, min) };
            oracle_report(a, &host, r.best_length, r.witness, r.nodes_expanded, r.exact, reason)
        }
        ProblemKind::Mcis | ProblemKind::InducedSubgraph => {
            let g1 = read_graph(&require(&a.g1, "g1")?)?;
            let r = max_common_induced_subgraph(&g1, &host, DEFAULT_MCIS_CAP)?;
            let sequence = r.mapping.iter().map(|&(u, i)| format!("{}->{}", g1.label(u), host.label(i))).collect();
            let (valid, reason) = if a.problem == ProblemKind::InducedSubgraph && r.size < g1.num_vertices() {
                (false, Some(format!("only {} of {} vertices embed", r.size, g1.num_vertices())))
            } else {
                (true, None)
            };
            OracleReport {
                valid,
                reason,
                kind: a.problem.to_string(),
                n: a.n,
                length: r.size,
                sequence,
                witness: r.mapping.iter().map(|&(_, i)| i).collect(),
                nodes_expanded: 0,
                exact: true,
            }
        }
    };
    let code = if !report.exact {
        EXIT_RESOURCE
    } else if report.valid {
        EXIT_OK
    } else {
        EXIT_INVALID
    };
    let mut body = serde_json::to_string(&report).expect("report serialization is infallible");
    body.push('\n');
    Ok(Outcome { body, code })
}

fn oracle_report(
    a: &OracleArgs,
    host: &Graph,
    length: usize,
    witness: Vec<usize>,
    nodes_expanded: u64,
    exact: bool,
    reason: Option<String>,
) -> OracleReport {
    OracleReport {
        valid: reason.is_none(),
        reason,
        kind: a.problem.to_string(),
        n: a.n,
        length,
        sequence: witness.iter().map(|&v| host.label(v)).collect(),
        witness,
        nodes_expanded,
        exact,
    }
}

fn cmd_table(a: &TableArgs, rec: &mut Recorder) -> CmdResult<Outcome> {
    rec.val("max-n", &a.max_n);
    rec.val("mode", &match a.mode {
        TableMode::Oracle => "oracle",
        TableMode::Qubo => "qubo",
    });
    rec.flag("json", a.json);
    rec.opt("budget", &a.budget);
    rec.opt("sweeps", &a.sweeps);
    rec.opt("restarts", &a.restarts);
    rec.opt("seed", &a.seed);

    let cap = match a.mode {
        TableMode::Oracle => ORACLE_TABLE_MAX_N,
        TableMode::Qubo => QUBO_TABLE_MAX_N,
    };
    if a.max_n == 0 {
        return Err(Failure::usage("--max-n must be at least 1"));
    }
    if a.max_n > cap {
        return Err(Failure::resource(format!("--max-n {} exceeds {cap} for this mode", a.max_n)));
    }
    let opts = TableOptions {
        mode: a.mode,
        budget: a.budget.unwrap_or(DEFAULT_BUDGET),
        anneal: anneal_config(a.sweeps, a.restarts, a.seed, None, None),
        threads: threads_from_env()?,
    };
    let rows = build_table(a.max_n, &opts)?;
    let code = if rows.iter().all(|r| r.all_agree()) { EXIT_OK } else { EXIT_INVALID };
    let mut body = if a.json {
        serde_json::to_string(&rows).expect("table serialization is infallible")
    } else {
        render(&rows)
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    Ok(Outcome { body, code })
}

fn write_output(out: Option<&Path>, body: &str) -> CmdResult<()> {
    match out {
        Some(p) => fs::write(p, body).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::usage(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Manifest location: `--manifest` if given, else `<out>.manifest.json`.
pub fn manifest_path(out: Option<&Path>, explicit: Option<&Path>) -> Option<PathBuf> {
    if let Some(m) = explicit {
        return Some(m.to_path_buf());
    }
    out.map(|o| {
        let mut s = o.as_os_str().to_os_string();
        s.push(".manifest.json");
        PathBuf::from(s)
    })
}

/// Runs one command. With `record` set, a manifest is written next to the
/// output; replays pass `false` so the original manifest stays untouched.
fn execute(cli: Cli, record: bool) -> CmdResult<i32> {
    let (rec, out, explicit_manifest, outcome) = match &cli.command {
        Command::Replay(r) => {
            let text = read_to_string(&r.manifest)?;
            let m: RunManifest =
                serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", r.manifest.display())))?;
            let mut args = vec!["snakebox".to_string()];
            args.extend(m.to_args());
            if let Some(o) = &m.output {
                args.push("--out".into());
                args.push(o.clone());
            }
            let replayed = Cli::try_parse_from(&args).map_err(|e| Failure::usage(e.to_string()))?;
            if matches!(replayed.command, Command::Replay(_)) {
                return Err(Failure::usage("a manifest cannot replay another replay"));
            }
            return execute(replayed, false);
        }
        Command::Build(a) => {
            let mut rec = Recorder::new("build");
            let o = cmd_build(a, &mut rec)?;
            (rec, a.out.clone(), a.manifest.clone(), o)
        }
        Command::Solve(a) => {
            let mut rec = Recorder::new("solve");
            let o = cmd_solve(a, &mut rec)?;
            (rec, a.out.clone(), a.manifest.clone(), o)
        }
        Command::Verify(a) => {
            let mut rec = Recorder::new("verify");
            let o = cmd_verify(a, &mut rec)?;
            (rec, a.out.clone(), a.manifest.clone(), o)
        }
        Command::Oracle(a) => {
            let mut rec = Recorder::new("oracle");
            let o = cmd_oracle(a, &mut rec)?;
            (rec, a.out.clone(), a.manifest.clone(), o)
        }
        Command::Table(a) => {
            let mut rec = Recorder::new("table");
            let o = cmd_table(a, &mut rec)?;
            (rec, a.out.clone(), a.manifest.clone(), o)
        }
    };
    write_output(out.as_deref(), &outcome.body)?;
    if !record {
        return Ok(outcome.code);
    }
    if let Some(mpath) = manifest_path(out.as_deref(), explicit_manifest.as_deref()) {
        let manifest = rec.manifest(out.as_deref());
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serialization is infallible");
        fs::write(&mpath, text + "\n").map_err(|e| Failure::usage(format!("cannot write {}: {e}", mpath.display())))?;
    }
    Ok(outcome.code)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, true) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
