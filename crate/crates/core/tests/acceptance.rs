//! Acceptance gate. Each check covers one criterion and prints a single
//! `criterion N: PASS|FAIL` line; the process fails if any criterion does.
//! Pass `--ignored` to also run the non-gating n = 5 annealing stretch, and
//! any other argument to select criteria by name.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use snakebox::decode::{decode, TermEnergies};
use snakebox::formulations::{
    build_citb, build_induced_subgraph, build_longest_induced_cycle, build_longest_induced_path, build_mcis,
    build_sitb, default_weights, PenaltyWeights, ProblemInstance, ProblemKind,
};
use snakebox::graphs::{cycle, hypercube, path};
use snakebox::oracle::{
    is_induced_subgraph, longest_induced_cycle, longest_induced_path, max_common_induced_subgraph, SearchOptions,
    DEFAULT_BUDGET,
};
use snakebox::solver::{anneal, exact_solve, AnnealConfig, EXACT_VAR_CAP};
use snakebox::{Assignment, Graph, Qubo};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        return;
    }
    let filters: Vec<&String> = args.iter().filter(|a| !a.starts_with('-')).collect();
    let selected = |name: &str| filters.is_empty() || filters.iter().any(|f| name.contains(f.as_str()));
    let criteria: [(&str, fn() -> bool); 8] = [
        ("criterion_1_oracle_table", criterion_1_oracle_table),
        ("criterion_2_exact_small_minima", criterion_2_exact_small_minima),
        ("criterion_3_annealer_reaches_optimum", criterion_3_annealer_reaches_optimum),
        ("criterion_4_printed_solutions_verify", criterion_4_printed_solutions_verify),
        ("criterion_5_penalty_invariants", criterion_5_penalty_invariants),
        ("criterion_6_mcis_exact_vs_oracle", criterion_6_mcis_exact_vs_oracle),
        ("criterion_7_induced_subgraph_decision", criterion_7_induced_subgraph_decision),
        ("criterion_8_cli_determinism", criterion_8_cli_determinism),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        if !selected(name) {
            continue;
        }
        match std::panic::catch_unwind(check) {
            Ok(true) => {}
            Ok(false) => failed.push(name),
            Err(_) => {
                println!("{name}: FAIL (panicked)");
                failed.push(name);
            }
        }
    }
    if args.iter().any(|a| a == "--ignored") {
        criterion_3_stretch_n5();
    }
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}

fn report(criterion: u32, pass: bool, detail: &str) {
    println!("criterion {criterion}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
}

fn criterion_1_oracle_table() -> bool {
    let sitb = [1, 2, 4, 7, 13];
    let citb = [0, 4, 6, 8, 14];
    let start = Instant::now();
    let mut got = Vec::new();
    let mut all_exact = true;
    for n in 1..=5 {
        let q = hypercube(n).unwrap();
        let p = longest_induced_path(&q, SearchOptions::transitive(DEFAULT_BUDGET)).unwrap();
        let c = longest_induced_cycle(&q, SearchOptions::transitive(DEFAULT_BUDGET)).unwrap();
        all_exact &= p.exact && c.exact;
        got.push((p.best_length, c.best_length));
    }
    let elapsed = start.elapsed();
    let expected: Vec<_> = sitb.into_iter().zip(citb).collect();
    let pass = got == expected && all_exact && elapsed < Duration::from_secs(60);
    report(1, pass, &format!("oracle n=1..5 gave {got:?}, expected {expected:?}, {elapsed:.2?}"));
    pass
}

fn criterion_2_exact_small_minima() -> bool {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    let cases: [(&str, ProblemKind, usize); 3] =
        [("SITB n=2", ProblemKind::Sitb, 2), ("CITB n=2", ProblemKind::Citb, 2), ("SITB n=1", ProblemKind::Sitb, 1)];
    for (name, kind, n) in cases {
        let w = default_weights(kind, 1 << n);
        let q = match kind {
            ProblemKind::Sitb => build_sitb(n, &w).unwrap().0,
            _ => build_citb(n, &w).unwrap().0,
        };
        assert!(q.num_vars() <= 28);
        let expected = match (kind, n) {
            (ProblemKind::Sitb, 2) => w.delta - 3 * w.gamma,
            (ProblemKind::Citb, 2) => -4 * w.gamma,
            _ => w.delta - 2 * w.gamma,
        };
        let got = exact_solve(&q, EXACT_VAR_CAP).unwrap().best_energy;
        pass &= got == expected;
        lines.push(format!("{name}: min {got}, expected {expected}"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(600);
    report(2, pass, &format!("{}; {elapsed:.2?}", lines.join("; ")));
    pass
}

fn criterion_3_annealer_reaches_optimum() -> bool {
    let cfg = AnnealConfig::default();
    let mut lines = Vec::new();
    let mut pass = true;
    for (kind, n) in [(ProblemKind::Sitb, 3), (ProblemKind::Sitb, 4), (ProblemKind::Citb, 3), (ProblemKind::Citb, 4)] {
        let cube = hypercube(n).unwrap();
        let w = default_weights(kind, 1 << n);
        let (q, inst, optimum) = match kind {
            ProblemKind::Sitb => {
                let (q, inst) = build_sitb(n, &w).unwrap();
                let len = longest_induced_path(&cube, SearchOptions::transitive(DEFAULT_BUDGET)).unwrap().best_length;
                // len + 1 vertices, one chain violation since the snake never fills Q_n
                (q, inst, w.delta - w.gamma * (len as i64 + 1))
            }
            _ => {
                let (q, inst) = build_citb(n, &w).unwrap();
                let len = longest_induced_cycle(&cube, SearchOptions::transitive(DEFAULT_BUDGET)).unwrap().best_length;
                (q, inst, -w.gamma * len as i64)
            }
        };
        let r = anneal(&q, &cfg).unwrap();
        let valid = decode(&inst, &r.best_assignment).unwrap().valid;
        pass &= r.best_energy == optimum && valid;
        lines.push(format!("{kind} n={n}: {} vs {optimum}{}", r.best_energy, if valid { "" } else { " invalid" }));
    }
    report(3, pass, &format!("seed {}: {}", cfg.seed, lines.join("; ")));
    pass
}

/// Stretch goal for criterion 3; reported, never gating.
fn criterion_3_stretch_n5() {
    let cfg = AnnealConfig { sweeps: 50_000, restarts: 32, ..AnnealConfig::default() };
    for kind in [ProblemKind::Sitb, ProblemKind::Citb] {
        let w = default_weights(kind, 32);
        let (q, inst) = match kind {
            ProblemKind::Sitb => build_sitb(5, &w).unwrap(),
            _ => build_citb(5, &w).unwrap(),
        };
        let start = Instant::now();
        let r = anneal(&q, &cfg).unwrap();
        let d = decode(&inst, &r.best_assignment).unwrap();
        let len = if kind == ProblemKind::Sitb { d.sequence.len().saturating_sub(1) } else { d.sequence.len() };
        println!(
            "criterion 3 stretch: {kind} n=5 energy {} length {len} valid {} in {:.1?}",
            r.best_energy,
            d.valid,
            start.elapsed()
        );
    }
}

fn verify(kind: &str, n: usize, seq: &str) -> (i32, serde_json::Value) {
    let out = Command::new(bin())
        .args(["verify", "--problem", kind, "--n", &n.to_string(), "--sequence", seq])
        .output()
        .unwrap();
    let report = serde_json::from_slice(&out.stdout).unwrap();
    (out.status.code().unwrap(), report)
}

fn criterion_4_printed_solutions_verify() -> bool {
    let cases = [
        ("hybrid snake n=5", "snake", 5, HYBRID_SNAKE_5, 13),
        ("simulated snake n=5", "snake", 5, SIMULATED_SNAKE_5, 13),
        ("QPU snake n=3", "snake", 3, QPU_SNAKE_3, 4),
        ("hybrid coil n=5", "coil", 5, HYBRID_COIL_5, 14),
        ("simulated coil n=5", "coil", 5, SIMULATED_COIL_5, 14),
        ("QPU coil n=2", "coil", 2, QPU_COIL_2, 4),
    ];
    let mut lines = Vec::new();
    let mut pass = true;
    for (name, kind, n, seq, length) in cases {
        let (code, r) = verify(kind, n, seq);
        let ok = code == 0 && r["valid"] == true && r["length"] == length;
        pass &= ok;
        lines.push(format!("{name}: {}", if ok { "ok" } else { "mismatch" }));
    }
    let (code, r) = verify("coil", 5, HYBRID_SNAKE_5);
    let rejected = code == 1 && r["valid"] == false;
    pass &= rejected;
    lines.push(format!("hybrid snake as coil rejected: {rejected}"));
    report(4, pass, &lines.join("; "));
    pass
}

fn built_instances(rng: &mut ChaCha8Rng) -> Vec<(String, Qubo, ProblemInstance)> {
    let mut out = Vec::new();
    for n in 1..=3 {
        let w = default_weights(ProblemKind::Sitb, 1 << n);
        let (q, i) = build_sitb(n, &w).unwrap();
        out.push((format!("sitb n={n}"), q, i));
    }
    for n in 2..=3 {
        let w = default_weights(ProblemKind::Citb, 1 << n);
        let (q, i) = build_citb(n, &w).unwrap();
        out.push((format!("citb n={n}"), q, i));
    }
    for g in [cycle(5).unwrap(), path(4).unwrap()] {
        let v = g.num_vertices();
        let (q, i) = build_longest_induced_path(&g, &default_weights(ProblemKind::LongestInducedPath, v)).unwrap();
        out.push((format!("path host {v}"), q, i));
        let (q, i) = build_longest_induced_cycle(&g, &default_weights(ProblemKind::LongestInducedCycle, v)).unwrap();
        out.push((format!("cycle host {v}"), q, i));
    }
    for k in 0..3 {
        let g1 = random_graph(rng, 3 + k % 2);
        let g2 = random_graph(rng, 4);
        let (q, i) = build_mcis(&g1, &g2, &default_weights(ProblemKind::Mcis, 4)).unwrap();
        out.push((format!("mcis #{k}"), q, i));
        let (q, i) = build_induced_subgraph(&g1, &g2).unwrap();
        out.push((format!("induced #{k}"), q, i));
    }
    out
}

fn weighted(t: &TermEnergies, w: &PenaltyWeights) -> i64 {
    w.alpha * t.h_a
        + w.beta * t.h_b
        + w.gamma * t.h_o
        + w.delta * t.h_c.unwrap_or(0)
        + w.epsilon * t.h_r.unwrap_or(0)
}

/// Independent reading of φ from the x block: one target per mapped vertex,
/// no target hit twice, adjacency preserved both ways.
fn is_injective_structure_preserving(inst: &ProblemInstance, a: &Assignment) -> bool {
    let l = inst.layout;
    let mut phi = Vec::new();
    for u in 0..l.v1_size {
        let targets: Vec<usize> = (0..l.v2_size).filter(|&i| a.get(l.x(u, i))).collect();
        match targets.as_slice() {
            [] => {}
            [i] => phi.push((u, *i)),
            _ => return false,
        }
    }
    let image: BTreeSet<usize> = phi.iter().map(|&(_, i)| i).collect();
    if image.len() != phi.len() {
        return false;
    }
    phi.iter().all(|&(u, i)| phi.iter().all(|&(v, j)| u == v || inst.g1.has_edge(u, v) == inst.g2.has_edge(i, j)))
}

/// Assignment with H_A = 0 by construction: a random partial injection with
/// its `p` and `s` indicators set to match.
fn random_partial_injection(rng: &mut ChaCha8Rng, inst: &ProblemInstance) -> Assignment {
    let l = inst.layout;
    let mut a = Assignment::zeros(l.total());
    let mut free: Vec<usize> = (0..l.v2_size).collect();
    let keep = rng.gen_range(0.3..1.0);
    for u in 0..l.v1_size {
        if free.is_empty() || (l.has_p && !rng.gen_bool(keep)) {
            continue;
        }
        let i = free.swap_remove(rng.gen_range(0..free.len()));
        a.set(l.x(u, i), true);
        if l.has_p {
            a.set(l.p(u), true);
        }
        a.set(l.s(i), true);
    }
    a
}

fn criterion_5_penalty_invariants() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pass = true;
    let mut lines = Vec::new();

    let instances = built_instances(&mut rng);
    let mut identity_failures = 0;
    for (_, q, inst) in &instances {
        for _ in 0..1000 {
            let bits = (0..q.num_vars()).map(|_| rng.gen_bool(0.5)).collect();
            let a = Assignment::from_bits(bits);
            let t = decode(inst, &a).unwrap().term_energies;
            if weighted(&t, &inst.weights) != q.energy(&a).unwrap() {
                identity_failures += 1;
            }
        }
    }
    pass &= identity_failures == 0;
    lines.push(format!("term-sum identity: {identity_failures} mismatches over {} instances", instances.len()));

    let mut satisfied = 0usize;
    let mut shape_failures = 0usize;
    let mut check = |inst: &ProblemInstance, a: &Assignment| {
        let t = decode(inst, a).unwrap().term_energies;
        if t.h_a == 0 && t.h_b == 0 {
            satisfied += 1;
            if !is_injective_structure_preserving(inst, a) {
                shape_failures += 1;
            }
        }
    };
    for (_, _, inst) in &instances {
        for _ in 0..1000 {
            let a = random_partial_injection(&mut rng, inst);
            check(inst, &a);
        }
    }
    // Exhaustive over every assignment of the smallest instances.
    for (name, q, inst) in &instances {
        if q.num_vars() <= 16 {
            for mask in 0..1u64 << q.num_vars() {
                check(inst, &Assignment::from_mask(mask, q.num_vars()));
            }
            lines.push(format!("{name} enumerated"));
        }
    }
    pass &= shape_failures == 0 && satisfied > 0;
    lines.push(format!("penalty-satisfying assignments: {satisfied}, bad φ: {shape_failures}"));

    let boundary_failures = boundary_rejections();
    pass &= boundary_failures.is_empty();
    lines.push(format!("boundary weights accepted: {boundary_failures:?}"));

    report(5, pass, &lines.join("; "));
    pass
}

/// Every non-strict boundary of the weight inequalities must be rejected,
/// while the defaults pass. Returns the cases that were accepted.
fn boundary_rejections() -> Vec<String> {
    let mut bad = Vec::new();
    let mut expect_reject = |label: String, w: PenaltyWeights, kind: ProblemKind, v2: usize| {
        if w.validate(kind, v2).is_ok() {
            bad.push(label);
        }
    };
    for v2 in [2usize, 4, 8, 16, 32] {
        for gamma in [1i64, 2, 3] {
            let d = default_weights(ProblemKind::Mcis, v2);
            let d = PenaltyWeights { alpha: d.alpha * gamma, beta: d.beta * gamma, gamma, ..d };
            assert!(d.validate(ProblemKind::Mcis, v2).is_ok());
            expect_reject(format!("mcis α=γ {v2}"), PenaltyWeights { alpha: gamma, ..d }, ProblemKind::Mcis, v2);
            expect_reject(format!("mcis β=γ {v2}"), PenaltyWeights { beta: gamma, ..d }, ProblemKind::Mcis, v2);

            for kind in [ProblemKind::Sitb, ProblemKind::LongestInducedPath] {
                let delta = v2 as i64 * gamma + 1;
                let top = gamma + 2 * delta + 1;
                let d = PenaltyWeights { alpha: top, beta: top, gamma, delta, epsilon: 1 };
                assert!(d.validate(kind, v2).is_ok());
                expect_reject(format!("{kind} α {v2}"), PenaltyWeights { alpha: top - 1, ..d }, kind, v2);
                expect_reject(format!("{kind} β {v2}"), PenaltyWeights { beta: top - 1, ..d }, kind, v2);
                let low = v2 as i64 * gamma;
                let top = gamma + 2 * low + 1;
                expect_reject(
                    format!("{kind} δ {v2}"),
                    PenaltyWeights { alpha: top, beta: top, delta: low, ..d },
                    kind,
                    v2,
                );
            }

            for kind in [ProblemKind::Citb, ProblemKind::LongestInducedCycle] {
                let de = v2 as i64 * gamma + 1;
                let top = gamma + 2 * de + 1;
                let d = PenaltyWeights { alpha: top, beta: top, gamma, delta: de, epsilon: de };
                assert!(d.validate(kind, v2).is_ok());
                expect_reject(format!("{kind} α {v2}"), PenaltyWeights { alpha: top - 1, ..d }, kind, v2);
                expect_reject(format!("{kind} β {v2}"), PenaltyWeights { beta: top - 1, ..d }, kind, v2);
                let low = v2 as i64 * gamma;
                let top = gamma + low + de + 1;
                let d2 = PenaltyWeights { alpha: top, beta: top, ..d };
                expect_reject(format!("{kind} δ {v2}"), PenaltyWeights { delta: low, ..d2 }, kind, v2);
                expect_reject(format!("{kind} ε {v2}"), PenaltyWeights { epsilon: low, ..d2 }, kind, v2);
            }
        }
    }
    bad
}

fn random_pairs(seed: u64, count: usize) -> Vec<(Graph, Graph)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            // The first pair always sits at the size limit.
            let (n1, n2) = if k == 0 { (4, 5) } else { (rng.gen_range(1..=4), rng.gen_range(1..=5)) };
            (random_graph(&mut rng, n1), random_graph(&mut rng, n2))
        })
        .collect()
}

fn criterion_6_mcis_exact_vs_oracle() -> bool {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let pairs = random_pairs(6, 50);
    for (k, (g1, g2)) in pairs.iter().enumerate() {
        let w = default_weights(ProblemKind::Mcis, g2.num_vertices());
        let (q, _) = build_mcis(g1, g2, &w).unwrap();
        let min = exact_solve(&q, EXACT_VAR_CAP).unwrap().best_energy;
        let size = max_common_induced_subgraph(g1, g2, 8).unwrap().size as i64;
        if min != -w.gamma * size {
            mismatches.push((k, min, size));
        }
    }
    let pass = mismatches.is_empty();
    report(6, pass, &format!("{} pairs, mismatches {mismatches:?}, {:.2?}", pairs.len(), start.elapsed()));
    pass
}

fn criterion_7_induced_subgraph_decision() -> bool {
    let mut mismatches = Vec::new();
    let mut embeddable = 0;
    let pairs = random_pairs(7, 50);
    for (k, (g1, g2)) in pairs.iter().enumerate() {
        let (q, _) = build_induced_subgraph(g1, g2).unwrap();
        let min = exact_solve(&q, EXACT_VAR_CAP).unwrap().best_energy;
        let embeds = is_induced_subgraph(g1, g2, 8).unwrap();
        embeddable += embeds as usize;
        if min < 0 || (min == 0) != embeds {
            mismatches.push((k, min, embeds));
        }
    }
    let pass = mismatches.is_empty();
    report(
        7,
        pass,
        &format!("{} pairs ({embeddable} embeddable), mismatches {mismatches:?}", pairs.len()),
    );
    pass
}

fn criterion_8_cli_determinism() -> bool {
    let dir = tempfile::tempdir().unwrap();
    let qubo = dir.path().join("sitb3.json");
    let status = Command::new(bin())
        .args(["build", "--problem", "sitb", "--n", "3", "--defaults", "--out"])
        .arg(&qubo)
        .output()
        .unwrap()
        .status;
    assert!(status.success());

    let solve = |name: &str, threads: Option<&str>| -> Vec<u8> {
        let out = dir.path().join(name);
        let mut cmd = Command::new(bin());
        cmd.args(["solve", "--seed", "11", "--sweeps", "2000", "--restarts", "8", "--qubo"]).arg(&qubo).arg("--out").arg(&out);
        cmd.env_remove("SNAKEBOX_THREADS");
        if let Some(t) = threads {
            cmd.env("SNAKEBOX_THREADS", t);
        }
        assert!(cmd.output().unwrap().status.success());
        std::fs::read(&out).unwrap()
    };
    let reference = solve("ref.json", None);
    let mut runs = vec![solve("again.json", None)];
    for t in ["1", "2", "3", "8"] {
        runs.push(solve(&format!("t{t}.json"), Some(t)));
    }

    let manifest = dir.path().join("ref.json.manifest.json");
    std::fs::remove_file(dir.path().join("ref.json")).unwrap();
    let replay = Command::new(bin()).arg("replay").arg("--manifest").arg(&manifest).output().unwrap().status;
    assert!(replay.success());
    runs.push(std::fs::read(dir.path().join("ref.json")).unwrap());

    let identical = runs.iter().filter(|r| **r == reference).count();
    let pass = identical == runs.len();
    report(8, pass, &format!("{identical}/{} runs byte-identical across thread counts and replay", runs.len()));
    pass
}
