//! Property tests tying the formulations, decoder and oracles together.

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::random_graph;
use snakebox::decode::{decode, is_induced_cycle_min, is_induced_path, MIN_HYPERCUBE_COIL};
use snakebox::formulations::{
    build_citb, build_longest_induced_cycle, build_longest_induced_path, build_sitb, default_weights, ProblemInstance,
    ProblemKind,
};
use snakebox::graphs::hypercube;
use snakebox::oracle::{longest_induced_cycle, longest_induced_path, SearchOptions};
use snakebox::solver::{exact_solve, EXACT_VAR_CAP};
use snakebox::{Assignment, Graph};

/// Random self-avoiding walk in `g`, not necessarily induced.
fn random_walk(rng: &mut ChaCha8Rng, g: &Graph, max_len: usize) -> Vec<usize> {
    let mut walk = vec![rng.gen_range(0..g.num_vertices())];
    while walk.len() < max_len {
        let tip = *walk.last().unwrap();
        let next: Vec<usize> = g.neighbors(tip).iter().copied().filter(|v| !walk.contains(v)).collect();
        if next.is_empty() {
            break;
        }
        walk.push(next[rng.gen_range(0..next.len())]);
    }
    walk
}

/// Indicator-consistent assignment mapping host vertex `hosts[k]` to `targets[k]`.
fn embed(inst: &ProblemInstance, hosts: &[usize], targets: &[usize]) -> Assignment {
    let l = inst.layout;
    let mut a = Assignment::zeros(l.total());
    for (&u, &i) in hosts.iter().zip(targets) {
        a.set(l.x(u, i), true);
        a.set(l.p(u), true);
        a.set(l.s(i), true);
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn snake_decodes_agree_with_the_path_predicate(n in 1usize..=3, seed in any::<u64>(), flips in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = default_weights(ProblemKind::Sitb, 1 << n);
        let (q, inst) = build_sitb(n, &w).unwrap();
        let cube = hypercube(n).unwrap();
        let walk = random_walk(&mut rng, &cube, 1 << n);
        let hosts: Vec<usize> = (0..walk.len()).collect();
        let mut a = embed(&inst, &hosts, &walk);
        for _ in 0..flips {
            a.flip(rng.gen_range(0..q.num_vars()));
        }
        let d = decode(&inst, &a).unwrap();
        if !d.sequence.is_empty() {
            prop_assert_eq!(d.valid, is_induced_path(&cube, &d.sequence).unwrap());
        }
        if d.valid && d.sequence.len() < 1 << n {
            prop_assert_eq!(q.energy(&a).unwrap(), -w.gamma * d.sequence.len() as i64 + w.delta);
        }
    }

    #[test]
    fn coil_decodes_agree_with_the_cycle_predicate(n in 2usize..=3, seed in any::<u64>(), flips in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = default_weights(ProblemKind::Citb, 1 << n);
        let (q, inst) = build_citb(n, &w).unwrap();
        let host = inst.citb_structure.clone().unwrap();
        let cube = hypercube(n).unwrap();
        let walk = random_walk(&mut rng, &cube, 1 << n);
        let m = walk.len();
        let mut a = Assignment::zeros(q.num_vars());
        if m >= 4 {
            let mut hosts: Vec<usize> = (1..m).map(|j| host.path_vertex(j)).collect();
            hosts.push(host.cycle_vertex(m - 1));
            a = embed(&inst, &hosts, &walk);
        }
        for _ in 0..flips {
            a.flip(rng.gen_range(0..q.num_vars()));
        }
        let d = decode(&inst, &a).unwrap();
        if !d.sequence.is_empty() {
            prop_assert_eq!(d.valid, is_induced_cycle_min(&cube, &d.sequence, MIN_HYPERCUBE_COIL).unwrap());
        }
        if d.valid {
            prop_assert_eq!(q.energy(&a).unwrap(), -w.gamma * d.sequence.len() as i64);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn path_qubo_minimum_matches_the_oracle(v in 1usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, v);
        let w = default_weights(ProblemKind::LongestInducedPath, v);
        let (q, inst) = build_longest_induced_path(&g, &w).unwrap();
        let vertices = longest_induced_path(&g, SearchOptions::default()).unwrap().witness.len() as i64;
        let expected = if vertices == v as i64 { -w.gamma * vertices } else { w.delta - w.gamma * vertices };
        let r = exact_solve(&q, EXACT_VAR_CAP).unwrap();
        prop_assert_eq!(r.best_energy, expected);
        prop_assert!(decode(&inst, &r.best_assignment).unwrap().valid);
    }

    #[test]
    fn cycle_qubo_minimum_matches_the_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 4);
        let w = default_weights(ProblemKind::LongestInducedCycle, 4);
        let (q, inst) = build_longest_induced_cycle(&g, &w).unwrap();
        let c = longest_induced_cycle(&g, SearchOptions::default()).unwrap().best_length;
        let r = exact_solve(&q, EXACT_VAR_CAP).unwrap();
        // The host encodes cycles of 4 or more vertices only.
        if c == 4 {
            prop_assert_eq!(r.best_energy, -4 * w.gamma);
            prop_assert!(decode(&inst, &r.best_assignment).unwrap().valid);
        } else {
            prop_assert!(r.best_energy > -4 * w.gamma);
            prop_assert!(!decode(&inst, &r.best_assignment).unwrap().valid);
        }
    }
}

#[test]
fn oracle_witnesses_verify_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let v = rng.gen_range(1..=9);
        let g = random_graph(&mut rng, v);
        let p = longest_induced_path(&g, SearchOptions::default()).unwrap();
        assert!(is_induced_path(&g, &p.witness).unwrap());
        assert_eq!(p.best_length + 1, p.witness.len());
        let c = longest_induced_cycle(&g, SearchOptions::default()).unwrap();
        if c.best_length > 0 {
            assert!(is_induced_cycle_min(&g, &c.witness, 3).unwrap());
            assert_eq!(c.best_length, c.witness.len());
        }
    }
}

/// Largest `|S|` with `G[S]` a path (`want_cycle = false`) or a cycle, by
/// checking degrees and connectivity of every vertex subset.
fn brute_force_longest(g: &Graph, want_cycle: bool) -> usize {
    let v = g.num_vertices();
    let mut best = 0;
    for mask in 1u32..1 << v {
        let members: Vec<usize> = (0..v).filter(|&u| mask >> u & 1 == 1).collect();
        let deg = |u: usize| g.neighbors(u).iter().filter(|&&w| mask >> w & 1 == 1).count();
        let edges: usize = members.iter().map(|&u| deg(u)).sum::<usize>() / 2;
        let mut seen = 1u32 << members[0];
        let mut stack = vec![members[0]];
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if mask >> w & 1 == 1 && seen >> w & 1 == 0 {
                    seen |= 1 << w;
                    stack.push(w);
                }
            }
        }
        let connected = seen == mask;
        let k = members.len();
        let shape = if want_cycle {
            k >= 3 && members.iter().all(|&u| deg(u) == 2)
        } else {
            edges + 1 == k && members.iter().all(|&u| deg(u) <= 2)
        };
        if connected && shape {
            best = best.max(k);
        }
    }
    best
}

#[test]
fn oracle_matches_subset_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..300 {
        let v = rng.gen_range(1..=8);
        let g = random_graph(&mut rng, v);
        let p = longest_induced_path(&g, SearchOptions::default()).unwrap();
        assert_eq!(p.witness.len(), brute_force_longest(&g, false));
        let c = longest_induced_cycle(&g, SearchOptions::default()).unwrap();
        assert_eq!(c.best_length, brute_force_longest(&g, true));
    }
}
