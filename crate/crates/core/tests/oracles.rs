//! Library results against brute-force oracles on small graphs.

use mpc_arb::coloring::{arb_color, layered_list_color, operative_arboricity, verify_coloring};
use mpc_arb::derand::{best_seed, Direction, SearchMethod, SeedRequest, Q};
use mpc_arb::graph::{
    estimate_arboricity, forest_decomposition, gen_bounded_arboricity, gen_complete, gen_cycle, gen_degenerate,
    gen_grid, gen_star, h_partition,
};
use mpc_arb::hashing::{verify_kwise, KWiseFamily};
use mpc_arb::mismm::{greedy_mis, greedy_mm, solve};
use mpc_arb::mpc::{collect_balls, double_balls, remove_and_notify, Cluster};
use mpc_arb::solution::{verify_mis, verify_mm};
use mpc_arb::{Graph, Kind, Mode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cluster(n: usize) -> Cluster {
    Cluster::new(n.max(2), 0.9, Mode::Report, u64::MAX, 1).unwrap()
}

fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.gen_bool(p)).collect();
    Graph::new(n, edges).unwrap()
}

fn small_graphs() -> Vec<Graph> {
    let mut out: Vec<Graph> =
        (0..120).map(|i| random_graph(2 + i % 7, 0.15 + (i % 5) as f64 * 0.17, i as u64)).collect();
    out.extend([gen_complete(8), gen_cycle(7), gen_star(7), gen_grid(2, 4), gen_degenerate(8, 3, 1)]);
    out
}

/// Nash–Williams: max over vertex subsets S of ⌈m(S) / (|S| − 1)⌉.
fn brute_arboricity(g: &Graph) -> u64 {
    let n = g.n();
    let mut best = 0;
    for mask in 1u32..1 << n {
        let k = mask.count_ones() as u64;
        if k < 2 {
            continue;
        }
        let m = g.edges().iter().filter(|&&(u, v)| mask >> u & 1 == 1 && mask >> v & 1 == 1).count() as u64;
        best = best.max(m.div_ceil(k - 1));
    }
    best
}

fn colorable(g: &Graph, k: u64, color: &mut Vec<u64>) -> bool {
    let v = color.len();
    if v == g.n() {
        return true;
    }
    for c in 0..k {
        if g.neighbors(v).iter().all(|&w| w >= v || color[w] != c) {
            color.push(c);
            if colorable(g, k, color) {
                return true;
            }
            color.pop();
        }
    }
    false
}

fn chromatic_number(g: &Graph) -> u64 {
    (1..).find(|&k| colorable(g, k, &mut Vec::new())).unwrap()
}

fn brute_is_mis(g: &Graph, set: &[usize]) -> bool {
    let inside: Vec<bool> = (0..g.n()).map(|v| set.contains(&v)).collect();
    let independent = g.edges().iter().all(|&(u, v)| !(inside[u] && inside[v]));
    let maximal = (0..g.n()).all(|v| inside[v] || g.neighbors(v).iter().any(|&w| inside[w]));
    independent && maximal
}

fn brute_is_mm(g: &Graph, edges: &[(usize, usize)]) -> bool {
    let mut covered = vec![0; g.n()];
    for &(u, v) in edges {
        if !g.has_edge(u, v) {
            return false;
        }
        covered[u] += 1;
        covered[v] += 1;
    }
    covered.iter().all(|&c| c <= 1) && g.edges().iter().all(|&(u, v)| covered[u] + covered[v] > 0)
}

#[test]
fn arboricity_estimates_bracket_the_exact_value() {
    for g in small_graphs() {
        let lambda = brute_arboricity(&g).max(1);
        let op = operative_arboricity(&g);
        assert!(op <= lambda && lambda <= 2 * op, "operative {op} vs exact {lambda}");
        let est = estimate_arboricity(&g);
        assert!(2 * est >= lambda && est <= 4 * lambda, "estimate {est} vs exact {lambda}");
        let hp = h_partition(&g, 2 * lambda as usize, None).unwrap();
        hp.check(&g).unwrap();
        let fd = forest_decomposition(&g, &hp).unwrap();
        fd.check(&g).unwrap();
        assert!(fd.max_label() as u64 <= 2 * lambda);
    }
}

#[test]
fn colorings_are_proper_and_no_smaller_than_chromatic_number() {
    for g in small_graphs() {
        let chi = chromatic_number(&g);
        let lambda = operative_arboricity(&g);
        let out = arb_color(&mut cluster(g.n()), &g, lambda, 0.5).unwrap();
        assert!(verify_coloring(&g, &out.coloring.color));
        assert!(out.coloring.colors_used() as u64 >= chi);
        assert!(out.coloring.palette <= out.bound);
        let d = 2 * lambda as usize + 1;
        let out = layered_list_color(&mut cluster(g.n()), &g, lambda, d).unwrap();
        assert!(verify_coloring(&g, &out.coloring.color));
        assert!(out.coloring.palette <= 3 * d as u64 + 2);
        assert!(chi <= 2 * lambda, "degeneracy bound");
    }
}

#[test]
fn validators_agree_with_definitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for g in small_graphs() {
        for _ in 0..20 {
            let set: Vec<usize> = (0..g.n()).filter(|_| rng.gen_bool(0.4)).collect();
            assert_eq!(verify_mis(&g, &set), brute_is_mis(&g, &set), "{set:?}");
            let edges: Vec<(usize, usize)> = g.edges().iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
            assert_eq!(verify_mm(&g, &edges), brute_is_mm(&g, &edges), "{edges:?}");
        }
        assert!(brute_is_mis(&g, &greedy_mis(&g)));
        assert!(brute_is_mm(&g, &greedy_mm(&g)));
    }
}

#[test]
fn solver_outputs_satisfy_brute_force_definitions() {
    for g in small_graphs() {
        let mut c = Cluster::new(g.n().max(2), 0.5, Mode::Report, u64::MAX, 1).unwrap();
        c.s = 4;
        let mis = solve(&mut c, &g, Kind::Mis).unwrap();
        assert!(brute_is_mis(&g, &mis.solution.independent));
        let mm = solve(&mut c, &g, Kind::Mm).unwrap();
        assert!(brute_is_mm(&g, &mm.solution.matching));
    }
}

#[test]
fn best_seed_matches_enumeration() {
    let f = KWiseFamily::new(32, 3, 2).unwrap();
    let points: Vec<u64> = vec![1, 4, 9, 16, 25, 30];
    let score = |seed: &[u64]| points.iter().map(|&x| (f.eval_unchecked(seed, x) == 0) as i64).sum::<i64>();
    let count = 1u64 << f.seed_bits();
    let scores: Vec<i64> = (0..count).map(|i| score(&f.seed_from_index(i).unwrap())).collect();
    let top = *scores.iter().max().unwrap();
    let req =
        || SeedRequest { family: &f, direction: Direction::Maximize, work_per_seed: 6, window: 16, context: "oracle" };
    let choice = best_seed(&mut cluster(64), req(), score, None).unwrap();
    assert_eq!(choice.method, SearchMethod::BruteForce);
    assert_eq!(choice.score, top);
    assert_eq!(choice.expectation, Some(Q::new(scores.iter().map(|&s| s as i128).sum(), count as i128)));
    // Pairwise independence: each point hits 0 with probability 1/8.
    assert_eq!(choice.expectation, Some(Q::new(6, 8)));
    let first = scores.iter().position(|&s| s >= 2).unwrap() as u64;
    let early = best_seed(&mut cluster(64), req(), score, Some(2)).unwrap();
    assert_eq!(early.seed, f.seed_from_index(first).unwrap());
}

#[test]
fn small_families_are_kwise_uniform() {
    for (domain, ell, k) in [(8, 1, 3), (16, 2, 2), (5, 3, 2), (4, 1, 4)] {
        let f = KWiseFamily::new(domain, ell, k).unwrap();
        let points: Vec<u64> = (0..k as u64).collect();
        assert!(verify_kwise(&f, &points).unwrap());
    }
    // k + 1 points cannot all be independent for a polynomial family.
    let f = KWiseFamily::new(8, 3, 2).unwrap();
    assert!(!verify_kwise(&f, &[0, 1, 2]).unwrap());
}

#[test]
fn ball_doubling_and_removal_match_fresh_collection() {
    let graphs = [gen_bounded_arboricity(60, 2, 3), gen_grid(6, 7), gen_cycle(30), random_graph(40, 0.08, 11)];
    for g in &graphs {
        let n = g.n();
        let active: Vec<bool> = (0..n).map(|v| v % 3 != 0).collect();
        for r in [1, 2, 3, 5] {
            let mut c = cluster(n);
            let store = collect_balls(&mut c, g, r, &active).unwrap();
            assert_eq!(double_balls(&mut c, &store, g).unwrap(), collect_balls(&mut c, g, 2 * r, &active).unwrap());
            let removed: Vec<bool> = (0..n).map(|v| v % 5 == 1).collect();
            let live = g.without(&removed);
            let kept: Vec<bool> = (0..n).map(|v| active[v] && !removed[v]).collect();
            assert_eq!(
                remove_and_notify(&mut c, &store, &removed).unwrap(),
                collect_balls(&mut c, &live, r, &kept).unwrap()
            );
        }
    }
}
