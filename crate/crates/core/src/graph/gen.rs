//! Deterministic generators. Everything is seeded through ChaCha8.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;

/// Decodes a uniformly random Prüfer sequence into a spanning tree on [n].
fn random_tree(n: usize, rng: &mut ChaCha8Rng, out: &mut Vec<(usize, usize)>) {
    if n < 2 {
        return;
    }
    if n == 2 {
        out.push((0, 1));
        return;
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut remaining = vec![1usize; n];
    for &x in &seq {
        remaining[x] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (0..n).filter(|&v| remaining[v] == 1).map(Reverse).collect();
    for &x in &seq {
        let Reverse(leaf) = leaves.pop().unwrap();
        out.push((leaf, x));
        remaining[x] -= 1;
        if remaining[x] == 1 {
            leaves.push(Reverse(x));
        }
    }
    let Reverse(a) = leaves.pop().unwrap();
    let Reverse(b) = leaves.pop().unwrap();
    out.push((a, b));
}

/// Union of λ uniform random spanning trees; arboricity ≤ λ.
pub fn gen_bounded_arboricity(n: usize, lambda: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for _ in 0..lambda {
        random_tree(n, &mut rng, &mut edges);
    }
    Graph::from_edges_lossy(n, edges)
}

pub fn gen_tree(n: usize, seed: u64) -> Graph {
    gen_bounded_arboricity(n, 1, seed)
}

/// Each vertex links to up to λ distinct earlier vertices: λ-degenerate, arboricity ≤ λ.
pub fn gen_degenerate(n: usize, lambda: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        let k = lambda.min(v);
        for u in rand::seq::index::sample(&mut rng, v, k) {
            edges.push((u, v));
        }
    }
    Graph::from_edges_lossy(n, edges)
}

#[derive(Clone, Copy, Debug)]
pub struct HubSpec {
    pub hubs: usize,
    pub hub_degree: usize,
}

/// λ random trees plus vertex-disjoint stars around `hubs` centres: arboricity ≤ λ + 1.
pub fn gen_hub(n: usize, lambda: usize, spec: HubSpec, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for _ in 0..lambda {
        random_tree(n, &mut rng, &mut edges);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let hubs = spec.hubs.min(n);
    let (centres, rest) = order.split_at(hubs);
    let per = if hubs == 0 { 0 } else { spec.hub_degree.min(rest.len() / hubs) };
    for (i, &c) in centres.iter().enumerate() {
        for &leaf in &rest[i * per..(i + 1) * per] {
            edges.push((c, leaf));
        }
    }
    Graph::from_edges_lossy(n, edges)
}

pub fn gen_path(n: usize) -> Graph {
    Graph::from_edges_lossy(n, (1..n).map(|v| (v - 1, v)))
}

pub fn gen_cycle(n: usize) -> Graph {
    let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    if n >= 3 {
        edges.push((0, n - 1));
    }
    Graph::from_edges_lossy(n, edges)
}

/// K_{1,leaves} with centre 0.
pub fn gen_star(leaves: usize) -> Graph {
    Graph::from_edges_lossy(leaves + 1, (1..=leaves).map(|v| (0, v)))
}

pub fn gen_complete(n: usize) -> Graph {
    Graph::from_edges_lossy(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

pub fn gen_grid(rows: usize, cols: usize) -> Graph {
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Graph::from_edges_lossy(rows * cols, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_tree_is_spanning_tree() {
        for seed in 0..20 {
            let g = gen_tree(30, seed);
            assert_eq!(g.m(), 29);
            assert_eq!(g.components(), 1);
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(gen_bounded_arboricity(100, 3, 9), gen_bounded_arboricity(100, 3, 9));
        assert_ne!(gen_bounded_arboricity(100, 3, 9), gen_bounded_arboricity(100, 3, 10));
        assert!(gen_bounded_arboricity(100, 3, 9).m() <= 3 * 99);
    }

    #[test]
    fn hub_degrees() {
        let g = gen_hub(200, 1, HubSpec { hubs: 2, hub_degree: 50 }, 1);
        assert!(g.max_degree() >= 50);
    }
}
