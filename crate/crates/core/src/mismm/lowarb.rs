//! Finisher for graphs of small arboricity: an H-partition, its forest
//! decomposition, then colour-by-colour greedy (MIS) or forest-by-forest
//! proposals along 3-coloured trees (MM).

use serde::Serialize;

use crate::derand::{arb_linial_coloring, compress_colors};
use crate::error::{Error, Result};
use crate::graph::{forest_decomposition, h_partition, Graph};
use crate::mpc::Cluster;
use crate::solution::{check_solution, Kind, PartialSolution};
use crate::util::{ceil_log2, ceil_pow};

#[derive(Clone, Debug, Serialize)]
pub struct LowArbOutcome {
    pub solution: PartialSolution,
    pub d: usize,
    pub layers: u32,
    /// MIS: colours of the out-neighbour colouring; MM: forests processed.
    pub classes: u64,
}

/// d = max(3, 2λ+1, ⌈λ^{1+ε}⌉).
pub fn low_arb_degree(lambda: u64, epsilon: f64) -> usize {
    let l = lambda.max(1);
    (2 * l + 1).max(ceil_pow(l as f64, 1.0 + epsilon)).max(3) as usize
}

/// Cole–Vishkin on a rooted forest, reduced to colours {0, 1, 2}. Returns the
/// colouring and the number of reduction rounds.
pub fn forest_three_coloring(parent: &[Option<usize>]) -> (Vec<u8>, u32) {
    let n = parent.len();
    let mut color: Vec<u64> = (0..n as u64).collect();
    let mut rounds = 0;
    while color.iter().any(|&c| c >= 6) {
        let next: Vec<u64> = (0..n)
            .map(|v| {
                let own = color[v];
                let i = match parent[v] {
                    Some(p) => (own ^ color[p]).trailing_zeros() as u64,
                    None => 0,
                };
                2 * i + ((own >> i) & 1)
            })
            .collect();
        color = next;
        rounds += 1;
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        if let Some(p) = parent[v] {
            children[p].push(v);
        }
    }
    for x in [5u64, 4, 3] {
        // Shift down: children of a vertex then share one colour.
        let shifted: Vec<u64> = (0..n)
            .map(|v| match parent[v] {
                Some(p) => color[p],
                None => (0..3).find(|&c| c != color[v]).unwrap(),
            })
            .collect();
        color = shifted;
        for v in 0..n {
            if color[v] == x {
                let mut used = [false; 6];
                if let Some(p) = parent[v] {
                    used[color[p] as usize] = true;
                }
                for &w in &children[v] {
                    used[color[w] as usize] = true;
                }
                color[v] = (0..3).find(|&c| !used[c as usize]).unwrap();
            }
        }
        rounds += 2;
    }
    (color.into_iter().map(|c| c as u8).collect(), rounds)
}

/// Solves `kind` on a graph of arboricity at most `lambda`.
pub fn low_arb_solve(c: &mut Cluster, g: &Graph, lambda: u64, kind: Kind, epsilon: f64) -> Result<LowArbOutcome> {
    let n = g.n();
    let d = low_arb_degree(lambda, epsilon);
    let hp = h_partition(g, d, None).map_err(|e| match e {
        Error::NonProgress { .. } => {
            Error::Precondition(format!("arboricity exceeds {lambda}: peeling with d = {d} stalls"))
        }
        e => e,
    })?;
    for v in 0..n {
        c.charge_local(g.degree(v) as u64 + 1, "low-arboricity neighbourhood", Some(v))?;
    }
    c.tick(ceil_log2(hp.num_layers.max(1) as u64) as u64 + 1);
    let fd = forest_decomposition(g, &hp)?;
    let mut sol = PartialSolution::default();
    let classes;
    match kind {
        Kind::Mis => {
            let out: Vec<Vec<usize>> = (0..n).map(|v| fd.out_neighbors(g, v)).collect();
            let ids: Vec<u64> = (0..n as u64).collect();
            let raw = arb_linial_coloring(Some(c), &out, &ids, n.max(1) as u64)?;
            let col = compress_colors(Some(c), &raw.color)?;
            col.check(g)?;
            let mut dominated = vec![false; n];
            let mut members = Vec::new();
            for k in 0..col.palette {
                let joining: Vec<usize> = (0..n).filter(|&v| col.color[v] == k && !dominated[v]).collect();
                for v in joining {
                    members.push(v);
                    dominated[v] = true;
                    for &w in g.neighbors(v) {
                        dominated[w] = true;
                    }
                }
                c.tick(1);
            }
            classes = col.palette;
            sol = PartialSolution::from_independent(g, members);
        }
        Kind::Mm => {
            let mut matched = vec![false; n];
            let mut edges = Vec::new();
            let forests = fd.max_label();
            for label in 1..=forests {
                let parent = fd.parents(g, label);
                let (color, rounds) = forest_three_coloring(&parent);
                c.tick(rounds as u64);
                for k in 0..3u8 {
                    // Children of colour k propose to their parent; each parent takes the smallest id.
                    let mut offer: Vec<Option<usize>> = vec![None; n];
                    for v in (0..n).filter(|&v| color[v] == k && !matched[v]) {
                        if let Some(p) = parent[v].filter(|&p| !matched[p]) {
                            offer[p] = Some(offer[p].map_or(v, |u: usize| u.min(v)));
                        }
                    }
                    for p in 0..n {
                        if let Some(v) = offer[p] {
                            matched[p] = true;
                            matched[v] = true;
                            edges.push((v.min(p), v.max(p)));
                        }
                    }
                    c.tick(2);
                }
            }
            classes = forests as u64;
            sol.extend(PartialSolution::from_matching(edges));
        }
    }
    check_solution(g, kind, &sol)?;
    Ok(LowArbOutcome { solution: sol, d, layers: hp.num_layers, classes })
}
