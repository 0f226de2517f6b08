use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{estimate_arboricity, Graph};

#[derive(Clone, Debug, Serialize)]
pub struct ArbReport {
    /// m < λn.
    pub edge_count: bool,
    /// Arboricity estimates never grow on induced subgraphs.
    pub monotone: bool,
    /// #{deg ≥ t} < λn/(t−λ) for every power of two t > λ.
    pub degree_tail: bool,
    /// #{edges with both endpoints of degree ≥ t} < λm/(t−λ).
    pub edge_tail: bool,
    pub failures: Vec<String>,
}

impl ArbReport {
    pub fn all_pass(&self) -> bool {
        self.edge_count && self.monotone && self.degree_tail && self.edge_tail
    }
}

/// Checks the standard counting consequences of arboricity ≤ λ.
pub fn check_arb_properties(g: &Graph, lambda: u64, seed: u64) -> ArbReport {
    let (n, m) = (g.n() as u128, g.m() as u128);
    let lam = lambda as u128;
    let mut failures = Vec::new();

    let edge_count = m < lam * n || (n == 0 && m == 0);
    if !edge_count {
        failures.push(format!("m={m} ≥ λn={}", lam * n));
    }

    let deg = g.degrees();
    let (mut degree_tail, mut edge_tail) = (true, true);
    let mut t = (lam + 1).next_power_of_two();
    while t <= (g.max_degree() as u128 + 1).max(lam + 1) {
        let heavy = deg.iter().filter(|&&d| d as u128 >= t).count() as u128;
        // heavy < λn/(t−λ)  ⇔  heavy·(t−λ) < λn
        if heavy * (t - lam) >= lam * n && heavy > 0 {
            degree_tail = false;
            failures.push(format!("t={t}: {heavy} vertices of degree ≥ t"));
        }
        let heavy_edges =
            g.edges().iter().filter(|&&(u, v)| deg[u] as u128 >= t && deg[v] as u128 >= t).count() as u128;
        if heavy_edges * (t - lam) >= lam * m && heavy_edges > 0 {
            edge_tail = false;
            failures.push(format!("t={t}: {heavy_edges} edges between degree ≥ t vertices"));
        }
        t *= 2;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = estimate_arboricity(g);
    let mut monotone = true;
    for _ in 0..20 {
        let keep: Vec<bool> = (0..g.n()).map(|_| rng.gen_bool(0.5)).collect();
        let sub = estimate_arboricity(&g.induced(&keep));
        if sub > full {
            monotone = false;
            failures.push(format!("induced subgraph estimate {sub} > {full}"));
        }
    }

    ArbReport { edge_count, monotone, degree_tail, edge_tail, failures }
}
