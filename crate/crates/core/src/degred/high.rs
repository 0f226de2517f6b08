//! Extraction of β-high subgraphs: one degree class at a time, or every class
//! at once on vertex-disjoint, well-separated pieces.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{beta_of, delta_i, high_threshold, i_max, i_min, Graph};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BetaHighGraph {
    pub class: u32,
    pub beta: u64,
    /// V^high, sorted.
    pub high: Vec<usize>,
    /// T(v) for each high vertex (aligned with `high`), sorted, of size β⁴.
    pub t: Vec<Vec<usize>>,
    /// V^low = ∪ T(v), sorted.
    pub low: Vec<usize>,
    /// For each low vertex (aligned with `low`): the high vertices whose T contains it, sorted.
    pub low_high: Vec<Vec<usize>>,
    /// For each low vertex: its low neighbours (E₂), sorted, as indices into `low`.
    pub low_adj: Vec<Vec<usize>>,
    /// |V(G, Δ_i)|: vertices of degree above √Δ_i.
    pub heavy: usize,
    /// Heavy vertices left out of V^high.
    pub bad: usize,
}

impl BetaHighGraph {
    pub fn empty(class: u32, beta: u64) -> Self {
        BetaHighGraph {
            class,
            beta,
            high: Vec::new(),
            t: Vec::new(),
            low: Vec::new(),
            low_high: Vec::new(),
            low_adj: Vec::new(),
            heavy: 0,
            bad: 0,
        }
    }

    pub fn low_index(&self, u: usize) -> Option<usize> {
        self.low.binary_search(&u).ok()
    }

    pub fn e2_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, adj) in self.low_adj.iter().enumerate() {
            for &j in adj {
                if i < j {
                    out.push((self.low[i], self.low[j]));
                }
            }
        }
        out
    }

    /// All vertices of H.
    pub fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.high.iter().chain(&self.low).copied().collect();
        v.sort_unstable();
        v
    }

    /// Checks the β-high definition: high vertices see ≥ β⁴ low ones; low
    /// vertices see ≤ β high and ≤ β² low ones.
    pub fn check(&self) -> Result<()> {
        let b = self.beta as usize;
        for (v, t) in self.high.iter().zip(&self.t) {
            if t.len() < b.pow(4) {
                return Err(Error::Validation(format!("high vertex {v} has {} < β⁴ low neighbours", t.len())));
            }
        }
        for (i, u) in self.low.iter().enumerate() {
            if self.low_high[i].len() > b {
                return Err(Error::Validation(format!(
                    "low vertex {u} has {} > β high neighbours",
                    self.low_high[i].len()
                )));
            }
            if self.low_adj[i].len() > b * b {
                return Err(Error::Validation(format!(
                    "low vertex {u} has {} > β² low neighbours",
                    self.low_adj[i].len()
                )));
            }
        }
        Ok(())
    }
}

/// Extraction for class i on `g`. Vertices with degree above
/// √Δ_i are "heavy"; those with a majority of heavy neighbours are skipped,
/// the rest keep their lowest-id light edges, and heavy vertices with enough
/// well-behaved light neighbours become V^high with T(v) = the first β⁴ of them.
pub fn prepare_single(g: &Graph, class: u32, lambda: u64) -> Result<BetaHighGraph> {
    if class < i_min(lambda) {
        return Err(Error::Precondition(format!("Δ_{class} = {} is below max(λ,2)^16 for λ={lambda}", delta_i(class))));
    }
    let beta = beta_of(class).min(u64::MAX as u128) as u64;
    let thr = high_threshold(class);
    let n = g.n();
    let heavy: Vec<bool> = (0..n).map(|v| g.degree(v) as u128 > thr).collect();
    let heavy_count = heavy.iter().filter(|&&h| h).count();
    if heavy_count == 0 {
        return Ok(BetaHighGraph::empty(class, beta));
    }
    let b4 = beta.saturating_pow(4) as usize;
    let b8 = beta.saturating_pow(8) as usize;
    let keep = b8.saturating_mul(2);

    // Heavy vertices without a heavy majority keep up to 2β⁸ light edges (Ẽ).
    let mut trimmed: Vec<(usize, Vec<usize>)> = Vec::new();
    for v in (0..n).filter(|&v| heavy[v]) {
        let heavy_nbrs = g.neighbors(v).iter().filter(|&&u| heavy[u]).count();
        if 2 * heavy_nbrs >= g.degree(v) {
            continue;
        }
        let light: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| !heavy[u]).take(keep).collect();
        trimmed.push((v, light));
    }
    let mut deg_tilde = vec![0usize; n];
    let mut in_shell = vec![false; n];
    for (_, light) in &trimmed {
        for &u in light {
            deg_tilde[u] += 1;
            in_shell[u] = true;
        }
    }
    let shell_good: Vec<bool> = (0..n)
        .map(|u| {
            in_shell[u]
                && (deg_tilde[u] as u64) < beta
                && (g.neighbors(u).iter().filter(|&&w| in_shell[w]).count() as u64) < beta.saturating_mul(beta)
        })
        .collect();

    let mut high = Vec::new();
    let mut t = Vec::new();
    for (v, light) in &trimmed {
        let good: Vec<usize> = light.iter().copied().filter(|&u| shell_good[u]).collect();
        if good.len() >= b8 {
            high.push(*v);
            t.push(good[..b4].to_vec());
        }
    }
    let mut low: Vec<usize> = t.iter().flatten().copied().collect();
    low.sort_unstable();
    low.dedup();
    let mut low_high = vec![Vec::new(); low.len()];
    for (v, tv) in high.iter().zip(&t) {
        for u in tv {
            low_high[low.binary_search(u).unwrap()].push(*v);
        }
    }
    let low_adj =
        low.iter().map(|&u| g.neighbors(u).iter().filter_map(|w| low.binary_search(w).ok()).collect()).collect();
    let bad = heavy_count - high.len();
    Ok(BetaHighGraph { class, beta, high, t, low, low_high, low_adj, heavy: heavy_count, bad })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrepareReport {
    /// V^high ⊆ V(G, Δ_i).
    pub high_are_heavy: bool,
    /// Every vertex of H lies within distance 3 of V(G, Δ_i).
    pub near_heavy: bool,
    /// bad ≤ 5λ·heavy/(β − λ); None when β ≤ λ makes the bound vacuous.
    pub bad_bound: Option<bool>,
}

/// Measures the three extraction properties directly.
pub fn check_prepare(g: &Graph, h: &BetaHighGraph, lambda: u64) -> PrepareReport {
    let thr = high_threshold(h.class);
    let heavy: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) as u128 > thr).collect();
    let high_are_heavy = h.high.iter().all(|&v| g.degree(v) as u128 > thr);
    let dist = g.multi_source_dist(heavy.iter().copied(), 3);
    let near_heavy = h.vertices().iter().all(|&v| dist[v].is_some());
    let bad_bound = (h.beta > lambda)
        .then(|| (h.bad as u128) * ((h.beta - lambda) as u128) <= 5 * lambda as u128 * h.heavy as u128);
    PrepareReport { high_are_heavy, near_heavy, bad_bound }
}

/// D_G(v): the largest degree within distance 4, by four max-propagation rounds.
pub fn max_degree_within4(g: &Graph) -> Vec<usize> {
    let mut d = g.degrees();
    for _ in 0..4 {
        d = (0..g.n()).map(|v| g.neighbors(v).iter().map(|&u| d[u]).fold(d[v], usize::max)).collect();
    }
    d
}

/// The degree class of vertex degrees: V_i = {v : deg ∈ (Δ_{i−1}, Δ_i]}.
pub fn in_class(deg: usize, i: u32) -> bool {
    let d = deg as u128;
    d > high_threshold(i) && d <= delta_i(i)
}

/// Per-class β-high graphs on the pieces G_i = G[{u : D_G(u) ∈ class i, dist(u, V_i) ≤ 3}].
pub fn prepare_multi(g: &Graph, lambda: u64) -> Result<BTreeMap<u32, BetaHighGraph>> {
    let lo = i_min(lambda);
    let hi = i_max(g.max_degree() as u64).max(lo);
    let dmax = max_degree_within4(g);
    let mut out = BTreeMap::new();
    for i in lo..=hi {
        let members: Vec<usize> = (0..g.n()).filter(|&v| in_class(g.degree(v), i)).collect();
        if members.is_empty() {
            continue;
        }
        let dist = g.multi_source_dist(members.iter().copied(), 3);
        let keep: Vec<bool> = (0..g.n()).map(|u| in_class(dmax[u], i) && dist[u].is_some()).collect();
        let h = prepare_single(&g.induced(&keep), i, lambda)?;
        if !h.high.is_empty() {
            out.insert(i, h);
        }
    }
    Ok(out)
}

/// Minimum graph distance between vertex sets of distinct classes (None if < 2 pairs).
pub fn min_class_separation(g: &Graph, parts: &BTreeMap<u32, BetaHighGraph>) -> Option<usize> {
    let sets: Vec<Vec<usize>> = parts.values().map(BetaHighGraph::vertices).collect();
    let mut best: Option<usize> = None;
    for (a, sa) in sets.iter().enumerate() {
        let dist = g.multi_source_dist(sa.iter().copied(), g.n());
        for sb in &sets[a + 1..] {
            for &v in sb {
                let d = dist[v].unwrap_or(usize::MAX);
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
    }
    best
}

/// Conflict graph on V^low (vertex i = low[i]): E₂ plus a clique on
/// T(v) ∪ N_{E₂}(T(v)) for every high v — exactly the pairs whose choices
/// must be pairwise independent.
pub fn conflict_graph(h: &BetaHighGraph) -> Graph {
    let mut edges = Vec::new();
    for (i, adj) in h.low_adj.iter().enumerate() {
        for &j in adj {
            edges.push((i, j));
        }
    }
    for tv in &h.t {
        let mut group: Vec<usize> = tv.iter().map(|&u| h.low_index(u).unwrap()).collect();
        let base = group.clone();
        for i in base {
            group.extend_from_slice(&h.low_adj[i]);
        }
        group.sort_unstable();
        group.dedup();
        for (a, &x) in group.iter().enumerate() {
            for &y in &group[a + 1..] {
                edges.push((x, y));
            }
        }
    }
    Graph::from_edges_lossy(h.low.len(), edges)
}
