//! H-partitions by parallel peeling, and the forest decomposition they induce.

use serde::Serialize;

use super::Graph;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HPartition {
    pub d: usize,
    /// Layer per vertex, 1-based; 0 marks an unlayered (residual) vertex.
    pub layer: Vec<u32>,
    pub num_layers: u32,
}

impl HPartition {
    pub fn is_complete(&self) -> bool {
        self.layer.iter().all(|&l| l > 0)
    }

    pub fn unlayered(&self) -> Vec<usize> {
        (0..self.layer.len()).filter(|&v| self.layer[v] == 0).collect()
    }

    pub fn members(&self, i: u32) -> Vec<usize> {
        (0..self.layer.len()).filter(|&v| self.layer[v] == i).collect()
    }

    /// Unlayered vertices rank above every layer.
    pub fn rank(&self, v: usize) -> u32 {
        if self.layer[v] == 0 {
            u32::MAX
        } else {
            self.layer[v]
        }
    }

    /// Checks that every layered vertex has ≤ d neighbours in its own or higher layers.
    pub fn check(&self, g: &Graph) -> Result<()> {
        for v in 0..g.n() {
            if self.layer[v] == 0 {
                continue;
            }
            let up = g.neighbors(v).iter().filter(|&&u| self.rank(u) >= self.layer[v]).count();
            if up > self.d {
                return Err(Error::Validation(format!(
                    "vertex {v} in layer {} has {up} > d={} neighbours at or above its layer",
                    self.layer[v], self.d
                )));
            }
        }
        Ok(())
    }
}

/// Peels all vertices of residual degree ≤ d each round. With `max_layers`, stops
/// after that many layers (or on a round that peels nothing) and leaves the rest
/// unlayered; without it, a round that peels nothing is an error.
pub fn h_partition(g: &Graph, d: usize, max_layers: Option<u32>) -> Result<HPartition> {
    if d == 0 {
        return Err(Error::InvalidArgument("h_partition needs d ≥ 1".into()));
    }
    let n = g.n();
    let mut layer = vec![0u32; n];
    let mut residual = g.degrees();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut round = 0u32;
    while !alive.is_empty() {
        if max_layers.is_some_and(|cap| round >= cap) {
            break;
        }
        let (peel, keep): (Vec<usize>, Vec<usize>) = alive.iter().partition(|&&v| residual[v] <= d);
        if peel.is_empty() {
            if max_layers.is_some() {
                break;
            }
            return Err(Error::NonProgress { round: round as usize + 1, remaining: keep.len() });
        }
        round += 1;
        for &v in &peel {
            layer[v] = round;
        }
        for &v in &peel {
            for &u in g.neighbors(v) {
                if layer[u] == 0 {
                    residual[u] -= 1;
                }
            }
        }
        alive = keep;
    }
    Ok(HPartition { d, layer, num_layers: round })
}

/// Smallest power of two λ̂ such that peeling with d = 2λ̂ finishes within ⌈log₂ n⌉ + 1 rounds.
pub fn estimate_arboricity(g: &Graph) -> u64 {
    if g.m() == 0 {
        return 1;
    }
    let passes = (usize::BITS - (g.n() - 1).leading_zeros()) + 1;
    let mut est = 1u64;
    loop {
        let hp = h_partition(g, 2 * est as usize, Some(passes)).expect("d ≥ 2");
        if hp.is_complete() {
            return est;
        }
        est *= 2;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForestDecomposition {
    pub d: usize,
    /// Per edge id: the endpoint the edge points to.
    pub head: Vec<usize>,
    /// Per edge id: forest label in 1..=d.
    pub label: Vec<u32>,
}

/// Orients every edge toward the higher layer (ties toward the greater id) and
/// labels each vertex's out-edges 1, 2, … in order of head id.
pub fn forest_decomposition(g: &Graph, hp: &HPartition) -> Result<ForestDecomposition> {
    if !hp.is_complete() {
        return Err(Error::IncompletePartition { unlayered: hp.unlayered().len() });
    }
    let key = |v: usize| (hp.layer[v], v);
    let head: Vec<usize> = g.edges().iter().map(|&(u, v)| if key(u) < key(v) { v } else { u }).collect();
    let mut label = vec![0u32; g.m()];
    for v in 0..g.n() {
        let mut next = 0;
        for &w in g.neighbors(v) {
            if key(w) > key(v) {
                next += 1;
                label[g.edge_id(v, w).unwrap()] = next;
            }
        }
    }
    Ok(ForestDecomposition { d: hp.d, head, label })
}

impl ForestDecomposition {
    pub fn tail(&self, g: &Graph, e: usize) -> usize {
        let (u, v) = g.edges()[e];
        if self.head[e] == u {
            v
        } else {
            u
        }
    }

    pub fn out_neighbors(&self, g: &Graph, v: usize) -> Vec<usize> {
        g.neighbors(v).iter().copied().filter(|&w| self.head[g.edge_id(v, w).unwrap()] == w).collect()
    }

    pub fn max_label(&self) -> u32 {
        self.label.iter().copied().max().unwrap_or(0)
    }

    /// Parent of every vertex in the forest with the given label.
    pub fn parents(&self, g: &Graph, label: u32) -> Vec<Option<usize>> {
        let mut parent = vec![None; g.n()];
        for e in 0..g.m() {
            if self.label[e] == label {
                parent[self.tail(g, e)] = Some(self.head[e]);
            }
        }
        parent
    }

    /// Checks out-degree ≤ d, acyclicity of the orientation, and that each label class is a forest.
    pub fn check(&self, g: &Graph) -> Result<()> {
        let n = g.n();
        let mut outdeg = vec![0usize; n];
        let mut indeg = vec![0usize; n];
        for e in 0..g.m() {
            outdeg[self.tail(g, e)] += 1;
            indeg[self.head[e]] += 1;
        }
        if let Some(v) = (0..n).find(|&v| outdeg[v] > self.d) {
            return Err(Error::Validation(format!("vertex {v} has out-degree {} > {}", outdeg[v], self.d)));
        }
        // Kahn's algorithm over the orientation.
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in 0..g.m() {
            out[self.tail(g, e)].push(self.head[e]);
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        if seen != n {
            return Err(Error::Validation("orientation has a directed cycle".into()));
        }
        for c in 1..=self.max_label() {
            let mut uf = UnionFind::new(n);
            for e in (0..g.m()).filter(|&e| self.label[e] == c) {
                let (u, v) = g.edges()[e];
                if !uf.union(u, v) {
                    return Err(Error::Validation(format!("label {c} contains a cycle through edge ({u}, {v})")));
                }
            }
        }
        Ok(())
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False if already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}
