//! Immutable undirected simple graphs and the arboricity toolbox around them.

mod classes;
mod gen;
mod io;
mod partition;
mod props;

pub use classes::{beta_of, degree_class, delta_i, high_threshold, i_max, i_min, integer_root};
pub use gen::{
    gen_bounded_arboricity, gen_complete, gen_cycle, gen_degenerate, gen_grid, gen_hub, gen_path, gen_star, gen_tree,
    HubSpec,
};
pub use io::{load_graph, parse_edge_list, write_edge_list};
pub use partition::{estimate_arboricity, forest_decomposition, h_partition, ForestDecomposition, HPartition};
pub use props::{check_arb_properties, ArbReport};

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    /// Canonical edges (u < v), sorted lexicographically; position = edge id.
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        let mut list = Vec::new();
        for (i, (a, b)) in edges.into_iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::Invariant {
                    line: None,
                    msg: format!("edge {i} ({a}, {b}) out of range for n={n}"),
                });
            }
            if a == b {
                return Err(Error::Invariant { line: None, msg: format!("self-loop at {a}") });
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Invariant { line: None, msg: format!("duplicate edge ({}, {})", w[0].0, w[0].1) });
        }
        Ok(Self::from_sorted(n, list))
    }

    /// Builds a graph silently dropping self-loops and duplicate edges.
    pub fn from_edges_lossy(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Graph {
        let mut list: Vec<(usize, usize)> =
            edges.into_iter().filter(|&(a, b)| a != b && a < n && b < n).map(|(a, b)| (a.min(b), a.max(b))).collect();
        list.sort_unstable();
        list.dedup();
        Self::from_sorted(n, list)
    }

    pub fn empty(n: usize) -> Graph {
        Graph { n, adj: vec![Vec::new(); n], edges: Vec::new() }
    }

    fn from_sorted(n: usize, edges: Vec<(usize, usize)>) -> Graph {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, adj, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    /// Same vertex ids, keeping only edges with both endpoints in `keep`.
    pub fn induced(&self, keep: &[bool]) -> Graph {
        let edges = self.edges.iter().copied().filter(|&(u, v)| keep[u] && keep[v]).collect();
        Self::from_sorted(self.n, edges)
    }

    /// Same vertex ids, dropping every edge incident to a removed vertex.
    pub fn without(&self, removed: &[bool]) -> Graph {
        let edges = self.edges.iter().copied().filter(|&(u, v)| !removed[u] && !removed[v]).collect();
        Self::from_sorted(self.n, edges)
    }

    /// Same vertex ids, keeping the edges whose id satisfies `keep`.
    pub fn edge_subgraph(&self, keep: impl Fn(usize) -> bool) -> Graph {
        let edges = self.edges.iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, &e)| e).collect();
        Self::from_sorted(self.n, edges)
    }

    /// Breadth-first distances from `src`, truncated at `limit` hops.
    pub fn bfs_within(&self, src: usize, limit: usize) -> Vec<(usize, usize)> {
        let mut seen = std::collections::HashMap::new();
        let mut order = vec![(src, 0)];
        seen.insert(src, 0usize);
        let mut queue = VecDeque::from([(src, 0usize)]);
        while let Some((u, d)) = queue.pop_front() {
            if d == limit {
                continue;
            }
            for &w in &self.adj[u] {
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(w) {
                    e.insert(d + 1);
                    order.push((w, d + 1));
                    queue.push_back((w, d + 1));
                }
            }
        }
        order
    }

    /// Multi-source BFS distances (None = farther than `limit`).
    pub fn multi_source_dist(&self, sources: impl IntoIterator<Item = usize>, limit: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        for s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            if d == limit {
                continue;
            }
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// The t-th power: u ~ v iff 1 ≤ dist(u, v) ≤ t.
    pub fn power(&self, t: usize) -> Graph {
        if t <= 1 {
            return self.clone();
        }
        let mut edges = Vec::new();
        for v in 0..self.n {
            for (u, d) in self.bfs_within(v, t) {
                if d > 0 && v < u {
                    edges.push((v, u));
                }
            }
        }
        edges.sort_unstable();
        Self::from_sorted(self.n, edges)
    }

    /// Vertices are edge ids; two edges are adjacent iff they share an endpoint.
    pub fn line_graph(&self) -> Graph {
        let mut edges = Vec::new();
        for v in 0..self.n {
            let ids: Vec<usize> = self.adj[v].iter().map(|&w| self.edge_id(v, w).unwrap()).collect();
            for (i, &a) in ids.iter().enumerate() {
                for &b in &ids[i + 1..] {
                    edges.push((a.min(b), a.max(b)));
                }
            }
        }
        Self::from_edges_lossy(self.m(), edges)
    }

    /// Number of connected components counting isolated vertices.
    pub fn components(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// Words needed to store the graph: one per vertex plus two per edge.
    pub fn words(&self) -> u64 {
        (self.n + 2 * self.m()) as u64
    }
}
