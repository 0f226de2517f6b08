//! Contract-checked sparsification for one Luby step: a capped edge set E′,
//! the candidate set Q (MIS), and the vertices B whose neighbourhoods carry
//! enough sampling mass.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::solution::Kind;
use crate::util::ceil_pow;

/// Slack on floating mass comparisons.
const EPS: f64 = 1e-12;

/// Mass lower bound of Property 2 for MM.
pub const MM_MASS: f64 = 1.0 / 27.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparsifiedInstance {
    pub kind: Kind,
    pub delta: f64,
    /// Degree cap of Property 1.
    pub cap: usize,
    /// E′, canonical and sorted.
    pub edges: Vec<(usize, usize)>,
    /// B, sorted.
    pub b: Vec<usize>,
    /// Q membership (MIS only; empty for MM).
    pub q: Vec<bool>,
    /// Σ_{v∈B} deg(v).
    pub mass: u64,
    /// Whether Q had to include vertices above the cap.
    pub widened: bool,
}

impl SparsifiedInstance {
    pub fn sparse_graph(&self, n: usize) -> Graph {
        Graph::from_edges_lossy(n, self.edges.iter().copied())
    }

    /// deg_Q(u) = |N(u) ∩ Q|.
    pub fn q_degree(&self, g: &Graph, u: usize) -> usize {
        g.neighbors(u).iter().filter(|&&w| self.q[w]).count()
    }

    pub fn mis_lower(&self) -> f64 {
        self.delta / 10.0
    }
}

/// Edges kept by both endpoints when every vertex keeps its `cap` lowest-id
/// incident edges.
fn capped_edges(g: &Graph, cap: usize) -> Vec<(usize, usize)> {
    g.edges()
        .iter()
        .copied()
        .filter(|&(u, v)| {
            let rank_u = g.neighbors(u).binary_search(&v).unwrap();
            let rank_v = g.neighbors(v).binary_search(&u).unwrap();
            rank_u < cap && rank_v < cap
        })
        .collect()
}

/// deg_{E′}(e) for e = {u, v}: the number of E′-edges sharing an endpoint.
pub fn edge_degree(sparse: &Graph, u: usize, v: usize) -> usize {
    sparse.degree(u) + sparse.degree(v) - 2
}

fn mm_in_b(sparse: &Graph, v: usize) -> bool {
    let mut mass = 0.0;
    for &u in sparse.neighbors(v) {
        let d = edge_degree(sparse, u, v);
        if d == 0 {
            return true;
        }
        mass += 1.0 / d as f64;
    }
    mass + EPS >= MM_MASS
}

fn mis_in_b(g: &Graph, sparse: &Graph, q: &[bool], qdeg: &[usize], lower: f64, cap: usize, v: usize) -> bool {
    if sparse.degree(v) > cap || qdeg[v] > cap {
        return false;
    }
    let mut mass = 0.0;
    for &u in sparse.neighbors(v).iter().filter(|&&u| q[u]) {
        if qdeg[u] == 0 {
            return true;
        }
        mass += 1.0 / qdeg[u] as f64;
    }
    let _ = g;
    mass + EPS >= lower
}

/// Builds and validates the instance. E′ keeps the ⌈n^δ⌉ lowest-id incident
/// edges per vertex; for MIS, Q is every non-isolated vertex of degree at most
/// the cap (or every non-isolated vertex if that leaves B too light).
pub fn sparsify(g: &Graph, kind: Kind, delta: f64) -> Result<SparsifiedInstance> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("δ = {delta} must lie in (0, 1)")));
    }
    let n = g.n();
    let cap = ceil_pow(n.max(2) as f64, delta).max(1) as usize;
    let edges = capped_edges(g, cap);
    let sparse = Graph::from_edges_lossy(n, edges.iter().copied());
    let required = delta * g.m() as f64 / 8.0;
    let build = |b: Vec<usize>, q: Vec<bool>, cap: usize, widened: bool| {
        let mass = b.iter().map(|&v| g.degree(v) as u64).sum();
        SparsifiedInstance { kind, delta, cap, edges: edges.clone(), b, q, mass, widened }
    };
    let inst = match kind {
        Kind::Mm => {
            let b = (0..n).filter(|&v| mm_in_b(&sparse, v)).collect();
            build(b, Vec::new(), cap, false)
        }
        Kind::Mis => {
            let attempt = |q: Vec<bool>, cap: usize, widened: bool| {
                let qdeg: Vec<usize> = (0..n).map(|u| g.neighbors(u).iter().filter(|&&w| q[w]).count()).collect();
                let b = (0..n).filter(|&v| mis_in_b(g, &sparse, &q, &qdeg, delta / 10.0, cap, v)).collect();
                build(b, q, cap, widened)
            };
            let q: Vec<bool> = (0..n).map(|v| g.degree(v) > 0 && g.degree(v) <= cap).collect();
            let first = attempt(q, cap, false);
            if (first.mass as f64) < required {
                let q = (0..n).map(|v| g.degree(v) > 0).collect();
                attempt(q, g.max_degree().max(cap), true)
            } else {
                first
            }
        }
    };
    check_properties(g, &inst)?;
    Ok(inst)
}

/// Re-checks Properties 1–3 from scratch.
pub fn check_properties(g: &Graph, inst: &SparsifiedInstance) -> Result<()> {
    let n = g.n();
    let sparse = inst.sparse_graph(n);
    for &(u, v) in &inst.edges {
        if !g.has_edge(u, v) {
            return Err(Error::Sparsifier {
                property: 1,
                achieved: format!("({u}, {v}) not an edge"),
                required: "E′ ⊆ E".into(),
            });
        }
    }
    match inst.kind {
        Kind::Mm => {
            if let Some(v) = (0..n).find(|&v| sparse.degree(v) > inst.cap) {
                return Err(Error::Sparsifier {
                    property: 1,
                    achieved: format!("deg_E′({v}) = {}", sparse.degree(v)),
                    required: format!("≤ {}", inst.cap),
                });
            }
            if let Some(&v) = inst.b.iter().find(|&&v| !mm_in_b(&sparse, v)) {
                return Err(Error::Sparsifier {
                    property: 2,
                    achieved: format!("vertex {v}"),
                    required: "mass ≥ 1/27".into(),
                });
            }
        }
        Kind::Mis => {
            let qdeg: Vec<usize> = (0..n).map(|u| inst.q_degree(g, u)).collect();
            let mut in_b = vec![false; n];
            for &v in &inst.b {
                in_b[v] = true;
            }
            if let Some(v) =
                (0..n).find(|&v| (in_b[v] || inst.q[v]) && (sparse.degree(v) > inst.cap || qdeg[v] > inst.cap))
            {
                return Err(Error::Sparsifier {
                    property: 1,
                    achieved: format!("vertex {v}: deg_E′ = {}, deg_Q = {}", sparse.degree(v), qdeg[v]),
                    required: format!("≤ {}", inst.cap),
                });
            }
            if let Some(&v) =
                inst.b.iter().find(|&&v| !mis_in_b(g, &sparse, &inst.q, &qdeg, inst.mis_lower(), inst.cap, v))
            {
                return Err(Error::Sparsifier {
                    property: 2,
                    achieved: format!("vertex {v}"),
                    required: "mass ≥ δ/10".into(),
                });
            }
        }
    }
    let required = inst.delta * g.m() as f64 / 8.0;
    if (inst.mass as f64) < required {
        return Err(Error::Sparsifier {
            property: 3,
            achieved: inst.mass.to_string(),
            required: format!("≥ δ|E|/8 = {required}"),
        });
    }
    Ok(())
}
