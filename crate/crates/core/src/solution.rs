//! Independent sets, matchings and their validators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Maximal independent set.
    Mis,
    /// Maximal matching.
    Mm,
}

/// A partial solution together with the vertices it eliminates: I ∪ N(I) for
/// independent sets, matched endpoints for matchings.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PartialSolution {
    pub independent: Vec<usize>,
    pub matching: Vec<(usize, usize)>,
    pub removed: Vec<usize>,
}

impl PartialSolution {
    pub fn from_independent(g: &Graph, mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        let mut removed = members.clone();
        for &v in &members {
            removed.extend_from_slice(g.neighbors(v));
        }
        removed.sort_unstable();
        removed.dedup();
        PartialSolution { independent: members, matching: Vec::new(), removed }
    }

    pub fn from_matching(edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut matching: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        matching.sort_unstable();
        let mut removed: Vec<usize> = matching.iter().flat_map(|&(a, b)| [a, b]).collect();
        removed.sort_unstable();
        removed.dedup();
        PartialSolution { independent: Vec::new(), matching, removed }
    }

    pub fn is_empty(&self) -> bool {
        self.independent.is_empty() && self.matching.is_empty()
    }

    pub fn size(&self) -> usize {
        self.independent.len() + self.matching.len()
    }

    pub fn extend(&mut self, other: PartialSolution) {
        self.independent.extend(other.independent);
        self.independent.sort_unstable();
        self.independent.dedup();
        self.matching.extend(other.matching);
        self.matching.sort_unstable();
        self.matching.dedup();
        self.removed.extend(other.removed);
        self.removed.sort_unstable();
        self.removed.dedup();
    }

    pub fn removed_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.removed {
            mask[v] = true;
        }
        mask
    }

    /// Independence (or disjointness) in `g`, without maximality.
    pub fn check_partial(&self, g: &Graph) -> Result<()> {
        check_independent(g, &self.independent)?;
        check_matching(g, &self.matching)
    }
}

fn check_independent(g: &Graph, set: &[usize]) -> Result<()> {
    let mut inside = vec![false; g.n()];
    for &v in set {
        if v >= g.n() {
            return Err(Error::Validation(format!("vertex {v} out of range")));
        }
        inside[v] = true;
    }
    for &(u, v) in g.edges() {
        if inside[u] && inside[v] {
            return Err(Error::Validation(format!("adjacent vertices {u} and {v} both in the independent set")));
        }
    }
    Ok(())
}

fn check_matching(g: &Graph, edges: &[(usize, usize)]) -> Result<()> {
    let mut used = vec![false; g.n()];
    for &(u, v) in edges {
        if !g.has_edge(u, v) {
            return Err(Error::Validation(format!("matched pair ({u}, {v}) is not an edge")));
        }
        if used[u] || used[v] {
            return Err(Error::Validation(format!("edge ({u}, {v}) shares an endpoint with another matched edge")));
        }
        used[u] = true;
        used[v] = true;
    }
    Ok(())
}

/// Independent and maximal: every vertex outside has a neighbour inside.
pub fn check_mis(g: &Graph, set: &[usize]) -> Result<()> {
    check_independent(g, set)?;
    let mut covered = vec![false; g.n()];
    for &v in set {
        covered[v] = true;
        for &u in g.neighbors(v) {
            covered[u] = true;
        }
    }
    match covered.iter().position(|&c| !c) {
        Some(v) => Err(Error::Validation(format!("vertex {v} could join the independent set"))),
        None => Ok(()),
    }
}

/// Disjoint and maximal: every edge has a matched endpoint.
pub fn check_mm(g: &Graph, edges: &[(usize, usize)]) -> Result<()> {
    check_matching(g, edges)?;
    let mut used = vec![false; g.n()];
    for &(u, v) in edges {
        used[u] = true;
        used[v] = true;
    }
    match g.edges().iter().find(|&&(u, v)| !used[u] && !used[v]) {
        Some(&(u, v)) => Err(Error::Validation(format!("edge ({u}, {v}) could join the matching"))),
        None => Ok(()),
    }
}

pub fn verify_mis(g: &Graph, set: &[usize]) -> bool {
    check_mis(g, set).is_ok()
}

pub fn verify_mm(g: &Graph, edges: &[(usize, usize)]) -> bool {
    check_mm(g, edges).is_ok()
}

/// Checks a full solution of the given kind.
pub fn check_solution(g: &Graph, kind: Kind, sol: &PartialSolution) -> Result<()> {
    match kind {
        Kind::Mis => check_mis(g, &sol.independent),
        Kind::Mm => check_mm(g, &sol.matching),
    }
}
