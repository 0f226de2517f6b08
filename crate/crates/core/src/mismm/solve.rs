//! The end-to-end MIS / MM driver: gather small inputs; otherwise handle very
//! high degrees through an H-partition, reduce degrees, and finish with the
//! low-arboricity routine or derandomized Luby.

use serde::Serialize;

use super::heavy::heavy_vertex_match;
use super::lowarb::low_arb_solve;
use super::luby::{derand_luby, derand_luby_with, LubyOutcome};
use crate::degred::degree_reduce;
use crate::error::Result;
use crate::graph::{estimate_arboricity, h_partition, Graph};
use crate::mpc::{collect_balls, double_balls, doubled_sizes, remove_and_notify, Cluster};
use crate::solution::{check_solution, Kind, PartialSolution};
use crate::util::{ceil_log2, ceil_pow};

/// The subgraph on surviving vertices, relabelled monotonically so that every
/// id-based tie-break is unchanged.
#[derive(Clone, Debug)]
pub struct Residual {
    pub graph: Graph,
    /// Local id → original id (increasing).
    pub ids: Vec<usize>,
}

impl Residual {
    pub fn new(g: &Graph, gone: &[bool]) -> Residual {
        let ids: Vec<usize> = (0..g.n()).filter(|&v| !gone[v]).collect();
        let mut index = vec![usize::MAX; g.n()];
        for (i, &v) in ids.iter().enumerate() {
            index[v] = i;
        }
        let edges = g.edges().iter().filter(|&&(u, v)| !gone[u] && !gone[v]).map(|&(u, v)| (index[u], index[v]));
        Residual { graph: Graph::from_edges_lossy(ids.len(), edges), ids }
    }

    /// Maps a solution on the residual back to `g`, eliminating neighbours in `g`.
    pub fn lift(&self, g: &Graph, local: &PartialSolution) -> PartialSolution {
        let mut out = PartialSolution::from_independent(g, local.independent.iter().map(|&v| self.ids[v]).collect());
        out.extend(PartialSolution::from_matching(local.matching.iter().map(|&(a, b)| (self.ids[a], self.ids[b]))));
        out
    }
}

pub fn greedy_mis(g: &Graph) -> Vec<usize> {
    let mut blocked = vec![false; g.n()];
    let mut out = Vec::new();
    for v in 0..g.n() {
        if !blocked[v] {
            out.push(v);
            for &w in g.neighbors(v) {
                blocked[w] = true;
            }
        }
    }
    out
}

pub fn greedy_mm(g: &Graph) -> Vec<(usize, usize)> {
    let mut used = vec![false; g.n()];
    let mut out = Vec::new();
    for &(u, v) in g.edges() {
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            out.push((u, v));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveOutcome {
    pub kind: Kind,
    pub solution: PartialSolution,
    /// The arboricity estimate λ̂ (power of two).
    pub arboricity: u64,
    pub phases: Vec<String>,
    /// Degree-reduction loop iterations plus Luby iterations.
    pub iterations: u32,
}

/// Luby to completion while maintaining gathered balls: removals are
/// propagated after every step and the radius doubles every `reps` steps
/// while the doubled balls fit on one machine.
pub fn luby_with_balls(c: &mut Cluster, g: &Graph, kind: Kind, delta: f64) -> Result<LubyOutcome> {
    // A radius-1 ball holds v, its neighbours and its incident edges.
    if (0..g.n()).any(|v| 1 + 3 * g.degree(v) as u64 > c.s) {
        c.warn("radius-1 balls exceed S; running Luby without gathered balls");
        return derand_luby(c, g, kind, delta);
    }
    let mut store = Some(collect_balls(c, g, 1, &vec![true; g.n()])?);
    let reps = c.constants.reps.max(1);
    let mut steps = 0u32;
    derand_luby_with(c, g, kind, delta, |c, gone| {
        steps += 1;
        if let Some(s) = store.take() {
            let s = remove_and_notify(c, &s, gone)?;
            let live = g.without(gone);
            let sizes = doubled_sizes(&s, &live);
            let grow = steps % reps == 0
                && sizes.iter().all(|&(_, w)| w <= c.s)
                && sizes.iter().map(|&(_, w)| w).sum::<u64>() <= c.global_budget;
            store = Some(if grow { double_balls(c, &s, &live)? } else { s });
        }
        Ok(())
    })
}

/// Computes a maximal independent set or maximal matching of `g`.
pub fn solve(c: &mut Cluster, g: &Graph, kind: Kind) -> Result<SolveOutcome> {
    let n = g.n();
    let delta = c.constants.delta;
    let mut phases = Vec::new();
    if g.words() <= c.s {
        c.charge_local(g.words(), "gather", Some(0))?;
        c.tick(1);
        let solution = match kind {
            Kind::Mis => PartialSolution::from_independent(g, greedy_mis(g)),
            Kind::Mm => PartialSolution::from_matching(greedy_mm(g)),
        };
        check_solution(g, kind, &solution)?;
        phases.push("gather".to_string());
        return Ok(SolveOutcome { kind, solution, arboricity: estimate_arboricity(g), phases, iterations: 0 });
    }
    let lambda = estimate_arboricity(g);
    c.tick(ceil_log2(n as u64) as u64 + 1);
    let mut sol = PartialSolution::default();
    let mut iterations = 0u32;
    if g.max_degree() as u64 > ceil_pow(n as f64, delta) {
        let d = (ceil_pow(n as f64, delta / 3.0) as usize).max(2 * lambda as usize + 1);
        let hp = h_partition(g, d, None)?;
        c.tick(hp.num_layers as u64);
        match kind {
            Kind::Mis => {
                // Layer by layer from the top, each layer has degree ≤ d.
                for layer in (1..=hp.num_layers).rev() {
                    let gone = sol.removed_mask(n);
                    let outside: Vec<bool> = (0..n).map(|v| hp.layer[v] != layer || gone[v]).collect();
                    let r = Residual::new(g, &outside);
                    let out = derand_luby(c, &r.graph, kind, delta)?;
                    iterations += out.iterations;
                    sol.extend(r.lift(g, &out.solution));
                }
                phases.push("layered-luby".to_string());
                check_solution(g, kind, &sol)?;
                return Ok(SolveOutcome { kind, solution: sol, arboricity: lambda, phases, iterations });
            }
            Kind::Mm => {
                let h = heavy_vertex_match(c, g, &hp, d, delta)?;
                sol.extend(h.solution);
                phases.push("heavy-match".to_string());
            }
        }
    }
    let r = Residual::new(g, &sol.removed_mask(n));
    let high_arb = lambda as f64 >= (n as f64).powf(delta * c.constants.high_arb_exponent);
    let cap = c.constants.degree_cap(lambda);
    if !high_arb && r.graph.max_degree() as u64 > cap {
        if r.graph.max_degree() as u64 <= ceil_pow(r.graph.n().max(1) as f64, delta) {
            let dr = degree_reduce(c, &r.graph, lambda, kind)?;
            iterations += dr.iterations;
            sol.extend(r.lift(g, &dr.solution));
            phases.push("degree-reduction".to_string());
        } else {
            c.warn(format!("residual degree {} still above n^δ; skipping degree reduction", r.graph.max_degree()));
        }
    }
    let r = Residual::new(g, &sol.removed_mask(n));
    let fin = if lambda <= c.constants.low_arb_threshold {
        phases.push("low-arboricity".to_string());
        low_arb_solve(c, &r.graph, lambda, kind, c.constants.epsilon)?.solution
    } else {
        phases.push("luby".to_string());
        let out = luby_with_balls(c, &r.graph, kind, delta)?;
        iterations += out.iterations;
        out.solution
    };
    sol.extend(r.lift(g, &fin));
    check_solution(g, kind, &sol)?;
    Ok(SolveOutcome { kind, solution: sol, arboricity: lambda, phases, iterations })
}
