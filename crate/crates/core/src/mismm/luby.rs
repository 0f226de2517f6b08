//! One derandomized Luby step per kind, with the one-hop pessimistic
//! estimators, and the loop that runs them to a maximal solution.

use serde::Serialize;

use super::sparsify::{edge_degree, sparsify, SparsifiedInstance, MM_MASS};
use crate::derand::{linial_coloring, select_seed, Direction, SeedChoice, SeedRequest, Q};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hashing::KWiseFamily;
use crate::mpc::Cluster;
use crate::solution::{Kind, PartialSolution};
use crate::util::{ceil_log2, floor_log2};

/// Extra output bits beyond ⌈log₂(3·maxdeg)⌉, so that Pr[sampled] is within
/// 1/R of 1/(3·deg).
const RANGE_SLACK_BITS: u32 = 3;

/// A sampling problem over items (edges of E′ or vertices of Q).
#[derive(Clone, Debug)]
pub struct LubySetup {
    pub kind: Kind,
    /// Item degree: deg_{E′}(e) or deg_Q(u).
    pub item_degree: Vec<usize>,
    /// Item → hash input (a colour of the item conflict graph).
    pub color: Vec<u64>,
    pub palette: u64,
    /// Output bits; the range is R = 2^ell.
    pub ell: u32,
    /// For each vertex of B′: (deg(v), relevant items S(v)).
    pub relevant: Vec<(u64, Vec<usize>)>,
    /// Item endpoints (MM: the edge; MIS: (u, u)).
    pub items: Vec<(usize, usize)>,
    /// MIS only: Q-neighbours of each item, as item indices.
    pub item_adj: Vec<Vec<usize>>,
    pub n: usize,
}

/// Items sampled under `seed`, and whether each has a sampled neighbour.
fn sample(setup: &LubySetup, family: &KWiseFamily, seed: &[u64]) -> (Vec<bool>, Vec<bool>) {
    let r = 1u128 << setup.ell;
    let sampled: Vec<bool> = (0..setup.items.len())
        .map(|i| {
            let d = setup.item_degree[i] as u128;
            d == 0 || 3 * d * (family.eval_unchecked(seed, setup.color[i]) as u128) < r
        })
        .collect();
    let conflict = match setup.kind {
        Kind::Mm => {
            let mut count = vec![0u32; setup.n];
            for (i, &(u, v)) in setup.items.iter().enumerate() {
                if sampled[i] {
                    count[u] += 1;
                    count[v] += 1;
                }
            }
            setup.items.iter().enumerate().map(|(i, &(u, v))| count[u] + count[v] > 2 * sampled[i] as u32).collect()
        }
        Kind::Mis => setup.item_adj.iter().map(|adj| adj.iter().any(|&j| sampled[j])).collect(),
    };
    (sampled, conflict)
}

/// The pessimistic estimator P(h): Σ deg(v) over B′ vertices with exactly one
/// sampled relevant item, minus deg(v) for every sampled relevant item that
/// has a sampled neighbour.
pub fn estimator(setup: &LubySetup, family: &KWiseFamily, seed: &[u64]) -> i64 {
    let (sampled, conflict) = sample(setup, family, seed);
    setup
        .relevant
        .iter()
        .map(|(deg, s)| {
            let hit: Vec<usize> = s.iter().copied().filter(|&i| sampled[i]).collect();
            let bad = hit.iter().filter(|&&i| conflict[i]).count() as i64;
            *deg as i64 * ((hit.len() == 1) as i64 - bad)
        })
        .sum()
}

/// The partial solution induced by `seed`: isolated sampled items.
pub fn outcome(setup: &LubySetup, g: &Graph, family: &KWiseFamily, seed: &[u64]) -> PartialSolution {
    let (sampled, conflict) = sample(setup, family, seed);
    let chosen = (0..setup.items.len()).filter(|&i| sampled[i] && !conflict[i]).map(|i| setup.items[i]);
    match setup.kind {
        Kind::Mm => PartialSolution::from_matching(chosen),
        Kind::Mis => PartialSolution::from_independent(g, chosen.map(|(u, _)| u).collect()),
    }
}

/// Greedy relevant set: ascending item order, skipping items that would push
/// the mass above 1, stopping once the lower bound is reached.
fn relevant_set(candidates: impl Iterator<Item = (usize, usize)>, lower: f64) -> Vec<usize> {
    let mut mass = 0.0;
    let mut out = Vec::new();
    for (item, deg) in candidates {
        let x = 1.0 / deg as f64;
        if mass + x > 1.0 + 1e-12 {
            continue;
        }
        mass += x;
        out.push(item);
        if mass + 1e-12 >= lower {
            break;
        }
    }
    out
}

/// Builds items, relevant sets and the conflict colouring for an instance.
pub fn setup(c: Option<&mut Cluster>, g: &Graph, inst: &SparsifiedInstance) -> Result<LubySetup> {
    let n = g.n();
    let sparse = inst.sparse_graph(n);
    match inst.kind {
        Kind::Mm => {
            let items = inst.edges.clone();
            let item_degree: Vec<usize> = items.iter().map(|&(u, v)| edge_degree(&sparse, u, v)).collect();
            let mut relevant = Vec::new();
            for &v in &inst.b {
                let ids: Vec<usize> = sparse.neighbors(v).iter().map(|&u| sparse.edge_id(u, v).unwrap()).collect();
                // A conflict-free item is always sampled and always succeeds.
                let s = match ids.iter().find(|&&e| item_degree[e] == 0) {
                    Some(&e) => vec![e],
                    None => relevant_set(ids.into_iter().map(|e| (e, item_degree[e])), MM_MASS),
                };
                relevant.push((g.degree(v) as u64, s));
            }
            let lg = sparse.line_graph();
            let ids: Vec<u64> = (0..items.len() as u64).collect();
            let col = linial_coloring(c, &lg, &ids, items.len().max(1) as u64)?;
            let maxdeg = item_degree.iter().copied().max().unwrap_or(0).max(1);
            Ok(LubySetup {
                kind: Kind::Mm,
                item_degree,
                color: col.color,
                palette: col.palette,
                ell: ceil_log2(3 * maxdeg as u64) + RANGE_SLACK_BITS,
                relevant,
                items,
                item_adj: Vec::new(),
                n,
            })
        }
        Kind::Mis => {
            let qs: Vec<usize> = (0..n).filter(|&u| inst.q[u]).collect();
            let index = |u: usize| qs.binary_search(&u).ok();
            let item_adj: Vec<Vec<usize>> =
                qs.iter().map(|&u| g.neighbors(u).iter().filter_map(|&w| index(w)).collect()).collect();
            let item_degree: Vec<usize> = item_adj.iter().map(Vec::len).collect();
            let mut relevant = Vec::new();
            let mut conflicts: Vec<(usize, usize)> = Vec::new();
            for &v in &inst.b {
                let cand: Vec<usize> = sparse.neighbors(v).iter().filter_map(|&u| index(u)).collect();
                let s = match cand.iter().find(|&&i| item_degree[i] == 0) {
                    Some(&i) => vec![i],
                    None => relevant_set(cand.into_iter().map(|i| (i, item_degree[i])), inst.mis_lower()),
                };
                for (a, &x) in s.iter().enumerate() {
                    for &y in &s[a + 1..] {
                        conflicts.push((x, y));
                    }
                }
                relevant.push((g.degree(v) as u64, s));
            }
            for (i, adj) in item_adj.iter().enumerate() {
                conflicts.extend(adj.iter().filter(|&&j| i < j).map(|&j| (i, j)));
            }
            let cg = Graph::from_edges_lossy(qs.len(), conflicts);
            let ids: Vec<u64> = (0..qs.len() as u64).collect();
            let col = linial_coloring(c, &cg, &ids, qs.len().max(1) as u64)?;
            let maxdeg = item_degree.iter().copied().max().unwrap_or(0).max(1);
            Ok(LubySetup {
                kind: Kind::Mis,
                item_degree,
                color: col.color,
                palette: col.palette,
                ell: ceil_log2(3 * maxdeg as u64) + RANGE_SLACK_BITS,
                relevant,
                items: qs.iter().map(|&u| (u, u)).collect(),
                item_adj,
                n,
            })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LubyStep {
    pub solution: PartialSolution,
    pub choice: SeedChoice,
    /// Edges of the step's graph incident to eliminated vertices.
    pub removed_edges: usize,
    pub edges_before: usize,
    /// Σ_{v∈B} deg(v).
    pub b_mass: u64,
    pub palette: u64,
    pub seed_bits: u32,
}

impl LubyStep {
    /// Edges the analysis guarantees per step: δ|E|/4000 (MM) or δ|E|/1600 (MIS).
    pub fn required_edges(&self, kind: Kind, delta: f64) -> f64 {
        let m = self.edges_before as f64;
        match kind {
            Kind::Mm => delta * m / 4000.0,
            Kind::Mis => delta * m / 1600.0,
        }
    }
}

fn q_of(x: f64) -> Q {
    Q::approximate_float(x).unwrap_or_else(|| Q::from_integer(0))
}

/// Estimator target: δ|E|/2000 for MM, δ²|E|/800 for MIS, halved per widening.
fn luby_target(kind: Kind, delta: f64, m: usize, w: u32) -> Q {
    let d = q_of(delta);
    let base = match kind {
        Kind::Mm => d * Q::from_integer(m as i128) / Q::from_integer(2000),
        Kind::Mis => d * d * Q::from_integer(m as i128) / Q::from_integer(800),
    };
    base / Q::from_integer(1i128 << w)
}

/// Sparsify, select a seed maximizing P(h), and return the induced partial solution.
pub fn luby_step(c: &mut Cluster, g: &Graph, kind: Kind, delta: f64) -> Result<LubyStep> {
    c.tick(2);
    let inst = sparsify(g, kind, delta)?;
    if inst.widened {
        c.warn(format!("sparsifier: Q includes vertices above the cap {}", ceil_pow_cap(g, delta)));
    }
    let sparse = inst.sparse_graph(g.n());
    let mut total = 0;
    for v in 0..g.n() {
        let words = sparse.degree(v) as u64 + 1;
        c.charge_local(words, "luby neighbourhood", Some(v))?;
        total += words;
    }
    c.charge_global(total, "luby neighbourhoods")?;
    let st = setup(Some(c), g, &inst)?;
    let family = KWiseFamily::new(st.palette.max(1), st.ell, 2)?;
    let work = (st.items.len() + st.relevant.iter().map(|(_, s)| s.len()).sum::<usize>()) as u64;
    let context = match kind {
        Kind::Mm => "luby matching step",
        Kind::Mis => "luby independent-set step",
    };
    let m = g.m();
    let choice = select_seed(
        c,
        SeedRequest {
            family: &family,
            direction: Direction::Maximize,
            work_per_seed: work,
            window: c.constants.seed_window,
            context,
        },
        |seed| estimator(&st, &family, seed),
        |w| luby_target(kind, delta, m, w),
    )?;
    c.tick(2);
    let solution = outcome(&st, g, &family, &choice.seed);
    solution.check_partial(g)?;
    let gone = solution.removed_mask(g.n());
    let removed_edges = g.edges().iter().filter(|&&(u, v)| gone[u] || gone[v]).count();
    Ok(LubyStep {
        solution,
        choice,
        removed_edges,
        edges_before: m,
        b_mass: inst.mass,
        palette: st.palette,
        seed_bits: family.seed_bits(),
    })
}

fn ceil_pow_cap(g: &Graph, delta: f64) -> u64 {
    crate::util::ceil_pow(g.n().max(2) as f64, delta)
}

#[derive(Clone, Debug, Serialize)]
pub struct LubyOutcome {
    pub solution: PartialSolution,
    pub iterations: u32,
    pub steps: Vec<LubyStepSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LubyStepSummary {
    pub edges_before: usize,
    pub removed_edges: usize,
    pub score: i64,
    pub seed_bits: u32,
}

/// Repeats sparsify + step until the solution is maximal. Isolated live
/// vertices join an independent set directly.
pub fn derand_luby(c: &mut Cluster, g: &Graph, kind: Kind, delta: f64) -> Result<LubyOutcome> {
    derand_luby_with(c, g, kind, delta, |_, _| Ok(()))
}

/// `derand_luby` with a hook run after every step on the eliminated-vertex mask.
pub fn derand_luby_with(
    c: &mut Cluster,
    g: &Graph,
    kind: Kind,
    delta: f64,
    mut after_step: impl FnMut(&mut Cluster, &[bool]) -> Result<()>,
) -> Result<LubyOutcome> {
    let n = g.n();
    let mut sol = PartialSolution::default();
    let mut steps = Vec::new();
    let mut iterations = 0u32;
    let limit = 2 * floor_log2(g.m().max(1) as u64) + 4;
    loop {
        let gone = sol.removed_mask(n);
        let live = g.without(&gone);
        if kind == Kind::Mis {
            let isolated: Vec<usize> = (0..n).filter(|&v| !gone[v] && live.degree(v) == 0).collect();
            if !isolated.is_empty() {
                sol.extend(PartialSolution::from_independent(g, isolated));
            }
        }
        if live.m() == 0 {
            break;
        }
        iterations += 1;
        let step = luby_step(c, &live, kind, delta)?;
        if step.removed_edges == 0 {
            return Err(Error::NonProgress { round: iterations as usize, remaining: live.m() });
        }
        steps.push(LubyStepSummary {
            edges_before: step.edges_before,
            removed_edges: step.removed_edges,
            score: step.choice.score,
            seed_bits: step.seed_bits,
        });
        sol.extend(step.solution);
        after_step(c, &sol.removed_mask(n))?;
    }
    c.record_bound("luby iterations ≤ 2·log₂ m + 4", iterations as f64, limit as f64);
    crate::solution::check_solution(g, kind, &sol)?;
    Ok(LubyOutcome { solution: sol, iterations, steps })
}
