//! The MPC side of degree reduction: per-class reduction, preprocessing,
//! ball-local simulation of the multi-stage algorithm, and the full loop.

use rayon::prelude::*;
use serde::Serialize;

use super::high::prepare_single;
use super::stage::{
    at_least_class, class_sizes, derand_pairwise_stage, distance4_coloring, multi_multi_stage, replay_stages,
    StageParams,
};
use crate::config::Mode;
use crate::derand::Coloring;
use crate::error::{Error, Result};
use crate::graph::{delta_i, high_threshold, i_max, i_min, Graph};
use crate::mpc::{collect_balls, double_balls, doubled_sizes, remove_and_notify, Ball, BallStore, Cluster};
use crate::solution::{Kind, PartialSolution};
use crate::util::ceil_pow;

/// Hops one stage's outcome at a vertex can depend on: degrees (1), the
/// distance-4 maximum (5), class membership and the induced piece (6), heavy
/// neighbours and trimming (7), shell membership (8–9), T(v) (10), low
/// vertices and their hash (11), the IS/MM decision (12) and elimination (13),
/// rounded up.
pub const STAGE_RADIUS: usize = 16;

/// Rounds charged for building a β-high graph from one-hop neighbourhoods.
const PREPARE_ROUNDS: u64 = 3;

/// Iterations of the main loop before giving up.
const MAX_LOOPS: u32 = 64;

/// log₂ applied k times, floored at 1.
pub fn iterated_log(k: usize, n: usize) -> f64 {
    let mut x = n.max(2) as f64;
    for _ in 0..k {
        x = x.log2().max(1.0);
    }
    x.max(1.0)
}

/// Whether radius k is allowed for the local multi-stage simulation:
/// k ≥ c′ and k ≤ log n / log(Δ · log^{(k)} n).
pub fn condition_two(n: usize, k: usize, max_degree: usize, c_prime: u32) -> bool {
    if k < c_prime as usize {
        return false;
    }
    let denom = (max_degree.max(2) as f64 * iterated_log(k, n)).log2();
    k as f64 <= (n.max(2) as f64).log2() / denom
}

fn charge_neighbourhoods(c: &mut Cluster, g: &Graph, threshold: u128, context: &str) -> Result<()> {
    let mut total = 0;
    for v in 0..g.n() {
        if g.degree(v) as u128 > threshold {
            c.charge_local(g.degree(v) as u64 + 1, context, Some(v))?;
            total += g.degree(v) as u64 + 1;
        }
    }
    c.charge_global(total, context)
}

/// `reps` rounds of {β-high extraction, conflict colouring, derandomized stage}
/// on class i. Returns the accumulated partial solution and the remaining graph.
pub fn mpc_single_class_reduce(
    c: &mut Cluster,
    g: &Graph,
    class: u32,
    lambda: u64,
    kind: Kind,
    reps: u32,
) -> Result<(PartialSolution, Graph)> {
    let mut cur = g.clone();
    let mut sol = PartialSolution::default();
    for _ in 0..reps {
        c.tick(PREPARE_ROUNDS);
        charge_neighbourhoods(c, &cur, high_threshold(class), "β-high neighbourhoods")?;
        let h = prepare_single(&cur, class, lambda)?;
        if h.high.is_empty() {
            continue;
        }
        let before = at_least_class(&cur, class);
        let res = derand_pairwise_stage(c, &cur, &h, kind)?;
        cur = cur.without(&res.solution.removed_mask(g.n()));
        sol.extend(res.solution);
        let after = at_least_class(&cur, class);
        let shrink = (delta_i(class) as f64).powi(c.constants.c4 as i32);
        c.record_bound(format!("class {class}: |V≥i| per reduction"), after as f64, before as f64 / shrink);
    }
    Ok((sol, cur))
}

/// Single-class reduction for every class from the top one down to i_min.
pub fn mpc_preprocess(
    c: &mut Cluster,
    g: &Graph,
    lambda: u64,
    kind: Kind,
    reps: u32,
) -> Result<(PartialSolution, Graph)> {
    let lo = i_min(lambda);
    let hi = i_max(g.max_degree() as u64);
    let mut cur = g.clone();
    let mut sol = PartialSolution::default();
    for i in (lo..=hi).rev() {
        let (s, next) = mpc_single_class_reduce(c, &cur, i, lambda, kind, reps)?;
        cur = next;
        sol.extend(s);
    }
    Ok((sol, cur))
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiMultiOutcome {
    pub solution: PartialSolution,
    pub stages: u32,
    pub seeds: Vec<Vec<u64>>,
    pub params: StageParams,
    /// The shared distance-4 colouring the stages hashed.
    #[serde(skip)]
    pub coloring: Coloring,
}

/// The subgraph a ball knows, relabelled monotonically (ids keep their order,
/// so every id-based tie-break is preserved). Returns (graph, sorted globals).
fn ball_graph(b: &Ball) -> (Graph, Vec<usize>) {
    let ids: Vec<usize> = b.vertices.iter().map(|&(v, _)| v).collect();
    let local = |x: usize| ids.binary_search(&x).unwrap();
    let g = Graph::from_edges_lossy(ids.len(), b.edges.iter().map(|&(u, v)| (local(u), local(v))));
    (g, ids)
}

/// Each vertex with a stored ball of radius k replays κ = k / STAGE_RADIUS
/// stages on its ball and keeps its own outcome. Seeds are fixed globally
/// stage by stage, and the union of local outcomes is checked against the
/// global replay.
pub fn mpc_multi_multi(
    c: &mut Cluster,
    store: &BallStore,
    g: &Graph,
    lambda: u64,
    kind: Kind,
) -> Result<MultiMultiOutcome> {
    let k = store.radius;
    let stages = (k / STAGE_RADIUS) as u32;
    if stages == 0 || k < c.constants.c_prime as usize {
        return Err(Error::Precondition(format!(
            "radius {k} is below the stage radius {STAGE_RADIUS} (c′ = {})",
            c.constants.c_prime
        )));
    }
    if !condition_two(g.n(), k, g.max_degree(), c.constants.c_prime) {
        let msg = format!("radius {k} exceeds log n / log(Δ·log^(k) n) for n={}, Δ={}", g.n(), g.max_degree());
        match c.mode {
            Mode::Strict => return Err(Error::Precondition(msg)),
            Mode::Report => c.warn(msg),
        }
    }
    let coloring = distance4_coloring(Some(c), g)?;
    let global = multi_multi_stage(c, g, lambda, kind, stages, Some(&coloring))?;
    let p = global.params;
    let seeds = global.seeds.clone();

    c.tick(2);
    let outcomes: Vec<Result<(usize, Option<usize>, bool)>> = store
        .balls
        .par_iter()
        .map(|(&v, b)| {
            let (lg, ids) = ball_graph(b);
            let colors: Vec<u64> = ids.iter().map(|&u| coloring.color[u]).collect();
            let s = replay_stages(&lg, &p, &colors, &seeds)?;
            let me = ids.binary_search(&v).unwrap();
            let partner = s.matching.iter().find_map(|&(a, x)| match (a == me, x == me) {
                (true, _) => Some(ids[x]),
                (_, true) => Some(ids[a]),
                _ => None,
            });
            Ok((v, partner, s.independent.binary_search(&me).is_ok()))
        })
        .collect();
    let mut members = Vec::new();
    let mut edges = Vec::new();
    for o in outcomes {
        let (v, partner, joined) = o?;
        if joined {
            members.push(v);
        }
        if let Some(u) = partner {
            edges.push((v.min(u), v.max(u)));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let local = match kind {
        Kind::Mis => PartialSolution::from_independent(g, members),
        Kind::Mm => PartialSolution::from_matching(edges),
    };
    if local != global.solution {
        return Err(Error::Invariant {
            line: None,
            msg: format!(
                "local simulation diverged from the global replay ({} vs {} eliminated)",
                local.removed.len(),
                global.solution.removed.len()
            ),
        });
    }
    local.check_partial(g)?;
    Ok(MultiMultiOutcome { solution: local, stages, seeds, params: p, coloring })
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeReduction {
    pub solution: PartialSolution,
    /// Remaining graph: eliminated vertices are isolated.
    #[serde(skip)]
    pub graph: Graph,
    /// Main-loop iterations after preprocessing.
    pub iterations: u32,
    /// Iterations that fell back to single-class reduction.
    pub fallbacks: u32,
    pub final_max_degree: usize,
    pub cap: u64,
}

/// Vertices within distance 3 of a vertex whose degree exceeds √Δ_{i_min}:
/// everything else can never enter a β-high graph and is frozen.
fn active_vertices(g: &Graph, lambda: u64) -> Vec<bool> {
    let thr = high_threshold(i_min(lambda));
    let heavy = (0..g.n()).filter(|&v| g.degree(v) as u128 > thr);
    g.multi_source_dist(heavy, 3).iter().map(Option::is_some).collect()
}

/// Reduces the maximum degree to max(λ,2)^{c5}, returning the partial
/// solution found on the way and the remaining graph.
pub fn degree_reduce(c: &mut Cluster, g: &Graph, lambda: u64, kind: Kind) -> Result<DegreeReduction> {
    let cap = c.constants.degree_cap(lambda);
    let done = |cur: &Graph, solution, iterations, fallbacks| DegreeReduction {
        solution,
        final_max_degree: cur.max_degree(),
        graph: cur.clone(),
        iterations,
        fallbacks,
        cap,
    };
    if g.max_degree() as u64 <= cap {
        return Ok(done(g, PartialSolution::default(), 0, 0));
    }
    let limit = ceil_pow(g.n() as f64, c.constants.delta);
    if g.max_degree() as u64 > limit {
        return Err(Error::Precondition(format!(
            "Δ = {} exceeds n^δ = {limit}; run the H-partition path first",
            g.max_degree()
        )));
    }
    let reps = c.constants.reps;
    let (mut sol, mut cur) = mpc_preprocess(c, g, lambda, kind, reps)?;
    let (mut iterations, mut fallbacks) = (0, 0);
    let mut store: Option<BallStore> = None;
    while cur.max_degree() as u64 > cap {
        iterations += 1;
        let remaining = (0..cur.n()).filter(|&v| cur.degree(v) as u64 > cap).count();
        if iterations > MAX_LOOPS {
            return Err(Error::NonProgress { round: iterations as usize, remaining });
        }
        let before = cur.m();
        let k = store.as_ref().map_or(STAGE_RADIUS, |s| s.radius);
        if condition_two(cur.n(), k, cur.max_degree(), c.constants.c_prime) {
            let mut balls = match store.take() {
                Some(s) => s,
                None => collect_balls(c, &cur, k, &active_vertices(&cur, lambda))?,
            };
            for _ in 0..reps {
                let out = mpc_multi_multi(c, &balls, &cur, lambda, kind)?;
                let mask = out.solution.removed_mask(cur.n());
                cur = cur.without(&mask);
                balls = remove_and_notify(c, &balls, &mask)?;
                sol.extend(out.solution);
            }
            let sizes = doubled_sizes(&balls, &cur);
            if sizes.iter().all(|&(_, w)| w <= c.s) && sizes.iter().map(|&(_, w)| w).sum::<u64>() <= c.global_budget {
                balls = double_balls(c, &balls, &cur)?;
            } else {
                c.warn(format!("balls of radius {} cannot double within the memory budgets", balls.radius));
            }
            store = Some(balls);
        } else {
            fallbacks += 1;
            let (s, next) = mpc_preprocess(c, &cur, lambda, kind, reps)?;
            cur = next;
            sol.extend(s);
        }
        if cur.m() == before {
            return Err(Error::NonProgress { round: iterations as usize, remaining });
        }
    }
    sol.check_partial(g)?;
    let sizes = class_sizes(g, lambda);
    c.record_bound("degree reduction iterations", iterations as f64, sizes.len() as f64 + 1.0);
    Ok(done(&cur, sol, iterations, fallbacks))
}
