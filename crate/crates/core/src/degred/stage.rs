//! The pairwise-independent partial MIS/MM stage on β-high graphs, its
//! derandomization, and the single- and multi-stage compositions over all
//! degree classes at once.

use std::collections::BTreeMap;

use serde::Serialize;

use super::high::{conflict_graph, in_class, prepare_multi, BetaHighGraph};
use crate::derand::{linial_coloring, select_seed, square_color, Coloring, Direction, SeedChoice, SeedRequest, Q};
use crate::error::{Error, Result};
use crate::graph::{beta_of, delta_i, high_threshold, i_max, i_min, Graph};
use crate::hashing::KWiseFamily;
use crate::mpc::Cluster;
use crate::solution::{Kind, PartialSolution};
use crate::util::ceil_log2;

/// Hash output bits for class parameter β. For IS the event "h = 0" must have
/// probability ≤ 1/(4β²), so ℓ ≥ 2 + 2⌈log₂β⌉ on top of the 3⌈log₂β⌉ used
/// asymptotically; for MM the output indexes one of ≤ β high neighbours.
pub fn ell_for(kind: Kind, beta: u64) -> u32 {
    let lb = ceil_log2(beta);
    match kind {
        Kind::Mis => (3 * lb).max(2 + 2 * lb),
        Kind::Mm => lb.max(1),
    }
}

/// What one class contributes under one seed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassOutcome {
    pub independent: Vec<usize>,
    pub matching: Vec<(usize, usize)>,
    /// High vertices with a member in T(v) (IS) or receiving a proposal (MM).
    pub high_hit: usize,
}

/// Runs the stage rule on one β-high graph. `color` maps global ids to hash
/// inputs; only the low `ell` bits of the family output are used.
pub fn class_outcome(
    h: &BetaHighGraph,
    kind: Kind,
    color: &[u64],
    family: &KWiseFamily,
    seed: &[u64],
    ell: u32,
) -> ClassOutcome {
    let mask = (1u64 << ell) - 1;
    let z: Vec<u64> = h.low.iter().map(|&u| family.eval_unchecked(seed, color[u]) & mask).collect();
    match kind {
        Kind::Mis => {
            let joined: Vec<bool> =
                (0..h.low.len()).map(|i| z[i] == 0 && h.low_adj[i].iter().all(|&j| z[j] != 0)).collect();
            let high_hit = h.t.iter().filter(|tv| tv.iter().any(|&u| joined[h.low_index(u).unwrap()])).count();
            let independent = h.low.iter().zip(&joined).filter(|(_, &j)| j).map(|(&u, _)| u).collect();
            ClassOutcome { independent, matching: Vec::new(), high_hit }
        }
        Kind::Mm => {
            // Low vertices are visited in increasing id, so the first proposal wins.
            let mut accepted: BTreeMap<usize, usize> = BTreeMap::new();
            for (i, &u) in h.low.iter().enumerate() {
                if let Some(&v) = h.low_high[i].get(z[i] as usize) {
                    accepted.entry(v).or_insert(u);
                }
            }
            let matching = accepted.iter().map(|(&v, &u)| (u.min(v), u.max(v))).collect();
            ClassOutcome { independent: Vec::new(), matching, high_hit: accepted.len() }
        }
    }
}

fn check_colors(h: &BetaHighGraph, color: &[u64], family: &KWiseFamily) -> Result<()> {
    for &u in &h.low {
        if color[u] >= family.domain {
            return Err(Error::InvalidArgument(format!(
                "colour {} of {u} outside the family domain {}",
                color[u], family.domain
            )));
        }
    }
    let cg = conflict_graph(h);
    for &(a, b) in cg.edges() {
        if color[h.low[a]] == color[h.low[b]] {
            return Err(Error::ImproperColoring(h.low[a], h.low[b]));
        }
    }
    Ok(())
}

fn family_for(domain: u64, ell: u32) -> Result<KWiseFamily> {
    KWiseFamily::new(domain.max(1), ell, 2)
}

/// One application of the stage rule with a given seed.
pub fn pairwise_stage(
    g: &Graph,
    h: &BetaHighGraph,
    kind: Kind,
    color: &[u64],
    family: &KWiseFamily,
    seed: &[u64],
) -> Result<PartialSolution> {
    check_colors(h, color, family)?;
    let ell = ell_for(kind, h.beta);
    if family.ell < ell || family.k < 2 {
        return Err(Error::InvalidArgument(format!(
            "family (ℓ={}, k={}) too weak for the stage (ℓ={ell}, k=2)",
            family.ell, family.k
        )));
    }
    if let Some(&x) = h.low.first() {
        family.eval(seed, color[x])?;
    }
    let out = class_outcome(h, kind, color, family, seed, ell);
    Ok(to_solution(g, kind, out))
}

fn to_solution(g: &Graph, kind: Kind, out: ClassOutcome) -> PartialSolution {
    match kind {
        Kind::Mis => PartialSolution::from_independent(g, out.independent),
        Kind::Mm => PartialSolution::from_matching(out.matching),
    }
}

/// (1 − 5·2^w/β)·|V^high|: the guaranteed number of eliminated high vertices,
/// loosened by 2^w on widening.
fn stage_target(parts: &[&BetaHighGraph], w: u32) -> Q {
    parts.iter().fold(Q::from_integer(0), |acc, h| {
        let b = h.beta as i128;
        acc + Q::new(h.high.len() as i128 * (b - 5 * (1i128 << w)), b)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StageResult {
    pub solution: PartialSolution,
    pub choice: Option<SeedChoice>,
    /// High vertices eliminated, per class.
    pub hits: BTreeMap<u32, usize>,
    /// |V^high| per class.
    pub highs: BTreeMap<u32, usize>,
}

impl StageResult {
    fn empty() -> Self {
        StageResult {
            solution: PartialSolution::default(),
            choice: None,
            hits: BTreeMap::new(),
            highs: BTreeMap::new(),
        }
    }
}

/// The stage on several separated β-high graphs at once under one shared seed.
fn shared_stage(
    c: &mut Cluster,
    g: &Graph,
    parts: &BTreeMap<u32, BetaHighGraph>,
    kind: Kind,
    color: &[u64],
    family: &KWiseFamily,
    context: &str,
) -> Result<StageResult> {
    let list: Vec<&BetaHighGraph> = parts.values().filter(|h| !h.high.is_empty()).collect();
    if list.is_empty() {
        return Ok(StageResult::empty());
    }
    for h in &list {
        check_colors(h, color, family)?;
    }
    let ells: Vec<u32> = list.iter().map(|h| ell_for(kind, h.beta)).collect();
    let work: u64 = list.iter().map(|h| (h.low.len() + h.high.len()) as u64).sum();
    let choice = select_seed(
        c,
        SeedRequest {
            family,
            direction: Direction::Maximize,
            work_per_seed: work,
            window: c.constants.seed_window,
            context,
        },
        |seed| {
            list.iter().zip(&ells).map(|(h, &l)| class_outcome(h, kind, color, family, seed, l).high_hit as i64).sum()
        },
        |w| stage_target(&list, w),
    )?;
    let mut sol = PartialSolution::default();
    let mut hits = BTreeMap::new();
    let mut highs = BTreeMap::new();
    for (h, &l) in list.iter().zip(&ells) {
        let out = class_outcome(h, kind, color, family, &choice.seed, l);
        hits.insert(h.class, out.high_hit);
        highs.insert(h.class, h.high.len());
        sol.extend(to_solution(g, kind, out));
    }
    sol.check_partial(g)?;
    Ok(StageResult { solution: sol, choice: Some(choice), hits, highs })
}

/// Proper colouring of the union of the conflict graphs, by Linial from ids.
pub fn conflict_coloring(c: Option<&mut Cluster>, n: usize, parts: &[&BetaHighGraph]) -> Result<Coloring> {
    let mut edges = Vec::new();
    for h in parts {
        let cg = conflict_graph(h);
        edges.extend(cg.edges().iter().map(|&(a, b)| (h.low[a], h.low[b])));
    }
    let all = Graph::from_edges_lossy(n, edges);
    let ids: Vec<u64> = (0..n as u64).collect();
    linial_coloring(c, &all, &ids, n.max(1) as u64)
}

/// Derandomized stage on one β-high graph, with a conflict-graph colouring.
pub fn derand_pairwise_stage(c: &mut Cluster, g: &Graph, h: &BetaHighGraph, kind: Kind) -> Result<StageResult> {
    if h.high.is_empty() {
        return Ok(StageResult::empty());
    }
    let col = conflict_coloring(Some(c), g.n(), &[h])?;
    derand_pairwise_stage_with(c, g, h, kind, &col)
}

/// As `derand_pairwise_stage` with a caller-supplied colouring (hash domain = its palette).
pub fn derand_pairwise_stage_with(
    c: &mut Cluster,
    g: &Graph,
    h: &BetaHighGraph,
    kind: Kind,
    col: &Coloring,
) -> Result<StageResult> {
    if h.high.is_empty() {
        return Ok(StageResult::empty());
    }
    let family = family_for(col.palette, ell_for(kind, h.beta))?;
    let parts = BTreeMap::from([(h.class, h.clone())]);
    let res = shared_stage(c, g, &parts, kind, &col.color, &family, "pairwise stage")?;
    let survivors = h.high.len() - res.hits[&h.class];
    c.record_bound(
        format!("class {} survivors ≤ 5|V^high|/β", h.class),
        survivors as f64,
        5.0 * h.high.len() as f64 / h.beta as f64,
    );
    Ok(res)
}

/// Parameters every machine knows before a multi-class stage: the shared
/// colouring's palette and the hash width, fixed by the global maximum degree
/// so that local simulations pick identical families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StageParams {
    pub lambda: u64,
    pub kind: Kind,
    pub palette: u64,
    pub ell: u32,
}

impl StageParams {
    pub fn new(lambda: u64, kind: Kind, palette: u64, max_degree: usize) -> Self {
        let top = i_max(max_degree as u64).max(i_min(lambda));
        let beta = beta_of(top).min(1 << 62) as u64;
        StageParams { lambda, kind, palette: palette.max(1), ell: ell_for(kind, beta) }
    }

    pub fn family(&self) -> Result<KWiseFamily> {
        family_for(self.palette, self.ell)
    }
}

/// A colouring proper on every pair at distance ≤ 4, hence on every conflict
/// graph of every later stage.
pub fn distance4_coloring(c: Option<&mut Cluster>, g: &Graph) -> Result<Coloring> {
    square_color(c, g, 4, None)
}

/// Per-class counts |V_i| (degree in (Δ_{i−1}, Δ_i]) for the classes in range.
pub fn class_sizes(g: &Graph, lambda: u64) -> BTreeMap<u32, usize> {
    let lo = i_min(lambda);
    let hi = i_max(g.max_degree() as u64).max(lo);
    (lo..=hi).map(|i| (i, (0..g.n()).filter(|&v| in_class(g.degree(v), i)).count())).collect()
}

/// |V_{≥i}|: vertices of degree above √Δ_i.
pub fn at_least_class(g: &Graph, i: u32) -> usize {
    (0..g.n()).filter(|&v| g.degree(v) as u128 > high_threshold(i)).count()
}

fn apply_shared(
    g: &Graph,
    parts: &BTreeMap<u32, BetaHighGraph>,
    p: &StageParams,
    color: &[u64],
    seed: &[u64],
) -> Result<PartialSolution> {
    let family = p.family()?;
    let mut sol = PartialSolution::default();
    for h in parts.values() {
        let out = class_outcome(h, p.kind, color, &family, seed, ell_for(p.kind, h.beta));
        sol.extend(to_solution(g, p.kind, out));
    }
    Ok(sol)
}

/// One shared seed for every class. `color` must be proper on distance-≤4
/// pairs with values below `p.palette`.
pub fn multi_single_stage(c: &mut Cluster, g: &Graph, p: &StageParams, color: &[u64]) -> Result<StageResult> {
    let parts = prepare_multi(g, p.lambda)?;
    let family = p.family()?;
    let res = shared_stage(c, g, &parts, p.kind, color, &family, "multi-class stage")?;
    if !parts.is_empty() {
        let after = g.without(&res.solution.removed_mask(g.n()));
        record_single_stage_bounds(c, g, &after, p.lambda);
    }
    Ok(res)
}

fn pow_f(base: u128, e: u32) -> f64 {
    (base as f64).powi(e as i32)
}

fn record_single_stage_bounds(c: &mut Cluster, before: &Graph, after: &Graph, lambda: u64) {
    let sizes = class_sizes(before, lambda);
    let (c1, c2) = (c.constants.c1, c.constants.c2);
    for (&i, _) in sizes.iter().filter(|(_, &s)| s > 0) {
        let spill: f64 = sizes.range(i + 1..).map(|(&j, &s)| pow_f(delta_i(j), c2) * s as f64).sum();
        let bound = sizes[&i] as f64 / pow_f(delta_i(i), c1) + spill;
        c.record_bound(format!("class {i}: |V≥i| after one stage"), at_least_class(after, i) as f64, bound);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiResult {
    pub solution: PartialSolution,
    /// The seed chosen at each stage (empty when the stage had nothing to do).
    pub seeds: Vec<Vec<u64>>,
    /// |V_{≥i_min}| before each stage and after the last.
    pub sizes: Vec<usize>,
    pub params: StageParams,
}

/// `stages` sequential shared-seed stages, each on the graph left by the previous one.
pub fn multi_multi_stage(
    c: &mut Cluster,
    g: &Graph,
    lambda: u64,
    kind: Kind,
    stages: u32,
    coloring: Option<&Coloring>,
) -> Result<MultiResult> {
    if stages == 0 {
        return Err(Error::InvalidArgument("at least one stage is required".into()));
    }
    let owned;
    let col = match coloring {
        Some(col) => col,
        None => {
            owned = distance4_coloring(Some(c), g)?;
            &owned
        }
    };
    let p = StageParams::new(lambda, kind, col.palette, g.max_degree());
    let lo = i_min(lambda);
    let mut cur = g.clone();
    let mut sol = PartialSolution::default();
    let mut seeds = Vec::new();
    let mut sizes = vec![at_least_class(g, lo)];
    for _ in 0..stages {
        let res = multi_single_stage(c, &cur, &p, &col.color)?;
        seeds.push(res.choice.map(|ch| ch.seed).unwrap_or_default());
        cur = cur.without(&res.solution.removed_mask(g.n()));
        sol.extend(res.solution);
        sizes.push(at_least_class(&cur, lo));
    }
    sol.check_partial(g)?;
    if stages >= c.constants.stage_threshold {
        for (i, s) in class_sizes(g, lambda) {
            if s > 0 {
                let bound = at_least_class(g, i) as f64 / pow_f(delta_i(i), c.constants.c3 * stages);
                c.record_bound(
                    format!("class {i}: |V≥i| after {stages} stages"),
                    at_least_class(&cur, i) as f64,
                    bound,
                );
            }
        }
    }
    Ok(MultiResult { solution: sol, seeds, sizes, params: p })
}

/// Replays the stages with fixed seeds, without any search. An empty seed
/// marks a stage that had no β-high vertices and is skipped.
pub fn replay_stages(g: &Graph, p: &StageParams, color: &[u64], seeds: &[Vec<u64>]) -> Result<PartialSolution> {
    let mut cur = g.clone();
    let mut sol = PartialSolution::default();
    for seed in seeds {
        if seed.is_empty() {
            continue;
        }
        let parts = prepare_multi(&cur, p.lambda)?;
        let s = apply_shared(&cur, &parts, p, color, seed)?;
        cur = cur.without(&s.removed_mask(g.n()));
        sol.extend(s);
    }
    Ok(sol)
}
