//! Matching away very-high-degree vertices of an H-partition: lower-layer
//! vertices each mark one edge into the current layer, and a k-wise seed is
//! chosen so that every block of 2d² lower edges of every heavy vertex is marked.

use serde::Serialize;

use crate::derand::{best_seed, Direction, SeedChoice, SeedRequest};
use crate::error::{Error, Result};
use crate::graph::{Graph, HPartition};
use crate::hashing::KWiseFamily;
use crate::mpc::Cluster;
use crate::solution::PartialSolution;
use crate::util::ceil_log2;

/// k = ⌈21/δ⌉ rounded up to even.
pub fn heavy_k(delta: f64) -> u32 {
    let k = (21.0 / delta).ceil() as u32;
    k + k % 2
}

#[derive(Clone, Debug, Serialize)]
pub struct HeavyOutcome {
    pub solution: PartialSolution,
    /// Blocks per processed layer, all of which were marked.
    pub blocks: Vec<usize>,
    /// Heavy vertices with fewer than 2d² lower neighbours: no block, no guarantee.
    pub unblocked: Vec<usize>,
    pub choices: Vec<SeedChoice>,
}

/// One layer's marking problem.
struct LayerMarks {
    /// Marking vertex → its layer-i neighbours (sorted).
    markers: Vec<(usize, Vec<usize>)>,
    /// Blocks as (target, marker indices).
    blocks: Vec<(usize, Vec<usize>)>,
}

impl LayerMarks {
    fn marks(&self, family: &KWiseFamily, seed: &[u64], idx: usize) -> Option<usize> {
        let (u, ref targets) = self.markers[idx];
        targets.get(family.eval_unchecked(seed, u as u64) as usize).copied()
    }

    fn marked_blocks(&self, family: &KWiseFamily, seed: &[u64]) -> i64 {
        self.blocks
            .iter()
            .filter(|(v, members)| members.iter().any(|&i| self.marks(family, seed, i) == Some(*v)))
            .count() as i64
    }
}

/// `heavy_vertex_match_with` with the family prescribed by δ.
pub fn heavy_vertex_match(c: &mut Cluster, g: &Graph, hp: &HPartition, d: usize, delta: f64) -> Result<HeavyOutcome> {
    let family = KWiseFamily::new(g.n().max(2) as u64, ceil_log2(d as u64).max(1), heavy_k(delta))?;
    heavy_vertex_match_with(c, g, hp, d, &family)
}

/// Layers are processed from the top down; matched vertices leave.
pub fn heavy_vertex_match_with(
    c: &mut Cluster,
    g: &Graph,
    hp: &HPartition,
    d: usize,
    family: &KWiseFamily,
) -> Result<HeavyOutcome> {
    if family.domain < g.n() as u64 || (1u64 << family.ell) < d as u64 {
        return Err(Error::InvalidArgument(format!(
            "family (N={}, ℓ={}) cannot index {} vertices into [{d}]",
            family.domain,
            family.ell,
            g.n()
        )));
    }
    let n = g.n();
    let d3 = d.saturating_pow(3);
    let block = 2 * d * d;
    let mut matched = vec![false; n];
    let mut edges = Vec::new();
    let mut out = HeavyOutcome {
        solution: PartialSolution::default(),
        blocks: Vec::new(),
        unblocked: Vec::new(),
        choices: Vec::new(),
    };
    for i in (2..=hp.num_layers).rev() {
        c.tick(2);
        let live_deg = |v: usize| g.neighbors(v).iter().filter(|&&w| !matched[w]).count();
        let targets: Vec<usize> = (0..n).filter(|&v| hp.layer[v] == i && !matched[v] && live_deg(v) >= d3).collect();
        if targets.is_empty() {
            continue;
        }
        let lower = |u: usize| hp.layer[u] >= 1 && hp.layer[u] < i && !matched[u];
        let mut markers: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut marker_index = vec![usize::MAX; n];
        for u in (0..n).filter(|&u| lower(u)) {
            let up: Vec<usize> = g.neighbors(u).iter().copied().filter(|&w| hp.layer[w] == i && !matched[w]).collect();
            if !up.is_empty() {
                marker_index[u] = markers.len();
                markers.push((u, up));
            }
        }
        let mut blocks = Vec::new();
        for &v in &targets {
            let lows: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| lower(u)).collect();
            if lows.len() < block {
                out.unblocked.push(v);
            }
            for chunk in lows.chunks_exact(block) {
                blocks.push((v, chunk.iter().map(|&u| marker_index[u]).collect::<Vec<_>>()));
            }
        }
        let lm = LayerMarks { markers, blocks };
        for &(v, _) in &lm.blocks {
            c.charge_local(block as u64 + 1, "heavy-vertex block", Some(v))?;
        }
        let total = lm.blocks.len() as i64;
        let choice = best_seed(
            c,
            SeedRequest {
                family,
                direction: Direction::Maximize,
                work_per_seed: (lm.blocks.len() * block) as u64,
                window: c.constants.seed_window,
                context: "heavy-vertex marking",
            },
            |seed| lm.marked_blocks(family, seed),
            Some(total),
        )?;
        if choice.score < total {
            return Err(Error::Estimator {
                context: format!("heavy-vertex marking, layer {i}"),
                achieved: format!("{} marked blocks", choice.score),
                required: format!("all {total}"),
            });
        }
        // Each target accepts its smallest marking neighbour.
        let mut best: std::collections::BTreeMap<usize, usize> = Default::default();
        for idx in 0..lm.markers.len() {
            if let Some(v) = lm.marks(family, &choice.seed, idx) {
                let u = lm.markers[idx].0;
                if targets.binary_search(&v).is_ok() {
                    best.entry(v).and_modify(|b| *b = (*b).min(u)).or_insert(u);
                }
            }
        }
        for (v, u) in best {
            matched[u] = true;
            matched[v] = true;
            edges.push((u, v));
        }
        out.blocks.push(lm.blocks.len());
        out.choices.push(choice);
    }
    out.solution = PartialSolution::from_matching(edges);
    out.solution.check_partial(g)?;
    Ok(out)
}
