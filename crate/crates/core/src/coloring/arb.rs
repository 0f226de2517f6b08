//! The O(λ)-colouring pipeline: peel a constant number of layers, gather the
//! rest, and colour every layer through a derandomized bin partition.

use std::collections::BTreeSet;

use serde::Serialize;

use super::layered::layered_list_color;
use super::partition::{bin_count, color_bins, partition_candidates, partition_family, partition_select};
use super::{degeneracy_order, finish, greedy_into, PaletteColoring, Provenance, Segment};
use crate::derand::{square_color, SearchMethod};
use crate::error::{Error, Result};
use crate::graph::{forest_decomposition, h_partition, Graph};
use crate::mismm::Residual;
use crate::mpc::Cluster;
use crate::util::ceil_pow;

/// Additive constant of the palette bound.
pub const COLOR_C0: u64 = 0;

/// 14·L′·λ + 4λ + c₀.
pub fn arb_color_bound(lambda: u64, layers: u32) -> u64 {
    14 * layers as u64 * lambda + 4 * lambda + COLOR_C0
}

/// ⌈(degeneracy + 1)/2⌉: every subgraph then has degeneracy ≤ 2λ − 1, and the
/// value never exceeds the true arboricity.
pub fn operative_arboricity(g: &Graph) -> u64 {
    let mut deg = g.degrees();
    let mut queue: BTreeSet<(usize, usize)> = (0..g.n()).map(|v| (deg[v], v)).collect();
    let mut alive = vec![true; g.n()];
    let mut degeneracy = 0;
    while let Some((d, v)) = queue.pop_first() {
        degeneracy = degeneracy.max(d);
        alive[v] = false;
        for &w in g.neighbors(v) {
            if alive[w] {
                queue.remove(&(deg[w], w));
                deg[w] -= 1;
                queue.insert((deg[w], w));
            }
        }
    }
    ((degeneracy as u64 + 2) / 2).max(1)
}

#[derive(Clone, Debug, Serialize)]
pub struct LayerSummary {
    pub layer: u32,
    pub n: usize,
    pub m: usize,
    pub square_palette: u64,
    pub method: SearchMethod,
    pub examined: usize,
    pub candidates: usize,
    pub unpeeled: usize,
    pub bad_nodes: usize,
    pub largest_bin: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArbColoring {
    pub coloring: PaletteColoring,
    pub lambda: u64,
    /// L′, the configured number of peeled layers.
    pub layers: u32,
    pub delta_prime: f64,
    /// Peeling degree Δ′.
    pub peel_degree: usize,
    pub bins: usize,
    pub c0: u64,
    pub bound: u64,
    /// True when λ = 1 was handed to the layered colouring with d = 3.
    pub routed: bool,
    pub per_layer: Vec<LayerSummary>,
}

/// Colours `g`, whose arboricity is at most `lambda`, with at most
/// 14·L′·λ + 4λ + c₀ colours.
pub fn arb_color(c: &mut Cluster, g: &Graph, lambda: u64, delta: f64) -> Result<ArbColoring> {
    let layers = c.constants.color_layers;
    let eps = c.constants.epsilon;
    let delta_prime = if eps < 0.5 { delta.min(2.0 * eps / (1.0 - 2.0 * eps)) } else { delta };
    let lambda = lambda.max(1);
    let bound = arb_color_bound(lambda, layers);
    let mut out = ArbColoring {
        coloring: PaletteColoring { color: vec![0; g.n()], segments: Vec::new(), palette: 1 },
        lambda,
        layers,
        delta_prime,
        peel_degree: 0,
        bins: 0,
        c0: COLOR_C0,
        bound,
        routed: false,
        per_layer: Vec::new(),
    };
    if g.m() == 0 {
        out.coloring.segments.push(Segment { provenance: Provenance::Layer(1), start: 0, len: 1 });
        return Ok(out);
    }
    if lambda == 1 {
        let l = layered_list_color(c, g, 1, 3)?;
        out.coloring = l.coloring;
        out.peel_degree = 3;
        out.routed = true;
        c.record_bound("arb_color palette ≤ 14·L′·λ + 4λ + c₀", out.coloring.palette as f64, bound as f64);
        return Ok(out);
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("δ = {delta} must be positive")));
    }
    let n = g.n();
    let l2 = 2 * lambda;
    let peel = (ceil_pow(lambda as f64, 1.0 + delta_prime) as usize).max(2 * lambda as usize + 1);
    out.peel_degree = peel;
    let hp = h_partition(g, peel, Some(layers))?;
    c.tick(layers as u64);
    // The certifying orientation: out-degree ≤ 2λ.
    let cert = h_partition(g, 2 * lambda as usize, None).map_err(|e| match e {
        Error::NonProgress { .. } => Error::Precondition(format!("arboricity exceeds λ = {lambda}")),
        e => e,
    })?;
    let fd = forest_decomposition(g, &cert)?;
    let orient: Vec<Vec<usize>> = (0..n).map(|v| fd.out_neighbors(g, v)).collect();

    let mut color: Vec<Option<u64>> = vec![None; n];
    let mut segments = Vec::new();
    let unlayered = hp.unlayered();
    if !unlayered.is_empty() {
        let r = Residual::new(g, &hp.layer.iter().map(|&l| l != 0).collect::<Vec<_>>());
        c.charge_local(r.graph.words(), "unlayered gather", None)?;
        c.tick(1);
        greedy_into(g, &degeneracy_order(g, &unlayered), &mut color, 0, l2, "unlayered residual")?;
    }
    segments.push(Segment { provenance: Provenance::Unlayered, start: 0, len: l2 });
    let mut offset = l2;
    let bins = bin_count(lambda);
    out.bins = bins;
    for j in 1..=hp.num_layers {
        let r = Residual::new(g, &hp.layer.iter().map(|&l| l != j).collect::<Vec<_>>());
        let mut local_index = vec![usize::MAX; n];
        for (i, &v) in r.ids.iter().enumerate() {
            local_index[v] = i;
        }
        let local_out: Vec<Vec<usize>> = r
            .ids
            .iter()
            .map(|&v| orient[v].iter().filter(|&&w| local_index[w] != usize::MAX).map(|&w| local_index[w]).collect())
            .collect();
        let sq = square_color(Some(c), &r.graph, 2, None)?;
        let family = partition_family(sq.palette, bins)?;
        let cand = partition_candidates(c, &r.graph, &family, &sq.color, bins, c.constants.c6)?;
        let part = partition_select(c, &r.graph, &family, &sq.color, &cand, bins, lambda, &local_out)?;
        for members in &part.members {
            let words = members.len() as u64 + 2 * members.iter().map(|&v| r.graph.degree(v) as u64).sum::<u64>();
            c.charge_local(words, "bin gather", None)?;
        }
        c.tick(1);
        segments.extend(color_bins(g, &part, &r.ids, &mut color, offset, j)?);
        offset += bins as u64 * (part.d as u64 + 1);
        let leftover: Vec<usize> = part.residual.iter().map(|&v| r.ids[v]).collect();
        if !leftover.is_empty() {
            c.charge_local(leftover.len() as u64 * (1 + 2 * l2), "leftover gather", None)?;
            c.tick(1);
            greedy_into(g, &degeneracy_order(g, &leftover), &mut color, offset, l2, "bin leftovers")?;
        }
        segments.push(Segment { provenance: Provenance::Leftover(j), start: offset, len: l2 });
        offset += l2;
        out.per_layer.push(LayerSummary {
            layer: j,
            n: r.graph.n(),
            m: r.graph.m(),
            square_palette: sq.palette,
            method: cand.method,
            examined: cand.examined,
            candidates: cand.seeds.len(),
            unpeeled: part.residual.len(),
            bad_nodes: part.bad_nodes.len(),
            largest_bin: part.members.iter().map(Vec::len).max().unwrap_or(0),
        });
    }
    out.coloring = finish(color, segments, offset)?;
    out.coloring.check(g)?;
    c.record_bound("arb_color palette ≤ 14·L′·λ + 4λ + c₀", offset as f64, bound as f64);
    Ok(out)
}
