//! Splitting one layer into ℓ bins with a k-wise independent hash of its
//! square-graph colours: first the candidate seeds whose bins are all small,
//! then the candidate leaving the fewest vertices unpeeled.

use rayon::prelude::*;
use serde::Serialize;

use super::{greedy_into, Provenance, Segment};
use crate::derand::{candidate_seeds, SearchMethod};
use crate::error::{Error, Result};
use crate::graph::{h_partition, Graph};
use crate::hashing::KWiseFamily;
use crate::mpc::Cluster;
use crate::util::{ceil_log2, ceil_pow};

/// Independence of the partition family (even, at least 17).
pub const PARTITION_K: u32 = 18;

/// Extra hash bits so that `h mod ℓ` is within 2^-6 of uniform.
const BIN_SLACK_BITS: u32 = 6;

/// ℓ = max(2, ⌈λ^0.6⌉).
pub fn bin_count(lambda: u64) -> usize {
    ceil_pow(lambda.max(1) as f64, 0.6).max(2) as usize
}

pub fn partition_family(domain: u64, bins: usize) -> Result<KWiseFamily> {
    KWiseFamily::new(domain.max(2), ceil_log2(bins as u64) + BIN_SLACK_BITS, PARTITION_K)
}

fn bins_of(family: &KWiseFamily, seed: &[u64], colors: &[u64], bins: usize) -> Vec<usize> {
    colors.iter().map(|&x| (family.eval_unchecked(seed, x) % bins as u64) as usize).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Candidates {
    pub method: SearchMethod,
    #[serde(skip)]
    pub seeds: Vec<Vec<u64>>,
    pub examined: usize,
    /// Per-bin induced-edge cap c₆ · n_layer.
    pub cap: u64,
}

/// H′: seeds under which every bin induces at most c₆ · n edges.
pub fn partition_candidates(
    c: &mut Cluster,
    g: &Graph,
    family: &KWiseFamily,
    colors: &[u64],
    bins: usize,
    c6: u64,
) -> Result<Candidates> {
    let n = g.n();
    let cap = c6 * n as u64;
    c.note_family(family.domain, family.ell, family.k);
    let (method, all) = candidate_seeds(family, (n + g.m()) as u64, c.constants.seed_window);
    let examined = all.len();
    let keep: Vec<bool> = all
        .par_iter()
        .map(|seed| {
            let bin = bins_of(family, seed, colors, bins);
            let mut edges = vec![0u64; bins];
            for &(u, v) in g.edges() {
                if bin[u] == bin[v] {
                    edges[bin[u]] += 1;
                }
            }
            edges.iter().all(|&e| e <= cap)
        })
        .collect();
    let seeds: Vec<Vec<u64>> = all.into_iter().zip(keep).filter(|(_, k)| *k).map(|(s, _)| s).collect();
    c.charge_global(n as u64 * seeds.len().max(1) as u64, "partition candidates")?;
    c.tick(2);
    if seeds.is_empty() {
        return Err(Error::Estimator {
            context: "partition candidates".into(),
            achieved: format!("0 of {examined} seeds keep every bin under {cap} edges"),
            required: "at least one".into(),
        });
    }
    Ok(Candidates { method, seeds, examined, cap })
}

#[derive(Clone, Debug, Serialize)]
pub struct BinPartition {
    /// ℓ.
    pub bins: usize,
    pub bin: Vec<usize>,
    pub seed: Vec<u64>,
    /// Per-bin peeling degree ⌈10λ/ℓ⌉ − 1.
    pub d: usize,
    /// Vertices with more than 4λ/ℓ out-neighbours in their own bin.
    pub bad_nodes: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    /// Bin vertices the partial H-partition left unpeeled (sorted).
    pub residual: Vec<usize>,
    /// Peeling layer inside the bin (0 = unpeeled).
    #[serde(skip)]
    pub layer: Vec<u32>,
}

/// Peels each bin with degree d until nothing qualifies; returns per-vertex
/// layers (0 = left over).
fn peel_bins(g: &Graph, bin: &[usize], d: usize) -> Vec<u32> {
    let within = g.edge_subgraph(|e| {
        let (u, v) = g.edges()[e];
        bin[u] == bin[v]
    });
    h_partition(&within, d, Some(u32::MAX)).expect("d ≥ 1").layer
}

/// The candidate minimizing the unpeeled total (first one on ties).
/// `out` lists each vertex's out-neighbours under the certifying orientation.
pub fn partition_select(
    c: &mut Cluster,
    g: &Graph,
    family: &KWiseFamily,
    colors: &[u64],
    cand: &Candidates,
    bins: usize,
    lambda: u64,
    out: &[Vec<usize>],
) -> Result<BinPartition> {
    if cand.seeds.is_empty() {
        return Err(Error::InvalidArgument("no candidate seeds".into()));
    }
    let n = g.n();
    let d = ((10 * lambda).div_ceil(bins as u64) as usize).saturating_sub(1).max(1);
    let residuals: Vec<usize> = cand
        .seeds
        .par_iter()
        .map(|seed| {
            let bin = bins_of(family, seed, colors, bins);
            peel_bins(g, &bin, d).iter().filter(|&&l| l == 0).count()
        })
        .collect();
    let best = (0..residuals.len()).min_by_key(|&i| (residuals[i], i)).unwrap();
    c.charge_global(n as u64 * cand.seeds.len() as u64, "partition selection")?;
    c.tick(2);
    let seed = cand.seeds[best].clone();
    let bin = bins_of(family, &seed, colors, bins);
    let layer = peel_bins(g, &bin, d);
    let mut members = vec![Vec::new(); bins];
    for v in 0..n {
        members[bin[v]].push(v);
    }
    let limit = 4.0 * lambda as f64 / bins as f64;
    let bad_nodes = (0..n).filter(|&v| out[v].iter().filter(|&&w| bin[w] == bin[v]).count() as f64 > limit).collect();
    let residual: Vec<usize> = (0..n).filter(|&v| layer[v] == 0).collect();
    // Re-check the chosen seed against the size cap.
    let mut edges = vec![0u64; bins];
    for &(u, v) in g.edges() {
        if bin[u] == bin[v] {
            edges[bin[u]] += 1;
        }
    }
    if let Some(i) = (0..bins).find(|&i| edges[i] > cand.cap) {
        return Err(Error::Invariant { line: None, msg: format!("bin {i} has {} > {} edges", edges[i], cand.cap) });
    }
    let largest = members.iter().map(Vec::len).max().unwrap_or(0);
    c.record_bound("largest bin ≤ 2n/ℓ + 8", largest as f64, 2.0 * n as f64 / bins as f64 + 8.0);
    c.record_bound(
        "unpeeled bin vertices ≤ ℓ·n/λ² + 8",
        residual.len() as f64,
        bins as f64 * n as f64 / (lambda * lambda) as f64 + 8.0,
    );
    Ok(BinPartition { bins, bin, seed, d, bad_nodes, members, residual, layer })
}

/// Colours the peeled part of every bin with its own d + 1 colours, taken
/// from consecutive blocks starting at `start`. Returns the segments.
pub fn color_bins(
    g: &Graph,
    part: &BinPartition,
    ids: &[usize],
    color: &mut [Option<u64>],
    start: u64,
    layer_tag: u32,
) -> Result<Vec<Segment>> {
    let width = part.d as u64 + 1;
    let mut segments = Vec::new();
    for (i, members) in part.members.iter().enumerate() {
        let base = start + i as u64 * width;
        let mut order: Vec<usize> = members.iter().copied().filter(|&v| part.layer[v] > 0).collect();
        // Highest peeling layer first: each vertex then sees ≤ d coloured bin-mates.
        order.sort_by_key(|&v| (std::cmp::Reverse(part.layer[v]), v));
        let order: Vec<usize> = order.into_iter().map(|v| ids[v]).collect();
        greedy_into(g, &order, color, base, width, "bin colouring")?;
        segments.push(Segment {
            provenance: Provenance::Bin { layer: layer_tag, bin: i as u32 },
            start: base,
            len: width,
        });
    }
    Ok(segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Mode;
    use crate::derand::square_color;
    use crate::graph::{gen_bounded_arboricity, gen_complete};

    fn cluster(n: usize) -> Cluster {
        let mut c = Cluster::new(n.max(2), 0.9, Mode::Report, u64::MAX, 1).unwrap();
        c.constants.seed_window = 64;
        c
    }

    #[test]
    fn counts() {
        assert_eq!(bin_count(1), 2);
        assert_eq!(bin_count(16), 6);
        assert_eq!(bin_count(32), 8);
    }

    #[test]
    fn single_bin_matches_layer_size() {
        let g = gen_complete(6);
        let colors: Vec<u64> = (0..6).collect();
        let f = partition_family(6, 1).unwrap();
        let small = partition_candidates(&mut cluster(6), &g, &f, &colors, 1, 2);
        assert!(small.is_err(), "15 edges > 12");
        let ok = partition_candidates(&mut cluster(6), &g, &f, &colors, 1, 3).unwrap();
        assert_eq!(ok.seeds.len(), ok.examined);
    }

    #[test]
    fn edgeless_layer_keeps_everything() {
        let g = Graph::empty(10);
        let colors = vec![0; 10];
        let f = partition_family(2, 4).unwrap();
        let cand = partition_candidates(&mut cluster(10), &g, &f, &colors, 4, 16).unwrap();
        assert_eq!(cand.seeds.len(), cand.examined);
        let out = vec![Vec::new(); 10];
        let part = partition_select(&mut cluster(10), &g, &f, &colors, &cand, 4, 2, &out).unwrap();
        assert!(part.residual.is_empty());
    }

    #[test]
    fn single_candidate_matches_direct_peel() {
        let g = gen_complete(7);
        let colors: Vec<u64> = (0..7).collect();
        let f = partition_family(7, 1).unwrap();
        let mut cand = partition_candidates(&mut cluster(7), &g, &f, &colors, 1, 16).unwrap();
        cand.seeds.truncate(1);
        let out = vec![Vec::new(); 7];
        // λ = 2, ℓ = 1: d = 19 peels everything; λ = 1 would give d = 9 as well.
        let part = partition_select(&mut cluster(7), &g, &f, &colors, &cand, 1, 2, &out).unwrap();
        let direct = h_partition(&g, part.d, Some(u32::MAX)).unwrap();
        assert_eq!(part.residual, direct.unlayered());
    }

    #[test]
    fn generated_layer_is_split() {
        let g = gen_bounded_arboricity(400, 16, 5);
        let sq = square_color(None, &g, 2, None).unwrap();
        let bins = bin_count(16);
        let f = partition_family(sq.palette, bins).unwrap();
        let mut c = cluster(400);
        let cand = partition_candidates(&mut c, &g, &f, &sq.color, bins, 16).unwrap();
        assert!(!cand.seeds.is_empty());
        let out: Vec<Vec<usize>> =
            (0..g.n()).map(|v| g.neighbors(v).iter().copied().filter(|&w| w > v).collect()).collect();
        let part = partition_select(&mut c, &g, &f, &sq.color, &cand, bins, 16, &out).unwrap();
        assert_eq!(part.members.iter().map(Vec::len).sum::<usize>(), 400);
    }
}
