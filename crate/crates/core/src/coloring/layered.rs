//! O(d)-colouring from an H-partition of degree d > 2λ in three stages:
//! gather the deep residual, list-colour the middle layers top-down, and give
//! layer 1 a fresh palette.

use serde::Serialize;

use super::{degeneracy_order, finish, greedy_into, PaletteColoring, Provenance, Segment};
use crate::error::{Error, Result};
use crate::graph::{h_partition, Graph};
use crate::mpc::Cluster;

#[derive(Clone, Debug, Serialize)]
pub struct LayeredColoring {
    pub coloring: PaletteColoring,
    pub d: usize,
    /// Layers peeled before gathering the residual.
    pub peeled: u32,
    pub residual_vertices: usize,
}

/// L = max(1, ⌈log_{d/λ} λ⌉).
pub fn layered_peel_count(lambda: u64, d: usize) -> u32 {
    if lambda <= 1 {
        return 1;
    }
    let l = (lambda as f64).ln() / (d as f64 / lambda as f64).ln();
    (l - 1e-9).ceil().max(1.0) as u32
}

/// A distributed list colouring of `members`: every vertex holds its
/// neighbourhood and palette, and the palettes together live in global memory.
fn charge_distributed(c: &mut Cluster, g: &Graph, members: &[usize], palette: u64, context: &str) -> Result<()> {
    let mut total = 0;
    for &v in members {
        let words = 1 + g.degree(v) as u64 + palette;
        c.charge_local(words, context, Some(v))?;
        total += words;
    }
    c.charge_global(total, context)
}

/// Proper colouring with at most 3d + 2 colours; requires d > 2λ.
pub fn layered_list_color(c: &mut Cluster, g: &Graph, lambda: u64, d: usize) -> Result<LayeredColoring> {
    if d as u64 <= 2 * lambda {
        return Err(Error::InvalidArgument(format!("layered colouring needs d > 2λ (d = {d}, λ = {lambda})")));
    }
    let n = g.n();
    let d64 = d as u64;
    let peeled = layered_peel_count(lambda, d);
    let hp = h_partition(g, d, Some(peeled))?;
    c.tick(peeled as u64);
    let mut color: Vec<Option<u64>> = vec![None; n];
    let mut segments = Vec::new();

    // Stage 1: the residual has degeneracy below d, so d + 1 colours suffice.
    let residual = hp.unlayered();
    let sub_words = |vs: &[usize]| {
        let mut inside = vec![false; n];
        vs.iter().for_each(|&v| inside[v] = true);
        vs.len() as u64 + 2 * g.induced(&inside).m() as u64
    };
    if !residual.is_empty() {
        c.charge_local(sub_words(&residual), "layered residual gather", None)?;
        c.tick(1);
        greedy_into(g, &degeneracy_order(g, &residual), &mut color, 0, d64 + 1, "layered residual")?;
        segments.push(Segment { provenance: Provenance::Unlayered, start: 0, len: d64 + 1 });
    }

    // Stage 2: layers L..2 each see at most d coloured or same-layer neighbours
    // and pick from 2d + 1 colours.
    for layer in (2..=hp.num_layers).rev() {
        let members = hp.members(layer);
        charge_distributed(c, g, &members, 2 * d64 + 1, "layer list colouring")?;
        c.tick(1);
        greedy_into(g, &members, &mut color, 0, 2 * d64 + 1, "layer list colouring")?;
    }
    if hp.num_layers >= 2 {
        segments.push(Segment { provenance: Provenance::Layer(2), start: 0, len: 2 * d64 + 1 });
    }

    // Stage 3: layer 1 has degree ≤ d and a fresh palette of d + 1.
    let first = hp.members(1);
    if !first.is_empty() {
        charge_distributed(c, g, &first, d64 + 1, "first layer colouring")?;
        c.tick(1);
        greedy_into(g, &first, &mut color, 2 * d64 + 1, d64 + 1, "first layer")?;
        segments.push(Segment { provenance: Provenance::Layer(1), start: 2 * d64 + 1, len: d64 + 1 });
    }
    let coloring = finish(color, segments, 3 * d64 + 2)?;
    coloring.check(g)?;
    Ok(LayeredColoring { coloring, d, peeled, residual_vertices: residual.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Mode;
    use crate::graph::{gen_bounded_arboricity, gen_cycle, gen_tree};

    fn cluster(n: usize) -> Cluster {
        Cluster::new(n.max(2), 0.9, Mode::Report, u64::MAX, 1).unwrap()
    }

    #[test]
    fn peel_counts() {
        assert_eq!(layered_peel_count(1, 3), 1);
        assert_eq!(layered_peel_count(4, 9), 2);
        assert_eq!(layered_peel_count(4, 16), 1);
    }

    #[test]
    fn forest() {
        let g = gen_tree(200, 1);
        let out = layered_list_color(&mut cluster(200), &g, 1, 3).unwrap();
        assert!(out.coloring.colors_used() <= 11);
    }

    #[test]
    fn single_layer_only_stage_three() {
        let g = gen_cycle(12);
        let out = layered_list_color(&mut cluster(12), &g, 1, 3).unwrap();
        assert_eq!(out.residual_vertices, 0);
        assert!(out.coloring.colors_used() <= 4);
        assert!(out.coloring.color.iter().all(|&c| c >= 7));
    }

    #[test]
    fn generated_lambda_four() {
        let g = gen_bounded_arboricity(500, 4, 3);
        let out = layered_list_color(&mut cluster(500), &g, 4, 9).unwrap();
        assert!(out.coloring.colors_used() <= 29);
    }

    #[test]
    fn d_too_small() {
        let g = gen_cycle(5);
        assert!(matches!(layered_list_color(&mut cluster(5), &g, 2, 4), Err(Error::InvalidArgument(_))));
    }
}
