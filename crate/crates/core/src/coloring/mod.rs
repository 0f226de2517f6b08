//! O(λ)-colouring: the layered list colouring and the bin-partition pipeline
//! with derandomized candidate selection.

mod arb;
mod layered;
mod partition;

pub use arb::{arb_color, arb_color_bound, operative_arboricity, ArbColoring};
pub use layered::{layered_list_color, layered_peel_count, LayeredColoring};
pub use partition::{
    bin_count, color_bins, partition_candidates, partition_family, partition_select, BinPartition, Candidates,
    PARTITION_K,
};

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Vertices left after the peeled layers.
    Unlayered,
    /// A whole H-partition layer (or a group of layers sharing a palette).
    Layer(u32),
    Bin {
        layer: u32,
        bin: u32,
    },
    /// Bin vertices the bin's partial H-partition could not peel.
    Leftover(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub provenance: Provenance,
    pub start: u64,
    pub len: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PaletteColoring {
    pub color: Vec<u64>,
    pub segments: Vec<Segment>,
    /// Total palette: every colour lies in [0, palette).
    pub palette: u64,
}

impl PaletteColoring {
    pub fn colors_used(&self) -> usize {
        self.color.iter().collect::<BTreeSet<_>>().len()
    }

    pub fn check(&self, g: &Graph) -> Result<()> {
        if let Some(&(u, v)) = g.edges().iter().find(|&&(u, v)| self.color[u] == self.color[v]) {
            return Err(Error::ImproperColoring(u, v));
        }
        if let Some(v) = (0..g.n()).find(|&v| self.color[v] >= self.palette) {
            return Err(Error::Validation(format!(
                "colour {} of vertex {v} outside palette {}",
                self.color[v], self.palette
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColoringReport {
    pub proper: bool,
    pub colors_used: usize,
    pub max_color: Option<u64>,
}

/// Exhaustive edge check.
pub fn verify_coloring(g: &Graph, color: &[u64]) -> bool {
    color.len() == g.n() && g.edges().iter().all(|&(u, v)| color[u] != color[v])
}

pub fn coloring_report(g: &Graph, color: &[u64]) -> ColoringReport {
    ColoringReport {
        proper: verify_coloring(g, color),
        colors_used: color.iter().collect::<BTreeSet<_>>().len(),
        max_color: color.iter().copied().max(),
    }
}

/// Smallest-last order of the subgraph induced by `vertices`: repeatedly
/// remove a minimum-degree vertex (smallest id on ties), then reverse. Greedy
/// in this order uses at most degeneracy + 1 colours.
pub(crate) fn degeneracy_order(g: &Graph, vertices: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; g.n()];
    for &v in vertices {
        inside[v] = true;
    }
    let mut deg: Vec<usize> = vec![0; g.n()];
    let mut queue = BTreeSet::new();
    for &v in vertices {
        deg[v] = g.neighbors(v).iter().filter(|&&w| inside[w]).count();
        queue.insert((deg[v], v));
    }
    let mut order = Vec::with_capacity(vertices.len());
    while let Some((_, v)) = queue.pop_first() {
        inside[v] = false;
        order.push(v);
        for &w in g.neighbors(v) {
            if inside[w] {
                queue.remove(&(deg[w], w));
                deg[w] -= 1;
                queue.insert((deg[w], w));
            }
        }
    }
    order.reverse();
    order
}

/// Colours `order` greedily from [start, start+len), avoiding every already
/// coloured neighbour in `g`.
pub(crate) fn greedy_into(
    g: &Graph,
    order: &[usize],
    color: &mut [Option<u64>],
    start: u64,
    len: u64,
    context: &str,
) -> Result<()> {
    for &v in order {
        let blocked: BTreeSet<u64> = g.neighbors(v).iter().filter_map(|&w| color[w]).collect();
        let pick = (start..start + len).find(|c| !blocked.contains(c)).ok_or_else(|| Error::Invariant {
            line: None,
            msg: format!("{context}: vertex {v} sees all {len} colours of its palette"),
        })?;
        color[v] = Some(pick);
    }
    Ok(())
}

pub(crate) fn finish(color: Vec<Option<u64>>, segments: Vec<Segment>, palette: u64) -> Result<PaletteColoring> {
    let color = color
        .into_iter()
        .enumerate()
        .map(|(v, c)| c.ok_or_else(|| Error::Invariant { line: None, msg: format!("vertex {v} left uncoloured") }))
        .collect::<Result<Vec<u64>>>()?;
    Ok(PaletteColoring { color, segments, palette })
}
