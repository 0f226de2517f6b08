//! Linial colour reduction with the polynomial set system: colour c becomes a
//! degree-t polynomial over F_q (the base-q digits of c), and each vertex keeps
//! the evaluation point x where it differs from every conflicting neighbour.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mpc::Cluster;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coloring {
    pub color: Vec<u64>,
    /// Colours lie in [0, palette).
    pub palette: u64,
}

impl Coloring {
    pub fn num_colors(&self) -> usize {
        let mut used = self.color.clone();
        used.sort_unstable();
        used.dedup();
        used.len()
    }

    pub fn check(&self, g: &Graph) -> Result<()> {
        for &(u, v) in g.edges() {
            if self.color[u] == self.color[v] {
                return Err(Error::ImproperColoring(u, v));
            }
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

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn next_prime_above(x: u64) -> u64 {
    let mut q = x + 1;
    while !is_prime(q) {
        q += 1;
    }
    q
}

fn pow_at_least(q: u64, e: u32, c: u64) -> bool {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc *= q as u128;
        if acc >= c as u128 {
            return true;
        }
    }
    acc >= c as u128
}

/// Smallest prime q with q > Δ·t and q^{t+1} ≥ C, minimized over t.
fn pick_field(delta: u64, palette: u64) -> (u64, u32) {
    let mut best: Option<(u64, u32)> = None;
    for t in 1..=64u32 {
        let floor = delta * t as u64;
        if best.is_some_and(|(q, _)| floor >= q) {
            break;
        }
        let mut q = next_prime_above(floor.max(1));
        while !pow_at_least(q, t + 1, palette) {
            q = next_prime_above(q);
        }
        if best.is_none_or(|(b, _)| q < b) {
            best = Some((q, t));
        }
    }
    best.unwrap()
}

fn eval_digits(c: u64, q: u64, t: u32, x: u64) -> u64 {
    let digits: Vec<u64> = {
        let mut c = c;
        (0..=t)
            .map(|_| {
                let d = c % q;
                c /= q;
                d
            })
            .collect()
    };
    digits.iter().rev().fold(0u128, |acc, &d| (acc * x as u128 + d as u128) % q as u128) as u64
}

/// One reduction step where vertex v must differ from every vertex in `avoid[v]`.
fn reduce_once(color: &[u64], palette: u64, avoid: &[Vec<usize>], delta: u64) -> (Vec<u64>, u64) {
    let (q, t) = pick_field(delta, palette);
    let out = (0..color.len())
        .into_par_iter()
        .map(|v| {
            let cv = color[v];
            let x = (0..q)
                .find(|&x| {
                    let pv = eval_digits(cv, q, t, x);
                    avoid[v].iter().all(|&u| eval_digits(color[u], q, t, x) != pv)
                })
                .expect("a separating point exists since Δ·t < q");
            x * q + eval_digits(cv, q, t, x)
        })
        .collect();
    (out, q * q)
}

/// Maps the used colours onto 0..k preserving order (sort, dedup, rank).
pub fn compress_colors(cluster: Option<&mut Cluster>, color: &[u64]) -> Result<Coloring> {
    let mut used = color.to_vec();
    if let Some(c) = cluster {
        used = c.dedup(used, 1)?;
        c.prefix_sum(&vec![1; used.len()])?;
    } else {
        used.sort_unstable();
        used.dedup();
    }
    let color = color.iter().map(|x| used.binary_search(x).unwrap() as u64).collect();
    Ok(Coloring { color, palette: used.len().max(1) as u64 })
}

/// Linial reduction against arbitrary conflict lists: the result is proper on
/// every edge {u, v} with u ∈ avoid[v] or v ∈ avoid[u].
pub fn linial_with(
    mut cluster: Option<&mut Cluster>,
    avoid: &[Vec<usize>],
    initial: &[u64],
    c0: u64,
) -> Result<Coloring> {
    let n = avoid.len();
    for v in 0..n {
        if initial[v] >= c0 {
            return Err(Error::InvalidArgument(format!("initial colour {} of {v} not below {c0}", initial[v])));
        }
        if let Some(&u) = avoid[v].iter().find(|&&u| initial[u] == initial[v]) {
            return Err(Error::ImproperColoring(v.min(u), v.max(u)));
        }
    }
    let delta = avoid.iter().map(Vec::len).max().unwrap_or(0) as u64;
    if delta == 0 {
        return Ok(Coloring { color: vec![0; n], palette: 1 });
    }
    if let Some(c) = cluster.as_deref_mut() {
        for (v, a) in avoid.iter().enumerate() {
            c.charge_local(a.len() as u64 + 1, "linial neighbourhood", Some(v))?;
        }
    }
    let mut color = initial.to_vec();
    let mut palette = c0;
    loop {
        let (next, next_palette) = reduce_once(&color, palette, avoid, delta);
        if let Some(c) = cluster.as_deref_mut() {
            c.tick(1);
        }
        if next_palette >= palette {
            break;
        }
        color = next;
        palette = next_palette;
    }
    compress_colors(cluster, &color)
}

/// Proper colouring with ≤ 4(Δ+1)²⌈log₂ C₀⌉² colours from a proper C₀-colouring.
pub fn linial_coloring(cluster: Option<&mut Cluster>, g: &Graph, initial: &[u64], c0: u64) -> Result<Coloring> {
    let avoid: Vec<Vec<usize>> = (0..g.n()).map(|v| g.neighbors(v).to_vec()).collect();
    linial_with(cluster, &avoid, initial, c0)
}

/// Colour reduction where each vertex only avoids its out-neighbours; proper
/// for an orientation covering every edge, with Δ replaced by the out-degree.
pub fn arb_linial_coloring(
    cluster: Option<&mut Cluster>,
    out: &[Vec<usize>],
    initial: &[u64],
    c0: u64,
) -> Result<Coloring> {
    linial_with(cluster, out, initial, c0)
}

/// Proper colouring of G^t starting from vertex ids. `max_degree` bounds the
/// power graph's degree (memory per vertex).
pub fn square_color(cluster: Option<&mut Cluster>, g: &Graph, t: usize, max_degree: Option<usize>) -> Result<Coloring> {
    let gt = g.power(t);
    if let Some(cap) = max_degree {
        if gt.max_degree() > cap {
            return Err(Error::Precondition(format!("G^{t} has degree {} > {cap}", gt.max_degree())));
        }
    }
    let ids: Vec<u64> = (0..g.n() as u64).collect();
    linial_coloring(cluster, &gt, &ids, g.n().max(1) as u64)
}

/// The documented palette bound 4(Δ+1)²⌈log₂ C₀⌉².
pub fn linial_bound(delta: u64, c0: u64) -> u64 {
    let l = crate::util::ceil_log2(c0).max(1) as u64;
    4 * (delta + 1) * (delta + 1) * l * l
}
