//! Accounting-level simulator of the low-space MPC model.
//!
//! Machines are never materialized: loads are sharded arithmetically and the
//! cluster tracks rounds, the largest single-machine load and the total load.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{BudgetMode, Constants, Mode, RunConfig};
use crate::error::{Error, MemoryScope, MemoryViolation, Result};
use crate::graph::Graph;
use crate::util::ceil_pow;

/// An asymptotic bound evaluated with explicit constants; recorded, never fatal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Primitive {
    Sort,
    Filter,
    PrefixSum,
    Predecessor,
    Dedup,
    ColoredSum,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cluster {
    pub n: usize,
    pub alpha: f64,
    /// Local memory S = ⌈n^α⌉ words.
    pub s: u64,
    pub global_budget: u64,
    pub mode: Mode,
    pub round_cost: u64,
    /// Constants of the run, read by the algorithms driving this cluster.
    pub constants: Constants,
    rounds: u64,
    peak_local: u64,
    peak_global: u64,
    violations: Vec<MemoryViolation>,
    warnings: Vec<String>,
    bounds: Vec<BoundCheck>,
    families: std::collections::BTreeSet<(u64, u32, u32)>,
}

impl Cluster {
    pub fn new(n: usize, alpha: f64, mode: Mode, global_budget: u64, round_cost: u64) -> Result<Cluster> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("α={alpha} must lie in (0, 1)")));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!("cluster needs n ≥ 2, got {n}")));
        }
        let s = ceil_pow(n as f64, alpha).max(1);
        Ok(Cluster {
            n,
            alpha,
            s,
            global_budget,
            mode,
            round_cost,
            constants: Constants { round_cost, ..Constants::default() },
            rounds: 0,
            peak_local: 0,
            peak_global: 0,
            violations: Vec::new(),
            warnings: Vec::new(),
            bounds: Vec::new(),
            families: Default::default(),
        })
    }

    /// Cluster sized for a graph with the configured budget mode.
    pub fn for_graph(g: &Graph, cfg: &RunConfig) -> Result<Cluster> {
        let n = g.n().max(2);
        let k = &cfg.constants;
        let base = match cfg.budget {
            BudgetMode::Linear => n as u64,
            BudgetMode::Superlinear => ceil_pow(n as f64, 1.0 + k.epsilon),
        };
        let mut c = Cluster::new(n, cfg.alpha, cfg.mode, k.global_factor * (base + g.m() as u64), k.round_cost)?;
        c.constants = k.clone();
        // The input stays resident across the cluster for the whole run.
        c.charge_global(g.words(), "input")?;
        Ok(c)
    }

    /// Linear-memory regime: S = global_factor · n words per machine.
    pub fn linear_memory(g: &Graph, cfg: &RunConfig) -> Result<Cluster> {
        let mut c = Cluster::for_graph(g, &RunConfig { alpha: 0.5, ..cfg.clone() })?;
        c.alpha = 1.0;
        c.s = cfg.constants.global_factor * c.n as u64;
        Ok(c)
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn peak_local(&self) -> u64 {
        self.peak_local
    }

    pub fn peak_global(&self) -> u64 {
        self.peak_global
    }

    pub fn violations(&self) -> &[MemoryViolation] {
        &self.violations
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn bounds(&self) -> &[BoundCheck] {
        &self.bounds
    }

    /// Hash families (domain, ℓ, k) a seed was searched in.
    pub fn families(&self) -> impl Iterator<Item = &(u64, u32, u32)> {
        self.families.iter()
    }

    pub fn note_family(&mut self, domain: u64, ell: u32, k: u32) {
        self.families.insert((domain, ell, k));
    }

    pub fn add_rounds(&mut self, r: u64) {
        self.rounds += r;
    }

    /// Charges `steps` primitive invocations.
    pub fn tick(&mut self, steps: u64) {
        self.rounds += steps * self.round_cost;
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn record_bound(&mut self, name: impl Into<String>, value: f64, bound: f64) -> bool {
        let holds = value <= bound;
        self.bounds.push(BoundCheck { name: name.into(), value, bound, holds });
        holds
    }

    fn violate(&mut self, v: MemoryViolation) -> Result<()> {
        match self.mode {
            Mode::Strict => Err(Error::Memory(v)),
            Mode::Report => {
                self.violations.push(v);
                Ok(())
            }
        }
    }

    /// One machine holds `words` words.
    pub fn charge_local(&mut self, words: u64, context: &str, vertex: Option<usize>) -> Result<()> {
        self.peak_local = self.peak_local.max(words);
        if words > self.s {
            let v = MemoryViolation {
                scope: MemoryScope::Local,
                context: context.into(),
                used: words,
                cap: self.s,
                vertex,
            };
            return self.violate(v);
        }
        Ok(())
    }

    /// The whole cluster holds `words` words in one round.
    pub fn charge_global(&mut self, words: u64, context: &str) -> Result<()> {
        self.peak_global = self.peak_global.max(words);
        if words > self.global_budget {
            let v = MemoryViolation {
                scope: MemoryScope::Global,
                context: context.into(),
                used: words,
                cap: self.global_budget,
                vertex: None,
            };
            return self.violate(v);
        }
        Ok(())
    }

    /// `words` spread evenly over ⌈words/S⌉ machines.
    pub fn charge_sharded(&mut self, words: u64, context: &str) -> Result<()> {
        self.charge_local(words.min(self.s), context, None)?;
        self.charge_global(words, context)
    }

    fn primitive(&mut self, p: Primitive, words: u64) -> Result<()> {
        self.tick(1);
        self.charge_sharded(words, &format!("{p:?}"))
    }

    pub fn sort<T: Ord>(&mut self, mut items: Vec<T>, words_per_item: u64) -> Result<Vec<T>> {
        self.primitive(Primitive::Sort, items.len() as u64 * words_per_item)?;
        items.sort();
        Ok(items)
    }

    pub fn filter<T>(&mut self, items: Vec<T>, words_per_item: u64, keep: impl Fn(&T) -> bool) -> Result<Vec<T>> {
        self.primitive(Primitive::Filter, items.len() as u64 * words_per_item)?;
        Ok(items.into_iter().filter(|x| keep(x)).collect())
    }

    /// Inclusive prefix sums.
    pub fn prefix_sum(&mut self, items: &[u64]) -> Result<Vec<u64>> {
        self.primitive(Primitive::PrefixSum, items.len() as u64)?;
        Ok(items
            .iter()
            .scan(0u64, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect())
    }

    /// For each position, the nearest marked value at or before it.
    pub fn predecessor<T: Clone>(&mut self, items: &[(bool, T)]) -> Result<Vec<Option<T>>> {
        self.primitive(Primitive::Predecessor, 2 * items.len() as u64)?;
        let mut last = None;
        Ok(items
            .iter()
            .map(|(marked, x)| {
                if *marked {
                    last = Some(x.clone());
                }
                last.clone()
            })
            .collect())
    }

    /// Sorted distinct values.
    pub fn dedup<T: Ord>(&mut self, items: Vec<T>, words_per_item: u64) -> Result<Vec<T>> {
        self.primitive(Primitive::Dedup, items.len() as u64 * words_per_item)?;
        let mut items = items;
        items.sort();
        items.dedup();
        Ok(items)
    }

    /// Per-colour sums of (colour, value) pairs.
    pub fn colored_sum<K: Ord>(&mut self, pairs: impl IntoIterator<Item = (K, u64)>) -> Result<BTreeMap<K, u64>> {
        let mut out = BTreeMap::new();
        let mut count = 0u64;
        for (k, v) in pairs {
            *out.entry(k).or_insert(0) += v;
            count += 1;
        }
        self.primitive(Primitive::ColoredSum, 2 * count)?;
        Ok(out)
    }
}

/// What vertex `center` knows after r rounds of flooding: every vertex within
/// distance r (with its distance) and every edge with an endpoint at distance ≤ r − 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub center: usize,
    /// (vertex, distance) sorted by vertex.
    pub vertices: Vec<(usize, usize)>,
    /// Canonical edges, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl Ball {
    pub fn words(&self) -> u64 {
        (self.vertices.len() + 2 * self.edges.len()) as u64
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search_by_key(&v, |&(u, _)| u).is_ok()
    }

    pub fn dist(&self, v: usize) -> Option<usize> {
        self.vertices.binary_search_by_key(&v, |&(u, _)| u).ok().map(|i| self.vertices[i].1)
    }

    /// Adjacency lists of the known edges, keyed by global id.
    pub fn adjacency(&self) -> HashMap<usize, Vec<usize>> {
        let mut adj: HashMap<usize, Vec<usize>> = self.vertices.iter().map(|&(v, _)| (v, Vec::new())).collect();
        for &(u, v) in &self.edges {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
        for list in adj.values_mut() {
            list.sort_unstable();
        }
        adj
    }

    /// Rebuilds the ball's view restricted to `edges`, using BFS from the centre.
    fn from_edges(center: usize, radius: usize, edges: &[(usize, usize)]) -> Ball {
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(u, v) in edges {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
        let mut dist = HashMap::from([(center, 0usize)]);
        let mut queue = VecDeque::from([center]);
        while let Some(u) = queue.pop_front() {
            let d = dist[&u];
            if d == radius {
                continue;
            }
            for &w in adj.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                dist.entry(w).or_insert_with(|| {
                    queue.push_back(w);
                    d + 1
                });
            }
        }
        let mut vertices: Vec<(usize, usize)> = dist.into_iter().collect();
        vertices.sort_unstable();
        let near =
            |x: usize, vs: &[(usize, usize)]| vs.binary_search_by_key(&x, |&(u, _)| u).is_ok_and(|i| vs[i].1 < radius);
        let mut kept: Vec<(usize, usize)> =
            edges.iter().copied().filter(|&(u, v)| near(u, &vertices) || near(v, &vertices)).collect();
        kept.sort_unstable();
        kept.dedup();
        Ball { center, vertices, edges: kept }
    }
}

fn ball_in_graph(g: &Graph, v: usize, r: usize) -> Ball {
    let mut vertices = g.bfs_within(v, r);
    let mut edges = Vec::new();
    for &(u, d) in &vertices {
        if d < r {
            for &w in g.neighbors(u) {
                edges.push((u.min(w), u.max(w)));
            }
        }
    }
    vertices.sort_unstable();
    edges.sort_unstable();
    edges.dedup();
    Ball { center: v, vertices, edges }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallStore {
    pub radius: usize,
    pub balls: BTreeMap<usize, Ball>,
}

impl BallStore {
    pub fn words(&self) -> u64 {
        self.balls.values().map(Ball::words).sum()
    }

    pub fn get(&self, v: usize) -> Option<&Ball> {
        self.balls.get(&v)
    }
}

fn charge_balls(c: &mut Cluster, balls: &BTreeMap<usize, Ball>, context: &str) -> Result<()> {
    let mut total = 0;
    for (&v, b) in balls {
        c.charge_local(b.words(), context, Some(v))?;
        total += b.words();
    }
    c.charge_global(total, context)
}

fn doubling_steps(r: usize) -> u64 {
    if r == 0 {
        1
    } else {
        1 + crate::util::ceil_log2(r as u64) as u64
    }
}

/// Balls of radius r around every active vertex.
pub fn collect_balls(c: &mut Cluster, g: &Graph, r: usize, active: &[bool]) -> Result<BallStore> {
    let centres: Vec<usize> = (0..g.n()).filter(|&v| active[v]).collect();
    let balls: BTreeMap<usize, Ball> = centres.par_iter().map(|&v| (v, ball_in_graph(g, v, r))).collect();
    c.tick(doubling_steps(r));
    charge_balls(c, &balls, &format!("collect_balls(r={r})"))?;
    Ok(BallStore { radius: r, balls })
}

/// Word sizes the balls of radius 2r would have, computed before anything is materialized.
pub fn doubled_sizes(store: &BallStore, g: &Graph) -> Vec<(usize, u64)> {
    let r2 = 2 * store.radius;
    store.balls.keys().map(|&v| (v, ball_in_graph(g, v, r2).words())).collect()
}

/// Radius r → 2r by merging the r-balls of every vertex in each r-ball.
/// Vertices without a stored ball (frozen ones) still relay their r-ball.
pub fn double_balls(c: &mut Cluster, store: &BallStore, g: &Graph) -> Result<BallStore> {
    let r = store.radius;
    let sizes = doubled_sizes(store, g);
    let mut total = 0;
    for &(v, w) in &sizes {
        c.charge_local(w, &format!("double_balls(r={r}→{})", 2 * r), Some(v))?;
        total += w;
    }
    c.charge_global(total, "double_balls")?;
    c.tick(1);
    if r == 0 {
        // Radius 0 doubles to radius 0.
        return Ok(store.clone());
    }
    let relay: HashMap<usize, Ball> = store
        .balls
        .values()
        .flat_map(|b| b.vertices.iter().map(|&(u, _)| u))
        .filter(|u| !store.balls.contains_key(u))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .map(|u| (u, ball_in_graph(g, u, r)))
        .collect();
    let lookup = |u: usize| store.balls.get(&u).unwrap_or_else(|| &relay[&u]);
    let balls = store
        .balls
        .par_iter()
        .map(|(&v, b)| {
            let mut dist: HashMap<usize, usize> = HashMap::new();
            // Member balls overlap heavily; a set keeps only the union in memory.
            let mut edges = std::collections::BTreeSet::new();
            for &(u, du) in &b.vertices {
                let bu = lookup(u);
                for &(w, dw) in &bu.vertices {
                    let e = dist.entry(w).or_insert(usize::MAX);
                    *e = (*e).min(du + dw);
                }
                edges.extend(bu.edges.iter().copied());
            }
            let mut vertices: Vec<(usize, usize)> = dist.into_iter().collect();
            vertices.sort_unstable();
            (v, Ball { center: v, vertices, edges: edges.into_iter().collect() })
        })
        .collect();
    Ok(BallStore { radius: 2 * r, balls })
}

/// Purges removed vertices from every ball and recomputes distances inside it,
/// which matches a fresh collection on the graph without them.
pub fn remove_and_notify(c: &mut Cluster, store: &BallStore, removed: &[bool]) -> Result<BallStore> {
    c.tick(1);
    let r = store.radius;
    let balls: BTreeMap<usize, Ball> = store
        .balls
        .par_iter()
        .filter(|(&v, _)| !removed[v])
        .map(|(&v, b)| {
            if !b.vertices.iter().any(|&(u, _)| removed[u]) {
                return (v, b.clone());
            }
            let edges: Vec<(usize, usize)> =
                b.edges.iter().copied().filter(|&(x, y)| !removed[x] && !removed[y]).collect();
            (v, Ball::from_edges(v, r, &edges))
        })
        .collect();
    charge_balls(c, &balls, "remove_and_notify")?;
    Ok(BallStore { radius: r, balls })
}
