//! Graph construction, pipeline dispatch and the RunRecord.

use std::collections::BTreeMap;

use mpc_arb::coloring::{arb_color, layered_list_color, operative_arboricity, verify_coloring};
use mpc_arb::degred::degree_reduce;
use mpc_arb::error::MemoryViolation;
use mpc_arb::graph::{
    estimate_arboricity, gen_bounded_arboricity, gen_complete, gen_cycle, gen_degenerate, gen_grid, gen_hub, gen_path,
    gen_star, gen_tree, HubSpec,
};
use mpc_arb::mismm::solve;
use mpc_arb::mpc::{BoundCheck, Cluster};
use mpc_arb::solution::{check_solution, verify_mis, verify_mm};
use mpc_arb::{Error, Graph, Kind, Mode, RunConfig};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Algo, ConfigArgs, Family, GenSpec};

/// Builds the generated graph and its nominal arboricity bound.
pub fn generate(spec: &GenSpec, n: usize) -> (Graph, u64) {
    let lambda = spec.arb.max(1);
    match spec.family {
        Family::Bounded => (gen_bounded_arboricity(n, lambda, spec.seed), lambda as u64),
        Family::Tree => (gen_tree(n, spec.seed), 1),
        Family::Degenerate => (gen_degenerate(n, lambda, spec.seed), lambda as u64),
        Family::Hub => {
            let hubs = spec.hubs.max(1);
            let hub_degree = spec.hub_degree.unwrap_or(n / (2 * hubs));
            (gen_hub(n, lambda, HubSpec { hubs, hub_degree }, spec.seed), lambda as u64 + 1)
        }
        Family::Path => (gen_path(n), 1),
        Family::Cycle => (gen_cycle(n), if n >= 3 { 2 } else { 1 }),
        Family::Star => (gen_star(n.saturating_sub(1)), 1),
        Family::Complete => (gen_complete(n), (n as u64).div_ceil(2).max(1)),
        Family::Grid => {
            let side = (n as f64).sqrt().ceil() as usize;
            let rows = if side == 0 { 0 } else { n.div_ceil(side) };
            // Keep exactly n vertices: drop the padding of the last row.
            let g = Graph::from_edges_lossy(n, gen_grid(rows, side).edges().iter().copied());
            (g, if n >= 4 { 2 } else { 1 })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphInfo {
    /// Edge-list path, or "generated".
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator_arb: Option<u64>,
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
    /// Power-of-two arboricity estimate λ̂.
    pub arb_estimate: u64,
    /// ⌈(degeneracy + 1)/2⌉, a lower bound on the arboricity.
    pub arb_lower: u64,
}

impl GraphInfo {
    pub fn describe(
        g: &Graph,
        source: String,
        family: Option<Family>,
        seed: Option<u64>,
        generator_arb: Option<u64>,
    ) -> Self {
        GraphInfo {
            source,
            family,
            seed,
            generator_arb,
            n: g.n(),
            m: g.m(),
            max_degree: g.max_degree(),
            arb_estimate: estimate_arboricity(g),
            arb_lower: operative_arboricity(g),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Metrics {
    pub rounds: u64,
    pub peak_local: u64,
    pub peak_global: u64,
    /// Local memory S of the cluster.
    pub local_memory: u64,
    pub global_budget: u64,
    pub iterations: u64,
    /// Independent-set size, matching size, or colours used.
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub palette: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub palette_bound: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
}

impl ErrorInfo {
    pub fn from_error(e: &Error) -> Self {
        let (kind, exit_code) = match e {
            Error::Memory(_) => ("memory", 3),
            Error::Parse { .. } | Error::Invariant { line: Some(_), .. } => ("input", 4),
            Error::Io(_) => ("io", 4),
            Error::InvalidArgument(_) => ("usage", 4),
            Error::Precondition(_) => ("precondition", 2),
            Error::ImproperColoring(..) | Error::Validation(_) => ("validation", 2),
            _ => ("pipeline", 2),
        };
        ErrorInfo { kind, message: e.to_string(), exit_code }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        ErrorInfo { kind: "usage", message: message.into(), exit_code: 4 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HashFamily {
    pub domain: u64,
    pub ell: u32,
    pub k: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub command: &'static str,
    pub algo: Algo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    pub valid: bool,
    pub graph: GraphInfo,
    pub config: RunConfig,
    pub metrics: Metrics,
    pub validators: BTreeMap<String, bool>,
    pub violations: Vec<MemoryViolation>,
    pub warnings: Vec<String>,
    pub bounds: Vec<BoundCheck>,
    /// Hash families (domain, ℓ, k) the run drew seeds from.
    pub hash_families: Vec<HashFamily>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl RunRecord {
    /// Exit status under the 0/2/3 contract.
    pub fn exit_code(&self) -> i32 {
        match &self.error {
            Some(e) => e.exit_code,
            None if self.valid => 0,
            None => 2,
        }
    }
}

struct Outcome {
    kind: Option<Kind>,
    size: usize,
    iterations: u64,
    palette: Option<u64>,
    palette_bound: Option<u64>,
    validators: BTreeMap<String, bool>,
    details: Value,
}

fn checks(items: &[(&str, bool)]) -> BTreeMap<String, bool> {
    items.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn lambda_for(g: &Graph, cfg: &ConfigArgs) -> u64 {
    cfg.lambda.unwrap_or_else(|| operative_arboricity(g)).max(1)
}

fn dispatch(c: &mut Cluster, g: &Graph, algo: Algo, cfg: &ConfigArgs) -> Result<Outcome, Error> {
    match algo {
        Algo::Degred => {
            let lambda = lambda_for(g, cfg);
            let kind = Kind::from(cfg.kind);
            let red = degree_reduce(c, g, lambda, kind)?;
            let partial = red.solution.check_partial(g).is_ok();
            let capped = red.final_max_degree as u64 <= red.cap;
            Ok(Outcome {
                kind: Some(kind),
                size: red.solution.size(),
                iterations: red.iterations as u64,
                palette: None,
                palette_bound: None,
                validators: checks(&[("partial_solution", partial), ("degree_cap", capped)]),
                details: json!({ "lambda": lambda, "reduction": red }),
            })
        }
        Algo::Mis | Algo::Mm => {
            let kind = if algo == Algo::Mis { Kind::Mis } else { Kind::Mm };
            let out = solve(c, g, kind)?;
            let (name, ok) = match kind {
                Kind::Mis => ("maximal_independent_set", verify_mis(g, &out.solution.independent)),
                Kind::Mm => ("maximal_matching", verify_mm(g, &out.solution.matching)),
            };
            let full = check_solution(g, kind, &out.solution).is_ok();
            let size = match kind {
                Kind::Mis => out.solution.independent.len(),
                Kind::Mm => out.solution.matching.len(),
            };
            Ok(Outcome {
                kind: Some(kind),
                size,
                iterations: out.iterations as u64,
                palette: None,
                palette_bound: None,
                validators: checks(&[(name, ok && full)]),
                details: serde_json::to_value(&out).unwrap_or(Value::Null),
            })
        }
        Algo::Color => {
            let lambda = lambda_for(g, cfg);
            let delta = c.constants.delta;
            let out = arb_color(c, g, lambda, delta)?;
            let proper = verify_coloring(g, &out.coloring.color);
            let used = out.coloring.colors_used();
            Ok(Outcome {
                kind: None,
                size: used,
                iterations: out.per_layer.len() as u64,
                palette: Some(out.coloring.palette),
                palette_bound: Some(out.bound),
                validators: checks(&[
                    ("proper_coloring", proper),
                    ("palette_within_bound", out.coloring.palette <= out.bound),
                ]),
                details: serde_json::to_value(&out).unwrap_or(Value::Null),
            })
        }
        Algo::ColorLayered => {
            let lambda = lambda_for(g, cfg);
            let d = cfg.d.unwrap_or(2 * lambda as usize + 1);
            let out = layered_list_color(c, g, lambda, d)?;
            let proper = verify_coloring(g, &out.coloring.color);
            let bound = 3 * d as u64 + 2;
            let used = out.coloring.colors_used();
            let within = out.coloring.color.iter().all(|&x| x < bound);
            Ok(Outcome {
                kind: None,
                size: used,
                iterations: out.peeled as u64,
                palette: Some(out.coloring.palette),
                palette_bound: Some(bound),
                validators: checks(&[("proper_coloring", proper), ("palette_within_bound", within)]),
                details: json!({ "lambda": lambda, "coloring": out }),
            })
        }
    }
}

/// Runs `algo` on `g` and assembles the record (the record carries any pipeline error).
pub fn execute(g: &Graph, info: GraphInfo, algo: Algo, cfg: &ConfigArgs) -> RunRecord {
    let run_cfg: RunConfig = cfg.run_config();
    let built = match algo {
        Algo::Color => Cluster::linear_memory(g, &run_cfg).map(|mut c| {
            // Relaxed n·poly(λ) global memory: one n-word table per candidate hash function.
            let k = &run_cfg.constants;
            c.global_budget = k.global_factor * (c.n as u64 * k.seed_window.max(1) + g.m() as u64);
            c
        }),
        Algo::ColorLayered => Cluster::linear_memory(g, &run_cfg),
        _ => Cluster::for_graph(g, &run_cfg),
    };
    let mut record = RunRecord {
        command: "run",
        algo,
        kind: None,
        valid: false,
        graph: info,
        config: run_cfg,
        metrics: Metrics::default(),
        validators: BTreeMap::new(),
        violations: Vec::new(),
        warnings: Vec::new(),
        bounds: Vec::new(),
        hash_families: Vec::new(),
        error: None,
        details: Value::Null,
        wall_time_ms: None,
    };
    let mut c = match built {
        Ok(c) => c,
        Err(e) => {
            record.error = Some(ErrorInfo::from_error(&e));
            return record;
        }
    };
    let result = dispatch(&mut c, g, algo, cfg);
    record.metrics.rounds = c.rounds();
    record.metrics.peak_local = c.peak_local();
    record.metrics.peak_global = c.peak_global();
    record.metrics.local_memory = c.s;
    record.metrics.global_budget = c.global_budget;
    record.violations = c.violations().to_vec();
    record.warnings = c.warnings().to_vec();
    record.bounds = c.bounds().to_vec();
    record.hash_families = c.families().map(|&(domain, ell, k)| HashFamily { domain, ell, k }).collect();
    match result {
        Ok(out) => {
            record.kind = out.kind;
            record.metrics.size = out.size;
            record.metrics.iterations = out.iterations;
            record.metrics.palette = out.palette;
            record.metrics.palette_bound = out.palette_bound;
            record.valid = out.validators.values().all(|&v| v);
            record.validators = out.validators;
            record.details = out.details;
        }
        Err(e) => {
            record.kind = match algo {
                Algo::Degred => Some(Kind::from(cfg.kind)),
                Algo::Mis => Some(Kind::Mis),
                Algo::Mm => Some(Kind::Mm),
                _ => None,
            };
            record.error = Some(ErrorInfo::from_error(&e));
        }
    }
    if record.config.mode == Mode::Report && !record.violations.is_empty() {
        record.warnings.push(format!("{} memory violations recorded", record.violations.len()));
    }
    record
}
