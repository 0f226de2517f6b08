mod args;
mod exec;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use mpc_arb::graph::{load_graph, write_edge_list};
use serde::Serialize;

use args::{BenchArgs, Cli, Command, GenArgs, RunArgs};
use exec::{execute, generate, ErrorInfo, GraphInfo};

fn fail(info: ErrorInfo) -> ExitCode {
    eprintln!("{}", serde_json::json!({ "error": info }));
    ExitCode::from(info.exit_code as u8)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), ErrorInfo> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| ErrorInfo {
            kind: "io",
            message: format!("{}: {e}", p.display()),
            exit_code: 4,
        }),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| ErrorInfo {
            kind: "io",
            message: e.to_string(),
            exit_code: 4,
        }),
    }
}

fn init_threads(threads: Option<usize>) {
    if let Some(t) = threads {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
}

fn cmd_gen(a: GenArgs) -> Result<(), ErrorInfo> {
    let n = a.spec.n.ok_or_else(|| ErrorInfo::usage("gen needs --n"))?;
    let (g, arb) = generate(&a.spec, n);
    write_output(a.out.as_deref(), &write_edge_list(&g))?;
    let summary = format!("n={} m={} arb={}", g.n(), g.m(), arb);
    if a.out.is_some() {
        let _ = writeln!(std::io::stdout(), "{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn cmd_run(a: RunArgs) -> Result<i32, ErrorInfo> {
    init_threads(a.config.threads);
    let (g, info) = match (&a.graph, a.spec.n) {
        (Some(path), None) => {
            let g = load_graph(path).map_err(|e| ErrorInfo::from_error(&e))?;
            let info = GraphInfo::describe(&g, path.display().to_string(), None, None, None);
            (g, info)
        }
        (None, Some(n)) => {
            let (g, arb) = generate(&a.spec, n);
            let info = GraphInfo::describe(&g, "generated".into(), Some(a.spec.family), Some(a.spec.seed), Some(arb));
            (g, info)
        }
        _ => return Err(ErrorInfo::usage("run needs exactly one of --graph and --n")),
    };
    let start = Instant::now();
    let mut record = execute(&g, info, a.algo, &a.config);
    if a.timing {
        record.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    let text =
        serde_json::to_string(&record).map_err(|e| ErrorInfo { kind: "io", message: e.to_string(), exit_code: 4 })?;
    let _ = writeln!(std::io::stdout(), "{text}");
    if let Some(e) = &record.error {
        eprintln!("{}", serde_json::json!({ "error": e }));
    } else if !record.valid {
        let failed: Vec<&String> = record.validators.iter().filter(|(_, &ok)| !ok).map(|(k, _)| k).collect();
        eprintln!("{}", serde_json::json!({ "error": { "kind": "validation", "failed": failed, "exit_code": 2 } }));
    }
    Ok(record.exit_code())
}

#[derive(Serialize)]
struct BenchRow {
    n: usize,
    m: usize,
    arb: usize,
    seed: u64,
    algo: &'static str,
    rounds: u64,
    peak_local: u64,
    peak_global: u64,
    iters: u64,
    size: usize,
    valid: bool,
}

fn cmd_bench(a: BenchArgs) -> Result<i32, ErrorInfo> {
    init_threads(a.config.threads);
    let io = |e: csv::Error| ErrorInfo { kind: "io", message: e.to_string(), exit_code: 4 };
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut all_valid = true;
    for &n in &a.n_list {
        for &arb in &a.arb_list {
            for seed in 1..=a.seeds {
                let spec = args::GenSpec { n: Some(n), arb, seed, family: a.family, hubs: 1, hub_degree: None };
                let (g, gen_arb) = generate(&spec, n);
                let info = GraphInfo::describe(&g, "generated".into(), Some(a.family), Some(seed), Some(gen_arb));
                let r = execute(&g, info, a.algo, &a.config);
                if let Some(e) = &r.error {
                    eprintln!("{}", serde_json::json!({ "n": n, "arb": arb, "seed": seed, "error": e }));
                }
                let valid = r.valid && r.error.is_none();
                all_valid &= valid;
                w.serialize(BenchRow {
                    n,
                    m: g.m(),
                    arb,
                    seed,
                    algo: a.algo.name(),
                    rounds: r.metrics.rounds,
                    peak_local: r.metrics.peak_local,
                    peak_global: r.metrics.peak_global,
                    iters: r.metrics.iterations,
                    size: r.metrics.size,
                    valid,
                })
                .map_err(io)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| ErrorInfo { kind: "io", message: e.to_string(), exit_code: 4 })?;
    write_output(a.out.as_deref(), &String::from_utf8_lossy(&bytes))?;
    Ok(if all_valid { 0 } else { 2 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(ErrorInfo::usage(e.to_string().trim_end())),
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a).map(|_| 0),
        Command::Run(a) => cmd_run(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(info) => fail(info),
    }
}
