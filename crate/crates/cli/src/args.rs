use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mpc_arb::{BudgetMode, Constants, Kind, Mode, RunConfig};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "mpcarb",
    version,
    about = "Deterministic low-space MPC simulator: degree reduction, MIS, maximal matching and arboricity coloring"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a graph and write it as an edge list.
    Gen(GenArgs),
    /// Run one pipeline on one graph and print a RunRecord as JSON.
    Run(RunArgs),
    /// Sweep n × λ × seed and write one CSV row per run.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Union of λ random spanning trees.
    Bounded,
    Tree,
    /// Every vertex links to λ random earlier vertices.
    Degenerate,
    /// λ random trees plus vertex-disjoint high-degree stars.
    Hub,
    Path,
    Cycle,
    Star,
    Complete,
    Grid,
}

#[derive(Args, Debug, Clone)]
pub struct GenSpec {
    /// Number of vertices.
    #[arg(long)]
    pub n: Option<usize>,
    /// Arboricity parameter of the generator.
    #[arg(long, default_value_t = 1)]
    pub arb: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Family::Bounded)]
    pub family: Family,
    /// Number of stars for the hub family.
    #[arg(long, default_value_t = 1)]
    pub hubs: usize,
    /// Leaves per star for the hub family (default: n / (2·hubs)).
    #[arg(long)]
    pub hub_degree: Option<usize>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub spec: GenSpec,
    /// Output file; the edge list goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    /// Degree reduction to max(λ,2)^c5.
    Degred,
    Mis,
    Mm,
    /// O(λ)-colouring through the bin partition.
    Color,
    /// O(d)-colouring from an H-partition of degree d.
    ColorLayered,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Degred => "degred",
            Algo::Mis => "mis",
            Algo::Mm => "mm",
            Algo::Color => "color",
            Algo::ColorLayered => "color-layered",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    Mis,
    Mm,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Mis => Kind::Mis,
            KindArg::Mm => Kind::Mm,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Strict,
    Report,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BudgetArg {
    Linear,
    Superlinear,
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if a > 0.0 && a < 1.0 {
        Ok(a)
    } else {
        Err(format!("α = {a} must lie strictly between 0 and 1"))
    }
}

/// Every named constant; unset flags keep the library defaults.
#[derive(Args, Debug, Clone, Default)]
pub struct ConstantArgs {
    #[arg(long)]
    pub c1: Option<u32>,
    #[arg(long)]
    pub c2: Option<u32>,
    #[arg(long)]
    pub c3: Option<u32>,
    #[arg(long)]
    pub c4: Option<u32>,
    #[arg(long)]
    pub c5: Option<u32>,
    #[arg(long)]
    pub c6: Option<u64>,
    #[arg(long)]
    pub stage_threshold: Option<u32>,
    #[arg(long)]
    pub c_prime: Option<u32>,
    #[arg(long)]
    pub round_cost: Option<u64>,
    #[arg(long)]
    pub global_factor: Option<u64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub low_arb_threshold: Option<u64>,
    #[arg(long)]
    pub reps: Option<u32>,
    #[arg(long)]
    pub color_layers: Option<u32>,
    #[arg(long)]
    pub seed_window: Option<u64>,
    #[arg(long)]
    pub high_arb_exponent: Option<f64>,
}

impl ConstantArgs {
    pub fn resolve(&self) -> Constants {
        let mut k = Constants::default();
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { k.$f = v; })* };
        }
        set!(
            c1,
            c2,
            c3,
            c4,
            c5,
            c6,
            stage_threshold,
            c_prime,
            round_cost,
            global_factor,
            delta,
            epsilon,
            low_arb_threshold,
            reps,
            color_layers,
            seed_window,
            high_arb_exponent
        );
        k
    }
}

#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    /// Local memory exponent: S = ⌈n^α⌉ words.
    #[arg(long, default_value = "0.5", value_parser = parse_alpha)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = BudgetArg::Linear)]
    pub budget: BudgetArg,
    /// Problem for degree reduction.
    #[arg(long, value_enum, default_value_t = KindArg::Mis)]
    pub kind: KindArg,
    /// Arboricity bound handed to degred and the colourings (default: ⌈(degeneracy+1)/2⌉).
    #[arg(long)]
    pub lambda: Option<u64>,
    /// Degree of the layered colouring (default: 2λ + 1).
    #[arg(long)]
    pub d: Option<usize>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub constants: ConstantArgs,
}

impl ConfigArgs {
    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            alpha: self.alpha,
            mode: match self.mode {
                ModeArg::Strict => Mode::Strict,
                ModeArg::Report => Mode::Report,
            },
            budget: match self.budget {
                BudgetArg::Linear => BudgetMode::Linear,
                BudgetArg::Superlinear => BudgetMode::Superlinear,
            },
            constants: self.constants.resolve(),
        }
    }
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// Edge-list file; otherwise the graph is generated from the generator flags.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[command(flatten)]
    pub spec: GenSpec,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Add wall-clock time to the record (breaks byte-identical output).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub arb_list: Vec<usize>,
    /// Seeds 1..=SEEDS per (n, λ).
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, value_enum, default_value_t = Family::Bounded)]
    pub family: Family,
    /// CSV output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
}
