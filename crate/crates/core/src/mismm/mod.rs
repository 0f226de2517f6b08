//! Maximal independent set and maximal matching: sparsified derandomized Luby
//! steps, heavy-vertex matching, the low-arboricity finisher and the driver.

mod heavy;
mod lowarb;
mod luby;
mod solve;
mod sparsify;

pub use heavy::{heavy_k, heavy_vertex_match, heavy_vertex_match_with, HeavyOutcome};
pub use lowarb::{forest_three_coloring, low_arb_degree, low_arb_solve, LowArbOutcome};
pub use luby::{
    derand_luby, derand_luby_with, estimator, luby_step, outcome, setup, LubyOutcome, LubySetup, LubyStep,
    LubyStepSummary,
};
pub use solve::{greedy_mis, greedy_mm, luby_with_balls, solve, Residual, SolveOutcome};
pub use sparsify::{check_properties, edge_degree, sparsify, SparsifiedInstance, MM_MASS};
