//! Degree reduction to poly(λ): β-high subgraphs, pairwise-independent
//! partial MIS/MM stages and their MPC composition.

mod high;
mod pipeline;
mod stage;

pub use high::{
    check_prepare, conflict_graph, in_class, max_degree_within4, min_class_separation, prepare_multi, prepare_single,
    BetaHighGraph, PrepareReport,
};
pub use pipeline::{
    condition_two, degree_reduce, iterated_log, mpc_multi_multi, mpc_preprocess, mpc_single_class_reduce,
    DegreeReduction, MultiMultiOutcome, STAGE_RADIUS,
};
pub use stage::{
    at_least_class, class_outcome, class_sizes, conflict_coloring, derand_pairwise_stage, derand_pairwise_stage_with,
    distance4_coloring, ell_for, multi_multi_stage, multi_single_stage, pairwise_stage, replay_stages, ClassOutcome,
    MultiResult, StageParams, StageResult,
};
