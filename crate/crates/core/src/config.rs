//! Named constants for every hidden O(·)/Ω(·) in the algorithms.
//!
//! Defaults follow the module design decisions; every run record echoes them.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Memory violations abort the run.
    Strict,
    /// Memory violations are recorded and the run continues.
    Report,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetMode {
    /// global_factor · (n + m) words.
    Linear,
    /// global_factor · (n^{1+ε} + m) words.
    Superlinear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Single-stage shrink exponent: |V_i|/Δ_i^{c1}.
    pub c1: u32,
    /// Spill-over exponent from higher classes: Δ_j^{c2}.
    pub c2: u32,
    /// Multi-stage shrink exponent per stage: Δ_i^{c3·k}.
    pub c3: u32,
    /// Single-class reduction exponent per iteration: Δ_i^{c4}.
    pub c4: u32,
    /// Degree-reduction target exponent: max(λ,2)^{c5}.
    pub c5: u32,
    /// Bin size cap factor in the coloring partition: c6 · n_layer words.
    pub c6: u64,
    /// Minimum stage count before the multi-stage decay is asserted.
    pub stage_threshold: u32,
    /// Minimum exponentiation radius for the local multi-stage simulation.
    pub c_prime: u32,
    /// Rounds charged per primitive invocation.
    pub round_cost: u64,
    /// Global budget factor.
    pub global_factor: u64,
    /// Degree exponent δ: sparsifier cap n^δ, the Δ ≤ n^δ regime, and the multi-stage k.
    pub delta: f64,
    /// Slack exponent ε for d = λ^{1+ε} and the superlinear budget n^{1+ε}.
    pub epsilon: f64,
    /// Arboricity at or below which low_arb_solve is the finisher.
    pub low_arb_threshold: u64,
    /// Repetitions per class in preprocessing and per exponentiation level.
    pub reps: u32,
    /// H-partition layers peeled before the partition coloring.
    pub color_layers: u32,
    /// Seeds examined when a hash family is too large to enumerate.
    pub seed_window: u64,
    /// Escape hatch: λ ≥ n^{δ/4} skips degree reduction.
    pub high_arb_exponent: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            c1: 1,
            c2: 5,
            c3: 1,
            c4: 1,
            c5: 16,
            c6: 16,
            stage_threshold: 1,
            c_prime: 1,
            round_cost: 1,
            global_factor: 8,
            delta: 0.25,
            epsilon: 0.25,
            low_arb_threshold: 8,
            reps: 2,
            color_layers: 3,
            seed_window: 1 << 10,
            high_arb_exponent: 0.25,
        }
    }
}

impl Constants {
    /// Target maximum degree of degree reduction: max(λ,2)^{c5}, saturating.
    pub fn degree_cap(&self, lambda: u64) -> u64 {
        let base = lambda.max(2);
        base.checked_pow(self.c5).unwrap_or(u64::MAX)
    }
}

/// Everything needed to build a cluster and run a pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub alpha: f64,
    pub mode: Mode,
    pub budget: BudgetMode,
    pub constants: Constants,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { alpha: 0.5, mode: Mode::Strict, budget: BudgetMode::Linear, constants: Constants::default() }
    }
}
