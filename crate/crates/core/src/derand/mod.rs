//! Seed selection by exhaustive search and by the chunked method of
//! conditional expectations, plus Linial-style colour reduction.

mod linial;
mod select;

pub use linial::{
    arb_linial_coloring, compress_colors, linial_bound, linial_coloring, linial_with, square_color, Coloring,
};

pub use select::{
    best_seed, candidate_seeds, enumerable, select_seed, SearchMethod, SeedChoice, SeedRequest, MAX_WIDENINGS,
    WORK_BUDGET,
};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mpc::Cluster;

pub type Q = Ratio<i128>;

/// Largest seed space enumerated exhaustively.
pub const ENUMERATION_BITS: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    /// True if `a` is strictly better than `b`.
    pub fn better<T: PartialOrd>(self, a: &T, b: &T) -> bool {
        match self {
            Direction::Maximize => a > b,
            Direction::Minimize => a < b,
        }
    }

    /// True if `a` is at least as good as `b`.
    pub fn at_least<T: PartialOrd>(self, a: &T, b: &T) -> bool {
        !self.better(b, a)
    }
}

/// A pessimistic estimator over seeds `0..2^seed_bits`. Prefixes fix the most
/// significant bits; `conditional` is the exact mean over uniform completions.
pub trait Estimator: Sync {
    fn seed_bits(&self) -> u32;
    fn score(&self, seed: u64) -> i64;
    fn conditional(&self, prefix: u64, len: u32) -> Q;
    fn direction(&self) -> Direction;
    fn target(&self) -> Q;

    fn expectation(&self) -> Q {
        self.conditional(0, 0)
    }

    fn meets_target(&self, score: i64) -> bool {
        self.direction().at_least(&Q::from_integer(score as i128), &self.target())
    }
}

/// Scores for every seed, with prefix sums so that each MSB-first prefix
/// (a contiguous seed range) has an exact conditional expectation.
#[derive(Clone, Debug)]
pub struct TabulatedEstimator {
    bits: u32,
    scores: Vec<i64>,
    prefix: Vec<i128>,
    direction: Direction,
    target: Q,
}

impl TabulatedEstimator {
    pub fn new(bits: u32, scores: Vec<i64>, direction: Direction, target: Q) -> Result<Self> {
        if bits > ENUMERATION_BITS {
            return Err(Error::EnumerationBudget { bits, budget: ENUMERATION_BITS });
        }
        assert_eq!(scores.len(), 1usize << bits, "one score per seed");
        let mut prefix = Vec::with_capacity(scores.len() + 1);
        prefix.push(0i128);
        for &s in &scores {
            prefix.push(prefix.last().unwrap() + s as i128);
        }
        Ok(TabulatedEstimator { bits, scores, prefix, direction, target })
    }

    /// Tabulates `f` over all seeds in parallel (order-independent result).
    pub fn from_fn(
        bits: u32,
        f: impl Fn(u64) -> i64 + Sync,
        direction: Direction,
        target: impl Fn(Q) -> Q,
    ) -> Result<Self> {
        if bits > ENUMERATION_BITS {
            return Err(Error::EnumerationBudget { bits, budget: ENUMERATION_BITS });
        }
        let scores: Vec<i64> = (0..1u64 << bits).into_par_iter().map(&f).collect();
        let total: i128 = scores.iter().map(|&s| s as i128).sum();
        let mean = Q::new(total, 1i128 << bits);
        Self::new(bits, scores, direction, target(mean))
    }

    pub fn scores(&self) -> &[i64] {
        &self.scores
    }

    pub fn with_target(mut self, target: Q) -> Self {
        self.target = target;
        self
    }
}

impl Estimator for TabulatedEstimator {
    fn seed_bits(&self) -> u32 {
        self.bits
    }

    fn score(&self, seed: u64) -> i64 {
        self.scores[seed as usize]
    }

    fn conditional(&self, prefix: u64, len: u32) -> Q {
        let free = self.bits - len;
        let lo = (prefix << free) as usize;
        let hi = ((prefix + 1) << free) as usize;
        Q::new(self.prefix[hi] - self.prefix[lo], 1i128 << free)
    }

    fn direction(&self) -> Direction {
        self.direction
    }

    fn target(&self) -> Q {
        self.target
    }
}

/// Estimator given by closures; the caller supplies the exact conditional.
pub struct FnEstimator<S, C> {
    pub bits: u32,
    pub score: S,
    pub conditional: C,
    pub direction: Direction,
    pub target: Q,
}

impl<S, C> Estimator for FnEstimator<S, C>
where
    S: Fn(u64) -> i64 + Sync,
    C: Fn(u64, u32) -> Q + Sync,
{
    fn seed_bits(&self) -> u32 {
        self.bits
    }

    fn score(&self, seed: u64) -> i64 {
        (self.score)(seed)
    }

    fn conditional(&self, prefix: u64, len: u32) -> Q {
        (self.conditional)(prefix, len)
    }

    fn direction(&self) -> Direction {
        self.direction
    }

    fn target(&self) -> Q {
        self.target
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub seed: u64,
    pub score: i64,
    /// Conditional expectation after each chunk (starting with the unconditioned mean).
    pub trace: Vec<String>,
    pub chunks: u32,
}

/// Fixes `chunk_bits` seed bits at a time, each time picking the extension with
/// the best conditional expectation (ties → smallest).
pub fn condexp_search(est: &dyn Estimator, chunk_bits: u32) -> Result<SearchOutcome> {
    let bits = est.seed_bits();
    let chunk = chunk_bits.clamp(1, ENUMERATION_BITS);
    let dir = est.direction();
    let (mut prefix, mut len) = (0u64, 0u32);
    let mut current = est.conditional(0, 0);
    let mut trace = vec![current.to_string()];
    let mut chunks = 0;
    while len < bits {
        let c = chunk.min(bits - len);
        let values: Vec<Q> =
            (0..1u64 << c).into_par_iter().map(|ext| est.conditional((prefix << c) | ext, len + c)).collect();
        let mut best = 0usize;
        for (i, v) in values.iter().enumerate() {
            if dir.better(v, &values[best]) {
                best = i;
            }
        }
        if !dir.at_least(&values[best], &current) {
            return Err(Error::Estimator {
                context: format!("chunk {} of {bits}-bit seed", chunks + 1),
                achieved: values[best].to_string(),
                required: current.to_string(),
            });
        }
        prefix = (prefix << c) | best as u64;
        len += c;
        current = values[best];
        trace.push(current.to_string());
        chunks += 1;
    }
    let score = est.score(prefix);
    if Q::from_integer(score as i128) != current {
        return Err(Error::Estimator {
            context: "full-seed conditional".into(),
            achieved: score.to_string(),
            required: current.to_string(),
        });
    }
    if !est.meets_target(score) {
        return Err(Error::Estimator {
            context: "condexp target".into(),
            achieved: score.to_string(),
            required: est.target().to_string(),
        });
    }
    Ok(SearchOutcome { seed: prefix, score, trace, chunks })
}

/// Best seed over the whole space; ties → smallest seed.
pub fn brute_force_search(est: &dyn Estimator) -> Result<SearchOutcome> {
    let bits = est.seed_bits();
    if bits > ENUMERATION_BITS {
        return Err(Error::EnumerationBudget { bits, budget: ENUMERATION_BITS });
    }
    let dir = est.direction();
    let (seed, score) = (0..1u64 << bits).into_par_iter().map(|s| (s, est.score(s))).reduce(
        || (u64::MAX, 0),
        |a, b| {
            if a.0 == u64::MAX {
                b
            } else if b.0 == u64::MAX || dir.better(&a.1, &b.1) || (a.1 == b.1 && a.0 < b.0) {
                a
            } else {
                b
            }
        },
    );
    Ok(SearchOutcome { seed, score, trace: Vec::new(), chunks: 1 })
}

/// Charges a chunked search: one round and 2^χ local words per chunk.
pub fn charge_condexp(c: &mut Cluster, bits: u32, chunk_bits: u32, context: &str) -> Result<()> {
    let chunk = chunk_bits.clamp(1, ENUMERATION_BITS);
    let chunks = bits.div_ceil(chunk).max(1) as u64;
    c.charge_local(1u64 << chunk.min(bits.max(1)), context, None)?;
    c.tick(chunks);
    Ok(())
}

/// Charges a one-machine exhaustive search over 2^τ seeds.
pub fn charge_brute_force(c: &mut Cluster, bits: u32, context: &str) -> Result<()> {
    c.charge_local(1u64 << bits, context, None)?;
    c.tick(1);
    Ok(())
}

/// χ = ⌊log₂ S⌋.
pub fn chunk_bits_for(c: &Cluster) -> u32 {
    crate::util::floor_log2(c.s).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn popcount_estimator(bits: u32) -> impl Estimator {
        FnEstimator {
            bits,
            score: |s: u64| s.count_ones() as i64,
            conditional: move |p: u64, len: u32| {
                Q::from_integer(p.count_ones() as i128) + Q::new((bits - len) as i128, 2)
            },
            direction: Direction::Maximize,
            target: Q::from_integer(bits as i128 / 2),
        }
    }

    #[test]
    fn separable_objective() {
        let out = condexp_search(&popcount_estimator(8), 4).unwrap();
        assert_eq!((out.seed, out.score, out.chunks), (0xFF, 8, 2));
    }

    #[test]
    fn brute_force_rules() {
        let est = TabulatedEstimator::new(1, vec![3, 5], Direction::Maximize, Q::from_integer(0)).unwrap();
        assert_eq!(brute_force_search(&est).unwrap().seed, 1);
        let tie = TabulatedEstimator::new(2, vec![1, 7, 7, 0], Direction::Maximize, Q::from_integer(0)).unwrap();
        assert_eq!(brute_force_search(&tie).unwrap().seed, 1);
        let min = TabulatedEstimator::new(2, vec![4, 0, 2, 0], Direction::Minimize, Q::from_integer(9)).unwrap();
        assert_eq!(brute_force_search(&min).unwrap().seed, 1);
    }

    #[test]
    fn single_chunk_equals_brute_force() {
        let est =
            TabulatedEstimator::new(3, vec![2, 9, 1, 9, 0, 3, 3, 4], Direction::Maximize, Q::from_integer(0)).unwrap();
        assert_eq!(condexp_search(&est, 8).unwrap().seed, brute_force_search(&est).unwrap().seed);
    }

    #[test]
    fn broken_estimator_is_rejected() {
        // Claims every prefix has mean 10 but the full seeds score 0.
        let est = FnEstimator {
            bits: 4,
            score: |_| 0,
            conditional: |_, len| if len == 4 { Q::from_integer(0) } else { Q::from_integer(10) },
            direction: Direction::Maximize,
            target: Q::from_integer(0),
        };
        assert!(matches!(condexp_search(&est, 2), Err(Error::Estimator { .. })));
    }
}
