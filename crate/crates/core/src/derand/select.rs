//! One entry point for picking a hash seed under the machine-memory rules.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    brute_force_search, charge_brute_force, charge_condexp, chunk_bits_for, condexp_search, Direction, Estimator,
    TabulatedEstimator, ENUMERATION_BITS, Q,
};
use crate::error::{Error, Result};
use crate::hashing::KWiseFamily;
use crate::mpc::Cluster;

/// Tabulation is skipped when seeds × per-seed work exceeds this.
pub const WORK_BUDGET: u64 = 1 << 24;

/// Widening steps tried before giving up on a target.
pub const MAX_WIDENINGS: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SearchMethod {
    BruteForce,
    CondExp,
    /// Best of a deterministic sample of seeds (family too large to enumerate).
    Window,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeedChoice {
    pub seed: Vec<u64>,
    pub score: i64,
    /// Exact mean over all seeds, when the family was enumerated.
    #[serde(skip)]
    pub expectation: Option<Q>,
    #[serde(skip)]
    pub target: Q,
    pub widenings: u32,
    pub method: SearchMethod,
}

pub struct SeedRequest<'a> {
    pub family: &'a KWiseFamily,
    pub direction: Direction,
    /// Rough cost of one score evaluation, used to decide on tabulation.
    pub work_per_seed: u64,
    /// Seeds examined when the family is too large.
    pub window: u64,
    pub context: &'a str,
}

/// Whether the family is small enough to tabulate every seed.
pub fn enumerable(family: &KWiseFamily, work_per_seed: u64) -> bool {
    let bits = family.seed_bits();
    bits <= ENUMERATION_BITS && (1u64 << bits).saturating_mul(work_per_seed.max(1)) <= WORK_BUDGET
}

/// Selects a seed whose score meets `target(w)` for the smallest widening w.
pub fn select_seed(
    c: &mut Cluster,
    req: SeedRequest<'_>,
    score: impl Fn(&[u64]) -> i64 + Sync,
    target: impl Fn(u32) -> Q,
) -> Result<SeedChoice> {
    let f = req.family;
    let dir = req.direction;
    let bits = f.seed_bits();
    c.note_family(f.domain, f.ell, f.k);
    if enumerable(f, req.work_per_seed) {
        let est = TabulatedEstimator::from_fn(bits, |s| score(&f.seed_from_index(s).unwrap()), dir, |_| target(0))?;
        let mean = est.expectation();
        let w = (0..=MAX_WIDENINGS).find(|&w| dir.at_least(&mean, &target(w))).ok_or_else(|| Error::Estimator {
            context: req.context.into(),
            achieved: mean.to_string(),
            required: target(MAX_WIDENINGS).to_string(),
        })?;
        if w > 0 {
            c.warn(format!("{}: target widened {w}× (mean {mean})", req.context));
        }
        let est = est.with_target(target(w));
        let (out, method) = if 1u64 << bits <= c.s {
            charge_brute_force(c, bits, req.context)?;
            (brute_force_search(&est)?, SearchMethod::BruteForce)
        } else {
            let chunk = chunk_bits_for(c);
            charge_condexp(c, bits, chunk, req.context)?;
            (condexp_search(&est, chunk)?, SearchMethod::CondExp)
        };
        return Ok(SeedChoice {
            seed: f.seed_from_index(out.seed)?,
            score: out.score,
            expectation: Some(mean),
            target: est.target(),
            widenings: w,
            method,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ bits as u64);
    let seeds: Vec<Vec<u64>> = (0..req.window.max(1)).map(|_| f.random_seed(&mut rng)).collect();
    let scores: Vec<i64> = seeds.par_iter().map(|s| score(s)).collect();
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if dir.better(s, &scores[best]) {
            best = i;
        }
    }
    let achieved = Q::from_integer(scores[best] as i128);
    let w = (0..=MAX_WIDENINGS).find(|&w| dir.at_least(&achieved, &target(w))).ok_or_else(|| Error::Estimator {
        context: req.context.into(),
        achieved: achieved.to_string(),
        required: target(MAX_WIDENINGS).to_string(),
    })?;
    if w > 0 {
        c.warn(format!("{}: target widened {w}× over a {}-seed window", req.context, seeds.len()));
    }
    c.charge_sharded(seeds.len() as u64, req.context)?;
    c.tick(2);
    Ok(SeedChoice {
        seed: seeds[best].clone(),
        score: scores[best],
        expectation: None,
        target: target(w),
        widenings: w,
        method: SearchMethod::Window,
    })
}

/// Every seed of an enumerable family in index order, otherwise the
/// deterministic window (the same order `best_seed` scans).
pub fn candidate_seeds(family: &KWiseFamily, work_per_seed: u64, window: u64) -> (SearchMethod, Vec<Vec<u64>>) {
    let bits = family.seed_bits();
    if enumerable(family, work_per_seed) {
        (SearchMethod::BruteForce, (0..1u64 << bits).map(|i| family.seed_from_index(i).unwrap()).collect())
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ bits as u64);
        (SearchMethod::Window, (0..window.max(1)).map(|_| family.random_seed(&mut rng)).collect())
    }
}

/// The best seed without a target: exhaustive when the family is enumerable,
/// otherwise over the deterministic window. With `stop_at`, the first seed (in
/// enumeration order) reaching that score wins.
pub fn best_seed(
    c: &mut Cluster,
    req: SeedRequest<'_>,
    score: impl Fn(&[u64]) -> i64 + Sync,
    stop_at: Option<i64>,
) -> Result<SeedChoice> {
    let f = req.family;
    let dir = req.direction;
    let bits = f.seed_bits();
    c.note_family(f.domain, f.ell, f.k);
    let (count, method) = if enumerable(f, req.work_per_seed) {
        (1u64 << bits, SearchMethod::BruteForce)
    } else {
        (req.window.max(1), SearchMethod::Window)
    };
    let seed_at = |i: u64, rng: &mut Option<ChaCha8Rng>| match rng {
        None => f.seed_from_index(i).unwrap(),
        Some(r) => f.random_seed(r),
    };
    let mut rng = (method == SearchMethod::Window).then(|| ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ bits as u64));
    const CHUNK: u64 = 256;
    let mut best: Option<(Vec<u64>, i64)> = None;
    let mut total: i128 = 0;
    let mut start = 0;
    while start < count {
        let end = (start + CHUNK).min(count);
        let seeds: Vec<Vec<u64>> = (start..end).map(|i| seed_at(i, &mut rng)).collect();
        let scores: Vec<i64> = seeds.par_iter().map(|s| score(s)).collect();
        for (s, v) in seeds.into_iter().zip(scores) {
            total += v as i128;
            if best.as_ref().is_none_or(|(_, b)| dir.better(&v, b)) {
                best = Some((s, v));
            }
        }
        start = end;
        if let (Some(cap), Some((_, b))) = (stop_at, &best) {
            if dir.at_least(b, &cap) {
                break;
            }
        }
    }
    let (seed, score) = best.unwrap();
    let complete = method == SearchMethod::BruteForce && start == count;
    match method {
        SearchMethod::BruteForce if (1u64 << bits) <= c.s => charge_brute_force(c, bits, req.context)?,
        SearchMethod::BruteForce => charge_condexp(c, bits, chunk_bits_for(c), req.context)?,
        _ => {
            c.charge_sharded(start, req.context)?;
            c.tick(2);
        }
    }
    Ok(SeedChoice {
        seed,
        score,
        expectation: complete.then(|| Q::new(total, count as i128)),
        target: Q::from_integer(score as i128),
        widenings: 0,
        method,
    })
}
