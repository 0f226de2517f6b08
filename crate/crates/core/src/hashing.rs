//! k-wise independent hash families: degree-(k−1) polynomials over GF(2^b),
//! truncated to the low ℓ output bits.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::util::ceil_log2;

/// Low-order terms of the lexicographically smallest irreducible polynomial
/// x^b + … over GF(2), indexed by b − 1.
const IRREDUCIBLE: [u64; 63] = [
    1, 3, 3, 3, 5, 3, 3, 27, 3, 9, 5, 9, 27, 33, 3, 43, 9, 9, 39, 9, 5, 3, 33, 27, 9, 27, 39, 3, 5, 3, 9, 141, 75, 27,
    5, 53, 63, 99, 17, 57, 9, 39, 89, 33, 27, 3, 33, 45, 113, 29, 75, 9, 71, 125, 71, 149, 17, 99, 123, 3, 39, 105, 3,
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KWiseFamily {
    /// Domain size N.
    pub domain: u64,
    /// Output bits ℓ.
    pub ell: u32,
    /// Independence k.
    pub k: u32,
    /// Field size in bits.
    pub b: u32,
    poly: u64,
}

impl KWiseFamily {
    pub fn new(domain: u64, ell: u32, k: u32) -> Result<KWiseFamily> {
        if domain == 0 || ell == 0 || k == 0 {
            return Err(Error::InvalidArgument(format!("family needs N, ℓ, k ≥ 1 (got {domain}, {ell}, {k})")));
        }
        let b = ceil_log2(domain).max(ell);
        if b > 63 {
            return Err(Error::Unsupported(format!("field of {b} bits exceeds 63")));
        }
        Ok(KWiseFamily { domain, ell, k, b, poly: IRREDUCIBLE[b as usize - 1] })
    }

    pub fn seed_bits(&self) -> u32 {
        self.k * self.b
    }

    fn mask(&self) -> u64 {
        (1u64 << self.b) - 1
    }

    /// Multiplication in GF(2^b).
    pub fn mul(&self, mut x: u64, mut y: u64) -> u64 {
        let top = 1u64 << (self.b - 1);
        let mut acc = 0;
        while y != 0 {
            if y & 1 == 1 {
                acc ^= x;
            }
            y >>= 1;
            let carry = x & top != 0;
            x = (x << 1) & self.mask();
            if carry {
                x ^= self.poly;
            }
        }
        acc
    }

    /// Coefficients c_0..c_{k−1} of seed index `s`, with c_{k−1} in the most significant bits.
    pub fn seed_from_index(&self, s: u64) -> Result<Vec<u64>> {
        if self.seed_bits() > 64 {
            return Err(Error::EnumerationBudget { bits: self.seed_bits(), budget: 64 });
        }
        if self.seed_bits() < 64 && s >> self.seed_bits() != 0 {
            return Err(Error::InvalidArgument(format!("seed index {s} exceeds {} bits", self.seed_bits())));
        }
        Ok((0..self.k).map(|j| (s >> (j * self.b)) & self.mask()).collect())
    }

    pub fn random_seed(&self, rng: &mut impl Rng) -> Vec<u64> {
        (0..self.k).map(|_| rng.gen::<u64>() & self.mask()).collect()
    }

    pub fn eval(&self, seed: &[u64], x: u64) -> Result<u64> {
        if seed.len() != self.k as usize || seed.iter().any(|&c| c > self.mask()) {
            return Err(Error::InvalidArgument(format!("seed must be {} coefficients of {} bits", self.k, self.b)));
        }
        if x >= self.domain {
            return Err(Error::InvalidArgument(format!("point {x} outside domain {}", self.domain)));
        }
        Ok(self.eval_unchecked(seed, x))
    }

    /// Horner evaluation; the caller guarantees a well-formed seed and point.
    pub fn eval_unchecked(&self, seed: &[u64], x: u64) -> u64 {
        let mut acc = 0;
        for &c in seed.iter().rev() {
            acc = self.mul(acc, x) ^ c;
        }
        acc & ((1u64 << self.ell) - 1)
    }

    /// Evaluates the seed on every point of the domain (for N small enough to table).
    pub fn table(&self, seed: &[u64]) -> Vec<u64> {
        (0..self.domain).map(|x| self.eval_unchecked(seed, x)).collect()
    }
}

/// Exhaustively checks that the joint output on `points` is uniform over all seeds.
/// More than k points are allowed, to probe where independence breaks.
pub fn verify_kwise(f: &KWiseFamily, points: &[u64]) -> Result<bool> {
    if let Some(&x) = points.iter().find(|&&x| x >= f.domain) {
        return Err(Error::InvalidArgument(format!("point {x} outside domain {}", f.domain)));
    }
    if f.seed_bits() > 24 {
        return Err(Error::EnumerationBudget { bits: f.seed_bits(), budget: 24 });
    }
    let out_bits = f.ell as usize * points.len();
    if out_bits > f.seed_bits() as usize {
        return Ok(false);
    }
    let mut counts = vec![0u64; 1 << out_bits];
    for s in 0..1u64 << f.seed_bits() {
        let seed = f.seed_from_index(s)?;
        let mut key = 0usize;
        for &x in points {
            key = (key << f.ell) | f.eval_unchecked(&seed, x) as usize;
        }
        counts[key] += 1;
    }
    Ok(counts.iter().all(|&c| c == counts[0]))
}

/// Pr[|X − μ| ≥ εμ] ≤ 8·(2k/(ε²μ))^{k/2} for k-wise independent indicators.
pub fn tail_bound(k: u32, mu: f64, eps: f64) -> Result<f64> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::InvalidArgument(format!("k={k} must be even and ≥ 4")));
    }
    if eps <= 0.0 {
        return Err(Error::InvalidArgument("ε must be positive".into()));
    }
    if mu < k as f64 {
        return Err(Error::BoundInapplicable(format!("μ={mu} < k={k}")));
    }
    Ok(8.0 * (2.0 * k as f64 / (eps * eps * mu)).powf(k as f64 / 2.0))
}

/// Pairwise-independent full-deviation bound 1/μ.
pub fn chebyshev_bound(mu: f64) -> f64 {
    1.0 / mu
}
