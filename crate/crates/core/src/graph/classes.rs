//! Doubly-exponential degree classes Δ_i = 2^(2^i).

/// Δ_i = 2^(2^i), saturating at `u128::MAX` from i = 7 on.
pub fn delta_i(i: u32) -> u128 {
    if i >= 7 {
        u128::MAX
    } else {
        1u128 << (1u32 << i)
    }
}

/// √Δ_i = 2^(2^(i-1)): the β-high threshold for class i (1 for i = 0).
pub fn high_threshold(i: u32) -> u128 {
    if i == 0 {
        1
    } else {
        delta_i(i - 1)
    }
}

/// β = Δ_i^{1/16}, floored, and at least 1.
pub fn beta_of(i: u32) -> u128 {
    if i < 4 {
        1
    } else {
        delta_i(i - 4)
    }
}

/// Smallest class whose Δ_i reaches max(λ, 2)^16.
pub fn i_min(lambda: u64) -> u32 {
    let base = lambda.max(2) as u128;
    (4..).find(|&i| beta_of(i) >= base).unwrap()
}

/// ⌈log₂ log₂ Δ⌉, i.e. the smallest i with Δ_i ≥ Δ.
pub fn i_max(max_degree: u64) -> u32 {
    (0..).find(|&i| delta_i(i) >= max_degree as u128).unwrap()
}

/// Smallest i ≥ i_min with deg ≤ Δ_i.
pub fn degree_class(deg: u64, i_min: u32) -> u32 {
    (i_min..).find(|&i| delta_i(i) >= deg as u128).unwrap()
}

/// ⌊x^{1/k}⌋ computed exactly.
pub fn integer_root(x: u64, k: u32) -> u64 {
    if k <= 1 || x <= 1 {
        return x;
    }
    let mut r = (x as f64).powf(1.0 / k as f64).round() as u64;
    let fits = |r: u64| r.checked_pow(k).is_some_and(|p| p <= x);
    while r > 0 && !fits(r) {
        r -= 1;
    }
    while fits(r + 1) {
        r += 1;
    }
    r
}
