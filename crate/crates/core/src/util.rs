/// ⌈log₂ x⌉ with ⌈log₂ 0⌉ = ⌈log₂ 1⌉ = 0.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// ⌊log₂ x⌋ for x ≥ 1.
pub fn floor_log2(x: u64) -> u32 {
    63 - x.max(1).leading_zeros()
}

/// ⌈x^e⌉ with a small tolerance so exact powers are not rounded up.
pub fn ceil_pow(x: f64, e: f64) -> u64 {
    let v = x.powf(e);
    let r = v.round();
    if (v - r).abs() < 1e-9 * r.max(1.0) {
        r as u64
    } else {
        v.ceil() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logs() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(floor_log2(5), 2);
        assert_eq!(ceil_pow(1024.0, 0.5), 32);
        assert_eq!(ceil_pow(1000.0, 0.5), 32);
        assert_eq!(ceil_pow(4096.0, 0.75), 512);
    }
}
