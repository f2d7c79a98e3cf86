//! Exact comparisons of products and quotients of measures.

use std::cmp::Ordering;

/// `a · b` as a 256-bit `(high, low)` pair.
pub(crate) fn wide_mul(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let lo = (p00 & MASK) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Compares `n1 / d1` with `n2 / d2` for positive denominators.
pub(crate) fn cmp_fractions(n1: u128, d1: u128, n2: u128, d2: u128) -> Ordering {
    wide_mul(n1, d2).cmp(&wide_mul(n2, d1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wide_mul_matches_small_products() {
        assert_eq!(wide_mul(7, 9), (0, 63));
        assert_eq!(wide_mul(u128::MAX, 2), (1, u128::MAX - 1));
        assert_eq!(wide_mul(1 << 64, 1 << 64), (1, 0));
        assert!(wide_mul(u128::MAX, u128::MAX) > wide_mul(u128::MAX, u128::MAX - 1));
    }

    #[test]
    fn fraction_order() {
        assert_eq!(cmp_fractions(1, 3, 2, 6), Ordering::Equal);
        assert_eq!(cmp_fractions(1, 3, 1, 2), Ordering::Less);
        assert_eq!(cmp_fractions(u128::MAX, 3, u128::MAX - 1, 3), Ordering::Greater);
    }
}
