//! Binary-expansion combinatorics of frequency indices: the variation V(n),
//! the transition set A(n), the cross set T(n,m), the partial-weight alpha
//! numbers and the duplicate-bit reduction n(e).
//!
//! Throughout, the phantom bit below position 0 is zero: `n_{-1} = 0` and
//! `m_{-1} = 0`.  With that convention `V(n) = |A(n)|` exactly.

use crate::error::WalshError;
use crate::scalar::{rat_dyadic, Rat};

/// A positive frequency index with binary-expansion accessors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FrequencyIndex(u64);

impl FrequencyIndex {
    pub fn new(value: u64) -> Result<Self, WalshError> {
        if value == 0 {
            return Err(WalshError::ZeroFrequency);
        }
        Ok(Self(value))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// The level N with `2^N <= n < 2^{N+1}`.
    pub fn msb(self) -> u32 {
        63 - self.0.leading_zeros()
    }

    /// Bit `n_k`, with `n_{-1} = 0`.
    pub fn bit(self, k: i64) -> u64 {
        bit_of(self.0, k)
    }

    /// V(n): the number of bit transitions, counting the leading descent and
    /// the `n_0` term.
    pub fn variation(self) -> u32 {
        let n = self.0 as u128;
        (n ^ (n << 1)).count_ones()
    }

    /// A(n) = { i >= 0 : n_i != n_{i-1} }, in increasing order.  The largest
    /// member is N+1.
    pub fn transition_levels(self) -> Vec<u32> {
        let mut t = (self.0 as u128) ^ ((self.0 as u128) << 1);
        let mut out = Vec::with_capacity(t.count_ones() as usize);
        while t != 0 {
            let i = t.trailing_zeros();
            out.push(i);
            t &= t - 1;
        }
        out
    }

    /// alpha_j(n) = | sum_{k<j} n_k 2^k  -  n_j 2^j |.
    pub fn alpha(self, j: u32) -> u64 {
        alpha_of(self.0, j)
    }

    /// S(n) = sum over i in A(n) of alpha_i(n) / 2^{i+1}, exactly.
    pub fn weighted_sum_s(self) -> Rat {
        let top = self.msb() + 1;
        // Common denominator 2^{top+1}; every term alpha_i / 2^{i+1} scales to
        // an integer because alpha_i <= 2^i.
        let mut num: i128 = 0;
        for i in self.transition_levels() {
            num += (self.alpha(i) as i128) << (top - i);
        }
        rat_dyadic(num, top + 1)
    }

    /// Whether `e` is an admissible duplicate-bit deletion level:
    /// `n_e = n_{e-1}` and `n_e != n_{e+1}` (the top of a run of length >= 2).
    pub fn reducible_at(self, e: u32) -> bool {
        let e = e as i64;
        self.bit(e) == self.bit(e - 1) && self.bit(e) != self.bit(e + 1)
    }

    /// n(e): delete bit position `e` and shift the lower bits up one place
    /// (a zero is appended at the bottom).  Preserves V(n).
    pub fn reduce_bit(self, e: u32) -> Result<Self, WalshError> {
        if !self.reducible_at(e) {
            return Err(WalshError::BadReduction { n: self.0, level: e });
        }
        let high = (self.0 >> (e + 1)) << (e + 1);
        let low = self.0 & ((1u64 << e) - 1);
        Self::new(high | (low << 1))
    }

    /// Apply productive reductions until none remains.  The fixpoint is an
    /// alternating pattern followed by trailing zeros, with the same V.
    pub fn reduce_to_alternating(self) -> Self {
        let mut n = self;
        loop {
            let mut progressed = false;
            for e in (0..=n.msb()).rev() {
                if n.reducible_at(e) {
                    let next = n.reduce_bit(e).expect("admissible");
                    if next != n {
                        n = next;
                        progressed = true;
                        break;
                    }
                }
            }
            if !progressed {
                return n;
            }
        }
    }

    /// True when, after stripping trailing zeros, no two adjacent bits agree.
    pub fn is_alternating(self) -> bool {
        let u = self.0 >> self.0.trailing_zeros();
        (u ^ (u >> 1)) == (1u64 << (64 - u.leading_zeros())) - 1
    }
}

fn bit_of(v: u64, k: i64) -> u64 {
    if !(0..64).contains(&k) {
        0
    } else {
        (v >> k) & 1
    }
}

/// alpha_j for a possibly-zero index (alpha_j(0) = 0).
pub fn alpha_of(v: u64, j: u32) -> u64 {
    if j >= 64 {
        return v;
    }
    let low = (v & ((1u64 << j) - 1)) as i64;
    let top = (((v >> j) & 1) << j) as i64;
    (low - top).unsigned_abs()
}

/// T(a,b) = { i in 0..cap : a_i != a_{i-1}, b_i = b_{i-1} }, with the
/// `_{-1} = 0` convention.  `b` may be zero.
pub fn transition_set(a: u64, b: u64, cap: u32) -> Vec<u32> {
    let mut out = Vec::new();
    for i in 0..cap {
        let i = i as i64;
        if bit_of(a, i) != bit_of(a, i - 1) && bit_of(b, i) == bit_of(b, i - 1) {
            out.push(i as u32);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    fn fi(n: u64) -> FrequencyIndex {
        FrequencyIndex::new(n).unwrap()
    }

    #[test]
    fn rejects_zero() {
        assert_eq!(FrequencyIndex::new(0), Err(WalshError::ZeroFrequency));
    }

    #[test]
    fn variation_examples() {
        assert_eq!(fi(1).variation(), 2);
        for k in 1..20 {
            assert_eq!(fi(1 << k).variation(), 2);
        }
        assert_eq!(fi(5).variation(), 4);
    }

    #[test]
    fn variation_equals_transition_count() {
        for n in 1u64..1 << 12 {
            let f = fi(n);
            // Independent route: count i with n_i != n_{i-1} directly.
            let mut count = 0;
            for i in 0..=(f.msb() as i64 + 1) {
                if f.bit(i) != f.bit(i - 1) {
                    count += 1;
                }
            }
            assert_eq!(f.variation(), count, "n={n}");
            assert_eq!(f.transition_levels().len() as u32, count, "n={n}");
        }
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(fi(5).alpha(2), 3);
        for j in 0..10 {
            assert_eq!(fi(1 << 10).alpha(j), 0);
        }
        assert_eq!(fi(1).alpha(0), 1);
    }

    #[test]
    fn alpha_bounds() {
        for n in 1u64..1 << 10 {
            let f = fi(n);
            let a: Vec<u32> = f.transition_levels();
            for j in 0..=f.msb() + 1 {
                let v = f.alpha(j);
                assert!(v <= 1 << j);
                if a.contains(&j) {
                    assert!(j == 0 || v >= 1 << (j - 1), "n={n} j={j}");
                } else if j > 0 {
                    assert!(v <= 1 << (j - 1), "n={n} j={j}");
                }
                // alpha is constant across a non-transition step.
                if j <= f.msb() && f.bit(j as i64) == f.bit(j as i64 + 1) {
                    assert_eq!(f.alpha(j + 1), v);
                }
            }
        }
    }

    #[test]
    fn transition_set_examples() {
        assert_eq!(transition_set(5, 2, 2), vec![0]);
        assert_eq!(transition_set(1 << 8, 0, 8), Vec::<u32>::new());
        assert_eq!(transition_set(5, 0, 2), vec![0, 1]);
    }

    #[test]
    fn transition_set_disjoint_from_a_of_m() {
        for n in 1u64..1 << 10 {
            let nn = fi(n).msb();
            for m in 1u64..1 << 10 {
                let t = transition_set(n, m, nn);
                let am = fi(m).transition_levels();
                assert!(t.iter().all(|i| !am.contains(i)), "n={n} m={m}");
                assert!(t.len() as u32 <= fi(n).variation());
            }
        }
    }

    #[test]
    fn weighted_sum_examples() {
        // Powers of two (n = 1 included): A = {k, k+1}, alpha_k = alpha_{k+1}
        // = 2^k, so S = 1/2 + 1/4.
        for k in 0..12 {
            assert_eq!(fi(1 << k).weighted_sum_s(), rat(3, 4));
        }
        // Alternating pattern: S = 2s/3 + (1 - 4^{-s})/9.
        for s in 1u32..=12 {
            let mut n = 0u64;
            for m in 1..=s {
                n |= 1 << (2 * m - 1);
            }
            let expect = rat(2 * s as i64, 3) + rat(1, 9) * (rat(1, 1) - rat(1, 1 << (2 * s)));
            assert_eq!(fi(n).weighted_sum_s(), expect, "s={s}");
        }
    }

    #[test]
    fn reduction_preserves_variation_and_shrinks_s() {
        for n in 1u64..1 << 12 {
            let f = fi(n);
            for e in 0..=f.msb() {
                if f.reducible_at(e) {
                    let r = f.reduce_bit(e).unwrap();
                    assert_eq!(r.variation(), f.variation(), "n={n} e={e}");
                    assert!(f.weighted_sum_s() >= r.weighted_sum_s(), "n={n} e={e}");
                }
            }
        }
    }

    #[test]
    fn reduction_rejects_bad_level() {
        // 12 = 1100: position 2 is not the top of a run.
        assert!(fi(12).reduce_bit(2).is_err());
        assert_eq!(fi(12).reduce_bit(3).unwrap(), fi(8));
    }

    #[test]
    fn reduction_chain_terminates_alternating() {
        let f = fi(19);
        let fixed = f.reduce_to_alternating();
        assert!(fixed.is_alternating(), "got {:b}", fixed.value());
        assert_eq!(fixed.variation(), f.variation());
        for n in 1u64..1 << 10 {
            let f = fi(n);
            let fixed = f.reduce_to_alternating();
            assert!(fixed.is_alternating(), "n={n} -> {:b}", fixed.value());
            assert_eq!(fixed.variation(), f.variation(), "n={n}");
            assert!(f.weighted_sum_s() >= fixed.weighted_sum_s(), "n={n}");
        }
    }

    proptest! {
        #[test]
        fn s_lower_bound_by_variation(n in 1u64..(1 << 20)) {
            let f = fi(n);
            prop_assert!(f.weighted_sum_s() * rat(3, 1) >= rat(f.variation() as i64, 1));
        }

        #[test]
        fn alpha_matches_defining_sum(n in 1u64..(1 << 16), j in 0u32..20) {
            let f = fi(n);
            let mut low: i64 = 0;
            for k in 0..j {
                low += (f.bit(k as i64) as i64) << k;
            }
            let expect = (low - ((f.bit(j as i64) as i64) << j)).unsigned_abs();
            prop_assert_eq!(f.alpha(j), expect);
        }
    }
}
