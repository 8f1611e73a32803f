//! The conjugation parameter t in [0,1) as an eventually periodic bit stream,
//! its sign accessors beta_k(t) and the derived modifier index m.

use crate::error::WalshError;

/// Convention for the sign attached to the DC (0th-frequency) term.
///
/// The kernel formula leaves the DC block unsigned, so the default uses
/// `beta_0 = +1`; the literal definition `beta_0 = (-1)^{t_0}` is kept
/// available because the martingale-side identities use it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Beta0Convention {
    #[default]
    KernelPlus,
    Literal,
}

/// t in [0,1) stored as preperiod + period bit lists.  An empty (or all-zero)
/// period means the expansion terminates, i.e. t is a dyadic rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugateParameter {
    preperiod: Vec<u8>,
    period: Vec<u8>,
}

impl ConjugateParameter {
    pub fn zero() -> Self {
        Self { preperiod: Vec::new(), period: Vec::new() }
    }

    pub fn from_bits(preperiod: Vec<u8>, period: Vec<u8>) -> Self {
        debug_assert!(preperiod.iter().chain(&period).all(|&b| b <= 1));
        let period = if period.iter().all(|&b| b == 0) { Vec::new() } else { period };
        Self { preperiod, period }
    }

    /// Binary expansion of p/q in [0,1) by long division, cycle detected on
    /// the remainder.  Dyadic denominators terminate in zeros.
    pub fn from_rational(p: u64, q: u64) -> Result<Self, WalshError> {
        if q == 0 {
            return Err(WalshError::ParseT("zero denominator".into()));
        }
        if p >= q {
            return Err(WalshError::ParseT(format!("{p}/{q} is not in [0,1)")));
        }
        let mut bits = Vec::new();
        let mut seen: Vec<(u64, usize)> = Vec::new();
        let mut r = p;
        loop {
            if r == 0 {
                return Ok(Self::from_bits(bits, Vec::new()));
            }
            if let Some(&(_, at)) = seen.iter().find(|&&(rem, _)| rem == r) {
                let period = bits.split_off(at);
                return Ok(Self::from_bits(bits, period));
            }
            seen.push((r, bits.len()));
            r *= 2;
            if r >= q {
                bits.push(1);
                r -= q;
            } else {
                bits.push(0);
            }
        }
    }

    /// Bit t_j for any j >= 0.
    pub fn bit(&self, j: u32) -> u8 {
        let j = j as usize;
        if j < self.preperiod.len() {
            self.preperiod[j]
        } else if self.period.is_empty() {
            0
        } else {
            self.period[(j - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn is_dyadic_rational(&self) -> bool {
        self.period.is_empty()
    }

    /// Sign of martingale level l: (-1)^{t_l}.
    pub fn level_sign(&self, l: u32) -> i64 {
        1 - 2 * self.bit(l) as i64
    }

    /// beta_k(t): the multiplier sign at frequency k.  For k >= 1 it is
    /// (-1)^{t_l} where 2^{l-1} <= k < 2^l; the k = 0 case depends on the
    /// convention.
    pub fn beta(&self, k: u64, conv: Beta0Convention) -> i64 {
        if k == 0 {
            return match conv {
                Beta0Convention::KernelPlus => 1,
                Beta0Convention::Literal => self.level_sign(0),
            };
        }
        let l = 64 - k.leading_zeros();
        self.level_sign(l)
    }

    /// The modifier index m = sum over i < cap of t_{i+1} 2^i < 2^cap.
    pub fn modifier(&self, cap: u32) -> ModifierIndex {
        let mut m = 0u64;
        for i in 0..cap {
            m |= (self.bit(i + 1) as u64) << i;
        }
        ModifierIndex { m, level: cap }
    }

    /// The first `len` bits as a 0/1 digest string.
    pub fn digest(&self, len: u32) -> String {
        (0..len).map(|j| if self.bit(j) == 1 { '1' } else { '0' }).collect()
    }
}

/// The modifier m derived from t at a given level N; satisfies m < 2^N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModifierIndex {
    m: u64,
    level: u32,
}

impl ModifierIndex {
    pub fn value(self) -> u64 {
        self.m
    }
    pub fn level(self) -> u32 {
        self.level
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_rational_terminates() {
        let t = ConjugateParameter::from_rational(5, 8).unwrap();
        assert!(t.is_dyadic_rational());
        assert_eq!((0..5).map(|j| t.bit(j)).collect::<Vec<_>>(), vec![1, 0, 1, 0, 0]);
    }

    #[test]
    fn one_third_is_periodic() {
        let t = ConjugateParameter::from_rational(1, 3).unwrap();
        assert!(!t.is_dyadic_rational());
        for j in 0..20 {
            assert_eq!(t.bit(j), (j % 2) as u8, "j={j}");
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(ConjugateParameter::from_rational(1, 0).is_err());
        assert!(ConjugateParameter::from_rational(3, 3).is_err());
        assert!(ConjugateParameter::from_rational(4, 3).is_err());
    }

    #[test]
    fn beta_block_structure() {
        let t = ConjugateParameter::from_rational(1, 3).unwrap();
        // Blocks: k=0 | k=1 | k=2..3 | k=4..7 ...
        assert_eq!(t.beta(0, Beta0Convention::KernelPlus), 1);
        assert_eq!(t.beta(0, Beta0Convention::Literal), 1); // t_0 = 0
        assert_eq!(t.beta(1, Beta0Convention::KernelPlus), -1); // t_1 = 1
        assert_eq!(t.beta(2, Beta0Convention::KernelPlus), 1); // t_2 = 0
        assert_eq!(t.beta(3, Beta0Convention::KernelPlus), 1);
        assert_eq!(t.beta(4, Beta0Convention::KernelPlus), -1); // t_3 = 1
        assert_eq!(t.beta(7, Beta0Convention::KernelPlus), -1);
    }

    #[test]
    fn modifier_examples() {
        let zero = ConjugateParameter::zero();
        for cap in 0..10 {
            assert_eq!(zero.modifier(cap).value(), 0);
        }
        let quarter = ConjugateParameter::from_rational(1, 4).unwrap();
        assert_eq!(quarter.modifier(1).value(), 1);
        let third = ConjugateParameter::from_rational(1, 3).unwrap();
        assert_eq!(third.modifier(4).value(), 5);
        assert_eq!(third.modifier(0).value(), 0);
    }
}
