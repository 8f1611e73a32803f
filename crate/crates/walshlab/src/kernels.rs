//! Dirichlet, conjugate Dirichlet, Fejér and conjugate Fejér kernels, and the
//! corresponding partial-sum / mean operators.
//!
//! Each kernel has a closed-form (or spectral-multiplier) construction; the
//! direct summation route lives in the tests as the independent oracle.

use crate::cylinder::{fwht_forward, fwht_inverse, walsh_sign, CylinderFunction, Spectrum};
use crate::error::WalshError;
use crate::param::{Beta0Convention, ConjugateParameter};
use crate::scalar::Scalar;

fn msb(n: u64) -> u32 {
    63 - n.leading_zeros()
}

/// Closed-form Dirichlet kernel value at cylinder c, as an integer.
///
/// On I_j \ I_{j+1} the kernel is `w_n(x) (sum_{k<j} n_k 2^k - n_j 2^j)`;
/// on the deepest cell it equals n.
pub(crate) fn dirichlet_value(n: u64, c: u64) -> i64 {
    if n == 0 {
        return 0;
    }
    if c == 0 {
        return n as i64;
    }
    let j = c.trailing_zeros();
    let low = (n & ((1u64 << j) - 1)) as i64;
    let top = (((n >> j) & 1) << j) as i64;
    walsh_sign(n, c) * (low - top)
}

/// Conjugate Dirichlet kernel value at cylinder c, as an integer:
/// `D_n - 2 w_m D_m - 2 t_{N+1} (D_n - D_{2^N})`.
pub(crate) fn conjugate_dirichlet_value(n: u64, t: &ConjugateParameter, c: u64) -> i64 {
    let nn = msb(n);
    let m = t.modifier(nn).value();
    let dn = dirichlet_value(n, c);
    let dm = dirichlet_value(m, c);
    let d2n = if c & ((1u64 << nn) - 1) == 0 { 1i64 << nn } else { 0 };
    dn - 2 * walsh_sign(m, c) * dm - 2 * (t.bit(nn + 1) as i64) * (dn - d2n)
}

fn require_depth(depth: u32, need: u32) -> Result<(), WalshError> {
    if depth < need {
        return Err(WalshError::DepthTooSmall { depth, need });
    }
    Ok(())
}

/// D_n at the given depth (needs depth >= |n|+1 to be exactly resolved).
pub fn dirichlet<S: Scalar>(n: u64, depth: u32) -> Result<CylinderFunction<S>, WalshError> {
    if n == 0 {
        return Err(WalshError::ZeroFrequency);
    }
    require_depth(depth, msb(n) + 1)?;
    let values = (0..1u64 << depth).map(|c| S::from_int(dirichlet_value(n, c))).collect();
    CylinderFunction::from_values(depth, values)
}

/// The conjugate Dirichlet kernel of order n for parameter t.
pub fn conjugate_dirichlet<S: Scalar>(
    n: u64,
    t: &ConjugateParameter,
    depth: u32,
) -> Result<CylinderFunction<S>, WalshError> {
    if n == 0 {
        return Err(WalshError::ZeroFrequency);
    }
    require_depth(depth, msb(n) + 1)?;
    let values = (0..1u64 << depth).map(|c| S::from_int(conjugate_dirichlet_value(n, t, c))).collect();
    CylinderFunction::from_values(depth, values)
}

/// K_n = (1/n) sum_{k<n} D_k, built from its spectrum `(n-1-j)/n` on j <= n-1.
pub fn fejer_kernel<S: Scalar>(n: u64, depth: u32) -> Result<CylinderFunction<S>, WalshError> {
    if n == 0 {
        return Err(WalshError::ZeroFrequency);
    }
    require_depth(depth, msb(n) + 1)?;
    let coeffs = (0..1u64 << depth)
        .map(|j| if j < n { S::from_ratio((n - 1 - j) as i64, n as i64) } else { S::zero() })
        .collect();
    Ok(fwht_inverse(&Spectrum::from_coeffs(depth, coeffs)?))
}

/// The conjugate Fejér kernel `(1/n) sum_{k<n} D~_k` (with `D~_0 := 0`);
/// its spectrum is `beta_j(t) (n-1-j)/n` at j <= n-1.
pub fn conjugate_fejer_kernel<S: Scalar>(
    n: u64,
    t: &ConjugateParameter,
    depth: u32,
    conv: Beta0Convention,
) -> Result<CylinderFunction<S>, WalshError> {
    if n == 0 {
        return Err(WalshError::ZeroFrequency);
    }
    require_depth(depth, msb(n) + 1)?;
    let coeffs = (0..1u64 << depth)
        .map(|j| {
            if j < n {
                S::from_ratio(t.beta(j, conv) * (n - 1 - j) as i64, n as i64)
            } else {
                S::zero()
            }
        })
        .collect();
    Ok(fwht_inverse(&Spectrum::from_coeffs(depth, coeffs)?))
}

/// S_M f: truncation of the Walsh series after M terms.
pub fn partial_sum<S: Scalar>(f: &CylinderFunction<S>, m: u64) -> Result<CylinderFunction<S>, WalshError> {
    if m > 1u64 << f.depth() {
        return Err(WalshError::IndexOutOfRange { index: m, depth: f.depth() });
    }
    let s = fwht_forward(f);
    let truncated = s.map_indexed(|j, v| if j < m { v.clone() } else { S::zero() });
    Ok(fwht_inverse(&truncated))
}

/// The conjugate partial sum: `sum_{k<n} beta_k(t) f^(k) w_k`.
pub fn conjugate_partial_sum<S: Scalar>(
    f: &CylinderFunction<S>,
    n: u64,
    t: &ConjugateParameter,
    conv: Beta0Convention,
) -> Result<CylinderFunction<S>, WalshError> {
    if n > 1u64 << f.depth() {
        return Err(WalshError::IndexOutOfRange { index: n, depth: f.depth() });
    }
    let s = fwht_forward(f);
    let twisted = s.map_indexed(|j, v| {
        if j < n {
            v.clone() * S::from_int(t.beta(j, conv))
        } else {
            S::zero()
        }
    });
    Ok(fwht_inverse(&twisted))
}

/// The conjugate Fejér mean via its spectral multiplier
/// `beta_j(t) (n-1-j)/n` on j < n.
pub fn conjugate_fejer_mean<S: Scalar>(
    f: &CylinderFunction<S>,
    n: u64,
    t: &ConjugateParameter,
    conv: Beta0Convention,
) -> Result<CylinderFunction<S>, WalshError> {
    if n == 0 {
        return Err(WalshError::ZeroFrequency);
    }
    let s = fwht_forward(f);
    let twisted = s.map_indexed(|j, v| {
        if j < n {
            v.clone() * S::from_ratio(t.beta(j, conv) * (n - 1 - j) as i64, n as i64)
        } else {
            S::zero()
        }
    });
    Ok(fwht_inverse(&twisted))
}

/// The plain Fejér mean, `sigma_n f`.
pub fn fejer_mean<S: Scalar>(f: &CylinderFunction<S>, n: u64) -> Result<CylinderFunction<S>, WalshError> {
    conjugate_fejer_mean(f, n, &ConjugateParameter::zero(), Beta0Convention::KernelPlus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinder::walsh;
    use crate::scalar::{rat, Rat};
    use num::traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t_from_bits(bits: &[u8]) -> ConjugateParameter {
        ConjugateParameter::from_bits(bits.to_vec(), Vec::new())
    }

    /// Direct Walsh summation oracle for D_n.
    fn dirichlet_direct(n: u64, depth: u32) -> CylinderFunction<Rat> {
        let values = (0..1u64 << depth)
            .map(|c| {
                let s: i64 = (0..n).map(|k| walsh(k, depth, c).unwrap()).sum();
                Rat::from_int(s)
            })
            .collect();
        CylinderFunction::from_values(depth, values).unwrap()
    }

    #[test]
    fn dirichlet_power_of_two_is_block() {
        for k in 0..5u32 {
            let d: CylinderFunction<Rat> = dirichlet(1 << k, 6).unwrap();
            for c in 0..1u64 << 6 {
                let expect = if c & ((1 << k) - 1) == 0 { 1i64 << k } else { 0 };
                assert_eq!(*d.value(c), Rat::from_int(expect));
            }
        }
    }

    #[test]
    fn dirichlet_three_values() {
        let d: CylinderFunction<Rat> = dirichlet(3, 2).unwrap();
        // Cylinders 00, 10, 01, 11 are indices 0, 1, 2, 3.
        let got: Vec<i64> = (0..4).map(|c| d.value(c).to_f64() as i64).collect();
        assert_eq!(got, vec![3, 1, 1, -1]);
    }

    #[test]
    fn dirichlet_closed_form_matches_direct_sum() {
        for n in 1u64..1 << 7 {
            let depth = msb(n) + 1;
            let closed: CylinderFunction<Rat> = dirichlet(n, depth).unwrap();
            assert_eq!(closed, dirichlet_direct(n, depth), "n={n}");
        }
    }

    #[test]
    fn dirichlet_five_on_middle_shell() {
        let d: CylinderFunction<Rat> = dirichlet(5, 3).unwrap();
        // I_1 \ I_2: cylinders with x_0=0, x_1=1.
        for c in [2u64, 6] {
            assert_eq!(d.value(c).abs_val(), Rat::from_int(1));
        }
    }

    #[test]
    fn conjugate_dirichlet_reduces_at_zero() {
        let zero = ConjugateParameter::zero();
        for n in 1u64..64 {
            let a: CylinderFunction<Rat> = conjugate_dirichlet(n, &zero, msb(n) + 1).unwrap();
            let b: CylinderFunction<Rat> = dirichlet(n, msb(n) + 1).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn conjugate_dirichlet_order_one_is_constant() {
        for bits in [[0u8, 0], [1, 0], [0, 1], [1, 1]] {
            let t = t_from_bits(&bits);
            let d: CylinderFunction<Rat> = conjugate_dirichlet(1, &t, 3).unwrap();
            assert!(d.values().iter().all(|v| *v == Rat::from_int(1)));
        }
    }

    #[test]
    fn conjugate_dirichlet_two_quarter() {
        let t = ConjugateParameter::from_rational(1, 4).unwrap();
        let d: CylinderFunction<Rat> = conjugate_dirichlet(2, &t, 2).unwrap();
        // D~ = 1 - w_1: cylinder x_0=0 -> 0, x_0=1 -> 2.
        assert_eq!(*d.value(0), Rat::zero());
        assert_eq!(*d.value(1), Rat::from_int(2));
        assert_eq!(*d.value(2), Rat::zero());
        assert_eq!(*d.value(3), Rat::from_int(2));
    }

    #[test]
    fn conjugate_dirichlet_signed_block_form_agrees() {
        // Oracle: 1 + sum (-1)^{t_{i+1}} (D_{2^{i+1}} - D_{2^i})
        //           + (-1)^{t_{N+1}} (D_n - D_{2^N}).
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1u64..1 << 6 {
            let nn = msb(n);
            let depth = nn + 1;
            for _ in 0..8 {
                let bits: Vec<u8> = (0..nn + 2).map(|_| rng.gen_range(0..=1)).collect();
                let t = t_from_bits(&bits);
                let subtracted: CylinderFunction<Rat> = conjugate_dirichlet(n, &t, depth).unwrap();
                let mut blocks: CylinderFunction<Rat> = CylinderFunction::constant(depth, rat(1, 1)).unwrap();
                for i in 0..nn {
                    let hi: CylinderFunction<Rat> = dirichlet(1 << (i + 1), depth).unwrap();
                    let lo: CylinderFunction<Rat> = dirichlet(1 << i, depth).unwrap();
                    let sign = Rat::from_int(t.level_sign(i + 1));
                    blocks = blocks.add(&hi.sub(&lo).unwrap().scale(sign)).unwrap();
                }
                let dn: CylinderFunction<Rat> = dirichlet(n, depth).unwrap();
                let d2n: CylinderFunction<Rat> = dirichlet(1 << nn, depth).unwrap();
                let sign = Rat::from_int(t.level_sign(nn + 1));
                blocks = blocks.add(&dn.sub(&d2n).unwrap().scale(sign)).unwrap();
                assert_eq!(subtracted, blocks, "n={n} bits={bits:?}");
            }
        }
    }

    #[test]
    fn fejer_kernel_small_cases() {
        let k1: CylinderFunction<Rat> = fejer_kernel(1, 2).unwrap();
        assert!(k1.values().iter().all(|v| v.is_zero()));
        let k2: CylinderFunction<Rat> = fejer_kernel(2, 2).unwrap();
        assert!(k2.values().iter().all(|v| *v == rat(1, 2)));
    }

    #[test]
    fn fejer_kernel_matches_dirichlet_average() {
        for n in 1u64..64 {
            let depth = msb(n) + 1;
            let k: CylinderFunction<Rat> = fejer_kernel(n, depth).unwrap();
            let mut acc: CylinderFunction<Rat> = CylinderFunction::zero(depth).unwrap();
            for j in 1..n {
                acc = acc.add(&dirichlet(j, depth).unwrap()).unwrap();
            }
            assert_eq!(k, acc.scale(rat(1, n as i64)), "n={n}");
        }
    }

    #[test]
    fn conjugate_fejer_kernel_direct_summation_agrees() {
        let depth = 7;
        let t = ConjugateParameter::from_rational(1, 3).unwrap();
        for n in 1u64..=64 {
            let spectral: CylinderFunction<Rat> =
                conjugate_fejer_kernel(n, &t, depth, Beta0Convention::KernelPlus).unwrap();
            let mut acc: CylinderFunction<Rat> = CylinderFunction::zero(depth).unwrap();
            for k in 1..n {
                acc = acc.add(&conjugate_dirichlet(k, &t, depth).unwrap()).unwrap();
            }
            assert_eq!(spectral, acc.scale(rat(1, n as i64)), "n={n}");
        }
    }

    #[test]
    fn conjugate_fejer_kernel_multiplier_identity() {
        let t = ConjugateParameter::from_rational(5, 8).unwrap();
        let n = 23u64;
        let depth = 6;
        let k: CylinderFunction<Rat> = conjugate_fejer_kernel(n, &t, depth, Beta0Convention::KernelPlus).unwrap();
        let s = fwht_forward(&k);
        for j in 0..1u64 << depth {
            let expect = if j < n {
                rat(
                    t.beta(j, Beta0Convention::KernelPlus) * (n - 1 - j) as i64,
                    n as i64,
                )
            } else {
                Rat::zero()
            };
            assert_eq!(*s.coeff(j), expect, "j={j}");
        }
    }

    #[test]
    fn partial_sum_behaviour() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let vals: Vec<i64> = (0..64).map(|_| rng.gen_range(-4..=4)).collect();
        let f: CylinderFunction<Rat> = CylinderFunction::from_ints(6, &vals).unwrap();
        assert_eq!(partial_sum(&f, 64).unwrap(), f);
        // S_{2^k} is the depth-k block average.
        let e2 = partial_sum(&f, 4).unwrap();
        for c in 0..64u64 {
            let base = c & 3;
            let mut acc = Rat::zero();
            for cc in 0..64u64 {
                if cc & 3 == base {
                    acc = acc + f.value(cc).clone();
                }
            }
            assert_eq!(*e2.value(c), acc / Rat::from_int(16));
        }
        // Orthogonality: S_3(w_5) = 0.
        let w5: Vec<i64> = (0..64).map(|c| walsh(5, 6, c).unwrap()).collect();
        let w5: CylinderFunction<Rat> = CylinderFunction::from_ints(6, &w5).unwrap();
        assert!(partial_sum(&w5, 3).unwrap().values().iter().all(|v| v.is_zero()));
        assert!(partial_sum(&f, 65).is_err());
    }

    #[test]
    fn conjugate_partial_sum_is_convolution_with_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let depth = 6;
        let vals: Vec<i64> = (0..64).map(|_| rng.gen_range(-6..=6)).collect();
        let f: CylinderFunction<Rat> = CylinderFunction::from_ints(depth, &vals).unwrap();
        let t = ConjugateParameter::from_rational(5, 8).unwrap();
        let n = 13u64;
        let spectral = conjugate_partial_sum(&f, n, &t, Beta0Convention::KernelPlus).unwrap();
        let kernel: CylinderFunction<Rat> = conjugate_dirichlet(n, &t, depth).unwrap();
        let convolved = crate::cylinder::dyadic_convolve(&f, &kernel).unwrap();
        assert_eq!(spectral, convolved);
    }

    #[test]
    fn conjugate_partial_sum_single_frequency() {
        let depth = 5;
        let t = ConjugateParameter::from_rational(1, 3).unwrap();
        for j in 0..8u64 {
            let w: Vec<i64> = (0..32).map(|c| walsh(j, depth, c).unwrap()).collect();
            let w: CylinderFunction<Rat> = CylinderFunction::from_ints(depth, &w).unwrap();
            let s = conjugate_partial_sum(&w, 16, &t, Beta0Convention::KernelPlus).unwrap();
            let expect = w.scale(Rat::from_int(t.beta(j, Beta0Convention::KernelPlus)));
            assert_eq!(s, expect, "j={j}");
        }
    }

    #[test]
    fn conjugate_fejer_mean_constant_multiplier() {
        let f: CylinderFunction<Rat> = CylinderFunction::constant(4, rat(1, 1)).unwrap();
        let zero = ConjugateParameter::zero();
        for n in 1u64..10 {
            let m = conjugate_fejer_mean(&f, n, &zero, Beta0Convention::KernelPlus).unwrap();
            assert!(m.values().iter().all(|v| *v == rat(n as i64 - 1, n as i64)), "n={n}");
        }
        let z: CylinderFunction<Rat> = CylinderFunction::zero(4).unwrap();
        let mz = conjugate_fejer_mean(&z, 7, &zero, Beta0Convention::KernelPlus).unwrap();
        assert!(mz.values().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn convolution_operator_norm_attained_on_signs() {
        // E|f * g| <= ||g||_1 E|f|, with equality when f is a sign pattern
        // aligned with a translate of g.
        let depth = 6;
        let t = ConjugateParameter::from_rational(1, 3).unwrap();
        let g: CylinderFunction<f64> = conjugate_fejer_kernel(37, &t, depth, Beta0Convention::KernelPlus).unwrap();
        let norm = g.l1_norm();
        let signs: Vec<f64> = (0..1u64 << depth).map(|c| if *g.value(c) >= 0.0 { 1.0 } else { -1.0 }).collect();
        let f = CylinderFunction::from_values(depth, signs).unwrap();
        let conv = crate::cylinder::dyadic_convolve(&f, &g).unwrap();
        let attained = conv.value(0).abs();
        assert!(attained <= norm * f.l1_norm() + 1e-12);
        assert!((attained - norm).abs() < 1e-10);
    }
}
