//! Exact Lebesgue constants of (conjugate) Dirichlet kernels, the closed
//! formula with its J1/J2/J3 breakdown, a brute-force integration oracle,
//! and the two-sided bound verification scans.
//!
//! Everything here is exact big-integer arithmetic: every Lebesgue constant
//! is a dyadic rational with denominator dividing `2^{N+1}`, and the bounds
//! being checked are exact inequalities.  Floats never enter this module.

use crate::cylinder::fwht_i64;
use crate::error::WalshError;
use crate::index::{alpha_of, transition_set, FrequencyIndex};
use crate::param::{Beta0Convention, ConjugateParameter};
use crate::scalar::{rat, rat_dyadic, Rat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Exact decomposition of `L_n^(t)` into the shell, boundary and deep-cell
/// contributions.
#[derive(Debug, Clone, PartialEq)]
pub struct LebesgueBreakdown {
    pub j1: Rat,
    pub j2: Rat,
    pub j3: Rat,
    pub total: Rat,
}

/// One row of a bound-verification report.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub n: u64,
    pub level: u32,
    pub t_digest: String,
    pub m: u64,
    pub v_n: u32,
    pub v_m: u32,
    pub t_nm: u32,
    pub t_mn: u32,
    pub lebesgue: Rat,
    /// `2V(m) + |T(n,m)| + 2 - L`, nonnegative iff the upper bound holds.
    pub upper_margin: Rat,
    /// `L - (max-expression - C)` for C = 1 and C = 2.
    pub lower_margin_c1: Rat,
    pub lower_margin_c2: Rat,
    pub mtk_ok: bool,
    pub sws_ok: bool,
}

fn msb(n: u64) -> u32 {
    63 - n.leading_zeros()
}

fn variation_of(v: u64) -> u32 {
    ((v as u128) ^ ((v as u128) << 1)).count_ones()
}

/// Closed formula for `L_n^(t)`, exact.
///
/// `J1 = sum_{i<N} max(alpha_i(n), 2 alpha_i(m)) / 2^{i+1}`,
/// `J2 = |2^{N+1} - n - 2m + 2 t_{N+1}(n - 2^N)| / 2^{N+1}`,
/// `J3 = |n - 2m - 2 t_{N+1}(n - 2^N)| / 2^{N+1}`.
pub fn lebesgue_exact(n: FrequencyIndex, t: &ConjugateParameter) -> LebesgueBreakdown {
    let nv = n.value() as i128;
    let big_n = n.msb();
    let m = t.modifier(big_n).value() as i128;
    let t_top = t.bit(big_n + 1) as i128;

    let mut j1_scaled: i128 = 0; // scaled by 2^{N+1}
    for i in 0..big_n {
        let a_n = n.alpha(i) as i128;
        let a_m = alpha_of(m as u64, i) as i128;
        j1_scaled += a_n.max(2 * a_m) << (big_n - i);
    }
    let pow = 1i128 << big_n;
    let j2_scaled = (2 * pow - nv - 2 * m + 2 * t_top * (nv - pow)).abs();
    let j3_scaled = (nv - 2 * m - 2 * t_top * (nv - pow)).abs();

    let j1 = rat_dyadic(j1_scaled, big_n + 1);
    let j2 = rat_dyadic(j2_scaled, big_n + 1);
    let j3 = rat_dyadic(j3_scaled, big_n + 1);
    let total = rat_dyadic(j1_scaled + j2_scaled + j3_scaled, big_n + 1);
    LebesgueBreakdown { j1, j2, j3, total }
}

/// Brute-force oracle: materialize the conjugate Dirichlet kernel at depth
/// `N+1` through the Walsh coefficient signs and integrate `|.|` exactly.
pub fn lebesgue_bruteforce(n: FrequencyIndex, t: &ConjugateParameter) -> Result<Rat, WalshError> {
    let big_n = n.msb();
    let depth = big_n + 1;
    if big_n > 20 {
        return Err(WalshError::DepthCap { depth, cap: 21, backend: "exact" });
    }
    let mut values = vec![0i64; 1 << depth];
    for (k, v) in values.iter_mut().enumerate().take(n.value() as usize) {
        *v = t.beta(k as u64, Beta0Convention::KernelPlus);
    }
    fwht_i64(&mut values);
    let sum: i128 = values.iter().map(|&v| (v as i128).abs()).sum();
    Ok(rat_dyadic(sum, depth))
}

/// The plain-Walsh reduced formula `L_n = sum_{i<N} alpha_i(n)/2^{i+1} + 1`.
pub fn lebesgue_plain(n: FrequencyIndex) -> Rat {
    let big_n = n.msb();
    let mut scaled: i128 = 1 << (big_n + 1);
    for i in 0..big_n {
        scaled += (n.alpha(i) as i128) << (big_n - i);
    }
    rat_dyadic(scaled, big_n + 1)
}

/// Theorem-TS style bound check for one (n, t) pair, plus the classical
/// MTK and S-W-S brackets for the unconjugated constant.
pub fn check_bounds(n: FrequencyIndex, t: &ConjugateParameter) -> BoundReport {
    let big_n = n.msb();
    let m = t.modifier(big_n).value();
    let lebesgue = lebesgue_exact(n, t).total;
    let v_n = n.variation();
    let v_m = variation_of(m);
    let t_nm = transition_set(n.value(), m, big_n).len() as u32;
    let t_mn = transition_set(m, n.value(), big_n).len() as u32;

    let upper = rat(2 * v_m as i64 + t_nm as i64 + 2, 1);
    let lower_a = rat(v_n as i64, 3) + rat(t_mn as i64, 2);
    let lower_b = rat(2 * v_m as i64, 3) + rat(t_nm as i64, 4);
    let lower = if lower_a >= lower_b { lower_a } else { lower_b };

    let plain = lebesgue_plain(n);
    let mtk_ok = rat(v_n as i64 + 1, 3) <= plain && plain < rat(v_n as i64, 1);
    let sws_ok = rat(v_n as i64, 8) <= plain && plain <= rat(v_n as i64, 1);

    BoundReport {
        n: n.value(),
        level: big_n,
        t_digest: t.digest(big_n + 2),
        m,
        v_n,
        v_m,
        t_nm,
        t_mn,
        upper_margin: upper - lebesgue.clone(),
        lower_margin_c1: lebesgue.clone() - (lower.clone() - rat(1, 1)),
        lower_margin_c2: lebesgue.clone() - (lower - rat(2, 1)),
        mtk_ok,
        sws_ok,
        lebesgue,
    }
}

/// Scan configuration: levels `exp_min..=exp_max`, exhaustive t-patterns at
/// or below `exhaustive_level_cap`, otherwise `samples` seeded patterns.
#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub exp_min: u32,
    pub exp_max: u32,
    pub samples: usize,
    pub seed: u64,
    pub exhaustive_level_cap: u32,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { exp_min: 0, exp_max: 8, samples: 32, seed: 1, exhaustive_level_cap: 10 }
    }
}

#[derive(Debug, Clone)]
pub struct ScanSummary {
    pub pairs: usize,
    pub upper_violations: usize,
    /// Largest observed `max-expression - L`; the empirical best additive
    /// constant for the lower bound.
    pub max_lower_deficit: Rat,
    /// Smallest observed upper-bound margin.
    pub min_upper_margin: Rat,
    pub mtk_violations: usize,
    pub sws_violations: usize,
}

/// Deterministic bound scan.  Work is partitioned over n in parallel and the
/// merged output is sorted by (n, t-digest), so it is schedule-independent.
pub fn scan(config: &ScanConfig) -> (Vec<BoundReport>, ScanSummary) {
    let ns: Vec<u64> = (config.exp_min..=config.exp_max)
        .flat_map(|e| (1u64 << e)..(1u64 << (e + 1)))
        .collect();
    let mut reports: Vec<BoundReport> = ns
        .par_iter()
        .flat_map_iter(|&nv| {
            let n = FrequencyIndex::new(nv).expect("positive");
            let big_n = n.msb();
            let patterns: Vec<ConjugateParameter> = if big_n <= config.exhaustive_level_cap {
                // All assignments of the relevant bits t_1..t_{N+1}; t_0 inert.
                (0u64..1 << (big_n + 1))
                    .map(|mask| {
                        let bits: Vec<u8> =
                            (0..=big_n + 1).map(|j| if j == 0 { 0 } else { ((mask >> (j - 1)) & 1) as u8 }).collect();
                        ConjugateParameter::from_bits(bits, Vec::new())
                    })
                    .collect()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ nv.wrapping_mul(0x9e3779b97f4a7c15));
                (0..config.samples)
                    .map(|_| {
                        let bits: Vec<u8> =
                            (0..=big_n + 1).map(|j| if j == 0 { 0 } else { rng.gen_range(0..=1) }).collect();
                        ConjugateParameter::from_bits(bits, Vec::new())
                    })
                    .collect()
            };
            patterns.into_iter().map(move |t| check_bounds(n, &t)).collect::<Vec<_>>().into_iter()
        })
        .collect();
    reports.sort_by(|a, b| (a.n, &a.t_digest).cmp(&(b.n, &b.t_digest)));

    let mut summary = ScanSummary {
        pairs: reports.len(),
        upper_violations: 0,
        max_lower_deficit: rat(-1_000_000, 1),
        min_upper_margin: rat(1_000_000, 1),
        mtk_violations: 0,
        sws_violations: 0,
    };
    let zero = rat(0, 1);
    for r in &reports {
        if r.upper_margin < zero {
            summary.upper_violations += 1;
        }
        if r.upper_margin < summary.min_upper_margin {
            summary.min_upper_margin = r.upper_margin.clone();
        }
        // deficit = max-expression - L = C - lower_margin_C.
        let deficit = rat(1, 1) - r.lower_margin_c1.clone();
        if deficit > summary.max_lower_deficit {
            summary.max_lower_deficit = deficit;
        }
        if !r.mtk_ok {
            summary.mtk_violations += 1;
        }
        if !r.sws_ok {
            summary.sws_violations += 1;
        }
    }
    (reports, summary)
}

/// Exact `||K_n||_1` through the integer spectral route.
pub fn fejer_l1_norm(n: u64) -> Rat {
    if n <= 1 {
        return rat(0, 1);
    }
    let depth = if n.is_power_of_two() { msb(n) } else { msb(n) + 1 };
    let mut values = vec![0i64; 1 << depth];
    for (j, v) in values.iter_mut().enumerate().take(n as usize) {
        *v = (n - 1 - j as u64) as i64;
    }
    fwht_i64(&mut values);
    let sum: i128 = values.iter().map(|&v| (v as i128).abs()).sum();
    Rat::new(sum.into(), (n as i128 * (1i128 << depth)).into())
}

/// `||conj-fejer kernel(n, t)||_1`, exact via the integer transform.
pub fn conjugate_fejer_l1_norm(n: u64, t: &ConjugateParameter, conv: Beta0Convention) -> Rat {
    if n <= 1 {
        return rat(0, 1);
    }
    let depth = if n.is_power_of_two() { msb(n) } else { msb(n) + 1 };
    let mut values = vec![0i64; 1 << depth];
    for (j, v) in values.iter_mut().enumerate().take(n as usize) {
        *v = t.beta(j as u64, conv) * (n - 1 - j as u64) as i64;
    }
    fwht_i64(&mut values);
    let sum: i128 = values.iter().map(|&v| (v as i128).abs()).sum();
    Rat::new(sum.into(), (n as i128 * (1i128 << depth)).into())
}

/// Scan `||K_n||_1` up to `n_max` and return the exact maximum with its
/// argmax.
pub fn toledo_scan(n_max: u64) -> (Rat, u64) {
    (1..=n_max)
        .into_par_iter()
        .map(|n| (fejer_l1_norm(n), n))
        .reduce(|| (rat(0, 1), 1), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fi(n: u64) -> FrequencyIndex {
        FrequencyIndex::new(n).unwrap()
    }

    #[test]
    fn closed_formula_examples() {
        let zero = ConjugateParameter::zero();
        let b = lebesgue_exact(fi(5), &zero);
        assert_eq!(b.j1, rat(3, 4));
        assert_eq!(b.j2, rat(3, 8));
        assert_eq!(b.j3, rat(5, 8));
        assert_eq!(b.total, rat(7, 4));

        for bits in [vec![0u8], vec![1], vec![0, 1], vec![1, 1]] {
            let t = ConjugateParameter::from_bits(bits, Vec::new());
            assert_eq!(lebesgue_exact(fi(1), &t).total, rat(1, 1));
        }

        let quarter = ConjugateParameter::from_rational(1, 4).unwrap();
        assert_eq!(lebesgue_exact(fi(2), &quarter).total, rat(1, 1));

        assert_eq!(lebesgue_exact(fi(3), &zero).total, rat(3, 2));
    }

    #[test]
    fn bruteforce_examples() {
        let zero = ConjugateParameter::zero();
        assert_eq!(lebesgue_bruteforce(fi(5), &zero).unwrap(), rat(7, 4));
        for k in 0..10 {
            assert_eq!(lebesgue_bruteforce(fi(1 << k), &zero).unwrap(), rat(1, 1), "k={k}");
        }
        let quarter = ConjugateParameter::from_rational(1, 4).unwrap();
        assert_eq!(lebesgue_bruteforce(fi(2), &quarter).unwrap(), rat(1, 1));
    }

    #[test]
    fn closed_formula_matches_bruteforce_smoke() {
        let third = ConjugateParameter::from_rational(1, 3).unwrap();
        let fivesixteenth = ConjugateParameter::from_rational(5, 16).unwrap();
        for n in 1u64..1 << 7 {
            for t in [&third, &fivesixteenth] {
                assert_eq!(
                    lebesgue_exact(fi(n), t).total,
                    lebesgue_bruteforce(fi(n), t).unwrap(),
                    "n={n}"
                );
            }
        }
    }

    #[test]
    fn plain_formula_matches_general_formula_at_zero() {
        let zero = ConjugateParameter::zero();
        for n in 1u64..1 << 10 {
            assert_eq!(lebesgue_plain(fi(n)), lebesgue_exact(fi(n), &zero).total, "n={n}");
        }
    }

    #[test]
    fn scaled_constant_is_integer() {
        let t = ConjugateParameter::from_rational(3, 7).unwrap();
        for n in 1u64..256 {
            let b = lebesgue_exact(fi(n), &t);
            let scaled = b.total * rat(1 << (fi(n).msb() + 1), 1);
            assert!(scaled.is_integer(), "n={n}");
        }
    }

    #[test]
    fn bound_report_examples() {
        let zero = ConjugateParameter::zero();
        let r3 = check_bounds(fi(3), &zero);
        assert!(r3.mtk_ok && r3.sws_ok);
        let r5 = check_bounds(fi(5), &zero);
        assert!(r5.mtk_ok && r5.sws_ok);
        assert_eq!(r5.lebesgue, rat(7, 4));

        let quarter = ConjugateParameter::from_rational(1, 4).unwrap();
        let r2 = check_bounds(fi(2), &quarter);
        assert!(r2.upper_margin >= rat(0, 1));
        assert_eq!(r2.lebesgue, rat(1, 1));
    }

    #[test]
    fn scan_is_deterministic() {
        let config = ScanConfig { exp_min: 11, exp_max: 11, samples: 4, seed: 42, exhaustive_level_cap: 10 };
        let (a, sa) = scan(&config);
        let (b, sb) = scan(&config);
        assert_eq!(a.len(), b.len());
        assert_eq!(sa.pairs, sb.pairs);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((x.n, &x.t_digest, &x.lebesgue), (y.n, &y.t_digest, &y.lebesgue));
        }
    }

    #[test]
    fn small_exhaustive_scan_has_no_upper_violations() {
        let (reports, summary) = scan(&ScanConfig { exp_min: 0, exp_max: 5, ..Default::default() });
        assert_eq!(summary.upper_violations, 0);
        assert_eq!(summary.mtk_violations, 0);
        assert_eq!(summary.sws_violations, 0);
        assert!(reports.iter().all(|r| r.lower_margin_c2 >= rat(0, 1)));
    }

    #[test]
    fn fejer_norm_small_values() {
        assert_eq!(fejer_l1_norm(1), rat(0, 1));
        assert_eq!(fejer_l1_norm(2), rat(1, 2));
        let (max, _arg) = toledo_scan(256);
        assert!(max <= rat(17, 15));
        assert!(max > rat(11, 10));
    }
}
