//! The divergence family: a block-structured parameter t, pinned cylinders
//! Δ_A and Δ̃_i, the scaled indicators f_A, growth measurements of
//! `E|σ̃_{2^{2p_A+1}} f_A|`, rational-parameter kernel-norm sweeps, and the
//! resulting Orlicz-to-L1 lower bounds.

use crate::cylinder::CylinderFunction;
use crate::error::WalshError;
use crate::kernels::conjugate_fejer_mean;
use crate::lebesgue::conjugate_fejer_l1_norm;
use crate::martingale::{llogl_functional, YoungFunction};
use crate::param::{Beta0Convention, ConjugateParameter};
use crate::scalar::{rat, rat_dyadic, Rat, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Block structure of a parameter whose bit stream is a union of runs of
/// ones: `t_j = 1` iff `q_i <= j <= p_i` for some block i.  Positions satisfy
/// `0 <= q_1 <= p_1 < q_2 <= p_2 < ...`.
#[derive(Debug, Clone)]
pub struct BlockParameter {
    q: Vec<u32>,
    p: Vec<u32>,
    t: ConjugateParameter,
}

impl BlockParameter {
    /// Extract the first `blocks` runs of ones from a parameter's bit stream.
    pub fn from_parameter(t: &ConjugateParameter, blocks: usize) -> Result<Self, WalshError> {
        let mut q = Vec::with_capacity(blocks);
        let mut p = Vec::with_capacity(blocks);
        let mut j = 0u32;
        // A run must start within a generous window or the stream has too
        // few blocks (e.g. a dyadic rational that went constant zero).
        let window = 64 * (blocks as u32 + 1) + 64;
        while q.len() < blocks {
            if j > window {
                return Err(WalshError::BadBlockParameter(format!(
                    "only {} of {blocks} blocks found in the first {window} bits",
                    q.len()
                )));
            }
            if t.bit(j) == 1 {
                q.push(j);
                while t.bit(j + 1) == 1 {
                    j += 1;
                }
                p.push(j);
            }
            j += 1;
        }
        Ok(Self { q, p, t: t.clone() })
    }

    /// Explicit block positions; the bit stream is zero past the last block.
    pub fn from_blocks(q: Vec<u32>, p: Vec<u32>) -> Result<Self, WalshError> {
        if q.is_empty() || q.len() != p.len() {
            return Err(WalshError::BadBlockParameter("need matching nonempty q/p lists".into()));
        }
        for i in 0..q.len() {
            if q[i] > p[i] || (i > 0 && q[i] <= p[i - 1]) {
                return Err(WalshError::BadBlockParameter(format!(
                    "blocks must satisfy q_i <= p_i < q_(i+1); violated at block {}",
                    i + 1
                )));
            }
        }
        let len = p[p.len() - 1] + 1;
        let mut bits = vec![0u8; len as usize];
        for i in 0..q.len() {
            for j in q[i]..=p[i] {
                bits[j as usize] = 1;
            }
        }
        let t = ConjugateParameter::from_bits(bits, Vec::new());
        Ok(Self { q, p, t })
    }

    /// The minimal non-terminating block structure `q_i = p_i = 2i-1`,
    /// i.e. t = 1/3 = 0.010101...; `blocks` of its runs are materialized.
    pub fn alternating(blocks: usize) -> Self {
        let third = ConjugateParameter::from_rational(1, 3).expect("1/3 in range");
        Self::from_parameter(&third, blocks).expect("1/3 has unbounded block structure")
    }

    pub fn blocks(&self) -> usize {
        self.q.len()
    }

    /// Start of block i (1-based).
    pub fn q(&self, i: usize) -> u32 {
        self.q[i - 1]
    }

    /// End of block i (1-based).
    pub fn p(&self, i: usize) -> u32 {
        self.p[i - 1]
    }

    pub fn parameter(&self) -> &ConjugateParameter {
        &self.t
    }

    fn require_blocks(&self, need: usize) -> Result<(), WalshError> {
        if self.blocks() < need {
            return Err(WalshError::BadBlockParameter(format!(
                "pattern has {} blocks, need {need}",
                self.blocks()
            )));
        }
        Ok(())
    }
}

/// A single dyadic cell: the depth-`depth` cylinder whose first coordinates
/// are the bits of `index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub depth: u32,
    pub index: u64,
}

impl Cell {
    pub fn measure(&self) -> Rat {
        rat_dyadic(1, self.depth)
    }

    /// `scale * indicator` as a function at ambient depth >= self.depth.
    pub fn indicator<S: Scalar>(
        &self,
        scale: S,
        ambient_depth: u32,
    ) -> Result<CylinderFunction<S>, WalshError> {
        if ambient_depth < self.depth {
            return Err(WalshError::DepthTooSmall { depth: ambient_depth, need: self.depth });
        }
        let mask = (1u64 << self.depth) - 1;
        let values = (0..1u64 << ambient_depth)
            .map(|c| if c & mask == self.index { scale.clone() } else { S::zero() })
            .collect();
        CylinderFunction::from_values(ambient_depth, values)
    }
}

/// Δ_A: the depth-(p_A+1) cell carrying the bits of t with every block
/// endpoint q_k, p_k flipped to 0.
pub fn delta_cell(pattern: &BlockParameter, a: usize) -> Result<Cell, WalshError> {
    pattern.require_blocks(a)?;
    let depth = pattern.p(a) + 1;
    let mut index = 0u64;
    for j in 0..depth {
        let pinned = (1..=a).any(|k| j == pattern.q(k) || j == pattern.p(k));
        if !pinned && pattern.parameter().bit(j) == 1 {
            index |= 1 << j;
        }
    }
    Ok(Cell { depth, index })
}

/// Δ̃_i: as Δ_A truncated at depth p_i+1, but with the final coordinate p_i
/// set to 1 instead of 0.
pub fn delta_tilde_cell(pattern: &BlockParameter, i: usize) -> Result<Cell, WalshError> {
    let base = delta_cell(pattern, i)?;
    Ok(Cell { depth: base.depth, index: base.index | 1 << pattern.p(i) })
}

/// The pair (t, f_A) with `f_A = 2^{2A} * indicator(Δ_A)` at depth p_A+1.
pub fn build_counterexample<S: Scalar>(
    a: usize,
    pattern: &BlockParameter,
) -> Result<(ConjugateParameter, CylinderFunction<S>), WalshError> {
    let cell = delta_cell(pattern, a)?;
    let f = cell.indicator(S::from_int(1 << (2 * a)), cell.depth)?;
    Ok((pattern.parameter().clone(), f))
}

/// `E|σ̃_{2^{2p_A+1}}^(t) f_A|` on the chosen backend.  The mean is evaluated
/// by the spectral multiplier at depth p_A+1, which resolves every frequency
/// f_A carries.
pub fn growth_value<S: Scalar>(a: usize, pattern: &BlockParameter) -> Result<S, WalshError> {
    let (t, f) = build_counterexample::<S>(a, pattern)?;
    let n = 1u64 << (2 * pattern.p(a) + 1);
    let sigma = conjugate_fejer_mean(&f, n, &t, Beta0Convention::Literal)?;
    Ok(sigma.l1_norm())
}

/// One row of a growth run.
#[derive(Debug, Clone)]
pub struct GrowthRow {
    pub a: usize,
    pub n: u64,
    pub depth: u32,
    /// `E|σ̃_n f_A|` (float backend).
    pub y: f64,
    /// Exact shadow of `y`, run where the exact depth cap allows.
    pub y_exact: Option<Rat>,
    /// `||conj-fejer kernel(n, t)||_1`, exact.
    pub kernel_l1: Rat,
    /// `E(|f_A| log+ |f_A|)`.
    pub llogl: f64,
}

/// Growth table for A = 1..=a_max.  Rows are computed in parallel and
/// returned ordered by A.
pub fn growth_run(a_max: usize, pattern: &BlockParameter) -> Result<Vec<GrowthRow>, WalshError> {
    pattern.require_blocks(a_max)?;
    (1..=a_max)
        .into_par_iter()
        .map(|a| {
            let y = growth_value::<f64>(a, pattern)?;
            let exact_ok = pattern.p(a) + 1 <= crate::max_depth(true);
            let y_exact = if a <= 3 && exact_ok {
                Some(growth_value::<Rat>(a, pattern)?)
            } else {
                None
            };
            let n = 1u64 << (2 * pattern.p(a) + 1);
            let (_, f) = build_counterexample::<f64>(a, pattern)?;
            Ok(GrowthRow {
                a,
                n,
                depth: 2 * pattern.p(a) + 1,
                y,
                y_exact,
                kernel_l1: conjugate_fejer_l1_norm(n, pattern.parameter(), Beta0Convention::Literal),
                llogl: llogl_functional(&f),
            })
        })
        .collect()
}

/// One row of a rational-parameter sweep: the max kernel norm over sampled
/// orders in the octave `[2^exponent, 2^(exponent+1))`.
#[derive(Debug, Clone)]
pub struct OctaveRow {
    pub exponent: u32,
    pub max_norm: Rat,
    pub argmax_n: u64,
}

/// Per-octave maxima of `||conj-fejer kernel(n, t)||_1` for octaves
/// 1..=n_max_exp.  Small octaves are scanned exhaustively; larger ones take
/// the endpoints plus `samples` seeded draws.  Deterministic in the seed.
pub fn rational_sweep(
    t: &ConjugateParameter,
    n_max_exp: u32,
    samples: u32,
    seed: u64,
) -> Vec<OctaveRow> {
    (1..=n_max_exp)
        .into_par_iter()
        .map(|exp| {
            let lo = 1u64 << exp;
            let hi = 2 * lo;
            let mut picks: Vec<u64> = if hi - lo <= samples as u64 + 2 {
                (lo..hi).collect()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (exp as u64).wrapping_mul(0x9e3779b97f4a7c15));
                let mut v = vec![lo, hi - 1];
                v.extend((0..samples).map(|_| rng.gen_range(lo..hi)));
                v
            };
            picks.sort_unstable();
            picks.dedup();
            let (max_norm, argmax_n) = picks
                .into_iter()
                .map(|n| (conjugate_fejer_l1_norm(n, t, Beta0Convention::Literal), n))
                .fold((rat(-1, 1), 0), |acc, cur| if cur.0 > acc.0 { cur } else { acc });
            OctaveRow { exponent: exp, max_norm, argmax_n }
        })
        .collect()
}

/// Certified lower bound `y_A / (1 + Q(2^{2A}) 4^{-A})` on the operator norm
/// of `σ̃_{2^{2p_A+1}}` from the Orlicz class of Q into L1.  Requires
/// `Q(2^{2A}) >= 2^{2A}`.
pub fn orlicz_lower_bound(
    a: usize,
    pattern: &BlockParameter,
    q: &YoungFunction,
) -> Result<f64, WalshError> {
    let u = 4f64.powi(a as i32);
    if q.eval(u) < u {
        return Err(WalshError::OrliczPrecondition(a as u32));
    }
    let y = growth_value::<f64>(a, pattern)?;
    Ok(y / (1.0 + q.eval(u) / u))
}
