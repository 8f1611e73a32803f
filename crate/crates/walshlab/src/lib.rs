//! Computational toolkit for conjugate Walsh-Fourier analysis on the dyadic
//! group.
//!
//! The crate works on finite-depth truncations of the Walsh group: a function
//! is a vector of `2^d` values indexed by depth-`d` cylinders.  On top of that
//! sit the Walsh-Paley transform, Dirichlet / Fejér kernels and their
//! conjugate variants, exact Lebesgue constants with a two-sided bound
//! verification suite, dyadic martingale machinery (conditional expectations,
//! conjugate transforms, Orlicz functionals) and the unboundedness
//! counterexample experiments.
//!
//! Everything that is a dyadic rational is computed with exact big-integer
//! rationals; a float backend covers the depths where exact arithmetic is no
//! longer feasible.

pub mod counterexample;
pub mod cylinder;
pub mod error;
pub mod harness;
pub mod index;
pub mod kernels;
pub mod lebesgue;
pub mod martingale;
pub mod param;
pub mod scalar;

pub use cylinder::{dyadic_convolve, fwht_forward, fwht_inverse, rademacher, walsh, CylinderFunction, Spectrum};
pub use error::WalshError;
pub use index::FrequencyIndex;
pub use param::{Beta0Convention, ConjugateParameter, ModifierIndex};
pub use scalar::{Rat, Scalar};

/// Depth cap for the exact (big-rational) backend, before the
/// `WALSHLAB_MAX_DEPTH` override.
pub const MAX_DEPTH_EXACT: u32 = 16;
/// Depth cap for the float backend, before the override.
pub const MAX_DEPTH_FLOAT: u32 = 24;

/// Effective depth cap for a backend, honoring the `WALSHLAB_MAX_DEPTH`
/// environment override.
pub fn max_depth(exact: bool) -> u32 {
    if let Ok(v) = std::env::var("WALSHLAB_MAX_DEPTH") {
        if let Ok(d) = v.parse::<u32>() {
            return d;
        }
    }
    if exact {
        MAX_DEPTH_EXACT
    } else {
        MAX_DEPTH_FLOAT
    }
}
