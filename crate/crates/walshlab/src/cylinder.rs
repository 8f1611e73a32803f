//! Functions on the depth-d truncated dyadic group and their Walsh-Paley
//! spectra.
//!
//! A cylinder index `c` encodes the point coordinates by `x_k = bit k of c`,
//! so the plain tensor-product butterfly transform is exactly the Walsh-Paley
//! order: no reordering pass is needed.

use crate::error::WalshError;
use crate::max_depth;
use crate::scalar::Scalar;

/// A function on the depth-d truncation: `2^d` values under the uniform
/// measure `2^{-d}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderFunction<S> {
    depth: u32,
    values: Vec<S>,
}

/// Walsh-Paley coefficients of a depth-d function.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<S> {
    depth: u32,
    coeffs: Vec<S>,
}

/// r_k evaluated at cylinder index c.
pub fn rademacher(k: u32, depth: u32, c: u64) -> Result<i64, WalshError> {
    if k >= depth {
        return Err(WalshError::IndexOutOfRange { index: k as u64, depth });
    }
    Ok(if (c >> k) & 1 == 1 { -1 } else { 1 })
}

/// w_m evaluated at cylinder index c: `(-1)^{sum m_k x_k}`.
pub fn walsh(m: u64, depth: u32, c: u64) -> Result<i64, WalshError> {
    if m >= (1u64 << depth) {
        return Err(WalshError::IndexOutOfRange { index: m, depth });
    }
    Ok(walsh_sign(m, c))
}

/// Unchecked Walsh sign; callers guarantee m is depth-measurable.
pub(crate) fn walsh_sign(m: u64, c: u64) -> i64 {
    if (m & c).count_ones() % 2 == 1 {
        -1
    } else {
        1
    }
}

fn check_depth<S: Scalar>(depth: u32) -> Result<(), WalshError> {
    let cap = max_depth(S::EXACT);
    if depth > cap {
        let backend = if S::EXACT { "exact" } else { "float" };
        return Err(WalshError::DepthCap { depth, cap, backend });
    }
    Ok(())
}

/// In-place unnormalized transform: d passes of size-2 butterflies.  It is an
/// involution up to the factor `2^d`.
pub(crate) fn fwht_in_place<S: Scalar>(values: &mut [S]) {
    let n = values.len();
    let mut h = 1;
    while h < n {
        let mut block = 0;
        while block < n {
            for i in block..block + h {
                let a = values[i].clone();
                let b = values[i + h].clone();
                values[i] = a.clone() + b.clone();
                values[i + h] = a - b;
            }
            block += 2 * h;
        }
        h *= 2;
    }
}

/// Integer butterfly used by the exact scan fast paths.
pub(crate) fn fwht_i64(values: &mut [i64]) {
    let n = values.len();
    let mut h = 1;
    while h < n {
        let mut block = 0;
        while block < n {
            for i in block..block + h {
                let a = values[i];
                let b = values[i + h];
                values[i] = a + b;
                values[i + h] = a - b;
            }
            block += 2 * h;
        }
        h *= 2;
    }
}

impl<S: Scalar> CylinderFunction<S> {
    pub fn from_values(depth: u32, values: Vec<S>) -> Result<Self, WalshError> {
        check_depth::<S>(depth)?;
        assert_eq!(values.len(), 1usize << depth, "value count must be 2^depth");
        Ok(Self { depth, values })
    }

    pub fn from_ints(depth: u32, ints: &[i64]) -> Result<Self, WalshError> {
        Self::from_values(depth, ints.iter().map(|&v| S::from_int(v)).collect())
    }

    pub fn constant(depth: u32, value: S) -> Result<Self, WalshError> {
        check_depth::<S>(depth)?;
        Ok(Self { depth, values: vec![value; 1 << depth] })
    }

    pub fn zero(depth: u32) -> Result<Self, WalshError> {
        Self::constant(depth, S::zero())
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, c: u64) -> &S {
        &self.values[c as usize]
    }

    /// E f = 2^{-d} sum of values.
    pub fn integral(&self) -> S {
        let sum = self.values.iter().fold(S::zero(), |acc, v| acc + v.clone());
        sum / S::from_int(1 << self.depth)
    }

    /// E |f|.
    pub fn l1_norm(&self) -> S {
        let sum = self.values.iter().fold(S::zero(), |acc, v| acc + v.abs_val());
        sum / S::from_int(1 << self.depth)
    }

    /// Lift to a deeper truncation; the new low-order coordinates repeat the
    /// existing values, preserving the integral and every L_p norm.
    pub fn lift(&self, depth: u32) -> Result<Self, WalshError> {
        check_depth::<S>(depth)?;
        if depth < self.depth {
            return Err(WalshError::DepthTooSmall { depth, need: self.depth });
        }
        let mask = (1u64 << self.depth) - 1;
        let values = (0..1u64 << depth).map(|c| self.values[(c & mask) as usize].clone()).collect();
        Ok(Self { depth, values })
    }

    pub fn pointwise<F: FnMut(&S, &S) -> S>(&self, other: &Self, mut f: F) -> Result<Self, WalshError> {
        if self.depth != other.depth {
            return Err(WalshError::DepthMismatch { left: self.depth, right: other.depth });
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect();
        Ok(Self { depth: self.depth, values })
    }

    pub fn add(&self, other: &Self) -> Result<Self, WalshError> {
        self.pointwise(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, WalshError> {
        self.pointwise(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, factor: S) -> Self {
        Self { depth: self.depth, values: self.values.iter().map(|v| v.clone() * factor.clone()).collect() }
    }

    pub fn map<F: FnMut(&S) -> S>(&self, f: F) -> Self {
        Self { depth: self.depth, values: self.values.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> CylinderFunction<f64> {
        CylinderFunction { depth: self.depth, values: self.values.iter().map(|v| v.to_f64()).collect() }
    }
}

impl<S: Scalar> Spectrum<S> {
    pub fn from_coeffs(depth: u32, coeffs: Vec<S>) -> Result<Self, WalshError> {
        check_depth::<S>(depth)?;
        assert_eq!(coeffs.len(), 1usize << depth, "coefficient count must be 2^depth");
        Ok(Self { depth, coeffs })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, j: u64) -> &S {
        &self.coeffs[j as usize]
    }

    pub fn map_indexed<F: FnMut(u64, &S) -> S>(&self, mut f: F) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(j, v)| f(j as u64, v)).collect();
        Self { depth: self.depth, coeffs }
    }
}

/// Forward transform: `f^(j) = E(f w_j)`.
pub fn fwht_forward<S: Scalar>(f: &CylinderFunction<S>) -> Spectrum<S> {
    let mut coeffs = f.values.clone();
    fwht_in_place(&mut coeffs);
    let norm = S::from_int(1 << f.depth);
    for c in coeffs.iter_mut() {
        *c = c.clone() / norm.clone();
    }
    Spectrum { depth: f.depth, coeffs }
}

/// Inverse transform: `f(c) = sum_j coeffs[j] w_j(c)`.
pub fn fwht_inverse<S: Scalar>(s: &Spectrum<S>) -> CylinderFunction<S> {
    let mut values = s.coeffs.clone();
    fwht_in_place(&mut values);
    CylinderFunction { depth: s.depth, values }
}

/// Dyadic convolution via the spectral product: `(f*g)^ = f^ . g^`.
pub fn dyadic_convolve<S: Scalar>(
    f: &CylinderFunction<S>,
    g: &CylinderFunction<S>,
) -> Result<CylinderFunction<S>, WalshError> {
    if f.depth != g.depth {
        return Err(WalshError::DepthMismatch { left: f.depth, right: g.depth });
    }
    let sf = fwht_forward(f);
    let sg = fwht_forward(g);
    let product = sf.map_indexed(|j, v| v.clone() * sg.coeff(j).clone());
    Ok(fwht_inverse(&product))
}
