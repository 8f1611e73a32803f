//! Finite-depth dyadic martingale machinery: conditional expectations, the
//! conjugate (martingale) transform and its truncations, maximal and square
//! functions, H_p quasi-norms, the L log L functional and general Orlicz
//! (Luxemburg) norms, plus the six-term Fejér-mean decomposition.

use crate::cylinder::CylinderFunction;
use crate::error::WalshError;
use crate::kernels::fejer_mean;
use crate::param::ConjugateParameter;
use crate::scalar::Scalar;

/// E_k f: the block average over depth-k cylinders.  Equals `S_{2^k} f`.
pub fn conditional_expectation<S: Scalar>(
    f: &CylinderFunction<S>,
    k: u32,
) -> Result<CylinderFunction<S>, WalshError> {
    let depth = f.depth();
    if k > depth {
        return Err(WalshError::IndexOutOfRange { index: k as u64, depth });
    }
    let step = 1u64 << k;
    let groups = 1u64 << (depth - k);
    let mut sums = vec![S::zero(); step as usize];
    for c in 0..1u64 << depth {
        let base = (c & (step - 1)) as usize;
        sums[base] = sums[base].clone() + f.value(c).clone();
    }
    let count = S::from_int(groups as i64);
    let averages: Vec<S> = sums.into_iter().map(|s| s / count.clone()).collect();
    let values = (0..1u64 << depth).map(|c| averages[(c & (step - 1)) as usize].clone()).collect();
    CylinderFunction::from_values(depth, values)
}

/// A finite martingale: the list of its levels `f^(0), ..., f^(d)`.
#[derive(Debug, Clone)]
pub struct DyadicMartingale<S> {
    levels: Vec<CylinderFunction<S>>,
}

impl<S: Scalar> DyadicMartingale<S> {
    /// The martingale `(E_k f)_k` generated by an integrable function.
    pub fn from_function(f: &CylinderFunction<S>) -> Result<Self, WalshError> {
        let mut levels = Vec::with_capacity(f.depth() as usize + 1);
        for k in 0..=f.depth() {
            levels.push(conditional_expectation(f, k)?);
        }
        Ok(Self { levels })
    }

    pub fn level(&self, k: u32) -> &CylinderFunction<S> {
        &self.levels[k as usize]
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    /// f* = max_k |f^(k)|, pointwise.
    pub fn maximal(&self) -> CylinderFunction<S> {
        let mut out = self.levels[0].map(|v| v.abs_val());
        for lvl in &self.levels[1..] {
            out = out
                .pointwise(lvl, |acc, v| {
                    let a = v.abs_val();
                    if a > *acc {
                        a
                    } else {
                        acc.clone()
                    }
                })
                .expect("equal depths");
        }
        out
    }

    /// Martingale difference d_k f = f^(k) - f^(k-1), with f^(-1) = 0.
    pub fn difference(&self, k: u32) -> CylinderFunction<S> {
        if k == 0 {
            self.levels[0].clone()
        } else {
            self.levels[k as usize].sub(&self.levels[k as usize - 1]).expect("equal depths")
        }
    }
}

/// The maximal function of an integrable function.
pub fn maximal_function<S: Scalar>(f: &CylinderFunction<S>) -> Result<CylinderFunction<S>, WalshError> {
    Ok(DyadicMartingale::from_function(f)?.maximal())
}

/// The conjugate transform: flips the k-th martingale difference by
/// `(-1)^{t_k}`.
pub fn conjugate_transform<S: Scalar>(
    f: &CylinderFunction<S>,
    t: &ConjugateParameter,
) -> Result<CylinderFunction<S>, WalshError> {
    conjugate_truncation(f, f.depth() + 1, t)
}

/// The truncated transform: `sum_{l<m} (-1)^{t_l} (E_l f - E_{l-1} f)`.
pub fn conjugate_truncation<S: Scalar>(
    f: &CylinderFunction<S>,
    m: u32,
    t: &ConjugateParameter,
) -> Result<CylinderFunction<S>, WalshError> {
    if m > f.depth() + 1 {
        return Err(WalshError::IndexOutOfRange { index: m as u64, depth: f.depth() });
    }
    let mut out = CylinderFunction::zero(f.depth())?;
    let mut prev = CylinderFunction::zero(f.depth())?;
    for l in 0..m {
        let cur = conditional_expectation(f, l)?;
        let diff = cur.sub(&prev)?;
        out = out.add(&diff.scale(S::from_int(t.level_sign(l))))?;
        prev = cur;
    }
    Ok(out)
}

/// The telescoped form of the truncated transform:
/// `(1 - 2 t_{m-1}) E_{m-1} f - 2 sum_{l<=m-2} (t_l - t_{l+1}) E_l f`.
///
/// Algebraically identical to [`conjugate_truncation`]; kept as the second
/// route for the exact-identity checks.
pub fn conjugate_truncation_telescoped<S: Scalar>(
    f: &CylinderFunction<S>,
    m: u32,
    t: &ConjugateParameter,
) -> Result<CylinderFunction<S>, WalshError> {
    if m == 0 {
        return CylinderFunction::zero(f.depth());
    }
    if m > f.depth() + 1 {
        return Err(WalshError::IndexOutOfRange { index: m as u64, depth: f.depth() });
    }
    let lead = conditional_expectation(f, m - 1)?.scale(S::from_int(t.level_sign(m - 1)));
    let mut out = lead;
    for l in 0..m.saturating_sub(1) {
        let step = t.bit(l) as i64 - t.bit(l + 1) as i64;
        if step != 0 {
            let el = conditional_expectation(f, l)?;
            out = out.add(&el.scale(S::from_int(-2 * step)))?;
        }
    }
    Ok(out)
}

/// The six-term decomposition of the conjugate Fejér mean.  The parts sum to
/// the mean computed with the literal DC sign convention.
pub fn fejer_decomposition<S: Scalar>(
    f: &CylinderFunction<S>,
    n: u64,
    t: &ConjugateParameter,
) -> Result<[CylinderFunction<S>; 6], WalshError> {
    if n == 0 {
        return Err(WalshError::ZeroFrequency);
    }
    let depth = f.depth();
    if n > 1u64 << depth {
        return Err(WalshError::IndexOutOfRange { index: n, depth });
    }
    let a = 63 - n.leading_zeros();
    let inv_n = S::from_ratio(1, n as i64);

    let mut j1 = CylinderFunction::zero(depth)?;
    let mut j2 = CylinderFunction::zero(depth)?;
    let mut j3 = CylinderFunction::zero(depth)?;
    for m in 1..=a {
        let trunc = conjugate_truncation(f, m, t)?;
        j1 = j1.add(&trunc.scale(S::from_int(1 << (m - 1))))?;

        let s_m = S::from_int(t.level_sign(m));
        let hi = fejer_mean(f, 1 << m)?.scale(S::from_int(1 << m));
        let lo = fejer_mean(f, 1 << (m - 1))?.scale(S::from_int(1 << (m - 1)));
        j2 = j2.add(&hi.sub(&lo)?.scale(s_m.clone()))?;

        let e = conditional_expectation(f, m - 1)?;
        j3 = j3.sub(&e.scale(s_m * S::from_int(1 << (m - 1))))?;
    }
    let j1 = j1.scale(inv_n.clone());
    let j2 = j2.scale(inv_n.clone());
    let j3 = j3.scale(inv_n.clone());

    let tail = n - (1u64 << a);
    let tail_frac = S::from_ratio(tail as i64, n as i64);
    let j4 = conjugate_truncation(f, a + 1, t)?.scale(tail_frac.clone());

    let s_top = S::from_int(t.level_sign(a + 1));
    let whole = fejer_mean(f, n)?.scale(S::from_int(n as i64));
    let head = fejer_mean(f, 1 << a)?.scale(S::from_int(1 << a));
    let j5 = whole.sub(&head)?.scale(s_top.clone() * inv_n);

    let j6 = conditional_expectation(f, a)?.scale(S::zero() - s_top * tail_frac);

    Ok([j1, j2, j3, j4, j5, j6])
}

/// The squared square function `sum_k |d_k f|^2`, exact on the exact backend.
pub fn square_function_squared<S: Scalar>(f: &CylinderFunction<S>) -> Result<CylinderFunction<S>, WalshError> {
    let mart = DyadicMartingale::from_function(f)?;
    let mut out = CylinderFunction::zero(f.depth())?;
    for k in 0..=mart.depth() {
        let d = mart.difference(k);
        out = out.add(&d.pointwise(&d, |x, y| x.clone() * y.clone())?)?;
    }
    Ok(out)
}

/// `||f||_{H_p} = || f* ||_p`.
pub fn hp_quasinorm<S: Scalar>(f: &CylinderFunction<S>, p: f64) -> Result<f64, WalshError> {
    if p <= 0.0 {
        return Err(WalshError::BadExponent(p));
    }
    let star = maximal_function(f)?;
    Ok(lp_norm(&star, p))
}

/// `(E |f|^p)^{1/p}`.
pub fn lp_norm<S: Scalar>(f: &CylinderFunction<S>, p: f64) -> f64 {
    let depth = f.depth();
    let mean: f64 =
        f.values().iter().map(|v| v.to_f64().abs().powf(p)).sum::<f64>() / (1u64 << depth) as f64;
    mean.powf(1.0 / p)
}

/// `E(|f| log+ |f|)` (natural log).
pub fn llogl_functional<S: Scalar>(f: &CylinderFunction<S>) -> f64 {
    let depth = f.depth();
    f.values().iter().map(|v| {
        let a = v.to_f64().abs();
        if a > 1.0 {
            a * a.ln()
        } else {
            0.0
        }
    }).sum::<f64>()
        / (1u64 << depth) as f64
}

/// A Young function: convex, Q(0) = 0, superlinear at infinity.
pub struct YoungFunction {
    pub name: &'static str,
    eval: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl YoungFunction {
    pub fn new(name: &'static str, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name, eval: Box::new(eval) }
    }

    /// Q1(u) = u log(1+u): the L log L generator.
    pub fn llogl() -> Self {
        Self::new("u*log(1+u)", |u| u * (1.0 + u).ln())
    }

    /// Q2(u) = u sqrt(log(1+u)): grows strictly slower than u log u.
    pub fn sqrt_log() -> Self {
        Self::new("u*sqrt(log(1+u))", |u| u * (1.0 + u).ln().sqrt())
    }

    pub fn eval(&self, u: f64) -> f64 {
        (self.eval)(u)
    }

    /// Second-difference convexity probe on a geometric grid.
    pub fn is_convex_on_grid(&self, max: f64) -> bool {
        let mut u = 1e-6;
        while u < max {
            let h = u * 0.01;
            let second = self.eval(u + h) - 2.0 * self.eval(u) + self.eval(u - h).max(0.0).min(self.eval(u - h));
            if second < -1e-9 * self.eval(u).abs().max(1.0) {
                return false;
            }
            u *= 1.5;
        }
        true
    }
}

/// The Luxemburg norm `inf { k > 0 : E Q(|f|/k) <= 1 }` by bisection to
/// 1e-9 relative tolerance.  The zero function has norm 0.
pub fn luxemburg_norm<S: Scalar>(f: &CylinderFunction<S>, q: &YoungFunction) -> f64 {
    let depth = f.depth();
    let abs: Vec<f64> = f.values().iter().map(|v| v.to_f64().abs()).collect();
    if abs.iter().all(|&a| a == 0.0) {
        return 0.0;
    }
    let mean_q = |k: f64| -> f64 { abs.iter().map(|&a| q.eval(a / k)).sum::<f64>() / (1u64 << depth) as f64 };
    let mut hi = 1.0;
    while mean_q(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while mean_q(lo) <= 1.0 && lo > 1e-300 {
        lo /= 2.0;
    }
    for _ in 0..200 {
        if (hi - lo) / hi < 1e-9 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mean_q(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
