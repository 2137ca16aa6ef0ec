//! Periodic Poisson and Hilbert transforms on `T = ℝ / 2ℤ`.
//!
//! Periodising the half-plane kernels over the lattice `2ℤ` gives
//!
//! ```text
//! P_y(θ) = ½ sinh(πy) / (cosh(πy) − cos(πθ))
//! (Hf)(x) = ½ p.v. ∫_T f(t) cot(π(x − t)/2) dt
//! ```
//!
//! normalised so that `∫_T P_y = 1` and `H` agrees with the real-line
//! transform `(1/π) p.v. ∫ f(t)/(x − t) dt` on periodic data. Both integrals
//! are evaluated with tanh-sinh pieces whose endpoints sit on the kernel
//! singularity and on the break points of the integrand.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::hfun::{fold, wrap};
use crate::quadrature::{normalize_breaks, TanhSinhGrid};

/// Settings for the principal-value Hilbert quadrature and the lattice-sum
/// test oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicKernelConfig {
    /// Radius of the excluded interval around the singularity.
    pub epsilon: f64,
    /// Truncation of the lattice-sum oracles.
    pub oracle_terms: usize,
}

impl Default for PeriodicKernelConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-12,
            oracle_terms: 10_000,
        }
    }
}

impl PeriodicKernelConfig {
    pub fn new(epsilon: f64, oracle_terms: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Param(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        if oracle_terms < 1 {
            return Err(Error::Param("oracle_terms must be at least 1".into()));
        }
        Ok(Self { epsilon, oracle_terms })
    }
}

/// A 2-periodic real function together with the points of `[-1, 1)` where it
/// is singular or discontinuous.
pub trait PeriodicFunction: Sync {
    fn value(&self, x: f64) -> f64;

    fn breaks(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Wraps a closure as a [`PeriodicFunction`].
pub struct FnPeriodic<F> {
    f: F,
    breaks: Vec<f64>,
}

impl<F: Fn(f64) -> f64 + Sync> FnPeriodic<F> {
    pub fn new(f: F) -> Self {
        Self { f, breaks: Vec::new() }
    }

    pub fn with_breaks(f: F, breaks: Vec<f64>) -> Self {
        Self { f, breaks }
    }
}

impl<F: Fn(f64) -> f64 + Sync> PeriodicFunction for FnPeriodic<F> {
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn breaks(&self) -> Vec<f64> {
        self.breaks.clone()
    }
}

/// Kernel from `q = e^{-πy}` and `s2 = sin²(πθ/2)`:
/// `½ (1 − q²) / ((1 − q)² + 4 q s2)`.
#[inline]
fn kernel_from_parts(one_minus_q: f64, q: f64, s2: f64) -> f64 {
    0.5 * one_minus_q * (1.0 + q) / (one_minus_q * one_minus_q + 4.0 * q * s2)
}

#[inline]
fn half_sin_sq(theta: f64) -> f64 {
    let s = (FRAC_PI_2 * theta).sin();
    s * s
}

/// `½ sinh(πy) / (cosh(πy) − cos(πθ))`.
///
/// Evaluated as `½ (1 − q²)/((1 − q)² + 4q sin²(πθ/2))` with `q = e^{−πy}`,
/// which has no overflow and reaches the limit `½` once `q` underflows.
pub fn periodic_poisson_kernel(y: f64, theta: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("Poisson kernel needs y > 0, got {y}")));
    }
    let q = (-PI * y).exp();
    let one_minus_q = -(-PI * y).exp_m1();
    Ok(kernel_from_parts(one_minus_q, q, half_sin_sq(fold(theta))))
}

/// A quadrature node for the Poisson integral at a fixed `x`.
#[derive(Debug, Clone, Copy)]
pub struct KernelNode {
    pub t: f64,
    pub weight: f64,
    /// `sin²(π(x − t)/2)`, computed from the exact offset to the split point.
    pub s2: f64,
}

/// Nodes of the Poisson quadrature at `x`: the period `[-1, 1]` is split at
/// `x` and at `breaks`, so the kernel spike and the integrand singularities
/// all sit on tanh-sinh endpoints.
///
/// Everything here depends on `x` only; values of the integrand at the
/// nodes can be tabulated once and reused for every `y`.
pub fn poisson_nodes(x: f64, breaks: &[f64], grid: &TanhSinhGrid) -> Vec<KernelNode> {
    let x = wrap(x);
    let mut pts: Vec<f64> = breaks.iter().map(|&b| wrap(b)).collect();
    pts.push(x);
    let pts = normalize_breaks(pts, -1.0, 1.0);
    let mut out = Vec::with_capacity(grid.len() * (pts.len() - 1));
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        for n in grid.interval_nodes(lo, hi) {
            let offset = if hi == x {
                n.from_hi
            } else if lo == x {
                -n.from_lo
            } else if x == -1.0 && hi == 1.0 {
                // x = -1 is also the right end of the window.
                n.from_hi
            } else {
                x - n.t
            };
            out.push(KernelNode {
                t: n.t,
                weight: n.weight,
                s2: half_sin_sq(offset),
            });
        }
    }
    out
}

/// `Σ w K_y(x − t) f(t)` over tabulated node values.
pub fn poisson_sum(nodes: &[KernelNode], values: &[f64], y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("Poisson integral needs y > 0, got {y}")));
    }
    debug_assert_eq!(nodes.len(), values.len());
    let q = (-PI * y).exp();
    let one_minus_q = -(-PI * y).exp_m1();
    let mut acc = 0.0;
    for (n, &v) in nodes.iter().zip(values) {
        acc += n.weight * kernel_from_parts(one_minus_q, q, n.s2) * v;
    }
    Ok(acc)
}

/// Periodic Poisson integral `(P_y * f)(x)`.
pub fn poisson_integral(f: &dyn PeriodicFunction, x: f64, y: f64, grid: &TanhSinhGrid) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("Poisson integral needs y > 0, got {y}")));
    }
    let nodes = poisson_nodes(x, &f.breaks(), grid);
    let mut values = Vec::with_capacity(nodes.len());
    for n in &nodes {
        let v = f.value(n.t);
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: n.t, value: v });
        }
        values.push(v);
    }
    poisson_sum(&nodes, &values, y)
}

/// Periodic Hilbert transform `(Hf)(x)`, as the symmetrised integral
/// `½ ∫_ε^1 (f(x − τ) − f(x + τ)) cot(πτ/2) dτ`.
///
/// The range of `τ` is split wherever `x ± τ` meets a break of `f`.
pub fn hilbert_transform(
    f: &dyn PeriodicFunction,
    x: f64,
    grid: &TanhSinhGrid,
    cfg: &PeriodicKernelConfig,
) -> Result<f64> {
    let eps = cfg.epsilon;
    let mut taus: Vec<f64> = f.breaks().iter().map(|&b| fold(x - b)).collect();
    taus.push(fold(x + 1.0));
    let taus = normalize_breaks(taus, eps, 1.0);
    let value = grid
        .quad_pieces(&taus, |n| {
            let tau = n.t;
            (f.value(x - tau) - f.value(x + tau)) * 0.5 / (FRAC_PI_2 * tau).tan()
        })
        .map_err(|_| Error::HilbertNonFinite(x))?;
    if !value.is_finite() {
        return Err(Error::HilbertNonFinite(x));
    }
    Ok(value)
}

/// Lattice sums behind the periodic kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LatticeSum {
    /// `(1/π) Σ_k y / ((θ − 2k)² + y²)`, which equals the periodic Poisson
    /// kernel.
    Poisson { y: f64, theta: f64 },
    /// `Σ_{k≠0} 1/(t − 2k)`, which equals `(π/2) cot(πt/2) − 1/t`.
    Cotangent { t: f64 },
}

/// Symmetric partial sum `|k| ≤ terms` of a [`LatticeSum`], plus the
/// leading-order remainder `Σ_{|k|>terms}` from the `1/k²` decay of paired
/// terms (Euler–Maclaurin for `Σ_{k>K} 1/k²`).
///
/// Used as an independent check of the closed-form kernels.
pub fn lattice_sum_oracle(kind: LatticeSum, terms: usize) -> f64 {
    let big_k = terms.max(1) as f64;
    let inv_sq_tail = 1.0 / big_k - 0.5 / (big_k * big_k) + 1.0 / (6.0 * big_k.powi(3));
    match kind {
        LatticeSum::Poisson { y, theta } => {
            let mut acc = y / (theta * theta + y * y);
            for k in 1..=terms {
                let s = 2.0 * k as f64;
                acc += y / ((theta - s).powi(2) + y * y) + y / ((theta + s).powi(2) + y * y);
            }
            // Pair (k, −k) ≈ 2y/(4k²).
            acc += 0.5 * y * inv_sq_tail;
            acc / PI
        }
        LatticeSum::Cotangent { t } => {
            let mut acc = 0.0;
            for k in 1..=terms {
                let s = 2.0 * k as f64;
                acc += 1.0 / (t - s) + 1.0 / (t + s);
            }
            // Pair (k, −k) = 2t/(t² − 4k²) ≈ −t/(2k²).
            acc - 0.5 * t * inv_sq_tail
        }
    }
}
