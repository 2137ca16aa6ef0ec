//! Tanh-sinh (double exponential) quadrature on `[-1, 1]`.
//!
//! The substitution `t = tanh(π/2 · sinh(u))` turns endpoint singularities
//! into integrands with double-exponential decay, after which the plain
//! trapezoid rule with spacing `step = 2 / M` is used. Nodes are stored
//! together with their distance to the nearer endpoint, computed without
//! cancellation, so integrands that are singular at an endpoint (or kernels
//! peaked there) can be evaluated accurately.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use crate::error::{Error, Result};

/// Default term count `M`.
pub const DEFAULT_TERMS: usize = 1000;

/// Truncation of the trapezoid sum in the transformed variable. At `|u| = 3`
/// the node sits `4.4e-14` from the endpoint, still representable as a
/// distinct double, and the neglected mass is below `1e-13`.
const U_MAX: f64 = 3.0;

/// Nodes and weights of the tanh-sinh rule.
#[derive(Debug, Clone)]
pub struct TanhSinhGrid {
    terms: usize,
    step: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `1 - |t_k|`, computed directly from the exponential form.
    complements: Vec<f64>,
}

/// One node of the rule mapped onto `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
pub struct IntervalNode {
    pub t: f64,
    /// `t - lo`, accurate even when `t` is within rounding of `lo`.
    pub from_lo: f64,
    /// `hi - t`, accurate even when `t` is within rounding of `hi`.
    pub from_hi: f64,
    pub weight: f64,
}

impl TanhSinhGrid {
    /// Builds the rule with spacing `2 / terms`.
    ///
    /// # Panics
    /// If `terms == 0`.
    pub fn new(terms: usize) -> Self {
        assert!(terms > 0, "tanh-sinh term count must be positive");
        let step = 2.0 / terms as f64;
        let half = (U_MAX / step).ceil() as i64;
        let len = (2 * half + 1) as usize;
        let mut nodes = Vec::with_capacity(len);
        let mut weights = Vec::with_capacity(len);
        let mut complements = Vec::with_capacity(len);
        for k in -half..=half {
            let u = k as f64 * step;
            let s = FRAC_PI_2 * u.sinh();
            // 1 - tanh|s| = 2 e^{-2|s|} / (1 + e^{-2|s|})
            let e = (-2.0 * s.abs()).exp();
            let comp = 2.0 * e / (1.0 + e);
            let t = s.tanh();
            let cosh_s = s.cosh();
            let w = step * FRAC_PI_2 * u.cosh() / (cosh_s * cosh_s);
            nodes.push(t);
            weights.push(w);
            complements.push(comp);
        }
        Self {
            terms,
            step,
            nodes,
            weights,
            complements,
        }
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_k f(t_k)` over `[-1, 1]`.
    pub fn quad<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let mut acc = 0.0;
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(t);
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { node: t, value: v });
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// Nodes of the rule linearly mapped onto `[lo, hi]`, weights scaled by
    /// the Jacobian.
    pub fn interval_nodes(&self, lo: f64, hi: f64) -> impl Iterator<Item = IntervalNode> + '_ {
        let width = hi - lo;
        let half = 0.5 * width;
        let mid = self.nodes.len() / 2;
        (0..self.nodes.len()).map(move |k| {
            let gap = half * self.complements[k];
            let (t, from_lo, from_hi) = if k < mid {
                (lo + gap, gap, width - gap)
            } else if k > mid {
                (hi - gap, width - gap, gap)
            } else {
                (lo + half, half, half)
            };
            IntervalNode {
                t,
                from_lo,
                from_hi,
                weight: half * self.weights[k],
            }
        })
    }

    /// `∫_lo^hi f` where the integrand receives the full [`IntervalNode`].
    pub fn quad_interval<F: FnMut(&IntervalNode) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> Result<f64> {
        let mut acc = 0.0;
        for node in self.interval_nodes(lo, hi) {
            let v = f(&node);
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { node: node.t, value: v });
            }
            acc += node.weight * v;
        }
        Ok(acc)
    }

    /// Integral over `[breaks[0], breaks[last]]` split at every interior
    /// break. `breaks` must be ascending.
    pub fn quad_pieces<F: FnMut(&IntervalNode) -> f64>(&self, breaks: &[f64], mut f: F) -> Result<f64> {
        let mut acc = 0.0;
        for w in breaks.windows(2) {
            if w[1] > w[0] {
                acc += self.quad_interval(w[0], w[1], &mut f)?;
            }
        }
        Ok(acc)
    }

    /// Dumps the node/weight table as CSV (`k,node,weight`).
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "k,node,weight")?;
        let half = (self.nodes.len() / 2) as i64;
        for (i, (t, w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            writeln!(out, "{},{:.16e},{:.16e}", i as i64 - half, t, w)?;
        }
        Ok(())
    }
}

impl Default for TanhSinhGrid {
    fn default() -> Self {
        Self::new(DEFAULT_TERMS)
    }
}

/// Sorts, removes near-duplicates and clips break positions to `[lo, hi]`.
pub(crate) fn normalize_breaks(mut breaks: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    breaks.retain(|b| b.is_finite() && *b > lo && *b < hi);
    breaks.push(lo);
    breaks.push(hi);
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));
    breaks
}
