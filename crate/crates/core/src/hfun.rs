//! h-functions, their generalised inverses and layer-cake moments.
//!
//! An h-function is the distribution function of the exit radius: it is
//! nondecreasing, right-continuous, vanishes below the distance `d_min` to
//! the boundary and tends to one. The generalised inverse
//! `g(s) = inf{r ≥ 0 : h(r) ≥ s}` is extended evenly and 2-periodically to
//! the torus `T = ℝ / 2ℤ`, whose fundamental domain is `(-1, 1]`.

use std::sync::Arc;

use crate::catalog::CatalogH;
use crate::error::{Error, Result};
use crate::quadrature::{normalize_breaks, TanhSinhGrid};

/// Numerical ceiling substituted for `g = +∞`; `ln(1e300) ≈ 690.8` keeps
/// `exp` finite.
pub const DEFAULT_CAP: f64 = 1e300;

/// Representation of an h-function.
#[derive(Debug, Clone, PartialEq)]
pub enum HKind {
    /// A closed-form entry of the built-in catalog.
    Catalog(CatalogH),
    /// `h(r) = values[i]` for `breakpoints[i] ≤ r < breakpoints[i+1]`,
    /// zero below `breakpoints[0]`.
    Step { breakpoints: Vec<f64>, values: Vec<f64> },
    /// Piecewise-linear interpolation of `(radii[i], values[i])`, zero below
    /// the first radius.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
}

/// A validated h-function.
#[derive(Debug, Clone, PartialEq)]
pub struct HFunction {
    kind: HKind,
    d_min: f64,
}

fn check_probabilities(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidH("empty table".into()));
    }
    for &v in values {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidH(format!("value {v} outside [0, 1]")));
        }
    }
    for w in values.windows(2) {
        if w[1] < w[0] {
            return Err(Error::InvalidH(format!(
                "values are not nondecreasing ({} then {})",
                w[0], w[1]
            )));
        }
    }
    if *values.last().unwrap() != 1.0 {
        return Err(Error::InvalidH("last value must be 1".into()));
    }
    Ok(())
}

fn check_radii(radii: &[f64]) -> Result<()> {
    for &r in radii {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidH(format!(
                "radius {r} is not a finite nonnegative number"
            )));
        }
    }
    for w in radii.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidH(format!(
                "radii are not strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

impl HFunction {
    pub fn catalog(entry: CatalogH) -> Self {
        let d_min = entry.d_min();
        Self {
            kind: HKind::Catalog(entry),
            d_min,
        }
    }

    pub fn step(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::InvalidH(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        check_radii(&breakpoints)?;
        check_probabilities(&values)?;
        if values[0] == 0.0 {
            return Err(Error::InvalidH("first step value must be positive".into()));
        }
        let d_min = breakpoints[0];
        Ok(Self {
            kind: HKind::Step { breakpoints, values },
            d_min,
        })
    }

    pub fn tabulated(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() != values.len() {
            return Err(Error::InvalidH(format!(
                "{} radii but {} values",
                radii.len(),
                values.len()
            )));
        }
        check_radii(&radii)?;
        check_probabilities(&values)?;
        let d_min = if values[0] > 0.0 {
            radii[0]
        } else {
            let last_zero = values.iter().rposition(|&v| v == 0.0).unwrap();
            radii[last_zero]
        };
        Ok(Self {
            kind: HKind::Tabulated { radii, values },
            d_min,
        })
    }

    pub fn kind(&self) -> &HKind {
        &self.kind
    }

    /// Largest radius below which `h ≡ 0`.
    pub fn d_min(&self) -> f64 {
        self.d_min
    }

    pub fn catalog_entry(&self) -> Option<&CatalogH> {
        match &self.kind {
            HKind::Catalog(c) => Some(c),
            _ => None,
        }
    }

    /// `h(r)`.
    pub fn eval(&self, r: f64) -> f64 {
        match &self.kind {
            HKind::Catalog(c) => c.h(r),
            HKind::Step { breakpoints, values } => {
                let i = breakpoints.partition_point(|&b| b <= r);
                if i == 0 {
                    0.0
                } else {
                    values[i - 1]
                }
            }
            HKind::Tabulated { radii, values } => {
                let i = radii.partition_point(|&b| b <= r);
                if i == 0 {
                    0.0
                } else if i == radii.len() {
                    values[i - 1]
                } else {
                    let (r0, r1) = (radii[i - 1], radii[i]);
                    let (v0, v1) = (values[i - 1], values[i]);
                    if r == r0 {
                        v0
                    } else {
                        v0 + (v1 - v0) * (r - r0) / (r1 - r0)
                    }
                }
            }
        }
    }

    /// Left limit `h(r-)`.
    pub fn eval_left(&self, r: f64) -> f64 {
        match &self.kind {
            HKind::Catalog(c) => c.h_left(r),
            HKind::Step { breakpoints, values } => {
                let i = breakpoints.partition_point(|&b| b < r);
                if i == 0 {
                    0.0
                } else {
                    values[i - 1]
                }
            }
            HKind::Tabulated { radii, .. } => {
                if r <= radii[0] {
                    0.0
                } else {
                    self.eval(r)
                }
            }
        }
    }

    /// Uncapped generalised inverse; `+∞` when `h` never reaches `s`.
    ///
    /// At `s = 0` the right limit `inf{r : h(r) > 0}` is returned, so that
    /// `ln g` stays finite at the single point `s = 0`.
    fn inverse(&self, s: f64) -> f64 {
        match &self.kind {
            HKind::Catalog(c) => c.g(s),
            HKind::Step { breakpoints, values } => {
                if s <= 0.0 {
                    return breakpoints[0];
                }
                let i = values.partition_point(|&v| v < s);
                breakpoints.get(i).copied().unwrap_or(f64::INFINITY)
            }
            HKind::Tabulated { radii, values } => {
                if s <= 0.0 {
                    return self.d_min;
                }
                let j = values.partition_point(|&v| v < s);
                if j == values.len() {
                    return f64::INFINITY;
                }
                if j == 0 || values[j] == s {
                    return radii[j];
                }
                let (r0, r1) = (radii[j - 1], radii[j]);
                let (v0, v1) = (values[j - 1], values[j]);
                r0 + (s - v0) / (v1 - v0) * (r1 - r0)
            }
        }
    }

    /// Probabilities `s ∈ (0, 1)` at which the inverse is discontinuous or
    /// has a corner. Quadratures split there.
    pub fn inverse_breaks(&self) -> Vec<f64> {
        let mut out: Vec<f64> = match &self.kind {
            HKind::Catalog(c) => c.jumps(),
            HKind::Step { values, .. } | HKind::Tabulated { values, .. } => values.clone(),
        };
        out.retain(|&s| s > 0.0 && s < 1.0);
        out.sort_by(|a, b| a.total_cmp(b));
        out.dedup();
        out
    }

    /// Probabilities `s ∈ (0, 1)` where the inverse jumps.
    pub fn inverse_jumps(&self) -> Vec<f64> {
        match &self.kind {
            HKind::Catalog(c) => c.jumps(),
            HKind::Step { values, .. } => {
                let mut v: Vec<f64> = values.iter().copied().filter(|&s| s > 0.0 && s < 1.0).collect();
                v.dedup();
                v
            }
            HKind::Tabulated { radii, values } => {
                // g jumps where h is flat between two table radii.
                let mut v = Vec::new();
                for i in 0..radii.len().saturating_sub(1) {
                    if values[i] == values[i + 1] && values[i] > 0.0 && values[i] < 1.0 {
                        v.push(values[i]);
                    }
                }
                v.dedup();
                v
            }
        }
    }

    /// Radii at which `h` is not smooth.
    pub fn radius_breaks(&self) -> Vec<f64> {
        match &self.kind {
            HKind::Catalog(c) => c.radius_breaks(),
            HKind::Step { breakpoints, .. } => breakpoints.clone(),
            HKind::Tabulated { radii, .. } => radii.clone(),
        }
    }
}

/// `x ↦ |((x + 1) mod 2) - 1|`, folding the line onto `[0, 1]` evenly with
/// period 2.
pub fn fold(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        return a;
    }
    let r = a.rem_euclid(2.0);
    if r > 1.0 {
        2.0 - r
    } else {
        r
    }
}

/// Reduces `x` to the fundamental window `[-1, 1)`.
pub fn wrap(x: f64) -> f64 {
    if (-1.0..1.0).contains(&x) {
        return x;
    }
    let r = x.rem_euclid(2.0);
    if r >= 1.0 {
        r - 2.0
    } else {
        r
    }
}

/// Generalised inverse `inf{r ≥ 0 : h(r) ≥ s}` with the default cap.
pub fn ginv(h: &HFunction, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Probability(s));
    }
    Ok(h.inverse(s).min(DEFAULT_CAP))
}

/// Estimate of `∫_{-1}^{1} |ln g̃|^p`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PNormEstimate {
    pub p: f64,
    /// The integral `∫_T |ln g̃|^p` (not its `p`-th root).
    pub integral: f64,
    /// Share of the integral contributed by the outermost tanh-sinh nodes.
    pub tail_fraction: f64,
    pub finite: bool,
}

/// Generalised inverse with its even periodic extension.
#[derive(Debug, Clone)]
pub struct GInverse {
    source: Arc<HFunction>,
    cap: f64,
}

impl GInverse {
    pub fn new(source: Arc<HFunction>) -> Self {
        Self::with_cap(source, DEFAULT_CAP)
    }

    pub fn with_cap(source: Arc<HFunction>, cap: f64) -> Self {
        assert!(cap > 0.0 && cap.is_finite(), "cap must be positive and finite");
        Self { source, cap }
    }

    pub fn source(&self) -> &HFunction {
        &self.source
    }

    pub fn source_arc(&self) -> Arc<HFunction> {
        Arc::clone(&self.source)
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    /// `g(s)` clamped to `[0, cap]`; `s` is clamped to `[0, 1]`.
    pub fn eval(&self, s: f64) -> f64 {
        self.source.inverse(s.clamp(0.0, 1.0)).min(self.cap)
    }

    /// `g̃(x) = g(fold(x))`.
    pub fn periodic(&self, x: f64) -> f64 {
        self.eval(fold(x))
    }

    /// `min(ln g̃(x), ln cap)`.
    pub fn ln_periodic(&self, x: f64) -> f64 {
        self.periodic(x).ln()
    }

    /// `ln g̃(x)`, failing when `ln g` is not locally integrable.
    pub fn log_g(&self, x: f64) -> Result<f64> {
        self.check_log_integrable()?;
        Ok(self.ln_periodic(x))
    }

    fn check_log_integrable(&self) -> Result<()> {
        let mass_at_zero = self.source.eval(0.0);
        if mass_at_zero > 0.0 {
            return Err(Error::LogNotIntegrable(format!(
                "h(0) = {mass_at_zero}, so g vanishes on [0, {mass_at_zero}]"
            )));
        }
        Ok(())
    }

    /// True when `g(1)` hits the cap, i.e. the domain is unbounded.
    pub fn is_unbounded(&self) -> bool {
        self.eval(1.0) >= self.cap
    }

    /// Points of `[-1, 1)` where `ln g̃` is singular or discontinuous: the
    /// odd integers when `g` is unbounded and `±s` for every jump `s` of `g`.
    pub fn singular_points(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        if self.is_unbounded() {
            pts.push(-1.0);
        }
        for s in self.source.inverse_jumps() {
            pts.push(s);
            pts.push(-s);
        }
        pts.sort_by(|a, b| a.total_cmp(b));
        pts.dedup();
        pts
    }

    /// Points of `[-1, 1)` where quadratures over `ln g̃` should split.
    pub fn quadrature_breaks(&self) -> Vec<f64> {
        let mut pts = vec![-1.0, 0.0];
        for s in self.source.inverse_breaks() {
            pts.push(s);
            pts.push(-s);
        }
        pts.sort_by(|a, b| a.total_cmp(b));
        pts.dedup();
        pts
    }

    /// Quadrature estimate of `∫_{-1}^{1} |ln g̃|^p`.
    pub fn log_norm(&self, p: f64, grid: &TanhSinhGrid) -> Result<PNormEstimate> {
        self.check_log_integrable()?;
        pnorm_estimate(|x| self.ln_periodic(x), &self.quadrature_breaks(), p, grid)
    }
}

/// Quadrature estimate of `∫_{-1}^{1} |f|^p`, split at `breaks`.
///
/// `finite` is cleared when the nodes within `1e-9` (relative) of a break
/// carry more than `1e-3` of the total, the signature of a non-integrable
/// singularity under a rule that never samples the singular point itself.
pub fn pnorm_estimate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], p: f64, grid: &TanhSinhGrid) -> Result<PNormEstimate> {
    if !(p > 0.0) {
        return Err(Error::Param(format!("p-norm exponent must be positive, got {p}")));
    }
    let breaks = normalize_breaks(breaks.to_vec(), -1.0, 1.0);
    let mut total = 0.0;
    let mut tail = 0.0;
    let edge = 1e-9;
    for w in breaks.windows(2) {
        let width = w[1] - w[0];
        for node in grid.interval_nodes(w[0], w[1]) {
            let c = node.weight * f(node.t).abs().powf(p);
            total += c;
            if node.from_lo.min(node.from_hi) < edge * width {
                tail += c;
            }
        }
    }
    let tail_fraction = if total > 0.0 { tail / total } else { 0.0 };
    Ok(PNormEstimate {
        p,
        integral: total,
        tail_fraction,
        finite: total.is_finite() && tail_fraction < 1e-3,
    })
}

/// Result of a layer-cake moment computation.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MomentEstimate {
    pub p: f64,
    pub r_max: f64,
    pub value: f64,
    pub divergent: bool,
    /// Integrals over the complete decades `[10^k, 10^{k+1}]` inside the range.
    pub decades: Vec<f64>,
}

/// `∫_0^{r_max} p r^{p-1} (1 - h(r)) dr`, i.e. `E|Z_τ|^p` truncated at
/// `r_max`, with a decade-ratio divergence flag: the last three ratios of
/// consecutive complete-decade integrals all exceed `0.5`.
pub fn moment_from_h(h: &HFunction, p: f64, r_max: f64, grid: &TanhSinhGrid) -> Result<MomentEstimate> {
    if !(p > 0.0) {
        return Err(Error::Param(format!("moment order must be positive, got {p}")));
    }
    let d = h.d_min();
    if !(r_max > d) {
        return Err(Error::Param(format!("r_max = {r_max} must exceed d_min = {d}")));
    }
    // 1 - h ≡ 1 on [0, d_min).
    let mut value = d.powf(p);

    let k_lo = if d > 0.0 { d.log10().floor() as i32 } else { -6 };
    let k_hi = r_max.log10().ceil() as i32;
    let mut breaks: Vec<f64> = (k_lo..=k_hi).map(|k| 10f64.powi(k)).collect();
    breaks.extend(h.radius_breaks());
    let breaks = normalize_breaks(breaks, d, r_max);

    let integrand = |r: f64| p * r.powf(p - 1.0) * (1.0 - h.eval(r));
    let mut decade_sums: std::collections::BTreeMap<i32, f64> = Default::default();
    for w in breaks.windows(2) {
        let piece = grid.quad_interval(w[0], w[1], |n| integrand(n.t))?;
        value += piece;
        let k = (w[0] * (1.0 + 1e-12)).log10().floor() as i32;
        *decade_sums.entry(k).or_default() += piece;
    }
    let decades: Vec<f64> = decade_sums
        .into_iter()
        .filter(|(k, _)| {
            let lo = 10f64.powi(*k);
            let hi = 10f64.powi(*k + 1);
            lo >= d * (1.0 - 1e-12) && hi <= r_max * (1.0 + 1e-12)
        })
        .map(|(_, v)| v)
        .collect();
    let divergent = decades.len() >= 4
        && decades[decades.len() - 4..]
            .windows(2)
            .all(|w| w[0] > 0.0 && w[1] / w[0] > 0.5);
    Ok(MomentEstimate {
        p,
        r_max,
        value,
        divergent,
        decades,
    })
}
