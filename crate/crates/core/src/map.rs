//! The holomorphic map `f(z) = exp(u + iv + iαπz)` on the upper half-plane.
//!
//! On the real line `u = ln g̃` and `v = H ln g̃`; in the interior both are
//! replaced by their periodic Poisson extensions. The Poisson quadrature at a
//! fixed `x` only needs `ln g̃` and `H ln g̃` at a fixed set of nodes, so those
//! are tabulated once per `x` ([`LineCache`]) and reused for every height.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::CatalogH;
use crate::error::{Error, Result};
use crate::geometry::{bounding_box, Segment, SegmentTree};
use crate::hfun::{wrap, GInverse, PNormEstimate};
use crate::quadrature::TanhSinhGrid;
use crate::rational::Rational;
use crate::transforms::{hilbert_transform, poisson_nodes, FnPeriodic, KernelNode, PeriodicKernelConfig};

/// Exponents at which the `L^p` hypothesis on `ln g` is checked.
pub const PNORM_EXPONENTS: [f64; 3] = [1.1, 1.5, 2.0];

/// Term count of the grid used for `H ln g̃` at Poisson nodes when no closed
/// form is available.
pub const NESTED_HILBERT_TERMS: usize = 256;

/// Where `H ln g̃` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HilbertMode {
    /// Closed form when the source is a catalog entry that has one.
    #[default]
    Auto,
    /// Always use quadrature.
    Numeric,
}

/// `ln g̃` and `H ln g̃` at the Poisson nodes of one vertical line.
#[derive(Debug)]
pub struct LineCache {
    pub nodes: Vec<KernelNode>,
    pub log_g: Vec<f64>,
    pub hilbert: Vec<f64>,
}

/// The assembled map.
#[derive(Debug)]
pub struct MapSpec {
    g: GInverse,
    alpha: Rational,
    grid: Arc<TanhSinhGrid>,
    nested_grid: Arc<TanhSinhGrid>,
    cfg: PeriodicKernelConfig,
    analytic: Option<CatalogH>,
    breaks: Vec<f64>,
    pnorm: Vec<PNormEstimate>,
    warnings: Vec<String>,
    hilbert_memo: RwLock<HashMap<u64, f64>>,
    lines: RwLock<HashMap<u64, Arc<LineCache>>>,
}

/// Value of the map with a flag for magnitudes beyond the cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapValue {
    pub value: Complex64,
    pub saturated: bool,
}

/// Builds the map with the analytic Hilbert transform where available.
pub fn build_map(g: GInverse, alpha: Rational, grid: TanhSinhGrid, cfg: PeriodicKernelConfig) -> Result<MapSpec> {
    MapSpec::build(g, alpha, grid, cfg, HilbertMode::Auto)
}

/// Shorthand for [`MapSpec::eval`].
pub fn eval_map(spec: &MapSpec, z: Complex64) -> Result<MapValue> {
    spec.eval(z)
}

impl MapSpec {
    pub fn build(
        g: GInverse,
        alpha: Rational,
        grid: TanhSinhGrid,
        cfg: PeriodicKernelConfig,
        mode: HilbertMode,
    ) -> Result<Self> {
        let mut warnings = Vec::new();
        let mut pnorm = Vec::new();
        for p in PNORM_EXPONENTS {
            pnorm.push(g.log_norm(p, &grid)?);
        }
        if pnorm.iter().all(|e| !e.finite) {
            warnings.push(format!(
                "ln g does not look L^p-integrable for any p in {PNORM_EXPONENTS:?}; the map may be meaningless"
            ));
        }
        let analytic = match mode {
            HilbertMode::Auto => g.source().catalog_entry().copied().filter(|c| c.has_analytic_hilbert()),
            HilbertMode::Numeric => None,
        };
        let nested_grid = if grid.terms() <= NESTED_HILBERT_TERMS {
            grid.clone()
        } else {
            TanhSinhGrid::new(NESTED_HILBERT_TERMS)
        };
        let mut spec = Self {
            breaks: g.quadrature_breaks(),
            g,
            alpha,
            grid: Arc::new(grid),
            nested_grid: Arc::new(nested_grid),
            cfg,
            analytic,
            pnorm,
            warnings,
            hilbert_memo: RwLock::new(HashMap::new()),
            lines: RwLock::new(HashMap::new()),
        };
        if spec.analytic.is_none() {
            // Resolution check: compare the transform on the full grid with
            // one at half the term count.
            let x = 0.5;
            let full = spec.hilbert_with(x, &spec.grid)?;
            let half = spec.hilbert_with(x, &TanhSinhGrid::new((spec.grid.terms() / 2).max(1)))?;
            if (full - half).abs() > 1e-6 {
                spec.warnings.push(format!(
                    "Hilbert transform changes by {:.3e} when M is halved; consider raising M",
                    (full - half).abs()
                ));
            }
        }
        for w in &spec.warnings {
            log::warn!("{w}");
        }
        Ok(spec)
    }

    pub fn g(&self) -> &GInverse {
        &self.g
    }

    pub fn alpha(&self) -> Rational {
        self.alpha
    }

    pub fn grid(&self) -> &TanhSinhGrid {
        &self.grid
    }

    pub fn cfg(&self) -> &PeriodicKernelConfig {
        &self.cfg
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn pnorm_estimates(&self) -> &[PNormEstimate] {
        &self.pnorm
    }

    pub fn uses_analytic_hilbert(&self) -> bool {
        self.analytic.is_some()
    }

    pub fn joint_period(&self) -> f64 {
        self.alpha.joint_period()
    }

    fn hilbert_with(&self, x: f64, grid: &TanhSinhGrid) -> Result<f64> {
        let g = &self.g;
        let f = FnPeriodic::with_breaks(|t| g.ln_periodic(t), self.breaks.clone());
        hilbert_transform(&f, x, grid, &self.cfg)
    }

    /// `H ln g̃ (x)`: closed form, or quadrature memoised on `wrap(x)`.
    pub fn boundary_hilbert(&self, x: f64) -> Result<f64> {
        if let Some(c) = self.analytic {
            let v = c.analytic_hilbert(x).unwrap_or(f64::NAN);
            return if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::HilbertNonFinite(x))
            };
        }
        let key = wrap(x).to_bits();
        if let Some(&v) = self.hilbert_memo.read().unwrap().get(&key) {
            return Ok(v);
        }
        let v = self.hilbert_with(wrap(x), &self.grid)?;
        self.hilbert_memo.write().unwrap().insert(key, v);
        Ok(v)
    }

    fn nested_hilbert(&self, t: f64) -> Result<f64> {
        match self.analytic {
            Some(c) => Ok(c.analytic_hilbert(t).unwrap_or(f64::NAN)),
            None => self.hilbert_with(t, &self.nested_grid),
        }
    }

    /// Tabulated integrands for the vertical line through `x`.
    pub fn line_cache(&self, x: f64) -> Result<Arc<LineCache>> {
        let key = wrap(x).to_bits();
        if let Some(c) = self.lines.read().unwrap().get(&key) {
            return Ok(Arc::clone(c));
        }
        let nodes = poisson_nodes(x, &self.breaks, &self.grid);
        let log_g: Vec<f64> = nodes.iter().map(|n| self.g.ln_periodic(n.t)).collect();
        let hilbert: Vec<f64> = if self.analytic.is_some() {
            nodes.iter().map(|n| self.nested_hilbert(n.t)).collect::<Result<_>>()?
        } else {
            nodes
                .par_iter()
                .map(|n| self.nested_hilbert(n.t))
                .collect::<Result<_>>()?
        };
        for (i, n) in nodes.iter().enumerate() {
            for v in [log_g[i], hilbert[i]] {
                if !v.is_finite() {
                    return Err(Error::NonFiniteIntegrand { node: n.t, value: v });
                }
            }
        }
        let cache = Arc::new(LineCache { nodes, log_g, hilbert });
        // Concurrent builders produce identical caches, so either may win.
        self.lines
            .write()
            .unwrap()
            .entry(key)
            .or_insert_with(|| Arc::clone(&cache));
        Ok(cache)
    }

    /// `(u, v)` at `x + iy`; on `y = 0` the boundary values.
    pub fn harmonic_pair(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        if y < 0.0 || !y.is_finite() || !x.is_finite() {
            return Err(Error::Domain(format!("map evaluated at {x} + {y}i")));
        }
        if y == 0.0 {
            return Ok((self.g.ln_periodic(x), self.boundary_hilbert(x)?));
        }
        let line = self.line_cache(x)?;
        let u = crate::transforms::poisson_sum(&line.nodes, &line.log_g, y)?;
        let v = crate::transforms::poisson_sum(&line.nodes, &line.hilbert, y)?;
        Ok((u, v))
    }

    /// `f(z)` for `Im z ≥ 0`.
    pub fn eval(&self, z: Complex64) -> Result<MapValue> {
        let (u, v) = self.harmonic_pair(z.re, z.im)?;
        let a = self.alpha.to_f64() * PI;
        let log_mag = u - a * z.im;
        let ln_cap = self.g.cap().ln();
        let saturated = log_mag >= ln_cap;
        let mag = if saturated { self.g.cap() } else { log_mag.exp() };
        let arg = v + a * z.re;
        Ok(MapValue {
            value: Complex64::from_polar(mag, arg),
            saturated,
        })
    }
}

/// Settings for [`trace_boundary_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub n_points: usize,
    /// Components running into a singularity of `g̃` stop where `|f|` reaches
    /// this radius.
    pub r_trace: f64,
    /// Components ending at a jump of `g` stop this far (in `x`) short of it.
    pub jump_gap: f64,
    /// Refinement stops at `budget_factor · n_points` points.
    pub budget_factor: usize,
    /// Chords longer than this fraction of the bounding-box diagonal are split.
    pub chord_fraction: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            n_points: 1024,
            r_trace: 1e4,
            jump_gap: 1e-4,
            budget_factor: 16,
            chord_fraction: 1.0 / 256.0,
        }
    }
}

/// The image `f(ℝ)` over one joint period, split into components.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    pub points: Vec<Complex64>,
    pub params: Vec<f64>,
    pub component_labels: Vec<usize>,
    /// `|f(x)|` per point; `g̃(x)` exactly for traces built from a map.
    pub radii: Vec<f64>,
    /// True when the trace is a single closed curve.
    pub closed: bool,
}

impl BoundaryTrace {
    /// A trace with radii taken from the point magnitudes.
    pub fn new(points: Vec<Complex64>, params: Vec<f64>, component_labels: Vec<usize>, closed: bool) -> Self {
        let radii = points.iter().map(|p| p.norm()).collect();
        Self {
            points,
            params,
            component_labels,
            radii,
            closed,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn component_count(&self) -> usize {
        let mut labels = self.component_labels.clone();
        labels.sort_unstable();
        labels.dedup();
        labels.len()
    }

    /// Point slices of the components, in label order of appearance.
    pub fn components(&self) -> Vec<&[Complex64]> {
        self.component_ranges().into_iter().map(|r| &self.points[r]).collect()
    }

    /// Index ranges of the components.
    pub fn component_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.points.len() {
            if i == self.points.len() || self.component_labels[i] != self.component_labels[start] {
                out.push(start..i);
                start = i;
            }
        }
        out
    }

    /// Segment tree over all component polylines.
    pub fn segment_tree(&self) -> SegmentTree {
        SegmentTree::from_polylines(self.components())
    }

    pub fn bbox_diagonal(&self) -> f64 {
        bounding_box(&self.points).map_or(0.0, |(lo, hi)| (hi - lo).norm())
    }
}

/// Summary of a boundary trace for reports.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentSummary {
    pub empirical: usize,
    /// `½·lcm(2, 2/α) = q` for `α = p/q`, the count predicted when `g̃` has
    /// one singularity per period.
    pub formula: u64,
    pub joint_period: f64,
}

pub fn component_summary(spec: &MapSpec, trace: &BoundaryTrace) -> ComponentSummary {
    ComponentSummary {
        empirical: trace.component_count(),
        formula: spec.alpha.denom(),
        joint_period: spec.joint_period(),
    }
}

pub fn trace_boundary(spec: &MapSpec, n_points: usize) -> Result<BoundaryTrace> {
    trace_boundary_with(
        spec,
        &TraceOptions {
            n_points,
            ..TraceOptions::default()
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum End {
    Cap,
    Jump,
}

/// Start of the tracing window: the first singular point of `[-1, 1)`.
pub fn window_start(g: &GInverse) -> f64 {
    g.singular_points().first().copied().unwrap_or(-1.0)
}

pub fn trace_boundary_with(spec: &MapSpec, opts: &TraceOptions) -> Result<BoundaryTrace> {
    if opts.n_points < 16 {
        return Err(Error::Param(format!(
            "n_points must be at least 16, got {}",
            opts.n_points
        )));
    }
    let g = &spec.g;
    let period = spec.joint_period();
    let x0 = window_start(g);
    let x1 = x0 + period;
    let n = opts.n_points;

    // Singular points across the window, with their kind.
    let cap_pts: Vec<f64> = if g.is_unbounded() { vec![-1.0] } else { Vec::new() };
    let mut sing: Vec<(f64, End)> = Vec::new();
    for s in g.singular_points() {
        let kind = if cap_pts.contains(&s) { End::Cap } else { End::Jump };
        let mut m = ((x0 - s) / 2.0).floor() as i64 - 1;
        loop {
            let p = s + 2.0 * m as f64;
            if p > x1 + 1e-12 {
                break;
            }
            if p >= x0 - 1e-12 {
                sing.push((p, kind));
            }
            m += 1;
        }
    }
    sing.sort_by(|a, b| a.0.total_cmp(&b.0));
    sing.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12);

    // (component x-samples) before refinement.
    let mut comps: Vec<Vec<f64>> = Vec::new();
    let closed = sing.is_empty();
    if closed {
        comps.push((0..=n).map(|k| x0 + period * k as f64 / n as f64).collect());
    } else {
        let mut ends = sing.clone();
        if (ends.last().unwrap().0 - x1).abs() > 1e-12 {
            // The window starts at a singular point, so this only happens
            // through rounding.
            ends.push((x1, ends[0].1));
        }
        for w in ends.windows(2) {
            let ((a, ka), (b, kb)) = (w[0], w[1]);
            let lo = a + end_offset(g, a, b, ka, opts, true);
            let hi = b - end_offset(g, a, b, kb, opts, false);
            let mut xs = vec![lo];
            for k in 0..n {
                let x = x0 + period * (k as f64 + 0.5) / n as f64;
                if x > lo && x < hi {
                    xs.push(x);
                }
            }
            xs.push(hi);
            comps.push(xs);
        }
    }

    let mut values: Vec<Vec<MapValue>> = Vec::with_capacity(comps.len());
    for xs in &comps {
        values.push(eval_boundary_batch(spec, xs)?);
    }
    if values.iter().flatten().all(|v| v.saturated) {
        return Err(Error::DegenerateTrace("every trace point is saturated".into()));
    }

    // Chord refinement.
    let budget = opts.budget_factor.max(1) * n;
    loop {
        let total: usize = comps.iter().map(Vec::len).sum();
        if total >= budget {
            break;
        }
        let all: Vec<Complex64> = values.iter().flatten().map(|v| v.value).collect();
        let diag = bounding_box(&all).map_or(0.0, |(lo, hi)| (hi - lo).norm());
        let limit = diag * opts.chord_fraction;
        let mut room = budget - total;
        let mut inserted = false;
        for (xs, vals) in comps.iter_mut().zip(values.iter_mut()) {
            let mut mids = Vec::new();
            for i in 0..xs.len() - 1 {
                if room == 0 {
                    break;
                }
                let mid = 0.5 * (xs[i] + xs[i + 1]);
                if (vals[i + 1].value - vals[i].value).norm() > limit && mid > xs[i] && mid < xs[i + 1] {
                    mids.push((i, mid));
                    room -= 1;
                }
            }
            if mids.is_empty() {
                continue;
            }
            inserted = true;
            let mid_x: Vec<f64> = mids.iter().map(|m| m.1).collect();
            let mid_v = eval_boundary_batch(spec, &mid_x)?;
            let mut new_x = Vec::with_capacity(xs.len() + mids.len());
            let mut new_v = Vec::with_capacity(xs.len() + mids.len());
            let mut j = 0;
            for i in 0..xs.len() {
                new_x.push(xs[i]);
                new_v.push(vals[i]);
                if j < mids.len() && mids[j].0 == i {
                    new_x.push(mid_x[j]);
                    new_v.push(mid_v[j]);
                    j += 1;
                }
            }
            *xs = new_x;
            *vals = new_v;
        }
        if !inserted {
            break;
        }
    }

    let mut points = Vec::new();
    let mut params = Vec::new();
    let mut labels = Vec::new();
    let mut radii = Vec::new();
    for (c, (xs, vals)) in comps.iter().zip(&values).enumerate() {
        for (x, v) in xs.iter().zip(vals) {
            points.push(v.value);
            params.push(*x);
            labels.push(c);
            radii.push(g.periodic(*x));
        }
    }
    Ok(BoundaryTrace {
        points,
        params,
        component_labels: labels,
        radii,
        closed,
    })
}

fn eval_boundary_batch(spec: &MapSpec, xs: &[f64]) -> Result<Vec<MapValue>> {
    xs.par_iter().map(|&x| spec.eval(Complex64::new(x, 0.0))).collect()
}

/// Distance from a singular point to the first traced `x`.
fn end_offset(g: &GInverse, a: f64, b: f64, kind: End, opts: &TraceOptions, at_start: bool) -> f64 {
    let half = 0.5 * (b - a);
    match kind {
        End::Jump => opts.jump_gap.min(0.25 * half),
        End::Cap => {
            // Largest d with g̃(end ± d) ≥ r_trace; g̃ decreases away from the
            // singularity.
            let at = |d: f64| g.periodic(if at_start { a + d } else { b - d });
            if at(half) >= opts.r_trace {
                return half;
            }
            let (mut lo, mut hi) = (0.0, half);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if at(mid) >= opts.r_trace {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if lo > 0.0 {
                lo
            } else {
                // r_trace beyond what doubles can resolve: stop at the
                // closest representable point.
                let edge = if at_start { a } else { b };
                (edge.abs().max(1.0) * f64::EPSILON).max(hi.min(f64::MIN_POSITIVE))
            }
        }
    }
}

/// `f(x0 + it)` for `n` log-spaced `t` in `(1e-3, y_max]`.
pub fn trace_interior_line(spec: &MapSpec, x0: f64, y_max: f64, n: usize) -> Result<Vec<Complex64>> {
    interior_heights(y_max, n)?
        .into_iter()
        .map(|t| spec.eval(Complex64::new(x0, t)).map(|v| v.value))
        .collect()
}

/// Heights used by [`trace_interior_line`].
pub fn interior_heights(y_max: f64, n: usize) -> Result<Vec<f64>> {
    const T_MIN: f64 = 1e-3;
    if !(y_max > T_MIN) || n < 2 {
        return Err(Error::Param(format!(
            "interior line needs y_max > {T_MIN} and n >= 2, got {y_max}, {n}"
        )));
    }
    let ratio = (y_max / T_MIN).ln();
    Ok((1..=n)
        .map(|k| {
            if k == n {
                y_max
            } else {
                T_MIN * (ratio * k as f64 / n as f64).exp()
            }
        })
        .collect())
}

/// A segment of an interior line that crosses the boundary trace.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Crossing {
    pub line_x0: f64,
    pub line_segment: usize,
    pub boundary_segment: usize,
    pub re: f64,
    pub im: f64,
}

/// Outcome of [`covering_diagnostic`]. A heuristic: absence of crossings
/// at a finite resolution does not prove the covering property.
#[derive(Debug, Clone, Serialize)]
pub struct CoveringReport {
    pub is_candidate_cover: bool,
    pub resolution: usize,
    pub n_lines: usize,
    pub n_crossings: usize,
    /// The first crossings found (at most [`MAX_REPORTED_CROSSINGS`]).
    pub crossings: Vec<Crossing>,
}

pub const MAX_REPORTED_CROSSINGS: usize = 100;

/// Interior lines `x0 = x_start + L(j + ½)/n_lines` used by the diagnostic.
pub fn diagnostic_lines(spec: &MapSpec, resolution: usize) -> (Vec<f64>, f64) {
    let n_lines = (resolution / 4).max(16);
    let period = spec.joint_period();
    let start = window_start(&spec.g);
    let xs = (0..n_lines)
        .map(|j| start + period * (j as f64 + 0.5) / n_lines as f64)
        .collect();
    (xs, 8.0 / spec.alpha.to_f64())
}

pub fn covering_diagnostic(spec: &MapSpec, resolution: usize) -> Result<CoveringReport> {
    let resolution = resolution.max(64);
    let trace = trace_boundary(spec, 4 * resolution)?;
    let (xs, y_max) = diagnostic_lines(spec, resolution);
    let lines: Vec<Vec<Complex64>> = xs
        .par_iter()
        .map(|&x| trace_interior_line(spec, x, y_max, resolution))
        .collect::<Result<_>>()?;
    Ok(covering_from_parts(&trace, &xs, &lines, resolution))
}

/// Crossing search between a trace and precomputed interior lines.
pub fn covering_from_parts(
    trace: &BoundaryTrace,
    xs: &[f64],
    lines: &[Vec<Complex64>],
    resolution: usize,
) -> CoveringReport {
    let tree = trace.segment_tree();
    let mut crossings = Vec::new();
    let mut count = 0;
    for (x0, line) in xs.iter().zip(lines) {
        for (i, w) in line.windows(2).enumerate() {
            let seg = Segment::new(w[0], w[1]);
            for k in tree.crossings(&seg) {
                count += 1;
                if crossings.len() < MAX_REPORTED_CROSSINGS {
                    let b = tree.segments()[k];
                    let (t, _) = crate::geometry::proper_crossing(&seg, &b).unwrap();
                    let p = seg.a + (seg.b - seg.a) * t;
                    crossings.push(Crossing {
                        line_x0: *x0,
                        line_segment: i,
                        boundary_segment: k,
                        re: p.re,
                        im: p.im,
                    });
                }
            }
        }
    }
    CoveringReport {
        is_candidate_cover: count == 0,
        resolution,
        n_lines: xs.len(),
        n_crossings: count,
        crossings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use std::collections::BTreeMap;

    fn spec(id: &str, params: &[(&str, f64)], alpha: (u64, u64)) -> MapSpec {
        let p: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let e = catalog::get(id, &p).unwrap();
        build_map(
            e.g,
            Rational::new(alpha.0, alpha.1).unwrap(),
            TanhSinhGrid::default(),
            PeriodicKernelConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn disk_map_is_exponential() {
        let s = spec("disk", &[], (1, 1));
        let v = s.eval(Complex64::new(0.0, 1.0)).unwrap();
        assert!((v.value - Complex64::new((-PI).exp(), 0.0)).norm() < 1e-10);
        let v = s.eval(Complex64::new(0.3, 0.7)).unwrap();
        let want = (Complex64::i() * PI * Complex64::new(0.3, 0.7)).exp();
        assert!((v.value - want).norm() < 1e-10);
    }

    #[test]
    fn half_plane_boundary_point() {
        let s = spec("half-plane", &[], (1, 1));
        let v = s.eval(Complex64::new(0.5, 0.0)).unwrap();
        assert!((v.value.norm() - 2f64.sqrt()).abs() < 1e-6);
        // f = 2w/(1+w) with w = e^{iπz} maps onto Re < 1.
        assert!((v.value.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_plane_interior_matches_closed_form() {
        let s = spec("half-plane", &[], (1, 1));
        for z in [
            Complex64::new(0.2, 0.1),
            Complex64::new(-0.7, 0.5),
            Complex64::new(0.95, 0.01),
        ] {
            let w = (Complex64::i() * PI * z).exp();
            let want = 2.0 * w / (1.0 + w);
            let got = s.eval(z).unwrap().value;
            assert!(
                (got - want).norm() < 1e-8 * want.norm().max(1.0),
                "{z}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn rejects_lower_half_plane() {
        let s = spec("disk", &[], (1, 1));
        assert!(s.eval(Complex64::new(0.0, -0.1)).is_err());
    }

    #[test]
    fn disk_trace_is_closed_circle() {
        let s = spec("disk", &[], (1, 1));
        let t = trace_boundary(&s, 64).unwrap();
        assert!(t.closed);
        assert_eq!(t.component_count(), 1);
        assert!(t.points.iter().all(|p| (p.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn component_counts() {
        assert_eq!(
            trace_boundary(&spec("half-plane", &[], (1, 1)), 64)
                .unwrap()
                .component_count(),
            1
        );
        assert_eq!(
            trace_boundary(&spec("half-plane", &[], (1, 2)), 64)
                .unwrap()
                .component_count(),
            2
        );
        assert_eq!(
            trace_boundary(&spec("omega-n", &[("n", 8.0)], (1, 8)), 128)
                .unwrap()
                .component_count(),
            8
        );
        assert_eq!(
            trace_boundary(&spec("two-step", &[], (1, 1)), 64)
                .unwrap()
                .component_count(),
            2
        );
    }

    #[test]
    fn trace_respects_budget() {
        let s = spec("half-plane", &[], (1, 4));
        let t = trace_boundary(&s, 32).unwrap();
        assert!(t.len() <= 16 * 32 + 8);
    }

    #[test]
    fn interior_line_of_disk() {
        let s = spec("disk", &[], (1, 1));
        let line = trace_interior_line(&s, 0.0, 3.0, 20).unwrap();
        let hs = interior_heights(3.0, 20).unwrap();
        for (p, t) in line.iter().zip(hs) {
            assert!((p - Complex64::new((-PI * t).exp(), 0.0)).norm() < 1e-12);
        }
        assert!(trace_interior_line(&s, 0.0, 1e-4, 20).is_err());
    }

    #[test]
    fn covering_examples() {
        assert!(
            covering_diagnostic(&spec("disk", &[], (1, 1)), 64)
                .unwrap()
                .is_candidate_cover
        );
        assert!(
            covering_diagnostic(&spec("half-plane", &[], (1, 2)), 64)
                .unwrap()
                .is_candidate_cover
        );
        let r = covering_diagnostic(&spec("half-plane", &[], (1, 4)), 64).unwrap();
        assert!(!r.is_candidate_cover);
        assert!(!r.crossings.is_empty());
    }

    #[test]
    fn numeric_mode_matches_analytic() {
        let e = catalog::get("half-plane", &BTreeMap::new()).unwrap();
        let s = MapSpec::build(
            e.g,
            Rational::new(1, 1).unwrap(),
            TanhSinhGrid::new(2000),
            PeriodicKernelConfig::default(),
            HilbertMode::Numeric,
        )
        .unwrap();
        assert!(!s.uses_analytic_hilbert());
        for x in [-0.8, -0.3, 0.1, 0.6] {
            assert!((s.boundary_hilbert(x).unwrap() + PI / 2.0 * x).abs() < 1e-4);
        }
    }
}
