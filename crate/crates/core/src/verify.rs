//! Monte Carlo verification of exit-radius laws.
//!
//! Two independent samplers. The projected sampler uses the exact exit law
//! of Brownian motion from the upper half-plane (Cauchy with scale `y0`) and
//! pushes the exit point through `|f| = g̃`. The domain walker runs
//! walk-on-spheres inside a traced boundary polyline.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{point_in_polygon, SegmentTree};
use crate::hfun::HFunction;
use crate::map::{BoundaryTrace, MapSpec};

/// Worker count used when none is given; fixed so that results do not
/// depend on the machine.
pub const DEFAULT_WORKERS: usize = 4;

/// Default walk-on-spheres step budget per walker.
pub const DEFAULT_MAX_STEPS: usize = 100_000;

/// Default `r_cap` of an open trace, relative to its largest radius.
pub const OPEN_TRACE_CAP_FACTOR: f64 = 100.0;

/// Seed plus stream splitting: worker `i` draws from ChaCha8 stream `i` of
/// `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngSpec {
    pub seed: u64,
    pub workers: usize,
}

impl RngSpec {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            workers: DEFAULT_WORKERS,
        }
    }

    pub fn with_workers(seed: u64, workers: usize) -> Self {
        Self {
            seed,
            workers: workers.max(1),
        }
    }

    pub fn stream(&self, worker: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(worker as u64);
        rng
    }

    /// Runs `job(rng, count)` on every worker in parallel and concatenates the
    /// results in worker order.
    fn run<T, F>(&self, n: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut ChaCha8Rng, usize) -> Vec<T> + Sync,
    {
        let w = self.workers.max(1);
        let chunks: Vec<Vec<T>> = (0..w)
            .into_par_iter()
            .map(|i| {
                let count = (i + 1) * n / w - i * n / w;
                job(&mut self.stream(i), count)
            })
            .collect();
        chunks.into_iter().flatten().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitMethod {
    Projected,
    DomainWalk,
}

/// Exit radii with their provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitSamples {
    /// Radii in merge order (worker, then draw).
    pub radii: Vec<f64>,
    sorted: Vec<f64>,
    pub seed: u64,
    pub method: ExitMethod,
    /// Fraction of walkers that left `r_cap` or ran out of steps.
    pub truncated_mass: f64,
    pub requested: usize,
}

impl ExitSamples {
    pub fn new(radii: Vec<f64>, seed: u64, method: ExitMethod, truncated_mass: f64, requested: usize) -> Self {
        let mut sorted = radii.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        Self {
            radii,
            sorted,
            seed,
            method,
            truncated_mass,
            requested,
        }
    }

    pub fn from_radii(radii: Vec<f64>) -> Self {
        let n = radii.len();
        Self::new(radii, 0, ExitMethod::Projected, 0.0, n)
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// Standard Cauchy draw by inversion.
fn cauchy(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random();
    (PI * (u - 0.5)).tan()
}

/// Exit positions `x0 + y0·C` of Brownian motion started at `x0 + i·y0`.
pub fn sample_exit_positions(x0: f64, y0: f64, n: usize, rng: &RngSpec) -> Result<Vec<f64>> {
    if !(y0 > 0.0) || n == 0 {
        return Err(Error::Param(format!("need y0 > 0 and n >= 1, got {y0}, {n}")));
    }
    Ok(rng.run(n, |r, count| (0..count).map(|_| x0 + y0 * cauchy(r)).collect()))
}

/// Radii `g̃(ξ)` of the images of exact half-plane exit points.
pub fn sample_projected_exits(spec: &MapSpec, x0: f64, y0: f64, n: usize, rng: &RngSpec) -> Result<ExitSamples> {
    let g = spec.g();
    let radii = sample_exit_positions(x0, y0, n, rng)?
        .into_iter()
        .map(|xi| g.periodic(xi))
        .collect();
    Ok(ExitSamples::new(radii, rng.seed, ExitMethod::Projected, 0.0, n))
}

/// Settings for [`sample_domain_exits`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkOptions {
    /// Absorption distance; defaults to `1e-4` times the distance from the
    /// start to the trace.
    pub delta: Option<f64>,
    /// Walkers beyond this radius are truncated. Open traces default to
    /// [`OPEN_TRACE_CAP_FACTOR`] times the largest trace radius.
    pub r_cap: Option<f64>,
    pub max_steps: usize,
}

impl Default for WalkOptions {
    fn default() -> Self {
        Self {
            delta: None,
            r_cap: None,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

/// Where an absorbed walker landed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Absorption {
    pub radius: f64,
    pub component: usize,
    /// True when the walker sat to the left of the segment direction.
    pub left: bool,
}

/// Walk-on-spheres output with per-walker detail.
#[derive(Debug, Clone)]
pub struct DomainWalk {
    pub samples: ExitSamples,
    pub absorptions: Vec<Absorption>,
    pub escaped: usize,
    pub exhausted: usize,
    pub delta: f64,
    pub r_cap: f64,
}

impl DomainWalk {
    /// Per component, the number of hits from the left and from the right.
    pub fn side_counts(&self, components: usize) -> Vec<(usize, usize)> {
        let mut out = vec![(0, 0); components];
        for a in &self.absorptions {
            if a.left {
                out[a.component].0 += 1;
            } else {
                out[a.component].1 += 1;
            }
        }
        out
    }
}

enum Outcome {
    Absorbed(Absorption),
    Escaped,
    Exhausted,
}

/// Walk-on-spheres exit radii from `start` against the traced boundary.
pub fn sample_domain_exits(
    trace: &BoundaryTrace,
    start: Complex64,
    n: usize,
    rng: &RngSpec,
    opts: &WalkOptions,
) -> Result<DomainWalk> {
    if n == 0 || trace.len() < 2 {
        return Err(Error::Param("need n >= 1 and a trace with at least two points".into()));
    }
    let ranges = trace.component_ranges();
    let tree = SegmentTree::from_polylines(ranges.iter().map(|r| &trace.points[r.clone()]));
    // Per segment: component and the radii at its ends.
    let mut seg_info = Vec::with_capacity(tree.len());
    for (c, r) in ranges.iter().enumerate() {
        for i in r.start..r.end.saturating_sub(1) {
            seg_info.push((c, trace.radii[i], trace.radii[i + 1]));
        }
    }
    let d0 = tree.distance(start);
    let delta = opts.delta.unwrap_or(1e-4 * d0);
    if !(delta > 0.0) {
        return Err(Error::StartOutside(format!("start {start} lies on the trace")));
    }
    if !(d0 > delta) {
        return Err(Error::StartOutside(format!(
            "start {start} is within {delta:e} of the trace"
        )));
    }
    if trace.closed && !point_in_polygon(&trace.points, start) {
        return Err(Error::StartOutside(format!(
            "start {start} is outside the closed trace"
        )));
    }
    let r_cap = match opts.r_cap {
        Some(r) => r,
        None if trace.closed => f64::INFINITY,
        None => OPEN_TRACE_CAP_FACTOR * trace.points.iter().map(|p| p.norm()).fold(0.0, f64::max),
    };
    if start.norm() >= r_cap {
        return Err(Error::StartOutside(format!("start {start} is beyond r_cap = {r_cap}")));
    }

    let walk = |r: &mut ChaCha8Rng| -> Outcome {
        let mut z = start;
        for _ in 0..opts.max_steps {
            let near = tree.nearest(z).unwrap();
            if near.distance < delta {
                let s = tree.segments()[near.segment];
                let (component, ra, rb) = seg_info[near.segment];
                let d = s.b - s.a;
                let w = z - s.a;
                return Outcome::Absorbed(Absorption {
                    radius: ra + (rb - ra) * near.t,
                    component,
                    left: d.re * w.im - d.im * w.re > 0.0,
                });
            }
            let theta = 2.0 * PI * r.random::<f64>();
            z += Complex64::from_polar(near.distance, theta);
            if z.norm() > r_cap {
                return Outcome::Escaped;
            }
        }
        Outcome::Exhausted
    };
    let outcomes = rng.run(n, |r, count| (0..count).map(|_| walk(r)).collect());

    let mut radii = Vec::with_capacity(n);
    let mut absorptions = Vec::with_capacity(n);
    let (mut escaped, mut exhausted) = (0, 0);
    for o in outcomes {
        match o {
            Outcome::Absorbed(a) => {
                radii.push(a.radius);
                absorptions.push(a);
            }
            Outcome::Escaped => escaped += 1,
            Outcome::Exhausted => exhausted += 1,
        }
    }
    if exhausted > 0 {
        log::warn!("{exhausted} walkers exhausted the {}-step budget", opts.max_steps);
    }
    let truncated_mass = (escaped + exhausted) as f64 / n as f64;
    Ok(DomainWalk {
        samples: ExitSamples::new(radii, rng.seed, ExitMethod::DomainWalk, truncated_mass, n),
        absorptions,
        escaped,
        exhausted,
        delta,
        r_cap,
    })
}

/// Fraction of radii `≤ r`.
pub fn empirical_h(samples: &ExitSamples, r: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.sorted.partition_point(|&x| x <= r) as f64 / samples.len() as f64
}

/// Sup distance between the ECDF of `sorted` and a CDF given with its left
/// limits, checked at every distinct sample value.
pub fn ks_against<F, L>(sorted: &[f64], cdf: F, cdf_left: L) -> f64
where
    F: Fn(f64) -> f64,
    L: Fn(f64) -> f64,
{
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let below = i as f64 / n;
        let at = j as f64 / n;
        d = d.max((at - cdf(x)).abs()).max((below - cdf_left(x)).abs());
        i = j;
    }
    d
}

/// Kolmogorov–Smirnov distance between the sample ECDF and `h`.
pub fn ks_distance(samples: &ExitSamples, h: &HFunction) -> f64 {
    ks_against(samples.sorted(), |r| h.eval(r), |r| h.eval_left(r))
}

/// KS distance against `h(r)/h(r_cap)` on `[0, r_cap]`.
pub fn ks_distance_renormalized(samples: &ExitSamples, h: &HFunction, r_cap: f64) -> f64 {
    let norm = h.eval(r_cap);
    ks_against(
        samples.sorted(),
        |r| (h.eval(r) / norm).min(1.0),
        |r| (h.eval_left(r) / norm).min(1.0),
    )
}

/// Two-sample KS statistic.
pub fn ks_two_sample(a: &ExitSamples, b: &ExitSamples) -> f64 {
    let (x, y) = (a.sorted(), b.sorted());
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / nx - j as f64 / ny).abs());
    }
    d
}

/// Summary written to verification reports.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub method: ExitMethod,
    pub n: usize,
    pub seed: u64,
    pub ks: f64,
    pub truncated_mass: f64,
}
