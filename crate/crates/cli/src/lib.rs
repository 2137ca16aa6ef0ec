//! Command implementations behind the `hfun` binary.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hfun_core::catalog;
use hfun_core::hfun::{moment_from_h, GInverse, HFunction, HKind, MomentEstimate, PNormEstimate};
use hfun_core::io;
use hfun_core::map::{
    component_summary, covering_from_parts, diagnostic_lines, interior_heights, trace_boundary_with,
    trace_interior_line, ComponentSummary, CoveringReport, MapSpec, TraceOptions,
};
use hfun_core::rational::Rational;
use hfun_core::verify::{
    ks_against, ks_distance, ks_distance_renormalized, sample_domain_exits, sample_exit_positions,
    sample_projected_exits, ExitMethod, RngSpec, VerificationReport, WalkOptions,
};
use hfun_core::{Complex64, PeriodicKernelConfig, TanhSinhGrid};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "hfun", version, about = "Build and check maps realising a target h-function")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the generalised inverse g and estimate the L^p norms of ln g.
    Invert(InvertArgs),
    /// Trace the boundary image, interior lines and the covering diagnostic.
    Map(MapArgs),
    /// Monte Carlo check of the exit-radius law.
    Verify(VerifyArgs),
    /// Layer-cake moments of the exit radius.
    Moments(MomentArgs),
    /// List the built-in examples.
    CatalogList,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Built-in example id (see `catalog-list`).
    #[arg(long, group = "source")]
    pub catalog: Option<String>,
    /// Catalog parameters as key=value, repeatable or comma-separated.
    #[arg(long = "params", value_delimiter = ',')]
    pub params: Vec<String>,
    /// CSV file with header "r,h".
    #[arg(long = "h-table", group = "source")]
    pub h_table: Option<PathBuf>,
    /// JSON file {"breakpoints": [...], "values": [...]}.
    #[arg(long, group = "source")]
    pub step: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Tanh-sinh term count.
    #[arg(long = "M", default_value_t = 1000)]
    pub m: usize,
    /// Principal-value exclusion radius.
    #[arg(long, default_value_t = 1e-12)]
    pub epsilon: f64,
    #[arg(long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,
    /// Also write SVG pictures.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args)]
pub struct InvertArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of uniform s values in [0, 1].
    #[arg(long, default_value_t = 1001)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args)]
pub struct MapArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Rotation parameter as p/q or a decimal.
    #[arg(long, default_value = "1")]
    pub alpha: String,
    /// Initial boundary samples per joint period.
    #[arg(long, default_value_t = 1024)]
    pub points: usize,
    /// x0 of extra interior lines to export.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lines: Vec<f64>,
    /// Points per interior line and covering-diagnostic resolution.
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "1")]
    pub alpha: String,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = hfun_core::verify::DEFAULT_WORKERS)]
    pub workers: usize,
    /// Starting height of the half-plane walker.
    #[arg(long, default_value_t = 20.0)]
    pub y0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x0: f64,
    /// Truncation radius for the domain walk.
    #[arg(long = "r-cap")]
    pub r_cap: Option<f64>,
    /// Absorption distance for the domain walk.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Boundary samples of the traced domain.
    #[arg(long, default_value_t = 2048)]
    pub points: usize,
    /// Skip the domain walk.
    #[arg(long = "no-domain")]
    pub no_domain: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MomentArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Moment orders.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.0])]
    pub p: Vec<f64>,
    #[arg(long = "r-max", default_value_t = 1e6)]
    pub r_max: f64,
}

/// The resolved target.
pub struct Source {
    pub label: String,
    pub h: Arc<HFunction>,
    pub g: GInverse,
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in raw.iter().filter(|s| !s.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .with_context(|| format!("parameter {item:?} is not key=value"))?;
        let v: f64 = v.trim().parse().with_context(|| format!("parameter {item:?}"))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

pub fn resolve_source(args: &SourceArgs) -> Result<Source> {
    if let Some(id) = &args.catalog {
        let e = catalog::get(id, &parse_params(&args.params)?)?;
        let label = if e.params.is_empty() {
            e.id.clone()
        } else {
            let ps: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{}({})", e.id, ps.join(","))
        };
        return Ok(Source { label, h: e.h, g: e.g });
    }
    if !args.params.is_empty() {
        bail!("--params only applies to --catalog");
    }
    let (label, h) = if let Some(p) = &args.h_table {
        (
            p.display().to_string(),
            io::read_h_table_path(p).with_context(|| format!("reading {}", p.display()))?,
        )
    } else if let Some(p) = &args.step {
        (
            p.display().to_string(),
            io::read_step_json_path(p).with_context(|| format!("reading {}", p.display()))?,
        )
    } else {
        bail!("one of --catalog, --h-table or --step is required");
    };
    let h = Arc::new(h);
    Ok(Source {
        label,
        g: GInverse::new(Arc::clone(&h)),
        h,
    })
}

fn check_common(c: &CommonArgs) -> Result<()> {
    if !(64..=1_000_000).contains(&c.m) {
        bail!("--M must lie in [64, 1000000], got {}", c.m);
    }
    if !(c.epsilon > 0.0 && c.epsilon < 1.0) {
        bail!("--epsilon must lie in (0, 1), got {}", c.epsilon);
    }
    fs::create_dir_all(&c.out_dir).with_context(|| format!("creating {}", c.out_dir.display()))?;
    Ok(())
}

fn parse_alpha(s: &str) -> Result<Rational> {
    let parsed = Rational::parse(s)?;
    if let Some(x) = parsed.snapped_from {
        log::warn!("alpha {x} approximated by {}", parsed.value);
    }
    Ok(parsed.value)
}

fn build(common: &CommonArgs, src: &Source, alpha: Rational) -> Result<MapSpec> {
    let cfg = PeriodicKernelConfig::new(common.epsilon, PeriodicKernelConfig::default().oracle_terms)?;
    Ok(hfun_core::build_map(
        src.g.clone(),
        alpha,
        TanhSinhGrid::new(common.m),
        cfg,
    )?)
}

fn write_file(path: &Path, f: impl FnOnce(fs::File) -> hfun_core::Result<()>) -> Result<()> {
    let file = io::create(path).with_context(|| format!("creating {}", path.display()))?;
    f(file).with_context(|| format!("writing {}", path.display()))
}

#[derive(Serialize)]
struct InvertReport<'a> {
    command: &'static str,
    source: &'a str,
    grid: usize,
    pnorm: Vec<PNormEstimate>,
    log_integrable: bool,
}

pub fn cmd_invert(args: &InvertArgs) -> Result<()> {
    check_common(&args.common)?;
    if args.grid < 2 {
        bail!("--grid must be at least 2");
    }
    let src = resolve_source(&args.common.source)?;
    let out = &args.common.out_dir;
    write_file(&out.join("g.csv"), |f| io::write_g_grid(&src.g, args.grid, f))?;
    let grid = TanhSinhGrid::new(args.common.m);
    let (pnorm, log_integrable) = match src.g.log_norm(2.0, &grid) {
        Ok(_) => (
            hfun_core::map::PNORM_EXPONENTS
                .iter()
                .map(|&p| src.g.log_norm(p, &grid))
                .collect::<hfun_core::Result<Vec<_>>>()?,
            true,
        ),
        Err(e) => {
            log::warn!("{e}");
            (Vec::new(), false)
        }
    };
    io::write_report(
        &out.join("invert.json"),
        &InvertReport {
            command: "invert",
            source: &src.label,
            grid: args.grid,
            pnorm,
            log_integrable,
        },
    )?;
    Ok(())
}

#[derive(Serialize)]
struct MapReport<'a> {
    command: &'static str,
    source: &'a str,
    alpha: String,
    components: ComponentSummary,
    trace_points: usize,
    covering: CoveringReport,
    analytic_hilbert: bool,
    warnings: Vec<String>,
}

pub fn cmd_map(args: &MapArgs) -> Result<()> {
    check_common(&args.common)?;
    let src = resolve_source(&args.common.source)?;
    let alpha = parse_alpha(&args.alpha)?;
    let spec = build(&args.common, &src, alpha)?;
    let out = &args.common.out_dir;
    let resolution = args.resolution.max(64);

    let trace = trace_boundary_with(
        &spec,
        &TraceOptions {
            n_points: args.points.max(16),
            ..TraceOptions::default()
        },
    )
    .context("tracing the boundary")?;
    write_file(&out.join("trace.csv"), |f| io::write_trace_csv(&trace, f))?;

    // Diagnostic lattice, then the requested extra lines.
    let (diag_xs, y_max) = diagnostic_lines(&spec, resolution);
    let diag_trace = trace_boundary_with(
        &spec,
        &TraceOptions {
            n_points: 4 * resolution,
            ..TraceOptions::default()
        },
    )?;
    let diag_lines: Vec<Vec<Complex64>> = diag_xs
        .iter()
        .map(|&x| trace_interior_line(&spec, x, y_max, resolution))
        .collect::<hfun_core::Result<_>>()?;
    let covering = covering_from_parts(&diag_trace, &diag_xs, &diag_lines, resolution);

    let ts = interior_heights(y_max, resolution)?;
    let mut extra = Vec::new();
    for (j, &x0) in args.lines.iter().enumerate() {
        let line = trace_interior_line(&spec, x0, y_max, resolution)?;
        write_file(&out.join(format!("line_{j}.csv")), |f| {
            io::write_line_csv(&ts, &line, f)
        })?;
        extra.push(line);
    }
    if args.common.svg {
        let mut shown = diag_lines.clone();
        shown.extend(extra);
        fs::write(out.join("trace.svg"), hfun_core::svg::render(&trace, &shown, None))?;
    }
    io::write_report(
        &out.join("map.json"),
        &MapReport {
            command: "map",
            source: &src.label,
            alpha: alpha.to_string(),
            components: component_summary(&spec, &trace),
            trace_points: trace.len(),
            covering,
            analytic_hilbert: spec.uses_analytic_hilbert(),
            warnings: spec.warnings().to_vec(),
        },
    )?;
    Ok(())
}

/// Atom of the target law and the sampled masses near it.
#[derive(Debug, Serialize)]
pub struct AtomReport {
    pub radius: f64,
    pub target: f64,
    pub projected: f64,
    pub domain: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct DomainReport {
    pub ks: f64,
    pub renormalized: bool,
    pub truncated_mass: f64,
    pub absorbed: usize,
    pub delta: f64,
    pub r_cap: Option<f64>,
    /// Per trace component, hits from its left and right side.
    pub side_hits: Vec<(usize, usize)>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub source: String,
    pub alpha: String,
    pub n: usize,
    pub seed: u64,
    pub workers: usize,
    pub x0: f64,
    pub y0: f64,
    pub ks_projected: f64,
    pub ks_uniform: f64,
    pub ks_domain: Option<f64>,
    pub truncated_mass: f64,
    pub domain: Option<DomainReport>,
    pub domain_error: Option<String>,
    pub atoms: Vec<AtomReport>,
    /// One `{method, n, seed, ks, truncated_mass}` entry per sampler.
    pub reports: Vec<VerificationReport>,
}

fn atoms(h: &HFunction) -> Vec<(f64, f64)> {
    let radii = match h.kind() {
        HKind::Step { breakpoints, .. } => breakpoints.clone(),
        HKind::Catalog(c) => c.radius_breaks(),
        HKind::Tabulated { radii, .. } => radii[..1].to_vec(),
    };
    radii
        .into_iter()
        .map(|r| (r, h.eval(r) - h.eval_left(r)))
        .filter(|&(_, m)| m > 0.0)
        .collect()
}

fn mass_near(sorted: &[f64], r: f64) -> f64 {
    let tol = 1e-2 * r.max(1e-300);
    let lo = sorted.partition_point(|&x| x < r - tol);
    let hi = sorted.partition_point(|&x| x <= r + tol);
    (hi - lo) as f64 / sorted.len().max(1) as f64
}

pub fn run_verify(args: &VerifyArgs) -> Result<VerifyReport> {
    check_common(&args.common)?;
    if args.n == 0 {
        bail!("--n must be at least 1");
    }
    let src = resolve_source(&args.common.source)?;
    let alpha = parse_alpha(&args.alpha)?;
    let spec = build(&args.common, &src, alpha)?;
    let rng = RngSpec::with_workers(args.seed, args.workers);
    let out = &args.common.out_dir;

    let projected = sample_projected_exits(&spec, args.x0, args.y0, args.n, &rng)?;
    write_file(&out.join("samples_projected.csv"), |f| {
        io::write_samples_csv(&projected, f)
    })?;
    let ks_projected = ks_distance(&projected, &src.h);
    let folded: Vec<f64> = {
        let mut v: Vec<f64> = sample_exit_positions(args.x0, args.y0, args.n, &rng)?
            .into_iter()
            .map(hfun_core::hfun::wrap)
            .collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    };
    let uniform = |x: f64| ((x + 1.0) / 2.0).clamp(0.0, 1.0);
    let ks_uniform = ks_against(&folded, uniform, uniform);

    let mut domain = None;
    let mut domain_error = None;
    let mut domain_sorted = None;
    if !args.no_domain {
        let walk = trace_boundary_with(
            &spec,
            &TraceOptions {
                n_points: args.points.max(16),
                ..TraceOptions::default()
            },
        )
        .map_err(anyhow::Error::from)
        .and_then(|trace| {
            let opts = WalkOptions {
                delta: args.delta,
                r_cap: args.r_cap,
                ..WalkOptions::default()
            };
            let w = sample_domain_exits(&trace, Complex64::new(0.0, 0.0), args.n, &rng, &opts)?;
            Ok((trace, w))
        });
        match walk {
            Ok((trace, w)) => {
                write_file(&out.join("samples_domain.csv"), |f| {
                    io::write_samples_csv(&w.samples, f)
                })?;
                let renormalized = w.r_cap.is_finite();
                let ks = if w.samples.is_empty() {
                    1.0
                } else if renormalized {
                    ks_distance_renormalized(&w.samples, &src.h, w.r_cap)
                } else {
                    ks_distance(&w.samples, &src.h)
                };
                domain_sorted = Some(w.samples.sorted().to_vec());
                domain = Some(DomainReport {
                    ks,
                    renormalized,
                    truncated_mass: w.samples.truncated_mass,
                    absorbed: w.samples.len(),
                    delta: w.delta,
                    r_cap: renormalized.then_some(w.r_cap),
                    side_hits: w.side_counts(trace.component_count()),
                });
            }
            Err(e) => {
                if matches!(
                    e.downcast_ref::<hfun_core::Error>(),
                    Some(hfun_core::Error::StartOutside(_))
                ) {
                    return Err(e.context("domain walk"));
                }
                log::warn!("domain walk skipped: {e:#}");
                domain_error = Some(format!("{e:#}"));
            }
        }
    }

    let mut reports = vec![VerificationReport {
        method: ExitMethod::Projected,
        n: args.n,
        seed: args.seed,
        ks: ks_projected,
        truncated_mass: 0.0,
    }];
    if let Some(d) = &domain {
        reports.push(VerificationReport {
            method: ExitMethod::DomainWalk,
            n: args.n,
            seed: args.seed,
            ks: d.ks,
            truncated_mass: d.truncated_mass,
        });
    }
    let atoms = atoms(&src.h)
        .into_iter()
        .map(|(radius, target)| AtomReport {
            radius,
            target,
            projected: mass_near(projected.sorted(), radius),
            domain: domain_sorted.as_deref().map(|s| mass_near(s, radius)),
        })
        .collect();
    Ok(VerifyReport {
        command: "verify",
        source: src.label.clone(),
        alpha: alpha.to_string(),
        n: args.n,
        seed: args.seed,
        workers: rng.workers,
        x0: args.x0,
        y0: args.y0,
        ks_projected,
        ks_uniform,
        ks_domain: domain.as_ref().map(|d| d.ks),
        truncated_mass: domain.as_ref().map_or(0.0, |d| d.truncated_mass),
        domain,
        domain_error,
        atoms,
        reports,
    })
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let report = run_verify(args)?;
    io::write_report(&args.common.out_dir.join("verify.json"), &report)?;
    Ok(())
}

#[derive(Serialize)]
struct MomentsReport<'a> {
    command: &'static str,
    source: &'a str,
    moments: &'a [MomentEstimate],
}

pub fn cmd_moments(args: &MomentArgs) -> Result<()> {
    check_common(&args.common)?;
    let src = resolve_source(&args.common.source)?;
    if args.p.is_empty() {
        bail!("--p needs at least one order");
    }
    let grid = TanhSinhGrid::new(args.common.m);
    let moments: Vec<MomentEstimate> = args
        .p
        .iter()
        .map(|&p| moment_from_h(&src.h, p, args.r_max, &grid))
        .collect::<hfun_core::Result<_>>()?;
    let out = &args.common.out_dir;
    let mut csv = String::from("p,value,divergent\n");
    for m in &moments {
        csv.push_str(&format!(
            "{},{},{}\n",
            io::fmt_f64(m.p),
            io::fmt_f64(m.value),
            m.divergent
        ));
    }
    fs::write(out.join("moments.csv"), csv)?;
    io::write_report(
        &out.join("moments.json"),
        &MomentsReport {
            command: "moments",
            source: &src.label,
            moments: &moments,
        },
    )?;
    Ok(())
}

pub fn cmd_catalog_list() -> String {
    let mut s = String::new();
    for (id, notes) in catalog::list() {
        s.push_str(&format!("{id:<12} {notes}\n"));
    }
    s
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Invert(a) => cmd_invert(&a),
        Command::Map(a) => cmd_map(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Moments(a) => cmd_moments(&a),
        Command::CatalogList => {
            print!("{}", cmd_catalog_list());
            Ok(())
        }
    }
}
