use std::f64::consts::{FRAC_PI_2, PI};

use hfun_core::fold;
use hfun_core::transforms::{
    hilbert_transform, lattice_sum_oracle, periodic_poisson_kernel, poisson_integral, FnPeriodic, LatticeSum,
    PeriodicFunction,
};
use hfun_core::{PeriodicKernelConfig, TanhSinhGrid};
use proptest::prelude::*;

/// Adaptive Simpson on `[a, b]`, used as an independent quadrature oracle.
fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 60)
}

fn log_sec(t: f64) -> f64 {
    -(FRAC_PI_2 * fold(t)).cos().ln()
}

#[test]
fn quad_of_log_secant_matches_adaptive_oracle() {
    let grid = TanhSinhGrid::new(1000);
    let got = grid.quad(log_sec).unwrap();
    // The oracle handles the endpoint logarithm on geometrically shrinking
    // pieces [1 - 2^{-k}, 1 - 2^{-k-1}], plus the analytic remainder
    // ∫_{1-ε}^{1} -ln((π/2)(1-t)) dt for the last sliver.
    let mut half = adaptive_simpson(&log_sec, 0.0, 0.5, 1e-13);
    for k in 1..40 {
        let a = 1.0 - 0.5f64.powi(k);
        let b = 1.0 - 0.5f64.powi(k + 1);
        half += adaptive_simpson(&log_sec, a, b, 1e-14);
    }
    let eps = 0.5f64.powi(40);
    half += eps * (1.0 - (FRAC_PI_2 * eps).ln());
    let oracle = 2.0 * half;
    assert!((got - oracle).abs() < 1e-8, "{got} vs {oracle}");
    assert!((got - 2.0 * 2f64.ln()).abs() < 1e-8);
}

#[test]
fn quad_of_odd_function_vanishes() {
    let grid = TanhSinhGrid::default();
    assert!(grid.quad(|t| t).unwrap().abs() < 1e-14);
    assert!(grid.quad(|t| t.powi(3) * (1.0 - t * t).ln().abs()).unwrap().abs() < 1e-14);
}

#[test]
fn kernel_normalised_over_heights() {
    let grid = TanhSinhGrid::default();
    for y in [0.05, 0.1, 0.3, 1.0, 5.0, 20.0] {
        let f = FnPeriodic::new(|_| 1.0);
        let v = poisson_integral(&f, 0.0, y, &grid).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "y = {y}");
        let q = grid.quad(|t| periodic_poisson_kernel(y, t).unwrap()).unwrap();
        assert!((q - 1.0).abs() < 1e-8, "y = {y}: {q}");
    }
}

#[test]
fn kernel_overflow_regime() {
    // πy > 700 would overflow cosh; the kernel is its limit ½ there.
    assert_eq!(periodic_poisson_kernel(300.0, 0.2).unwrap(), 0.5);
    assert_eq!(periodic_poisson_kernel(1e6, 0.0).unwrap(), 0.5);
}

#[test]
fn hilbert_of_indicator_matches_lattice_sum() {
    let grid = TanhSinhGrid::default();
    let cfg = PeriodicKernelConfig::default();
    let f = FnPeriodic::with_breaks(|t: f64| if fold(t) > 0.5 { 1.0 } else { 0.0 }, vec![-0.5, 0.5]);
    let x: f64 = 0.25;
    let mut sum = 0.0;
    for k in -10_000i64..=10_000 {
        let s = 2.0 * k as f64;
        sum += ((x - s - 0.5) / (x - s - 1.5)).abs().ln();
    }
    let oracle = sum / PI;
    let got = hilbert_transform(&f, x, &grid, &cfg).unwrap();
    assert!((got - oracle).abs() < 1e-4, "{got} vs {oracle}");
}

#[test]
fn hilbert_of_log_secant_at_high_resolution() {
    let grid = TanhSinhGrid::new(2000);
    let cfg = PeriodicKernelConfig::default();
    let f = FnPeriodic::with_breaks(log_sec, vec![-1.0]);
    let mut worst: f64 = 0.0;
    for i in 0..37 {
        let s = -0.9 + 0.05 * i as f64;
        let v = hilbert_transform(&f, s, &grid, &cfg).unwrap();
        worst = worst.max((v + FRAC_PI_2 * s).abs());
    }
    assert!(worst <= 1e-4, "{worst}");
}

#[test]
fn hilbert_reports_non_finite() {
    let grid = TanhSinhGrid::new(64);
    let f = FnPeriodic::new(|t: f64| if t > 0.3 { f64::NAN } else { 0.0 });
    assert!(hilbert_transform(&f, 0.0, &grid, &PeriodicKernelConfig::default()).is_err());
}

#[test]
fn config_validation() {
    assert!(PeriodicKernelConfig::new(0.0, 10).is_err());
    assert!(PeriodicKernelConfig::new(1e-12, 0).is_err());
    assert!(PeriodicKernelConfig::new(1e-12, 1).is_ok());
}

/// Smooth 2-periodic test function.
fn smooth(t: f64) -> f64 {
    ((PI * t).cos()).exp() + 0.3 * (2.0 * PI * t).sin()
}

#[test]
fn hilbert_commutes_with_poisson() {
    let grid = TanhSinhGrid::new(120);
    let cfg = PeriodicKernelConfig::default();
    let f = FnPeriodic::new(smooth);
    for (x, y) in [(0.1, 0.2), (-0.6, 0.5), (0.9, 1.0), (0.4, 0.05)] {
        let hf = FnPeriodic::new(|t| hilbert_transform(&f, t, &grid, &cfg).unwrap());
        let a = poisson_integral(&hf, x, y, &grid).unwrap();
        let pf = FnPeriodic::new(|t| poisson_integral(&f, t, y, &grid).unwrap());
        let b = hilbert_transform(&pf, x, &grid, &cfg).unwrap();
        assert!((a - b).abs() <= 1e-4, "({x}, {y}): {a} vs {b}");
    }
}

#[test]
fn poisson_extension_is_harmonic() {
    let grid = TanhSinhGrid::default();
    let f = FnPeriodic::new(smooth);
    let u = |x: f64, y: f64| poisson_integral(&f, x, y, &grid).unwrap();
    let h = 1e-3;
    for (x, y) in [(0.0, 0.3), (0.45, 0.1), (-0.8, 1.0), (0.7, 0.05)] {
        let lap = (u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h) - 4.0 * u(x, y)) / (h * h);
        assert!(lap.abs() <= 1e-4, "({x}, {y}): {lap}");
    }
}

#[test]
fn lattice_oracles_at_random_arguments() {
    let mut state = 0x2545F4914F6CDD1Du64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..20 {
        let y = 0.05 + 3.0 * next();
        let theta = -1.0 + 2.0 * next();
        let k = periodic_poisson_kernel(y, theta).unwrap();
        let s = lattice_sum_oracle(LatticeSum::Poisson { y, theta }, 10_000);
        assert!((k - s).abs() < 1e-4);
        let t = -1.9 + 3.8 * next();
        if t.abs() < 1e-3 {
            continue;
        }
        let closed = FRAC_PI_2 / (FRAC_PI_2 * t).tan() - 1.0 / t;
        let s = lattice_sum_oracle(LatticeSum::Cotangent { t }, 10_000);
        assert!((closed - s).abs() < 1e-4, "t = {t}");
    }
}

/// Piecewise-smooth test functions with a kink at 0 and a jump at `c`.
struct Piecewise {
    a: [f64; 4],
    c: f64,
}

impl PeriodicFunction for Piecewise {
    fn value(&self, t: f64) -> f64 {
        let w = hfun_core::hfun::wrap(t);
        self.a[0] + self.a[1] * (PI * w).cos() + self.a[2] * w.abs() + if w > self.c { self.a[3] } else { 0.0 }
    }

    fn breaks(&self) -> Vec<f64> {
        vec![-1.0, 0.0, self.c]
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kernel_symmetry(y in 0.01f64..30.0, theta in -5.0f64..5.0) {
        let k = periodic_poisson_kernel(y, theta).unwrap();
        prop_assert!(k > 0.0);
        prop_assert_eq!(k, periodic_poisson_kernel(y, -theta).unwrap());
        // Shifting by 2 is exact for dyadic θ; otherwise the shift itself
        // rounds.
        let dyadic = (theta * 1024.0).round() / 1024.0;
        prop_assert_eq!(
            periodic_poisson_kernel(y, dyadic).unwrap(),
            periodic_poisson_kernel(y, dyadic + 2.0).unwrap()
        );
        let shifted = periodic_poisson_kernel(y, theta + 2.0).unwrap();
        prop_assert!((k - shifted).abs() <= 1e-12 * k.max(1.0));
    }

    #[test]
    fn hilbert_is_linear(
        fa in prop::array::uniform4(-2.0f64..2.0),
        qa in prop::array::uniform4(-2.0f64..2.0),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        x in -1.0f64..1.0,
    ) {
        let grid = TanhSinhGrid::new(200);
        let cfg = PeriodicKernelConfig::default();
        let c = 0.37;
        let f = Piecewise { a: fa, c };
        let q = Piecewise { a: qa, c };
        let mut mix = [0.0; 4];
        for i in 0..4 {
            mix[i] = a * fa[i] + b * qa[i];
        }
        let m = Piecewise { a: mix, c };
        let lhs = hilbert_transform(&m, x, &grid, &cfg).unwrap();
        let rhs = a * hilbert_transform(&f, x, &grid, &cfg).unwrap() + b * hilbert_transform(&q, x, &grid, &cfg).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn hilbert_of_even_function_is_odd(
        coef in prop::array::uniform3(-2.0f64..2.0),
        x in 0.0f64..1.0,
    ) {
        let grid = TanhSinhGrid::new(300);
        let cfg = PeriodicKernelConfig::default();
        let f = FnPeriodic::with_breaks(
            move |t: f64| {
                let w = fold(t);
                coef[0] * w + coef[1] * (PI * w).cos() + coef[2] * (1.0 - w).max(1e-300).ln()
            },
            vec![-1.0, 0.0],
        );
        let hp = hilbert_transform(&f, x, &grid, &cfg).unwrap();
        let hm = hilbert_transform(&f, -x, &grid, &cfg).unwrap();
        prop_assert!((hp + hm).abs() <= 1e-8, "{} {}", hp, hm);
    }
}
