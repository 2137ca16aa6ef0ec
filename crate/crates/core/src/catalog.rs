//! Built-in h-functions with closed-form inverses and, where known, closed
//! forms for the periodic Hilbert transform of `ln g̃`.
//!
//! | id          | h(r)                                   | g(s)                          |
//! |-------------|----------------------------------------|-------------------------------|
//! | `disk`      | step at 1                              | 1                             |
//! | `half-plane`| (2/π) arctan √(r² − 1)                 | sec(πs/2)                     |
//! | `omega-n`   | (2/π) arctan √(rⁿ − 1)                 | sec^{2/n}(πs/2)               |
//! | `two-step`  | 0, ½, 1 on [0,1), [1,2), [2,∞)         | 1 on [0,½], 2 on (½,1]        |
//! | `custom`    | 1 − ((a+1)r² − a)^{−1/n}               | √((1/(a(1−s)ⁿ) + 1)/(1 + 1/a)) |

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, LN_2, PI};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hfun::{wrap, GInverse, HFunction};

/// Known catalog ids, in listing order.
pub const IDS: [&str; 5] = ["disk", "half-plane", "omega-n", "two-step", "custom"];

/// Closed-form h-functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogH {
    Disk,
    HalfPlane,
    /// Plane with `n` equally spaced radial slits from the unit circle.
    OmegaN {
        n: f64,
    },
    /// Concentric circle domain with half the mass on each of radii 1 and 2.
    TwoStep,
    Custom {
        a: f64,
        n: f64,
    },
}

fn sec(x: f64) -> f64 {
    1.0 / x.cos()
}

impl CatalogH {
    pub fn id(&self) -> &'static str {
        match self {
            CatalogH::Disk => "disk",
            CatalogH::HalfPlane => "half-plane",
            CatalogH::OmegaN { .. } => "omega-n",
            CatalogH::TwoStep => "two-step",
            CatalogH::Custom { .. } => "custom",
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        match *self {
            CatalogH::OmegaN { n } => {
                m.insert("n".to_string(), n);
            }
            CatalogH::Custom { a, n } => {
                m.insert("a".to_string(), a);
                m.insert("n".to_string(), n);
            }
            _ => {}
        }
        m
    }

    pub fn d_min(&self) -> f64 {
        1.0
    }

    pub fn h(&self, r: f64) -> f64 {
        match *self {
            CatalogH::Disk => {
                if r >= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            CatalogH::HalfPlane => Self::OmegaN { n: 2.0 }.h(r),
            CatalogH::OmegaN { n } => {
                if r < 1.0 {
                    0.0
                } else if r.is_infinite() {
                    1.0
                } else {
                    2.0 / PI * (r.powf(n) - 1.0).sqrt().atan()
                }
            }
            CatalogH::TwoStep => {
                if r < 1.0 {
                    0.0
                } else if r < 2.0 {
                    0.5
                } else {
                    1.0
                }
            }
            CatalogH::Custom { a, n } => {
                if r < 1.0 {
                    0.0
                } else {
                    1.0 - ((a + 1.0) * r * r - a).powf(-1.0 / n)
                }
            }
        }
    }

    /// `h(r-)`.
    pub fn h_left(&self, r: f64) -> f64 {
        match *self {
            CatalogH::Disk => {
                if r > 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            CatalogH::TwoStep => {
                if r <= 1.0 {
                    0.0
                } else if r <= 2.0 {
                    0.5
                } else {
                    1.0
                }
            }
            _ => self.h(r),
        }
    }

    /// Closed-form generalised inverse on `[0, 1]`; `+∞` at `s = 1` for the
    /// unbounded entries.
    pub fn g(&self, s: f64) -> f64 {
        match *self {
            CatalogH::Disk => 1.0,
            CatalogH::HalfPlane => {
                if s >= 1.0 {
                    f64::INFINITY
                } else {
                    sec(FRAC_PI_2 * s)
                }
            }
            CatalogH::OmegaN { n } => {
                if s >= 1.0 {
                    f64::INFINITY
                } else {
                    sec(FRAC_PI_2 * s).powf(2.0 / n)
                }
            }
            CatalogH::TwoStep => {
                if s <= 0.5 {
                    1.0
                } else {
                    2.0
                }
            }
            CatalogH::Custom { a, n } => {
                if s >= 1.0 {
                    f64::INFINITY
                } else {
                    let inner = 1.0 / (a * (1.0 - s).powf(n)) + 1.0;
                    (inner / (1.0 + 1.0 / a)).sqrt()
                }
            }
        }
    }

    /// Jumps of `g` inside `(0, 1)`.
    pub fn jumps(&self) -> Vec<f64> {
        match self {
            CatalogH::TwoStep => vec![0.5],
            _ => Vec::new(),
        }
    }

    /// Radii where `h` is not smooth.
    pub fn radius_breaks(&self) -> Vec<f64> {
        match self {
            CatalogH::TwoStep => vec![1.0, 2.0],
            _ => vec![1.0],
        }
    }

    pub fn has_analytic_hilbert(&self) -> bool {
        !matches!(self, CatalogH::Custom { .. })
    }

    /// Closed form of the periodic Hilbert transform of `ln g̃` at `x`.
    ///
    /// For the slit families `ln g̃ = (2/n) ln sec(πx/2)`, whose conjugate is
    /// the sawtooth `-(π/n) x` on `(-1, 1)`. For the two-step entry
    /// `ln g̃ = ln 2 · 1_{[1/2, 3/2) + 2ℤ}` and the lattice sum of
    /// `(1/π) ln|(x-a)/(x-b)|` collapses, by the sine product, to
    /// `(ln 2/π) ln|tan(π(x - 1/2)/2)|`.
    pub fn analytic_hilbert(&self, x: f64) -> Option<f64> {
        let w = wrap(x);
        match *self {
            CatalogH::Disk => Some(0.0),
            CatalogH::HalfPlane => Some(Self::sawtooth(w, 2.0)),
            CatalogH::OmegaN { n } => Some(Self::sawtooth(w, n)),
            CatalogH::TwoStep => Some(LN_2 / PI * (FRAC_PI_2 * (w - 0.5)).tan().abs().ln()),
            CatalogH::Custom { .. } => None,
        }
    }

    fn sawtooth(w: f64, n: f64) -> f64 {
        // The odd-integer jump takes its principal value 0.
        if w == -1.0 {
            0.0
        } else {
            -PI / n * w
        }
    }
}

/// The two-step Hilbert transform as the lattice sum
/// `(ln 2/π) Σ_{|k| ≤ terms} ln|(x - 2k - 1/2)/(x - 2k - 3/2)|`, plus the
/// tail `Σ_{|k|>terms}` estimated through the cotangent identity for the
/// first-order term and `-1/(4·terms)` for the second.
pub fn two_step_hilbert_lattice(x: f64, terms: usize) -> f64 {
    let c = x - 1.5;
    let mut sum = 0.0;
    let mut first_order = 0.0;
    for k in -(terms as i64)..=(terms as i64) {
        let shift = 2.0 * k as f64;
        sum += ((x - shift - 0.5) / (x - shift - 1.5)).abs().ln();
        first_order += 1.0 / (c - shift);
    }
    let full_first_order = FRAC_PI_2 / (FRAC_PI_2 * c).tan();
    let tail = (full_first_order - first_order) - 1.0 / (4.0 * terms as f64);
    LN_2 / PI * (sum + tail)
}

/// A resolved catalog entry.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: String,
    pub source: CatalogH,
    pub h: Arc<HFunction>,
    pub g: GInverse,
    pub params: BTreeMap<String, f64>,
    pub notes: &'static str,
}

impl CatalogEntry {
    pub fn analytic_hilbert(&self, x: f64) -> Option<f64> {
        self.source.analytic_hilbert(x)
    }
}

fn take_param(params: &BTreeMap<String, f64>, key: &str, default: Option<f64>, id: &str) -> Result<f64> {
    let v = match (params.get(key), default) {
        (Some(v), _) => *v,
        (None, Some(d)) => d,
        (None, None) => return Err(Error::Param(format!("`{id}` requires parameter `{key}`"))),
    };
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Param(format!(
            "`{id}` parameter `{key}` must be positive, got {v}"
        )));
    }
    Ok(v)
}

fn reject_unknown(params: &BTreeMap<String, f64>, allowed: &[&str], id: &str) -> Result<()> {
    for k in params.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::Param(format!("`{id}` has no parameter `{k}`")));
        }
    }
    Ok(())
}

/// Looks up a catalog entry by id.
///
/// `omega-n` takes `n` (default 2); `custom` takes `a` and `n` (defaults
/// 100 and 4).
pub fn get(id: &str, params: &BTreeMap<String, f64>) -> Result<CatalogEntry> {
    let (source, notes) = match id {
        "disk" => {
            reject_unknown(params, &[], id)?;
            (CatalogH::Disk, "unit disk, base point 0")
        }
        "half-plane" => {
            reject_unknown(params, &[], id)?;
            (CatalogH::HalfPlane, "upper half-plane, base point i")
        }
        "omega-n" => {
            reject_unknown(params, &["n"], id)?;
            let n = take_param(params, "n", Some(2.0), id)?;
            (
                CatalogH::OmegaN { n },
                "plane minus n radial slits from the unit circle, base point 0",
            )
        }
        "two-step" => {
            reject_unknown(params, &[], id)?;
            (CatalogH::TwoStep, "circle domain with equal mass at radii 1 and 2")
        }
        "custom" => {
            reject_unknown(params, &["a", "n"], id)?;
            let a = take_param(params, "a", Some(100.0), id)?;
            let n = take_param(params, "n", Some(4.0), id)?;
            (CatalogH::Custom { a, n }, "family defined through its inverse g")
        }
        _ => {
            return Err(Error::UnknownCatalog {
                id: id.to_string(),
                known: IDS.join(", "),
            })
        }
    };
    let h = Arc::new(HFunction::catalog(source));
    Ok(CatalogEntry {
        id: id.to_string(),
        source,
        g: GInverse::new(Arc::clone(&h)),
        h,
        params: source.params(),
        notes,
    })
}

/// `(id, description)` for every entry.
pub fn list() -> Vec<(&'static str, &'static str)> {
    vec![
        ("disk", "unit disk; g ≡ 1"),
        ("half-plane", "upper half-plane from i; g(s) = sec(πs/2)"),
        (
            "omega-n",
            "plane minus n radial slits (param n); g(s) = sec^{2/n}(πs/2)",
        ),
        ("two-step", "circle domain, mass 1/2 at radii 1 and 2"),
        ("custom", "g(s) = sqrt((1/(a(1-s)^n) + 1)/(1 + 1/a)) (params a, n)"),
    ]
}
