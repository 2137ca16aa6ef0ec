//! Constructive inverse problem for harmonic measure distribution functions.
//!
//! Given a target h-function `h(r) = P(|Z_τ| ≤ r)`, the crate builds the
//! holomorphic map `f(z) = exp(u + iv + iαπz)` on the upper half-plane, where
//! `u` is the periodic Poisson extension of `ln g̃` (with `g̃` the even,
//! 2-periodic extension of the generalised inverse of `h`) and `v` is the
//! Poisson extension of its periodic Hilbert transform. Brownian motion
//! started high in the half-plane and pushed through `f` exits with radius
//! distributed according to `h`.
//!
//! Module map:
//! - [`hfun`]: h-functions, generalised inverses, layer-cake moments.
//! - [`quadrature`], [`transforms`]: tanh-sinh rule and the periodic
//!   Poisson / Hilbert transforms.
//! - [`catalog`]: the built-in examples with closed forms.
//! - [`map`]: assembling, evaluating and tracing the map.
//! - [`verify`]: Monte Carlo verification of exit-radius laws.
//! - [`io`], [`svg`]: file formats.

// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod error;
pub mod geometry;
pub mod hfun;
pub mod io;
pub mod map;
pub mod quadrature;
pub mod rational;
pub mod svg;
pub mod transforms;
pub mod verify;

pub use catalog::{CatalogEntry, CatalogH};
pub use error::{Error, Result};
pub use hfun::{fold, ginv, GInverse, HFunction, HKind};
pub use map::{build_map, eval_map, BoundaryTrace, MapSpec};
pub use num_complex::Complex64;
pub use quadrature::TanhSinhGrid;
pub use rational::Rational;
pub use transforms::PeriodicKernelConfig;

/// A point of the complex plane.
pub type ComplexPoint = Complex64;
