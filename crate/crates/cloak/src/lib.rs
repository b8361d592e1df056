//! Boundary-integral toolkit for regularized transformation-optics cloaks.
//!
//! The crate builds the two families of virtual domains used by near-cloaking
//! constructions — a tube-with-caps neighborhood of a generating curve (full
//! cloak) and a rounded slab over a planar square (partial cloak) — computes
//! the associated blowup maps and push-forward material tensors, solves the
//! perfect-electric-conductor scattering limit with a magnetic-field-type
//! boundary integral equation on div-conforming edge elements, and drives the
//! δ-convergence and aperture experiments through the `cloakbench` CLI.
//!
//! Module map:
//! - [`geometry`]: curves, surface meshes (tube / slab / sphere / screen),
//!   refinement and VTK export.
//! - [`transform`]: blowup maps, Jacobians, push-forward, lossy-layer tensors
//!   and the exponent calculus.
//! - [`potentials`]: Helmholtz kernel, layer potentials, Galerkin assembly of
//!   the magnetic dipole operator, jump/trace checks.
//! - [`solver`]: plane waves, the PEC solve, far fields and the Mie oracle.
//! - [`asymptotics`]: small-δ operator expansions, the screen operator on the
//!   generating square, and the leading-order partial-cloak far field.
//! - [`harness`]: experiment configs, drivers, slope fitting, persistence.

pub mod asymptotics;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod la;
pub mod potentials;
pub mod solver;
pub mod transform;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// 3-vector of f64 used throughout geometry and kernels.
pub type V3 = nalgebra::Vector3<f64>;
/// 3x3 real matrix (Jacobians, material tensors).
pub type M3 = nalgebra::Matrix3<f64>;
/// Complex 3-vector (fields, densities at points).
pub type C3 = nalgebra::Vector3<num_complex::Complex64>;

pub use num_complex::Complex64;

/// Lift a real vector into a complex one.
pub fn c3(v: V3) -> C3 {
    C3::new(v.x.into(), v.y.into(), v.z.into())
}

/// Real part of a complex vector.
pub fn c3_re(v: C3) -> V3 {
    V3::new(v.x.re, v.y.re, v.z.re)
}

/// Euclidean norm of a complex 3-vector.
pub fn c3_norm(v: C3) -> f64 {
    (v.x.norm_sqr() + v.y.norm_sqr() + v.z.norm_sqr()).sqrt()
}

/// Cross product where the left factor is real and the right complex.
pub fn cross_rc(a: V3, b: C3) -> C3 {
    C3::new(
        b.z * a.y - b.y * a.z,
        b.x * a.z - b.z * a.x,
        b.y * a.x - b.x * a.y,
    )
}
