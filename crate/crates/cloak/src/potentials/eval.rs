//! Off-surface and near-surface potential evaluation.

use num_complex::Complex64;

use crate::geometry::SurfaceMesh;
use crate::potentials::quadrature::integrate_near;
use crate::potentials::rwg::{basis_div, basis_value, EdgeBasis, TangentialDensity};
use crate::potentials::{green, GradGreen};
use crate::{C3, V3};

/// Depth used for field probes near the surface; sufficient for offsets down
/// to ~1e-3 of a panel diameter.
pub const EVAL_DEPTH: usize = 12;

fn c3_scale(v: V3, s: Complex64) -> C3 {
    C3::new(s * v.x, s * v.y, s * v.z)
}

/// 𝒜[a](x) = ∫ G_ω(x-y) a(y) dσ_y.
pub fn single_layer_vector(
    mesh: &SurfaceMesh,
    basis: &EdgeBasis,
    a: &TangentialDensity,
    omega: f64,
    x: V3,
) -> C3 {
    let mut out = C3::zeros();
    for t in 0..mesh.triangles.len() {
        let locals = &basis.on_tri[t];
        if locals.is_empty() {
            continue;
        }
        let corners = mesh.corners(t);
        integrate_near(x, &corners, mesh.quad_degree, EVAL_DEPTH, &mut |y, w| {
            let g = green(omega, x - y);
            for lb in locals {
                let f = basis_value(mesh, lb, t, y);
                out += c3_scale(f, g * a.coeffs[lb.edge] * w);
            }
        });
    }
    out
}

/// ∇×𝒜[a](x) = ∫ ∇G_ω(x-y) × a(y) dσ_y; the scattered electric field.
pub fn curl_a(
    mesh: &SurfaceMesh,
    basis: &EdgeBasis,
    a: &TangentialDensity,
    omega: f64,
    x: V3,
    exclude_tri: Option<usize>,
) -> C3 {
    let mut out = C3::zeros();
    for t in 0..mesh.triangles.len() {
        if Some(t) == exclude_tri {
            continue;
        }
        let locals = &basis.on_tri[t];
        if locals.is_empty() {
            continue;
        }
        let corners = mesh.corners(t);
        integrate_near(x, &corners, mesh.quad_degree, EVAL_DEPTH, &mut |y, w| {
            let gg = GradGreen::new(omega, x - y);
            for lb in locals {
                let f = basis_value(mesh, lb, t, y);
                let kxf = gg.cross_real(f);
                out += kxf * (a.coeffs[lb.edge] * w);
            }
        });
    }
    out
}

/// ∇(∇·𝒜)[a](x) = ∫ ∇G_ω(x-y) (∇_s·a)(y) dσ_y, with the divergence moved
/// onto the surface through the div-conforming basis.
pub fn grad_div_a(
    mesh: &SurfaceMesh,
    basis: &EdgeBasis,
    a: &TangentialDensity,
    omega: f64,
    x: V3,
) -> C3 {
    let mut out = C3::zeros();
    for t in 0..mesh.triangles.len() {
        let locals = &basis.on_tri[t];
        if locals.is_empty() {
            continue;
        }
        // Piecewise-constant divergence per triangle.
        let mut div = Complex64::new(0.0, 0.0);
        for lb in locals {
            div += a.coeffs[lb.edge] * basis_div(mesh, lb, t);
        }
        let corners = mesh.corners(t);
        integrate_near(x, &corners, mesh.quad_degree, EVAL_DEPTH, &mut |y, w| {
            let gg = GradGreen::new(omega, x - y);
            out += gg.vector() * (div * w);
        });
    }
    out
}

/// ∇×∇×𝒜[a](x) = ω²𝒜[a](x) + ∇(∇·𝒜)[a](x).
pub fn curlcurl_a(
    mesh: &SurfaceMesh,
    basis: &EdgeBasis,
    a: &TangentialDensity,
    omega: f64,
    x: V3,
) -> C3 {
    single_layer_vector(mesh, basis, a, omega, x) * Complex64::new(omega * omega, 0.0)
        + grad_div_a(mesh, basis, a, omega, x)
}

/// Scalar single layer 𝒮[φ](x) for a piecewise-constant density φ.
pub fn scalar_single_layer(
    mesh: &SurfaceMesh,
    phi: &[Complex64],
    omega: f64,
    x: V3,
) -> Complex64 {
    let mut out = Complex64::new(0.0, 0.0);
    for t in 0..mesh.triangles.len() {
        let corners = mesh.corners(t);
        integrate_near(x, &corners, mesh.quad_degree, EVAL_DEPTH, &mut |y, w| {
            out += green(omega, x - y) * phi[t] * w;
        });
    }
    out
}

/// ∇𝒮[φ](x) for a piecewise-constant scalar density.
pub fn grad_scalar_single_layer(
    mesh: &SurfaceMesh,
    phi: &[Complex64],
    omega: f64,
    x: V3,
) -> C3 {
    let mut out = C3::zeros();
    for t in 0..mesh.triangles.len() {
        let corners = mesh.corners(t);
        integrate_near(x, &corners, mesh.quad_degree, EVAL_DEPTH, &mut |y, w| {
            let gg = GradGreen::new(omega, x - y);
            out += gg.vector() * (phi[t] * w);
        });
    }
    out
}
