//! Galerkin assembly of boundary-integral operators on edge elements.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::geometry::SurfaceMesh;
use crate::potentials::quadrature::{integrate_near, map_rule, rule_for_degree};
use crate::potentials::rwg::{basis_value, EdgeBasis};
use crate::potentials::GradGreen;
use crate::{Result, C3, V3};

/// Which test functional a pair loop accumulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Testing {
    /// R_mn = ∫∫ g_m(x) · (∇G(x-y) × f_n(y)).
    Rotated,
    /// Q_mn = -∫∫ (ν(x) × g_m(x)) · (∇G(x-y) × f_n(y)).
    Plain,
}

/// Self-panel pairs are skipped outright: on a flat panel the kernel
/// cross-product is normal to the panel while both admissible test vectors
/// are tangential, so the principal-value contribution vanishes exactly.
/// Pairs closer than two panel diameters use adaptive source subdivision.
pub fn assemble_pair_matrix(
    mesh: &SurfaceMesh,
    basis: &EdgeBasis,
    omega: f64,
    testing: Testing,
) -> Array2<Complex64> {
    let n = basis.len();
    let nt = mesh.triangles.len();
    let obs_rule = rule_for_degree(mesh.quad_degree);
    let src_rule = rule_for_degree(mesh.quad_degree);
    let diam: Vec<f64> = (0..nt).map(|t| mesh.diameter_of(t)).collect();
    let cents: Vec<V3> = (0..nt).map(|t| mesh.centroid(t)).collect();

    // Row-parallel: each row m integrates over the two supporting triangles
    // of edge m against every other source panel. Deterministic because each
    // row is accumulated by exactly one task in a fixed loop order.
    let rows: Vec<Array1<Complex64>> = (0..n)
        .into_par_iter()
        .map(|m| {
            let mut row = Array1::<Complex64>::zeros(n);
            let em = &basis.edges[m];
            for k in 0..2 {
                let t_o = em.tris[k];
                let sign = if k == 0 { 1.0 } else { -1.0 };
                let lo = crate::potentials::rwg::LocalBasis {
                    edge: m,
                    sign,
                    opposite: em.opp[k],
                    edge_length: em.length,
                };
                let nu = mesh.normal[t_o];
                let corners_o = mesh.corners(t_o);
                for (x, wx) in map_rule(obs_rule, &corners_o, mesh.area[t_o]) {
                    let g_m = basis_value(mesh, &lo, t_o, x);
                    let test_vec = match testing {
                        Testing::Rotated => g_m,
                        Testing::Plain => -nu.cross(&g_m),
                    };
                    for t_s in 0..nt {
                        if t_s == t_o {
                            continue;
                        }
                        let near = (cents[t_s] - cents[t_o]).norm()
                            < 2.0 * diam[t_s].max(diam[t_o]);
                        let locals = &basis.on_tri[t_s];
                        if locals.is_empty() {
                            continue;
                        }
                        let corners_s = mesh.corners(t_s);
                        let mut accumulate = |y: V3, wy: f64| {
                            let gg = GradGreen::new(omega, x - y);
                            for lb in locals {
                                let f_n = basis_value(mesh, lb, t_s, y);
                                let kxf = gg.cross_real(f_n);
                                let val = test_vec.x * kxf.x
                                    + test_vec.y * kxf.y
                                    + test_vec.z * kxf.z;
                                row[lb.edge] += val * (wx * wy);
                            }
                        };
                        if near {
                            integrate_near(x, &corners_s, mesh.quad_degree, 3, &mut accumulate);
                        } else {
                            for (y, wy) in map_rule(src_rule, &corners_s, mesh.area[t_s]) {
                                accumulate(y, wy);
                            }
                        }
                    }
                }
            }
            row
        })
        .collect();

    let mut out = Array2::<Complex64>::zeros((n, n));
    for (m, row) in rows.into_iter().enumerate() {
        out.row_mut(m).assign(&row);
    }
    out
}

/// Edge-element Gram matrix G_mn = ∫ f_m · f_n dσ (real symmetric positive
/// definite, stored complex for direct use in complex solves).
pub fn gram(mesh: &SurfaceMesh, basis: &EdgeBasis) -> Array2<Complex64> {
    let n = basis.len();
    let rule = rule_for_degree(4);
    let mut out = Array2::<Complex64>::zeros((n, n));
    for t in 0..mesh.triangles.len() {
        let locals = &basis.on_tri[t];
        let corners = mesh.corners(t);
        for (y, w) in map_rule(rule, &corners, mesh.area[t]) {
            for a in locals {
                let fa = basis_value(mesh, a, t, y);
                for b in locals {
                    let fb = basis_value(mesh, b, t, y);
                    out[[a.edge, b.edge]] += Complex64::new(w * fa.dot(&fb), 0.0);
                }
            }
        }
    }
    out
}

/// Moment vector b_m = ∫ f_m · v(x) dσ for an arbitrary (complex) field v.
pub fn moments<F>(mesh: &SurfaceMesh, basis: &EdgeBasis, v: F) -> Array1<Complex64>
where
    F: Fn(V3, V3) -> C3 + Sync,
{
    let n = basis.len();
    let rule = rule_for_degree(4);
    let mut out = Array1::<Complex64>::zeros(n);
    for t in 0..mesh.triangles.len() {
        let locals = &basis.on_tri[t];
        if locals.is_empty() {
            continue;
        }
        let nu = mesh.normal[t];
        let corners = mesh.corners(t);
        for (y, w) in map_rule(rule, &corners, mesh.area[t]) {
            let field = v(y, nu);
            for lb in locals {
                let f = basis_value(mesh, lb, t, y);
                out[lb.edge] += (field.x * f.x + field.y * f.y + field.z * f.z) * w;
            }
        }
    }
    out
}

/// L² projection of a tangential field onto the edge-element space.
pub fn project_density<F>(
    mesh: &SurfaceMesh,
    basis: &EdgeBasis,
    v: F,
) -> Result<crate::potentials::rwg::TangentialDensity>
where
    F: Fn(V3, V3) -> C3 + Sync,
{
    let g = gram(mesh, basis);
    let b = moments(mesh, basis, v);
    let coeffs = crate::la::solve_one(&g, &b)?;
    Ok(crate::potentials::rwg::TangentialDensity { coeffs })
}

/// Convenience kernel-gradient evaluation for callers of the pair loop.
pub fn grad_green(omega: f64, w: V3) -> C3 {
    GradGreen::new(omega, w).vector()
}
