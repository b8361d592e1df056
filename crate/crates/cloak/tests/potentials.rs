//! Kernel values, layer-potential evaluation, Galerkin assembly and the
//! jump/trace identities.

use cloak::geometry::{make_curve, sphere_mesh, tube_domain, CurveKind, TubeResolution};
use cloak::potentials::*;
use cloak::{c3, C3, V3};
use num_complex::Complex64;
use std::f64::consts::PI;

fn unit_sphere(levels: usize) -> cloak::geometry::SurfaceMesh {
    sphere_mesh(V3::zeros(), 1.0, levels).unwrap()
}

fn smooth_density(
    mesh: &cloak::geometry::SurfaceMesh,
    basis: &EdgeBasis,
) -> TangentialDensity {
    // Tangential projection of a smooth vector field.
    project_density(mesh, basis, |y, nu| {
        let v = V3::new(0.3 + y.y, y.z - 0.1, 1.0 + 0.5 * y.x);
        c3(v - nu * nu.dot(&v))
    })
    .unwrap()
}

// --- Green kernel -----------------------------------------------------------

#[test]
fn green_frozen_values() {
    let g0 = green(0.0, V3::new(1.0, 0.0, 0.0));
    assert!((g0.re + 1.0 / (4.0 * PI)).abs() < 1e-15);
    assert!(g0.im.abs() < 1e-15);
    let gpi = green(PI, V3::new(0.0, 1.0, 0.0));
    assert!((gpi.re - 1.0 / (4.0 * PI)).abs() < 1e-12);
    assert!(gpi.im.abs() < 1e-12);
    assert!(green_checked(1.0, V3::zeros()).is_err());
}

#[test]
fn green_satisfies_helmholtz_by_finite_differences() {
    let omega = 1.3;
    let x = V3::new(2.0, 0.3, -0.4).normalize() * 2.0;
    let h = 1e-3;
    let mut lap = Complex64::new(0.0, 0.0);
    for k in 0..3 {
        let mut e = V3::zeros();
        e[k] = h;
        lap += green(omega, x + e) + green(omega, x - e);
    }
    lap = (lap - 6.0 * green(omega, x)) / Complex64::new(h * h, 0.0);
    let resid = (lap + green(omega, x) * omega * omega).norm();
    assert!(resid < 1e-5, "Helmholtz residual {resid}");
}

#[test]
fn grad_green_matches_finite_differences() {
    let omega = 0.9;
    let x = V3::new(0.7, -1.1, 0.4);
    let h = 1e-6;
    let gg = GradGreen::new(omega, x).vector();
    for k in 0..3 {
        let mut e = V3::zeros();
        e[k] = h;
        let fd = (green(omega, x + e) - green(omega, x - e)) / Complex64::new(2.0 * h, 0.0);
        assert!((gg[k] - fd).norm() < 1e-7);
    }
}

// --- single layer -----------------------------------------------------------

#[test]
fn single_layer_zero_density_and_linearity() {
    let mesh = unit_sphere(1);
    let basis = EdgeBasis::build(&mesh).unwrap();
    let x = V3::new(3.0, 1.0, 0.5);
    let zero = TangentialDensity::zero(basis.len());
    assert!(cloak::c3_norm(single_layer_vector(&mesh, &basis, &zero, 1.0, x)) == 0.0);
    let a = smooth_density(&mesh, &basis);
    let mut a2 = a.clone();
    a2.coeffs.mapv_inplace(|c| c * Complex64::new(0.0, 2.5));
    let v1 = single_layer_vector(&mesh, &basis, &a, 1.0, x) * Complex64::new(0.0, 2.5);
    let v2 = single_layer_vector(&mesh, &basis, &a2, 1.0, x);
    assert!(cloak::c3_norm(v1 - v2) < 1e-12 * cloak::c3_norm(v2));
}

#[test]
fn static_single_layer_matches_oversampled_quadrature() {
    // Off-surface evaluation against a 16×-oversampled high-order rule on
    // the same panels and density.
    let mesh = unit_sphere(1);
    let basis = EdgeBasis::build(&mesh).unwrap();
    let a = smooth_density(&mesh, &basis);
    let x = V3::new(0.0, 0.0, 10.0);
    let val = single_layer_vector(&mesh, &basis, &a, 0.0, x);
    let rule = cloak::potentials::quadrature::rule_for_degree(5);
    let mut reference = C3::zeros();
    for t in 0..mesh.triangles.len() {
        // Two levels of 4-way subdivision; the density stays evaluable on
        // the parent plane.
        let mut panels = vec![mesh.corners(t)];
        for _ in 0..2 {
            let mut next = Vec::with_capacity(4 * panels.len());
            for [p, q, r] in panels {
                let (pq, qr, rp) = ((p + q) / 2.0, (q + r) / 2.0, (r + p) / 2.0);
                next.extend_from_slice(&[[p, pq, rp], [pq, q, qr], [rp, qr, r], [pq, qr, rp]]);
            }
            panels = next;
        }
        for [p, q, r] in panels {
            let area = 0.5 * (q - p).cross(&(r - p)).norm();
            for (y, w) in cloak::potentials::quadrature::map_rule(rule, &[p, q, r], area) {
                reference +=
                    density_at(&mesh, &basis, &a, t, y) * green(0.0, x - y) * Complex64::new(w, 0.0);
            }
        }
    }
    let rel = cloak::c3_norm(val - reference) / cloak::c3_norm(reference);
    assert!(rel < 0.005, "oversampled quadrature mismatch {rel}");
}

#[test]
fn curlcurl_matches_omega_identity() {
    // ∇×∇×𝒜 = ω²𝒜 + ∇∇·𝒜 is the implementation; verify against nested
    // finite-difference curls.
    let mesh = unit_sphere(1);
    let basis = EdgeBasis::build(&mesh).unwrap();
    let a = smooth_density(&mesh, &basis);
    let omega = 1.0;
    let x = V3::new(2.0, 0.5, 1.0);
    let direct = curlcurl_a(&mesh, &basis, &a, omega, x);
    let h = 1e-3;
    let curl = |p: V3| -> C3 {
        let mut out = C3::zeros();
        for k in 0..3 {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            let mut ei = V3::zeros();
            let mut ej = V3::zeros();
            ei[i] = h;
            ej[j] = h;
            let dj = (curl_a(&mesh, &basis, &a, omega, p + ei, None)
                - curl_a(&mesh, &basis, &a, omega, p - ei, None))
                / Complex64::new(2.0 * h, 0.0);
            let di = (curl_a(&mesh, &basis, &a, omega, p + ej, None)
                - curl_a(&mesh, &basis, &a, omega, p - ej, None))
                / Complex64::new(2.0 * h, 0.0);
            out[k] = dj[j] - di[i];
        }
        out
    };
    let fd = curl(x);
    let rel = cloak::c3_norm(direct - fd) / cloak::c3_norm(direct);
    assert!(rel < 1e-4, "curl-curl identity residual {rel}");
}

// --- assembly ----------------------------------------------------------------

#[test]
fn gram_is_symmetric_positive_definite() {
    let mesh = unit_sphere(1);
    let basis = EdgeBasis::build(&mesh).unwrap();
    let g = gram(&mesh, &basis);
    let n = basis.len();
    for i in 0..n {
        for j in 0..n {
            assert!((g[[i, j]] - g[[j, i]]).norm() < 1e-14);
            assert!(g[[i, j]].im.abs() < 1e-14);
        }
    }
    // Positive definiteness through random quadratic forms.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                q += v[i] * g[[i, j]].re * v[j];
            }
        }
        assert!(q > 0.0, "Gram quadratic form not positive");
    }
}

#[test]
fn static_m_matrix_is_real_and_deterministic() {
    let mesh = unit_sphere(1);
    let basis = EdgeBasis::build(&mesh).unwrap();
    let m1 = assemble_m(&mesh, &basis, 0.0).unwrap();
    for v in m1.matrix.iter() {
        assert!(v.im.abs() < 1e-14, "static operator has imaginary part {v}");
    }
    let m2 = assemble_m(&mesh, &basis, 0.0).unwrap();
    assert_eq!(m1.matrix, m2.matrix, "assembly not bitwise deterministic");
    let m3 = assemble_m(&mesh, &basis, 1.0).unwrap();
    assert_eq!(m3.matrix, assemble_m(&mesh, &basis, 1.0).unwrap().matrix);
}

#[test]
fn assemble_m_rejects_open_meshes() {
    let spec = cloak::geometry::PartialGeneratorSpec::unit();
    let screen = cloak::geometry::screen_mesh(&spec, 4, 1).unwrap();
    let basis = EdgeBasis::build(&screen).unwrap();
    assert!(assemble_m(&screen, &basis, 1.0).is_err());
}

#[test]
fn static_m_spectral_radius_below_half() {
    // On the sphere the static operator's eigenvalues cluster inside
    // (−1/2, 1/2); the generalized discrete spectrum must stay below
    // 1/2 + 0.05.
    let mesh = unit_sphere(2);
    let basis = EdgeBasis::build(&mesh).unwrap();
    let m = assemble_m(&mesh, &basis, 0.0).unwrap();
    let g = gram(&mesh, &basis);
    // Generalized problem M c = λ G c → solve G⁻¹M and take eigenvalues.
    let n = basis.len();
    let cols: Vec<ndarray::Array1<Complex64>> =
        (0..n).map(|j| m.matrix.column(j).to_owned()).collect();
    let sol = cloak::la::solve(&g, &cols).unwrap();
    let mut gm = ndarray::Array2::<Complex64>::zeros((n, n));
    for (j, col) in sol.into_iter().enumerate() {
        gm.column_mut(j).assign(&col);
    }
    let eig = cloak::la::eigenvalues(&gm).unwrap();
    let rho = eig.iter().map(|l| l.norm()).fold(0.0, f64::max);
    assert!(rho < 0.55, "discrete spectral radius {rho}");
}

// --- jump and trace identities -------------------------------------------------

fn max_panel_diameter(mesh: &cloak::geometry::SurfaceMesh) -> f64 {
    (0..mesh.n_triangles()).map(|t| mesh.diameter_of(t)).fold(0.0, f64::max)
}

#[test]
fn jump_identity_refines_on_the_sphere() {
    // The probe offset scales with the panel size, so the residual tracks
    // the discretization error and must contract under refinement.
    let omega = 1.0;
    let coarse = unit_sphere(1);
    let fine = coarse.refine(1);
    let bc = EdgeBasis::build(&coarse).unwrap();
    let bf = EdgeBasis::build(&fine).unwrap();
    let rc = jump_test(&coarse, &bc, &smooth_density(&coarse, &bc), omega, 0.1 * max_panel_diameter(&coarse));
    let rf = jump_test(&fine, &bf, &smooth_density(&fine, &bf), omega, 0.1 * max_panel_diameter(&fine));
    assert!(rc / rf >= 1.5, "jump residual ratio {:.2} (coarse {rc:.3e}, fine {rf:.3e})", rc / rf);
}

#[test]
fn jump_identity_refines_on_the_tube() {
    let curve = make_curve(
        &CurveKind::Segment { a: V3::zeros(), b: V3::new(1.0, 0.0, 0.0) },
        64,
    )
    .unwrap();
    let delta = 0.2;
    let omega = 1.0;
    let res = TubeResolution::for_delta(curve.length, delta, 8);
    let coarse = tube_domain(&curve, delta, res).unwrap();
    let fine = coarse.refine(1);
    let bc = EdgeBasis::build(&coarse).unwrap();
    let bf = EdgeBasis::build(&fine).unwrap();
    let rc = jump_test(&coarse, &bc, &smooth_density(&coarse, &bc), omega, 0.1 * max_panel_diameter(&coarse));
    let rf = jump_test(&fine, &bf, &smooth_density(&fine, &bf), omega, 0.1 * max_panel_diameter(&fine));
    assert!(rc / rf >= 1.5, "jump residual ratio {:.2} (coarse {rc:.3e}, fine {rf:.3e})", rc / rf);
}

#[test]
fn scalar_trace_refines_on_the_sphere() {
    let omega = 1.0;
    let coarse = unit_sphere(1);
    let fine = coarse.refine(1);
    let phi_of = |mesh: &cloak::geometry::SurfaceMesh| -> Vec<Complex64> {
        (0..mesh.triangles.len())
            .map(|t| {
                let c = mesh.centroid(t);
                Complex64::new(1.0 + 0.5 * c.z, 0.3 * c.x)
            })
            .collect()
    };
    let rc = scalar_trace_test(&coarse, &phi_of(&coarse), omega, 0.1 * max_panel_diameter(&coarse));
    let rf = scalar_trace_test(&fine, &phi_of(&fine), omega, 0.1 * max_panel_diameter(&fine));
    assert!(rc / rf >= 1.5, "trace residual ratio {:.2} (coarse {rc:.3e}, fine {rf:.3e})", rc / rf);
}

#[test]
fn zero_density_gives_zero_residuals() {
    let mesh = unit_sphere(1);
    let basis = EdgeBasis::build(&mesh).unwrap();
    let zero = TangentialDensity::zero(basis.len());
    assert_eq!(jump_test(&mesh, &basis, &zero, 1.0, 1e-3), 0.0);
    let phi = vec![Complex64::new(0.0, 0.0); mesh.triangles.len()];
    assert_eq!(scalar_trace_test(&mesh, &phi, 1.0, 1e-3), 0.0);
}

// --- edge basis ----------------------------------------------------------------

#[test]
fn edge_basis_counts_and_divergence() {
    // Closed mesh: E = 3T/2 interior edges, none on the boundary.
    let mesh = unit_sphere(1);
    let basis = EdgeBasis::build(&mesh).unwrap();
    assert_eq!(basis.len(), 3 * mesh.n_triangles() / 2);
    // Each basis function has equal and opposite surface-divergence flux on
    // its two triangles (div-conforming normal continuity).
    for (e_idx, e) in basis.edges.iter().enumerate() {
        let (t1, t2) = (e.tris[0], e.tris[1]);
        let lb1 = basis.on_tri[t1].iter().find(|lb| lb.edge == e_idx).unwrap();
        let lb2 = basis.on_tri[t2].iter().find(|lb| lb.edge == e_idx).unwrap();
        let flux1 = cloak::potentials::rwg::basis_div(&mesh, lb1, t1) * mesh.area[t1];
        let flux2 = cloak::potentials::rwg::basis_div(&mesh, lb2, t2) * mesh.area[t2];
        assert!((flux1 + flux2).abs() < 1e-10, "divergence fluxes unbalanced");
    }
}

#[test]
fn projection_error_decreases_under_refinement() {
    // L² best-approximation error of a smooth tangential field shrinks with h.
    let target = |y: V3, nu: V3| -> C3 {
        let v = V3::new(0.3 + y.y, y.z - 0.1, 1.0 + 0.5 * y.x);
        c3(v - nu * nu.dot(&v))
    };
    let err_on = |mesh: &cloak::geometry::SurfaceMesh| -> f64 {
        let basis = EdgeBasis::build(mesh).unwrap();
        let a = project_density(mesh, &basis, target).unwrap();
        let rule = cloak::potentials::quadrature::rule_for_degree(4);
        let mut acc = 0.0;
        for t in 0..mesh.triangles.len() {
            let corners = mesh.corners(t);
            let nu = mesh.normal[t];
            for (y, w) in cloak::potentials::quadrature::map_rule(rule, &corners, mesh.area[t]) {
                let d = density_at(mesh, &basis, &a, t, y) - target(y, nu);
                acc += w * cloak::c3_norm(d).powi(2);
            }
        }
        acc.sqrt()
    };
    let coarse = unit_sphere(1);
    let e1 = err_on(&coarse);
    let e2 = err_on(&coarse.refine(1));
    assert!(e1 / e2 >= 1.5, "projection error ratio {:.2}", e1 / e2);
}
