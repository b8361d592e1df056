//! PEC solve, incident fields, far-field patterns and the Mie-series oracle.

use cloak::geometry::sphere_mesh;
use cloak::potentials::EdgeBasis;
use cloak::solver::*;
use cloak::{c3_norm, C3, V3};
use num_complex::Complex64;
use std::f64::consts::PI;

// --- plane wave ---------------------------------------------------------------

#[test]
fn plane_wave_invariants_enforced() {
    assert!(PlaneWave::new(V3::new(2.0, 0.0, 0.0), V3::z(), 1.0).is_err());
    assert!(PlaneWave::new(V3::x(), V3::new(0.5, 0.0, 0.5).normalize(), 1.0).is_err());
    assert!(PlaneWave::new(V3::x(), V3::z(), 0.0).is_err());
    assert!(PlaneWave::new(V3::x(), V3::z(), 1.0).is_ok());
}

#[test]
fn incident_fields_frozen_examples() {
    let wave = PlaneWave::new(V3::x(), V3::z(), 1.0).unwrap();
    let (e, h) = incident_fields(&wave, V3::zeros());
    assert!(c3_norm(e - C3::new(1.0.into(), 0.0.into(), 0.0.into())) < 1e-15);
    // H = i(d×p) at the origin: d×p = z×x = y.
    assert!(c3_norm(h - C3::new(0.0.into(), Complex64::new(0.0, 1.0), 0.0.into())) < 1e-15);
    // Half-period phase: x·d = π/ω gives E = −p.
    let (e, _) = incident_fields(&wave, V3::new(0.3, -0.2, PI));
    assert!(c3_norm(e + C3::new(1.0.into(), 0.0.into(), 0.0.into())) < 1e-12);
}

#[test]
fn incident_field_is_divergence_free() {
    let wave = PlaneWave::new(
        V3::new(0.6, 0.8, 0.0),
        V3::new(0.0, 0.0, 1.0),
        1.7,
    )
    .unwrap();
    let x = V3::new(0.4, -1.2, 0.9);
    let h = 1e-5;
    let mut div = Complex64::new(0.0, 0.0);
    for k in 0..3 {
        let mut e = V3::zeros();
        e[k] = h;
        let (ep, _) = incident_fields(&wave, x + e);
        let (em, _) = incident_fields(&wave, x - e);
        div += (ep[k] - em[k]) / Complex64::new(2.0 * h, 0.0);
    }
    assert!(div.norm() < 1e-6, "∇·E^i = {div}");
}

// --- direction grid -------------------------------------------------------------

#[test]
fn direction_grid_is_unit_and_balanced() {
    let dirs = direction_grid(DEFAULT_DIRECTIONS);
    assert_eq!(dirs.len(), 266);
    let mut mean = V3::zeros();
    for d in &dirs {
        assert!((d.norm() - 1.0).abs() < 1e-12);
        mean += d;
    }
    // Equal-area lattice: the mean direction nearly vanishes.
    assert!((mean / 266.0).norm() < 0.01);
}

// --- PEC solve -------------------------------------------------------------------

#[test]
fn solve_is_linear_in_polarization() {
    let mesh = sphere_mesh(V3::zeros(), 1.0, 1).unwrap();
    let basis = EdgeBasis::build(&mesh).unwrap();
    let d = V3::z();
    let p1 = V3::x();
    let p2 = V3::y();
    let pc = (p1 + p2) / f64::sqrt(2.0);
    let waves = [
        PlaneWave::new(p1, d, 1.0).unwrap(),
        PlaneWave::new(p2, d, 1.0).unwrap(),
        PlaneWave::new(pc, d, 1.0).unwrap(),
    ];
    let sols = solve_pec_many(&mesh, &basis, &waves).unwrap();
    for s in &sols {
        assert!(s.residual < 1e-10, "direct-solve residual {}", s.residual);
    }
    let dirs = direction_grid(64);
    let f1 = far_field(&mesh, &basis, &sols[0].density, 1.0, &dirs);
    let f2 = far_field(&mesh, &basis, &sols[1].density, 1.0, &dirs);
    let fc = far_field(&mesh, &basis, &sols[2].density, 1.0, &dirs);
    let scale = Complex64::new(1.0 / f64::sqrt(2.0), 0.0);
    let mut worst = 0.0_f64;
    for i in 0..dirs.len() {
        let combo = (f1.values[i] + f2.values[i]) * scale;
        worst = worst.max(c3_norm(combo - fc.values[i]));
    }
    assert!(worst < 1e-10 * fc.norm_linf(), "linearity defect {worst}");
}

#[test]
fn far_field_is_transversal_and_zero_for_zero_density() {
    let mesh = sphere_mesh(V3::zeros(), 1.0, 1).unwrap();
    let basis = EdgeBasis::build(&mesh).unwrap();
    let dirs = direction_grid(64);
    let zero = cloak::potentials::TangentialDensity::zero(basis.len());
    let f0 = far_field(&mesh, &basis, &zero, 1.0, &dirs);
    assert_eq!(f0.norm_linf(), 0.0);
    let wave = PlaneWave::new(V3::x(), V3::z(), 1.0).unwrap();
    let sol = solve_pec(&mesh, &basis, &wave).unwrap();
    let f = far_field(&mesh, &basis, &sol.density, 1.0, &dirs);
    assert!(f.max_transversality_defect() < 1e-8);
}

#[test]
fn far_field_matches_direct_large_distance_limit() {
    // ‖x‖·e^{−iω‖x‖}·E_s(‖x‖x̂) → A_∞(x̂).
    let mesh = sphere_mesh(V3::zeros(), 1.0, 1).unwrap();
    let basis = EdgeBasis::build(&mesh).unwrap();
    let wave = PlaneWave::new(V3::x(), V3::z(), 1.0).unwrap();
    let sol = solve_pec(&mesh, &basis, &wave).unwrap();
    let xh = V3::new(0.3, -0.5, 0.81).normalize();
    let ff = far_field(&mesh, &basis, &sol.density, 1.0, &[xh]);
    let rel_at = |r: f64| {
        let (es, _) = scattered_field(&mesh, &basis, &sol.density, 1.0, xh * r);
        let direct = es * Complex64::new(r, 0.0) * (-Complex64::new(0.0, r)).exp();
        c3_norm(direct - ff.values[0]) / c3_norm(ff.values[0])
    };
    let r4 = rel_at(1e4);
    assert!(r4 < 1e-3, "far-field closed form vs direct limit: {r4}");
    // The defect is the O(1/r) tail of the radiation expansion.
    let r3 = rel_at(1e3);
    assert!((r3 / r4 - 10.0).abs() < 1.0, "defect not O(1/‖x‖): {r3:.2e} vs {r4:.2e}");
}

#[test]
fn scattered_field_satisfies_the_maxwell_pair() {
    let mesh = sphere_mesh(V3::zeros(), 1.0, 1).unwrap();
    let basis = EdgeBasis::build(&mesh).unwrap();
    let wave = PlaneWave::new(V3::x(), V3::z(), 1.0).unwrap();
    let sol = solve_pec(&mesh, &basis, &wave).unwrap();
    let omega = 1.0;
    let x = V3::new(2.0, 1.0, -0.5);
    let (_, hs) = scattered_field(&mesh, &basis, &sol.density, omega, x);
    // ∇×E_s by finite differences must equal iωH_s.
    let h = 1e-3;
    let mut curl_e = C3::zeros();
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let mut ei = V3::zeros();
        let mut ej = V3::zeros();
        ei[i] = h;
        ej[j] = h;
        let dj = (scattered_field(&mesh, &basis, &sol.density, omega, x + ei).0
            - scattered_field(&mesh, &basis, &sol.density, omega, x - ei).0)
            / Complex64::new(2.0 * h, 0.0);
        let di = (scattered_field(&mesh, &basis, &sol.density, omega, x + ej).0
            - scattered_field(&mesh, &basis, &sol.density, omega, x - ej).0)
            / Complex64::new(2.0 * h, 0.0);
        curl_e[k] = dj[j] - di[i];
    }
    let rel = c3_norm(curl_e - hs * Complex64::new(0.0, omega)) / c3_norm(hs);
    assert!(rel < 1e-4, "Maxwell pair residual {rel}");
}

#[test]
fn pec_boundary_condition_improves_under_refinement() {
    let wave = PlaneWave::new(V3::x(), V3::z(), 1.0).unwrap();
    let resid_on = |levels: usize| -> f64 {
        let mesh = sphere_mesh(V3::zeros(), 1.0, levels).unwrap();
        let basis = EdgeBasis::build(&mesh).unwrap();
        let sol = solve_pec(&mesh, &basis, &wave).unwrap();
        let tau = 1e-3;
        let mut acc = 0.0;
        let mut den = 0.0;
        for t in 0..mesh.n_triangles() {
            let x = mesh.centroid(t) + mesh.normal[t] * tau;
            let (es, _) = scattered_field(&mesh, &basis, &sol.density, 1.0, x);
            let (ei, _) = incident_fields(&wave, x);
            let tangential = cloak::cross_rc(mesh.normal[t], es + ei);
            acc += mesh.area[t] * c3_norm(tangential).powi(2);
            den += mesh.area[t] * c3_norm(ei).powi(2);
        }
        (acc / den).sqrt()
    };
    let r1 = resid_on(1);
    let r2 = resid_on(2);
    assert!(r2 < r1, "PEC boundary residual not decreasing: {r1:.3e} → {r2:.3e}");
}

// --- Mie oracle --------------------------------------------------------------------

#[test]
fn mie_rayleigh_scaling() {
    let dirs = direction_grid(64);
    let norm_at = |omega: f64| {
        let wave = PlaneWave::new(V3::x(), V3::z(), omega).unwrap();
        mie_far_field(1.0, &wave, &dirs).unwrap().norm_l2()
    };
    let ratio = norm_at(0.1) / norm_at(0.05);
    assert!((3.6..=4.4).contains(&ratio), "Rayleigh ratio {ratio}");
}

#[test]
fn mie_backscatter_flips_with_polarization() {
    let dirs = direction_grid(64);
    let w1 = PlaneWave::new(V3::x(), V3::z(), 1.0).unwrap();
    let w2 = PlaneWave::new(-V3::x(), V3::z(), 1.0).unwrap();
    let f1 = mie_far_field(1.0, &w1, &dirs).unwrap();
    let f2 = mie_far_field(1.0, &w2, &dirs).unwrap();
    let mut worst = 0.0_f64;
    for i in 0..dirs.len() {
        worst = worst.max(c3_norm(f1.values[i] + f2.values[i]));
    }
    assert!(worst < 1e-12 * f1.norm_linf(), "p → −p sign flip defect {worst}");
}

#[test]
fn mie_pattern_is_transversal() {
    let dirs = direction_grid(128);
    let wave = PlaneWave::new(V3::x(), V3::z(), 1.0).unwrap();
    let f = mie_far_field(1.0, &wave, &dirs).unwrap();
    assert!(f.max_transversality_defect() < 1e-10);
}

#[test]
fn mie_reciprocity() {
    // q·A_∞(−d′; p, d) = p·A_∞(−d; q, d′) for the sphere.
    let d1 = V3::z();
    let p1 = V3::x();
    let d2 = V3::x();
    let p2 = V3::y();
    let w1 = PlaneWave::new(p1, d1, 1.0).unwrap();
    let w2 = PlaneWave::new(p2, d2, 1.0).unwrap();
    let f1 = mie_far_field(1.0, &w1, &[-d2]).unwrap();
    let f2 = mie_far_field(1.0, &w2, &[-d1]).unwrap();
    let lhs = f1.values[0].x * p2.x + f1.values[0].y * p2.y + f1.values[0].z * p2.z;
    let rhs = f2.values[0].x * p1.x + f2.values[0].y * p1.y + f2.values[0].z * p1.z;
    assert!((lhs - rhs).norm() < 1e-10 * lhs.norm().max(1e-30), "reciprocity defect");
}

#[test]
fn bem_matches_mie_on_a_coarse_sphere() {
    // Loose mid-resolution agreement; the tight 2% criterion runs in the
    // acceptance suite at the production refinement.
    let mesh = sphere_mesh(V3::zeros(), 1.0, 2).unwrap();
    let basis = EdgeBasis::build(&mesh).unwrap();
    let wave = PlaneWave::new(V3::x(), V3::z(), 1.0).unwrap();
    let sol = solve_pec(&mesh, &basis, &wave).unwrap();
    let dirs = direction_grid(DEFAULT_DIRECTIONS);
    let bem = far_field(&mesh, &basis, &sol.density, 1.0, &dirs);
    let mie = mie_far_field(1.0, &wave, &dirs).unwrap();
    let diff = bem.rel_l2_diff(&mie);
    assert!(diff < 0.05, "coarse sphere vs series: {diff}");
}
