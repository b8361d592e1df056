//! End-to-end acceptance suite. Each test exercises one advertised guarantee
//! at its stated tolerance and prints a single verdict line.

use cloak::geometry::{
    make_curve, sphere_mesh, tube_domain, CurveKind, TubeResolution,
};
use cloak::harness::{run, ExperimentConfig, ExperimentKind};
use cloak::potentials::{
    jump_test, project_density, scalar_trace_test, EdgeBasis,
};
use cloak::solver::{
    direction_grid, far_field, mie_far_field, solve_pec, PlaneWave, DEFAULT_DIRECTIONS,
};
use cloak::transform::{
    cloak_exponents, jacobian_full, push_forward, LocationClass,
};
use cloak::{c3, M3, V3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(criterion: &str, detail: &str, ok: bool) {
    eprintln!("[criterion] {criterion}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{criterion}: {detail}");
}

fn run_config(kind: ExperimentKind, text: &str) -> (cloak::harness::ResultTable, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::parse(kind, text).unwrap();
    cfg.out_dir = dir.path().to_path_buf();
    (run(&cfg).unwrap(), dir)
}

// 1. Sphere validation against the multipole series: < 2% relative L² over
//    266 directions at ~3000 edges.
#[test]
fn criterion_01_sphere_far_field_matches_series() {
    let mesh = sphere_mesh(V3::zeros(), 1.0, 3).unwrap();
    let basis = EdgeBasis::build(&mesh).unwrap();
    assert!(
        (1500..=20000).contains(&basis.len()),
        "resolution out of the intended range: {} edges",
        basis.len()
    );
    let wave = PlaneWave::new(V3::x(), V3::z(), 1.0).unwrap();
    let sol = solve_pec(&mesh, &basis, &wave).unwrap();
    let dirs = direction_grid(DEFAULT_DIRECTIONS);
    let bem = far_field(&mesh, &basis, &sol.density, 1.0, &dirs);
    let mie = mie_far_field(1.0, &wave, &dirs).unwrap();
    let err = bem.rel_l2_diff(&mie);
    verdict(
        "01 sphere far field vs series",
        &format!("rel L2 error {err:.4} (< 0.02), {} edges", basis.len()),
        err < 0.02,
    );
}

// 2. Jump and trace identities contract by ≥ 1.5 under one refinement, on
//    the sphere and on the tube.
#[test]
fn criterion_02_jump_and_trace_identities_refine() {
    let omega = 1.0;
    let smooth = |mesh: &cloak::geometry::SurfaceMesh, basis: &EdgeBasis| {
        project_density(mesh, basis, |y, nu| {
            let v = V3::new(0.3 + y.y, y.z - 0.1, 1.0 + 0.5 * y.x);
            c3(v - nu * nu.dot(&v))
        })
        .unwrap()
    };
    let hmax = |mesh: &cloak::geometry::SurfaceMesh| {
        (0..mesh.n_triangles()).map(|t| mesh.diameter_of(t)).fold(0.0_f64, f64::max)
    };
    let phi_of = |mesh: &cloak::geometry::SurfaceMesh| -> Vec<cloak::Complex64> {
        (0..mesh.triangles.len())
            .map(|t| {
                let ctr = mesh.centroid(t);
                cloak::Complex64::new(1.0 + 0.5 * ctr.z, 0.3 * ctr.x)
            })
            .collect()
    };
    let curve = make_curve(
        &CurveKind::Segment { a: V3::zeros(), b: V3::new(1.0, 0.0, 0.0) },
        64,
    )
    .unwrap();
    let tube = tube_domain(&curve, 0.2, TubeResolution::for_delta(curve.length, 0.2, 8)).unwrap();
    let mut ok = true;
    let mut details = Vec::new();
    for (name, coarse) in [("sphere", sphere_mesh(V3::zeros(), 1.0, 1).unwrap()), ("tube", tube)] {
        let fine = coarse.refine(1);
        let bc = EdgeBasis::build(&coarse).unwrap();
        let bf = EdgeBasis::build(&fine).unwrap();
        let jc = jump_test(&coarse, &bc, &smooth(&coarse, &bc), omega, 0.1 * hmax(&coarse));
        let jf = jump_test(&fine, &bf, &smooth(&fine, &bf), omega, 0.1 * hmax(&fine));
        let tc = scalar_trace_test(&coarse, &phi_of(&coarse), omega, 0.1 * hmax(&coarse));
        let tf = scalar_trace_test(&fine, &phi_of(&fine), omega, 0.1 * hmax(&fine));
        ok &= jc / jf >= 1.5 && tc / tf >= 1.5;
        details.push(format!("{name}: jump ×{:.2}, trace ×{:.2}", jc / jf, tc / tf));
    }
    verdict("02 jump/trace refinement", &format!("{} (≥ 1.5)", details.join("; ")), ok);
}

// 3. Jacobian identities at every mesh node of the δ = 0.1 tube, with the
//    eigenvalue sandwich on 100 random vectors per node.
#[test]
fn criterion_03_jacobian_identities_at_mesh_nodes() {
    let delta = 0.1;
    let curve = make_curve(
        &CurveKind::Segment { a: V3::zeros(), b: V3::new(1.0, 0.0, 0.0) },
        64,
    )
    .unwrap();
    let mesh = tube_domain(&curve, delta, TubeResolution::for_delta(curve.length, delta, 12)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_normal = 0.0_f64;
    let mut worst_det = 0.0_f64;
    let mut sandwich_ok = true;
    for (v, z) in mesh.vertices.iter().zip(mesh.z_projection.iter()) {
        let jac = jacobian_full(*v, delta, &curve).unwrap();
        let nu = (v - z) / delta;
        worst_normal = worst_normal.max((jac.matrix * nu - nu / delta).norm());
        let det_ref = match jac.class {
            LocationClass::TubeFacade => delta.powi(-2),
            _ => delta.powi(-3),
        };
        worst_det = worst_det.max((jac.det - det_ref).abs() / det_ref);
        for _ in 0..100 {
            let w = V3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            if w.norm() < 1e-6 {
                continue;
            }
            let q = (jac.matrix * w).dot(&w) / w.norm_squared();
            sandwich_ok &= (1.0 - 1e-10..=1.0 / delta + 1e-10).contains(&q);
        }
    }
    verdict(
        "03 Jacobian identities",
        &format!(
            "max |Bν−ν/δ| {worst_normal:.2e}, max det defect {worst_det:.2e} (≤ 1e−8), sandwich {}",
            if sandwich_ok { "ok" } else { "violated" }
        ),
        worst_normal < 1e-8 && worst_det < 1e-8 && sandwich_ok,
    );
}

// 4. Push-forward algebra on 1000 random SPD inputs to 1e−12.
#[test]
fn criterion_04_push_forward_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let random_spd = |rng: &mut ChaCha8Rng| {
        let mut a = M3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                a[(i, j)] = rng.gen_range(-1.0..1.0);
            }
        }
        a * a.transpose() + M3::identity()
    };
    let mut worst = 0.0_f64;
    let mut spd_ok = true;
    for _ in 0..1000 {
        let m = random_spd(&mut rng);
        let mut b1 = random_spd(&mut rng);
        let mut b2 = random_spd(&mut rng);
        if b1.determinant() <= 0.0 {
            b1 = -b1;
        }
        if b2.determinant() <= 0.0 {
            b2 = -b2;
        }
        let id = push_forward(&m, &M3::identity()).unwrap();
        worst = worst.max((id - m).norm() / (1.0 + m.norm()));
        let once = push_forward(&push_forward(&m, &b1).unwrap(), &b2).unwrap();
        let comp = push_forward(&m, &(b2 * b1)).unwrap();
        worst = worst.max((once - comp).norm() / (1.0 + once.norm()));
        let pf = push_forward(&m, &b1).unwrap();
        let det_defect =
            (pf.determinant() - m.determinant() / b1.determinant()).abs() / (1.0 + pf.determinant().abs());
        worst = worst.max(det_defect);
        worst = worst.max((pf - pf.transpose()).norm() / (1.0 + pf.norm()));
        spd_ok &= pf.symmetric_eigen().eigenvalues.min() > 0.0;
    }
    verdict(
        "04 push-forward algebra",
        &format!("worst identity defect {worst:.2e} (< 1e−12), SPD preserved: {spd_ok}"),
        worst < 1e-12 && spd_ok,
    );
}

// 5. Full-cloak δ-sweep: fitted log-log slope in [1.6, 2.4] with r² ≥ 0.98.
#[test]
fn criterion_05_full_cloak_rate() {
    let (table, _dir) = run_config(
        ExperimentKind::SweepFull,
        "omega = 1.0\ndeltas = 0.2, 0.1, 0.05\np = 0, 0, 1\nd = 0, 1, 0\nresolution = 12\nrefinement = 4\n",
    );
    let fit = table.fit.unwrap();
    verdict(
        "05 full-cloak rate",
        &format!("slope {:.3} (in [1.6, 2.4]), r² {:.4} (≥ 0.98)", fit.slope, fit.r2),
        table.passed,
    );
}

// 6. Partial-cloak δ-sweep with p = n: slope in [0.7, 1.3], r² ≥ 0.95; the
//    worst-aperture control (‖p×n‖ = 1) must not decay.
#[test]
fn criterion_06_partial_cloak_rate_and_control() {
    let (table, _dir) = run_config(
        ExperimentKind::SweepPartial,
        "omega = 2.0\ndeltas = 0.2, 0.1, 0.05\np = 0, 0, 1\nd = 1, 0, 0\nresolution = 8\nrefinement = 2\n",
    );
    let fit = table.fit.unwrap();
    let aligned_ok = table.passed;
    let (control, _dir2) = run_config(
        ExperimentKind::SweepPartial,
        "omega = 2.0\ndeltas = 0.2, 0.1, 0.05\np = 1, 0, 0\nd = 0, 1, 0\nresolution = 8\nrefinement = 2\n",
    );
    verdict(
        "06 partial-cloak rate",
        &format!(
            "aligned slope {:.3} (in [0.7, 1.3]), r² {:.4} (≥ 0.95); control {}",
            fit.slope,
            fit.r2,
            control.notes.join(", ")
        ),
        aligned_ok && control.passed,
    );
}

// 7. Aperture linearity at δ = 0.05: doubling ε (ε ≥ 4δ) scales the far-field
//    norm by a factor in [1.6, 2.4].
#[test]
fn criterion_07_aperture_linearity() {
    let (table, _dir) = run_config(
        ExperimentKind::ApertureSweep,
        "omega = 1.0\ndeltas = 0.05\nepsilons = 0.2, 0.4, 0.8\np = 0, 0, 1\nd = 1, 0, 0\nresolution = 8\nrefinement = 2\n",
    );
    verdict(
        "07 aperture linearity",
        &format!("{}", table.notes.join("; ")),
        table.passed,
    );
}

// 8. Operator-expansion residuals: facade ratio in [3, 5] per δ-halving and
//    slab ratio in [1.5, 2.5], on a fixed transplanted density.
#[test]
fn criterion_08_operator_expansion() {
    let (table, _dir) = run_config(
        ExperimentKind::ExpansionCheck,
        "omega = 0.5\ndeltas = 0.2, 0.1, 0.05\n",
    );
    verdict(
        "08 operator expansion",
        &format!("{}", table.notes.join("; ")),
        table.passed,
    );
}

// 9. Leading-order screen model: relative L² distance to the full slab BEM
//    decreases monotonically along δ ∈ {0.2, 0.1, 0.05}.
#[test]
fn criterion_09_leading_order_screen_model() {
    let (table, _dir) = run_config(
        ExperimentKind::LeadingOrderCheck,
        "omega = 1.0\ndeltas = 0.2, 0.1, 0.05\np = 1, 0, 0\nd = 0, 1, 0\nresolution = 8\n",
    );
    verdict(
        "09 leading-order screen model",
        &format!("{}", table.notes.join("; ")),
        table.passed,
    );
}

// 10. Exponent calculus frozen values, exact equality.
#[test]
fn criterion_10_exponent_calculus() {
    let a = cloak_exponents(0.0, 2.0, 0.0);
    let b = cloak_exponents(0.0, 2.5, 0.0);
    let ok = a.beta == 1.0
        && a.beta_prime == 0.0
        && a.full_rate == 2.0
        && b.beta_j[2] == 0.5
        && b.partial_rate == 1.0;
    verdict(
        "10 exponent calculus",
        &format!(
            "(0,2,0): β={}, β′={}, full rate {}; (0,5/2,0): β₂={}, partial rate {}",
            a.beta, a.beta_prime, a.full_rate, b.beta_j[2], b.partial_rate
        ),
        ok,
    );
}

// 11. Bitwise reproducibility of CSV artifacts (wall-time column excluded)
//     across two runs with identical config and seed.
#[test]
fn criterion_11_deterministic_reproducibility() {
    let strip_wall = |text: &str| -> String {
        text.lines()
            .map(|l| {
                if l.starts_with('#') || l.starts_with("sweep_var") {
                    l.to_string()
                } else {
                    // Drop the trailing wall_ms column.
                    match l.rsplit_once(',') {
                        Some((head, _)) => head.to_string(),
                        None => l.to_string(),
                    }
                }
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    let text = "omega = 1.0\nsphere_levels = 2\nseed = 7\n";
    let (t1, dir1) = run_config(ExperimentKind::ValidateSphere, text);
    let (t2, dir2) = run_config(ExperimentKind::ValidateSphere, text);
    assert_eq!(t1.config_hash, t2.config_hash);
    let r1 = std::fs::read_to_string(dir1.path().join("results.csv")).unwrap();
    let r2 = std::fs::read_to_string(dir2.path().join("results.csv")).unwrap();
    let results_match = strip_wall(&r1) == strip_wall(&r2);
    let f1 = std::fs::read(dir1.path().join("farfield_0.csv")).unwrap();
    let f2 = std::fs::read(dir2.path().join("farfield_0.csv")).unwrap();
    let m1 = std::fs::read(dir1.path().join("mesh_0.vtk")).unwrap();
    let m2 = std::fs::read(dir2.path().join("mesh_0.vtk")).unwrap();
    verdict(
        "11 deterministic reproducibility",
        &format!(
            "results.csv (modulo wall_ms): {}, farfield bitwise: {}, mesh bitwise: {}",
            results_match,
            f1 == f2,
            m1 == m2
        ),
        results_match && f1 == f2 && m1 == m2,
    );
}
