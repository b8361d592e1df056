//! File formats: VTK meshes, CSV tables and the binary matrix dump.

use cloak::geometry::sphere_mesh;
use cloak::io::*;
use cloak::solver::{direction_grid, FarFieldPattern};
use cloak::transform::{physical_cloak_materials, CloakGenerator, CloakRadii};
use cloak::{C3, V3};
use ndarray::Array2;
use num_complex::Complex64;

#[test]
fn matrix_dump_round_trips_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.clkb");
    let mut m = Array2::<Complex64>::zeros((3, 5));
    for (i, v) in m.iter_mut().enumerate() {
        *v = Complex64::new(i as f64 * 0.1, -(i as f64) * 7.5);
    }
    write_matrix_dump(&path, &m).unwrap();
    let back = read_matrix_dump(&path).unwrap();
    assert_eq!(m, back);
    // Header: magic + dimensions + payload of 16-byte complex doubles.
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[0..4], b"CLKB");
    assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 3);
    assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 5);
    assert_eq!(bytes.len(), 16 + 15 * 16);
}

#[test]
fn matrix_dump_rejects_corrupt_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.clkb");
    std::fs::write(&path, b"NOPE").unwrap();
    assert!(read_matrix_dump(&path).is_err());
    std::fs::write(&path, b"CLKB\x02\x00\x00\x00\x02\x00\x00\x00\x00\x00\x00\x00short").unwrap();
    assert!(read_matrix_dump(&path).is_err());
}

#[test]
fn mesh_vtk_has_the_expected_structure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mesh.vtk");
    let mesh = sphere_mesh(V3::zeros(), 1.0, 1).unwrap();
    write_mesh_vtk(&path, &mesh, "unit sphere").unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# vtk DataFile Version 2.0"));
    assert!(text.contains("DATASET POLYDATA"));
    assert!(text.contains(&format!("POINTS {} double", mesh.n_vertices())));
    assert!(text.contains(&format!("POLYGONS {} {}", mesh.n_triangles(), 4 * mesh.n_triangles())));
    assert!(text.contains("SCALARS region_tag int"));
    assert!(text.contains("VECTORS z_projection double"));
}

#[test]
fn farfield_csv_records_metadata_and_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ff.csv");
    let dirs = direction_grid(16);
    let values: Vec<C3> = dirs
        .iter()
        .map(|d| C3::new(Complex64::new(d.x, d.y), Complex64::new(d.z, 0.125), Complex64::new(0.0, 0.0)))
        .collect();
    let pattern = FarFieldPattern { directions: dirs, values, omega: 1.0 };
    write_farfield_csv(&path, &pattern, V3::x(), V3::z(), 0xdeadbeef).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# omega")));
    assert!(text.lines().any(|l| l.starts_with("# p ")));
    assert!(text.lines().any(|l| l.starts_with("# d ")));
    assert!(text.lines().any(|l| l.starts_with("# mesh_hash")));
    assert!(text.contains("theta,phi,ReAx,ImAx,ReAy,ImAy,ReAz,ImAz"));
    // 16 data rows after the header block.
    let data_rows = text.lines().filter(|l| !l.starts_with('#') && l.contains(',') && !l.contains("theta")).count();
    assert_eq!(data_rows, 16);
    // Full-precision reals: 0.125 must round-trip exactly.
    assert!(text.contains("1.2500000000000000e-1"));
}

#[test]
fn materials_files_cover_every_sample() {
    let dir = tempfile::tempdir().unwrap();
    let gen = CloakGenerator::Curve(cloak::asymptotics::unit_segment().unwrap());
    let radii = CloakRadii { inner: 0.5, outer: 1.0 };
    let points = vec![V3::new(0.5, 0.75, 0.0), V3::new(0.5, 0.0, 0.9), V3::new(0.5, 1.5, 0.0)];
    let field = physical_cloak_materials(&gen, 0.1, radii, &points).unwrap();
    let vtk = dir.path().join("mat.vtk");
    let csv = dir.path().join("mat.csv");
    write_materials_vtk(&vtk, &field, "cloak materials").unwrap();
    write_materials_csv(&csv, &field, "abcd1234").unwrap();
    let vtext = std::fs::read_to_string(&vtk).unwrap();
    assert!(vtext.contains(&format!("POINTS {} double", points.len())));
    assert!(vtext.contains("TENSORS epsilon double"));
    assert!(vtext.contains("TENSORS mu double"));
    let ctext = std::fs::read_to_string(&csv).unwrap();
    assert!(ctext.lines().next().unwrap().contains("abcd1234"));
    let rows = ctext.lines().filter(|l| !l.starts_with('#') && !l.starts_with("x,")).count();
    assert_eq!(rows, points.len());
}
