//! Artifact writers: legacy VTK (meshes and material tensor fields), CSV
//! tables, far-field exports, and the binary operator-matrix dump.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use crate::geometry::SurfaceMesh;
use crate::solver::FarFieldPattern;
use crate::transform::MaterialTensorField;
use crate::{Error, Result, V3};

fn fmt(x: f64) -> String {
    // Fixed scientific formatting keeps artifacts bitwise reproducible.
    format!("{x:.16e}")
}

/// Legacy VTK ASCII 2.0 POLYDATA export with the per-panel `region_tag`
/// (CELL_DATA) and the per-vertex generator projection `z_projection`
/// (POINT_DATA).
pub fn write_mesh_vtk(path: &Path, mesh: &SurfaceMesh, title: &str) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# vtk DataFile Version 2.0")?;
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET POLYDATA")?;
    writeln!(w, "POINTS {} double", mesh.vertices.len())?;
    for v in &mesh.vertices {
        writeln!(w, "{} {} {}", fmt(v.x), fmt(v.y), fmt(v.z))?;
    }
    let nt = mesh.triangles.len();
    writeln!(w, "POLYGONS {} {}", nt, 4 * nt)?;
    for t in &mesh.triangles {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(w, "CELL_DATA {nt}")?;
    writeln!(w, "SCALARS region_tag int 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for tag in &mesh.region_tag {
        writeln!(w, "{}", tag.id())?;
    }
    writeln!(w, "POINT_DATA {}", mesh.vertices.len())?;
    writeln!(w, "VECTORS z_projection double")?;
    for z in &mesh.z_projection {
        writeln!(w, "{} {} {}", fmt(z.x), fmt(z.y), fmt(z.z))?;
    }
    w.flush()?;
    Ok(())
}

fn write_tensor_field<W: Write>(
    w: &mut W,
    name: &str,
    tensors: &[nalgebra::Matrix3<f64>],
) -> Result<()> {
    writeln!(w, "TENSORS {name} double")?;
    for m in tensors {
        for i in 0..3 {
            writeln!(w, "{} {} {}", fmt(m[(i, 0)]), fmt(m[(i, 1)]), fmt(m[(i, 2)]))?;
        }
    }
    Ok(())
}

/// Material tensor samples as VTK POLYDATA point cloud with 9-component
/// POINT_DATA tensor fields `epsilon`, `mu`, `sigma`.
pub fn write_materials_vtk(path: &Path, field: &MaterialTensorField, title: &str) -> Result<()> {
    let n = field.len();
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# vtk DataFile Version 2.0")?;
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET POLYDATA")?;
    writeln!(w, "POINTS {n} double")?;
    for p in &field.points {
        writeln!(w, "{} {} {}", fmt(p.x), fmt(p.y), fmt(p.z))?;
    }
    writeln!(w, "VERTICES {n} {}", 2 * n)?;
    for i in 0..n {
        writeln!(w, "1 {i}")?;
    }
    writeln!(w, "POINT_DATA {n}")?;
    write_tensor_field(&mut w, "epsilon", &field.epsilon)?;
    write_tensor_field(&mut w, "mu", &field.mu)?;
    write_tensor_field(&mut w, "sigma", &field.sigma)?;
    w.flush()?;
    Ok(())
}

/// Material tensor samples as CSV: x,y,z,e11..e33,m11..m33,s11..s33.
pub fn write_materials_csv(
    path: &Path,
    field: &MaterialTensorField,
    config_hash: &str,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# config_hash {config_hash}")?;
    write!(w, "x,y,z")?;
    for p in ["e", "m", "s"] {
        for i in 1..=3 {
            for j in 1..=3 {
                write!(w, ",{p}{i}{j}")?;
            }
        }
    }
    writeln!(w)?;
    for k in 0..field.len() {
        let p = field.points[k];
        write!(w, "{},{},{}", fmt(p.x), fmt(p.y), fmt(p.z))?;
        for m in [&field.epsilon[k], &field.mu[k], &field.sigma[k]] {
            for i in 0..3 {
                for j in 0..3 {
                    write!(w, ",{}", fmt(m[(i, j)]))?;
                }
            }
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Far-field pattern as CSV: theta,phi,ReAx,ImAx,ReAy,ImAy,ReAz,ImAz, with
/// header comments recording the frequency, the incident wave and the mesh
/// content hash.
pub fn write_farfield_csv(
    path: &Path,
    pattern: &FarFieldPattern,
    p: V3,
    d: V3,
    mesh_hash: u64,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# omega {}", fmt(pattern.omega))?;
    writeln!(w, "# p {} {} {}", fmt(p.x), fmt(p.y), fmt(p.z))?;
    writeln!(w, "# d {} {} {}", fmt(d.x), fmt(d.y), fmt(d.z))?;
    writeln!(w, "# mesh_hash {mesh_hash:016x}")?;
    writeln!(w, "theta,phi,ReAx,ImAx,ReAy,ImAy,ReAz,ImAz")?;
    for (xh, a) in pattern.directions.iter().zip(&pattern.values) {
        let theta = xh.z.clamp(-1.0, 1.0).acos();
        let phi = xh.y.atan2(xh.x);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt(theta),
            fmt(phi),
            fmt(a.x.re),
            fmt(a.x.im),
            fmt(a.y.re),
            fmt(a.y.im),
            fmt(a.z.re),
            fmt(a.z.im)
        )?;
    }
    w.flush()?;
    Ok(())
}

const MATRIX_MAGIC: &[u8; 4] = b"CLKB";

/// Binary operator-matrix dump: 16-byte header (magic "CLKB", u32 rows,
/// u32 cols, 4 reserved bytes), then row-major little-endian complex doubles.
pub fn write_matrix_dump(path: &Path, m: &Array2<Complex64>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MATRIX_MAGIC)?;
    w.write_all(&(m.nrows() as u32).to_le_bytes())?;
    w.write_all(&(m.ncols() as u32).to_le_bytes())?;
    w.write_all(&[0u8; 4])?;
    for v in m.iter() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Read back a matrix dump written by [`write_matrix_dump`].
pub fn read_matrix_dump(path: &Path) -> Result<Array2<Complex64>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    if &header[0..4] != MATRIX_MAGIC {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            "bad matrix dump magic",
        )));
    }
    let rows = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let mut buf = vec![0u8; rows * cols * 16];
    r.read_exact(&mut buf)?;
    let data: Vec<Complex64> = buf
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    Array2::from_shape_vec((rows, cols), data)
        .map_err(|e| Error::Numerical(format!("matrix dump shape: {e}")))
}
