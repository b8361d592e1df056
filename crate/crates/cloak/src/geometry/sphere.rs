//! Icosphere meshing of a sphere (solver validation geometry).

use super::mesh::{MeshBuilder, RegionTag, Surface, SurfaceMesh};
use crate::{Result, V3};

/// Build a sphere mesh by `levels`-fold 4-split subdivision of an icosahedron
/// with re-projection onto the sphere. Level 3 gives 1280 panels / 1920 edges.
pub fn sphere_mesh(center: V3, radius: f64, levels: usize) -> Result<SurfaceMesh> {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let raw = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ];
    let verts: Vec<V3> = raw
        .iter()
        .map(|&(x, y, z)| center + V3::new(x, y, z).normalize() * radius)
        .collect();
    let faces: [[usize; 3]; 20] = [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    let project = |p: V3| center + (p - center).normalize() * radius;
    let mut builder = MeshBuilder::new();
    let subdivide = |a: V3, b: V3, c: V3| {
        // Iterative 4-split to the requested level.
        let mut tris = vec![(a, b, c)];
        for _ in 0..levels {
            let mut next = Vec::with_capacity(4 * tris.len());
            for (a, b, c) in tris {
                let ab = project((a + b) * 0.5);
                let bc = project((b + c) * 0.5);
                let ca = project((c + a) * 0.5);
                next.push((a, ab, ca));
                next.push((ab, b, bc));
                next.push((ca, bc, c));
                next.push((ab, bc, ca));
            }
            tris = next;
        }
        tris
    };
    for f in faces {
        for (a, b, c) in subdivide(verts[f[0]], verts[f[1]], verts[f[2]]) {
            builder.triangle(a, b, c, RegionTag::Sphere);
        }
    }
    builder.finish(Surface::Sphere { center, radius }, true, 4)
}
