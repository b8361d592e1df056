//! Rounded-slab meshing of the δ-neighborhood of a planar square.

use super::mesh::{MeshBuilder, RegionTag, Surface, SurfaceMesh};
use crate::{Error, Result, V3};
use std::f64::consts::PI;

/// The planar generating square Γ₀: side length, center and unit normal.
#[derive(Debug, Clone, Copy)]
pub struct PartialGeneratorSpec {
    pub side: f64,
    pub center: V3,
    pub normal: V3,
}

impl PartialGeneratorSpec {
    pub fn new(side: f64, center: V3, normal: V3) -> Result<Self> {
        if side <= 0.0 {
            return Err(Error::Geometry("square side must be positive".into()));
        }
        if (normal.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Geometry("square normal must be a unit vector".into()));
        }
        Ok(PartialGeneratorSpec { side, center, normal })
    }

    /// Default unit square centered at the origin with normal e₃.
    pub fn unit() -> Self {
        PartialGeneratorSpec { side: 1.0, center: V3::zeros(), normal: V3::z() }
    }

    /// Orthonormal in-plane axes (u₁, u₂) completing the normal.
    pub fn plane_axes(&self) -> (V3, V3) {
        let n = self.normal;
        let seed = if n.x.abs() < 0.9 { V3::x() } else { V3::y() };
        let u1 = (seed - n * n.dot(&seed)).normalize();
        let u2 = n.cross(&u1);
        (u1, u2)
    }

    /// Local coordinates (a, b, c) of a point: in-plane offsets and height.
    pub fn local(&self, p: V3) -> (f64, f64, f64) {
        let (u1, u2) = self.plane_axes();
        let d = p - self.center;
        (d.dot(&u1), d.dot(&u2), d.dot(&self.normal))
    }

    /// World point from local coordinates.
    pub fn world(&self, a: f64, b: f64, c: f64) -> V3 {
        let (u1, u2) = self.plane_axes();
        self.center + u1 * a + u2 * b + self.normal * c
    }

    /// Nearest point of the closed square to an arbitrary point.
    pub fn nearest_square_point(&self, p: V3) -> V3 {
        let h = 0.5 * self.side;
        let (a, b, _) = self.local(p);
        self.world(a.clamp(-h, h), b.clamp(-h, h), 0.0)
    }
}

/// Mesh density for slab domains.
#[derive(Debug, Clone, Copy)]
pub struct SlabResolution {
    /// Grid cells per side on the flat faces.
    pub square: usize,
    /// Angular panels across the half-circle rim profile.
    pub angular: usize,
    /// Azimuthal panels over each quarter-sphere corner.
    pub corner: usize,
}

impl SlabResolution {
    /// Resolution with rim panels resolving radius `delta` and flat panels of
    /// comparable size, clamped to keep the unknown count at desk scale.
    pub fn for_delta(side: f64, delta: f64, angular: usize) -> SlabResolution {
        let arc = PI * delta / angular as f64;
        let square = ((side / (2.0 * arc)).ceil() as usize).clamp(6, 28);
        SlabResolution { square, angular, corner: (angular / 2).max(2) }
    }
}

/// Build the closed boundary mesh of the slab domain D_δ: flat squares at
/// offset ±δn (tag `S0`), four half-cylinders of radius δ along the edges
/// (tag `S1`) and four quarter-spheres at the corners (tag `S2`).
pub fn slab_domain(spec: &PartialGeneratorSpec, delta: f64, res: SlabResolution) -> Result<SurfaceMesh> {
    if delta <= 0.0 || delta >= 0.5 * spec.side {
        return Err(Error::Geometry(format!(
            "slab thickness {delta} outside (0, side/2 = {})",
            0.5 * spec.side
        )));
    }
    if res.angular < 4 {
        return Err(Error::Geometry("need at least 4 angular rim panels".into()));
    }
    let h = 0.5 * spec.side;
    let m = res.square.max(2);
    let na = res.angular;
    let np = res.corner.max(1);
    let mut b = MeshBuilder::new();

    // Flat faces.
    let coord = |i: usize| -> f64 { -h + spec.side * i as f64 / m as f64 };
    for &sgn in &[1.0, -1.0] {
        for i in 0..m {
            for j in 0..m {
                let (a0, a1, b0, b1) = (coord(i), coord(i + 1), coord(j), coord(j + 1));
                let p = |a: f64, bb: f64| spec.world(a, bb, sgn * delta);
                b.triangle(p(a0, b0), p(a1, b0), p(a1, b1), RegionTag::S0);
                b.triangle(p(a0, b0), p(a1, b1), p(a0, b1), RegionTag::S0);
            }
        }
    }

    // Rim profile angles from the top junction (α = π/2) to the bottom.
    let alpha = |k: usize| -> f64 { 0.5 * PI - PI * k as f64 / na as f64 };

    // Corners in cyclic order with their outward edge directions.
    let corners = [(-h, -h), (h, -h), (h, h), (-h, h)];
    let outward = [(0.0, -1.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0)]; // edge k: corners k -> k+1

    // Side half-cylinders along each edge.
    for k in 0..4 {
        let (c0, c1) = (corners[k], corners[(k + 1) % 4]);
        let (wa, wb) = outward[k];
        let q = |t: f64| -> (f64, f64) { (c0.0 + (c1.0 - c0.0) * t, c0.1 + (c1.1 - c0.1) * t) };
        let point = |i: usize, kk: usize| -> V3 {
            let (qa, qb) = q(i as f64 / m as f64);
            let al = alpha(kk);
            spec.world(qa + delta * al.cos() * wa, qb + delta * al.cos() * wb, delta * al.sin())
        };
        for i in 0..m {
            for kk in 0..na {
                b.triangle(point(i, kk), point(i + 1, kk), point(i + 1, kk + 1), RegionTag::S1);
                b.triangle(point(i, kk), point(i + 1, kk + 1), point(i, kk + 1), RegionTag::S1);
            }
        }
    }

    // Quarter-sphere corners, spanned by the two adjacent edge outward
    // directions; φ = 0 matches the preceding edge's cylinder end and
    // φ = π/2 the following edge's start.
    for k in 0..4 {
        let c = corners[k];
        let (w1a, w1b) = outward[(k + 3) % 4];
        let (w2a, w2b) = outward[k];
        let point = |l: usize, kk: usize| -> V3 {
            let phi = 0.5 * PI * l as f64 / np as f64;
            let al = alpha(kk);
            let (da, db) = (
                phi.cos() * w1a + phi.sin() * w2a,
                phi.cos() * w1b + phi.sin() * w2b,
            );
            spec.world(c.0 + delta * al.cos() * da, c.1 + delta * al.cos() * db, delta * al.sin())
        };
        for l in 0..np {
            for kk in 0..na {
                b.triangle(point(l, kk), point(l + 1, kk), point(l + 1, kk + 1), RegionTag::S2);
                b.triangle(point(l, kk), point(l + 1, kk + 1), point(l, kk + 1), RegionTag::S2);
            }
        }
    }

    b.finish(Surface::Slab { spec: *spec, delta }, true, 4)
}
