//! Tube-with-caps meshing of the δ-neighborhood of a generating curve.

use super::curve::Curve;
use super::mesh::{MeshBuilder, RegionTag, Surface, SurfaceMesh};
use crate::{Error, Result, V3};
use std::f64::consts::PI;

/// Mesh density for tube domains.
#[derive(Debug, Clone, Copy)]
pub struct TubeResolution {
    /// Panels around the circumference (≥ 8).
    pub circumferential: usize,
    /// Panels along the curve.
    pub axial: usize,
    /// Latitude rings on each hemispherical cap.
    pub cap_rings: usize,
}

impl TubeResolution {
    /// Resolution with roughly unit-aspect panels for radius `delta`.
    pub fn for_delta(length: f64, delta: f64, circumferential: usize) -> TubeResolution {
        let panel = 2.0 * PI * delta / circumferential as f64;
        TubeResolution {
            circumferential,
            axial: (length / panel).ceil().max(4.0) as usize,
            cap_rings: (circumferential / 4).max(2),
        }
    }
}

/// Build the closed boundary mesh of the tube domain D_δ: a radius-δ tube
/// around the curve (tag `FacadeF`) closed by hemispherical caps of radius δ
/// about the endpoints (tags `CapA`, `CapB`).
pub fn tube_domain(curve: &Curve, delta: f64, res: TubeResolution) -> Result<SurfaceMesh> {
    if delta <= 0.0 {
        return Err(Error::Geometry("tube radius must be positive".into()));
    }
    let q0 = curve.clearance_radius();
    if delta > q0 {
        return Err(Error::Geometry(format!(
            "tube radius {delta} exceeds admissible clearance radius {q0:.6}"
        )));
    }
    if res.circumferential < 8 {
        return Err(Error::Geometry("need at least 8 circumferential panels".into()));
    }
    let nc = res.circumferential;
    let na = res.axial.max(1);
    let nr = res.cap_rings.max(1);

    // Circle of facade vertices at arc length xi; θ = 0 aligns with
    // frame_normal_1, fixing the reference direction on every normal disk.
    let ring = |xi: f64| -> Vec<V3> {
        let p = curve.position_at(xi);
        let (n1, n2) = curve.frame_at(xi);
        (0..nc)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / nc as f64;
                p + (n1 * th.cos() + n2 * th.sin()) * delta
            })
            .collect()
    };

    let mut b = MeshBuilder::new();

    // Facade.
    let stations: Vec<f64> = (0..=na).map(|i| curve.length * i as f64 / na as f64).collect();
    let rings: Vec<Vec<V3>> = stations.iter().map(|&xi| ring(xi)).collect();
    for i in 0..na {
        for j in 0..nc {
            let j1 = (j + 1) % nc;
            let (a, bb, c, d) = (rings[i][j], rings[i][j1], rings[i + 1][j1], rings[i + 1][j]);
            b.triangle(a, bb, c, RegionTag::FacadeF);
            b.triangle(a, c, d, RegionTag::FacadeF);
        }
    }

    // Hemispherical caps. The k = 0 latitude coincides with the junction ring.
    for (end, tag) in [(0.0, RegionTag::CapA), (curve.length, RegionTag::CapB)] {
        let center = curve.position_at(end);
        let axis = if end == 0.0 { -curve.tangent_at(0.0) } else { curve.tangent_at(curve.length) };
        let (n1, n2) = curve.frame_at(end);
        let lat = |k: usize, j: usize| -> V3 {
            let phi = 0.5 * PI * k as f64 / nr as f64;
            let th = 2.0 * PI * j as f64 / nc as f64;
            let u = n1 * th.cos() + n2 * th.sin();
            center + (u * phi.cos() + axis * phi.sin()) * delta
        };
        for k in 0..nr - 1 {
            for j in 0..nc {
                let j1 = (j + 1) % nc;
                b.triangle(lat(k, j), lat(k, j1), lat(k + 1, j1), tag);
                b.triangle(lat(k, j), lat(k + 1, j1), lat(k + 1, j), tag);
            }
        }
        let pole = center + axis * delta;
        for j in 0..nc {
            let j1 = (j + 1) % nc;
            b.triangle(lat(nr - 1, j), lat(nr - 1, j1), pole, tag);
        }
    }

    b.finish(
        Surface::Tube { curve: curve.clone(), delta },
        true,
        4,
    )
}
