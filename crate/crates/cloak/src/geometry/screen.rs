//! Graded triangulation of the open generating square Γ₀.

use super::mesh::{MeshBuilder, RegionTag, Surface, SurfaceMesh};
use super::slab::PartialGeneratorSpec;
use crate::{Error, Result};

/// 1-D partition of [0, side] with `base` uniform cells whose first and last
/// cells are geometrically graded toward the ends (factor 0.5, `levels`
/// levels), so panel size shrinks like the distance to the boundary.
fn graded_axis(side: f64, base: usize, levels: usize) -> Vec<f64> {
    let h = side / base as f64;
    let mut widths: Vec<f64> = Vec::new();
    // Graded sub-cells of the first base cell: h/2, h/4, ..., h/2^L, h/2^L.
    let mut sub: Vec<f64> = (1..=levels).map(|k| h / (1u32 << k) as f64).collect();
    sub.push(h / (1u32 << levels) as f64);
    sub.reverse(); // smallest first, nearest the boundary
    widths.extend(sub.iter());
    widths.extend(std::iter::repeat(h).take(base.saturating_sub(2)));
    widths.extend(sub.iter().rev());
    let mut nodes = vec![0.0];
    for w in widths {
        nodes.push(nodes.last().unwrap() + w);
    }
    // Snap the last node exactly to `side` (cumulative rounding).
    *nodes.last_mut().unwrap() = side;
    nodes
}

/// Build the open, graded screen mesh of the generating square (tag `Screen`).
/// `base` is the uniform cell count per side, `levels` the grading depth.
pub fn screen_mesh(spec: &PartialGeneratorSpec, base: usize, levels: usize) -> Result<SurfaceMesh> {
    if base < 4 {
        return Err(Error::Geometry("screen base resolution must be at least 4".into()));
    }
    let axis = graded_axis(spec.side, base, levels);
    let h = 0.5 * spec.side;
    let mut b = MeshBuilder::new();
    for i in 0..axis.len() - 1 {
        for j in 0..axis.len() - 1 {
            let (a0, a1) = (axis[i] - h, axis[i + 1] - h);
            let (b0, b1) = (axis[j] - h, axis[j + 1] - h);
            let p = |a: f64, bb: f64| spec.world(a, bb, 0.0);
            b.triangle(p(a0, b0), p(a1, b0), p(a1, b1), RegionTag::Screen);
            b.triangle(p(a0, b0), p(a1, b1), p(a0, b1), RegionTag::Screen);
        }
    }
    b.finish(Surface::Screen { spec: *spec }, false, 4)
}
