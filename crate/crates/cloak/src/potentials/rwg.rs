//! Divergence-conforming edge elements (Rao–Wilton–Glisson) on triangle meshes.

use std::collections::HashMap;

use ndarray::Array1;
use num_complex::Complex64;

use crate::geometry::SurfaceMesh;
use crate::{Error, Result, C3, V3};

/// One interior edge carrying a basis function. `tris[0]` is the plus
/// triangle (current flows out of it), `tris[1]` the minus triangle;
/// `opp[k]` is the vertex of `tris[k]` opposite the edge.
#[derive(Debug, Clone)]
pub struct RwgEdge {
    pub verts: [usize; 2],
    pub tris: [usize; 2],
    pub opp: [usize; 2],
    pub length: f64,
}

/// Basis function restriction to one supporting triangle.
#[derive(Debug, Clone, Copy)]
pub struct LocalBasis {
    pub edge: usize,
    /// +1 on the plus triangle, -1 on the minus triangle.
    pub sign: f64,
    /// Vertex index (into mesh.vertices) opposite the shared edge.
    pub opposite: usize,
    pub edge_length: f64,
}

/// All edge basis functions of a mesh, with a per-triangle support table.
#[derive(Debug, Clone)]
pub struct EdgeBasis {
    pub edges: Vec<RwgEdge>,
    /// For each triangle, the (at most 3) basis functions supported on it.
    pub on_tri: Vec<Vec<LocalBasis>>,
}

impl EdgeBasis {
    /// Enumerate interior edges in deterministic (sorted vertex pair) order.
    /// Boundary edges of open meshes carry no degree of freedom.
    pub fn build(mesh: &SurfaceMesh) -> Result<Self> {
        let mut edge_map: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for (t, tri) in mesh.triangles.iter().enumerate() {
            for k in 0..3 {
                let a = tri[k];
                let b = tri[(k + 1) % 3];
                let key = (a.min(b), a.max(b));
                edge_map.entry(key).or_default().push((t, tri[(k + 2) % 3]));
            }
        }
        let mut keys: Vec<(usize, usize)> = edge_map
            .iter()
            .filter(|(_, adj)| adj.len() == 2)
            .map(|(&k, _)| k)
            .collect();
        keys.sort_unstable();
        if keys.is_empty() {
            return Err(Error::Geometry("mesh has no interior edges".into()));
        }
        let mut edges = Vec::with_capacity(keys.len());
        let mut on_tri: Vec<Vec<LocalBasis>> = vec![Vec::new(); mesh.triangles.len()];
        for key in keys {
            let adj = &edge_map[&key];
            let (t0, o0) = adj[0];
            let (t1, o1) = adj[1];
            let length = (mesh.vertices[key.0] - mesh.vertices[key.1]).norm();
            let e = edges.len();
            edges.push(RwgEdge { verts: [key.0, key.1], tris: [t0, t1], opp: [o0, o1], length });
            on_tri[t0].push(LocalBasis { edge: e, sign: 1.0, opposite: o0, edge_length: length });
            on_tri[t1].push(LocalBasis { edge: e, sign: -1.0, opposite: o1, edge_length: length });
        }
        Ok(EdgeBasis { edges, on_tri })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// f(y) = ± l/(2A) (y - v_opp) on the supporting triangle.
pub fn basis_value(mesh: &SurfaceMesh, lb: &LocalBasis, tri: usize, y: V3) -> V3 {
    (y - mesh.vertices[lb.opposite]) * (lb.sign * lb.edge_length / (2.0 * mesh.area[tri]))
}

/// Surface divergence ∇_s·f = ± l/A (constant per triangle).
pub fn basis_div(mesh: &SurfaceMesh, lb: &LocalBasis, tri: usize) -> f64 {
    lb.sign * lb.edge_length / mesh.area[tri]
}

/// Coefficient vector of a tangential surface density in the edge basis.
#[derive(Debug, Clone)]
pub struct TangentialDensity {
    pub coeffs: Array1<Complex64>,
}

impl TangentialDensity {
    pub fn zero(n: usize) -> Self {
        TangentialDensity { coeffs: Array1::zeros(n) }
    }
}

/// Pointwise evaluation of the density on triangle `tri` at `y`.
pub fn density_at(
    mesh: &SurfaceMesh,
    basis: &EdgeBasis,
    a: &TangentialDensity,
    tri: usize,
    y: V3,
) -> C3 {
    let mut out = C3::zeros();
    for lb in &basis.on_tri[tri] {
        let v = basis_value(mesh, lb, tri, y);
        let c = a.coeffs[lb.edge];
        out += C3::new(c * v.x, c * v.y, c * v.z);
    }
    out
}

/// Surface L² norm of a density: sqrt(∫ |a|² dσ).
pub fn density_l2(mesh: &SurfaceMesh, basis: &EdgeBasis, a: &TangentialDensity) -> f64 {
    let rule = super::quadrature::rule_for_degree(4);
    let mut acc = 0.0;
    for t in 0..mesh.triangles.len() {
        let corners = mesh.corners(t);
        for (y, w) in super::quadrature::map_rule(rule, &corners, mesh.area[t]) {
            acc += w * crate::c3_norm(density_at(mesh, basis, a, t, y)).powi(2);
        }
    }
    acc.sqrt()
}
