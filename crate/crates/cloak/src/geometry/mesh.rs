//! Flat-triangle surface meshes with region tags, outward normals and
//! generator projections.

use super::curve::Curve;
use super::slab::PartialGeneratorSpec;
use crate::{Error, Result, V3};
use std::collections::HashMap;

/// Region labels for mesh panels. `FacadeF`, `CapA`, `CapB` belong to tube
/// domains; `S0`, `S1`, `S2` to slab domains; `Sphere` marks the validation
/// sphere; `Screen` the open generating square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionTag {
    FacadeF,
    CapA,
    CapB,
    S0,
    S1,
    S2,
    Sphere,
    Screen,
}

impl RegionTag {
    /// Stable integer id used in VTK export.
    pub fn id(self) -> i32 {
        match self {
            RegionTag::FacadeF => 0,
            RegionTag::CapA => 1,
            RegionTag::CapB => 2,
            RegionTag::S0 => 3,
            RegionTag::S1 => 4,
            RegionTag::S2 => 5,
            RegionTag::Sphere => 6,
            RegionTag::Screen => 7,
        }
    }
}

/// The exact surface a mesh approximates; used to re-project refined vertices
/// and to orient panels outward. All closed surfaces here are δ-offsets of
/// their generating set, so projection is generator-distance based and needs
/// no region tag.
#[derive(Debug, Clone)]
pub enum Surface {
    /// δ-offset of a curve: tube facade plus hemispherical endpoint caps.
    Tube { curve: Curve, delta: f64 },
    /// δ-offset of a closed planar square: slab with rounded rim.
    Slab { spec: PartialGeneratorSpec, delta: f64 },
    Sphere { center: V3, radius: f64 },
    /// Open planar screen (the generating square itself).
    Screen { spec: PartialGeneratorSpec },
}

impl Surface {
    /// Nearest point of the generating set (curve / closed square / center).
    pub fn generator_point(&self, p: V3) -> V3 {
        match self {
            Surface::Tube { curve, .. } => curve.nearest_point(p).1,
            Surface::Slab { spec, .. } => spec.nearest_square_point(p),
            Surface::Sphere { center, .. } => *center,
            Surface::Screen { spec } => spec.nearest_square_point(p),
        }
    }

    /// Project a point onto the exact surface; returns the projected point
    /// and its generator projection z.
    pub fn project(&self, p: V3) -> (V3, V3) {
        match self {
            Surface::Tube { delta, .. } | Surface::Slab { delta, .. } => {
                let z = self.generator_point(p);
                let d = p - z;
                let n = d.norm();
                if n < 1e-14 {
                    // Degenerate: point on the generator; leave it (cannot happen
                    // for midpoints of valid surface triangles).
                    (p, z)
                } else {
                    (z + d * (delta / n), z)
                }
            }
            Surface::Sphere { center, radius } => {
                let d = p - center;
                (center + d * (radius / d.norm()), *center)
            }
            Surface::Screen { spec } => {
                let z = spec.nearest_square_point(p);
                (z, z)
            }
        }
    }
}

/// Triangulated surface with per-panel tag/normal/area and per-vertex
/// generator projection. `surface` carries the exact geometry for refinement.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub vertices: Vec<V3>,
    pub triangles: Vec<[usize; 3]>,
    pub region_tag: Vec<RegionTag>,
    pub normal: Vec<V3>,
    pub area: Vec<f64>,
    pub z_projection: Vec<V3>,
    pub surface: Surface,
    /// Default quadrature degree for panel integrals.
    pub quad_degree: usize,
    /// Whether the mesh is a closed surface (false for the screen).
    pub closed: bool,
}

/// Incremental mesh builder with vertex deduplication on quantized
/// coordinates, so independently generated patches stitch watertight.
pub struct MeshBuilder {
    vertices: Vec<V3>,
    lookup: HashMap<(i64, i64, i64), usize>,
    triangles: Vec<[usize; 3]>,
    tags: Vec<RegionTag>,
}

const QUANT: f64 = 1e9;

impl MeshBuilder {
    pub fn new() -> Self {
        MeshBuilder {
            vertices: Vec::new(),
            lookup: HashMap::new(),
            triangles: Vec::new(),
            tags: Vec::new(),
        }
    }

    pub fn vertex(&mut self, p: V3) -> usize {
        let key = (
            (p.x * QUANT).round() as i64,
            (p.y * QUANT).round() as i64,
            (p.z * QUANT).round() as i64,
        );
        if let Some(&i) = self.lookup.get(&key) {
            return i;
        }
        let i = self.vertices.len();
        self.vertices.push(p);
        self.lookup.insert(key, i);
        i
    }

    pub fn triangle(&mut self, a: V3, b: V3, c: V3, tag: RegionTag) {
        let (i, j, k) = (self.vertex(a), self.vertex(b), self.vertex(c));
        if i == j || j == k || i == k {
            return; // degenerate after dedup (collapsed pole edges etc.)
        }
        self.triangles.push([i, j, k]);
        self.tags.push(tag);
    }

    /// Finish the mesh: orient panels outward with respect to the generating
    /// set, compute normals/areas/projections, and validate closedness.
    pub fn finish(self, surface: Surface, closed: bool, quad_degree: usize) -> Result<SurfaceMesh> {
        let mut mesh = SurfaceMesh {
            vertices: self.vertices,
            triangles: self.triangles,
            region_tag: self.tags,
            normal: Vec::new(),
            area: Vec::new(),
            z_projection: Vec::new(),
            surface,
            quad_degree,
            closed,
        };
        mesh.orient_outward();
        mesh.recompute_derived();
        mesh.validate()?;
        Ok(mesh)
    }
}

impl Default for MeshBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl SurfaceMesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn centroid(&self, t: usize) -> V3 {
        let [a, b, c] = self.triangles[t];
        (self.vertices[a] + self.vertices[b] + self.vertices[c]) / 3.0
    }

    pub fn corners(&self, t: usize) -> [V3; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn diameter_of(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        (a - b).norm().max((b - c).norm()).max((c - a).norm())
    }

    /// Largest pairwise vertex distance (cheap bounding estimate via
    /// axis-aligned extent).
    pub fn mesh_diameter(&self) -> f64 {
        let mut lo = V3::repeat(f64::INFINITY);
        let mut hi = V3::repeat(f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (hi - lo).norm()
    }

    pub fn total_area(&self) -> f64 {
        self.area.iter().sum()
    }

    pub fn area_of_tag(&self, tag: RegionTag) -> f64 {
        self.region_tag
            .iter()
            .zip(&self.area)
            .filter(|(t, _)| **t == tag)
            .map(|(_, a)| a)
            .sum()
    }

    /// Signed volume via the divergence theorem (x·ν/3 integrated).
    pub fn signed_volume(&self) -> f64 {
        let mut v = 0.0;
        for t in 0..self.n_triangles() {
            let [a, b, c] = self.corners(t);
            v += a.dot(&b.cross(&c)) / 6.0;
        }
        v
    }

    fn orient_outward(&mut self) {
        let surface = self.surface.clone();
        for t in 0..self.triangles.len() {
            let [a, b, c] = self.corners(t);
            let n = (b - a).cross(&(c - a));
            let centroid = (a + b + c) / 3.0;
            let outward = match &surface {
                Surface::Screen { spec } => spec.normal,
                s => {
                    let z = s.generator_point(centroid);
                    centroid - z
                }
            };
            if n.dot(&outward) < 0.0 {
                self.triangles[t].swap(1, 2);
            }
        }
    }

    fn recompute_derived(&mut self) {
        self.normal.clear();
        self.area.clear();
        for t in 0..self.triangles.len() {
            let [a, b, c] = self.corners(t);
            let n = (b - a).cross(&(c - a));
            let norm = n.norm();
            self.normal.push(n / norm);
            self.area.push(0.5 * norm);
        }
        let surface = self.surface.clone();
        self.z_projection = self
            .vertices
            .iter()
            .map(|&v| surface.generator_point(v))
            .collect();
    }

    /// Number of edges that belong to exactly one triangle.
    pub fn boundary_edge_count(&self) -> usize {
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (i, j) = (tri[k], tri[(k + 1) % 3]);
                let key = (i.min(j), i.max(j));
                *counts.entry(key).or_insert(0) += 1;
            }
        }
        counts.values().filter(|&&c| c == 1).count()
    }

    /// Validate structural invariants: closedness with opposite orientation,
    /// outward normals, non-degenerate panels, projection idempotence.
    pub fn validate(&self) -> Result<()> {
        // Orientation-aware edge check: every directed edge must appear once,
        // and (for closed meshes) its reverse exactly once.
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let e = (tri[k], tri[(k + 1) % 3]);
                *directed.entry(e).or_insert(0) += 1;
            }
        }
        for (&(i, j), &c) in &directed {
            if c != 1 {
                return Err(Error::Geometry(format!(
                    "directed edge ({i},{j}) used {c} times; inconsistent orientation"
                )));
            }
            if self.closed && !directed.contains_key(&(j, i)) {
                return Err(Error::Geometry(format!("edge ({i},{j}) lacks its opposite; open surface")));
            }
        }
        let mean_area = self.total_area() / self.n_triangles().max(1) as f64;
        for (t, &a) in self.area.iter().enumerate() {
            if a <= 1e-14 * mean_area {
                return Err(Error::Geometry(format!("degenerate triangle {t}")));
            }
        }
        // Outwardness against the generator reference.
        if !matches!(self.surface, Surface::Screen { .. }) {
            for t in 0..self.n_triangles() {
                let centroid = self.centroid(t);
                let z = self.surface.generator_point(centroid);
                if self.normal[t].dot(&(centroid - z)) <= 0.0 {
                    return Err(Error::Geometry(format!("inward normal on triangle {t}")));
                }
            }
        }
        // Projection idempotence.
        for (v, z) in self.vertices.iter().zip(&self.z_projection) {
            let zz = self.surface.generator_point(*z);
            if (zz - z).norm() > 1e-9 * (1.0 + v.norm()) {
                return Err(Error::Geometry("generator projection not idempotent".into()));
            }
        }
        Ok(())
    }

    /// Uniform 4-split refinement with exact-surface re-projection, `levels`
    /// times. Tags are inherited; normals, areas and projections recomputed.
    pub fn refine(&self, levels: usize) -> SurfaceMesh {
        let mut mesh = self.clone();
        for _ in 0..levels {
            mesh = mesh.refine_once();
        }
        mesh
    }

    fn refine_once(&self) -> SurfaceMesh {
        let mut vertices = self.vertices.clone();
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        let mut tags = Vec::with_capacity(4 * self.triangles.len());
        let surface = self.surface.clone();
        let mut mid = |i: usize, j: usize, vertices: &mut Vec<V3>| -> usize {
            let key = (i.min(j), i.max(j));
            if let Some(&m) = midpoint.get(&key) {
                return m;
            }
            let p = (vertices[i] + vertices[j]) * 0.5;
            let (proj, _) = surface.project(p);
            let m = vertices.len();
            vertices.push(proj);
            midpoint.insert(key, m);
            m
        };
        for (t, tri) in self.triangles.iter().enumerate() {
            let [a, b, c] = *tri;
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            for new_tri in [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]] {
                triangles.push(new_tri);
                tags.push(self.region_tag[t]);
            }
        }
        let mut mesh = SurfaceMesh {
            vertices,
            triangles,
            region_tag: tags,
            normal: Vec::new(),
            area: Vec::new(),
            z_projection: Vec::new(),
            surface: self.surface.clone(),
            quad_degree: self.quad_degree,
            closed: self.closed,
        };
        mesh.orient_outward();
        mesh.recompute_derived();
        mesh
    }

    /// FNV-1a hash of the vertex/triangle data, for artifact traceability.
    pub fn content_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        for v in &self.vertices {
            eat(&v.x.to_le_bytes());
            eat(&v.y.to_le_bytes());
            eat(&v.z.to_le_bytes());
        }
        for t in &self.triangles {
            eat(&(t[0] as u64).to_le_bytes());
            eat(&(t[1] as u64).to_le_bytes());
            eat(&(t[2] as u64).to_le_bytes());
        }
        h
    }
}
