//! Virtual-domain geometry: generating curves and squares, their δ-offset
//! boundary meshes, refinement, and the open screen triangulation.

mod curve;
mod mesh;
mod screen;
mod slab;
mod sphere;
mod tube;

pub use curve::{make_curve, Curve, CurveKind, CurveSample};
pub use mesh::{MeshBuilder, RegionTag, Surface, SurfaceMesh};
pub use screen::screen_mesh;
pub use slab::{slab_domain, PartialGeneratorSpec, SlabResolution};
pub use sphere::sphere_mesh;
pub use tube::{tube_domain, TubeResolution};
