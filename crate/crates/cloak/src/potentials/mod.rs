//! Helmholtz layer potentials on panel meshes: kernels, Galerkin operator
//! assembly over div-conforming edge elements, off-surface evaluation, and
//! jump/trace verification.

pub mod assemble;
pub mod eval;
pub mod quadrature;
pub mod rwg;

use num_complex::Complex64;

use crate::geometry::SurfaceMesh;
use crate::{Error, Result, C3, V3};

pub use assemble::{assemble_pair_matrix, gram, moments, project_density, Testing};
pub use eval::{curl_a, curlcurl_a, grad_div_a, single_layer_vector};
pub use rwg::{density_at, density_l2, EdgeBasis, TangentialDensity};

/// Outgoing fundamental solution G_ω(x) = −e^{iω‖x‖}/(4π‖x‖).
pub fn green(omega: f64, x: V3) -> Complex64 {
    let r = x.norm();
    debug_assert!(r > 0.0, "green evaluated at the singularity");
    -Complex64::new(0.0, omega * r).exp() / (4.0 * std::f64::consts::PI * r)
}

/// Checked variant for API use.
pub fn green_checked(omega: f64, x: V3) -> Result<Complex64> {
    if x.norm() == 0.0 {
        return Err(Error::Numerical("green: evaluation at the singularity".into()));
    }
    Ok(green(omega, x))
}

/// ∇G_ω(w) = w (1 − iω‖w‖) e^{iω‖w‖} / (4π‖w‖³), precomputed as a scalar
/// multiple of w so cross/dot products with many densities are cheap.
#[derive(Debug, Clone, Copy)]
pub struct GradGreen {
    pub w: V3,
    pub scale: Complex64,
}

impl GradGreen {
    #[inline]
    pub fn new(omega: f64, w: V3) -> Self {
        let r = w.norm();
        let ikr = Complex64::new(0.0, omega * r);
        let scale = (Complex64::new(1.0, 0.0) - ikr) * ikr.exp()
            / (4.0 * std::f64::consts::PI * r * r * r);
        GradGreen { w, scale }
    }

    #[inline]
    pub fn vector(&self) -> C3 {
        C3::new(self.scale * self.w.x, self.scale * self.w.y, self.scale * self.w.z)
    }

    /// ∇G × f for a real vector f.
    #[inline]
    pub fn cross_real(&self, f: V3) -> C3 {
        let c = self.w.cross(&f);
        C3::new(self.scale * c.x, self.scale * c.y, self.scale * c.z)
    }

    /// ∇G · n for a real vector n.
    #[inline]
    pub fn dot_real(&self, n: V3) -> Complex64 {
        self.scale * self.w.dot(&n)
    }
}

/// Operator kinds carried by assembled matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// Principal-value magnetic operator tested against the rotated basis.
    MPrincipalValue,
    /// The same operator tested against the plain basis (solver form).
    MPlainTested,
    /// Edge-element Gram matrix.
    Gram,
    /// Screen operator (see asymptotics).
    Screen,
}

/// Dense Galerkin matrix of a boundary operator over the edge basis.
#[derive(Debug, Clone)]
pub struct BoundaryOperatorMatrix {
    pub matrix: ndarray::Array2<Complex64>,
    pub kind: OperatorKind,
    pub omega: f64,
}

/// Galerkin matrix of the principal-value operator ν×∇×𝒜 tested against the
/// rotated edge basis: entry (m,n) = ∫∫ f_m(x)·(∇G_ω(x−y)×f_n(y)) dσ_y dσ_x.
/// Rejects open meshes; the screen variant lives in the asymptotics module.
pub fn assemble_m(
    mesh: &SurfaceMesh,
    basis: &EdgeBasis,
    omega: f64,
) -> Result<BoundaryOperatorMatrix> {
    if !mesh.closed {
        return Err(Error::Geometry("assemble_m requires a closed mesh".into()));
    }
    Ok(BoundaryOperatorMatrix {
        matrix: assemble_pair_matrix(mesh, basis, omega, Testing::Rotated),
        kind: OperatorKind::MPrincipalValue,
        omega,
    })
}

/// Residual of the curl jump identity: ν×∇×𝒜[a] evaluated at x±τν satisfies
/// (outside − inside) = −a, so we return the surface L² norm of
/// (ν×E₊ − ν×E₋) + a over panel centroids, normalized by ‖a‖.
pub fn jump_test(
    mesh: &SurfaceMesh,
    basis: &EdgeBasis,
    a: &TangentialDensity,
    omega: f64,
    tau: f64,
) -> f64 {
    use rayon::prelude::*;
    let norm_a = density_l2(mesh, basis, a);
    if norm_a == 0.0 {
        return 0.0;
    }
    let nt = mesh.triangles.len();
    let terms: Vec<f64> = (0..nt)
        .into_par_iter()
        .map(|t| {
            let x = mesh.centroid(t);
            let nu = mesh.normal[t];
            let e_out = curl_a(mesh, basis, a, omega, x + nu * tau, None);
            let e_in = curl_a(mesh, basis, a, omega, x - nu * tau, None);
            let jump = crate::cross_rc(nu, e_out - e_in);
            let aval = density_at(mesh, basis, a, t, x);
            let res = jump + aval;
            mesh.area[t] * crate::c3_norm(res).powi(2)
        })
        .collect();
    let total: f64 = terms.iter().sum();
    total.sqrt() / norm_a
}

/// Residual of the scalar trace formula ∂ν𝒮[φ]|± = (±I/2 + 𝒦*)[φ] (signs
/// follow the −e^{iωr}/(4πr) kernel): (outside − inside) normal derivative
/// equals +φ. Returns the normalized surface L² residual for a
/// piecewise-constant density.
pub fn scalar_trace_test(mesh: &SurfaceMesh, phi: &[Complex64], omega: f64, tau: f64) -> f64 {
    use rayon::prelude::*;
    let norm_phi: f64 = mesh
        .area
        .iter()
        .zip(phi.iter())
        .map(|(a, p)| a * p.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if norm_phi == 0.0 {
        return 0.0;
    }
    let nt = mesh.triangles.len();
    let terms: Vec<f64> = (0..nt)
        .into_par_iter()
        .map(|t| {
            let x = mesh.centroid(t);
            let nu = mesh.normal[t];
            let g_out = eval::grad_scalar_single_layer(mesh, phi, omega, x + nu * tau);
            let g_in = eval::grad_scalar_single_layer(mesh, phi, omega, x - nu * tau);
            let dn_out = g_out.x * nu.x + g_out.y * nu.y + g_out.z * nu.z;
            let dn_in = g_in.x * nu.x + g_in.y * nu.y + g_in.z * nu.z;
            let res = (dn_out - dn_in) - phi[t];
            mesh.area[t] * res.norm_sqr()
        })
        .collect();
    let total: f64 = terms.iter().sum();
    total.sqrt() / norm_phi
}
