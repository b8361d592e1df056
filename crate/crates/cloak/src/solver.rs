//! Perfect-electric-conductor scattering solve via the magnetic-field-type
//! boundary integral equation, near/far-field evaluation, and a
//! closed-form sphere series used as a validation oracle.

use ndarray::Array1;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::geometry::SurfaceMesh;
use crate::potentials::quadrature::{map_rule, rule_for_degree};
use crate::potentials::rwg::density_at;
use crate::potentials::{
    assemble_pair_matrix, curl_a, curlcurl_a, gram, moments, EdgeBasis, TangentialDensity, Testing,
};
use crate::{c3, cross_rc, Error, Result, C3, V3};

/// Incident plane wave (p: polarization, d: propagation direction).
#[derive(Debug, Clone, Copy)]
pub struct PlaneWave {
    pub p: V3,
    pub d: V3,
    pub omega: f64,
}

impl PlaneWave {
    pub fn new(p: V3, d: V3, omega: f64) -> Result<Self> {
        let w = PlaneWave { p, d, omega };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if (self.p.norm() - 1.0).abs() > 1e-12 || (self.d.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Config("plane wave: p and d must be unit vectors".into()));
        }
        if self.p.dot(&self.d).abs() > 1e-12 {
            return Err(Error::Config("plane wave: p must be orthogonal to d".into()));
        }
        if self.omega <= 0.0 {
            return Err(Error::Config("plane wave: omega must be positive".into()));
        }
        Ok(())
    }
}

/// E^i(x) = p e^{iω x·d}, H^i(x) = (1/ω)∇×E^i = i (d×p) e^{iω x·d}.
pub fn incident_fields(wave: &PlaneWave, x: V3) -> (C3, C3) {
    let phase = Complex64::new(0.0, wave.omega * x.dot(&wave.d)).exp();
    let e = c3(wave.p) * phase;
    let h = c3(wave.d.cross(&wave.p)) * (phase * Complex64::new(0.0, 1.0));
    (e, h)
}

/// Result of a PEC boundary solve.
#[derive(Debug, Clone)]
pub struct PecSolution {
    pub density: TangentialDensity,
    /// Relative residual of the dense linear solve.
    pub residual: f64,
}

/// Solve (−I/2 + ℳ^ω)[a] = −ν×E^i in Galerkin form over the edge basis:
/// (−½ G + Q) c = −b with Q the plain-tested operator matrix, G the Gram
/// matrix and b_m = ∫ f_m · (ν×E^i).
pub fn solve_pec(mesh: &SurfaceMesh, basis: &EdgeBasis, wave: &PlaneWave) -> Result<PecSolution> {
    let mut sols = solve_pec_many(mesh, basis, std::slice::from_ref(wave))?;
    Ok(sols.pop().unwrap())
}

/// Multi-excitation variant of [`solve_pec`]: all waves must share ω so the
/// system matrix is assembled and factorized once.
pub fn solve_pec_many(
    mesh: &SurfaceMesh,
    basis: &EdgeBasis,
    waves: &[PlaneWave],
) -> Result<Vec<PecSolution>> {
    let wave = waves
        .first()
        .ok_or_else(|| Error::Config("solve_pec_many needs at least one wave".into()))?;
    for w in waves {
        w.validate()?;
        if w.omega != wave.omega {
            return Err(Error::Config("solve_pec_many requires a shared frequency".into()));
        }
    }
    if !mesh.closed {
        return Err(Error::Geometry("solve_pec requires a closed mesh".into()));
    }
    // Fold the Gram term into the assembled matrix in place; on fine meshes
    // the dense n×n blocks dominate peak memory, so only one is kept alive
    // besides the factorization workspace inside the solver.
    let n = basis.len();
    let mut sys = assemble_pair_matrix(mesh, basis, wave.omega, Testing::Plain);
    {
        let g = gram(mesh, basis);
        for i in 0..n {
            for j in 0..n {
                sys[[i, j]] -= 0.5 * g[[i, j]];
            }
        }
    }
    let rhs: Vec<Array1<Complex64>> = waves
        .iter()
        .map(|w| {
            moments(mesh, basis, |y, nu| {
                let (e, _) = incident_fields(w, y);
                cross_rc(nu, e)
            })
            .mapv(|v| -v)
        })
        .collect();
    let all = crate::la::solve(&sys, &rhs).map_err(|e| {
        let cond = crate::la::condition_estimate(&sys).unwrap_or(f64::NAN);
        Error::Numerical(format!(
            "PEC solve failed ({e}); condition estimate {cond:.3e} — possible interior resonance"
        ))
    })?;
    Ok(all
        .into_iter()
        .zip(&rhs)
        .map(|(coeffs, b)| {
            let residual = crate::la::relative_residual(&sys, &coeffs, b);
            PecSolution { density: TangentialDensity { coeffs }, residual }
        })
        .collect())
}

/// Far-field pattern samples on a direction grid, tangential to each x̂.
#[derive(Debug, Clone)]
pub struct FarFieldPattern {
    pub directions: Vec<V3>,
    pub values: Vec<C3>,
    pub omega: f64,
}

impl FarFieldPattern {
    /// sup over directions of ‖A_∞(x̂)‖.
    pub fn norm_linf(&self) -> f64 {
        self.values.iter().map(|v| crate::c3_norm(*v)).fold(0.0, f64::max)
    }

    /// Equal-area surrogate of the L²(S²) norm: sqrt(4π/N · Σ‖A‖²).
    pub fn norm_l2(&self) -> f64 {
        let n = self.directions.len() as f64;
        let sum: f64 = self.values.iter().map(|v| crate::c3_norm(*v).powi(2)).sum();
        (4.0 * std::f64::consts::PI / n * sum).sqrt()
    }

    /// Relative L² difference against another pattern on the same grid.
    pub fn rel_l2_diff(&self, other: &FarFieldPattern) -> f64 {
        assert_eq!(self.directions.len(), other.directions.len());
        let num: f64 = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| crate::c3_norm(*a - *b).powi(2))
            .sum();
        let den: f64 = other.values.iter().map(|v| crate::c3_norm(*v).powi(2)).sum();
        (num / den).sqrt()
    }

    pub fn max_transversality_defect(&self) -> f64 {
        self.directions
            .iter()
            .zip(self.values.iter())
            .map(|(x, v)| {
                let n = crate::c3_norm(*v);
                if n == 0.0 {
                    0.0
                } else {
                    (v.x * x.x + v.y * x.y + v.z * x.z).norm() / n
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Deterministic equal-area (Fibonacci lattice) direction grid on S².
pub fn direction_grid(count: usize) -> Vec<V3> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            V3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Default direction count used throughout the experiments.
pub const DEFAULT_DIRECTIONS: usize = 266;

/// A_∞(x̂) = −(iω/4π) x̂ × ∫ e^{−iω x̂·y} a(y) dσ_y.
pub fn far_field(
    mesh: &SurfaceMesh,
    basis: &EdgeBasis,
    a: &TangentialDensity,
    omega: f64,
    directions: &[V3],
) -> FarFieldPattern {
    let rule = rule_for_degree(4);
    // Precompute quadrature nodes and density samples once.
    let mut nodes: Vec<(V3, C3)> = Vec::new();
    for t in 0..mesh.triangles.len() {
        let corners = mesh.corners(t);
        for (y, w) in map_rule(rule, &corners, mesh.area[t]) {
            let val = density_at(mesh, basis, a, t, y) * Complex64::new(w, 0.0);
            nodes.push((y, val));
        }
    }
    let values: Vec<C3> = directions
        .par_iter()
        .map(|&xh| {
            let mut moment = C3::zeros();
            for (y, val) in &nodes {
                let phase = Complex64::new(0.0, -omega * xh.dot(y)).exp();
                moment += val * phase;
            }
            let pref = Complex64::new(0.0, -omega / (4.0 * std::f64::consts::PI));
            cross_rc(xh, moment) * pref
        })
        .collect();
    FarFieldPattern { directions: directions.to_vec(), values, omega }
}

/// Scattered fields at an off-surface point:
/// E_s = ∇×𝒜[a], H_s = (1/iω)∇×E_s = (1/iω)(ω²𝒜[a] + ∇(∇·𝒜)[a]).
pub fn scattered_field(
    mesh: &SurfaceMesh,
    basis: &EdgeBasis,
    a: &TangentialDensity,
    omega: f64,
    x: V3,
) -> (C3, C3) {
    let e = curl_a(mesh, basis, a, omega, x, None);
    let h = curlcurl_a(mesh, basis, a, omega, x) / Complex64::new(0.0, omega);
    (e, h)
}

// ---------------------------------------------------------------------------
// Closed-form PEC sphere series (validation oracle).
// ---------------------------------------------------------------------------

/// Riccati–Bessel ψ_n(x) = x j_n(x) with derivative, by downward recurrence.
fn riccati_psi(nmax: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    // Downward recurrence for j_n, normalized by j_0 = sin(x)/x.
    let start = nmax + 20 + (x as usize);
    let mut jn = vec![0.0_f64; start + 2];
    jn[start + 1] = 0.0;
    jn[start] = 1e-280;
    for n in (1..=start).rev() {
        jn[n - 1] = (2.0 * n as f64 + 1.0) / x * jn[n] - jn[n + 1];
    }
    let scale = (x.sin() / x) / jn[0];
    for v in jn.iter_mut() {
        *v *= scale;
    }
    let mut psi = vec![0.0; nmax + 1];
    let mut dpsi = vec![0.0; nmax + 1];
    for n in 0..=nmax {
        psi[n] = x * jn[n];
        // ψ_n' = x j_{n-1} − n j_n  (valid for n ≥ 1); ψ_0' = cos x.
        dpsi[n] = if n == 0 { x.cos() } else { x * jn[n - 1] - n as f64 * jn[n] };
    }
    (psi, dpsi)
}

/// Riccati–Bessel χ_n(x) = −x y_n(x) with derivative, by upward recurrence.
fn riccati_chi(nmax: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut yn = vec![0.0_f64; nmax + 2];
    yn[0] = -x.cos() / x;
    if nmax >= 1 {
        yn[1] = -x.cos() / (x * x) - x.sin() / x;
    }
    for n in 1..nmax {
        yn[n + 1] = (2.0 * n as f64 + 1.0) / x * yn[n] - yn[n - 1];
    }
    let mut chi = vec![0.0; nmax + 1];
    let mut dchi = vec![0.0; nmax + 1];
    for n in 0..=nmax {
        chi[n] = -x * yn[n];
        dchi[n] = if n == 0 {
            -x.sin()
        } else {
            -(x * yn[n - 1] - n as f64 * yn[n])
        };
    }
    (chi, dchi)
}

/// PEC-sphere far field by the classical vector multipole series, evaluated
/// in the orthonormal frame (p, d×p, d) of the incident wave. Truncation at
/// N = ωr + 10 with a convergence check on the last coefficient pair.
pub fn mie_far_field(
    radius: f64,
    wave: &PlaneWave,
    directions: &[V3],
) -> Result<FarFieldPattern> {
    wave.validate()?;
    let omega = wave.omega;
    let x = omega * radius;
    let nmax = (x.ceil() as usize) + 10;
    let (psi, dpsi) = riccati_psi(nmax, x);
    let (chi, dchi) = riccati_chi(nmax, x);
    // ξ_n = ψ_n − iχ_n (outgoing Hankel of the first kind, e^{+iωr} with our
    // time convention).
    let mut an = vec![Complex64::new(0.0, 0.0); nmax + 1];
    let mut bn = vec![Complex64::new(0.0, 0.0); nmax + 1];
    for n in 1..=nmax {
        let xi = Complex64::new(psi[n], -chi[n]);
        let dxi = Complex64::new(dpsi[n], -dchi[n]);
        an[n] = Complex64::new(dpsi[n], 0.0) / dxi;
        bn[n] = Complex64::new(psi[n], 0.0) / xi;
    }
    let tail = an[nmax].norm().max(bn[nmax].norm());
    if tail > 1e-10 {
        return Err(Error::Numerical(format!(
            "sphere series truncation not converged: tail {tail:.3e}"
        )));
    }
    // Local frame: e1 = p, e2 = d×p, e3 = d.
    let e1 = wave.p;
    let e2 = wave.d.cross(&wave.p);
    let e3 = wave.d;
    let values: Vec<C3> = directions
        .iter()
        .map(|&xh| {
            let ct = xh.dot(&e3).clamp(-1.0, 1.0);
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            let (cp, sp, theta_hat, phi_hat) = if st < 1e-7 {
                // At the poles the azimuth is degenerate; pick φ = 0. The
                // S1/S2 sums coincide there so the result is frame-safe.
                let th = e1 * ct; // θ̂ = cosθ cosφ e1 + cosθ sinφ e2 − sinθ e3
                (1.0, 0.0, th, e2)
            } else {
                let cp = xh.dot(&e1) / st;
                let sp = xh.dot(&e2) / st;
                let th = (e1 * cp + e2 * sp) * ct - e3 * st;
                let ph = e2 * cp - e1 * sp;
                (cp, sp, th, ph)
            };
            // Angular functions π_n, τ_n by recurrence in cosθ.
            let mut s1 = Complex64::new(0.0, 0.0);
            let mut s2 = Complex64::new(0.0, 0.0);
            let mut pi_nm1 = 0.0_f64; // π_0
            let mut pi_n = 1.0_f64; // π_1
            for n in 1..=nmax {
                let nf = n as f64;
                let tau_n = nf * ct * pi_n - (nf + 1.0) * pi_nm1;
                let w = (2.0 * nf + 1.0) / (nf * (nf + 1.0));
                s1 += (an[n] * pi_n + bn[n] * tau_n) * w;
                s2 += (an[n] * tau_n + bn[n] * pi_n) * w;
                let pi_np1 = ((2.0 * nf + 1.0) * ct * pi_n - (nf + 1.0) * pi_nm1) / nf;
                pi_nm1 = pi_n;
                pi_n = pi_np1;
            }
            let iw = Complex64::new(0.0, 1.0 / omega);
            let a_theta = iw * s2 * cp;
            let a_phi = -iw * s1 * sp;
            c3(theta_hat) * a_theta + c3(phi_hat) * a_phi
        })
        .collect();
    Ok(FarFieldPattern { directions: directions.to_vec(), values, omega })
}
