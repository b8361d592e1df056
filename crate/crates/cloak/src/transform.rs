//! Blowup transformations, their Jacobians, push-forward of material tensors,
//! lossy-layer recipes, the exponent calculus and the physical-cloak sampler.

use crate::geometry::{Curve, PartialGeneratorSpec};
use crate::{Error, Result, M3, V3};

/// Where a Jacobian was evaluated; fixes its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocationClass {
    TubeFacade,
    TubeCap,
    SlabCore,
    SlabRim,
}

/// Jacobian B = ∇A of a blowup map at a point, with its determinant.
#[derive(Debug, Clone, Copy)]
pub struct AffineJacobian {
    pub matrix: M3,
    pub det: f64,
    pub class: LocationClass,
}

impl AffineJacobian {
    /// Check the orientation and eigenvalue-range invariants for scale δ.
    pub fn validate(&self, delta: f64) -> Result<()> {
        if self.det <= 0.0 {
            return Err(Error::Domain("Jacobian not orientation-preserving".into()));
        }
        let sym = (self.matrix + self.matrix.transpose()) * 0.5;
        let eig = sym.symmetric_eigen().eigenvalues;
        for &l in eig.iter() {
            if l < 1.0 - 1e-10 || l > 1.0 / delta + 1e-10 {
                return Err(Error::Domain(format!(
                    "Jacobian eigenvalue {l} outside [1, 1/δ = {}]",
                    1.0 / delta
                )));
            }
        }
        Ok(())
    }
}

/// Sampled material tensors (ε, μ, σ) with location metadata.
#[derive(Debug, Clone)]
pub struct MaterialTensorField {
    pub points: Vec<V3>,
    pub epsilon: Vec<M3>,
    pub mu: Vec<M3>,
    pub sigma: Vec<M3>,
    pub region: Vec<&'static str>,
}

impl MaterialTensorField {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// SPD/PSD invariants: ε, μ positive definite; σ positive semi-definite.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.len() {
            for (m, strict, name) in [
                (&self.epsilon[i], true, "epsilon"),
                (&self.mu[i], true, "mu"),
                (&self.sigma[i], false, "sigma"),
            ] {
                if (m - m.transpose()).norm() > 1e-9 * (1.0 + m.norm()) {
                    return Err(Error::Numerical(format!("{name} not symmetric at sample {i}")));
                }
                let min = m.symmetric_eigen().eigenvalues.min();
                if (strict && min <= 0.0) || (!strict && min < -1e-12) {
                    return Err(Error::Numerical(format!(
                        "{name} not positive (min eigenvalue {min}) at sample {i}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Exponent bookkeeping of the two rate theorems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloakExponents {
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub beta: f64,
    pub beta_prime: f64,
    pub beta_j: [f64; 3],
    pub full_rate: f64,
    pub partial_rate: f64,
    pub admissible_full: bool,
    pub admissible_partial: bool,
}

/// β_j = min{1, −j+r+s, −j+t+s}; β = β₁ and β′ = β₂ in this family.
pub fn cloak_exponents(r: f64, s: f64, t: f64) -> CloakExponents {
    let beta_j = |j: f64| (1.0f64).min(-j + r + s).min(-j + t + s);
    let beta = beta_j(1.0);
    let beta_prime = beta_j(2.0);
    CloakExponents {
        r,
        s,
        t,
        beta,
        beta_prime,
        beta_j: [beta_j(0.0), beta_j(1.0), beta_j(2.0)],
        full_rate: (beta - 0.5 * t + 1.0).min(2.0),
        partial_rate: (2.0 * (beta_j(2.0) - 0.5 * t)).min(1.0),
        admissible_full: beta_prime - 0.5 * t >= 0.0,
        admissible_partial: beta_j(2.0) - 0.5 * t > 0.0,
    }
}

fn check_in_tube(y: V3, delta: f64, curve: &Curve) -> Result<V3> {
    let (_, z) = curve.nearest_point(y);
    if (y - z).norm() > delta * (1.0 + 1e-9) {
        return Err(Error::Domain(format!("point {y:?} outside the δ-tube")));
    }
    Ok(z)
}

/// Blowup A of the tube domain: normal-plane dilation about the generator on
/// the facade, pure dilation about the endpoints in the caps.
pub fn blowup_full(y: V3, delta: f64, curve: &Curve) -> Result<V3> {
    let z = check_in_tube(y, delta, curve)?;
    Ok(z + (y - z) / delta)
}

/// Jacobian of `blowup_full`. Facade: B = (1/δ)I − (1/δ−1) t tᵀ with t the
/// unit tangent at z_y (det δ⁻²); caps: B = (1/δ)I (det δ⁻³).
pub fn jacobian_full(y: V3, delta: f64, curve: &Curve) -> Result<AffineJacobian> {
    let (xi, z) = curve.nearest_point(y);
    check_in_tube(y, delta, curve)?;
    let cap = xi <= 1e-12 * curve.length || xi >= curve.length * (1.0 - 1e-12);
    // A point past the endpoint (its projection is the endpoint but it is not
    // on the end disk) is a cap point; on-facade points have interior xi.
    if cap && (y - z).dot(&curve.tangent_at(xi)).abs() > 1e-12 * (y - z).norm().max(1e-300) {
        return Ok(AffineJacobian {
            matrix: M3::identity() / delta,
            det: delta.powi(-3),
            class: LocationClass::TubeCap,
        });
    }
    let t = curve.tangent_at(xi);
    let b = M3::identity() / delta - (1.0 / delta - 1.0) * t * t.transpose();
    Ok(AffineJacobian { matrix: b, det: delta.powi(-2), class: LocationClass::TubeFacade })
}

/// Blowup A of the slab domain: the constant map stretching the normal
/// coordinate by 1/δ over the core, dilation about the nearest point of ∂Γ₀
/// over the rim.
pub fn blowup_partial(y: V3, delta: f64, spec: &PartialGeneratorSpec) -> Result<V3> {
    let z = spec.nearest_square_point(y);
    if (y - z).norm() > delta * (1.0 + 1e-9) {
        return Err(Error::Domain("point outside the δ-slab".into()));
    }
    let h = 0.5 * spec.side;
    let (a, b, _) = spec.local(y);
    if a.abs() < h - 1e-12 && b.abs() < h - 1e-12 {
        // Core: z is the foot point in the plane; only the height dilates.
        let c = (y - z).dot(&spec.normal);
        Ok(z + spec.normal * (c / delta))
    } else {
        Ok(z + (y - z) / delta)
    }
}

/// Jacobian of `blowup_partial`. Core: B = I + (1/δ−1) n nᵀ (det 1/δ);
/// edge rim: B = (1/δ)I − (1/δ−1) t tᵀ with t the edge direction (det δ⁻²);
/// corner rim: B = (1/δ)I (det δ⁻³).
pub fn jacobian_partial(y: V3, delta: f64, spec: &PartialGeneratorSpec) -> Result<AffineJacobian> {
    let z = spec.nearest_square_point(y);
    if (y - z).norm() > delta * (1.0 + 1e-9) {
        return Err(Error::Domain("point outside the δ-slab".into()));
    }
    let h = 0.5 * spec.side;
    let (a, b, _) = spec.local(y);
    let n = spec.normal;
    if a.abs() < h - 1e-12 && b.abs() < h - 1e-12 {
        let m = M3::identity() + (1.0 / delta - 1.0) * n * n.transpose();
        return Ok(AffineJacobian { matrix: m, det: 1.0 / delta, class: LocationClass::SlabCore });
    }
    let (u1, u2) = spec.plane_axes();
    let on_edge_a = a.abs() >= h - 1e-12 && b.abs() < h - 1e-12;
    let on_edge_b = b.abs() >= h - 1e-12 && a.abs() < h - 1e-12;
    if on_edge_a || on_edge_b {
        let t = if on_edge_a { u2 } else { u1 };
        let m = M3::identity() / delta - (1.0 / delta - 1.0) * t * t.transpose();
        return Ok(AffineJacobian { matrix: m, det: delta.powi(-2), class: LocationClass::SlabRim });
    }
    Ok(AffineJacobian {
        matrix: M3::identity() / delta,
        det: delta.powi(-3),
        class: LocationClass::SlabRim,
    })
}

/// Push-forward of a symmetric tensor through a Jacobian:
/// (1/det B) · B · m · Bᵀ.
pub fn push_forward(m: &M3, b: &M3) -> Result<M3> {
    let det = b.determinant();
    if det <= 0.0 {
        return Err(Error::Domain("push-forward through non-orientation-preserving map".into()));
    }
    let out = b * m * b.transpose() / det;
    // Symmetrize away roundoff.
    Ok((out + out.transpose()) * 0.5)
}

/// Lossy-layer tensors: ε_l = δʳ|B|B⁻¹, μ_l = δˢ|B|B⁻¹, σ_l = δᵗ|B|B⁻¹.
pub fn lossy_layer(delta: f64, r: f64, s: f64, t: f64, jac: &AffineJacobian) -> Result<(M3, M3, M3)> {
    let inv = jac
        .matrix
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular Jacobian in lossy layer".into()))?;
    let base = jac.det * inv;
    Ok((base * delta.powf(r), base * delta.powf(s), base * delta.powf(t)))
}

/// Generating set of a cloak construction.
#[derive(Debug, Clone)]
pub enum CloakGenerator {
    Curve(Curve),
    Square(PartialGeneratorSpec),
}

impl CloakGenerator {
    fn nearest(&self, p: V3) -> V3 {
        match self {
            CloakGenerator::Curve(c) => c.nearest_point(p).1,
            CloakGenerator::Square(s) => s.nearest_square_point(p),
        }
    }
}

/// Radii of the physical cloak regions: Ω has generator distance `outer`,
/// Ω_c (the image of ∂D_δ) generator distance `inner`.
#[derive(Debug, Clone, Copy)]
pub struct CloakRadii {
    pub inner: f64,
    pub outer: f64,
}

/// The concatenated physical map F_δ: identity outside Ω, radial about the
/// generator inside, with the normal-plane scale interpolated linearly so
/// generator distance δ maps to `inner` and distance `outer` stays fixed.
pub fn physical_map(y: V3, delta: f64, gen: &CloakGenerator, radii: CloakRadii) -> V3 {
    let z = gen.nearest(y);
    let d = y - z;
    let rho = d.norm();
    if rho >= radii.outer || rho <= 0.0 {
        return y;
    }
    let rho_clamped = rho.max(delta);
    let g = radii.inner + (rho_clamped - delta) * (radii.outer - radii.inner) / (radii.outer - delta);
    z + d * (g / rho)
}

/// Inverse of `physical_map` on the annulus Ω∖Ω̄_c.
fn physical_map_inverse(x: V3, delta: f64, gen: &CloakGenerator, radii: CloakRadii) -> V3 {
    let z = gen.nearest(x);
    let d = x - z;
    let rho_phys = d.norm();
    if rho_phys >= radii.outer {
        return x;
    }
    let rho = delta + (rho_phys - radii.inner) * (radii.outer - delta) / (radii.outer - radii.inner);
    z + d * (rho / rho_phys)
}

/// Numerical Jacobian DF_δ by central differences.
fn physical_jacobian(y: V3, delta: f64, gen: &CloakGenerator, radii: CloakRadii) -> M3 {
    let h = 1e-6 * (1.0 + y.norm());
    let mut m = M3::zeros();
    for k in 0..3 {
        let mut e = V3::zeros();
        e[k] = h;
        let col = (physical_map(y + e, delta, gen, radii) - physical_map(y - e, delta, gen, radii))
            / (2.0 * h);
        m.set_column(k, &col);
    }
    m
}

/// Sample the physical cloak materials on `points`: push-forward of the
/// homogeneous background (ε, μ, σ) = (I, I, 0) through F_δ, evaluated at each
/// physical sample via the inverse map; identity outside Ω.
pub fn physical_cloak_materials(
    gen: &CloakGenerator,
    delta: f64,
    radii: CloakRadii,
    points: &[V3],
) -> Result<MaterialTensorField> {
    if !(delta <= 1.0 && 1.0 <= radii.outer) || radii.inner < delta || radii.inner >= radii.outer {
        return Err(Error::Geometry(format!(
            "cloak nesting violated: need δ ≤ inner < outer and δ ≤ 1 ≤ outer \
             (δ = {delta}, inner = {}, outer = {})",
            radii.inner, radii.outer
        )));
    }
    let mut field = MaterialTensorField {
        points: points.to_vec(),
        epsilon: Vec::with_capacity(points.len()),
        mu: Vec::with_capacity(points.len()),
        sigma: Vec::with_capacity(points.len()),
        region: Vec::with_capacity(points.len()),
    };
    for &x in points {
        let z = gen.nearest(x);
        let rho_phys = (x - z).norm();
        if rho_phys >= radii.outer {
            field.epsilon.push(M3::identity());
            field.mu.push(M3::identity());
            field.sigma.push(M3::zeros());
            field.region.push("exterior");
            continue;
        }
        if rho_phys <= radii.inner {
            return Err(Error::Domain(
                "sample inside Ω_c; the cloaked interior is not part of the annulus field".into(),
            ));
        }
        let y = physical_map_inverse(x, delta, gen, radii);
        let b = physical_jacobian(y, delta, gen, radii);
        let eps = push_forward(&M3::identity(), &b)?;
        field.epsilon.push(eps);
        field.mu.push(eps);
        field.sigma.push(M3::zeros());
        field.region.push("annulus");
    }
    field.validate()?;
    Ok(field)
}
