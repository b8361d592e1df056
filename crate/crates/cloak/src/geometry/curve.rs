//! Arc-length-parametrized generating curves with rotation-minimizing frames.

use crate::{Error, Result, V3};

/// One curve sample: arc length, position and an orthonormal moving frame.
#[derive(Debug, Clone, Copy)]
pub struct CurveSample {
    pub xi: f64,
    pub position: V3,
    pub tangent: V3,
    pub frame_normal_1: V3,
    pub frame_normal_2: V3,
}

/// A simple, non-closed generating curve Γ₀ with endpoints P₀ and Q₀,
/// reparametrized by arc length and carrying rotation-minimizing frames.
#[derive(Debug, Clone)]
pub struct Curve {
    pub samples: Vec<CurveSample>,
    pub p0: V3,
    pub q0: V3,
    pub length: f64,
}

/// Curve constructors selectable by the harness.
#[derive(Debug, Clone)]
pub enum CurveKind {
    /// Straight segment between two points.
    Segment { a: V3, b: V3 },
    /// Circular arc of given radius and opening angle in the x-y plane,
    /// starting at (radius, 0, 0).
    Arc { radius: f64, angle: f64 },
    /// Ordered point samples of a user curve (dense enough that chordal
    /// arc length approximates true arc length to the stated tolerance).
    Custom { points: Vec<V3> },
}

impl Curve {
    /// Number of samples.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Position at arc length `xi` by linear interpolation between samples.
    pub fn position_at(&self, xi: f64) -> V3 {
        let xi = xi.clamp(0.0, self.length);
        let (i, t) = self.locate(xi);
        self.samples[i].position * (1.0 - t) + self.samples[i + 1].position * t
    }

    /// Unit tangent at arc length `xi`.
    pub fn tangent_at(&self, xi: f64) -> V3 {
        let xi = xi.clamp(0.0, self.length);
        let (i, t) = self.locate(xi);
        (self.samples[i].tangent * (1.0 - t) + self.samples[i + 1].tangent * t).normalize()
    }

    /// Interpolated frame normals at arc length `xi`.
    pub fn frame_at(&self, xi: f64) -> (V3, V3) {
        let xi = xi.clamp(0.0, self.length);
        let (i, t) = self.locate(xi);
        let tangent = self.tangent_at(xi);
        let n1 = self.samples[i].frame_normal_1 * (1.0 - t) + self.samples[i + 1].frame_normal_1 * t;
        // Re-orthonormalize against the interpolated tangent.
        let n1 = (n1 - tangent * tangent.dot(&n1)).normalize();
        let n2 = tangent.cross(&n1);
        (n1, n2)
    }

    fn locate(&self, xi: f64) -> (usize, f64) {
        let n = self.samples.len();
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.samples[mid].xi <= xi {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let span = self.samples[lo + 1].xi - self.samples[lo].xi;
        let t = if span > 0.0 { (xi - self.samples[lo].xi) / span } else { 0.0 };
        (lo, t)
    }

    /// Nearest point on the sampled curve to `x`, returned as
    /// (arc length, position). Projects onto every chord segment.
    pub fn nearest_point(&self, x: V3) -> (f64, V3) {
        let mut best = (0.0, self.samples[0].position, f64::INFINITY);
        for w in self.samples.windows(2) {
            let (a, b) = (w[0].position, w[1].position);
            let ab = b - a;
            let len2 = ab.norm_squared();
            let t = if len2 > 0.0 { ((x - a).dot(&ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
            let p = a + ab * t;
            let d = (x - p).norm_squared();
            if d < best.2 {
                best = (w[0].xi + t * (w[1].xi - w[0].xi), p, d);
            }
        }
        (best.0, best.1)
    }

    /// Largest admissible tube radius detected numerically: pairwise clearance
    /// between non-neighbor samples and the local radius of curvature.
    pub fn clearance_radius(&self) -> f64 {
        let n = self.samples.len();
        let mut q0 = f64::INFINITY;
        // Local curvature radius from discrete second differences.
        for i in 1..n - 1 {
            let a = self.samples[i - 1].position;
            let b = self.samples[i].position;
            let c = self.samples[i + 1].position;
            let h1 = (b - a).norm();
            let h2 = (c - b).norm();
            let h = 0.5 * (h1 + h2);
            if h <= 0.0 {
                continue;
            }
            let dd = ((c - b) / h2 - (b - a) / h1) / h;
            let kappa = dd.norm();
            if kappa > 1e-12 {
                q0 = q0.min(1.0 / kappa);
            }
        }
        // Global clearance: half the distance between non-neighbor samples,
        // where "neighbor" means closer than a few sample spacings along the
        // curve (otherwise every fine curve would self-reject).
        let mean_h = self.length / (n as f64 - 1.0);
        for i in 0..n {
            for j in i + 1..n {
                let along = self.samples[j].xi - self.samples[i].xi;
                if along <= 8.0 * mean_h {
                    continue;
                }
                let d = (self.samples[j].position - self.samples[i].position).norm();
                if d < along {
                    q0 = q0.min(0.5 * d);
                }
            }
        }
        q0
    }
}

/// Build a curve, arc-length reparametrize it and attach rotation-minimizing
/// frames via double-reflection transport.
pub fn make_curve(kind: &CurveKind, samples_per_unit: usize) -> Result<Curve> {
    let pts: Vec<V3> = match kind {
        CurveKind::Segment { a, b } => {
            if (b - a).norm() < 1e-14 {
                return Err(Error::Geometry("zero-length segment".into()));
            }
            let n = (samples_per_unit as f64 * (b - a).norm()).ceil().max(8.0) as usize;
            (0..=n)
                .map(|i| a + (b - a) * (i as f64 / n as f64))
                .collect()
        }
        CurveKind::Arc { radius, angle } => {
            if *radius <= 0.0 || *angle <= 0.0 {
                return Err(Error::Geometry("arc needs positive radius and angle".into()));
            }
            let n = (samples_per_unit as f64 * radius * angle).ceil().max(16.0) as usize;
            (0..=n)
                .map(|i| {
                    let t = angle * i as f64 / n as f64;
                    V3::new(radius * t.cos(), radius * t.sin(), 0.0)
                })
                .collect()
        }
        CurveKind::Custom { points } => {
            if points.len() < 3 {
                return Err(Error::Geometry("custom curve needs at least 3 points".into()));
            }
            points.clone()
        }
    };
    for w in pts.windows(2) {
        if (w[1] - w[0]).norm() < 1e-14 {
            return Err(Error::Geometry("repeated points in curve input".into()));
        }
    }
    reject_self_intersection(&pts)?;

    // Chordal arc length, then resample uniformly in arc length.
    let mut cum = vec![0.0];
    for w in pts.windows(2) {
        cum.push(cum.last().unwrap() + (w[1] - w[0]).norm());
    }
    let total = *cum.last().unwrap();
    if total <= 0.0 {
        return Err(Error::Geometry("zero-length curve".into()));
    }
    let n_out = ((samples_per_unit as f64 * total).ceil() as usize).max(16);
    let mut positions = Vec::with_capacity(n_out + 1);
    let mut seg = 0usize;
    for i in 0..=n_out {
        let s = total * i as f64 / n_out as f64;
        while seg + 2 < cum.len() && cum[seg + 1] < s {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let t = if span > 0.0 { (s - cum[seg]) / span } else { 0.0 };
        positions.push(pts[seg] + (pts[seg + 1] - pts[seg]) * t);
    }

    // Tangents by central differences (one-sided at the ends).
    let m = positions.len();
    let mut tangents = Vec::with_capacity(m);
    for i in 0..m {
        let t = if i == 0 {
            positions[1] - positions[0]
        } else if i == m - 1 {
            positions[m - 1] - positions[m - 2]
        } else {
            positions[i + 1] - positions[i - 1]
        };
        tangents.push(t.normalize());
    }

    // Rotation-minimizing frames by the double-reflection method.
    let mut n1 = vec![V3::zeros(); m];
    n1[0] = seed_normal(tangents[0]);
    for i in 0..m - 1 {
        let v1 = positions[i + 1] - positions[i];
        let c1 = v1.norm_squared();
        let rl = n1[i] - v1 * (2.0 / c1) * v1.dot(&n1[i]);
        let tl = tangents[i] - v1 * (2.0 / c1) * v1.dot(&tangents[i]);
        let v2 = tangents[i + 1] - tl;
        let c2 = v2.norm_squared();
        n1[i + 1] = if c2 > 1e-28 { rl - v2 * (2.0 / c2) * v2.dot(&rl) } else { rl };
        // Guard against drift out of the normal plane.
        n1[i + 1] = (n1[i + 1] - tangents[i + 1] * tangents[i + 1].dot(&n1[i + 1])).normalize();
    }

    let h = total / (m as f64 - 1.0);
    let samples: Vec<CurveSample> = (0..m)
        .map(|i| CurveSample {
            xi: h * i as f64,
            position: positions[i],
            tangent: tangents[i],
            frame_normal_1: n1[i],
            frame_normal_2: tangents[i].cross(&n1[i]),
        })
        .collect();

    let curve = Curve {
        p0: samples[0].position,
        q0: samples[m - 1].position,
        length: total,
        samples,
    };
    curve.validate()?;
    Ok(curve)
}

impl Curve {
    /// Check the frame invariants: right-handed orthonormal triples,
    /// continuity between consecutive frames, strictly increasing arc length.
    pub fn validate(&self) -> Result<()> {
        for (i, s) in self.samples.iter().enumerate() {
            let orth = s.tangent.dot(&s.frame_normal_1).abs()
                + s.tangent.dot(&s.frame_normal_2).abs()
                + s.frame_normal_1.dot(&s.frame_normal_2).abs()
                + (s.tangent.norm() - 1.0).abs()
                + (s.frame_normal_1.norm() - 1.0).abs()
                + (s.frame_normal_2.norm() - 1.0).abs();
            if orth > 1e-10 {
                return Err(Error::Geometry(format!("frame not orthonormal at sample {i}")));
            }
            let handed = s.tangent.cross(&s.frame_normal_1).dot(&s.frame_normal_2);
            if (handed - 1.0).abs() > 1e-10 {
                return Err(Error::Geometry(format!("frame not right-handed at sample {i}")));
            }
        }
        for w in self.samples.windows(2) {
            if w[1].xi <= w[0].xi {
                return Err(Error::Geometry("arc length not strictly increasing".into()));
            }
            let cosang = w[0]
                .frame_normal_1
                .dot(&w[1].frame_normal_1)
                .clamp(-1.0, 1.0);
            if cosang.acos() > 0.2 {
                return Err(Error::Geometry("frame discontinuity > 0.2 rad".into()));
            }
        }
        Ok(())
    }
}

fn seed_normal(t: V3) -> V3 {
    // Deterministic normal seed: cross with the axis least aligned with t.
    let ax = t.x.abs();
    let ay = t.y.abs();
    let az = t.z.abs();
    let e = if ax <= ay && ax <= az {
        V3::x()
    } else if ay <= az {
        V3::y()
    } else {
        V3::z()
    };
    t.cross(&e).normalize().cross(&t)
}

fn reject_self_intersection(pts: &[V3]) -> Result<()> {
    // Coarse check: non-consecutive chord segments must not come closer than
    // a small fraction of the local chord length.
    let n = pts.len();
    for i in 0..n - 1 {
        for j in i + 2..n - 1 {
            if i == 0 && j == n - 2 {
                // allow near-closed curves? no: Γ₀ is non-closed, so also check
            }
            let d = segment_distance(pts[i], pts[i + 1], pts[j], pts[j + 1]);
            let scale = ((pts[i + 1] - pts[i]).norm() + (pts[j + 1] - pts[j]).norm()).max(1e-12);
            if j > i + 1 && d < 1e-9 * scale.max(1.0) {
                return Err(Error::Geometry("self-intersecting curve input".into()));
            }
        }
    }
    Ok(())
}

fn segment_distance(p1: V3, p2: V3, q1: V3, q2: V3) -> f64 {
    // Standard closest-distance between two segments.
    let d1 = p2 - p1;
    let d2 = q2 - q1;
    let r = p1 - q1;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (s, t);
    if a <= 1e-30 && e <= 1e-30 {
        return r.norm();
    }
    if a <= 1e-30 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= 1e-30 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let s0 = if denom > 1e-30 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let t0 = ((b * s0 + f) / e).clamp(0.0, 1.0);
            s = ((b * t0 - c) / a).clamp(0.0, 1.0);
            t = t0;
        }
    }
    (p1 + d1 * s - q1 - d2 * t).norm()
}
