//! Symmetric Gauss rules on triangles and adaptive near-singular subdivision.

use crate::V3;

/// Barycentric quadrature rule; weights sum to 1 (multiply by panel area).
#[derive(Debug, Clone, Copy)]
pub struct TriRule {
    pub points: &'static [(f64, f64, f64)],
    pub weights: &'static [f64],
}

const P1: [(f64, f64, f64); 1] = [(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)];
const W1: [f64; 1] = [1.0];

const P2: [(f64, f64, f64); 3] = [
    (2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0),
    (1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0),
    (1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0),
];
const W2: [f64; 3] = [1.0 / 3.0; 3];

const A4: f64 = 0.445948490915965;
const B4: f64 = 0.091576213509771;
const P4: [(f64, f64, f64); 6] = [
    (1.0 - 2.0 * A4, A4, A4),
    (A4, 1.0 - 2.0 * A4, A4),
    (A4, A4, 1.0 - 2.0 * A4),
    (1.0 - 2.0 * B4, B4, B4),
    (B4, 1.0 - 2.0 * B4, B4),
    (B4, B4, 1.0 - 2.0 * B4),
];
const WA4: f64 = 0.223381589678011;
const WB4: f64 = 0.109951743655322;
const W4: [f64; 6] = [WA4, WA4, WA4, WB4, WB4, WB4];

const A5: f64 = 0.470142064105115;
const B5: f64 = 0.101286507323456;
const P5: [(f64, f64, f64); 7] = [
    (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
    (1.0 - 2.0 * A5, A5, A5),
    (A5, 1.0 - 2.0 * A5, A5),
    (A5, A5, 1.0 - 2.0 * A5),
    (1.0 - 2.0 * B5, B5, B5),
    (B5, 1.0 - 2.0 * B5, B5),
    (B5, B5, 1.0 - 2.0 * B5),
];
const WA5: f64 = 0.132394152788506;
const WB5: f64 = 0.125939180544827;
const W5: [f64; 7] = [0.225, WA5, WA5, WA5, WB5, WB5, WB5];

/// Rule of at least the requested polynomial degree.
pub fn rule_for_degree(degree: usize) -> TriRule {
    match degree {
        0 | 1 => TriRule { points: &P1, weights: &W1 },
        2 | 3 => TriRule { points: &P2, weights: &W2 },
        4 => TriRule { points: &P4, weights: &W4 },
        _ => TriRule { points: &P5, weights: &W5 },
    }
}

/// Map the rule onto a world triangle: yields (point, weight·area) pairs.
pub fn map_rule(rule: TriRule, corners: &[V3; 3], area: f64) -> impl Iterator<Item = (V3, f64)> + '_ {
    rule.points
        .iter()
        .zip(rule.weights.iter())
        .map(move |(&(u, v, w), &wt)| (corners[0] * u + corners[1] * v + corners[2] * w, wt * area))
}

fn tri_area(c: &[V3; 3]) -> f64 {
    0.5 * (c[1] - c[0]).cross(&(c[2] - c[0])).norm()
}

fn tri_diam(c: &[V3; 3]) -> f64 {
    (c[0] - c[1]).norm().max((c[1] - c[2]).norm()).max((c[2] - c[0]).norm())
}

/// Integrate `f` over a flat triangle with subdivision adapted to the
/// distance from the (possibly nearby) evaluation point `x`: panels are
/// 4-split until their diameter is below `ratio` times their distance to `x`
/// or `max_depth` is reached.
pub fn integrate_near<F>(x: V3, corners: &[V3; 3], degree: usize, max_depth: usize, f: &mut F)
where
    F: FnMut(V3, f64),
{
    let rule = rule_for_degree(degree);
    let ratio = 0.7;
    // Explicit stack to avoid recursion overhead.
    let mut stack: Vec<([V3; 3], usize)> = vec![(*corners, 0)];
    while let Some((c, depth)) = stack.pop() {
        let centroid = (c[0] + c[1] + c[2]) / 3.0;
        let diam = tri_diam(&c);
        let dist = (x - centroid).norm();
        if depth >= max_depth || diam <= ratio * dist {
            let area = tri_area(&c);
            for (p, w) in map_rule(rule, &c, area) {
                f(p, w);
            }
        } else {
            let m01 = (c[0] + c[1]) * 0.5;
            let m12 = (c[1] + c[2]) * 0.5;
            let m20 = (c[2] + c[0]) * 0.5;
            stack.push(([c[0], m01, m20], depth + 1));
            stack.push(([m01, c[1], m12], depth + 1));
            stack.push(([m20, m12, c[2]], depth + 1));
            stack.push(([m01, m12, m20], depth + 1));
        }
    }
}
