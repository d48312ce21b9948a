//! Inner parallel curves `β(θ, r) = γ(θ) − r p(θ)` and inner parallel
//! bodies `K ⊖ rP`.
//!
//! For `r < μ0 = 1/k_max` the offset stays smooth with curvature
//! `k/(1 − rk)` and `L_Q(r) = L_Q − 2A(P) r`. Beyond `μ0` the offset of the
//! curve develops swallowtails; the body `K ⊖ rP` is then computed as an
//! intersection of half-planes, one per support direction.

use crate::curve::{ConvexCurve, GAUSS8};
use crate::error::{Error, Result};
use crate::{bracket, Vec2};

/// Inner parallel curve at distance `r` in the smooth regime `0 <= r < μ0`.
pub fn inner_parallel(curve: &ConvexCurve, r: f64) -> Result<ConvexCurve> {
    if r < 0.0 {
        return Err(Error::NegativeRadius { r });
    }
    let mu0 = 1.0 / curve.k_max();
    if r >= mu0 {
        return Err(Error::RadiusTooLarge { r, mu0 });
    }
    let ball = curve.ball().clone();
    let k = curve.curvature().iter().map(|k| k / (1.0 - r * k)).collect();
    let base = curve.base() - r * ball.p()[0];
    ConvexCurve::from_curvature(ball, k, base)
}

/// Exact Q-length of the smooth inner parallel curve.
pub fn parallel_length_law(curve: &ConvexCurve, r: f64) -> f64 {
    curve.length() - 2.0 * curve.ball().area() * r
}

/// Convex polygon `{x : e_r(θ_j)·x <= c_j}` with its edges' normal indices.
#[derive(Clone, Debug)]
pub struct Polygon {
    pub vertices: Vec<Vec2>,
    /// `edges[i]` is the line index of the edge from `vertices[i]` to
    /// `vertices[i + 1]`.
    pub edges: Vec<usize>,
}

#[derive(Clone, Copy)]
struct Line {
    n: Vec2,
    c: f64,
}

impl Line {
    fn excess(&self, x: Vec2) -> f64 {
        self.n.dot(&x) - self.c
    }

    fn meet(&self, other: &Line) -> Option<Vec2> {
        let det = bracket(self.n, other.n);
        if det.abs() < 1e-14 {
            return None;
        }
        Some(Vec2::new(
            (self.c * other.n.y - other.c * self.n.y) / det,
            (self.n.x * other.c - other.n.x * self.c) / det,
        ))
    }
}

/// Intersect half-planes `n_j·x <= c_j` whose normals are sorted by strictly
/// increasing angle over one full turn. Returns `None` when the intersection
/// is empty or has no interior.
pub fn intersect_half_planes(normals: &[Vec2], offsets: &[f64]) -> Option<Polygon> {
    let lines: Vec<Line> = normals.iter().zip(offsets).map(|(n, c)| Line { n: *n, c: *c }).collect();
    let mut dq: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    let outside = |l: usize, a: usize, b: usize| -> bool {
        match lines[a].meet(&lines[b]) {
            Some(x) => lines[l].excess(x) > 0.0,
            None => true,
        }
    };
    for i in 0..lines.len() {
        while dq.len() >= 2 && outside(i, dq[dq.len() - 2], dq[dq.len() - 1]) {
            dq.pop_back();
        }
        while dq.len() >= 2 && outside(i, dq[0], dq[1]) {
            dq.pop_front();
        }
        dq.push_back(i);
    }
    while dq.len() >= 3 && outside(dq[0], dq[dq.len() - 2], dq[dq.len() - 1]) {
        dq.pop_back();
    }
    while dq.len() >= 3 && outside(dq[dq.len() - 1], dq[0], dq[1]) {
        dq.pop_front();
    }
    if dq.len() < 3 {
        return None;
    }
    let edges: Vec<usize> = dq.into_iter().collect();
    let m = edges.len();
    let mut vertices = Vec::with_capacity(m);
    for i in 0..m {
        // Vertex i closes edge i-1 and opens edge i.
        vertices.push(lines[edges[(i + m - 1) % m]].meet(&lines[edges[i]])?);
    }
    let area: f64 = 0.5 * (0..m).map(|i| bracket(vertices[i], vertices[(i + 1) % m])).sum::<f64>();
    if !(area > 0.0) {
        return None;
    }
    let probe = vertices.iter().sum::<Vec2>() / m as f64;
    let slack = 1e-12 * (1.0 + probe.norm());
    if lines.iter().any(|l| l.excess(probe) > slack) {
        return None;
    }
    Some(Polygon { vertices, edges })
}

/// Q-perimeter of the inner parallel body `K ⊖ rP`, approximated by the
/// polygon cut out by the support lines at the grid directions. An empty
/// body has length zero.
pub fn parallel_body_length(curve: &ConvexCurve, r: f64) -> f64 {
    let ball = curve.ball();
    let normals: Vec<Vec2> = ball.theta().iter().map(|t| Vec2::new(t.cos(), t.sin())).collect();
    let offsets: Vec<f64> = curve.support().iter().zip(ball.a()).map(|(f, a)| a * (f - r)).collect();
    match intersect_half_planes(&normals, &offsets) {
        None => 0.0,
        Some(poly) => {
            let m = poly.vertices.len();
            (0..m)
                .map(|i| ball.a()[poly.edges[i]] * (poly.vertices[(i + 1) % m] - poly.vertices[i]).norm())
                .sum()
        }
    }
}

/// Breakdown of `A = ∫_0^{r_in} L_Q(r) dr`.
#[derive(Clone, Copy, Debug)]
pub struct OffsetAreaIntegral {
    /// Integral over the smooth regime `[0, μ0]`.
    pub smooth: f64,
    /// Integral over `[μ0, r_in]`.
    pub cornered: f64,
    pub mu0: f64,
    pub r_in: f64,
}

impl OffsetAreaIntegral {
    pub fn total(&self) -> f64 {
        self.smooth + self.cornered
    }
}

/// Area recovered from the lengths of inner parallel curves. The smooth part
/// is Gauss–Legendre quadrature of the lengths of actual offset curves; the
/// rest integrates polygonal parallel-body lengths on a grid refined by
/// `refine`, with `r = r_in − (r_in − μ0)s²` to resolve the collapse at
/// `r_in`.
pub fn area_from_offsets(curve: &ConvexCurve, refine: usize) -> Result<OffsetAreaIntegral> {
    let mu0 = 1.0 / curve.k_max();
    let mut smooth = 0.0;
    // Nodes stay strictly inside (0, μ0).
    for (x, w) in GAUSS8 {
        let r = 0.5 * mu0 * (1.0 + x);
        smooth += 0.5 * mu0 * w * inner_parallel(curve, r)?.length();
    }

    let fine = curve.refined(refine)?;
    let (r_in, _) = fine.radii_best_effort();
    let span = (r_in - mu0).max(0.0);
    const PANELS: usize = 16;
    let mut cornered = 0.0;
    for panel in 0..PANELS {
        let (s0, s1) = (panel as f64 / PANELS as f64, (panel + 1) as f64 / PANELS as f64);
        for (x, w) in GAUSS8 {
            let s = 0.5 * (s0 + s1) + 0.5 * (s1 - s0) * x;
            let r = r_in - span * s * s;
            cornered += 0.5 * (s1 - s0) * w * 2.0 * span * s * parallel_body_length(&fine, r);
        }
    }
    Ok(OffsetAreaIntegral {
        smooth,
        cornered,
        mu0,
        r_in,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{AngleGrid, SupportFunction, UnitBall};
    use std::f64::consts::{PI, TAU};
    use std::sync::Arc;

    fn ball(n: usize, eps: f64) -> Arc<UnitBall> {
        let sf = SupportFunction::new(&[(0, 1.0, 0.0), (2, eps, 0.0)]).unwrap();
        Arc::new(UnitBall::new(sf, AngleGrid::new(n).unwrap()).unwrap())
    }

    #[test]
    fn p_circle_halves() {
        let b = ball(256, 0.2);
        let c = ConvexCurve::p_circle(b.clone(), 2.0, Vec2::new(1.0, 1.0)).unwrap();
        let half = inner_parallel(&c, 1.0).unwrap();
        let expect = ConvexCurve::p_circle(b, 1.0, Vec2::new(1.0, 1.0)).unwrap();
        for (u, v) in half.vertices().iter().zip(expect.vertices()) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn unit_circle_quarter() {
        let c = ConvexCurve::from_curvature(ball(256, 0.0), vec![1.0; 256], Vec2::new(1.0, 0.0)).unwrap();
        let inner = inner_parallel(&c, 0.25).unwrap();
        assert!((inner.length() - TAU * 0.75).abs() < 1e-12);
    }

    #[test]
    fn radius_checks() {
        let c = ConvexCurve::from_curvature(ball(64, 0.0), vec![2.0; 64], Vec2::zeros()).unwrap();
        assert_eq!(inner_parallel(&c, 0.5).unwrap_err(), Error::RadiusTooLarge { r: 0.5, mu0: 0.5 });
        assert_eq!(inner_parallel(&c, -0.1).unwrap_err(), Error::NegativeRadius { r: -0.1 });
    }

    #[test]
    fn half_planes_square() {
        let normals: Vec<Vec2> = (0..4).map(|j| Vec2::new((j as f64 * PI / 2.0).cos(), (j as f64 * PI / 2.0).sin())).collect();
        let poly = intersect_half_planes(&normals, &[1.0, 2.0, 1.0, 2.0]).unwrap();
        let m = poly.vertices.len();
        assert_eq!(m, 4);
        let area: f64 = 0.5 * (0..m).map(|i| bracket(poly.vertices[i], poly.vertices[(i + 1) % m])).sum::<f64>();
        assert!((area - 8.0).abs() < 1e-12);
        assert!(intersect_half_planes(&normals, &[1.0, 2.0, -1.5, 2.0]).is_none());
    }

    #[test]
    fn redundant_half_planes_are_dropped() {
        let n = 12;
        let normals: Vec<Vec2> = (0..n).map(|j| Vec2::new((TAU * j as f64 / n as f64).cos(), (TAU * j as f64 / n as f64).sin())).collect();
        let offsets: Vec<f64> = (0..n).map(|j| if j % 3 == 0 { 1.0 } else { 5.0 }).collect();
        let poly = intersect_half_planes(&normals, &offsets).unwrap();
        assert_eq!(poly.edges, vec![0, 3, 6, 9]);
    }

    #[test]
    fn polygon_length_tracks_smooth_law() {
        let b = ball(2048, 0.2);
        let k: Vec<f64> = b.theta().iter().map(|t| 1.0 + 0.3 * (4.0 * t).cos()).collect();
        let c = ConvexCurve::from_curvature(b, k, Vec2::zeros()).unwrap();
        let mu0 = 1.0 / c.k_max();
        for r in [0.0, 0.5 * mu0] {
            let poly = parallel_body_length(&c, r);
            let exact = parallel_length_law(&c, r);
            assert!((poly - exact).abs() < 1e-5 * exact, "r {r}: {poly} vs {exact}");
        }
        assert_eq!(parallel_body_length(&c, 10.0), 0.0);
    }

    #[test]
    fn circle_area_from_offsets() {
        let c = ConvexCurve::from_curvature(ball(256, 0.0), vec![1.0; 256], Vec2::zeros()).unwrap();
        let integral = area_from_offsets(&c, 4).unwrap();
        assert!((integral.total() - PI).abs() < 1e-10);
    }
}
