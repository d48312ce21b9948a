//! Closed strictly convex curves stored by their Minkowski curvature.
//!
//! In the θ-gauge a curve satisfies `γ'(θ) = λ(θ) q(θ)` with Q-speed
//! `λ = [p,p'] / k`. Given positive curvature samples the curve is
//! recovered (up to translation) by integrating
//! `γ' = (a + a'')/k · (−sin θ, cos θ)`, which closes exactly when the
//! first harmonics of `(a + a'')/k` vanish.

use std::collections::VecDeque;
use std::f64::consts::TAU;
use std::sync::Arc;

use serde::Serialize;

use crate::ball::UnitBall;
use crate::error::{Error, Result};
use crate::optimize::{nelder_mead, SimplexOptions};
use crate::spectral::{self, TrigSeries};
use crate::{bracket, Vec2};

/// Default closure tolerance, relative to `L_Q`.
pub const TOL_CLOSE: f64 = 1e-6;

/// A curve of the class C in the θ-gauge.
#[derive(Clone, Debug)]
pub struct ConvexCurve {
    ball: Arc<UnitBall>,
    k: Vec<f64>,
    base: Vec2,
    lambda: Vec<f64>,
    velocity: Vec<Vec2>,
    vertices: Vec<Vec2>,
    closure: (f64, f64),
    length: f64,
    area: f64,
    centroid: Vec2,
    support: Vec<f64>,
}

/// Scalar summary of a curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveMetrics {
    pub length: f64,
    pub area: f64,
    pub iso_ratio: f64,
    pub k_min: f64,
    pub k_max: f64,
    /// Minimum curvature radius `1 / k_max`.
    pub mu0: f64,
    pub k_star: f64,
    pub r_in: f64,
    pub r_out: f64,
}

/// Closure residuals `(R_sin, R_cos) = ∮ (a+a'')/k (sin θ, cos θ) dθ`.
pub fn closure_residuals(ball: &UnitBall, k: &[f64]) -> (f64, f64) {
    let h = ball.grid().spacing();
    let (mut rs, mut rc) = (0.0, 0.0);
    for (i, &t) in ball.theta().iter().enumerate() {
        let rho = ball.radius_factor(i) / k[i];
        rs += rho * t.sin();
        rc += rho * t.cos();
    }
    (rs * h, rc * h)
}

impl ConvexCurve {
    /// Build the curve with curvature `k` and `γ(0) = base`, checking closure
    /// against [`TOL_CLOSE`].
    pub fn from_curvature(ball: Arc<UnitBall>, k: Vec<f64>, base: Vec2) -> Result<Self> {
        Self::with_tolerance(ball, k, base, TOL_CLOSE)
    }

    pub fn with_tolerance(ball: Arc<UnitBall>, k: Vec<f64>, base: Vec2, tol_close: f64) -> Result<Self> {
        let n = ball.len();
        if k.len() != n {
            return Err(Error::SampleCount {
                expected: n,
                got: k.len(),
            });
        }
        let bad: Vec<usize> = (0..n).filter(|&i| !(k[i] > 0.0 && k[i].is_finite())).collect();
        if !bad.is_empty() {
            return Err(Error::NonPositiveCurvature { nodes: bad });
        }

        let h = ball.grid().spacing();
        let lambda: Vec<f64> = ball.bracket_pp().iter().zip(&k).map(|(pp, ki)| pp / ki).collect();
        let length = lambda.iter().sum::<f64>() * h;
        let closure = closure_residuals(&ball, &k);
        let allowed = tol_close * length;
        if closure.0.abs() > allowed || closure.1.abs() > allowed {
            return Err(Error::ClosureViolation {
                r_sin: closure.0,
                r_cos: closure.1,
                allowed,
            });
        }

        let velocity: Vec<Vec2> = lambda.iter().zip(ball.q()).map(|(l, q)| *l * q).collect();
        let vx: Vec<f64> = velocity.iter().map(|v| v.x).collect();
        let vy: Vec<f64> = velocity.iter().map(|v| v.y).collect();
        let cx = TrigSeries::from_samples(&vx).cumulative_at_nodes();
        let cy = TrigSeries::from_samples(&vy).cumulative_at_nodes();
        let rel: Vec<Vec2> = cx.iter().zip(&cy).map(|(x, y)| Vec2::new(*x, *y)).collect();

        // Area and centroid from Green's theorem, in coordinates relative to
        // the base point.
        let area = 0.5 * h * rel.iter().zip(&velocity).map(|(g, v)| bracket(*g, *v)).sum::<f64>();
        let mx = 0.5 * h * rel.iter().zip(&velocity).map(|(g, v)| g.x * g.x * v.y).sum::<f64>();
        let my = -0.5 * h * rel.iter().zip(&velocity).map(|(g, v)| g.y * g.y * v.x).sum::<f64>();
        let centroid = base + Vec2::new(mx, my) / area;

        let vertices: Vec<Vec2> = rel.iter().map(|g| base + g).collect();
        let support: Vec<f64> = vertices
            .iter()
            .zip(ball.q())
            .map(|(g, q)| bracket(g - centroid, *q))
            .collect();

        Ok(Self {
            ball,
            k,
            base,
            lambda,
            velocity,
            vertices,
            closure,
            length,
            area,
            centroid,
            support,
        })
    }

    /// Curve with Euclidean radius of curvature `ρ(θ)` as a function of the
    /// normal angle: `k = (a + a'')/ρ`. Closure holds iff `ρ` has no first
    /// harmonic.
    pub fn from_radius_of_curvature(ball: Arc<UnitBall>, rho: &[f64], base: Vec2) -> Result<Self> {
        let k = (0..ball.len()).map(|i| ball.radius_factor(i) / rho[i]).collect();
        Self::from_curvature(ball, k, base)
    }

    /// The P-circle `center + R ∂P`.
    pub fn p_circle(ball: Arc<UnitBall>, radius: f64, center: Vec2) -> Result<Self> {
        let base = center + radius * ball.p()[0];
        let k = vec![1.0 / radius; ball.len()];
        Self::from_curvature(ball, k, base)
    }

    /// Axis-aligned ellipse with semi-axes `sx` (along x) and `sy`.
    pub fn ellipse(ball: Arc<UnitBall>, sx: f64, sy: f64, center: Vec2) -> Result<Self> {
        let rho: Vec<f64> = ball
            .theta()
            .iter()
            .map(|&t| {
                let (s, c) = t.sin_cos();
                (sx * sx * sy * sy) / (sx * sx * c * c + sy * sy * s * s).powf(1.5)
            })
            .collect();
        Self::from_radius_of_curvature(ball, &rho, center + Vec2::new(sx, 0.0))
    }

    pub fn ball(&self) -> &Arc<UnitBall> {
        &self.ball
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn curvature(&self) -> &[f64] {
        &self.k
    }

    pub fn base(&self) -> Vec2 {
        self.base
    }

    /// Q-speed `λ = [p,p']/k`.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// `γ'(θ_i) = λ_i q_i`.
    pub fn velocity(&self) -> &[Vec2] {
        &self.velocity
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn closure(&self) -> (f64, f64) {
        self.closure
    }

    /// Q-length `L_Q = ∮ λ dθ`.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn iso_ratio(&self) -> f64 {
        self.length * self.length / self.area
    }

    /// Area centroid of the enclosed region.
    pub fn centroid(&self) -> Vec2 {
        self.centroid
    }

    /// Support samples `f_i = [γ_i − centroid, q_i]`.
    pub fn support(&self) -> &[f64] {
        &self.support
    }

    /// Support samples with respect to an arbitrary origin.
    pub fn support_about(&self, origin: Vec2) -> Vec<f64> {
        self.vertices
            .iter()
            .zip(self.ball.q())
            .map(|(g, q)| bracket(g - origin, *q))
            .collect()
    }

    /// `∮ g ds = Σ g_i λ_i Δθ`.
    pub fn integrate_ds(&self, g: impl IntoIterator<Item = f64>) -> f64 {
        let h = self.ball.grid().spacing();
        g.into_iter().zip(&self.lambda).map(|(gi, l)| gi * l).sum::<f64>() * h
    }

    /// `∮ k² ds`.
    pub fn k2_integral(&self) -> f64 {
        self.integrate_ds(self.k.iter().map(|k| k * k))
    }

    pub fn k_min(&self) -> f64 {
        self.k.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn k_max(&self) -> f64 {
        self.k.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Same curve scaled by `s > 0` about the origin.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let k = self.k.iter().map(|k| k / s).collect();
        Self::from_curvature(self.ball.clone(), k, s * self.base)
    }

    /// Same curve on a grid `factor` times finer (spectral interpolation of
    /// the curvature).
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let grid = crate::AngleGrid::new(self.len() * factor)?;
        let ball = Arc::new(self.ball.regrid(grid)?);
        let k = spectral::resample(&self.k, grid.len());
        let tol = (self.closure.0.abs().max(self.closure.1.abs()) / self.length).max(TOL_CLOSE);
        Self::with_tolerance(ball, k, self.base, 2.0 * tol)
    }

    pub fn metrics(&self) -> CurveMetrics {
        let (r_in, r_out) = self.radii_best_effort();
        let k_max = self.k_max();
        CurveMetrics {
            length: self.length,
            area: self.area,
            iso_ratio: self.iso_ratio(),
            k_min: self.k_min(),
            k_max,
            mu0: 1.0 / k_max,
            k_star: self.median_curvature(),
            r_in,
            r_out,
        }
    }

    /// Residuals of `∮k ds = 2A(P)`, `∮f ds = 2A`, `∮fk ds = L_Q` with the
    /// support function taken about the centroid.
    pub fn prop1_identities(&self) -> (f64, f64, f64) {
        self.prop1_identities_about(self.centroid)
    }

    pub fn prop1_identities_about(&self, origin: Vec2) -> (f64, f64, f64) {
        let f = self.support_about(origin);
        let ia = self.integrate_ds(self.k.iter().copied()) - 2.0 * self.ball.area();
        let ib = self.integrate_ds(f.iter().copied()) - 2.0 * self.area;
        let ic = self.integrate_ds(f.iter().zip(&self.k).map(|(f, k)| f * k)) - self.length;
        (ia, ib, ic)
    }

    /// Median curvature: the largest level `x` with `k > x` on some
    /// θ-interval of length π, i.e. the maximum over window starts of the
    /// minimum of `k` over a closed half-turn of nodes.
    pub fn median_curvature(&self) -> f64 {
        sliding_window_max_of_min(&self.k, self.len() / 2 + 1)
    }

    /// Radii of the largest inscribed and smallest circumscribed P-circles.
    pub fn inscribed_circumscribed(&self) -> Result<(f64, f64)> {
        let q = self.ball.q();
        let min_support = |x: Vec2| {
            self.vertices
                .iter()
                .zip(q)
                .map(|(g, q)| bracket(g - x, *q))
                .fold(f64::INFINITY, f64::min)
        };
        let max_support = |x: Vec2| {
            self.vertices
                .iter()
                .zip(q)
                .map(|(g, q)| bracket(g - x, *q))
                .fold(f64::NEG_INFINITY, f64::max)
        };

        let (lo, hi) = self.bounding_box();
        const COARSE: usize = 20;
        let cell = Vec2::new((hi.x - lo.x) / COARSE as f64, (hi.y - lo.y) / COARSE as f64);
        let coarse_points = (0..COARSE).flat_map(|i| {
            (0..COARSE).map(move |j| lo + Vec2::new((i as f64 + 0.5) * cell.x, (j as f64 + 0.5) * cell.y))
        });
        let (mut start_in, mut start_out) = (self.centroid, self.centroid);
        let (mut best_in, mut best_out) = (min_support(self.centroid), max_support(self.centroid));
        for x in coarse_points {
            let (mi, ma) = (min_support(x), max_support(x));
            if mi > best_in {
                best_in = mi;
                start_in = x;
            }
            if ma < best_out {
                best_out = ma;
                start_out = x;
            }
        }

        let step = 0.5 * cell.x.min(cell.y);
        let opts = SimplexOptions::default();
        let inner = nelder_mead(|x| -min_support(x), start_in, step, opts);
        let outer = nelder_mead(max_support, start_out, step, opts);
        let (r_in, r_out) = (-inner.value, outer.value);
        if inner.converged && outer.converged {
            Ok((r_in, r_out))
        } else {
            Err(Error::OptimizerNotConverged { r_in, r_out })
        }
    }

    /// `(r_in, r_out)`, or the optimizer's best bounds if it did not
    /// converge.
    pub fn radii_best_effort(&self) -> (f64, f64) {
        match self.inscribed_circumscribed() {
            Ok(r) => r,
            Err(Error::OptimizerNotConverged { r_in, r_out }) => (r_in, r_out),
            Err(e) => unreachable!("unexpected optimizer error {e}"),
        }
    }

    /// Largest deviation from central symmetry about the centroid,
    /// `max_i |γ(θ_i) + γ(θ_i + π) − 2 centroid|`.
    pub fn symmetry_defect(&self) -> f64 {
        let grid = self.ball.grid();
        (0..self.len())
            .map(|i| (self.vertices[i] + self.vertices[grid.antipode(i)] - 2.0 * self.centroid).norm())
            .fold(0.0, f64::max)
    }

    fn bounding_box(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (lo, hi)
    }
}

/// Curvature recomputed from vertex samples: spectral `γ'`, then
/// `λ = [p, γ']` and `k = [p,p']/λ`.
pub fn curvature_from_vertices(ball: &UnitBall, vertices: &[Vec2]) -> Vec<f64> {
    let xs: Vec<f64> = vertices.iter().map(|v| v.x).collect();
    let ys: Vec<f64> = vertices.iter().map(|v| v.y).collect();
    let dx = spectral::derivative_at_nodes(&xs);
    let dy = spectral::derivative_at_nodes(&ys);
    (0..vertices.len())
        .map(|i| {
            let lambda = bracket(ball.p()[i], Vec2::new(dx[i], dy[i]));
            ball.bracket_pp()[i] / lambda
        })
        .collect()
}

/// `max_s min_{j in s..s+w} x_j` over circular windows, O(N) with a
/// monotone deque.
pub fn sliding_window_max_of_min(x: &[f64], w: usize) -> f64 {
    let n = x.len();
    assert!(w >= 1 && w <= n);
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut best = f64::NEG_INFINITY;
    // Positions 0..n+w-1 on the unrolled circle; window ending at `e`
    // covers e+1-w..=e.
    for e in 0..n + w - 1 {
        let v = x[e % n];
        while dq.back().is_some_and(|&b| x[b % n] >= v) {
            dq.pop_back();
        }
        dq.push_back(e);
        if let Some(&f) = dq.front() {
            if f + w <= e {
                dq.pop_front();
            }
        }
        if e + 1 >= w {
            best = best.max(x[dq.front().copied().unwrap() % n]);
        }
    }
    best
}

/// Gauss–Legendre 8-point nodes and weights on `[-1, 1]`.
pub(crate) const GAUSS8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// Euclidean perimeter, for cross-checks against the Euclidean case.
pub fn euclidean_perimeter(curve: &ConvexCurve) -> f64 {
    curve.velocity().iter().map(|v| v.norm()).sum::<f64>() * TAU / curve.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{AngleGrid, SupportFunction};
    use std::f64::consts::PI;

    fn ball(n: usize, eps: f64) -> Arc<UnitBall> {
        let sf = SupportFunction::new(&[(0, 1.0, 0.0), (2, eps, 0.0)]).unwrap();
        Arc::new(UnitBall::new(sf, AngleGrid::new(n).unwrap()).unwrap())
    }

    #[test]
    fn unit_circle() {
        let b = ball(256, 0.0);
        let c = ConvexCurve::from_curvature(b, vec![1.0; 256], Vec2::new(1.0, 0.0)).unwrap();
        assert!((c.length() - TAU).abs() < 1e-12);
        assert!((c.area() - PI).abs() < 1e-12);
        assert!(c.centroid().norm() < 1e-12);
        let (ia, ib, ic) = c.prop1_identities();
        assert!(ia.abs() < 1e-10 && ib.abs() < 1e-10 && ic.abs() < 1e-10);
    }

    #[test]
    fn p_circles_scale_with_radius() {
        let b = ball(256, 0.2);
        for r in [0.5, 1.0, 3.0] {
            let c = ConvexCurve::p_circle(b.clone(), r, Vec2::new(0.3, -1.0)).unwrap();
            assert!((c.length() - 2.0 * r * b.area()).abs() < 1e-12 * r);
            assert!((c.area() - r * r * b.area()).abs() < 1e-12 * r * r);
            assert!((c.iso_ratio() - 4.0 * b.area()).abs() < 1e-12);
            assert!((c.centroid() - Vec2::new(0.3, -1.0)).norm() < 1e-12);
            for (v, p) in c.vertices().iter().zip(b.p()) {
                assert!((v - (Vec2::new(0.3, -1.0) + r * p)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn closure_violation_is_reported() {
        let b = ball(256, 0.0);
        let k: Vec<f64> = b.theta().iter().map(|t| 1.0 / (1.0 + 0.3 * t.cos())).collect();
        match ConvexCurve::from_curvature(b, k, Vec2::zeros()) {
            Err(Error::ClosureViolation { r_sin, r_cos, .. }) => {
                assert!(r_sin.abs() < 1e-12);
                assert!((r_cos - 0.3 * PI).abs() < 1e-12);
            }
            other => panic!("expected closure violation, got {other:?}"),
        }
    }

    #[test]
    fn non_positive_curvature_is_reported() {
        let b = ball(32, 0.0);
        let mut k = vec![1.0; 32];
        k[5] = -0.1;
        k[9] = 0.0;
        assert_eq!(
            ConvexCurve::from_curvature(b, k, Vec2::zeros()).unwrap_err(),
            Error::NonPositiveCurvature { nodes: vec![5, 9] }
        );
    }

    #[test]
    fn median_curvature_examples() {
        let b = ball(1024, 0.0);
        let k: Vec<f64> = b.theta().iter().map(|t| 1.0 + 0.5 * (2.0 * t).cos()).collect();
        let c = ConvexCurve::from_curvature(b.clone(), k.clone(), Vec2::zeros()).unwrap();
        // Brute force over all window starts of the closed half-turn.
        let n = k.len();
        let brute = (0..n)
            .map(|s| (0..=n / 2).map(|j| k[(s + j) % n]).fold(f64::INFINITY, f64::min))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(c.median_curvature(), brute);
        assert!((c.median_curvature() - 0.5).abs() < 1e-12);

        let circle = ConvexCurve::from_curvature(b, vec![0.25; 1024], Vec2::zeros()).unwrap();
        assert_eq!(circle.median_curvature(), 0.25);
    }

    #[test]
    fn sliding_window_matches_brute_force() {
        let x = [3.0, 1.0, 4.0, 1.5, 5.0, 9.0, 2.0, 6.0];
        for w in 1..=8 {
            let brute = (0..8)
                .map(|s| (0..w).map(|j| x[(s + j) % 8]).fold(f64::INFINITY, f64::min))
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(sliding_window_max_of_min(&x, w), brute, "w = {w}");
        }
    }

    #[test]
    fn ellipse_radii_and_perimeter() {
        let b = ball(512, 0.0);
        let c = ConvexCurve::ellipse(b, 2.0, 1.0, Vec2::zeros()).unwrap();
        let (r_in, r_out) = c.inscribed_circumscribed().unwrap();
        assert!((r_in - 1.0).abs() < 1e-6, "r_in {r_in}");
        assert!((r_out - 2.0).abs() < 1e-6, "r_out {r_out}");
        assert!((c.area() - 2.0 * PI).abs() < 1e-10);
        // Ramanujan's second approximation is accurate to ~1e-7 here.
        let h = (1.0_f64 / 3.0).powi(2);
        let ramanujan = PI * 3.0 * (1.0 + 3.0 * h / (10.0 + (4.0 - 3.0 * h).sqrt()));
        assert!((c.length() - ramanujan).abs() < 1e-5);
        assert!((c.length() - 9.688_448_2).abs() < 1e-6);
        let m = c.metrics();
        assert!(m.mu0 <= m.r_in + 1e-6);
        assert!((m.mu0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn curvature_round_trip() {
        let b = ball(512, 0.2);
        let k: Vec<f64> = b.theta().iter().map(|t| 1.0 + 0.1 * (4.0 * t).cos() - 0.05 * (6.0 * t).sin()).collect();
        let c = ConvexCurve::from_curvature(b.clone(), k.clone(), Vec2::new(2.0, 1.0)).unwrap();
        let back = curvature_from_vertices(&b, c.vertices());
        let err = back.iter().zip(&k).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "round trip error {err}");
        assert_eq!(c.vertices()[0], Vec2::new(2.0, 1.0));
    }

    #[test]
    fn symmetric_curve_radii_match_centered_support() {
        let b = ball(512, 0.2);
        let k: Vec<f64> = b.theta().iter().map(|t| 1.0 + 0.25 * (2.0 * t + 0.3).cos()).collect();
        let c = ConvexCurve::from_curvature(b, k, Vec2::zeros()).unwrap();
        assert!(c.symmetry_defect() < 1e-12);
        let fmin = c.support().iter().copied().fold(f64::INFINITY, f64::min);
        let fmax = c.support().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (r_in, r_out) = c.inscribed_circumscribed().unwrap();
        assert!((r_in - fmin).abs() < 1e-6, "{r_in} vs {fmin}");
        assert!((r_out - fmax).abs() < 1e-6, "{r_out} vs {fmax}");
    }

    #[test]
    fn support_identity_about_interior_point() {
        let b = ball(256, 0.2);
        let rho: Vec<f64> = b
            .theta()
            .iter()
            .map(|t| 1.0 + 0.2 * (3.0 * t).cos() + 0.1 * (2.0 * t).sin())
            .collect();
        let c = ConvexCurve::from_radius_of_curvature(b, &rho, Vec2::new(-1.0, 0.5)).unwrap();
        let origin = c.centroid() + Vec2::new(0.1, -0.05);
        let (ia, ib, ic) = c.prop1_identities_about(origin);
        assert!(ia.abs() < 1e-10 && ib.abs() < 1e-10 && ic.abs() < 1e-10, "{ia} {ib} {ic}");
    }
}
