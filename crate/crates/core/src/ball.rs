//! The Minkowski unit ball `P`, described by its support function, and its
//! dual ball `Q`.
//!
//! With `e_r = (cos θ, sin θ)` and `e_θ = (−sin θ, cos θ)` the boundary of
//! `P` is `p(θ) = a e_r + a' e_θ` and the boundary of `Q` is
//! `q(θ) = e_θ / a`. Every quantity the rest of the crate needs
//! (`[p,p']`, `[q,q']`, the PDE coefficients, `A(P)`) is cached per grid
//! node at construction time.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::TrigSeries;
use crate::{bracket, Vec2};

/// Uniform periodic grid `θ_i = iΔθ`, `Δθ = 2π/N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleGrid {
    n: usize,
}

impl AngleGrid {
    pub const MIN_NODES: usize = 16;

    pub fn new(n: usize) -> Result<Self> {
        if n < Self::MIN_NODES || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(n));
        }
        Ok(Self { n })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        TAU / self.n as f64
    }

    #[inline]
    pub fn theta(&self, i: usize) -> f64 {
        TAU * i as f64 / self.n as f64
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.theta(i))
    }

    /// Node index of `θ + π`.
    #[inline]
    pub fn antipode(&self, i: usize) -> usize {
        (i + self.n / 2) % self.n
    }
}

/// Values of the support function and its first three derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportJet {
    pub a: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// Support function `a(θ)` of an origin-symmetric unit ball, stored as a
/// truncated Fourier series with even harmonics only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportFunction {
    /// `cos[m]` multiplies `cos mθ`.
    cos: Vec<f64>,
    /// `sin[m]` multiplies `sin mθ` (`sin[0]` is unused).
    sin: Vec<f64>,
}

impl SupportFunction {
    /// Build from `(order, cos_coef, sin_coef)` triples. Repeated orders add
    /// up. Odd orders are rejected because they break `a(θ+π) = a(θ)`.
    pub fn new(harmonics: &[(usize, f64, f64)]) -> Result<Self> {
        let cutoff = harmonics.iter().map(|h| h.0).max().unwrap_or(0);
        let mut cos = vec![0.0; cutoff + 1];
        let mut sin = vec![0.0; cutoff + 1];
        for &(order, c, s) in harmonics {
            if order % 2 == 1 {
                return Err(Error::OddHarmonic { order });
            }
            if !c.is_finite() || !s.is_finite() {
                return Err(Error::NonFiniteCoefficient { order });
            }
            cos[order] += c;
            if order > 0 {
                sin[order] += s;
            }
        }
        Ok(Self { cos, sin })
    }

    /// The Euclidean disc, `a ≡ 1`.
    pub fn euclidean() -> Self {
        Self {
            cos: vec![1.0],
            sin: vec![0.0],
        }
    }

    /// Harmonic cutoff `M`.
    pub fn cutoff(&self) -> usize {
        self.cos.len() - 1
    }

    /// Nonzero harmonics as `(order, cos, sin)` triples.
    pub fn harmonics(&self) -> Vec<(usize, f64, f64)> {
        (0..self.cos.len())
            .filter(|&m| self.cos[m] != 0.0 || self.sin[m] != 0.0)
            .map(|m| (m, self.cos[m], self.sin[m]))
            .collect()
    }

    pub fn eval(&self, theta: f64) -> SupportJet {
        let mut jet = SupportJet {
            a: self.cos[0],
            d1: 0.0,
            d2: 0.0,
            d3: 0.0,
        };
        for m in 1..self.cos.len() {
            let (c, s) = (self.cos[m], self.sin[m]);
            if c == 0.0 && s == 0.0 {
                continue;
            }
            let mf = m as f64;
            let (sn, cs) = (mf * theta).sin_cos();
            let base = c * cs + s * sn;
            let deriv = -c * sn + s * cs;
            jet.a += base;
            jet.d1 += mf * deriv;
            jet.d2 -= mf * mf * base;
            jet.d3 -= mf * mf * mf * deriv;
        }
        jet
    }

    /// `∫_{θ1}^{θ2} a(a + a'') dθ`, exact for the trigonometric polynomial.
    pub fn bracket_integral(&self, theta1: f64, theta2: f64) -> f64 {
        // a(a+a'') has degree 2M; sampling at more than 4M points makes the
        // interpolant exact.
        let n = (4 * self.cutoff() + 4).max(16);
        let samples: Vec<f64> = (0..n)
            .map(|j| {
                let jet = self.eval(TAU * j as f64 / n as f64);
                jet.a * (jet.a + jet.d2)
            })
            .collect();
        let series = TrigSeries::from_samples(&samples);
        series.integral_from_zero(theta2) - series.integral_from_zero(theta1)
    }
}

/// Result of the tangent-chord construction on the unit ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TangentChord {
    /// Q-length of the tangent segment from `p(θ1)` to the corner.
    pub l1: f64,
    /// Q-length of the tangent segment from the corner to `p(θ2)`.
    pub l2: f64,
    /// Q-length of the arc of `∂P` between `θ1` and `θ2`.
    pub l_arc: f64,
    /// `l1 + l2 − l_arc`, strictly positive.
    pub delta: f64,
}

/// The unit ball `P` sampled on an [`AngleGrid`], together with its dual `Q`.
#[derive(Clone, Debug)]
pub struct UnitBall {
    sf: SupportFunction,
    grid: AngleGrid,
    theta: Vec<f64>,
    a: Vec<f64>,
    da: Vec<f64>,
    dda: Vec<f64>,
    ddda: Vec<f64>,
    p: Vec<Vec2>,
    q: Vec<Vec2>,
    bracket_pp: Vec<f64>,
    bracket_qq: Vec<f64>,
    fcoef: Vec<f64>,
    gcoef: Vec<f64>,
    area_p: f64,
}

impl UnitBall {
    pub fn new(sf: SupportFunction, grid: AngleGrid) -> Result<Self> {
        let n = grid.len();
        let theta: Vec<f64> = grid.thetas().collect();
        let jets: Vec<SupportJet> = theta.iter().map(|&t| sf.eval(t)).collect();

        let non_positive: Vec<usize> = (0..n).filter(|&i| !(jets[i].a > 0.0)).collect();
        if !non_positive.is_empty() {
            return Err(Error::NonPositiveSupport { nodes: non_positive });
        }
        let non_convex: Vec<usize> = (0..n).filter(|&i| !(jets[i].a + jets[i].d2 > 0.0)).collect();
        if !non_convex.is_empty() {
            return Err(Error::NotStrictlyConvex { nodes: non_convex });
        }

        let a: Vec<f64> = jets.iter().map(|j| j.a).collect();
        let da: Vec<f64> = jets.iter().map(|j| j.d1).collect();
        let dda: Vec<f64> = jets.iter().map(|j| j.d2).collect();
        let ddda: Vec<f64> = jets.iter().map(|j| j.d3).collect();
        let p: Vec<Vec2> = theta.iter().zip(&jets).map(|(&t, j)| boundary_point(t, j)).collect();
        let q: Vec<Vec2> = theta.iter().zip(&jets).map(|(&t, j)| dual_point(t, j)).collect();
        let bracket_pp: Vec<f64> = jets.iter().map(|j| j.a * (j.a + j.d2)).collect();
        let bracket_qq: Vec<f64> = jets.iter().map(|j| 1.0 / (j.a * j.a)).collect();
        let fcoef: Vec<f64> = jets.iter().map(|j| j.a / (j.a + j.d2)).collect();
        let gcoef: Vec<f64> = jets.iter().map(|j| 2.0 * j.d1 / (j.a + j.d2)).collect();
        let area_p = 0.5 * bracket_pp.iter().sum::<f64>() * grid.spacing();

        Ok(Self {
            sf,
            grid,
            theta,
            a,
            da,
            dda,
            ddda,
            p,
            q,
            bracket_pp,
            bracket_qq,
            fcoef,
            gcoef,
            area_p,
        })
    }

    /// Same ball on another grid.
    pub fn regrid(&self, grid: AngleGrid) -> Result<Self> {
        Self::new(self.sf.clone(), grid)
    }

    /// Copy of the ball whose cached `A(P)` is shifted by `delta`. Only used
    /// to check that the self-test notices a corrupted area.
    #[doc(hidden)]
    pub fn with_tampered_area(mut self, delta: f64) -> Self {
        self.area_p += delta;
        self
    }

    pub fn support(&self) -> &SupportFunction {
        &self.sf
    }

    pub fn grid(&self) -> AngleGrid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn a_prime(&self) -> &[f64] {
        &self.da
    }

    pub fn a_second(&self) -> &[f64] {
        &self.dda
    }

    pub fn a_third(&self) -> &[f64] {
        &self.ddda
    }

    pub fn p(&self) -> &[Vec2] {
        &self.p
    }

    pub fn q(&self) -> &[Vec2] {
        &self.q
    }

    /// `[p, p'] = a (a + a'')`.
    pub fn bracket_pp(&self) -> &[f64] {
        &self.bracket_pp
    }

    /// `[q, q'] = a^{-2}`.
    pub fn bracket_qq(&self) -> &[f64] {
        &self.bracket_qq
    }

    /// Diffusion coefficient `a / (a + a'')` of the curvature PDE.
    pub fn fcoef(&self) -> &[f64] {
        &self.fcoef
    }

    /// Advection coefficient `2a' / (a + a'')` of the curvature PDE.
    pub fn gcoef(&self) -> &[f64] {
        &self.gcoef
    }

    /// `a + a''` at node `i`, the Euclidean radius of curvature of `∂P`.
    #[inline]
    pub fn radius_factor(&self, i: usize) -> f64 {
        self.a[i] + self.dda[i]
    }

    /// Euclidean area of `P`.
    pub fn area(&self) -> f64 {
        self.area_p
    }

    pub fn p_at(&self, theta: f64) -> Vec2 {
        boundary_point(theta, &self.sf.eval(theta))
    }

    pub fn q_at(&self, theta: f64) -> Vec2 {
        dual_point(theta, &self.sf.eval(theta))
    }

    /// Constant `C = q0² max[p,p']`, `q0 = max |q|`, bounding the median
    /// curvature by `C L_Q / A`.
    pub fn median_curvature_constant(&self) -> f64 {
        let q0 = self.q.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let max_pp = self.bracket_pp.iter().copied().fold(0.0, f64::max);
        q0 * q0 * max_pp
    }

    /// Norm of `v` with `P` as unit ball: the `t >= 0` with `v = t p(θ*)`.
    pub fn minkowski_norm(&self, v: Vec2) -> f64 {
        if v.x == 0.0 && v.y == 0.0 {
            return 0.0;
        }
        let n = self.len();
        // [p(θ), v] decreases through zero where p(θ) points along v.
        let side = |p: &Vec2| bracket(*p, v);
        let mut lo = None;
        for i in 0..n {
            let j = (i + 1) % n;
            let (si, sj) = (side(&self.p[i]), side(&self.p[j]));
            if self.p[i].dot(&v) > 0.0 && si >= 0.0 && sj < 0.0 {
                lo = Some(i);
                break;
            }
        }
        let i = lo.expect("a strictly convex ball has a boundary point in every direction");
        let (mut t0, mut t1) = (self.theta[i], self.theta[i] + self.grid.spacing());
        if side(&self.p[i]) != 0.0 {
            for _ in 0..50 {
                let mid = 0.5 * (t0 + t1);
                if side(&self.p_at(mid)) >= 0.0 {
                    t0 = mid;
                } else {
                    t1 = mid;
                }
                if t1 - t0 < 1e-12 {
                    break;
                }
            }
        } else {
            t1 = t0;
        }
        let theta_star = 0.5 * (t0 + t1);
        // [p(θ*), q(θ*)] = 1, so the bracket with q recovers t.
        bracket(v, self.q_at(theta_star))
    }

    /// Dual support `p*(w) = [w, q(θ)]`.
    pub fn dual_support(&self, w: Vec2, theta: f64) -> f64 {
        bracket(w, self.q_at(theta))
    }

    /// Tangent segments to `∂P` at `θ1` and `θ2` versus the arc between them.
    pub fn tangent_chord(&self, theta1: f64, theta2: f64) -> Result<TangentChord> {
        let gap = (theta2 - theta1).rem_euclid(TAU);
        if gap < 1e-12 || TAU - gap < 1e-12 {
            return Err(Error::DegenerateChord);
        }
        let q1 = self.q_at(theta1);
        let q2 = self.q_at(theta2);
        let denom = bracket(q1, q2);
        if gap >= PI || denom.abs() < 1e-14 {
            return Err(Error::AntipodalTangents);
        }
        let l1 = (1.0 - bracket(self.p_at(theta1), q2)) / denom;
        let l2 = (1.0 - bracket(self.p_at(theta2), q1)) / denom;
        let l_arc = self.sf.bracket_integral(theta1, theta1 + gap);
        Ok(TangentChord {
            l1,
            l2,
            l_arc,
            delta: l1 + l2 - l_arc,
        })
    }
}

fn boundary_point(theta: f64, jet: &SupportJet) -> Vec2 {
    let (s, c) = theta.sin_cos();
    Vec2::new(jet.a * c - jet.d1 * s, jet.a * s + jet.d1 * c)
}

fn dual_point(theta: f64, jet: &SupportJet) -> Vec2 {
    let (s, c) = theta.sin_cos();
    Vec2::new(-s / jet.a, c / jet.a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> AngleGrid {
        AngleGrid::new(n).unwrap()
    }

    fn elliptic(eps: f64) -> SupportFunction {
        SupportFunction::new(&[(0, 1.0, 0.0), (2, eps, 0.0)]).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(AngleGrid::new(8).is_err());
        assert!(AngleGrid::new(17).is_err());
        let g = grid(16);
        assert_eq!(g.antipode(3), 11);
        assert!((g.spacing() - TAU / 16.0).abs() < 1e-15);
    }

    #[test]
    fn odd_harmonics_are_rejected() {
        let err = SupportFunction::new(&[(0, 1.0, 0.0), (3, 0.1, 0.0)]).unwrap_err();
        assert_eq!(err, Error::OddHarmonic { order: 3 });
    }

    #[test]
    fn euclidean_disc_area() {
        let ball = UnitBall::new(SupportFunction::euclidean(), grid(256)).unwrap();
        assert!((ball.area() - PI).abs() < 1e-12);
    }

    #[test]
    fn perturbed_ball_area_matches_parseval() {
        // A(P) = ½∮(a² − a'²) = π(c0² − 3ε²/2) for a = 1 + ε cos 2θ.
        let ball = UnitBall::new(elliptic(0.2), grid(256)).unwrap();
        assert!((ball.area() - 0.94 * PI).abs() < 1e-12);
        assert!((ball.area() - 2.953_097).abs() < 1e-6);
    }

    #[test]
    fn non_convex_support_is_rejected() {
        match UnitBall::new(elliptic(0.4), grid(256)) {
            Err(Error::NotStrictlyConvex { nodes }) => {
                assert!(nodes.contains(&0));
                assert!(nodes.contains(&128));
                assert!(!nodes.contains(&64));
            }
            other => panic!("expected convexity failure, got {other:?}"),
        }
    }

    #[test]
    fn negative_support_is_rejected() {
        let sf = SupportFunction::new(&[(0, -1.0, 0.0)]).unwrap();
        assert!(matches!(
            UnitBall::new(sf, grid(16)),
            Err(Error::NonPositiveSupport { .. })
        ));
    }

    #[test]
    fn euclidean_norm_and_zero() {
        let ball = UnitBall::new(SupportFunction::euclidean(), grid(64)).unwrap();
        assert!((ball.minkowski_norm(Vec2::new(3.0, 4.0)) - 5.0).abs() < 1e-12);
        assert_eq!(ball.minkowski_norm(Vec2::zeros()), 0.0);
    }

    #[test]
    fn boundary_points_have_unit_norm() {
        let ball = UnitBall::new(elliptic(0.2), grid(128)).unwrap();
        for (i, p) in ball.p().iter().enumerate() {
            assert!((ball.minkowski_norm(*p) - 1.0).abs() < 1e-12, "node {i}");
        }
    }

    #[test]
    fn dual_support_examples() {
        let euclid = UnitBall::new(SupportFunction::euclidean(), grid(32)).unwrap();
        let t = 0.7_f64;
        let e_r = Vec2::new(t.cos(), t.sin());
        assert!((euclid.dual_support(e_r, t) - 1.0).abs() < 1e-15);
        let ball = UnitBall::new(elliptic(0.2), grid(32)).unwrap();
        assert!(ball.dual_support(ball.q_at(t), t).abs() < 1e-15);
        assert!((ball.dual_support(ball.p_at(t), t) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn euclidean_tangent_chords() {
        let ball = UnitBall::new(SupportFunction::euclidean(), grid(32)).unwrap();
        let tc = ball.tangent_chord(0.0, PI / 2.0).unwrap();
        assert!((tc.l1 - 1.0).abs() < 1e-14 && (tc.l2 - 1.0).abs() < 1e-14);
        assert!((tc.l_arc - PI / 2.0).abs() < 1e-14);
        assert!((tc.delta - 0.429_203_673_205_103).abs() < 1e-12);

        let tc = ball.tangent_chord(0.0, PI / 3.0).unwrap();
        let half = (PI / 6.0).tan();
        assert!((tc.l1 - half).abs() < 1e-14 && (tc.l2 - half).abs() < 1e-14);
        assert!((tc.delta - (2.0 * half - PI / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn tangent_chord_errors() {
        let ball = UnitBall::new(elliptic(0.2), grid(32)).unwrap();
        assert_eq!(ball.tangent_chord(1.0, 1.0), Err(Error::DegenerateChord));
        assert_eq!(ball.tangent_chord(0.0, PI), Err(Error::AntipodalTangents));
        assert_eq!(ball.tangent_chord(0.0, 4.0), Err(Error::AntipodalTangents));
    }

    #[test]
    fn tangent_chord_matches_polyline_oracle() {
        // Independent route: the tangent lines meet at the corner V solving
        // [V, q_i] = 1 (support lines of P), and segment Q-lengths are
        // Euclidean length times a(θ_i). The arc length is a fine midpoint sum.
        let ball = UnitBall::new(elliptic(0.2), grid(32)).unwrap();
        let (t1, t2) = (0.0, PI / 2.0);
        let tc = ball.tangent_chord(t1, t2).unwrap();
        let n1 = Vec2::new(t1.cos(), t1.sin());
        let n2 = Vec2::new(t2.cos(), t2.sin());
        let (h1, h2) = (ball.support().eval(t1).a, ball.support().eval(t2).a);
        let det = n1.x * n2.y - n1.y * n2.x;
        let corner = Vec2::new((h1 * n2.y - h2 * n1.y) / det, (n1.x * h2 - n2.x * h1) / det);
        let l1 = (corner - ball.p_at(t1)).norm() * h1;
        let l2 = (ball.p_at(t2) - corner).norm() * h2;
        let m = 200_000;
        let dt = (t2 - t1) / m as f64;
        let arc: f64 = (0..m)
            .map(|j| {
                let jet = ball.support().eval(t1 + (j as f64 + 0.5) * dt);
                jet.a * (jet.a + jet.d2) * dt
            })
            .sum();
        assert!((tc.l1 - l1).abs() < 1e-12);
        assert!((tc.l2 - l2).abs() < 1e-12);
        assert!((tc.l_arc - arc).abs() < 1e-9);
        assert!(tc.delta > 0.0);
        assert!((tc.delta - (l1 + l2 - arc)).abs() < 1e-9);
    }
}
