//! Isoperimetric certificates: Bonnesen's inequality, the functional `E` on
//! centrally symmetric curves, its extension `F` through area-bisecting
//! chords, and the Gage inequality `(1 − F)∮k² ds ≥ A(P) L_Q / A`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::curve::ConvexCurve;
use crate::error::{Error, Result};
use crate::spectral::TrigSeries;
use crate::{bracket, Vec2};

/// Symmetry tolerance relative to `L_Q`.
pub const TOL_SYM: f64 = 1e-8;

/// Bonnesen function `g(r) = r L_Q − A − A(P) r²`.
pub fn bonnesen(curve: &ConvexCurve, r: f64) -> f64 {
    r * curve.length() - curve.area() - curve.ball().area() * r * r
}

/// `g(r)` together with whether `r` lies in `[r_in, r_out]`, the range where
/// `g >= 0` is guaranteed.
pub fn bonnesen_in_range(curve: &ConvexCurve, r: f64, radii: (f64, f64)) -> (f64, bool) {
    let slack = 1e-12 * radii.1;
    (bonnesen(curve, r), r >= radii.0 - slack && r <= radii.1 + slack)
}

/// `E = 1 + A(P) r_in r_out / A − 2A(P)(r_in + r_out) / L_Q`.
pub fn e_formula(area_p: f64, length: f64, area: f64, r_in: f64, r_out: f64) -> f64 {
    1.0 + area_p * r_in * r_out / area - 2.0 * area_p * (r_in + r_out) / length
}

/// Check central symmetry about the centroid.
pub fn check_symmetric(curve: &ConvexCurve) -> Result<()> {
    let deviation = curve.symmetry_defect();
    let allowed = TOL_SYM * curve.length();
    if deviation > allowed {
        return Err(Error::NotSymmetric { deviation, allowed });
    }
    Ok(())
}

/// Functional `E` of a centrally symmetric curve, with `r_in`, `r_out` the
/// extremes of the support function about the centre.
pub fn functional_e(curve: &ConvexCurve) -> Result<f64> {
    check_symmetric(curve)?;
    let (r_in, r_out) = centered_radii(curve);
    Ok(e_formula(curve.ball().area(), curve.length(), curve.area(), r_in, r_out))
}

/// Minimum and maximum of the support function about the centroid.
pub fn centered_radii(curve: &ConvexCurve) -> (f64, f64) {
    let h = curve.ball().grid().spacing();
    let n = curve.len();
    let f = curve.support();
    let series = TrigSeries::from_samples(f);
    let pts: Vec<(f64, f64)> = (0..=n + 1).map(|j| ((j as f64 - 1.0) * h, f[(j + n - 1) % n])).collect();
    interval_extremes(&pts, &series)
}

/// Extremes of samples of `series` at increasing abscissae. The discrete
/// extremum is polished by Newton's method on the interpolant, kept inside
/// the neighbouring abscissae; both ends are polished inward as well. Every
/// polished value is a value of the interpolant on the interval.
fn interval_extremes(pts: &[(f64, f64)], series: &TrigSeries) -> (f64, f64) {
    let m = pts.len();
    let (mut imin, mut imax) = (0, 0);
    for i in 1..m {
        if pts[i].1 < pts[imin].1 {
            imin = i;
        }
        if pts[i].1 > pts[imax].1 {
            imax = i;
        }
    }
    let polish = |i: usize| -> f64 {
        let (lo, hi) = (pts[i.saturating_sub(1)].0, pts[(i + 1).min(m - 1)].0);
        newton_extremum(series, pts[i].0, lo, hi).unwrap_or(pts[i].1)
    };
    // An extremum just inside either end can hide behind an equal end value.
    let refine = |i: usize, lower: bool| -> f64 {
        let values = [i, 0, m - 1].map(polish);
        if lower {
            values.into_iter().fold(pts[i].1, f64::min)
        } else {
            values.into_iter().fold(pts[i].1, f64::max)
        }
    };
    (refine(imin, true), refine(imax, false))
}

/// Critical value of `series` reached by Newton's method from `x` without
/// leaving `(lo, hi)`.
fn newton_extremum(series: &TrigSeries, mut x: f64, lo: f64, hi: f64) -> Option<f64> {
    for _ in 0..12 {
        let (_, d1, d2) = series.eval_with_derivatives(x);
        if d2 == 0.0 {
            return None;
        }
        let step = d1 / d2;
        x -= step;
        if !(x > lo && x < hi) {
            return None;
        }
        if step.abs() <= 1e-14 * (1.0 + x.abs()) {
            break;
        }
    }
    Some(series.eval(x))
}

/// One area-bisecting chord `γ(θ) γ(θ+π)` and the weighted `E` of the two
/// symmetrized halves.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChordEvaluation {
    pub theta: f64,
    pub l1: f64,
    pub l2: f64,
    pub a1: f64,
    pub a2: f64,
    pub e1: f64,
    pub e2: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChordFunctional {
    /// `F`, the maximum of `value` over all chords found.
    pub value: f64,
    pub chords: Vec<ChordEvaluation>,
    /// `h` has a near-zero local minimum without a sign change, so a chord
    /// may have been missed between grid nodes.
    pub tangency_suspected: bool,
}

/// Piece-area function and its ingredients as trigonometric interpolants.
struct ChordGeometry<'a> {
    curve: &'a ConvexCurve,
    vx: TrigSeries,
    vy: TrigSeries,
    half_bracket: TrigSeries,
    lambda: TrigSeries,
    /// Support function about the centroid and the components of `q`.
    support: TrigSeries,
    qx: TrigSeries,
    qy: TrigSeries,
    cumulative: Vec<f64>,
    arclength: Vec<f64>,
    area: f64,
}

struct Endpoint {
    gamma: Vec2,
    g: f64,
    s: f64,
    q: Vec2,
}

impl<'a> ChordGeometry<'a> {
    fn new(curve: &'a ConvexCurve) -> Self {
        let c = curve.centroid();
        let vel = curve.velocity();
        let vx = TrigSeries::from_samples(&vel.iter().map(|v| v.x).collect::<Vec<_>>());
        let vy = TrigSeries::from_samples(&vel.iter().map(|v| v.y).collect::<Vec<_>>());
        let integrand: Vec<f64> = curve
            .vertices()
            .iter()
            .zip(vel)
            .map(|(g, v)| 0.5 * bracket(g - c, *v))
            .collect();
        let half_bracket = TrigSeries::from_samples(&integrand);
        let lambda = TrigSeries::from_samples(curve.lambda());
        let cumulative = half_bracket.cumulative_at_nodes();
        let arclength = lambda.cumulative_at_nodes();
        let area = half_bracket.integral_from_zero(2.0 * PI);
        let q = curve.ball().q();
        let support = TrigSeries::from_samples(curve.support());
        let qx = TrigSeries::from_samples(&q.iter().map(|q| q.x).collect::<Vec<_>>());
        let qy = TrigSeries::from_samples(&q.iter().map(|q| q.y).collect::<Vec<_>>());
        Self {
            curve,
            vx,
            vy,
            half_bracket,
            lambda,
            support,
            qx,
            qy,
            cumulative,
            arclength,
            area,
        }
    }

    fn at_node(&self, i: usize) -> Endpoint {
        Endpoint {
            gamma: self.curve.vertices()[i],
            g: self.cumulative[i],
            s: self.arclength[i],
            q: self.curve.ball().q()[i],
        }
    }

    fn at(&self, t: f64) -> Endpoint {
        let rel = Vec2::new(self.vx.integral_from_zero(t), self.vy.integral_from_zero(t));
        Endpoint {
            gamma: self.curve.base() + rel,
            g: self.half_bracket.integral_from_zero(t),
            s: self.lambda.integral_from_zero(t),
            q: self.curve.ball().q_at(t),
        }
    }

    fn piece_area(&self, e0: &Endpoint, e1: &Endpoint) -> f64 {
        let c = self.curve.centroid();
        e1.g - e0.g + 0.5 * bracket(e1.gamma - c, e0.gamma - c)
    }

    fn h(&self, t: f64) -> f64 {
        self.piece_area(&self.at(t), &self.at(t + PI)) - 0.5 * self.area
    }
}

/// Functional `F`: maximum over area-bisecting chords with parallel end
/// tangents of `(L1/L_Q) E(γ1*) + (L2/L_Q) E(γ2*)`, where `γi*` is the half
/// `γi` completed by its reflection through the chord midpoint.
pub fn functional_f(curve: &ConvexCurve) -> Result<ChordFunctional> {
    let geo = ChordGeometry::new(curve);
    let n = curve.len();
    let half = n / 2;
    let h_grid = curve.ball().grid().spacing();
    let root_tol = 1e-10 * geo.area;

    let hv: Vec<f64> = (0..=half)
        .map(|i| geo.piece_area(&geo.at_node(i), &geo.at_node((i + half) % n)) - 0.5 * geo.area)
        .collect();

    let mut chords = Vec::new();
    let mut tangency_suspected = false;
    for i in 0..half {
        if hv[i].abs() <= root_tol {
            chords.push(evaluate_chord(&geo, i as f64 * h_grid, geo.at_node(i), geo.at_node(i + half)));
            continue;
        }
        let j = i + 1;
        if hv[j].abs() > root_tol && hv[i].signum() != hv[j].signum() {
            let (mut lo, mut hi) = (i as f64 * h_grid, j as f64 * h_grid);
            let lo_sign = hv[i].signum();
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if geo.h(mid).signum() == lo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t = 0.5 * (lo + hi);
            chords.push(evaluate_chord(&geo, t, geo.at(t), geo.at(t + PI)));
        }
        if i > 0 {
            let (l, c, r) = (hv[i - 1], hv[i], hv[i + 1]);
            let local_min = c.abs() <= l.abs() && c.abs() <= r.abs();
            let crossing = l.signum() != c.signum() || r.signum() != c.signum();
            if local_min && !crossing && c.abs() <= 1e-6 * geo.area {
                tangency_suspected = true;
            }
        }
    }

    let value = chords
        .iter()
        .map(|c| c.value)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
        .ok_or(Error::NoBisectingChord)?;
    Ok(ChordFunctional {
        value,
        chords,
        tangency_suspected,
    })
}

fn evaluate_chord(geo: &ChordGeometry, t0: f64, e0: Endpoint, e1: Endpoint) -> ChordEvaluation {
    let curve = geo.curve;
    let ball = curve.ball();
    let t1 = t0 + PI;
    let mid = 0.5 * (e0.gamma + e1.gamma);
    let shift = curve.centroid() - mid;
    let a1 = geo.piece_area(&e0, &e1);
    let a2 = geo.area - a1;
    let l1 = e1.s - e0.s;
    let l2 = curve.length() - l1;

    // Support about the midpoint: f_m = f_centroid + [centroid − m, q].
    let f = curve.support();
    let q = ball.q();
    let series = geo.support.combine(1.0, &geo.qy, shift.x).combine(1.0, &geo.qx, -shift.y);
    let node_value = |j: usize| f[j] + bracket(shift, q[j]);
    let end0 = (t0, bracket(e0.gamma - mid, e0.q));
    let end1 = (t1, bracket(e1.gamma - mid, e1.q));
    let theta = ball.theta();
    let eps = 1e-12;

    let mut first = vec![end0];
    first.extend((0..curve.len()).filter(|&j| theta[j] > t0 + eps && theta[j] < t1 - eps).map(|j| (theta[j], node_value(j))));
    first.push(end1);

    let mut second = vec![end1];
    second.extend((0..curve.len()).filter(|&j| theta[j] > t1 + eps).map(|j| (theta[j], node_value(j))));
    second.extend(
        (0..curve.len())
            .filter(|&j| theta[j] + 2.0 * PI < t0 + 2.0 * PI - eps)
            .map(|j| (theta[j] + 2.0 * PI, node_value(j))),
    );
    second.push((t0 + 2.0 * PI, end0.1));

    let area_p = ball.area();
    let (rin1, rout1) = interval_extremes(&first, &series);
    let (rin2, rout2) = interval_extremes(&second, &series);
    let e1v = e_formula(area_p, 2.0 * l1, 2.0 * a1, rin1, rout1);
    let e2v = e_formula(area_p, 2.0 * l2, 2.0 * a2, rin2, rout2);
    let value = (l1 * e1v + l2 * e2v) / curve.length();
    ChordEvaluation {
        theta: t0,
        l1,
        l2,
        a1,
        a2,
        e1: e1v,
        e2: e2v,
        value,
    }
}

/// Certificate of every isoperimetric inequality for one curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsoReport {
    pub iso_ratio: f64,
    /// `L_Q²/A − 4A(P)`.
    pub iso_slack: f64,
    pub r_in: f64,
    pub r_out: f64,
    pub bonnesen_g_at_rin: f64,
    pub bonnesen_g_at_rout: f64,
    /// Present only for centrally symmetric curves.
    pub e_value: Option<f64>,
    pub f_value: f64,
    pub k2_integral: f64,
    /// `∮k² ds − A(P) L_Q / A`.
    pub gage_slack: f64,
    /// `(1 − F)∮k² ds − A(P) L_Q / A`.
    pub refined_gage_slack: f64,
    pub tangency_suspected: bool,
}

impl IsoReport {
    /// Every slack that must be non-negative.
    pub fn slacks(&self) -> [(&'static str, f64); 7] {
        [
            ("iso_slack", self.iso_slack),
            ("bonnesen_g_at_rin", self.bonnesen_g_at_rin),
            ("bonnesen_g_at_rout", self.bonnesen_g_at_rout),
            ("e_value", self.e_value.unwrap_or(0.0)),
            ("f_value", self.f_value),
            ("gage_slack", self.gage_slack),
            ("refined_gage_slack", self.refined_gage_slack),
        ]
    }

    /// Names of slacks below `−tol`.
    pub fn violations(&self, tol: f64) -> Vec<&'static str> {
        self.slacks().iter().filter(|(_, v)| !(*v >= -tol)).map(|(n, _)| *n).collect()
    }
}

pub fn gage_check(curve: &ConvexCurve) -> Result<IsoReport> {
    let area_p = curve.ball().area();
    let (r_in, r_out) = curve.radii_best_effort();
    let e_value = functional_e(curve).ok();
    let chord = functional_f(curve)?;
    let k2 = curve.k2_integral();
    let ratio = area_p * curve.length() / curve.area();
    Ok(IsoReport {
        iso_ratio: curve.iso_ratio(),
        iso_slack: curve.iso_ratio() - 4.0 * area_p,
        r_in,
        r_out,
        bonnesen_g_at_rin: bonnesen(curve, r_in),
        bonnesen_g_at_rout: bonnesen(curve, r_out),
        e_value,
        f_value: chord.value,
        k2_integral: k2,
        gage_slack: k2 - ratio,
        refined_gage_slack: (1.0 - chord.value) * k2 - ratio,
        tangency_suspected: chord.tangency_suspected,
    })
}

/// `(L_Q², ∮f² ds · ∮k² ds)` with `f` about the centroid; the first never
/// exceeds the second.
pub fn cauchy_schwarz_chain(curve: &ConvexCurve) -> (f64, f64) {
    let f2 = curve.integrate_ds(curve.support().iter().map(|f| f * f));
    (curve.length().powi(2), f2 * curve.k2_integral())
}

/// `L_Q A (1 − E) − A(P) ∮f² ds` for a symmetric curve; non-negative.
pub fn e_energy_slack(curve: &ConvexCurve) -> Result<f64> {
    let e = functional_e(curve)?;
    let f2 = curve.integrate_ds(curve.support().iter().map(|f| f * f));
    Ok(curve.length() * curve.area() * (1.0 - e) - curve.ball().area() * f2)
}
