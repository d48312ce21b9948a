//! Randomized invariants of balls, curves and the isoperimetric functionals.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use minkflow::curve::{curvature_from_vertices, sliding_window_max_of_min};
use minkflow::isoperimetry::{
    bonnesen, cauchy_schwarz_chain, e_energy_slack, functional_f, gage_check,
};
use minkflow::{bracket, AngleGrid, ConvexCurve, SupportFunction, UnitBall, Vec2};
use proptest::prelude::*;

fn five_point(f: impl Fn(f64) -> Vec2, t: f64) -> Vec2 {
    let d = 1e-3;
    (f(t - 2.0 * d) - 8.0 * f(t - d) + 8.0 * f(t + d) - f(t + 2.0 * d)) / (12.0 * d)
}

/// Support functions with `a + a'' >= 1 − 3|c2| − 15|c4| − 3|s2| − 15|s4| > 0`.
fn arb_support() -> impl Strategy<Value = SupportFunction> {
    (-0.08..0.08f64, -0.05..0.05f64, -0.015..0.015f64, -0.01..0.01f64).prop_map(|(c2, s2, c4, s4)| {
        SupportFunction::new(&[(0, 1.0, 0.0), (2, c2, s2), (4, c4, s4)]).unwrap()
    })
}

fn arb_ball(n: usize) -> impl Strategy<Value = Arc<UnitBall>> {
    arb_support().prop_map(move |sf| Arc::new(UnitBall::new(sf, AngleGrid::new(n).unwrap()).unwrap()))
}

/// Radius-of-curvature modes `(order, cos, sin)` relative to a mean of 1,
/// without first harmonic. Amplitudes sum below 0.6.
fn arb_rho_modes(orders: &'static [usize]) -> impl Strategy<Value = Vec<(usize, f64, f64)>> {
    let per = 0.3 / orders.len() as f64;
    proptest::collection::vec((-per..per, -per..per), orders.len())
        .prop_map(move |cs| orders.iter().zip(cs).map(|(&m, (c, s))| (m, c, s)).collect())
}

fn curve_from(ball: Arc<UnitBall>, scale: f64, modes: &[(usize, f64, f64)], base: Vec2) -> ConvexCurve {
    let rho: Vec<f64> = ball
        .theta()
        .iter()
        .map(|&t| {
            scale
                * (1.0
                    + modes
                        .iter()
                        .map(|&(m, c, s)| c * (m as f64 * t).cos() + s * (m as f64 * t).sin())
                        .sum::<f64>())
        })
        .collect();
    ConvexCurve::from_radius_of_curvature(ball, &rho, base).unwrap()
}

fn arb_curve(n: usize) -> impl Strategy<Value = ConvexCurve> {
    (arb_ball(n), 0.3..3.0f64, arb_rho_modes(&[2, 3, 4, 5]), -3.0..3.0f64, -3.0..3.0f64)
        .prop_map(|(ball, scale, modes, x, y)| curve_from(ball, scale, &modes, Vec2::new(x, y)))
}

fn arb_symmetric_curve(n: usize) -> impl Strategy<Value = ConvexCurve> {
    (arb_ball(n), 0.3..3.0f64, arb_rho_modes(&[2, 4, 6]), -3.0..3.0f64, -3.0..3.0f64)
        .prop_map(|(ball, scale, modes, x, y)| curve_from(ball, scale, &modes, Vec2::new(x, y)))
}

fn euclidean_ball(n: usize) -> Arc<UnitBall> {
    Arc::new(UnitBall::new(SupportFunction::euclidean(), AngleGrid::new(n).unwrap()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn minkowski_norm_is_a_norm(
        sf in arb_support(),
        u in (-5.0..5.0f64, -5.0..5.0f64),
        v in (-5.0..5.0f64, -5.0..5.0f64),
        s in 0.0..4.0f64,
    ) {
        let ball = UnitBall::new(sf, AngleGrid::new(64).unwrap()).unwrap();
        let (u, v) = (Vec2::new(u.0, u.1), Vec2::new(v.0, v.1));
        let (nu, nv, nuv) = (ball.minkowski_norm(u), ball.minkowski_norm(v), ball.minkowski_norm(u + v));
        prop_assert!(nuv <= nu + nv + 1e-10 * (1.0 + nu + nv));
        prop_assert!((ball.minkowski_norm(-u) - nu).abs() <= 1e-10 * (1.0 + nu));
        prop_assert!((ball.minkowski_norm(s * u) - s * nu).abs() <= 1e-10 * (1.0 + s * nu));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tangent_chord_deficit_is_positive(sf in arb_support(), t1 in 0.0..TAU, gap in 1e-3..(PI - 1e-3)) {
        let ball = UnitBall::new(sf, AngleGrid::new(64).unwrap()).unwrap();
        let chord = ball.tangent_chord(t1, t1 + gap).unwrap();
        prop_assert!(chord.delta > 0.0, "delta {}", chord.delta);
    }

    #[test]
    fn ball_brackets_and_duality(ball in arb_ball(128)) {
        for i in (0..ball.len()).step_by(7) {
            let t = ball.theta()[i];
            let dp = five_point(|s| ball.p_at(s), t);
            let dq = five_point(|s| ball.q_at(s), t);
            let pp = bracket(ball.p()[i], dp);
            let qq = bracket(ball.q()[i], dq);
            prop_assert!((pp - ball.bracket_pp()[i]).abs() <= 1e-10 * ball.bracket_pp()[i]);
            prop_assert!((qq - ball.bracket_qq()[i]).abs() <= 1e-10 * ball.bracket_qq()[i]);
            let a = ball.a()[i];
            prop_assert!((ball.p()[i] + a * a * dq).norm() <= 1e-8 * ball.p()[i].norm());
        }
    }

    #[test]
    fn ball_area_is_grid_independent(sf in arb_support()) {
        let a1 = UnitBall::new(sf.clone(), AngleGrid::new(64).unwrap()).unwrap().area();
        let a2 = UnitBall::new(sf, AngleGrid::new(128).unwrap()).unwrap().area();
        prop_assert!((a1 - a2).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn identities_and_curve_inequalities(curve in arb_curve(256)) {
        let ball = curve.ball().clone();
        let (ia, ib, ic) = curve.prop1_identities();
        prop_assert!(ia.abs() <= 1e-8 && ib.abs() <= 1e-8 && ic.abs() <= 1e-8, "{ia} {ib} {ic}");
        let interior = curve.centroid() + 0.1 * curve.metrics().r_in * Vec2::new(0.6, -0.8);
        let (_, ib2, ic2) = curve.prop1_identities_about(interior);
        prop_assert!(ib2.abs() <= 1e-8 && ic2.abs() <= 1e-8);

        let m = curve.metrics();
        prop_assert!(m.length > 0.0 && m.area > 0.0);
        prop_assert!(m.iso_ratio >= 4.0 * ball.area() - 1e-8);
        prop_assert!(m.r_in <= m.r_out);
        prop_assert!(m.mu0 <= m.r_in + 1e-6, "mu0 {} r_in {}", m.mu0, m.r_in);
        prop_assert!(m.k_min <= m.k_star && m.k_star <= m.k_max);
        prop_assert!(m.k_star <= ball.median_curvature_constant() * m.length / m.area + 1e-8);
        for r in [m.r_in, 0.5 * (m.r_in + m.r_out), m.r_out] {
            prop_assert!(bonnesen(&curve, r) >= -1e-8, "g({r}) = {}", bonnesen(&curve, r));
        }

        let (l2, product) = cauchy_schwarz_chain(&curve);
        prop_assert!(l2 <= product + 1e-10 * product);

        let report = gage_check(&curve).unwrap();
        prop_assert!(report.gage_slack >= report.refined_gage_slack);
        prop_assert!(report.violations(1e-8).is_empty(), "{report:?}");
    }

    #[test]
    fn symmetric_curves_satisfy_energy_bound(curve in arb_symmetric_curve(256)) {
        prop_assert!(e_energy_slack(&curve).unwrap() >= -1e-8);
        let (r_in, r_out) = curve.inscribed_circumscribed().unwrap();
        let f = curve.support();
        let fmin = f.iter().copied().fold(f64::INFINITY, f64::min);
        let fmax = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(r_in >= fmin - 1e-6 && r_out <= fmax + 1e-6);
        let report = gage_check(&curve).unwrap();
        let e = report.e_value.unwrap();
        prop_assert!(e >= -1e-8);
        prop_assert!((report.f_value - e).abs() <= 1e-9, "F {} E {e}", report.f_value);
    }

    #[test]
    fn f_is_the_supremum_over_chords(curve in arb_curve(128), mask in proptest::collection::vec(any::<bool>(), 64)) {
        let f = functional_f(&curve).unwrap();
        prop_assert!(f.value >= -1e-8);
        let subset = f
            .chords
            .iter()
            .zip(mask.iter().cycle())
            .filter(|(_, keep)| **keep)
            .map(|(c, _)| c.value)
            .fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(subset <= f.value);
    }

    #[test]
    fn curvature_round_trip(ball in arb_ball(512), modes in arb_rho_modes(&[2, 3, 4, 6]), scale in 0.5..2.0f64) {
        let curve = curve_from(ball.clone(), scale, &modes, Vec2::new(0.5, -1.0));
        let back = curvature_from_vertices(&ball, curve.vertices());
        let err = back.iter().zip(curve.curvature()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-8, "round trip error {err}");
    }

    #[test]
    fn sliding_window_matches_brute_force(x in proptest::collection::vec(0.1..5.0f64, 16..80)) {
        let n = x.len() & !1;
        let x = &x[..n];
        let w = n / 2 + 1;
        let brute = (0..n)
            .map(|s| (0..w).map(|j| x[(s + j) % n]).fold(f64::INFINITY, f64::min))
            .fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(sliding_window_max_of_min(x, w), brute);
    }
}

#[test]
fn isoperimetric_equality_only_for_constant_curvature() {
    let ball = euclidean_ball(256);
    let circle = ConvexCurve::from_curvature(ball.clone(), vec![0.7; 256], Vec2::zeros()).unwrap();
    assert!((circle.iso_ratio() - 4.0 * ball.area()).abs() <= 1e-8);
    let ellipse = ConvexCurve::ellipse(ball.clone(), 1.0, 2.0, Vec2::zeros()).unwrap();
    assert!(ellipse.iso_ratio() > 4.0 * ball.area() + 1e-3);
}
