//! Invariants of complete flow runs.

use std::sync::Arc;

use minkflow::acceptance::{four_lobed, ELLIPTIC_BALL};
use minkflow::flow::{evolution_residuals, run_flow, step_with_dt, stable_dt, EvolutionResiduals};
use minkflow::{AngleGrid, ConvexCurve, Error, FlowOutcome, FlowRun, FlowState, SolverConfig, SupportFunction, UnitBall, Vec2};

fn ball(harmonics: &[(usize, f64, f64)], n: usize) -> Arc<UnitBall> {
    Arc::new(UnitBall::new(SupportFunction::new(harmonics).unwrap(), AngleGrid::new(n).unwrap()).unwrap())
}

fn quiet(area_fraction: f64) -> SolverConfig {
    SolverConfig {
        area_fraction,
        certify_snapshots: false,
        ..SolverConfig::default()
    }
}

fn elliptic_run(n: usize, area_fraction: f64) -> FlowRun {
    let b = ball(&ELLIPTIC_BALL, n);
    let k0 = four_lobed(&b);
    let cfg = quiet(area_fraction);
    run_flow(FlowState::new(b, k0, Vec2::zeros(), cfg.tol_close).unwrap(), &cfg).unwrap()
}

/// Largest `dW/dt` residual once `t >= 0.1 t_V`.
fn late_w_residual(run: &FlowRun, res: &EvolutionResiduals) -> f64 {
    run.snapshots[1..run.snapshots.len() - 1]
        .iter()
        .zip(&res.w_vs_j)
        .filter(|(s, _)| s.t >= 0.1 * run.t_v_est)
        .map(|(_, r)| *r)
        .fold(0.0, f64::max)
}

#[test]
fn euclidean_circle_satisfies_every_evolution_law() {
    let b = ball(&[(0, 1.0, 0.0)], 128);
    // Snapshot spacing sets the difference-quotient error.
    let cfg = SolverConfig {
        snapshot_every: 1,
        ..quiet(0.05)
    };
    let run = run_flow(FlowState::new(b.clone(), vec![1.0; 128], Vec2::new(1.0, 0.0), cfg.tol_close).unwrap(), &cfg).unwrap();
    assert_eq!(run.outcome, FlowOutcome::AreaThreshold);
    let res = evolution_residuals(&run.snapshots, b.area());
    for (name, v) in [
        ("area", res.max_area()),
        ("length", res.max_length()),
        ("iso", res.max_iso()),
    ] {
        assert!(v <= 1e-6, "{name} residual {v}");
    }
}

#[test]
fn p_circle_vanishes_at_half_unit_time() {
    let b = ball(&ELLIPTIC_BALL, 256);
    let cfg = quiet(0.01);
    let run = run_flow(FlowState::new(b.clone(), vec![1.0; 256], Vec2::zeros(), cfg.tol_close).unwrap(), &cfg).unwrap();
    assert!((run.t_v_est - 0.5).abs() <= 1e-4, "t_V {}", run.t_v_est);
    for s in &run.snapshots {
        let r = (1.0 - 2.0 * s.t).sqrt();
        assert!(s.k.iter().all(|k| (k * r - 1.0).abs() <= 1e-8), "t {}", s.t);
        assert!(s.hausdorff <= 1e-8);
    }
}

#[test]
fn initial_frame_is_the_curve_from_curvature() {
    let b = ball(&ELLIPTIC_BALL, 256);
    let k0 = four_lobed(&b);
    let origin = Vec2::new(0.4, -1.1);
    let state = FlowState::new(b.clone(), k0.clone(), origin, 1e-6).unwrap();
    let direct = ConvexCurve::from_curvature(b, k0, origin).unwrap();
    assert_eq!(state.reconstruct_frame(), direct.vertices());
}

#[test]
fn long_run_invariants() {
    let run = elliptic_run(256, 0.01);
    assert_eq!(run.outcome, FlowOutcome::AreaThreshold);
    let snaps = &run.snapshots;

    let last = snaps.last().unwrap();
    assert!(last.hausdorff <= 2e-2, "final Hausdorff {}", last.hausdorff);
    let half = snaps.len() / 2;
    assert!(snaps[half..].windows(2).all(|w| w[1].hausdorff <= w[0].hausdorff));

    for s in snaps {
        assert!(s.k_star <= s.k_star_bound + 1e-8, "t {}: k* {} > {}", s.t, s.k_star, s.k_star_bound);
        assert!(s.k_min <= s.k_star && s.k_star <= s.k_max);
        assert!(s.gage_liminf >= -1e-8, "t {}: {}", s.t, s.gage_liminf);
        assert!(s.r_sin.abs().max(s.r_cos.abs()) <= 1e-6 * s.length);
    }
    for w in snaps.windows(2) {
        assert!(w[1].area < w[0].area);
        assert!(w[1].length < w[0].length);
        assert!(w[1].iso_ratio <= w[0].iso_ratio + 1e-10);
        assert!(w[1].j >= w[0].j - 1e-8 * (1.0 + w[0].j.abs()));
    }
}

#[test]
fn entropy_rate_matches_j_after_the_transient() {
    let coarse = elliptic_run(256, 0.3);
    let fine = elliptic_run(512, 0.3);
    let area_p = coarse.final_state.ball().area();
    let rc = late_w_residual(&coarse, &evolution_residuals(&coarse.snapshots, area_p));
    let rf = late_w_residual(&fine, &evolution_residuals(&fine.snapshots, area_p));
    assert!(rc <= 1e-3, "coarse residual {rc}");
    assert!(rf < rc, "fine {rf} vs coarse {rc}");
}

#[test]
fn runs_are_deterministic() {
    let cfg = SolverConfig {
        max_steps: 400,
        snapshot_every: 25,
        ..SolverConfig::default()
    };
    let go = || {
        let b = ball(&ELLIPTIC_BALL, 128);
        let k0 = four_lobed(&b);
        run_flow(FlowState::new(b, k0, Vec2::zeros(), cfg.tol_close).unwrap(), &cfg).unwrap()
    };
    let (a, b) = (go(), go());
    assert_eq!(a.outcome, FlowOutcome::MaxSteps);
    assert_eq!(a.snapshots.len(), b.snapshots.len());
    for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
        assert_eq!(x.t.to_bits(), y.t.to_bits());
        assert_eq!(x.k, y.k);
        assert_eq!(x.base, y.base);
        assert_eq!(x.iso, y.iso);
    }
}

#[test]
fn oversized_step_is_rejected() {
    let b = ball(&ELLIPTIC_BALL, 128);
    let k0 = four_lobed(&b);
    let cfg = SolverConfig::default();
    let state = FlowState::new(b.clone(), k0, Vec2::zeros(), cfg.tol_close).unwrap();
    let dt = 50.0 * stable_dt(&b, state.k(), 1.0);
    assert!(matches!(step_with_dt(&state, dt, &cfg), Err(Error::StepRejected { .. })));
    assert!(step_with_dt(&state, stable_dt(&b, state.k(), 0.5), &cfg).is_ok());
}
