//! End-to-end acceptance checks A1–A9.
//!
//! Each check returns a [`CriterionResult`] with the measured quantities
//! next to their tolerances. Flow runs shared by several checks are computed
//! once per [`Suite`].

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curve::ConvexCurve;
use crate::error::Result;
use crate::flow::{evolution_residuals, frame_velocity_error, run_flow, FlowRun, FlowState, SolverConfig};
use crate::isoperimetry::{bonnesen, functional_f};
use crate::offset::{area_from_offsets, inner_parallel, parallel_length_law};
use crate::{AngleGrid, SupportFunction, UnitBall, Vec2};

#[derive(Clone, Copy, Debug, Default)]
pub struct AcceptanceOptions {
    /// Replace every grid size `N` (and `2N` where a refinement is run).
    pub grid_override: Option<usize>,
    /// Added to the cached `A(P)` of the balls used by the identity and
    /// inequality suites.
    pub area_tamper: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    /// `A1 PASS  Euclidean reduction  (details)`.
    pub fn line(&self) -> String {
        format!(
            "{} {:<4} {:<28} {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// A measured value against a bound.
struct Check {
    parts: Vec<String>,
    passed: bool,
}

impl Check {
    fn new() -> Self {
        Self {
            parts: Vec::new(),
            passed: true,
        }
    }

    fn at_most(&mut self, label: &str, value: f64, bound: f64) {
        self.passed &= value <= bound;
        self.parts.push(format!("{label}={value:.4e}<={bound:e}"));
    }

    fn at_least(&mut self, label: &str, value: f64, bound: f64) {
        self.passed &= value >= bound;
        self.parts.push(format!("{label}={value:.4e}>={bound:e}"));
    }

    fn fail(&mut self, msg: String) {
        self.passed = false;
        self.parts.push(msg);
    }

    fn finish(self, id: &'static str, name: &'static str) -> CriterionResult {
        CriterionResult {
            id,
            name,
            passed: self.passed,
            detail: self.parts.join(" "),
        }
    }
}

fn ball_from(harmonics: &[(usize, f64, f64)], n: usize) -> Result<Arc<UnitBall>> {
    let sf = SupportFunction::new(harmonics)?;
    Ok(Arc::new(UnitBall::new(sf, AngleGrid::new(n)?)?))
}

/// `a = 1 + 0.2 cos 2θ`.
pub const ELLIPTIC_BALL: [(usize, f64, f64); 2] = [(0, 1.0, 0.0), (2, 0.2, 0.0)];

/// `k0 = 1 + 0.3 cos 4θ` sampled on the ball's grid.
pub fn four_lobed(ball: &UnitBall) -> Vec<f64> {
    ball.theta().iter().map(|t| 1.0 + 0.3 * (4.0 * t).cos()).collect()
}

/// Lazily computed flow runs shared between criteria.
pub struct Suite {
    opts: AcceptanceOptions,
    euclid: OnceLock<std::result::Result<(FlowRun, Duration), String>>,
    main: OnceLock<std::result::Result<FlowRun, String>>,
    fine: OnceLock<std::result::Result<FlowRun, String>>,
    curves: OnceLock<std::result::Result<Vec<ConvexCurve>, String>>,
}

impl Suite {
    pub fn new(opts: AcceptanceOptions) -> Self {
        Self {
            opts,
            euclid: OnceLock::new(),
            main: OnceLock::new(),
            fine: OnceLock::new(),
            curves: OnceLock::new(),
        }
    }

    fn n(&self, default: usize) -> usize {
        self.opts.grid_override.unwrap_or(256) * default / 256
    }

    fn euclid(&self) -> std::result::Result<&(FlowRun, Duration), String> {
        self.euclid
            .get_or_init(|| {
                let start = Instant::now();
                let n = self.n(256);
                let ball = ball_from(&[(0, 1.0, 0.0)], n).map_err(|e| e.to_string())?;
                let cfg = SolverConfig {
                    sigma: 0.5,
                    area_fraction: 0.05,
                    snapshot_every: 50,
                    certify_snapshots: false,
                    ..SolverConfig::default()
                };
                let state = FlowState::new(ball, vec![1.0; n], Vec2::new(1.0, 0.0), cfg.tol_close)
                    .map_err(|e| e.to_string())?;
                let run = run_flow(state, &cfg).map_err(|e| e.to_string())?;
                Ok((run, start.elapsed()))
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn elliptic_run(&self, n: usize, certify: bool) -> std::result::Result<FlowRun, String> {
        let ball = ball_from(&ELLIPTIC_BALL, n).map_err(|e| e.to_string())?;
        let cfg = SolverConfig {
            sigma: 0.5,
            area_fraction: 0.01,
            snapshot_every: 50,
            certify_snapshots: certify,
            ..SolverConfig::default()
        };
        let k0 = four_lobed(&ball);
        let state = FlowState::new(ball, k0, Vec2::zeros(), cfg.tol_close).map_err(|e| e.to_string())?;
        run_flow(state, &cfg).map_err(|e| e.to_string())
    }

    /// `a = 1 + 0.2 cos 2θ`, `k0 = 1 + 0.3 cos 4θ`, `N = 256`, `ε_A = 0.01`.
    pub fn main_run(&self) -> std::result::Result<&FlowRun, String> {
        self.main
            .get_or_init(|| self.elliptic_run(self.n(256), true))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn fine_run(&self) -> std::result::Result<&FlowRun, String> {
        self.fine
            .get_or_init(|| self.elliptic_run(self.n(512), false))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Ten seeded random admissible curves over three balls at `N = 512`.
    pub fn random_curves(&self) -> std::result::Result<&Vec<ConvexCurve>, String> {
        self.curves
            .get_or_init(|| random_curves(self.n(512), self.opts.area_tamper).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn run_all(&self) -> Vec<CriterionResult> {
        vec![
            self.a1(),
            self.a2(),
            self.a3(),
            self.a4(),
            self.a5(),
            self.a6(),
            self.a7(),
            self.a8(),
            self.a9(),
        ]
    }

    pub fn a1(&self) -> CriterionResult {
        let (id, name) = ("A1", "Euclidean reduction");
        let mut c = Check::new();
        match self.euclid() {
            Err(e) => c.fail(e),
            Ok((run, elapsed)) => {
                let (mut area_err, mut k_err) = (0.0_f64, 0.0_f64);
                for s in &run.snapshots {
                    let exact_area = PI * (1.0 - 2.0 * s.t);
                    area_err = area_err.max((s.area - exact_area).abs() / exact_area);
                    let exact_k = 1.0 / (1.0 - 2.0 * s.t).sqrt();
                    k_err = s.k.iter().fold(k_err, |m, k| m.max((k - exact_k).abs()));
                }
                c.at_most("area_rel", area_err, 1e-5);
                c.at_most("k_err", k_err, 1e-6);
                c.at_most("|t_V-0.5|", (run.t_v_est - 0.5).abs(), 1e-5);
                c.at_most("seconds", elapsed.as_secs_f64(), 5.0);
                if !run.outcome.is_success() {
                    c.fail(format!("outcome {:?}", run.outcome));
                }
            }
        }
        c.finish(id, name)
    }

    pub fn a2(&self) -> CriterionResult {
        let (id, name) = ("A2", "area law");
        let mut c = Check::new();
        match self.main_run() {
            Err(e) => c.fail(e),
            Ok(run) => {
                let res = evolution_residuals(&run.snapshots, run.final_state.ball().area());
                if res.area.is_empty() {
                    c.fail("fewer than three snapshots".into());
                }
                c.at_most("dA/dt_rel", res.max_area(), 1e-4);
                if !run.outcome.is_success() {
                    c.fail(format!("outcome {:?}", run.outcome));
                }
            }
        }
        c.finish(id, name)
    }

    pub fn a3(&self) -> CriterionResult {
        let (id, name) = ("A3", "length law");
        let mut c = Check::new();
        match (self.main_run(), self.fine_run()) {
            (Err(e), _) | (_, Err(e)) => c.fail(e),
            (Ok(coarse), Ok(fine)) => {
                let rc = evolution_residuals(&coarse.snapshots, coarse.final_state.ball().area()).max_length();
                let rf = evolution_residuals(&fine.snapshots, fine.final_state.ball().area()).max_length();
                c.at_most("dL/dt_rel", rc, 1e-3);
                c.at_most("dL/dt_rel@2N", rf, 0.5 * rc);
                if !fine.outcome.is_success() {
                    c.fail(format!("2N outcome {:?}", fine.outcome));
                }
            }
        }
        c.finish(id, name)
    }

    pub fn a4(&self) -> CriterionResult {
        let (id, name) = ("A4", "isoperimetric convergence");
        let mut c = Check::new();
        match self.main_run() {
            Err(e) => c.fail(e),
            Ok(run) => {
                let four_ap = 4.0 * run.final_state.ball().area();
                let last = run.snapshots.last().expect("runs record their final state");
                c.at_most("max_step_increase", run.extremes.max_iso_increase, 1e-10);
                c.at_least("final/4A(P)", last.iso_ratio / four_ap, 1.0);
                c.at_most("final/4A(P)", last.iso_ratio / four_ap, 1.02);
            }
        }
        c.finish(id, name)
    }

    pub fn a5(&self) -> CriterionResult {
        let (id, name) = ("A5", "identity suite");
        let mut c = Check::new();
        match self.random_curves() {
            Err(e) => c.fail(e),
            Ok(curves) => {
                let (mut ia, mut ib, mut ic) = (0.0_f64, 0.0_f64, 0.0_f64);
                for curve in curves {
                    let r = curve.prop1_identities();
                    ia = ia.max(r.0.abs());
                    ib = ib.max(r.1.abs());
                    ic = ic.max(r.2.abs());
                }
                c.at_most("|I_a|", ia, 1e-8);
                c.at_most("|I_b|", ib, 1e-8);
                c.at_most("|I_c|", ic, 1e-8);
            }
        }
        c.finish(id, name)
    }

    pub fn a6(&self) -> CriterionResult {
        let (id, name) = ("A6", "inequality suite");
        let mut c = Check::new();
        let mut worst = Slacks::default();
        match self.random_curves() {
            Err(e) => c.fail(e),
            Ok(curves) => {
                for curve in curves {
                    match curve_slacks(curve) {
                        Ok(s) => worst = worst.min(&s),
                        Err(e) => c.fail(e.to_string()),
                    }
                }
            }
        }
        match self.main_run() {
            Err(e) => c.fail(e),
            Ok(run) => {
                for s in &run.snapshots {
                    match &s.iso {
                        Some(iso) => worst = worst.min(&Slacks {
                            iso: iso.iso_slack,
                            bonnesen: iso.bonnesen_g_at_rin.min(iso.bonnesen_g_at_rout),
                            gage: iso.refined_gage_slack,
                            median: s.k_star_bound - s.k_star,
                        }),
                        None => c.fail("snapshot without certificate".into()),
                    }
                }
            }
        }
        c.at_least("isop", worst.iso, -1e-8);
        c.at_least("bonnesen", worst.bonnesen, -1e-8);
        c.at_least("refined_gage", worst.gage, -1e-8);
        c.at_least("C*L/A-k*", worst.median, -1e-8);
        c.finish(id, name)
    }

    pub fn a7(&self) -> CriterionResult {
        let (id, name) = ("A7", "conservation/monotonicity");
        let mut c = Check::new();
        match self.main_run() {
            Err(e) => c.fail(e),
            Ok(run) => {
                c.at_most("closure/L", run.extremes.max_closure_ratio, 1e-6);
                let j_drop = run
                    .snapshots
                    .windows(2)
                    .map(|w| (w[0].j - w[1].j) / (1.0 + w[0].j.abs()))
                    .fold(f64::NEG_INFINITY, f64::max);
                c.at_most("J_drop", j_drop, 1e-8);
                let k0_min = run.snapshots[0].k_min;
                c.at_least("k_min-k_min(0)", run.extremes.min_k - k0_min, -1e-8);
            }
        }
        c.finish(id, name)
    }

    pub fn a8(&self) -> CriterionResult {
        let (id, name) = ("A8", "frame velocity");
        let mut c = Check::new();
        let outcome = (|| -> Result<Vec<(f64, f64, f64)>> {
            let n = self.n(256);
            let ball = ball_from(&ELLIPTIC_BALL, n)?;
            let cfg = SolverConfig {
                sigma: 0.25,
                ..SolverConfig::default()
            };
            let k0 = four_lobed(&ball);
            let mut state = FlowState::new(ball, k0, Vec2::zeros(), cfg.tol_close)?;
            let mut out = Vec::new();
            for _ in 0..3 {
                out.push(frame_velocity_error(&state, &cfg)?);
                for _ in 0..500 {
                    state = crate::flow::step(&state, &cfg)?.0;
                }
            }
            Ok(out)
        })();
        match outcome {
            Err(e) => c.fail(e.to_string()),
            Ok(samples) => {
                let worst = samples
                    .iter()
                    .map(|(_, central, dt)| central / dt)
                    .fold(0.0, f64::max);
                let forward = samples.iter().map(|(f, _, dt)| f / dt).fold(0.0, f64::max);
                c.at_most("err/dt", worst, 5.0);
                c.parts.push(format!("(forward err/dt={forward:.3e})"));
            }
        }
        c.finish(id, name)
    }

    pub fn a9(&self) -> CriterionResult {
        let (id, name) = ("A9", "offset laws");
        let mut c = Check::new();
        let outcome = (|| -> Result<(f64, f64)> {
            let ball = ball_from(&ELLIPTIC_BALL, self.n(256))?;
            let k = four_lobed(&ball);
            let curve = ConvexCurve::from_curvature(ball, k, Vec2::new(0.3, -0.2))?;
            let mu0 = 1.0 / curve.k_max();
            let mut law = 0.0_f64;
            for frac in [0.1, 0.5, 0.9] {
                let r = frac * mu0;
                law = law.max((inner_parallel(&curve, r)?.length() - parallel_length_law(&curve, r)).abs());
            }
            let integral = area_from_offsets(&curve, 16)?;
            Ok((law, (integral.total() - curve.area()).abs() / curve.area()))
        })();
        match outcome {
            Err(e) => c.fail(e.to_string()),
            Ok((law, area)) => {
                c.at_most("L(r)_err", law, 1e-8);
                c.at_most("area_rel", area, 1e-4);
            }
        }
        c.finish(id, name)
    }
}

#[derive(Clone, Copy, Debug)]
struct Slacks {
    iso: f64,
    bonnesen: f64,
    gage: f64,
    median: f64,
}

impl Default for Slacks {
    fn default() -> Self {
        Self {
            iso: f64::INFINITY,
            bonnesen: f64::INFINITY,
            gage: f64::INFINITY,
            median: f64::INFINITY,
        }
    }
}

impl Slacks {
    fn min(&self, o: &Slacks) -> Slacks {
        Slacks {
            iso: self.iso.min(o.iso),
            bonnesen: self.bonnesen.min(o.bonnesen),
            gage: self.gage.min(o.gage),
            median: self.median.min(o.median),
        }
    }
}

fn curve_slacks(curve: &ConvexCurve) -> Result<Slacks> {
    let ball = curve.ball();
    let (r_in, r_out) = curve.radii_best_effort();
    let f = functional_f(curve)?.value;
    let k2 = curve.k2_integral();
    let ratio = ball.area() * curve.length() / curve.area();
    Ok(Slacks {
        iso: curve.iso_ratio() - 4.0 * ball.area(),
        bonnesen: bonnesen(curve, r_in).min(bonnesen(curve, r_out)),
        gage: (1.0 - f) * k2 - ratio,
        median: ball.median_curvature_constant() * curve.length() / curve.area() - curve.median_curvature(),
    })
}

/// Balls used by the identity and inequality suites.
pub const SUITE_BALLS: [&[(usize, f64, f64)]; 3] = [
    &[(0, 1.0, 0.0)],
    &ELLIPTIC_BALL,
    &[(0, 1.0, 0.0), (2, 0.0, 0.08), (4, 0.03, 0.0)],
];

/// Random admissible curves: the Euclidean radius of curvature `ρ` is a
/// positive trigonometric polynomial without first harmonic and
/// `k = (a + a'')/ρ`.
pub fn random_curves(n: usize, area_tamper: f64) -> Result<Vec<ConvexCurve>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let balls: Vec<Arc<UnitBall>> = SUITE_BALLS
        .iter()
        .map(|h| {
            let ball = ball_from(h, n)?;
            Ok(if area_tamper != 0.0 {
                Arc::new((*ball).clone().with_tampered_area(area_tamper))
            } else {
                ball
            })
        })
        .collect::<Result<_>>()?;
    (0..10)
        .map(|i| {
            let ball = balls[i % balls.len()].clone();
            let rho0: f64 = rng.random_range(0.5..2.0);
            let modes: Vec<(f64, f64, f64)> = (2..=6)
                .map(|m| {
                    let amp = rho0 * 0.1 * rng.random_range(0.0..1.0);
                    let phase: f64 = rng.random_range(0.0..2.0 * PI);
                    (m as f64, amp, phase)
                })
                .collect();
            let rho: Vec<f64> = ball
                .theta()
                .iter()
                .map(|t| rho0 + modes.iter().map(|(m, amp, ph)| amp * (m * t + ph).cos()).sum::<f64>())
                .collect();
            let base = Vec2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            ConvexCurve::from_radius_of_curvature(ball, &rho, base)
        })
        .collect()
}
