//! Minkowski curvature flow in the θ-gauge.
//!
//! The curvature obeys
//!
//! ```text
//! k_t = a/(a+a'') k² k_θθ + 2a'/(a+a'') k² k_θ + k³
//! ```
//!
//! discretized with fourth-order periodic central differences and advanced
//! by classical RK4 under the parabolic step bound
//! `Δt = σ Δθ² / max(a/(a+a'') k²)`. The lab-frame curve is the θ-gauge
//! curve translated by `−(T1, T2)`, where `T1' = a(0)k(0)` and
//! `T2' = a(0)k_θ(0) + a'(0)k(0)` are integrated alongside `k`.

use std::sync::Arc;

use serde::Serialize;

use crate::ball::UnitBall;
use crate::curve::ConvexCurve;
use crate::error::{Error, Result};
use crate::isoperimetry::{gage_check, IsoReport};
use crate::spectral;
use crate::Vec2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Safety factor in the step bound, `0 < σ <= 0.9`.
    pub sigma: f64,
    /// Stop once `A <= area_fraction · A(0)`.
    pub area_fraction: f64,
    pub max_time: f64,
    pub max_steps: usize,
    /// Accepted steps between snapshots.
    pub snapshot_every: usize,
    /// Closure tolerance relative to `L_Q`.
    pub tol_close: f64,
    /// Allowed undershoot of `min k` below its initial value.
    pub tol_pos: f64,
    /// Halvings of `σ` tried before a rejected step ends the run.
    pub max_retries: usize,
    /// Attach an [`IsoReport`] to every snapshot.
    pub certify_snapshots: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            sigma: 0.5,
            area_fraction: 0.01,
            max_time: f64::INFINITY,
            max_steps: 10_000_000,
            snapshot_every: 50,
            tol_close: 1e-6,
            tol_pos: 1e-8,
            max_retries: 8,
            certify_snapshots: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.sigma > 0.0 && self.sigma <= 0.9) {
            return bad("sigma must lie in (0, 0.9]");
        }
        if !(self.area_fraction > 0.0 && self.area_fraction < 1.0) {
            return bad("area_fraction must lie in (0, 1)");
        }
        if !(self.max_time > 0.0) {
            return bad("max_time must be positive");
        }
        if self.snapshot_every == 0 {
            return bad("snapshot_every must be at least 1");
        }
        if !(self.tol_close > 0.0 && self.tol_pos >= 0.0) {
            return bad("tolerances must be positive");
        }
        Ok(())
    }
}

/// Fourth-order central first difference on a periodic grid.
pub fn d1(k: &[f64], h: f64) -> Vec<f64> {
    let n = k.len();
    (0..n)
        .map(|i| {
            let (m2, m1, p1, p2) = (k[(i + n - 2) % n], k[(i + n - 1) % n], k[(i + 1) % n], k[(i + 2) % n]);
            (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h)
        })
        .collect()
}

/// Fourth-order central second difference on a periodic grid.
pub fn d2(k: &[f64], h: f64) -> Vec<f64> {
    let n = k.len();
    (0..n)
        .map(|i| {
            let (m2, m1, p1, p2) = (k[(i + n - 2) % n], k[(i + n - 1) % n], k[(i + 1) % n], k[(i + 2) % n]);
            (-p2 + 16.0 * p1 - 30.0 * k[i] + 16.0 * m1 - m2) / (12.0 * h * h)
        })
        .collect()
}

/// Right-hand side `Fcoef k² D²k + Gcoef k² Dk + k³`.
pub fn pde_rhs(ball: &UnitBall, k: &[f64]) -> Vec<f64> {
    let h = ball.grid().spacing();
    let dk = d1(k, h);
    let ddk = d2(k, h);
    (0..k.len())
        .map(|i| {
            let k2 = k[i] * k[i];
            ball.fcoef()[i] * k2 * ddk[i] + ball.gcoef()[i] * k2 * dk[i] + k2 * k[i]
        })
        .collect()
}

/// Parabolic step bound `σ Δθ² / max(Fcoef k²)`.
pub fn stable_dt(ball: &UnitBall, k: &[f64], sigma: f64) -> f64 {
    let h = ball.grid().spacing();
    let stiff = k
        .iter()
        .zip(ball.fcoef())
        .map(|(k, f)| f * k * k)
        .fold(0.0, f64::max);
    sigma * h * h / stiff
}

/// Curvature at time `t` together with the frame accumulators.
#[derive(Clone, Debug)]
pub struct FlowState {
    pub t: f64,
    pub t1: f64,
    pub t2: f64,
    /// `γ(0)` at `t = 0`.
    pub origin: Vec2,
    /// `min k` at `t = 0`.
    pub k_floor: f64,
    curve: ConvexCurve,
}

impl FlowState {
    pub fn new(ball: Arc<UnitBall>, k0: Vec<f64>, origin: Vec2, tol_close: f64) -> Result<Self> {
        let curve = ConvexCurve::with_tolerance(ball, k0, origin, tol_close)?;
        Ok(Self {
            t: 0.0,
            t1: 0.0,
            t2: 0.0,
            origin,
            k_floor: curve.k_min(),
            curve,
        })
    }

    pub fn from_curve(curve: ConvexCurve) -> Self {
        Self {
            t: 0.0,
            t1: 0.0,
            t2: 0.0,
            origin: curve.base(),
            k_floor: curve.k_min(),
            curve,
        }
    }

    /// Current curve in the lab frame.
    pub fn curve(&self) -> &ConvexCurve {
        &self.curve
    }

    pub fn k(&self) -> &[f64] {
        self.curve.curvature()
    }

    pub fn ball(&self) -> &Arc<UnitBall> {
        self.curve.ball()
    }

    /// Lab-frame vertices `γ(θ_i, t)`.
    pub fn reconstruct_frame(&self) -> &[Vec2] {
        self.curve.vertices()
    }

    /// Normal velocity field `−k p − a² k_θ q` with a spectral `k_θ`.
    pub fn frame_velocity(&self) -> Vec<Vec2> {
        let ball = self.ball();
        let k = self.k();
        let dk = spectral::derivative_at_nodes(k);
        (0..k.len())
            .map(|i| -k[i] * ball.p()[i] - ball.a()[i].powi(2) * dk[i] * ball.q()[i])
            .collect()
    }
}

/// Frame accumulator rates `(a(0)k(0), a(0)k_θ(0) + a'(0)k(0))`.
fn frame_rates(ball: &UnitBall, k: &[f64]) -> (f64, f64) {
    let n = k.len();
    let h = ball.grid().spacing();
    let dk0 = (-k[2] + 8.0 * k[1] - 8.0 * k[n - 1] + k[n - 2]) / (12.0 * h);
    (ball.a()[0] * k[0], ball.a()[0] * dk0 + ball.a_prime()[0] * k[0])
}

/// One RK4 step of length `dt`, checked against positivity and closure.
pub fn step_with_dt(state: &FlowState, dt: f64, cfg: &SolverConfig) -> Result<FlowState> {
    let ball = state.ball().clone();
    let k = state.k();
    let n = k.len();
    let eval = |kk: &[f64]| -> (Vec<f64>, (f64, f64)) { (pde_rhs(&ball, kk), frame_rates(&ball, kk)) };
    let axpy = |s: f64, d: &[f64]| -> Vec<f64> { (0..n).map(|i| k[i] + s * d[i]).collect() };

    let (r1, f1) = eval(k);
    let (r2, f2) = eval(&axpy(0.5 * dt, &r1));
    let (r3, f3) = eval(&axpy(0.5 * dt, &r2));
    let (r4, f4) = eval(&axpy(dt, &r3));
    let k_new: Vec<f64> = (0..n)
        .map(|i| k[i] + dt / 6.0 * (r1[i] + 2.0 * r2[i] + 2.0 * r3[i] + r4[i]))
        .collect();
    let t1 = state.t1 + dt / 6.0 * (f1.0 + 2.0 * f2.0 + 2.0 * f3.0 + f4.0);
    let t2 = state.t2 + dt / 6.0 * (f1.1 + 2.0 * f2.1 + 2.0 * f3.1 + f4.1);
    let t = state.t + dt;

    let reject = |reason: String| Err(Error::StepRejected { t, reason });
    if let Some(i) = k_new.iter().position(|v| !v.is_finite()) {
        return reject(format!("non-finite curvature at node {i}"));
    }
    let k_min = k_new.iter().copied().fold(f64::INFINITY, f64::min);
    if k_min < 0.5 * state.k_floor {
        return reject(format!("min curvature {k_min:e} fell below half its initial value"));
    }
    let base = state.origin - Vec2::new(t1, t2);
    let curve = match ConvexCurve::with_tolerance(ball, k_new, base, cfg.tol_close) {
        Ok(c) => c,
        Err(e) => return reject(e.to_string()),
    };
    Ok(FlowState {
        t,
        t1,
        t2,
        origin: state.origin,
        k_floor: state.k_floor,
        curve,
    })
}

/// One step at the configured `σ`, halving it on rejection up to
/// `max_retries` times. Returns the new state and the step length used.
pub fn step(state: &FlowState, cfg: &SolverConfig) -> Result<(FlowState, f64)> {
    let mut sigma = cfg.sigma;
    let mut last = None;
    for _ in 0..=cfg.max_retries {
        let dt = stable_dt(state.ball(), state.k(), sigma);
        match step_with_dt(state, dt, cfg) {
            Ok(next) => return Ok((next, dt)),
            Err(e) => last = Some(e),
        }
        sigma *= 0.5;
    }
    Err(last.expect("at least one attempt is made"))
}

/// Diagnostics recorded at one instant.
#[derive(Clone, Debug, Serialize)]
pub struct Snapshot {
    pub index: usize,
    pub step: usize,
    pub t: f64,
    /// Step length that produced this state (0 for the initial state).
    pub dt: f64,
    pub length: f64,
    pub area: f64,
    pub iso_ratio: f64,
    pub k2_integral: f64,
    pub r_sin: f64,
    pub r_cos: f64,
    /// `J = ∮ (ak)² − ((ak)')² dθ`.
    pub j: f64,
    /// `W = ∮ a(a+a'') log k dθ`.
    pub w: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub k_star: f64,
    /// `C L_Q / A`, the bound on the median curvature.
    pub k_star_bound: f64,
    pub hausdorff: f64,
    /// `L_Q (∮k² ds − A(P) L_Q / A)`, recorded for its liminf.
    pub gage_liminf: f64,
    pub base: [f64; 2],
    pub k: Vec<f64>,
    #[serde(skip)]
    pub vertices: Vec<Vec2>,
    pub iso: Option<IsoReport>,
}

/// `J = ∮ (ak)² − ((ak)')² dθ` with a spectral derivative.
pub fn j_functional(ball: &UnitBall, k: &[f64]) -> f64 {
    let ak: Vec<f64> = k.iter().zip(ball.a()).map(|(k, a)| a * k).collect();
    let d = spectral::derivative_at_nodes(&ak);
    ak.iter().zip(&d).map(|(u, v)| u * u - v * v).sum::<f64>() * ball.grid().spacing()
}

/// `W = ∮ a(a+a'') log k dθ`.
pub fn w_functional(ball: &UnitBall, k: &[f64]) -> f64 {
    k.iter().zip(ball.bracket_pp()).map(|(k, pp)| pp * k.ln()).sum::<f64>() * ball.grid().spacing()
}

/// Hausdorff distance between the centred normalized curve
/// `√(A(P)/A)(γ − centroid)` and `∂P`, from Euclidean support functions.
pub fn hausdorff_to_ball(curve: &ConvexCurve) -> f64 {
    let ball = curve.ball();
    let s = (ball.area() / curve.area()).sqrt();
    let c = curve.centroid();
    curve
        .vertices()
        .iter()
        .zip(ball.theta())
        .zip(ball.a())
        .map(|((g, t), a)| (s * (g - c).dot(&Vec2::new(t.cos(), t.sin())) - a).abs())
        .fold(0.0, f64::max)
}

pub fn snapshot(state: &FlowState, index: usize, step: usize, dt: f64, certify: bool) -> Result<Snapshot> {
    let curve = state.curve();
    let ball = curve.ball();
    let (r_sin, r_cos) = curve.closure();
    let iso = if certify { Some(gage_check(curve)?) } else { None };
    Ok(Snapshot {
        index,
        step,
        t: state.t,
        dt,
        length: curve.length(),
        area: curve.area(),
        iso_ratio: curve.iso_ratio(),
        k2_integral: curve.k2_integral(),
        r_sin,
        r_cos,
        j: j_functional(ball, curve.curvature()),
        w: w_functional(ball, curve.curvature()),
        k_min: curve.k_min(),
        k_max: curve.k_max(),
        k_star: curve.median_curvature(),
        k_star_bound: ball.median_curvature_constant() * curve.length() / curve.area(),
        hausdorff: hausdorff_to_ball(curve),
        gage_liminf: curve.length() * (curve.k2_integral() - ball.area() * curve.length() / curve.area()),
        base: [curve.base().x, curve.base().y],
        k: curve.curvature().to_vec(),
        vertices: curve.vertices().to_vec(),
        iso,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum FlowOutcome {
    AreaThreshold,
    MaxTime,
    MaxSteps,
    Failed(String),
}

impl FlowOutcome {
    pub fn is_success(&self) -> bool {
        !matches!(self, FlowOutcome::Failed(_))
    }
}

/// Extremes observed over every accepted step, not only snapshots.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StepExtremes {
    /// Largest increase of `L_Q²/A` over one step.
    pub max_iso_increase: f64,
    pub min_k: f64,
    /// Largest `max(|R_sin|, |R_cos|) / L_Q`.
    pub max_closure_ratio: f64,
    pub min_dt: f64,
    pub rejected_attempts: usize,
}

#[derive(Clone, Debug)]
pub struct FlowRun {
    pub snapshots: Vec<Snapshot>,
    pub outcome: FlowOutcome,
    pub final_state: FlowState,
    pub steps: usize,
    pub initial_area: f64,
    /// `t + A/(2A(P))` at the last accepted state.
    pub t_v_est: f64,
    pub extremes: StepExtremes,
}

/// Integrate from `initial` until the area fraction, time or step limit is
/// reached, or until a step is rejected after all retries.
pub fn run_flow(initial: FlowState, cfg: &SolverConfig) -> Result<FlowRun> {
    cfg.validate()?;
    let initial_area = initial.curve().area();
    let mut state = initial;
    let mut snapshots = vec![snapshot(&state, 0, 0, 0.0, cfg.certify_snapshots)?];
    let closure_ratio = |c: &ConvexCurve| c.closure().0.abs().max(c.closure().1.abs()) / c.length();
    let mut extremes = StepExtremes {
        max_iso_increase: f64::NEG_INFINITY,
        min_k: state.curve().k_min(),
        max_closure_ratio: closure_ratio(state.curve()),
        min_dt: f64::INFINITY,
        rejected_attempts: 0,
    };
    let mut steps = 0;
    let mut last_dt = 0.0;
    let outcome = loop {
        if state.curve().area() <= cfg.area_fraction * initial_area {
            break FlowOutcome::AreaThreshold;
        }
        if state.t >= cfg.max_time {
            break FlowOutcome::MaxTime;
        }
        if steps >= cfg.max_steps {
            break FlowOutcome::MaxSteps;
        }
        let nominal = stable_dt(state.ball(), state.k(), cfg.sigma);
        let (next, dt) = match step(&state, cfg) {
            Ok(r) => r,
            Err(e) => break FlowOutcome::Failed(e.to_string()),
        };
        if dt < nominal {
            extremes.rejected_attempts += (nominal / dt).log2().round() as usize;
        }
        extremes.max_iso_increase = extremes
            .max_iso_increase
            .max(next.curve().iso_ratio() - state.curve().iso_ratio());
        extremes.min_k = extremes.min_k.min(next.curve().k_min());
        extremes.max_closure_ratio = extremes.max_closure_ratio.max(closure_ratio(next.curve()));
        extremes.min_dt = extremes.min_dt.min(dt);
        state = next;
        steps += 1;
        last_dt = dt;
        if steps % cfg.snapshot_every == 0 {
            snapshots.push(snapshot(&state, snapshots.len(), steps, dt, cfg.certify_snapshots)?);
        }
    };
    if snapshots.last().map(|s| s.step) != Some(steps) {
        snapshots.push(snapshot(&state, snapshots.len(), steps, last_dt, cfg.certify_snapshots)?);
    }
    let t_v_est = state.t + state.curve().area() / (2.0 * state.ball().area());
    Ok(FlowRun {
        snapshots,
        outcome,
        final_state: state,
        steps,
        initial_area,
        t_v_est,
        extremes,
    })
}

/// Relative residuals of the evolution laws at interior snapshots, using
/// three-point central differences on the (non-uniform) snapshot times.
#[derive(Clone, Debug, Default, Serialize)]
pub struct EvolutionResiduals {
    /// `|dA/dt + 2A(P)| / 2A(P)`.
    pub area: Vec<f64>,
    /// `|dL/dt + ∮k² ds| / ∮k² ds`.
    pub length: Vec<f64>,
    /// `|d(L²/A)/dt + (2L/A)(∮k² ds − A(P)L/A)|` relative to `(2L/A)∮k² ds`,
    /// the size of the larger term (the rate itself vanishes on P-circles).
    pub iso: Vec<f64>,
    /// `|dW/dt − J| / |J|`.
    pub w_vs_j: Vec<f64>,
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

impl EvolutionResiduals {
    pub fn max_area(&self) -> f64 {
        max_of(&self.area)
    }
    pub fn max_length(&self) -> f64 {
        max_of(&self.length)
    }
    pub fn max_iso(&self) -> f64 {
        max_of(&self.iso)
    }
    pub fn max_w_vs_j(&self) -> f64 {
        max_of(&self.w_vs_j)
    }
}

/// Central difference at `x1` for non-uniform nodes `x0 < x1 < x2`.
pub fn central_difference(x: [f64; 3], y: [f64; 3]) -> f64 {
    let (h1, h2) = (x[1] - x[0], x[2] - x[1]);
    -h2 / (h1 * (h1 + h2)) * y[0] + (h2 - h1) / (h1 * h2) * y[1] + h1 / (h2 * (h1 + h2)) * y[2]
}

pub fn evolution_residuals(snapshots: &[Snapshot], area_p: f64) -> EvolutionResiduals {
    let mut out = EvolutionResiduals::default();
    for w in snapshots.windows(3) {
        let x = [w[0].t, w[1].t, w[2].t];
        let d = |f: fn(&Snapshot) -> f64| central_difference(x, [f(&w[0]), f(&w[1]), f(&w[2])]);
        let s = &w[1];
        out.area.push((d(|s| s.area) + 2.0 * area_p).abs() / (2.0 * area_p));
        out.length.push((d(|s| s.length) + s.k2_integral).abs() / s.k2_integral);
        let iso_rate = -(2.0 * s.length / s.area) * (s.k2_integral - area_p * s.length / s.area);
        out.iso.push((d(|s| s.iso_ratio) - iso_rate).abs() / (2.0 * s.length / s.area * s.k2_integral));
        out.w_vs_j.push((d(|s| s.w) - s.j).abs() / s.j.abs().max(f64::MIN_POSITIVE));
    }
    out
}

/// Lab-frame velocity error after one step from `state`: forward difference
/// over one step and central difference over two equal steps, both against
/// `−k p − a² k_θ q`. Returns `(forward, central, dt)`.
pub fn frame_velocity_error(state: &FlowState, cfg: &SolverConfig) -> Result<(f64, f64, f64)> {
    let dt = stable_dt(state.ball(), state.k(), cfg.sigma);
    let expected = state.frame_velocity();
    let next = step_with_dt(state, dt, cfg)?;
    let prev = step_with_dt(state, -dt, cfg)?;
    let (g0, g1, gm) = (state.reconstruct_frame(), next.reconstruct_frame(), prev.reconstruct_frame());
    let mut forward: f64 = 0.0;
    let mut central: f64 = 0.0;
    for i in 0..g0.len() {
        forward = forward.max(((g1[i] - g0[i]) / dt - expected[i]).norm());
        central = central.max(((g1[i] - gm[i]) / (2.0 * dt) - expected[i]).norm());
    }
    Ok((forward, central, dt))
}
