//! `report.json` of a simulation.

use minkflow::flow::{evolution_residuals, StepExtremes};
use minkflow::{CurveMetrics, FlowOutcome, FlowRun, IsoReport, SolverConfig};
use serde::Serialize;

use crate::config::Tolerances;
use crate::records::SCHEMA_VERSION;

/// A measured value against a bound.
#[derive(Clone, Debug, Serialize)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    /// `value <= bound` for `"at_most"`, `value >= bound` for `"at_least"`.
    pub kind: &'static str,
    pub passed: bool,
}

impl InvariantCheck {
    fn at_most(name: &'static str, value: f64, bound: f64) -> Self {
        Self {
            name,
            value,
            bound,
            kind: "at_most",
            passed: value <= bound,
        }
    }

    fn at_least(name: &'static str, value: f64, bound: f64) -> Self {
        Self {
            name,
            value,
            bound,
            kind: "at_least",
            passed: value >= bound,
        }
    }
}

/// Largest relative residuals of the evolution laws over the snapshots.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualSummary {
    pub area: f64,
    pub length: f64,
    pub iso: f64,
    pub w_vs_j: f64,
    /// Smallest `L_Q(∮k² ds − A(P) L_Q/A)`; recorded only.
    pub min_gage_liminf: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub outcome: FlowOutcome,
    pub grid: usize,
    pub area_p: f64,
    pub solver: SolverConfig,
    pub tolerances: Tolerances,
    pub steps: usize,
    pub snapshots: usize,
    pub final_time: Option<f64>,
    pub t_v_est: Option<f64>,
    pub initial_area: Option<f64>,
    pub initial_metrics: Option<CurveMetrics>,
    pub final_metrics: Option<CurveMetrics>,
    pub final_iso: Option<IsoReport>,
    pub extremes: Option<StepExtremes>,
    pub residuals: Option<ResidualSummary>,
    pub invariants: Vec<InvariantCheck>,
    /// Every invariant passed and the run did not fail.
    pub passed: bool,
}

impl RunReport {
    /// Report for a run that produced no trajectory.
    pub fn failed(detail: String, grid: usize, area_p: f64, solver: SolverConfig, tolerances: Tolerances) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            outcome: FlowOutcome::Failed(detail),
            grid,
            area_p,
            solver,
            tolerances,
            steps: 0,
            snapshots: 0,
            final_time: None,
            t_v_est: None,
            initial_area: None,
            initial_metrics: None,
            final_metrics: None,
            final_iso: None,
            extremes: None,
            residuals: None,
            invariants: Vec::new(),
            passed: false,
        }
    }

    pub fn from_run(
        run: &FlowRun,
        initial_metrics: CurveMetrics,
        solver: SolverConfig,
        tolerances: Tolerances,
    ) -> Self {
        let ball = run.final_state.ball();
        let area_p = ball.area();
        let snaps = &run.snapshots;
        let res = evolution_residuals(snaps, area_p);
        let residuals = ResidualSummary {
            area: res.max_area(),
            length: res.max_length(),
            iso: res.max_iso(),
            w_vs_j: res.max_w_vs_j(),
            min_gage_liminf: snaps.iter().map(|s| s.gage_liminf).fold(f64::INFINITY, f64::min),
        };

        let ex = &run.extremes;
        let mut invariants = vec![
            InvariantCheck::at_most("closure_ratio", ex.max_closure_ratio, solver.tol_close),
            InvariantCheck::at_least("k_min_drop", ex.min_k - initial_metrics.k_min, -solver.tol_pos),
        ];
        if run.steps > 0 {
            invariants.push(InvariantCheck::at_most("iso_step_increase", ex.max_iso_increase, tolerances.iso_increase));
        }
        if snaps.len() >= 2 {
            let j_drop = snaps
                .windows(2)
                .map(|w| (w[0].j - w[1].j) / (1.0 + w[0].j.abs()))
                .fold(f64::NEG_INFINITY, f64::max);
            invariants.push(InvariantCheck::at_most("j_decrease", j_drop, tolerances.j_decrease));
        }
        let k_star_excess = snaps
            .iter()
            .map(|s| s.k_star - s.k_star_bound)
            .fold(f64::NEG_INFINITY, f64::max);
        invariants.push(InvariantCheck::at_most("median_curvature_excess", k_star_excess, tolerances.slack));
        let certified: Vec<&IsoReport> = snaps.iter().filter_map(|s| s.iso.as_ref()).collect();
        if !certified.is_empty() {
            let min_slack = certified
                .iter()
                .flat_map(|r| r.slacks())
                .map(|(_, v)| v)
                .fold(f64::INFINITY, f64::min);
            invariants.push(InvariantCheck::at_least("min_inequality_slack", min_slack, -tolerances.slack));
        }
        if !res.area.is_empty() {
            invariants.push(InvariantCheck::at_most("area_law", residuals.area, tolerances.area_law));
        }

        let final_curve = run.final_state.curve();
        let passed = run.outcome.is_success() && invariants.iter().all(|c| c.passed);
        Self {
            schema_version: SCHEMA_VERSION,
            outcome: run.outcome.clone(),
            grid: ball.len(),
            area_p,
            solver,
            tolerances,
            steps: run.steps,
            snapshots: snaps.len(),
            final_time: Some(run.final_state.t),
            t_v_est: Some(run.t_v_est),
            initial_area: Some(run.initial_area),
            initial_metrics: Some(initial_metrics),
            final_metrics: Some(final_curve.metrics()),
            final_iso: snaps.last().and_then(|s| s.iso.clone()),
            extremes: Some(run.extremes),
            residuals: Some(residuals),
            invariants,
            passed,
        }
    }
}
