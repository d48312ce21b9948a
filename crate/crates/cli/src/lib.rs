//! Batch front end: `simulate`, `certify` and `selftest`.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 solver failure,
//! 3 an inequality slack or run invariant beyond tolerance. `selftest` exits
//! 1 when any acceptance criterion fails.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod records;
pub mod report;

use std::path::{Path, PathBuf};

use anyhow::{anyhow, ensure, Context};
use minkflow::acceptance::{AcceptanceOptions, Suite};
use minkflow::curve::curvature_from_vertices;
use minkflow::flow::run_flow;
use minkflow::isoperimetry::gage_check;
use minkflow::{AngleGrid, ConvexCurve, FlowState, SupportFunction, UnitBall};

use crate::config::{InitialCurve, Profile, RunConfig};
use crate::records::{frame_path, write_frame, write_json, write_snapshots, SnapshotRecord};
use crate::report::RunReport;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_SOLVER: u8 = 2;
pub const EXIT_VIOLATION: u8 = 3;

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn config(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_CONFIG,
            error: error.into(),
        }
    }
}

pub type Outcome = Result<u8, Failure>;

#[derive(Clone, Debug, Default)]
pub struct SimulateArgs {
    pub config: PathBuf,
    pub out: PathBuf,
    pub snapshots_every: Option<usize>,
    pub grid: Option<usize>,
    pub quiet: bool,
}

fn apply_grid(cfg: &mut RunConfig, grid: Option<usize>) -> anyhow::Result<()> {
    let Some(g) = grid else { return Ok(()) };
    if let InitialCurve::Curvature(Profile { samples: Some(s), .. }) = &cfg.initial {
        ensure!(s.len() == g, "--grid {g} conflicts with {} curvature samples", s.len());
    }
    cfg.grid = g;
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> Outcome {
    let mut cfg = RunConfig::load(&args.config).map_err(Failure::config)?;
    apply_grid(&mut cfg, args.grid).map_err(Failure::config)?;
    if let Some(every) = args.snapshots_every {
        cfg.solver.snapshot_every = Some(every);
    }
    let solver = cfg.solver.resolve();
    solver.validate().map_err(Failure::config)?;
    let ball = cfg.ball().map_err(Failure::config)?;
    let curve = cfg.initial_curve(ball.clone(), solver.tol_close).map_err(Failure::config)?;

    let frames = args.out.join("frames");
    std::fs::create_dir_all(&frames)
        .with_context(|| format!("creating {}", frames.display()))
        .map_err(Failure::config)?;
    let report_path = args.out.join("report.json");
    let io = |e: anyhow::Error| Failure {
        code: EXIT_SOLVER,
        error: e,
    };

    let initial_metrics = curve.metrics();
    let run = match run_flow(FlowState::from_curve(curve), &solver) {
        Ok(run) => run,
        Err(e) => {
            let report = RunReport::failed(e.to_string(), ball.len(), ball.area(), solver, cfg.tolerances);
            write_json(&report_path, &report).map_err(io)?;
            return Err(Failure {
                code: EXIT_SOLVER,
                error: anyhow!(e),
            });
        }
    };

    let records: Vec<SnapshotRecord> = run.snapshots.iter().map(SnapshotRecord::from).collect();
    write_snapshots(&args.out.join("snapshots.csv"), &records).map_err(io)?;
    for s in &run.snapshots {
        write_frame(&frame_path(&args.out, s.index), ball.theta(), &s.vertices).map_err(io)?;
    }
    let report = RunReport::from_run(&run, initial_metrics, solver, cfg.tolerances);
    write_json(&report_path, &report).map_err(io)?;

    if !args.quiet {
        eprintln!(
            "{:?} after {} steps, t = {:.6}, t_V estimate {:.6}, {} snapshots in {}",
            run.outcome,
            run.steps,
            run.final_state.t,
            run.t_v_est,
            run.snapshots.len(),
            args.out.display()
        );
        for c in report.invariants.iter().filter(|c| !c.passed) {
            eprintln!("invariant {} failed: {:e} vs {:e}", c.name, c.value, c.bound);
        }
    }
    if !run.outcome.is_success() {
        return Err(Failure {
            code: EXIT_SOLVER,
            error: anyhow!("solver failed: {:?}", run.outcome),
        });
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_VIOLATION })
}

#[derive(Clone, Debug, Default)]
pub struct CertifyArgs {
    pub config: PathBuf,
    /// Frame file (`θ, x, y`) replacing the configured initial curve.
    pub curve: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub grid: Option<usize>,
    pub quiet: bool,
}

fn curve_from_frame(cfg: &RunConfig, path: &Path, tol_close: f64) -> anyhow::Result<ConvexCurve> {
    let (theta, vertices) = records::read_frame(path)?;
    let grid = AngleGrid::new(theta.len())?;
    let ball = UnitBall::new(SupportFunction::new(&cfg.unit_ball.harmonics)?, grid)?;
    for (i, (t, node)) in theta.iter().zip(ball.theta()).enumerate() {
        ensure!((t - node).abs() <= 1e-12, "{}: row {i} has theta {t}, grid node is {node}", path.display());
    }
    let k = curvature_from_vertices(&ball, &vertices);
    Ok(ConvexCurve::with_tolerance(ball.into(), k, vertices[0], tol_close)?)
}

pub fn certify(args: &CertifyArgs) -> Outcome {
    let mut cfg = RunConfig::load(&args.config).map_err(Failure::config)?;
    apply_grid(&mut cfg, args.grid).map_err(Failure::config)?;
    let solver = cfg.solver.resolve();
    let curve = match &args.curve {
        Some(path) => curve_from_frame(&cfg, path, solver.tol_close),
        None => cfg.ball().and_then(|b| cfg.initial_curve(b, solver.tol_close)),
    }
    .map_err(Failure::config)?;
    let report = gage_check(&curve).map_err(|e| Failure {
        code: EXIT_SOLVER,
        error: e.into(),
    })?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{json}");
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)
            .and_then(|_| std::fs::write(dir.join("certify.json"), format!("{json}\n")))
            .with_context(|| format!("writing {}", dir.display()))
            .map_err(Failure::config)?;
    }
    let violations = report.violations(cfg.tolerances.slack);
    if violations.is_empty() {
        Ok(EXIT_OK)
    } else {
        if !args.quiet {
            eprintln!("negative slack beyond {:e}: {}", cfg.tolerances.slack, violations.join(", "));
        }
        Ok(EXIT_VIOLATION)
    }
}

#[derive(Clone, Debug, Default)]
pub struct SelftestArgs {
    pub grid: Option<usize>,
    pub tamper_area: f64,
    pub quiet: bool,
}

pub fn selftest(args: &SelftestArgs) -> Outcome {
    let suite = Suite::new(AcceptanceOptions {
        grid_override: args.grid,
        area_tamper: args.tamper_area,
    });
    let results = suite.run_all();
    for r in &results {
        println!("{}", r.line());
    }
    let passed = results.iter().filter(|r| r.passed).count();
    if !args.quiet {
        println!("{passed}/{} criteria passed", results.len());
    }
    Ok(if passed == results.len() { EXIT_OK } else { EXIT_CONFIG })
}
