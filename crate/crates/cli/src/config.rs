//! Run configuration read from JSON.
//!
//! ```json
//! {
//!   "unit_ball": { "harmonics": [[0, 1.0, 0.0], [2, 0.2, 0.0]] },
//!   "grid": 256,
//!   "initial": { "curvature": { "harmonics": [[0, 1.0, 0.0], [4, 0.3, 0.0]] } },
//!   "solver": { "sigma": 0.5, "area_fraction": 0.01, "snapshot_every": 50 },
//!   "tolerances": { "slack": 1e-8 }
//! }
//! ```
//!
//! Harmonics are `[order, cos, sin]` triples. Omitted solver fields and
//! tolerances take their defaults.

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context};
use minkflow::{AngleGrid, ConvexCurve, SolverConfig, SupportFunction, UnitBall, Vec2};
use serde::{Deserialize, Serialize};

pub type Harmonic = (usize, f64, f64);

pub const DEFAULT_GRID: usize = 256;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub unit_ball: BallSpec,
    #[serde(default = "default_grid")]
    pub grid: usize,
    pub initial: InitialCurve,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_grid() -> usize {
    DEFAULT_GRID
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub harmonics: Vec<Harmonic>,
}

/// A function on the circle given either by harmonics or by one sample per
/// grid node.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub harmonics: Option<Vec<Harmonic>>,
    pub samples: Option<Vec<f64>>,
    #[serde(default)]
    pub base: [f64; 2],
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCurve {
    /// Minkowski curvature `k(θ)`; `base` is `γ(0)`.
    Curvature(Profile),
    /// Euclidean radius of curvature `(a + a'')/k` as a function of `θ`.
    RadiusOfCurvature(Profile),
    Ellipse {
        semi_axes: [f64; 2],
        #[serde(default)]
        center: [f64; 2],
    },
    PCircle {
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
    },
}

/// Overrides of [`SolverConfig`]; `None` keeps the default.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub sigma: Option<f64>,
    pub area_fraction: Option<f64>,
    pub max_time: Option<f64>,
    pub max_steps: Option<usize>,
    pub snapshot_every: Option<usize>,
    pub tol_close: Option<f64>,
    pub tol_pos: Option<f64>,
    pub max_retries: Option<usize>,
    pub certify_snapshots: Option<bool>,
}

impl SolverSection {
    pub fn resolve(&self) -> SolverConfig {
        let d = SolverConfig::default();
        SolverConfig {
            sigma: self.sigma.unwrap_or(d.sigma),
            area_fraction: self.area_fraction.unwrap_or(d.area_fraction),
            max_time: self.max_time.unwrap_or(d.max_time),
            max_steps: self.max_steps.unwrap_or(d.max_steps),
            snapshot_every: self.snapshot_every.unwrap_or(d.snapshot_every),
            tol_close: self.tol_close.unwrap_or(d.tol_close),
            tol_pos: self.tol_pos.unwrap_or(d.tol_pos),
            max_retries: self.max_retries.unwrap_or(d.max_retries),
            certify_snapshots: self.certify_snapshots.unwrap_or(d.certify_snapshots),
        }
    }
}

/// Bounds used by the run report and by `certify`.
#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed negative excursion of every inequality slack.
    pub slack: f64,
    /// Allowed increase of `L_Q²/A` over one step.
    pub iso_increase: f64,
    /// Allowed relative decrease of `J` between snapshots.
    pub j_decrease: f64,
    /// Allowed relative residual of `dA/dt = −2A(P)`.
    pub area_law: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            slack: 1e-8,
            iso_increase: 1e-10,
            j_decrease: 1e-8,
            area_law: 1e-4,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Grid size: explicit curvature samples fix it, otherwise `grid`.
    pub fn grid_size(&self) -> usize {
        match &self.initial {
            InitialCurve::Curvature(Profile { samples: Some(s), .. }) => s.len(),
            _ => self.grid,
        }
    }

    pub fn ball(&self) -> anyhow::Result<Arc<UnitBall>> {
        let sf = SupportFunction::new(&self.unit_ball.harmonics)?;
        let grid = AngleGrid::new(self.grid_size())?;
        Ok(Arc::new(UnitBall::new(sf, grid)?))
    }

    /// Validated initial curve on `ball`'s grid.
    pub fn initial_curve(&self, ball: Arc<UnitBall>, tol_close: f64) -> anyhow::Result<ConvexCurve> {
        let curve = match &self.initial {
            InitialCurve::Curvature(p) => {
                let k = p.sample(&ball, "curvature")?;
                ConvexCurve::with_tolerance(ball, k, vec2(p.base), tol_close)?
            }
            InitialCurve::RadiusOfCurvature(p) => {
                if p.samples.is_some() {
                    bail!("radius_of_curvature takes harmonics only");
                }
                let rho = p.sample(&ball, "radius_of_curvature")?;
                if let Some(i) = rho.iter().position(|r| !(*r > 0.0)) {
                    bail!("radius of curvature is not positive at node {i}");
                }
                let k: Vec<f64> = (0..ball.len()).map(|i| ball.radius_factor(i) / rho[i]).collect();
                ConvexCurve::with_tolerance(ball, k, vec2(p.base), tol_close)?
            }
            InitialCurve::Ellipse { semi_axes, center } => {
                ConvexCurve::ellipse(ball, semi_axes[0], semi_axes[1], vec2(*center))?
            }
            InitialCurve::PCircle { radius, center } => ConvexCurve::p_circle(ball, *radius, vec2(*center))?,
        };
        Ok(curve)
    }
}

impl Profile {
    fn sample(&self, ball: &UnitBall, what: &str) -> anyhow::Result<Vec<f64>> {
        match (&self.harmonics, &self.samples) {
            (Some(h), None) => Ok(ball
                .theta()
                .iter()
                .map(|&t| {
                    h.iter()
                        .map(|&(m, c, s)| c * (m as f64 * t).cos() + s * (m as f64 * t).sin())
                        .sum()
                })
                .collect()),
            (None, Some(s)) => Ok(s.clone()),
            _ => bail!("{what} needs exactly one of `harmonics` or `samples`"),
        }
    }
}

fn vec2(v: [f64; 2]) -> Vec2 {
    Vec2::new(v[0], v[1])
}
