//! On-disk series: `snapshots.csv` and `frames/NNNN.csv`.
//!
//! Every float is written with Rust's shortest round-trip formatting, so
//! [`read_snapshots`] and [`read_frame`] recover the written values exactly.
//!
//! `snapshots.csv` columns, in order:
//! `schema, index, step, t, dt, length, area, iso_ratio, k2_integral,
//! r_sin, r_cos, j, w, k_min, k_max, k_star, k_star_bound, hausdorff,
//! gage_liminf, f_value, base_x, base_y, k_0 … k_{N−1}`.
//! `f_value` is empty when snapshots were not certified.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, ensure, Context};
use minkflow::flow::Snapshot;
use minkflow::Vec2;

pub const SCHEMA_VERSION: u32 = 1;

const SCALAR_COLUMNS: [&str; 22] = [
    "schema",
    "index",
    "step",
    "t",
    "dt",
    "length",
    "area",
    "iso_ratio",
    "k2_integral",
    "r_sin",
    "r_cos",
    "j",
    "w",
    "k_min",
    "k_max",
    "k_star",
    "k_star_bound",
    "hausdorff",
    "gage_liminf",
    "f_value",
    "base_x",
    "base_y",
];

/// One row of `snapshots.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotRecord {
    pub index: usize,
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub length: f64,
    pub area: f64,
    pub iso_ratio: f64,
    pub k2_integral: f64,
    pub r_sin: f64,
    pub r_cos: f64,
    pub j: f64,
    pub w: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub k_star: f64,
    pub k_star_bound: f64,
    pub hausdorff: f64,
    pub gage_liminf: f64,
    pub f_value: Option<f64>,
    pub base: [f64; 2],
    pub k: Vec<f64>,
}

impl From<&Snapshot> for SnapshotRecord {
    fn from(s: &Snapshot) -> Self {
        Self {
            index: s.index,
            step: s.step,
            t: s.t,
            dt: s.dt,
            length: s.length,
            area: s.area,
            iso_ratio: s.iso_ratio,
            k2_integral: s.k2_integral,
            r_sin: s.r_sin,
            r_cos: s.r_cos,
            j: s.j,
            w: s.w,
            k_min: s.k_min,
            k_max: s.k_max,
            k_star: s.k_star,
            k_star_bound: s.k_star_bound,
            hausdorff: s.hausdorff,
            gage_liminf: s.gage_liminf,
            f_value: s.iso.as_ref().map(|r| r.f_value),
            base: s.base,
            k: s.k.clone(),
        }
    }
}

fn fmt(x: f64) -> String {
    format!("{x:?}")
}

impl SnapshotRecord {
    fn fields(&self) -> Vec<String> {
        let mut out = vec![SCHEMA_VERSION.to_string(), self.index.to_string(), self.step.to_string()];
        out.extend(
            [
                self.t,
                self.dt,
                self.length,
                self.area,
                self.iso_ratio,
                self.k2_integral,
                self.r_sin,
                self.r_cos,
                self.j,
                self.w,
                self.k_min,
                self.k_max,
                self.k_star,
                self.k_star_bound,
                self.hausdorff,
                self.gage_liminf,
            ]
            .map(fmt),
        );
        out.push(self.f_value.map(fmt).unwrap_or_default());
        out.extend(self.base.map(fmt));
        out.extend(self.k.iter().copied().map(fmt));
        out
    }

    fn parse(row: &csv::StringRecord, n: usize) -> anyhow::Result<Self> {
        ensure!(row.len() == SCALAR_COLUMNS.len() + n, "expected {} fields, got {}", SCALAR_COLUMNS.len() + n, row.len());
        let f = |i: usize| -> anyhow::Result<f64> {
            row[i].parse::<f64>().with_context(|| format!("column {} = {:?}", column_name(i), &row[i]))
        };
        let u = |i: usize| -> anyhow::Result<usize> {
            row[i].parse::<usize>().with_context(|| format!("column {} = {:?}", column_name(i), &row[i]))
        };
        let schema = u(0)?;
        ensure!(schema == SCHEMA_VERSION as usize, "unsupported schema version {schema}");
        Ok(Self {
            index: u(1)?,
            step: u(2)?,
            t: f(3)?,
            dt: f(4)?,
            length: f(5)?,
            area: f(6)?,
            iso_ratio: f(7)?,
            k2_integral: f(8)?,
            r_sin: f(9)?,
            r_cos: f(10)?,
            j: f(11)?,
            w: f(12)?,
            k_min: f(13)?,
            k_max: f(14)?,
            k_star: f(15)?,
            k_star_bound: f(16)?,
            hausdorff: f(17)?,
            gage_liminf: f(18)?,
            f_value: if row[19].is_empty() { None } else { Some(f(19)?) },
            base: [f(20)?, f(21)?],
            k: (0..n).map(|i| f(SCALAR_COLUMNS.len() + i)).collect::<anyhow::Result<_>>()?,
        })
    }
}

fn column_name(i: usize) -> String {
    SCALAR_COLUMNS
        .get(i)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("k_{}", i - SCALAR_COLUMNS.len()))
}

pub fn write_snapshots(path: &Path, records: &[SnapshotRecord]) -> anyhow::Result<()> {
    let n = records.first().map_or(0, |r| r.k.len());
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record((0..SCALAR_COLUMNS.len() + n).map(column_name))?;
    for r in records {
        ensure!(r.k.len() == n, "snapshot {} has {} curvature samples, expected {n}", r.index, r.k.len());
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshots(path: &Path) -> anyhow::Result<Vec<SnapshotRecord>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header = r.headers()?.clone();
    ensure!(header.len() >= SCALAR_COLUMNS.len(), "{}: header too short", path.display());
    for (i, name) in SCALAR_COLUMNS.iter().enumerate() {
        if &header[i] != *name {
            bail!("{}: column {i} is {:?}, expected {name:?}", path.display(), &header[i]);
        }
    }
    let n = header.len() - SCALAR_COLUMNS.len();
    r.records()
        .enumerate()
        .map(|(line, row)| {
            let row = row?;
            SnapshotRecord::parse(&row, n).with_context(|| format!("{} line {}", path.display(), line + 2))
        })
        .collect()
}

/// Write `θ, x, y` rows of one curve frame.
pub fn write_frame(path: &Path, theta: &[f64], vertices: &[Vec2]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    w.write_record(["theta", "x", "y"])?;
    for (t, v) in theta.iter().zip(vertices) {
        w.write_record([fmt(*t), fmt(v.x), fmt(v.y)])?;
    }
    w.flush()?;
    Ok(())
}

/// `(θ, vertices)` of a frame file.
pub fn read_frame(path: &Path) -> anyhow::Result<(Vec<f64>, Vec<Vec2>)> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    ensure!(r.headers()? == vec!["theta", "x", "y"], "{}: expected header theta,x,y", path.display());
    let (mut theta, mut vertices) = (Vec::new(), Vec::new());
    for (line, row) in r.records().enumerate() {
        let row = row?;
        let parse = |i: usize| -> anyhow::Result<f64> {
            row.get(i)
                .context("missing field")?
                .parse::<f64>()
                .with_context(|| format!("{} line {}", path.display(), line + 2))
        };
        theta.push(parse(0)?);
        vertices.push(Vec2::new(parse(1)?, parse(2)?));
    }
    Ok((theta, vertices))
}

/// Frame path `dir/frames/NNNN.csv` for snapshot `index`.
pub fn frame_path(dir: &Path, index: usize) -> std::path::PathBuf {
    dir.join("frames").join(format!("{index:04}.csv"))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    Ok(())
}
