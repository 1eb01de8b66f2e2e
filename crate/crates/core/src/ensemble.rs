//! Monte-Carlo orchestration over independent seeded paths, moment
//! estimates, mass-drift refinement studies and file output.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{finite_or_null, DiagnosticsRecord, Dissipation};
use crate::error::{Error, Result};
use crate::mesh::{Field, Grid};
use crate::noise::NoiseSpec;
use crate::physics::ModelParams;
use crate::scheme::{PathRecord, PathSummary, SchemeConfig, StopCause, Stepper};

/// `u₀ = mean + amplitude · cos(2π mode x / L)`, interpolated at the nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialLaw {
    pub mean: f64,
    pub amplitude: f64,
    pub mode: u32,
}

impl Default for InitialLaw {
    fn default() -> Self {
        Self {
            mean: 2.0,
            amplitude: 0.1,
            mode: 1,
        }
    }
}

impl InitialLaw {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.mean > self.amplitude && self.mean.is_finite()) {
            return Err(Error::config(
                "ensemble.initial",
                format!("need mean > amplitude ≥ 0, got mean {} and amplitude {}", self.mean, self.amplitude),
            ));
        }
        Ok(())
    }

    pub fn sample(&self, grid: Grid) -> Field {
        let k = 2.0 * PI * self.mode as f64 / grid.length();
        Field::from_fn(grid, |i| self.mean + self.amplitude * (k * grid.x(i)).cos())
    }
}

fn default_moment_orders() -> Vec<f64> {
    vec![1.0, 2.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n_paths: usize,
    #[serde(default = "default_moment_orders")]
    pub moment_orders: Vec<f64>,
    /// Mesh sizes for refinement studies; each must divide the period.
    #[serde(default)]
    pub h_list: Vec<f64>,
    /// Worker threads; all available cores when absent.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub initial: InitialLaw,
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::config("ensemble.n_paths", "must be at least 1"));
        }
        if self.moment_orders.is_empty() {
            return Err(Error::config("ensemble.moment_orders", "must not be empty"));
        }
        if let Some(p) = self.moment_orders.iter().find(|p| !(**p >= 1.0)) {
            return Err(Error::config("ensemble.moment_orders", format!("orders must be ≥ 1, got {p}")));
        }
        if self.workers == Some(0) {
            return Err(Error::config("ensemble.workers", "must be at least 1"));
        }
        self.initial.validate()
    }
}

/// Node count for mesh size `h` on a period of `length`.
pub fn nodes_for(length: f64, h: f64) -> Result<usize> {
    let ratio = length / h;
    let nodes = ratio.round();
    if !(h > 0.0) || (ratio - nodes).abs() > 1e-9 * ratio || nodes < 3.0 {
        return Err(Error::config(
            "ensemble.h_list",
            format!("mesh size {h} does not divide the period {length} into at least 3 elements"),
        ));
    }
    Ok(nodes as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Moment {
    pub order: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub value: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantityEstimate {
    pub name: String,
    #[serde(serialize_with = "finite_or_null")]
    pub mean: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub stderr: f64,
    pub moments: Vec<Moment>,
}

/// Sample mean and its standard error `sd / √N`.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (m, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (m, (var / n as f64).sqrt())
}

fn estimate(name: &str, xs: &[f64], orders: &[f64]) -> QuantityEstimate {
    let (mean, stderr) = mean_and_stderr(xs);
    let moments = orders
        .iter()
        .map(|&order| {
            let powered: Vec<f64> = xs.iter().map(|x| x.abs().powf(order)).collect();
            let (value, stderr) = mean_and_stderr(&powered);
            Moment { order, value, stderr }
        })
        .collect();
    QuantityEstimate {
        name: name.to_string(),
        mean,
        stderr,
        moments,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StoppingStats {
    pub fraction_stopped: f64,
    pub energy: usize,
    pub mass: usize,
    /// Stopping times of the stopped paths, in path order.
    pub times: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExcludedPath {
    pub path: u64,
    pub error: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridInfo {
    pub length: f64,
    pub nodes: usize,
    pub h: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleReport {
    pub schema: u32,
    pub grid: GridInfo,
    pub master_seed: u64,
    pub n_paths: usize,
    pub excluded: Vec<ExcludedPath>,
    pub quantities: Vec<QuantityEstimate>,
    pub stopping: StoppingStats,
    /// Estimate of `E[sup_t |ū(t) - ū₀|]`.
    pub mass_drift: QuantityEstimate,
    pub oscillation_checks: usize,
    pub oscillation_violations: usize,
    pub paths: Vec<PathSummary>,
}

impl EnsembleReport {
    pub fn quantity(&self, name: &str) -> Option<&QuantityEstimate> {
        self.quantities.iter().find(|q| q.name == name)
    }
}

/// A finished ensemble: the report plus the sampled trajectories of the
/// paths that completed.
#[derive(Clone, Debug)]
pub struct EnsembleRun {
    pub report: EnsembleReport,
    pub records: Vec<PathRecord>,
}

pub const QUANTITY_NAMES: [&str; 9] = [
    "sup_r",
    "int_q_pressure",
    "int_q_laplacian",
    "int_q_quartic",
    "int_q_weighted_lap",
    "int_q_singular",
    "int_q_log",
    "int_q_entropy_diss",
    "int_ito_energy",
];

fn quantity_values(s: &PathSummary) -> [f64; 9] {
    let d: [f64; 7] = Dissipation::as_array(&s.integrals);
    [s.sup_r, d[0], d[1], d[2], d[3], d[4], d[5], d[6], s.ito_integral]
}

/// Builds the report from per-path outcomes given in path order.
pub fn summarize(
    grid: Grid,
    master_seed: u64,
    orders: &[f64],
    outcomes: Vec<std::result::Result<PathRecord, ExcludedPath>>,
) -> EnsembleRun {
    let n_paths = outcomes.len();
    let mut records = Vec::new();
    let mut excluded = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => records.push(r),
            Err(e) => excluded.push(e),
        }
    }
    let summaries: Vec<PathSummary> = records.iter().map(|r| r.summary.clone()).collect();
    let quantities = QUANTITY_NAMES
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let xs: Vec<f64> = summaries.iter().map(|s| quantity_values(s)[k]).collect();
            estimate(name, &xs, orders)
        })
        .collect();
    let drift: Vec<f64> = summaries.iter().map(|s| s.sup_mass_drift).collect();
    let stopped: Vec<_> = summaries.iter().filter_map(|s| s.stop).collect();
    let stopping = StoppingStats {
        fraction_stopped: if summaries.is_empty() {
            0.0
        } else {
            stopped.len() as f64 / summaries.len() as f64
        },
        energy: stopped.iter().filter(|s| s.cause == StopCause::Energy).count(),
        mass: stopped.iter().filter(|s| s.cause == StopCause::Mass).count(),
        times: stopped.iter().map(|s| s.time).collect(),
    };
    let report = EnsembleReport {
        schema: 1,
        grid: GridInfo {
            length: grid.length(),
            nodes: grid.nodes(),
            h: grid.h(),
        },
        master_seed,
        n_paths,
        excluded,
        quantities,
        stopping,
        mass_drift: estimate("sup_mass_drift", &drift, orders),
        oscillation_checks: summaries.iter().map(|s| s.oscillation_checks).sum(),
        oscillation_violations: summaries.iter().map(|s| s.oscillation_violations).sum(),
        paths: summaries,
    };
    EnsembleRun { report, records }
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w);
    }
    b.build()
        .map_err(|e| Error::config("ensemble.workers", e.to_string()))
}

/// Runs paths `0..n_paths` with streams derived from `noise.seed`.
pub fn run_ensemble(
    cfg: &EnsembleConfig,
    params: &ModelParams,
    scheme: &SchemeConfig,
    noise: &NoiseSpec,
    grid: Grid,
) -> Result<EnsembleRun> {
    cfg.initial.validate()?;
    let stepper = Stepper::new(*params, scheme.clone(), noise.clone(), grid)?;
    let u0 = cfg.initial.sample(grid);
    let seed = noise.seed;
    let outcomes = pool(cfg.workers)?.install(|| {
        (0..cfg.n_paths as u64)
            .into_par_iter()
            .map(|path| {
                stepper
                    .run_path(u0.clone(), seed, path)
                    .map_err(|e| ExcludedPath {
                        path,
                        error: e.to_string(),
                    })
            })
            .collect::<Vec<_>>()
    });
    Ok(summarize(grid, seed, &cfg.moment_orders, outcomes))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MassLevel {
    pub h: f64,
    pub nodes: usize,
    #[serde(serialize_with = "finite_or_null")]
    pub drift: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub stderr: f64,
    pub fraction_stopped: f64,
    pub excluded: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MassStudy {
    pub schema: u32,
    pub levels: Vec<MassLevel>,
    /// Least-squares slope of `ln drift` against `ln h`.
    #[serde(serialize_with = "finite_or_null")]
    pub slope: f64,
}

/// Least-squares slope of `ln y` against `ln x`; NaN if any `y` is not positive.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    if ys.iter().any(|y| !(*y > 0.0)) || xs.len() < 2 {
        return f64::NAN;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Runs the ensemble at every mesh size of `cfg.h_list` and fits the
/// log–log slope of the expected sup mass drift.
pub fn mass_drift_study(
    cfg: &EnsembleConfig,
    params: &ModelParams,
    scheme: &SchemeConfig,
    noise: &NoiseSpec,
    length: f64,
) -> Result<MassStudy> {
    if cfg.h_list.len() < 3 {
        return Err(Error::TooFew {
            what: "mesh levels",
            needed: 3,
            got: cfg.h_list.len(),
        });
    }
    let mut levels = Vec::with_capacity(cfg.h_list.len());
    for &h in &cfg.h_list {
        let grid = Grid::new(length, nodes_for(length, h)?)?;
        let run = run_ensemble(cfg, params, scheme, noise, grid)?;
        let r = &run.report;
        levels.push(MassLevel {
            h: grid.h(),
            nodes: grid.nodes(),
            drift: r.mass_drift.mean,
            stderr: r.mass_drift.stderr,
            fraction_stopped: r.stopping.fraction_stopped,
            excluded: r.excluded.len(),
        });
    }
    let hs: Vec<f64> = levels.iter().map(|l| l.h).collect();
    let ds: Vec<f64> = levels.iter().map(|l| l.drift).collect();
    Ok(MassStudy {
        schema: 1,
        slope: loglog_slope(&hs, &ds),
        levels,
    })
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `report.json`, `trajectories.csv` and `diagnostics.csv` to `dir`.
pub fn persist(run: &EnsembleRun, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let report = dir.join("report.json");
    write_json(&report, &run.report)?;

    let traj = dir.join("trajectories.csv");
    let mut w = csv_writer(&traj)?;
    w.write_record(["path", "t", "node", "x", "u"])
        .map_err(|e| csv_err(&traj, e))?;
    let grid = Grid::new(run.report.grid.length, run.report.grid.nodes.max(3))?;
    for rec in &run.records {
        let path = rec.summary.path.to_string();
        for s in &rec.samples {
            for (k, u) in s.u.iter().enumerate() {
                w.write_record([path.clone(), fmt(s.time), k.to_string(), fmt(grid.x(k)), fmt(*u)])
                    .map_err(|e| csv_err(&traj, e))?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(&traj, e))?;

    let diag = dir.join("diagnostics.csv");
    let mut w = csv_writer(&diag)?;
    let mut header = vec!["path"];
    header.extend(DiagnosticsRecord::COLUMNS);
    w.write_record(&header).map_err(|e| csv_err(&diag, e))?;
    for rec in &run.records {
        for s in &rec.samples {
            let mut row = vec![rec.summary.path.to_string()];
            row.extend(s.diagnostics.as_row().iter().map(|&x| fmt(x)));
            w.write_record(&row).map_err(|e| csv_err(&diag, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(&diag, e))?;
    Ok(vec![report, traj, diag])
}

/// One sampled field read back from `trajectories.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub path: u64,
    pub t: f64,
    pub node: usize,
    pub x: f64,
    pub u: f64,
}

pub fn read_trajectories(path: &Path) -> Result<Vec<TrajectoryRow>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let bad = |what: &str| Error::io(path, std::io::Error::other(format!("malformed {what}")));
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let get = |i: usize| row.get(i).ok_or_else(|| bad("row"));
        out.push(TrajectoryRow {
            path: get(0)?.parse().map_err(|_| bad("path"))?,
            t: get(1)?.parse().map_err(|_| bad("t"))?,
            node: get(2)?.parse().map_err(|_| bad("node"))?,
            x: get(3)?.parse().map_err(|_| bad("x"))?,
            u: get(4)?.parse().map_err(|_| bad("u"))?,
        });
    }
    Ok(out)
}
