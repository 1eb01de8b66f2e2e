use std::f64::consts::PI;

use thinfilm::ensemble::{persist, read_trajectories, run_ensemble, EnsembleConfig, InitialLaw};
use thinfilm::mesh::{mean, Field, Grid};
use thinfilm::noise::NoiseSpec;
use thinfilm::physics::ModelParams;
use thinfilm::scheme::{SchemeConfig, Stepper};

const PARAMS: ModelParams = ModelParams {
    n: 2.5,
    p: 4.0,
    c_f: 0.5,
    kappa: 1.0,
    s_reg: 0.02,
};

fn scheme(dt: f64) -> SchemeConfig {
    SchemeConfig {
        t_max: 0.02,
        dt,
        e_max_h: None,
        implicit_theta: 1.0,
        max_dt_halvings: 8,
        positivity_guard: 0.5,
        sample_every: 1,
    }
}

fn final_field(dt: f64, grid: Grid) -> Vec<f64> {
    let stepper = Stepper::new(PARAMS, scheme(dt), NoiseSpec::silent(0), grid).unwrap();
    let u0 = Field::from_fn(grid, |k| 2.0 + 0.1 * (2.0 * PI * grid.x(k)).cos());
    let rec = stepper.run_path(u0, 0, 0).unwrap();
    rec.samples.last().unwrap().u.clone()
}

#[test]
fn deterministic_path_converges_at_first_order_in_dt() {
    let grid = Grid::new(1.0, 32).unwrap();
    let fields: Vec<Vec<f64>> = [4e-4, 2e-4, 1e-4].iter().map(|&dt| final_field(dt, grid)).collect();
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let coarse = diff(&fields[0], &fields[1]);
    let fine = diff(&fields[1], &fields[2]);
    let ratio = coarse / fine;
    assert!(coarse > 0.0 && (1.6..2.6).contains(&ratio), "ratio {ratio}");
}

#[test]
fn silent_path_conserves_mean_to_rounding() {
    let grid = Grid::new(1.0, 64).unwrap();
    let params = ModelParams { s_reg: 0.0, ..PARAMS };
    let stepper = Stepper::new(params, scheme(1e-4), NoiseSpec::silent(0), grid).unwrap();
    let u0 = Field::from_fn(grid, |k| 2.0 + 0.1 * (2.0 * PI * grid.x(k)).sin());
    let m0 = mean(&u0);
    let rec = stepper.run_path(u0, 0, 0).unwrap();
    assert!(rec.summary.stop.is_none());
    assert!(rec.summary.sup_mass_drift <= 1e-13);
    let last = &rec.samples.last().unwrap().u;
    let m1 = last.iter().sum::<f64>() / last.len() as f64;
    assert!((m1 - m0).abs() <= 1e-13);
}

#[test]
fn persisted_trajectories_round_trip() {
    let grid = Grid::new(1.0, 16).unwrap();
    let noise = NoiseSpec {
        lambdas: vec![(0, 0.01), (1, 0.01), (-1, 0.01)],
        cutoff: None,
        seed: 3,
    };
    let cfg = EnsembleConfig {
        n_paths: 3,
        moment_orders: vec![1.0, 2.0],
        h_list: vec![],
        workers: Some(2),
        output_dir: None,
        initial: InitialLaw::default(),
    };
    let sch = SchemeConfig { t_max: 0.002, sample_every: 5, ..scheme(1e-4) };
    let run = run_ensemble(&cfg, &PARAMS, &sch, &noise, grid).unwrap();
    let dir = tempfile::tempdir().unwrap();
    persist(&run, dir.path()).unwrap();
    let rows = read_trajectories(&dir.path().join("trajectories.csv")).unwrap();
    let expected: usize = run.records.iter().map(|r| r.samples.len() * 16).sum();
    assert_eq!(rows.len(), expected);
    let first = &run.records[0].samples[0];
    assert_eq!(rows[0].u, first.u[0]);
}
