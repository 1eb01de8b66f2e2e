//! Spectral Q-Wiener noise: trigonometric basis, stochastic coefficients,
//! seeded per-mode streams, and the scheme constants derived from the
//! amplitudes.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Field, Grid};
use crate::physics::mobility_root_field;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    /// `(ℓ, λ_ℓ)` pairs; absent modes have zero amplitude.
    pub lambdas: Vec<(i64, f64)>,
    /// Frequency cutoff `N_h`; defaults to `L_h / 2`.
    #[serde(default)]
    pub cutoff: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseSpec {
    pub fn silent(seed: u64) -> Self {
        Self {
            lambdas: Vec::new(),
            cutoff: None,
            seed,
        }
    }

    pub fn lambda(&self, ell: i64) -> f64 {
        self.lambdas
            .iter()
            .find(|(l, _)| *l == ell)
            .map_or(0.0, |&(_, v)| v)
    }

    pub fn validate(&self) -> Result<()> {
        for (idx, &(ell, lam)) in self.lambdas.iter().enumerate() {
            if !(lam >= 0.0 && lam.is_finite()) {
                return Err(Error::config(
                    format!("noise.lambdas[{idx}]"),
                    format!("amplitude for mode {ell} must be finite and nonnegative, got {lam}"),
                ));
            }
            if self.lambdas[..idx].iter().any(|(l, _)| *l == ell) {
                return Err(Error::config(
                    format!("noise.lambdas[{idx}]"),
                    format!("mode {ell} listed twice"),
                ));
            }
            if self.lambda(-ell) != lam {
                return Err(Error::config(
                    format!("noise.lambdas[{idx}]"),
                    format!(
                        "unbalanced amplitudes: λ_{ell} = {lam} but λ_{} = {}",
                        -ell,
                        self.lambda(-ell)
                    ),
                ));
            }
        }
        if self.cutoff == Some(0) {
            return Err(Error::config("noise.cutoff", "must be positive"));
        }
        Ok(())
    }

    pub fn effective_cutoff(&self, nodes: usize) -> usize {
        self.cutoff.unwrap_or(nodes / 2)
    }

    /// Nonzero modes with `|ℓ| ≤ N_h`, in increasing `ℓ`.
    pub fn active_modes(&self, nodes: usize) -> Vec<(i64, f64)> {
        let cut = self.effective_cutoff(nodes) as i64;
        let mut modes: Vec<_> = self
            .lambdas
            .iter()
            .copied()
            .filter(|&(l, lam)| l.abs() <= cut && lam != 0.0)
            .collect();
        modes.sort_by_key(|&(l, _)| l);
        modes
    }

    /// The spec restricted to the modes resolved on `nodes` nodes.
    pub fn truncated(&self, nodes: usize) -> NoiseSpec {
        NoiseSpec {
            lambdas: self.active_modes(nodes),
            cutoff: self.cutoff,
            seed: self.seed,
        }
    }

    /// `Σ ℓ⁴ λ_ℓ²`.
    pub fn coloring_moment(&self) -> f64 {
        self.lambdas
            .iter()
            .map(|&(l, lam)| (l as f64).powi(4) * lam * lam)
            .sum()
    }
}

/// `g_ℓ(x)`.
pub fn basis_eval(ell: i64, x: f64, length: f64) -> f64 {
    let k = 2.0 * PI * ell.unsigned_abs() as f64 / length;
    if ell > 0 {
        (2.0 / length).sqrt() * (k * x).sin()
    } else if ell == 0 {
        1.0 / length.sqrt()
    } else {
        (2.0 / length).sqrt() * (k * x).cos()
    }
}

/// `C_Strat = ½ (n²/4) (λ_0²/L + Σ_{ℓ≥1} 2λ_ℓ²/L)`.
pub fn c_strat(spec: &NoiseSpec, n: f64, length: f64) -> Result<f64> {
    spec.validate()?;
    let l0 = spec.lambda(0);
    let tail: f64 = spec
        .lambdas
        .iter()
        .filter(|(l, _)| *l >= 1)
        .map(|&(_, lam)| 2.0 * lam * lam / length)
        .sum();
    Ok(0.5 * (n * n / 4.0) * (l0 * l0 / length + tail))
}

fn check_n(n: f64) -> Result<()> {
    if n > 2.0 && n < 3.0 {
        Ok(())
    } else {
        Err(Error::config("model.n", format!("must lie in (2, 3), got {n}")))
    }
}

/// Lower bound on the regularization `S`, with `C_osc = 1 + √(2 c_F)`.
pub fn s_min(c_strat: f64, n: f64, c_f: f64) -> Result<f64> {
    check_n(n)?;
    let c_osc = 1.0 + (2.0 * c_f).sqrt();
    let first = 3.0 * c_osc.powf(4.0 - n) / (1.0 + c_osc).powf(n - 4.0) * (n - 2.0) / (3.0 - n);
    let second = c_osc.powf(n - 2.0) - 1.0;
    Ok(c_strat * (first + second))
}

/// `S_opt = C_Strat (9/4)(n-2)² / ((3-n)(2n-3))`.
pub fn s_opt(c_strat: f64, n: f64) -> Result<f64> {
    check_n(n)?;
    Ok(c_strat * 2.25 * (n - 2.0).powi(2) / ((3.0 - n) * (2.0 * n - 3.0)))
}

fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t.sin() / t
    }
}

/// `(sin t - t cos t)/t²`; the power series `Σ_{k≥1} (-1)^{k+1} 2k t^{2k-1}/(2k+1)!`
/// avoids cancellation for `|t| < 1`.
fn first_moment_kernel(t: f64) -> f64 {
    if t.abs() < 1.0 {
        let t2 = t * t;
        let mut term = t / 6.0; // t^{2k-1}/(2k+1)! at k = 1
        let mut sum = 0.0;
        for k in 1..=12 {
            let kf = k as f64;
            sum += 2.0 * kf * term;
            term *= -t2 / ((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
        }
        sum
    } else {
        (t.sin() - t * t.cos()) / (t * t)
    }
}

/// Per element `j` (between nodes `j` and `j+1`): `(∫ φ_L g_ℓ, ∫ φ_R g_ℓ)`,
/// where `φ_L`, `φ_R` are the hat functions of the left and right node.
pub fn element_moments(ell: i64, grid: &Grid) -> (Vec<f64>, Vec<f64>) {
    let (h, length) = (grid.h(), grid.length());
    let nodes = grid.nodes();
    if ell == 0 {
        let half = 0.5 * h / length.sqrt();
        return (vec![half; nodes], vec![half; nodes]);
    }
    let amp = (2.0 / length).sqrt();
    let k = 2.0 * PI * ell.unsigned_abs() as f64 / length;
    let theta = 0.5 * k * h;
    let s1 = h * sinc(theta);
    let s2 = 0.5 * h * h * first_moment_kernel(theta);
    let mut left = Vec::with_capacity(nodes);
    let mut right = Vec::with_capacity(nodes);
    for j in 0..nodes {
        let m = grid.x(j) + 0.5 * h;
        let (sn, cs) = (k * m).sin_cos();
        let (i0, i1) = if ell > 0 {
            (sn * s1, cs * s2)
        } else {
            (cs * s1, -sn * s2)
        };
        left.push(amp * (0.5 * i0 - i1 / h));
        right.push(amp * (0.5 * i0 + i1 / h));
    }
    (left, right)
}

/// `W_j = ∫_{E_j} M_2^h(u) g` from nodal `M_2` and element moments.
fn element_weights(m2: &[f64], left: &[f64], right: &[f64], grid: &Grid) -> Vec<f64> {
    (0..grid.nodes())
        .map(|j| m2[j] * left[j] + m2[grid.next(j)] * right[j])
        .collect()
}

fn divergence_of_weights(w: &[f64], grid: &Grid) -> Field {
    let h2 = grid.h() * grid.h();
    Field::from_fn(*grid, |i| (w[i] - w[grid.prev(i)]) / h2)
}

/// `Z_i(λ g_ℓ) = -(λ/h) ∫ M_2^h(u) g_ℓ (e_i)_x dx`.
pub fn stochastic_coeff(u: &Field, ell: i64, lambda: f64, n: f64) -> Result<Field> {
    u.ensure_positive()?;
    let grid = *u.grid();
    let m2 = mobility_root_field(u, n);
    let (left, right) = element_moments(ell, &grid);
    let mut w = element_weights(m2.values(), &left, &right, &grid);
    w.iter_mut().for_each(|x| *x *= lambda);
    Ok(divergence_of_weights(&w, &grid))
}

#[derive(Clone, Debug)]
struct ModeTable {
    ell: i64,
    lambda: f64,
    left: Vec<f64>,
    right: Vec<f64>,
}

/// Precomputed element moments for every active mode on one grid.
#[derive(Clone, Debug)]
pub struct NoiseOperator {
    grid: Grid,
    n: f64,
    modes: Vec<ModeTable>,
}

impl NoiseOperator {
    pub fn new(spec: &NoiseSpec, grid: Grid, n: f64) -> Result<Self> {
        spec.validate()?;
        let modes = spec
            .active_modes(grid.nodes())
            .into_iter()
            .map(|(ell, lambda)| {
                let (left, right) = element_moments(ell, &grid);
                ModeTable {
                    ell,
                    lambda,
                    left,
                    right,
                }
            })
            .collect();
        Ok(Self { grid, n, modes })
    }

    pub fn modes(&self) -> Vec<(i64, f64)> {
        self.modes.iter().map(|m| (m.ell, m.lambda)).collect()
    }

    pub fn is_silent(&self) -> bool {
        self.modes.is_empty()
    }

    /// `Σ_ℓ Z(λ_ℓ g_ℓ) ΔW_ℓ` for Brownian increments in mode order.
    pub fn increment(&self, u: &Field, dw: &[f64]) -> Result<Field> {
        self.grid.check_same(u.grid())?;
        if self.modes.is_empty() {
            return Ok(Field::zeros(self.grid));
        }
        u.ensure_positive()?;
        let m2 = mobility_root_field(u, self.n);
        let nodes = self.grid.nodes();
        let mut a = vec![0.0; nodes];
        let mut b = vec![0.0; nodes];
        for (mode, &d) in self.modes.iter().zip(dw) {
            let s = mode.lambda * d;
            for j in 0..nodes {
                a[j] += s * mode.left[j];
                b[j] += s * mode.right[j];
            }
        }
        let w = element_weights(m2.values(), &a, &b, &self.grid);
        Ok(divergence_of_weights(&w, &self.grid))
    }

    /// Unit-amplitude coefficients `Z(g_ℓ)` for each active mode.
    pub fn unit_coefficients(&self, u: &Field) -> Result<Vec<Field>> {
        u.ensure_positive()?;
        let m2 = mobility_root_field(u, self.n);
        Ok(self
            .modes
            .iter()
            .map(|mode| {
                let w = element_weights(m2.values(), &mode.left, &mode.right, &self.grid);
                divergence_of_weights(&w, &self.grid)
            })
            .collect())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream id for mode `ℓ`, independent of the grid.
fn mode_stream(ell: i64) -> u64 {
    ((ell << 1) ^ (ell >> 63)) as u64
}

/// One independent normal stream per mode, owned by a single path.
#[derive(Clone, Debug)]
pub struct PathStreams {
    rngs: Vec<ChaCha8Rng>,
}

impl PathStreams {
    pub fn new(master_seed: u64, path: u64, modes: &[(i64, f64)]) -> Self {
        let key = splitmix64(master_seed ^ splitmix64(path));
        let rngs = modes
            .iter()
            .map(|&(ell, _)| {
                let mut rng = ChaCha8Rng::seed_from_u64(key);
                rng.set_stream(mode_stream(ell));
                rng
            })
            .collect();
        Self { rngs }
    }

    pub fn len(&self) -> usize {
        self.rngs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rngs.is_empty()
    }

    /// One standard normal per mode, in mode order.
    pub fn normals(&mut self) -> Vec<f64> {
        self.rngs
            .iter_mut()
            .map(|r| StandardNormal.sample(r))
            .collect()
    }
}

/// `Σ_ℓ Z(λ_ℓ g_ℓ) ξ_ℓ √dt` with fresh normals from `streams`.
pub fn noise_increment(
    op: &NoiseOperator,
    u: &Field,
    dt: f64,
    streams: &mut PathStreams,
) -> Result<Field> {
    if streams.len() != op.modes.len() {
        return Err(Error::config(
            "noise",
            format!("stream count {} does not match {} modes", streams.len(), op.modes.len()),
        ));
    }
    let dw: Vec<f64> = streams.normals().into_iter().map(|x| x * dt.sqrt()).collect();
    op.increment(u, &dw)
}
