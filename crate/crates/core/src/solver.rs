//! Direct solver for symmetric positive definite cyclic banded systems.
//!
//! The matrix is split as `[A11 A12; A12ᵀ A22]` with `A22` the trailing
//! `bw × bw` block, so `A11` is an ordinary band matrix. `A11` gets a band
//! Cholesky factor and the periodic corners are absorbed by a dense Schur
//! complement. Small systems fall back to dense Cholesky.

use crate::error::{Error, Result};

/// Symmetric matrix with `A[i][(i + d) mod N]` stored for `0 ≤ d ≤ bw`.
#[derive(Clone, Debug)]
pub struct CyclicBanded {
    n: usize,
    bw: usize,
    upper: Vec<f64>,
    dense: Option<Vec<f64>>,
}

impl CyclicBanded {
    pub fn zeros(n: usize, bw: usize) -> Self {
        let dense = (n < 2 * bw + 2).then(|| vec![0.0; n * n]);
        Self {
            n,
            bw,
            upper: vec![0.0; n * (bw + 1)],
            dense,
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Accumulate `v` into entry `(i, j)` of the full matrix. Callers add
    /// every nonzero of the full symmetric matrix exactly once.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = (i % self.n, j % self.n);
        if let Some(d) = self.dense.as_mut() {
            d[i * self.n + j] += v;
            return;
        }
        let off = (j + self.n - i) % self.n;
        if off <= self.bw {
            self.upper[i * (self.bw + 1) + off] += v;
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = (i % self.n, j % self.n);
        if let Some(d) = self.dense.as_ref() {
            return d[i * self.n + j];
        }
        let off = (j + self.n - i) % self.n;
        if off <= self.bw {
            self.upper[i * (self.bw + 1) + off]
        } else if self.n - off <= self.bw {
            self.upper[j * (self.bw + 1) + (self.n - off)]
        } else {
            0.0
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        if self.dense.is_some() {
            return (0..n)
                .map(|i| (0..n).map(|j| self.get(i, j) * x[j]).sum())
                .collect();
        }
        let bw = self.bw as isize;
        (0..n)
            .map(|i| {
                (-bw..=bw)
                    .map(|d| {
                        let j = (i as isize + d).rem_euclid(n as isize) as usize;
                        self.get(i, j) * x[j]
                    })
                    .sum()
            })
            .collect()
    }

    pub fn factor(&self) -> Result<CyclicCholesky> {
        if self.dense.is_some() {
            let a: Vec<f64> = (0..self.n * self.n)
                .map(|k| self.get(k / self.n, k % self.n))
                .collect();
            return Ok(CyclicCholesky(Factor::Dense(DenseCholesky::new(a, self.n)?)));
        }
        let (n, bw) = (self.n, self.bw);
        let m = n - bw;
        // Band factor of A11: l[i*(bw+1) + k] = L[i][i-k].
        let mut l = vec![0.0; m * (bw + 1)];
        for i in 0..m {
            for k in (0..=bw.min(i)).rev() {
                let j = i - k;
                let mut s = self.get(i, j);
                for t in 1..=(bw - k).min(j) {
                    // L[i][j-t] * L[j][j-t]
                    s -= l[i * (bw + 1) + k + t] * l[j * (bw + 1) + t];
                }
                if k == 0 {
                    if !(s > 0.0) {
                        return Err(Error::Solver(format!(
                            "matrix not positive definite at pivot {i} ({s:e})"
                        )));
                    }
                    l[i * (bw + 1)] = s.sqrt();
                } else {
                    l[i * (bw + 1) + k] = s / l[j * (bw + 1)];
                }
            }
        }
        let band = BandFactor { l, m, bw };
        // Y = L⁻¹ A12, stored column-major (bw columns of length m).
        let mut y = vec![0.0; m * bw];
        for c in 0..bw {
            let col: Vec<f64> = (0..m).map(|i| self.get(i, m + c)).collect();
            let solved = band.forward(&col);
            y[c * m..(c + 1) * m].copy_from_slice(&solved);
        }
        let mut s = vec![0.0; bw * bw];
        for a in 0..bw {
            for b in 0..bw {
                let dot: f64 = (0..m).map(|i| y[a * m + i] * y[b * m + i]).sum();
                s[a * bw + b] = self.get(m + a, m + b) - dot;
            }
        }
        let schur = DenseCholesky::new(s, bw)?;
        Ok(CyclicCholesky(Factor::Banded { band, y, schur }))
    }
}

#[derive(Clone, Debug)]
struct BandFactor {
    l: Vec<f64>,
    m: usize,
    bw: usize,
}

impl BandFactor {
    fn forward(&self, r: &[f64]) -> Vec<f64> {
        let (m, bw) = (self.m, self.bw);
        let mut x = vec![0.0; m];
        for i in 0..m {
            let mut s = r[i];
            for k in 1..=bw.min(i) {
                s -= self.l[i * (bw + 1) + k] * x[i - k];
            }
            x[i] = s / self.l[i * (bw + 1)];
        }
        x
    }

    fn backward(&self, r: &[f64]) -> Vec<f64> {
        let (m, bw) = (self.m, self.bw);
        let mut x = vec![0.0; m];
        for i in (0..m).rev() {
            let mut s = r[i];
            for k in 1..=bw.min(m - 1 - i) {
                s -= self.l[(i + k) * (bw + 1) + k] * x[i + k];
            }
            x[i] = s / self.l[i * (bw + 1)];
        }
        x
    }
}

#[derive(Clone, Debug)]
struct DenseCholesky {
    l: Vec<f64>,
    n: usize,
}

impl DenseCholesky {
    fn new(mut a: Vec<f64>, n: usize) -> Result<Self> {
        for j in 0..n {
            let mut d = a[j * n + j];
            for k in 0..j {
                d -= a[j * n + k] * a[j * n + k];
            }
            if !(d > 0.0) {
                return Err(Error::Solver(format!(
                    "matrix not positive definite at pivot {j} ({d:e})"
                )));
            }
            let d = d.sqrt();
            a[j * n + j] = d;
            for i in j + 1..n {
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= a[i * n + k] * a[j * n + k];
                }
                a[i * n + j] = s / d;
            }
        }
        Ok(Self { l: a, n })
    }

    fn solve(&self, r: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = r.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= self.l[i * n + k] * y[k];
            }
            y[i] /= self.l[i * n + i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= self.l[k * n + i] * y[k];
            }
            y[i] /= self.l[i * n + i];
        }
        y
    }
}

#[derive(Clone, Debug)]
enum Factor {
    Dense(DenseCholesky),
    Banded {
        band: BandFactor,
        y: Vec<f64>,
        schur: DenseCholesky,
    },
}

#[derive(Clone, Debug)]
pub struct CyclicCholesky(Factor);

impl CyclicCholesky {
    pub fn solve(&self, r: &[f64]) -> Vec<f64> {
        match &self.0 {
            Factor::Dense(d) => d.solve(r),
            Factor::Banded { band, y, schur } => {
                let (m, bw) = (band.m, band.bw);
                let y1 = band.forward(&r[..m]);
                let rhs2: Vec<f64> = (0..bw)
                    .map(|c| {
                        let dot: f64 = (0..m).map(|i| y[c * m + i] * y1[i]).sum();
                        r[m + c] - dot
                    })
                    .collect();
                let z2 = schur.solve(&rhs2);
                let mut t = y1;
                for (c, &zc) in z2.iter().enumerate() {
                    for i in 0..m {
                        t[i] -= y[c * m + i] * zc;
                    }
                }
                let mut x = band.backward(&t);
                x.extend_from_slice(&z2);
                x
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_spd(n: usize, bw: usize, seed: u64) -> CyclicBanded {
        // Diagonally dominant cyclic band with pseudo-random off-diagonals.
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut a = CyclicBanded::zeros(n, bw);
        let mut offs = vec![vec![0.0; bw + 1]; n];
        for row in offs.iter_mut() {
            for v in row.iter_mut().skip(1) {
                *v = next();
            }
        }
        for i in 0..n {
            let mut diag = 1.0 + next().abs();
            for d in 1..=bw {
                diag += offs[i][d].abs() + offs[(i + n - d) % n][d].abs();
                a.add(i, i + d, offs[i][d]);
                a.add(i + d, i, offs[i][d]);
            }
            a.add(i, i, diag);
        }
        a
    }

    #[test]
    fn solves_banded_and_dense_sizes() {
        for &(n, bw) in &[(4, 3), (7, 3), (8, 3), (9, 3), (33, 3), (256, 3), (5, 1), (64, 2)] {
            let a = random_spd(n, bw, n as u64 * 31 + bw as u64);
            let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() + 0.1).collect();
            let b = a.mul_vec(&x_true);
            let x = a.factor().unwrap().solve(&b);
            let err = x
                .iter()
                .zip(&x_true)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "n={n} bw={bw} err={err}");
        }
    }

    #[test]
    fn rejects_indefinite() {
        let mut a = CyclicBanded::zeros(16, 1);
        for i in 0..16 {
            a.add(i, i, -1.0);
        }
        assert!(matches!(a.factor(), Err(Error::Solver(_))));
    }

    #[test]
    fn symmetric_lookup() {
        let mut a = CyclicBanded::zeros(10, 2);
        a.add(9, 1, 2.5);
        a.add(1, 9, 2.5);
        assert_eq!(a.get(1, 9), 2.5);
        assert_eq!(a.get(9, 1), 2.5);
        assert_eq!(a.get(0, 5), 0.0);
    }
}
