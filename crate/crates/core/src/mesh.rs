//! Periodic P1 finite-element space on a uniform 1-D mesh.
//!
//! Internal index `k` (0-based) is the node at `x = (k + 1) h`, so the last
//! internal node sits at `x = L` and plays the role of node 0 under the
//! periodic wrap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    length: f64,
    nodes: usize,
    h: f64,
}

impl Grid {
    pub fn new(length: f64, nodes: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        if nodes < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 nodes, got {nodes}")));
        }
        Ok(Self {
            length,
            nodes,
            h: length / nodes as f64,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Coordinate of internal node `k`.
    pub fn x(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.h
    }

    #[inline]
    pub fn next(&self, k: usize) -> usize {
        if k + 1 == self.nodes {
            0
        } else {
            k + 1
        }
    }

    #[inline]
    pub fn prev(&self, k: usize) -> usize {
        if k == 0 {
            self.nodes - 1
        } else {
            k - 1
        }
    }

    /// Periodic index reduction for arbitrary signed offsets.
    #[inline]
    pub fn wrap(&self, k: isize) -> usize {
        k.rem_euclid(self.nodes as isize) as usize
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.nodes,
                left_len: self.length,
                right: other.nodes,
                right_len: other.length,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nodes() {
            return Err(Error::InvalidGrid(format!(
                "field has {} values but grid has {} nodes",
                values.len(),
                grid.nodes()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.nodes()],
        }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(usize) -> f64) -> Self {
        Self {
            grid,
            values: (0..grid.nodes()).map(&mut f).collect(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Periodic access: `at(k)` and `at(k + L_h)` agree.
    #[inline]
    pub fn at(&self, k: isize) -> f64 {
        self.values[self.grid.wrap(k)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Cyclic relabeling: result at `k` is the value at `k + shift`.
    pub fn shifted(&self, shift: isize) -> Field {
        Field::from_fn(self.grid, |k| self.at(k as isize + shift))
    }

    /// First node with a nonpositive value.
    pub fn ensure_positive(&self) -> Result<()> {
        match self.values.iter().position(|&v| !(v > 0.0)) {
            None => Ok(()),
            Some(node) => Err(Error::NonPositive {
                node,
                value: self.values[node],
            }),
        }
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut c = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// `h Σ f_i g_i`.
pub fn lumped_inner(f: &Field, g: &Field) -> Result<f64> {
    f.grid.check_same(&g.grid)?;
    let h = f.grid.h();
    Ok(h * compensated_sum(f.values.iter().zip(&g.values).map(|(a, b)| a * b)))
}

/// `(f_{k+1} - f_k) / h` per element, indexed by the left node.
pub fn forward_diff(f: &Field) -> Vec<f64> {
    let g = f.grid;
    let h = g.h();
    (0..g.nodes())
        .map(|k| (f.values[g.next(k)] - f.values[k]) / h)
        .collect()
}

/// `(f_k - f_{k-1}) / h`, indexed by the right node.
pub fn backward_diff(f: &Field) -> Vec<f64> {
    let g = f.grid;
    let h = g.h();
    (0..g.nodes())
        .map(|k| (f.values[k] - f.values[g.prev(k)]) / h)
        .collect()
}

pub fn discrete_laplacian(f: &Field) -> Field {
    let g = f.grid;
    let h2 = g.h() * g.h();
    Field::from_fn(g, |k| {
        (f.values[g.next(k)] - 2.0 * f.values[k] + f.values[g.prev(k)]) / h2
    })
}

/// Nodal interpolant of a periodic function.
pub fn interpolate(grid: Grid, psi: impl Fn(f64) -> f64) -> Field {
    Field::from_fn(grid, |k| psi(grid.x(k)))
}

pub fn mean(f: &Field) -> f64 {
    f.grid.h() * compensated_sum(f.values.iter().copied()) / f.grid.length()
}

/// `∫ |f_x|² dx`.
pub fn h1_seminorm_sq(f: &Field) -> f64 {
    let h = f.grid.h();
    h * compensated_sum(forward_diff(f).into_iter().map(|d| d * d))
}

pub fn min_value(f: &Field) -> f64 {
    f.values.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn max_value(f: &Field) -> f64 {
    f.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Largest ratio between neighbouring nodal values, in either direction.
pub fn oscillation_ratio(f: &Field) -> f64 {
    let g = f.grid;
    (0..g.nodes())
        .map(|k| {
            let (a, b) = (f.values[k], f.values[g.next(k)]);
            (a / b).max(b / a)
        })
        .fold(1.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid4() -> Grid {
        Grid::new(1.0, 4).unwrap()
    }

    fn f1212() -> Field {
        Field::new(grid4(), vec![1.0, 2.0, 1.0, 2.0]).unwrap()
    }

    #[test]
    fn rejects_tiny_grids() {
        assert!(Grid::new(1.0, 2).is_err());
        assert!(Grid::new(0.0, 8).is_err());
        assert!(Field::new(grid4(), vec![1.0; 3]).is_err());
    }

    #[test]
    fn lumped_inner_examples() {
        let one = Field::constant(grid4(), 1.0);
        assert_eq!(lumped_inner(&f1212(), &one).unwrap(), 1.5);
        let z = Field::zeros(grid4());
        assert_eq!(lumped_inner(&z, &z).unwrap(), 0.0);
        let g = Grid::new(3.0, 7).unwrap();
        let c = Field::constant(g, 2.5);
        let one = Field::constant(g, 1.0);
        assert!((lumped_inner(&c, &one).unwrap() - 7.5).abs() < 1e-14);
    }

    #[test]
    fn lumped_inner_grid_mismatch() {
        let other = Field::constant(Grid::new(1.0, 5).unwrap(), 1.0);
        assert!(matches!(
            lumped_inner(&f1212(), &other),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn difference_examples() {
        assert_eq!(forward_diff(&f1212()), vec![4.0, -4.0, 4.0, -4.0]);
        assert_eq!(backward_diff(&f1212()), vec![-4.0, 4.0, -4.0, 4.0]);
        assert_eq!(forward_diff(&Field::constant(grid4(), 3.0)), vec![0.0; 4]);
    }

    #[test]
    fn wrap_convention() {
        // I_h[x] is not periodic; the last forward difference crosses the wrap.
        let g = grid4();
        let f = interpolate(g, |x| x);
        assert_eq!(f.values(), &[0.25, 0.5, 0.75, 1.0]);
        let d = forward_diff(&f);
        assert_eq!(d[3], (f.values()[0] - f.values()[3]) / g.h());
        assert_eq!(f.at(-1), f.values()[3]);
        assert_eq!(f.at(4), f.values()[0]);
    }

    #[test]
    fn laplacian_example() {
        assert_eq!(
            discrete_laplacian(&f1212()).values(),
            &[32.0, -32.0, 32.0, -32.0]
        );
    }

    #[test]
    fn interpolate_sine() {
        let f = interpolate(grid4(), |x| (2.0 * std::f64::consts::PI * x).sin());
        let want = [1.0, 0.0, -1.0, 0.0];
        for (a, b) in f.values().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let c = interpolate(grid4(), |_| 3.0);
        assert_eq!(c.values(), &[3.0; 4]);
    }

    #[test]
    fn reductions() {
        let f = f1212();
        assert_eq!(mean(&f), 1.5);
        assert_eq!(h1_seminorm_sq(&f), 16.0);
        assert_eq!(min_value(&f), 1.0);
        assert_eq!(oscillation_ratio(&f), 2.0);
        let c = Field::constant(grid4(), 0.7);
        assert!((mean(&c) - 0.7).abs() < 1e-15);
        assert_eq!(h1_seminorm_sq(&c), 0.0);
        assert_eq!(min_value(&c), 0.7);
    }

    #[test]
    fn interpolated_mean_converges() {
        // |mean(I_h v) - mean(v)| <= C h ‖v_x‖; here mean(v) = 2 exactly.
        let v = |x: f64| 2.0 + 0.3 * (2.0 * std::f64::consts::PI * x).sin() + 0.1 * x * (1.0 - x);
        let exact = 2.0 + 0.1 / 6.0;
        let mut prev = f64::INFINITY;
        for nodes in [8, 16, 32, 64, 128] {
            let g = Grid::new(1.0, nodes).unwrap();
            let err = (mean(&interpolate(g, v)) - exact).abs();
            assert!(err <= g.h(), "nodes {nodes}: {err}");
            assert!(err <= prev);
            prev = err;
        }
    }

    #[test]
    fn compensated_sum_cancels() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
    }

    #[test]
    fn positivity_check_reports_node() {
        let f = Field::new(grid4(), vec![1.0, 0.5, -0.1, 2.0]).unwrap();
        match f.ensure_positive() {
            Err(Error::NonPositive { node, .. }) => assert_eq!(node, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
