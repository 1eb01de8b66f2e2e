//! Discrete pressure, the conservative mobility flux and the split
//! porous-medium correction operators `A_Δ`, `A_∇`, `B_Δ`.

use crate::error::Result;
use crate::mesh::{compensated_sum, discrete_laplacian, Field};
use crate::physics::{cutoff_sigma, mobility_element, potential_d1, ModelParams};

#[derive(Clone, Debug)]
pub struct DriftParts {
    /// `L_i / h`.
    pub flux_part: Field,
    /// `𝓛_i / h`.
    pub correction_part: Field,
    pub pressure: Field,
}

/// `p_i = -(Δ_h u)_i + F'(u_i)`.
pub fn pressure(u: &Field, params: &ModelParams) -> Result<Field> {
    u.ensure_positive()?;
    let mut p = discrete_laplacian(u);
    for (pi, &ui) in p.values_mut().iter_mut().zip(u.values()) {
        *pi = -*pi + potential_d1(ui, params)?;
    }
    Ok(p)
}

/// Element mobilities; entry `k` belongs to the element between nodes `k` and `k + 1`.
pub fn element_mobilities(u: &Field, sigma: f64, n: f64) -> Vec<f64> {
    let g = u.grid();
    let v = u.values();
    (0..g.nodes())
        .map(|k| mobility_element(v[k], v[g.next(k)], sigma, n))
        .collect()
}

/// `(1/h²)[M_{k+½}(p_{k+1} - p_k) - M_{k-½}(p_k - p_{k-1})]` for given element mobilities.
pub fn flux_divergence_with(mobility: &[f64], p: &Field) -> Field {
    let g = *p.grid();
    let h2 = g.h() * g.h();
    let v = p.values();
    Field::from_fn(g, |k| {
        let (kp, km) = (g.next(k), g.prev(k));
        (mobility[k] * (v[kp] - v[k]) - mobility[km] * (v[k] - v[km])) / h2
    })
}

/// `L_i / h = -(1/h) ∫ M_h(u) p_x (e_i)_x dx`.
pub fn flux_divergence(u: &Field, p: &Field, params: &ModelParams) -> Result<Field> {
    u.grid().check_same(p.grid())?;
    let sigma = cutoff_sigma(u.grid().h(), params.p);
    Ok(flux_divergence_with(&element_mobilities(u, sigma, params.n), p))
}

fn powers(u: &Field, e: f64) -> Vec<f64> {
    u.values().iter().map(|&v| v.powf(e)).collect()
}

/// Nodal brackets `a_i` with `A_Δ(u, v) = h Σ a_i v_i`.
pub fn a_delta_coeffs(u: &Field, n: f64) -> Result<Vec<f64>> {
    u.ensure_positive()?;
    let g = *u.grid();
    let h = g.h();
    let v = u.values();
    let w = powers(u, n - 3.0);
    let c = (n - 2.0) / 6.0;
    Ok((0..g.nodes())
        .map(|i| {
            let (ip, im) = (g.next(i), g.prev(i));
            let dp = (v[ip] - v[i]) / h;
            let dm = (v[i] - v[im]) / h;
            let central = (v[ip] - v[im]) / (2.0 * h);
            -c * w[i] * (dm * dm + dp * dp)
                - c * ((w[i] + w[ip]) * dp + (w[im] + w[i]) * dm) * central
        })
        .collect())
}

/// Nodal brackets `b_i = -u_i^{n-2} (Δ_h u)_i` with `B_Δ(u, v) = h Σ b_i v_i`.
pub fn b_delta_coeffs(u: &Field, n: f64) -> Result<Vec<f64>> {
    u.ensure_positive()?;
    let lap = discrete_laplacian(u);
    Ok(u
        .values()
        .iter()
        .zip(lap.values())
        .map(|(&ui, &li)| -ui.powf(n - 2.0) * li)
        .collect())
}

fn pair(h: f64, coeffs: &[f64], v: &Field) -> f64 {
    h * compensated_sum(coeffs.iter().zip(v.values()).map(|(a, b)| a * b))
}

/// `A_Δ^h(u, v)`.
pub fn a_delta(u: &Field, v: &Field, n: f64) -> Result<f64> {
    u.grid().check_same(v.grid())?;
    Ok(pair(u.grid().h(), &a_delta_coeffs(u, n)?, v))
}

/// `A_∇^h(u, v)`, the three-sum rearrangement.
pub fn a_nabla(u: &Field, v: &Field, n: f64) -> Result<f64> {
    u.grid().check_same(v.grid())?;
    u.ensure_positive()?;
    let g = *u.grid();
    let h = g.h();
    let x = u.values();
    let w = powers(u, n - 3.0);
    let mut s1 = Vec::with_capacity(g.nodes());
    let mut s2 = Vec::with_capacity(g.nodes());
    let mut s3 = Vec::with_capacity(g.nodes());
    for i in 0..g.nodes() {
        let (ip, im) = (g.next(i), g.prev(i));
        let dp = (x[ip] - x[i]) / h;
        let dm = (x[i] - x[im]) / h;
        let wide = (x[ip] - x[im]) / h;
        let vi = v.values()[i];
        s1.push(((w[i] + w[ip]) * dp * dp + (w[i] + w[im]) * dm * dm) * vi);
        s2.push((w[ip] + 2.0 * w[i] + w[im]) * wide * wide * vi);
        s3.push((2.0 * w[i] - w[ip] - w[im]) * (dp * dp + dm * dm) * vi);
    }
    let c = n - 2.0;
    Ok(-c / 12.0 * h * compensated_sum(s1)
        - c / 24.0 * h * compensated_sum(s2)
        - c / 24.0 * h * compensated_sum(s3))
}

/// `B_Δ^h(u, v) = -h Σ u_i^{n-2} (Δ_h u)_i v_i`.
pub fn b_delta(u: &Field, v: &Field, n: f64) -> Result<f64> {
    u.grid().check_same(v.grid())?;
    Ok(pair(u.grid().h(), &b_delta_coeffs(u, n)?, v))
}

/// Node `i` carries `-(C_Strat + S)/h · [A_Δ(u, e_i) + B_Δ(u, e_i)]`.
pub fn correction_drift(u: &Field, params: &ModelParams, c_strat: f64) -> Result<Field> {
    let a = a_delta_coeffs(u, params.n)?;
    let b = b_delta_coeffs(u, params.n)?;
    let strength = c_strat + params.s_reg;
    Ok(Field::from_fn(*u.grid(), |i| -strength * (a[i] + b[i])))
}

pub fn drift_parts(u: &Field, params: &ModelParams, c_strat: f64) -> Result<DriftParts> {
    let p = pressure(u, params)?;
    Ok(DriftParts {
        flux_part: flux_divergence(u, &p, params)?,
        correction_part: correction_drift(u, params, c_strat)?,
        pressure: p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{lumped_inner, Grid};

    fn grid4() -> Grid {
        Grid::new(1.0, 4).unwrap()
    }

    fn f1212() -> Field {
        Field::new(grid4(), vec![1.0, 2.0, 1.0, 2.0]).unwrap()
    }

    fn params(n: f64, c_f: f64) -> ModelParams {
        ModelParams {
            n,
            p: 4.0,
            c_f,
            kappa: 1.0,
            s_reg: 0.0,
        }
    }

    #[test]
    fn pressure_examples() {
        let p = pressure(&Field::constant(grid4(), 1.0), &params(2.5, 1.0)).unwrap();
        assert_eq!(p.values(), &[-4.0; 4]);
        let p = pressure(&f1212(), &params(2.5, 0.0)).unwrap();
        assert_eq!(p.values(), &[-32.0, 32.0, -32.0, 32.0]);
        let bad = Field::new(grid4(), vec![1.0, -1.0, 1.0, 1.0]).unwrap();
        assert!(pressure(&bad, &params(2.5, 1.0)).is_err());
    }

    #[test]
    fn flux_examples() {
        let p = Field::new(grid4(), vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        // σ = ½·0.25^{1/3} < 1, so M = 2 on every element when n = 2.
        let out = flux_divergence(&f1212(), &p, &params(2.0, 1.0)).unwrap();
        for (a, b) in out.values().iter().zip([64.0, -64.0, 64.0, -64.0]) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        let flat = flux_divergence(&f1212(), &Field::constant(grid4(), 3.0), &params(2.5, 1.0)).unwrap();
        assert_eq!(flat.values(), &[0.0; 4]);
        let other = Field::constant(Grid::new(1.0, 5).unwrap(), 1.0);
        assert!(flux_divergence(&f1212(), &other, &params(2.5, 1.0)).is_err());
    }

    /// The literal nodal sum written out term by term with explicit periodic indices.
    fn a_delta_oracle(u: &[f64], v: &[f64], h: f64, n: f64) -> f64 {
        let l = u.len() as isize;
        let at = |i: isize| u[i.rem_euclid(l) as usize];
        let mut total = 0.0;
        for i in 0..l {
            let w = |j: isize| at(j).powf(n - 3.0);
            let first = w(i) * (((at(i) - at(i - 1)) / h).powi(2) + ((at(i + 1) - at(i)) / h).powi(2));
            let brace = (w(i) + w(i + 1)) * (at(i + 1) - at(i)) / h
                + (w(i - 1) + w(i)) * (at(i) - at(i - 1)) / h;
            let second = brace * (at(i + 1) - at(i - 1)) / (2.0 * h);
            total += -(n - 2.0) / 6.0 * h * (first + second) * v[i as usize];
        }
        total
    }

    #[test]
    fn a_delta_matches_oracle() {
        let v = Field::new(grid4(), vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let got = a_delta(&f1212(), &v, 2.5).unwrap();
        let want = a_delta_oracle(f1212().values(), v.values(), 0.25, 2.5);
        assert!((got - want).abs() <= 1e-12 * want.abs());
        let via_nabla = a_nabla(&f1212(), &v, 2.5).unwrap();
        assert!((via_nabla - want).abs() <= 1e-12 * want.abs());
    }

    #[test]
    fn constant_u_gives_zero() {
        let c = Field::constant(grid4(), 1.7);
        let v = f1212();
        assert_eq!(a_delta(&c, &v, 2.5).unwrap(), 0.0);
        assert_eq!(a_nabla(&c, &v, 2.5).unwrap(), 0.0);
        assert_eq!(b_delta(&c, &v, 2.5).unwrap(), 0.0);
        let corr = correction_drift(&c, &params(2.5, 1.0), 0.3).unwrap();
        assert_eq!(corr.values(), &[0.0; 4]);
    }

    #[test]
    fn b_delta_example() {
        let one = Field::constant(grid4(), 1.0);
        let got = b_delta(&f1212(), &one, 2.5).unwrap();
        let want = -0.25 * (64.0 - 64.0 * 2f64.sqrt());
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn correction_pairing() {
        let g = Grid::new(2.0, 9).unwrap();
        let u = Field::from_fn(g, |k| 1.0 + 0.3 * (k as f64 * 0.9).sin());
        let v = Field::from_fn(g, |k| (k as f64 * 1.7).cos());
        let prm = ModelParams { s_reg: 0.2, ..params(2.3, 0.5) };
        let c = 0.1;
        let corr = correction_drift(&u, &prm, c).unwrap();
        let lhs = lumped_inner(&corr, &v).unwrap();
        let rhs = -(c + prm.s_reg) * (a_delta(&u, &v, prm.n).unwrap() + b_delta(&u, &v, prm.n).unwrap());
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
    }
}
