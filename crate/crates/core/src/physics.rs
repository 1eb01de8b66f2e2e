//! Interface potential, cutoff mobility, discrete mobility and the discrete
//! entropy pair, together with the energy and entropy functionals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{compensated_sum, h1_seminorm_sq, Field};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Mobility exponent, `2 < n < 3`.
    pub n: f64,
    /// Potential exponent, `p > n`.
    pub p: f64,
    pub c_f: f64,
    /// Entropy weight in the combined quantity.
    pub kappa: f64,
    /// Regularization parameter added to the correction strength.
    #[serde(rename = "s")]
    pub s_reg: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.n > 2.0 && self.n < 3.0) {
            return Err(Error::config("model.n", format!("must lie in (2, 3), got {}", self.n)));
        }
        if !(self.p > self.n && self.p.is_finite()) {
            return Err(Error::config("model.p", format!("must exceed n = {}, got {}", self.n, self.p)));
        }
        if !(self.c_f > 0.0 && self.c_f.is_finite()) {
            return Err(Error::config("model.c_f", format!("must be positive, got {}", self.c_f)));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::config("model.kappa", format!("must be nonnegative, got {}", self.kappa)));
        }
        if !(self.s_reg >= 0.0 && self.s_reg.is_finite()) {
            return Err(Error::config("model.s", format!("must be nonnegative, got {}", self.s_reg)));
        }
        Ok(())
    }

    /// `1 + √(2 c_F)`.
    pub fn c_osc(&self) -> f64 {
        1.0 + (2.0 * self.c_f).sqrt()
    }
}

/// `F(u) = c_F u^{-p}`, `+∞` for `u ≤ 0`.
pub fn potential(u: f64, params: &ModelParams) -> f64 {
    if u > 0.0 {
        params.c_f * u.powf(-params.p)
    } else {
        f64::INFINITY
    }
}

pub fn potential_d1(u: f64, params: &ModelParams) -> Result<f64> {
    if u > 0.0 {
        Ok(-params.p * params.c_f * u.powf(-params.p - 1.0))
    } else {
        Err(Error::Domain { what: "F'", value: u })
    }
}

pub fn potential_d2(u: f64, params: &ModelParams) -> Result<f64> {
    if u > 0.0 {
        Ok(params.p * (params.p + 1.0) * params.c_f * u.powf(-params.p - 2.0))
    } else {
        Err(Error::Domain { what: "F''", value: u })
    }
}

/// `σ = ½ h^{2/(p+2)}`.
pub fn cutoff_sigma(h: f64, p: f64) -> f64 {
    0.5 * h.powf(2.0 / (p + 2.0))
}

/// `m_σ(s) = max(σ, s)^n`.
pub fn shifted_mobility(s: f64, sigma: f64, n: f64) -> f64 {
    s.max(sigma).powf(n)
}

/// Antiderivative of `τ^{-n}` vanishing at `τ = 1`, i.e. `∫_1^s τ^{-n} dτ` for `s > 0`.
fn power_primitive(s: f64, n: f64) -> f64 {
    if n == 1.0 {
        s.ln()
    } else {
        ((1.0 - n) * s.ln()).exp_m1() / (1.0 - n)
    }
}

/// `∫_a^b τ^{-n} dτ` for `0 < a ≤ b`, without cancellation when `b ≈ a`.
pub(crate) fn power_integral(a: f64, b: f64, n: f64) -> f64 {
    let r = ((b - a) / a).ln_1p();
    if n == 1.0 {
        r
    } else {
        a.powf(1.0 - n) * ((1.0 - n) * r).exp_m1() / (1.0 - n)
    }
}

/// `∫_a^b m_σ(τ)^{-1} dτ` for `a ≤ b`.
fn inverse_mobility_integral(a: f64, b: f64, sigma: f64, n: f64) -> f64 {
    let below = sigma.powf(-n);
    if b <= sigma {
        (b - a) * below
    } else if a >= sigma {
        power_integral(a, b, n)
    } else {
        (sigma - a) * below + power_integral(sigma, b, n)
    }
}

/// Element mobility `(⨍_a^b m_σ^{-1})^{-1}`; `m_σ(a)` when `a = b`.
pub fn mobility_element(a: f64, b: f64, sigma: f64, n: f64) -> f64 {
    if a == b {
        return shifted_mobility(a, sigma, n);
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if hi <= sigma {
        return sigma.powf(n);
    }
    (hi - lo) / inverse_mobility_integral(lo, hi, sigma, n)
}

/// Nodal values `|u_i|^{n/2}`.
pub fn mobility_root_field(u: &Field, n: f64) -> Field {
    u.map(|v| v.abs().powf(0.5 * n))
}

/// `P(τ) = ∫_1^τ m_σ^{-1}` with the linear continuation below `σ`.
fn entropy_p(s: f64, sigma: f64, n: f64) -> f64 {
    if s >= sigma {
        power_primitive(s, n)
    } else {
        power_primitive(sigma, n) + sigma.powf(-n) * (s - sigma)
    }
}

/// `∫_1^s ∫_1^μ τ^{-n} dτ dμ` for `s > 0`.
fn power_double_primitive(s: f64, n: f64) -> f64 {
    // Q(s) - Q(1) - (s - 1) P(1) with Q'' = τ^{-n}.
    if n == 1.0 {
        s * s.ln() - s + 1.0
    } else if n == 2.0 {
        -s.ln() + (s - 1.0)
    } else {
        let x = s.ln();
        (((2.0 - n) * x).exp_m1() / (2.0 - n) - (s - 1.0)) / (1.0 - n)
    }
}

/// Discrete entropy density `G_h(s) = ∫_1^s ∫_1^μ m_σ(τ)^{-1} dτ dμ`.
pub fn entropy_density(s: f64, sigma: f64, n: f64) -> f64 {
    let value = if s >= sigma {
        power_double_primitive(s, n)
    } else {
        let d = s - sigma;
        power_double_primitive(sigma, n)
            + power_primitive(sigma, n) * d
            + 0.5 * sigma.powf(-n) * d * d
    };
    value.max(0.0)
}

/// `g_h = G_h'`.
pub fn entropy_density_d1(s: f64, sigma: f64, n: f64) -> f64 {
    entropy_p(s, sigma, n)
}

/// `½ ∫|u_x|² + h Σ F(u_i)`; `+∞` if any node is nonpositive.
pub fn energy(u: &Field, params: &ModelParams) -> f64 {
    if u.values().iter().any(|&v| !(v > 0.0)) {
        return f64::INFINITY;
    }
    let h = u.grid().h();
    0.5 * h1_seminorm_sq(u) + h * compensated_sum(u.values().iter().map(|&v| potential(v, params)))
}

/// `S_h = h Σ G_h(u_i)`.
pub fn entropy_functional(u: &Field, sigma: f64, n: f64) -> f64 {
    u.grid().h() * compensated_sum(u.values().iter().map(|&v| entropy_density(v, sigma, n)))
}

/// `R = E_h + κ S_h` with `σ` taken from the grid.
pub fn combined_quantity(u: &Field, params: &ModelParams) -> f64 {
    let sigma = cutoff_sigma(u.grid().h(), params.p);
    energy(u, params) + params.kappa * entropy_functional(u, sigma, params.n)
}
