//! Functionals, dissipation integrands, the Itô energy term, and the
//! verification suite for the discrete identities and inequalities the
//! scheme relies on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mesh::{
    backward_diff, compensated_sum, discrete_laplacian, forward_diff, lumped_inner, mean,
    min_value, oscillation_ratio, Field, Grid,
};
use crate::noise::{basis_eval, c_strat, NoiseOperator, NoiseSpec};
use crate::operators::{
    a_delta, a_delta_coeffs, a_nabla, b_delta, b_delta_coeffs, correction_drift,
    element_mobilities, flux_divergence_with, pressure,
};
use crate::physics::{
    combined_quantity, cutoff_sigma, energy, entropy_density_d1, entropy_functional,
    mobility_root_field, power_integral, shifted_mobility, ModelParams,
};
use crate::quadrature::integrate;

pub(crate) fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

/// Dissipation integrands evaluated on one state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Dissipation {
    /// `∫ M_h(u) |p_x|²`.
    #[serde(serialize_with = "finite_or_null")]
    pub q_pressure: f64,
    /// `‖Δ_h u‖_h²`.
    #[serde(serialize_with = "finite_or_null")]
    pub q_laplacian: f64,
    /// `h Σ u^{n-4} |∂⁺u|⁴`.
    #[serde(serialize_with = "finite_or_null")]
    pub q_quartic: f64,
    /// `h Σ u^{n-2} |Δ_h u|²`.
    #[serde(serialize_with = "finite_or_null")]
    pub q_weighted_lap: f64,
    /// `h Σ u^{n-p-4} |∂⁺u|²`.
    #[serde(serialize_with = "finite_or_null")]
    pub q_singular: f64,
    /// `h Σ u^{-2} |∂⁺u|²`.
    #[serde(serialize_with = "finite_or_null")]
    pub q_log: f64,
    /// `Σ_i ⨍_{u_{i-1}}^{u_i} τ^{-p-2} dτ ∫_{E_i} |u_x|²`.
    #[serde(serialize_with = "finite_or_null")]
    pub q_entropy_diss: f64,
}

impl Dissipation {
    pub const NAMES: [&'static str; 7] = [
        "q_pressure",
        "q_laplacian",
        "q_quartic",
        "q_weighted_lap",
        "q_singular",
        "q_log",
        "q_entropy_diss",
    ];

    pub fn as_array(&self) -> [f64; 7] {
        [
            self.q_pressure,
            self.q_laplacian,
            self.q_quartic,
            self.q_weighted_lap,
            self.q_singular,
            self.q_log,
            self.q_entropy_diss,
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub energy: f64,
    pub entropy: f64,
    pub combined_r: f64,
    pub osc_ratio: f64,
    pub min_u: f64,
    pub mean_u: f64,
    #[serde(flatten)]
    pub dissipation: Dissipation,
    pub ito_energy: f64,
}

impl DiagnosticsRecord {
    pub const COLUMNS: [&'static str; 15] = [
        "time",
        "energy",
        "entropy",
        "combined_r",
        "osc_ratio",
        "min_u",
        "mean_u",
        "q_pressure",
        "q_laplacian",
        "q_quartic",
        "q_weighted_lap",
        "q_singular",
        "q_log",
        "q_entropy_diss",
        "ito_energy",
    ];

    pub fn as_row(&self) -> [f64; 15] {
        let d = self.dissipation.as_array();
        [
            self.time,
            self.energy,
            self.entropy,
            self.combined_r,
            self.osc_ratio,
            self.min_u,
            self.mean_u,
            d[0],
            d[1],
            d[2],
            d[3],
            d[4],
            d[5],
            d[6],
            self.ito_energy,
        ]
    }
}

/// `⨍_a^b τ^{-q} dτ`, with the equal-endpoint limit `a^{-q}`.
pub fn averaged_power(a: f64, b: f64, q: f64) -> f64 {
    if a == b {
        return a.powf(-q);
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    power_integral(lo, hi, q) / (hi - lo)
}

/// `Σ_elem M_elem |Δp/h|² h` with element mobilities from `u`.
pub fn pressure_dissipation(u: &Field, p: &Field, params: &ModelParams) -> Result<f64> {
    u.grid().check_same(p.grid())?;
    let g = *u.grid();
    let sigma = cutoff_sigma(g.h(), params.p);
    let mob = element_mobilities(u, sigma, params.n);
    let dp = forward_diff(p);
    Ok(g.h() * compensated_sum(mob.iter().zip(&dp).map(|(m, d)| m * d * d)))
}

pub fn dissipation(u: &Field, p: &Field, params: &ModelParams) -> Result<Dissipation> {
    u.ensure_positive()?;
    let g = *u.grid();
    let h = g.h();
    let (n, pp) = (params.n, params.p);
    let v = u.values();
    let dp = forward_diff(u);
    let dm = backward_diff(u);
    let lap = discrete_laplacian(u);
    let sum = |f: &dyn Fn(usize) -> f64| h * compensated_sum((0..g.nodes()).map(f));
    Ok(Dissipation {
        q_pressure: pressure_dissipation(u, p, params)?,
        q_laplacian: sum(&|i| lap.values()[i].powi(2)),
        q_quartic: sum(&|i| v[i].powf(n - 4.0) * dp[i].powi(4)),
        q_weighted_lap: sum(&|i| v[i].powf(n - 2.0) * lap.values()[i].powi(2)),
        q_singular: sum(&|i| v[i].powf(n - pp - 4.0) * dp[i].powi(2)),
        q_log: sum(&|i| dp[i].powi(2) / (v[i] * v[i])),
        q_entropy_diss: sum(&|i| averaged_power(v[g.prev(i)], v[i], pp + 2.0) * dm[i].powi(2)),
    })
}

/// `(1/2h) Σ_ℓ λ_ℓ² Σ_i (Z_{i+1}(g_ℓ) - Z_i(g_ℓ))²`.
pub fn ito_energy_term(u: &Field, op: &NoiseOperator) -> Result<f64> {
    let g = *u.grid();
    let units = op.unit_coefficients(u)?;
    let total = compensated_sum(op.modes().iter().zip(&units).map(|(&(_, lam), z)| {
        let z = z.values();
        lam * lam * compensated_sum((0..g.nodes()).map(|i| (z[g.next(i)] - z[i]).powi(2)))
    }));
    Ok(total / (2.0 * g.h()))
}

/// Both sides of the Itô-term budget for given `(ε, η)`. The two groups
/// with unspecified constants are reported as raw sums only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ItoBudget {
    pub ito: f64,
    pub laplacian_group: f64,
    pub quartic_group: f64,
    pub raw_gradient: f64,
    pub raw_power: f64,
}

impl ItoBudget {
    pub fn margin(&self) -> f64 {
        self.laplacian_group + self.quartic_group - self.ito
    }
}

pub fn ito_budget(
    u: &Field,
    op: &NoiseOperator,
    params: &ModelParams,
    c_strat: f64,
    epsilon: f64,
    eta: f64,
) -> Result<ItoBudget> {
    let ito = ito_energy_term(u, op)?;
    let g = *u.grid();
    let h = g.h();
    let n = params.n;
    let c_osc = params.c_osc();
    let v = u.values();
    let dp = forward_diff(u);
    let dm = backward_diff(u);
    let lap = discrete_laplacian(u);
    let sum = |f: &dyn Fn(usize) -> f64| h * compensated_sum((0..g.nodes()).map(f));
    let weighted_lap = sum(&|i| v[i].powf(n - 2.0) * lap.values()[i].powi(2));
    let quartic = sum(&|i| {
        let (a, b) = (dp[i] * dp[i], dm[i] * dm[i]);
        v[i].powf(n - 4.0) * (a * a + 2.0 * a * b + b * b)
    });
    let pre = (1.0 + eta) * c_strat;
    Ok(ItoBudget {
        ito,
        laplacian_group: pre * (1.0 + epsilon * (n - 2.0) / 2.0) * c_osc.powf(n - 2.0) * weighted_lap,
        quartic_group: pre
            * ((n - 2.0).powi(2) / 4.0 + (n - 2.0) / (2.0 * epsilon))
            * c_osc.powf(4.0 - n)
            * quartic,
        raw_gradient: sum(&|i| v[i].powf(n - 2.0) * dp[i] * dp[i]),
        raw_power: sum(&|i| v[i].powf(n)),
    })
}

pub fn record(
    time: f64,
    u: &Field,
    p: &Field,
    params: &ModelParams,
    op: &NoiseOperator,
) -> Result<DiagnosticsRecord> {
    let sigma = cutoff_sigma(u.grid().h(), params.p);
    Ok(DiagnosticsRecord {
        time,
        energy: energy(u, params),
        entropy: entropy_functional(u, sigma, params.n),
        combined_r: combined_quantity(u, params),
        osc_ratio: oscillation_ratio(u),
        min_u: min_value(u),
        mean_u: mean(u),
        dissipation: dissipation(u, p, params)?,
        ito_energy: ito_energy_term(u, op)?,
    })
}

/// `max_{t₁≠t₂} ‖u(t₁) - u(t₂)‖_h² / |t₁ - t₂|^{1/2}` over at most
/// `max_pairs` pairs, subsampled with a uniform stride beyond that.
pub fn holder_quotient(samples: &[(f64, &Field)], max_pairs: usize) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::TooFew {
            what: "samples",
            needed: 2,
            got: samples.len(),
        });
    }
    let total = samples.len() * (samples.len() - 1) / 2;
    let stride = total.div_ceil(max_pairs.max(1)).max(1);
    let mut best = 0.0_f64;
    let mut k = 0usize;
    for a in 0..samples.len() {
        for b in a + 1..samples.len() {
            if k.is_multiple_of(stride) {
                let (t1, u1) = samples[a];
                let (t2, u2) = samples[b];
                u1.grid().check_same(u2.grid())?;
                let dt = (t1 - t2).abs();
                if dt > 0.0 {
                    let d = Field::from_fn(*u1.grid(), |i| u1.values()[i] - u2.values()[i]);
                    best = best.max(lumped_inner(&d, &d)? / dt.sqrt());
                }
            }
            k += 1;
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Identity,
    Inequality,
    Margin,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub kind: CheckKind,
    /// Relative deviation for identities, relative violation for inequalities.
    #[serde(serialize_with = "finite_or_null")]
    pub residual: f64,
    /// Signed slack: tolerance minus residual, relative excess, or the
    /// reported quantity for margin checks.
    #[serde(serialize_with = "finite_or_null")]
    pub margin: f64,
    pub hypothesis_ok: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub identity: f64,
    pub sign: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-12,
            sign: 1e-12,
        }
    }
}

impl CheckResult {
    pub fn failed(&self, tol: &Tolerances) -> bool {
        match self.kind {
            CheckKind::Identity => !(self.residual <= tol.identity),
            CheckKind::Inequality => self.hypothesis_ok && !(self.residual <= tol.sign),
            CheckKind::Margin => false,
        }
    }
}

fn identity(name: &'static str, lhs: f64, rhs: f64, scale: f64, tol: f64) -> CheckResult {
    let diff = (lhs - rhs).abs();
    let residual = if diff == 0.0 { 0.0 } else { diff / scale };
    CheckResult {
        name,
        kind: CheckKind::Identity,
        residual,
        margin: tol - residual,
        hypothesis_ok: true,
    }
}

/// `lhs ≥ rhs`, relative to `scale`.
fn inequality(name: &'static str, lhs: f64, rhs: f64, scale: f64, hyp: bool) -> CheckResult {
    let excess = lhs - rhs;
    let margin = if excess == 0.0 { 0.0 } else { excess / scale };
    CheckResult {
        name,
        kind: CheckKind::Inequality,
        residual: (-margin).max(0.0),
        margin,
        hypothesis_ok: hyp,
    }
}

fn margin(name: &'static str, value: f64, hyp: bool) -> CheckResult {
    CheckResult {
        name,
        kind: CheckKind::Margin,
        residual: 0.0,
        margin: value,
        hypothesis_ok: hyp,
    }
}

/// Parameters of one suite evaluation.
#[derive(Clone, Debug)]
pub struct SuiteContext {
    pub params: ModelParams,
    pub noise: NoiseSpec,
    pub epsilon: f64,
    pub eta: f64,
    pub tolerances: Tolerances,
}

/// `h Σ DQ_i |∂⁺u_i|²` with `DQ_i` the difference quotient of `s ↦ s^e`
/// between `u_i` and `u_{i+1}`, and its absolute sum.
fn power_quotient_sum(u: &Field, e: f64) -> (f64, f64) {
    let g = *u.grid();
    let v = u.values();
    let dp = forward_diff(u);
    let terms: Vec<f64> = (0..g.nodes())
        .map(|i| {
            let (a, b) = (v[i], v[g.next(i)]);
            let dq = if a == b {
                e * a.powf(e - 1.0)
            } else {
                (b.powf(e) - a.powf(e)) / (b - a)
            };
            dq * dp[i] * dp[i]
        })
        .collect();
    let h = g.h();
    (
        h * compensated_sum(terms.iter().copied()),
        h * terms.iter().map(|t| t.abs()).sum::<f64>(),
    )
}

/// The four-sum rearrangement of `A_Δ(u, 1) + B_Δ(u, 1)`, with its absolute sum.
fn mass_defect_decomposition(u: &Field, n: f64) -> (f64, f64) {
    let g = *u.grid();
    let h = g.h();
    let v = u.values();
    let w: Vec<f64> = v.iter().map(|x| x.powf(n - 3.0)).collect();
    let dm = backward_diff(u);
    let lap = discrete_laplacian(u);
    let c = (n - 2.0) / 12.0;
    let mut terms = Vec::with_capacity(4 * g.nodes());
    for i in 0..g.nodes() {
        let (ip, im) = (g.next(i), g.prev(i));
        let dm2 = dm[i] * dm[i];
        terms.push(-5.0 * c * (w[i] + w[im]) * dm2);
        terms.push(-c * (w[ip] + w[i]) * dm2);
        terms.push(-c * (w[ip] + 2.0 * w[i] + w[im]) * lap.values()[i] * (v[i] - v[im]));
        let (a, b) = (v[im], v[i]);
        let e = n - 2.0;
        let dq = if a == b {
            e * a.powf(e - 1.0)
        } else {
            (b.powf(e) - a.powf(e)) / (b - a)
        };
        terms.push(dq * dm2);
    }
    (
        h * compensated_sum(terms.iter().copied()),
        h * terms.iter().map(|t| t.abs()).sum::<f64>(),
    )
}

/// Right side of the noise-coefficient bound for unit amplitude mode `ell`.
fn noise_coefficient_bound_rhs(u: &Field, ell: i64, sigma: f64, n: f64) -> f64 {
    let g = *u.grid();
    let (h, length) = (g.h(), g.length());
    let m2 = mobility_root_field(u, n);
    let m = m2.values();
    let mut total = 0.0;
    for i in 0..g.nodes() {
        let (ip, im) = (g.next(i), g.prev(i));
        let (x0, x1) = (g.x(i) - h, g.x(i));
        // On [x0, x1], M(x) runs from m[im] to m[i] and M(x + h) from m[i] to m[ip].
        let f = |x: f64| {
            let s = (x - x0) / h;
            let mx = m[im] + (m[i] - m[im]) * s;
            let mxh = m[i] + (m[ip] - m[i]) * s;
            let gx = basis_eval(ell, x, length);
            let gxh = basis_eval(ell, x + h, length);
            let dm = (mxh - mx) / h;
            let dg = (gxh - gx) / h;
            dm * dm * gx * gx + mxh * mxh * dg * dg
        };
        total += integrate(f, x0, x1, 10, 1) / shifted_mobility(u.values()[i], sigma, n);
    }
    2.0 * total
}

/// Evaluates every check on one field `u` with test function `v`.
pub fn lemma_suite(u: &Field, v: &Field, ctx: &SuiteContext) -> Result<Vec<CheckResult>> {
    u.grid().check_same(v.grid())?;
    u.ensure_positive()?;
    let g = *u.grid();
    let h = g.h();
    let prm = &ctx.params;
    let n = prm.n;
    let tol = ctx.tolerances.identity;
    let sigma = cutoff_sigma(h, prm.p);
    let hyp = oscillation_ratio(u) <= prm.c_osc();
    let x = u.values();
    let vv = v.values();
    let dp = forward_diff(u);
    let dm = backward_diff(u);
    let lap = discrete_laplacian(u);
    let neg_lap = lap.map(|t| -t);
    let a_coef = a_delta_coeffs(u, n)?;
    let b_coef = b_delta_coeffs(u, n)?;
    let abs_pair = |c: &[f64], w: &[f64]| h * c.iter().zip(w).map(|(a, b)| (a * b).abs()).sum::<f64>();
    let mut out = Vec::with_capacity(18);

    // A_Δ against the rearranged A_∇.
    let w3: Vec<f64> = x.iter().map(|t| t.powf(n - 3.0)).collect();
    let nabla_scale = h * (n - 2.0)
        * (0..g.nodes())
            .map(|i| {
                let wsum = w3[g.prev(i)] + w3[i] + w3[g.next(i)];
                wsum * (dp[i] * dp[i] + dm[i] * dm[i]) * vv[i].abs()
            })
            .sum::<f64>();
    out.push(identity(
        "a_delta_equals_a_nabla",
        a_delta(u, v, n)?,
        a_nabla(u, v, n)?,
        abs_pair(&a_coef, vv) + nabla_scale,
        tol,
    ));

    // Lower bound for A_Δ(u, -Δ_h u).
    let lhs = a_delta(u, &neg_lap, n)?;
    let bound = ((n - 2.0) * (n - 3.0)).abs() / 3.0 * (1.0 + prm.c_osc()).powf(n - 4.0) / 2.0
        * h
        * compensated_sum((0..g.nodes()).map(|i| {
            x[i].powf(n - 4.0) * (dp[i] * dp[i] * dm[i] * dm[i] + dp[i].powi(4))
        }));
    out.push(inequality(
        "a_delta_laplacian_lower_bound",
        lhs,
        bound,
        lhs.abs() + bound.abs(),
        hyp,
    ));

    // A_Δ(u, -I[u^{-p-1}]) ≥ 0 and its ratio to the singular dissipation.
    let sing = u.map(|t| -t.powf(-prm.p - 1.0));
    let lhs = a_delta(u, &sing, n)?;
    out.push(inequality(
        "a_delta_singular_nonnegative",
        lhs,
        0.0,
        abs_pair(&a_coef, sing.values()),
        hyp,
    ));
    let denom = (n - 2.0)
        * h
        * compensated_sum((0..g.nodes()).map(|i| x[i].powf(n - prm.p - 4.0) * dp[i] * dp[i]));
    out.push(margin(
        "a_delta_singular_ratio",
        if denom > 0.0 { lhs / denom } else { f64::NAN },
        hyp,
    ));

    // A_Δ(u, I[g_h(u)]) against the entropy dissipation bracket (C_ε = 0).
    let gh = u.map(|t| entropy_density_d1(t, sigma, n));
    let lhs = a_delta(u, &gh, n)?;
    let sum = |f: &dyn Fn(usize) -> f64| h * compensated_sum((0..g.nodes()).map(f));
    let quartic = sum(&|i| x[i].powf(n - 4.0) * dp[i].powi(4));
    let bracket = sum(&|i| dp[i] * dp[i] / (x[i] * x[i]))
        - ctx.epsilon * quartic
        - h * quartic
        - h * sum(&|i| x[i].powf(n - 4.0) * dp[i] * dp[i]);
    out.push(margin(
        "a_delta_entropy_ratio",
        if bracket > 0.0 { lhs / bracket } else { f64::NAN },
        hyp,
    ));

    // B_Δ(u, -Δ_h u) = h Σ u^{n-2} |Δ_h u|².
    let lhs = b_delta(u, &neg_lap, n)?;
    let rhs = sum(&|i| x[i].powf(n - 2.0) * lap.values()[i].powi(2));
    out.push(identity(
        "b_delta_laplacian_square",
        lhs,
        rhs,
        abs_pair(&b_coef, neg_lap.values()) + rhs.abs(),
        tol,
    ));

    // B_Δ(u, α I[u^s]) = α h Σ DQ(u^{s+n-2}) |∂⁺u|², for two exponents.
    for (name, s, alpha) in [
        ("b_delta_power_singular", -prm.p - 1.0, -prm.p * prm.c_f),
        ("b_delta_power_entropy", 1.0 - n, 1.0 / (1.0 - n)),
    ] {
        let test = u.map(|t| alpha * t.powf(s));
        let lhs = b_delta(u, &test, n)?;
        let (dq, dq_abs) = power_quotient_sum(u, s + n - 2.0);
        out.push(identity(
            name,
            lhs,
            alpha * dq,
            abs_pair(&b_coef, test.values()) + alpha.abs() * dq_abs,
            tol,
        ));
    }

    // A_Δ(u, 1) + B_Δ(u, 1) against its four-sum rearrangement.
    let lhs = h * compensated_sum(a_coef.iter().zip(&b_coef).map(|(a, b)| a + b));
    let (rhs, rhs_abs) = mass_defect_decomposition(u, n);
    let lhs_abs = h * a_coef.iter().chain(&b_coef).map(|t| t.abs()).sum::<f64>();
    out.push(identity("mass_defect_decomposition", lhs, rhs, lhs_abs + rhs_abs, tol));

    // ∫ M_h(u) v_x ∂_x I[g_h(u)] = ∫ v_x u_x. Differences of nodal g_h
    // cancel when neighbours are close, so the scale carries |g_h| itself.
    let mob = element_mobilities(u, sigma, n);
    let dv = forward_diff(v);
    let dg = forward_diff(&gh);
    let gv = gh.values();
    let lhs_terms: Vec<f64> = (0..g.nodes()).map(|k| mob[k] * dv[k] * dg[k]).collect();
    let rhs_terms: Vec<f64> = (0..g.nodes()).map(|k| dv[k] * dp[k]).collect();
    let cancel_scale: f64 = (0..g.nodes())
        .map(|k| mob[k] * dv[k].abs() * (gv[k].abs() + gv[g.next(k)].abs()) / h)
        .sum();
    out.push(identity(
        "entropy_consistency",
        h * compensated_sum(lhs_terms.iter().copied()),
        h * compensated_sum(rhs_terms.iter().copied()),
        h * (rhs_terms.iter().map(|t| t.abs()).sum::<f64>() + cancel_scale),
        tol,
    ));

    // (Δ_h u, v)_h = -∫ u_x v_x.
    let lhs = lumped_inner(&lap, v)?;
    let rhs = -h * compensated_sum(rhs_terms.iter().copied());
    out.push(identity(
        "laplacian_variational_pairing",
        lhs,
        rhs,
        abs_pair(lap.values(), vv) + h * rhs_terms.iter().map(|t| t.abs()).sum::<f64>(),
        tol,
    ));

    // (correction, v)_h = -(C_Strat + S)[A_Δ(u, v) + B_Δ(u, v)].
    let cs = c_strat(&ctx.noise, n, g.length())?;
    let corr = correction_drift(u, prm, cs)?;
    let strength = cs + prm.s_reg;
    let rhs = -strength * (a_delta(u, v, n)? + b_delta(u, v, n)?);
    out.push(identity(
        "correction_pairing",
        lumped_inner(&corr, v)?,
        rhs,
        strength * (abs_pair(&a_coef, vv) + abs_pair(&b_coef, vv)),
        tol,
    ));

    // Conservative flux: zero lumped sum, and -(flux(p), p)_h = ∫ M |p_x|².
    let p = pressure(u, prm)?;
    let flux = flux_divergence_with(&mob, &p);
    let dpp = forward_diff(&p);
    let flux_scale = 2.0 * mob.iter().zip(&dpp).map(|(m, d)| (m * d).abs()).sum::<f64>();
    out.push(identity(
        "flux_conservation",
        h * compensated_sum(flux.values().iter().copied()),
        0.0,
        flux_scale,
        tol,
    ));
    let diss = pressure_dissipation(u, &p, prm)?;
    out.push(identity(
        "pressure_dissipation_pairing",
        -lumped_inner(&flux, &p)?,
        diss,
        abs_pair(flux.values(), p.values()) + diss.abs(),
        tol,
    ));

    // Noise-coefficient bound per active mode (unit amplitude).
    let op = NoiseOperator::new(&ctx.noise, g, n)?;
    let units = op.unit_coefficients(u)?;
    for (&(ell, _), z) in op.modes().iter().zip(&units) {
        let lhs = h * compensated_sum(
            z.values()
                .iter()
                .zip(x)
                .map(|(zi, &ui)| zi * zi / shifted_mobility(ui, sigma, n)),
        );
        let rhs = noise_coefficient_bound_rhs(u, ell, sigma, n);
        out.push(inequality(
            "noise_coefficient_bound",
            rhs,
            lhs,
            lhs.abs() + rhs.abs(),
            true,
        ));
    }

    // Itô-term budget with explicit constants.
    let budget = ito_budget(u, &op, prm, cs, ctx.epsilon, ctx.eta)?;
    out.push(margin("ito_budget", budget.margin(), hyp));

    Ok(out)
}

/// Positive field with log-uniform values in `[lo, hi]`; each node copies
/// its left neighbour with probability `tie`.
pub fn random_positive_field(grid: Grid, lo: f64, hi: f64, tie: f64, rng: &mut impl Rng) -> Field {
    let mut vals: Vec<f64> = Vec::with_capacity(grid.nodes());
    for k in 0..grid.nodes() {
        if k > 0 && rng.random::<f64>() < tie {
            vals.push(vals[k - 1]);
        } else {
            vals.push(lo * (hi / lo).powf(rng.random::<f64>()));
        }
    }
    Field::new(grid, vals).expect("length matches grid")
}

/// Positive periodic field whose neighbouring ratios (wrap included) are
/// at most `c_osc`: centred log-increments bounded by `½ ln c_osc`.
pub fn oscillation_constrained_field(grid: Grid, c_osc: f64, rng: &mut impl Rng) -> Field {
    let nodes = grid.nodes();
    let rho = 0.5 * c_osc.ln() * rng.random::<f64>();
    let mut inc: Vec<f64> = (0..nodes).map(|_| rho * (2.0 * rng.random::<f64>() - 1.0)).collect();
    let avg = inc.iter().sum::<f64>() / nodes as f64;
    inc.iter_mut().for_each(|d| *d -= avg);
    let base = 0.3 * (10.0f64).powf(rng.random::<f64>());
    let mut acc = 0.0;
    Field::from_fn(grid, |k| {
        acc += inc[k];
        base * acc.exp()
    })
}

pub fn random_test_function(grid: Grid, rng: &mut impl Rng) -> Field {
    Field::from_fn(grid, |_| 2.0 * rng.random::<f64>() - 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub samples: usize,
    pub nodes: Vec<usize>,
    pub n_values: Vec<f64>,
    pub c_f_values: Vec<f64>,
    pub seed: u64,
    pub epsilon: f64,
    pub eta: f64,
    pub tolerances: Tolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            nodes: vec![4, 8, 16, 64],
            n_values: vec![2.1, 2.5, 2.9],
            c_f_values: vec![0.02, 0.5],
            seed: 2024,
            epsilon: 0.5,
            eta: 0.5,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: &'static str,
    pub kind: CheckKind,
    pub evaluated: usize,
    pub failures: usize,
    pub out_of_hypothesis: usize,
    #[serde(serialize_with = "finite_or_null")]
    pub worst_residual: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub min_margin: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub max_margin: f64,
}

impl CheckSummary {
    fn new(r: &CheckResult) -> Self {
        Self {
            name: r.name,
            kind: r.kind,
            evaluated: 0,
            failures: 0,
            out_of_hypothesis: 0,
            worst_residual: 0.0,
            min_margin: f64::INFINITY,
            max_margin: f64::NEG_INFINITY,
        }
    }

    fn absorb(&mut self, r: &CheckResult, tol: &Tolerances) {
        self.evaluated += 1;
        if r.failed(tol) {
            self.failures += 1;
        }
        if !r.hypothesis_ok {
            self.out_of_hypothesis += 1;
            return;
        }
        if r.residual.is_nan() || r.residual > self.worst_residual {
            self.worst_residual = r.residual;
        }
        if r.margin.is_finite() {
            self.min_margin = self.min_margin.min(r.margin);
            self.max_margin = self.max_margin.max(r.margin);
        }
    }

    fn merge(&mut self, other: &CheckSummary) {
        self.evaluated += other.evaluated;
        self.failures += other.failures;
        self.out_of_hypothesis += other.out_of_hypothesis;
        if other.worst_residual.is_nan() || other.worst_residual > self.worst_residual {
            self.worst_residual = other.worst_residual;
        }
        self.min_margin = self.min_margin.min(other.min_margin);
        self.max_margin = self.max_margin.max(other.max_margin);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub fields: usize,
    pub failures: usize,
    pub checks: Vec<CheckSummary>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn absorb(&mut self, results: &[CheckResult], tol: &Tolerances) {
        self.fields += 1;
        for r in results {
            let idx = match self.checks.iter().position(|c| c.name == r.name) {
                Some(i) => i,
                None => {
                    self.checks.push(CheckSummary::new(r));
                    self.checks.len() - 1
                }
            };
            if r.failed(tol) {
                self.failures += 1;
            }
            self.checks[idx].absorb(r, tol);
        }
    }

    fn merge(&mut self, other: VerifyReport) {
        self.fields += other.fields;
        self.failures += other.failures;
        for c in other.checks {
            match self.checks.iter_mut().find(|s| s.name == c.name) {
                Some(s) => s.merge(&c),
                None => self.checks.push(c),
            }
        }
    }
}

/// Runs the suite on `samples` unconstrained and `samples`
/// oscillation-constrained fields for every `(c_F, n, L_h)` combination.
pub fn verify_corpus(
    cfg: &VerifyConfig,
    base: &ModelParams,
    noise: &NoiseSpec,
    length: f64,
) -> Result<VerifyReport> {
    let mut combos = Vec::new();
    for &c_f in &cfg.c_f_values {
        for &n in &cfg.n_values {
            for &nodes in &cfg.nodes {
                combos.push((c_f, n, nodes));
            }
        }
    }
    let parts: Vec<Result<VerifyReport>> = combos
        .par_iter()
        .enumerate()
        .map(|(idx, &(c_f, n, nodes))| {
            let grid = Grid::new(length, nodes)?;
            let ctx = SuiteContext {
                params: ModelParams { n, c_f, ..*base },
                noise: noise.clone(),
                epsilon: cfg.epsilon,
                eta: cfg.eta,
                tolerances: cfg.tolerances,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(idx as u64);
            let mut report = VerifyReport {
                fields: 0,
                failures: 0,
                checks: Vec::new(),
            };
            for s in 0..2 * cfg.samples {
                let u = if s % 2 == 0 {
                    random_positive_field(grid, 0.3, 3.0, 0.15, &mut rng)
                } else {
                    oscillation_constrained_field(grid, ctx.params.c_osc(), &mut rng)
                };
                let v = random_test_function(grid, &mut rng);
                report.absorb(&lemma_suite(&u, &v, &ctx)?, &cfg.tolerances);
            }
            Ok(report)
        })
        .collect();
    let mut total = VerifyReport {
        fields: 0,
        failures: 0,
        checks: Vec::new(),
    };
    for part in parts {
        total.merge(part?);
    }
    Ok(total)
}
