//! Soft-covering exponents, their coefficients, and the probability bounds that
//! accompany them.
//!
//! All exponents are in bits. The supremum over the Rényi order `α` is taken
//! numerically: a 512-point logarithmic grid over `α - 1 ∈ [1e-4, 1e4]`
//! followed by golden-section refinement around the best grid point.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{mutual_information, renyi_of};
use crate::numeric::{golden_max, ser_f64, ser_opt_f64, LOG2_E};
use crate::probability::{JointPmf, Pmf};

pub const ALPHA_GRID_POINTS: usize = 512;
pub const ALPHA_GRID_MIN: f64 = 1e-4;
pub const ALPHA_GRID_MAX: f64 = 1e4;

/// `1 + 10^t` for `t` evenly spaced in `[-4, 4]`.
pub fn alpha_grid() -> Vec<f64> {
    let (lo, hi) = (ALPHA_GRID_MIN.log10(), ALPHA_GRID_MAX.log10());
    (0..ALPHA_GRID_POINTS)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / (ALPHA_GRID_POINTS - 1) as f64;
            1.0 + 10f64.powf(t)
        })
        .collect()
}

/// `Q_{U,V}` together with a rate and a confidence parameter `δ`.
#[derive(Debug, Clone)]
pub struct ExponentParams {
    joint: Vec<f64>,
    product: Vec<f64>,
    qv: Pmf,
    mutual_info: f64,
    pub rate: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaSearch {
    /// Supremum of `β_{α,δ}` over `α > 1`, clamped at zero.
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    /// Best point on the logarithmic grid, when the supremum is positive.
    #[serde(serialize_with = "ser_opt_f64")]
    pub grid_argmax: Option<f64>,
    /// Refined maximizer, when the supremum is positive.
    #[serde(serialize_with = "ser_opt_f64")]
    pub alpha_star: Option<f64>,
}

impl ExponentParams {
    pub fn new(joint: &JointPmf, rate: f64, delta: f64) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::validation("rate", format!("{rate} must be finite and >= 0")));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::validation("delta", format!("{delta} must be finite and >= 0")));
        }
        let qu = joint.row_marginal();
        let qv = joint.col_marginal();
        let product = JointPmf::independent(&qu, &qv).table().to_vec();
        Ok(ExponentParams {
            joint: joint.table().to_vec(),
            product,
            mutual_info: mutual_information(joint),
            qv,
            rate,
            delta,
        })
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::validation("delta", format!("{delta} must be finite and >= 0")));
        }
        Ok(ExponentParams {
            delta,
            ..self.clone()
        })
    }

    pub fn with_rate(&self, rate: f64) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::validation("rate", format!("{rate} must be finite and >= 0")));
        }
        Ok(ExponentParams {
            rate,
            ..self.clone()
        })
    }

    pub fn mutual_information(&self) -> f64 {
        self.mutual_info
    }

    pub fn qv(&self) -> &Pmf {
        &self.qv
    }

    /// Whether `δ ∈ (0, R - I(U;V))`, the range in which the bounds are
    /// non-trivial.
    pub fn delta_in_range(&self) -> bool {
        self.delta > 0.0 && self.delta < self.rate - self.mutual_info
    }

    /// `d_α(Q_{U,V}, Q_U Q_V)`.
    pub fn d_alpha(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        Ok(renyi_of(&self.joint, &self.product, alpha))
    }

    /// The optimized typicality slack `ε_{α,δ}`.
    pub fn epsilon_alpha_delta(&self, alpha: f64) -> Result<f64> {
        let d = self.d_alpha(alpha)?;
        let am1 = alpha - 1.0;
        Ok((0.5 * (self.rate - self.delta) + am1 * d) / (0.5 + am1) - self.mutual_info)
    }

    /// `β_{α,δ} = (α-1)/(2α-1) (R - δ - d_α)`; `-inf` where `d_α` is infinite.
    pub fn beta_alpha_delta(&self, alpha: f64) -> Result<f64> {
        let d = self.d_alpha(alpha)?;
        Ok(beta_from(alpha, self.rate - self.delta, d))
    }

    /// `γ_δ = sup_{α>1} β_{α,δ}`, clamped at zero.
    pub fn gamma_delta(&self) -> AlphaSearch {
        let grid = alpha_grid();
        let r = self.rate - self.delta;
        let beta = |a: f64| beta_from(a, r, renyi_of(&self.joint, &self.product, a));
        let values: Vec<f64> = grid.iter().map(|&a| beta(a)).collect();
        let mut best = 0usize;
        for (i, &v) in values.iter().enumerate() {
            if v > values[best] {
                best = i;
            }
        }
        if !(values[best] > 0.0) {
            return AlphaSearch {
                value: 0.0,
                grid_argmax: None,
                alpha_star: None,
            };
        }
        // Refine in t = log10(α - 1) between the neighbours of the best point.
        let t = |a: f64| (a - 1.0).log10();
        let lo = t(grid[best.saturating_sub(1)]);
        let hi = t(grid[(best + 1).min(grid.len() - 1)]);
        let (tr, vr) = golden_max(|x| beta(1.0 + 10f64.powf(x)), lo, hi, 1e-12);
        let (alpha_star, value) = if vr > values[best] {
            (1.0 + 10f64.powf(tr), vr)
        } else {
            (grid[best], values[best])
        };
        AlphaSearch {
            value,
            grid_argmax: Some(grid[best]),
            alpha_star: Some(alpha_star),
        }
    }

    /// `γ* = γ_0`.
    pub fn gamma_star(&self) -> f64 {
        ExponentParams {
            delta: 0.0,
            ..self.clone()
        }
        .gamma_delta()
        .value
    }

    /// `c_δ` for the current `γ_δ`.
    pub fn c_delta(&self) -> f64 {
        c_delta(&self.qv, self.gamma_delta().value)
    }

    /// `c_{α,δ}`, the coefficient with `β_{α,δ}` in place of `γ_δ`.
    pub fn c_alpha_delta(&self, alpha: f64) -> Result<f64> {
        Ok(c_delta(&self.qv, self.beta_alpha_delta(alpha)?))
    }

    /// `(α, β_{α,δ})` over the default grid.
    pub fn beta_curve(&self) -> Vec<(f64, f64)> {
        let r = self.rate - self.delta;
        alpha_grid()
            .into_iter()
            .map(|a| (a, beta_from(a, r, renyi_of(&self.joint, &self.product, a))))
            .collect()
    }

    /// `ε_{α,δ}` at the optimizing order, or at `α = 2` when the supremum is
    /// not attained at any grid point.
    pub fn epsilon_at_optimum(&self) -> f64 {
        let a = self.gamma_delta().alpha_star.unwrap_or(2.0);
        self.epsilon_alpha_delta(a).expect("alpha > 1")
    }

    pub fn report(&self, n: Option<usize>) -> ExponentReport {
        let search = self.gamma_delta();
        let alpha = search.alpha_star.unwrap_or(2.0);
        let gamma = search.value;
        let c = c_delta(&self.qv, gamma);
        let v_size = self.qv.len();
        let (threshold, failure) = match n {
            Some(n) if self.delta > 0.0 => (
                Some(c * n as f64 * (-(n as f64) * gamma).exp2()),
                Some(failure_probability_bound(n, self.delta, v_size)),
            ),
            Some(n) => (Some(c * n as f64 * (-(n as f64) * gamma).exp2()), None),
            None => (None, None),
        };
        ExponentReport {
            mutual_information: self.mutual_info,
            rate: self.rate,
            delta: self.delta,
            delta_in_range: self.delta_in_range(),
            n,
            alpha_star: search.alpha_star,
            alpha_grid_argmax: search.grid_argmax,
            alpha_used: alpha,
            d_alpha: self.d_alpha(alpha).expect("alpha > 1"),
            epsilon: self.epsilon_alpha_delta(alpha).expect("alpha > 1"),
            beta: self.beta_alpha_delta(alpha).expect("alpha > 1"),
            gamma_delta: gamma,
            gamma_star: self.gamma_star(),
            c_delta: c,
            threshold,
            failure_bound: failure,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::validation(
            "alpha",
            format!("{alpha} must be finite and > 1"),
        ));
    }
    Ok(())
}

fn beta_from(alpha: f64, r_minus_delta: f64, d: f64) -> f64 {
    if d.is_infinite() {
        return f64::NEG_INFINITY;
    }
    (alpha - 1.0) / (2.0 * alpha - 1.0) * (r_minus_delta - d)
}

/// `3 log e + 2γ + 2 log max_{v ∈ supp} 1/Q_V(v)`, in bits.
pub fn c_delta(qv: &Pmf, gamma: f64) -> f64 {
    3.0 * LOG2_E + 2.0 * gamma + 2.0 * (1.0 / qv.min_support_prob()).log2()
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentReport {
    #[serde(serialize_with = "ser_f64")]
    pub mutual_information: f64,
    #[serde(serialize_with = "ser_f64")]
    pub rate: f64,
    #[serde(serialize_with = "ser_f64")]
    pub delta: f64,
    pub delta_in_range: bool,
    pub n: Option<usize>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub alpha_star: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub alpha_grid_argmax: Option<f64>,
    /// Order at which `epsilon`, `beta` and `d_alpha` are evaluated.
    #[serde(serialize_with = "ser_f64")]
    pub alpha_used: f64,
    #[serde(serialize_with = "ser_f64")]
    pub d_alpha: f64,
    #[serde(serialize_with = "ser_f64")]
    pub epsilon: f64,
    #[serde(serialize_with = "ser_f64")]
    pub beta: f64,
    #[serde(serialize_with = "ser_f64")]
    pub gamma_delta: f64,
    #[serde(serialize_with = "ser_f64")]
    pub gamma_star: f64,
    #[serde(serialize_with = "ser_f64")]
    pub c_delta: f64,
    /// `c_δ n 2^{-nγ_δ}`.
    #[serde(serialize_with = "ser_opt_f64")]
    pub threshold: Option<f64>,
    pub failure_bound: Option<ClampedBound>,
}

/// A probability bound with its raw (possibly > 1) value preserved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClampedBound {
    #[serde(serialize_with = "ser_f64")]
    pub raw: f64,
    /// Natural log of `raw`; finite even when `raw` underflows.
    #[serde(serialize_with = "ser_f64")]
    pub ln_raw: f64,
    #[serde(serialize_with = "ser_f64")]
    pub clamped: f64,
}

impl ClampedBound {
    fn from_ln(ln_raw: f64) -> Self {
        let raw = ln_raw.exp();
        ClampedBound {
            raw,
            ln_raw,
            clamped: raw.min(1.0),
        }
    }
}

/// `(1 + |V|^n) e^{-2^{nδ}/3}`.
pub fn failure_probability_bound(n: usize, delta: f64, v_size: usize) -> ClampedBound {
    let n_f = n as f64;
    let lv = (v_size as f64).ln();
    // ln(1 + |V|^n) = n ln|V| + ln(1 + |V|^{-n})
    let ln_prefactor = n_f * lv + (-n_f * lv).exp().ln_1p();
    ClampedBound::from_ln(ln_prefactor - (n_f * delta).exp2() / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernoffBound {
    #[serde(serialize_with = "ser_f64")]
    pub ratio: f64,
    /// `exp(-(Mμ/B)((c/μ)(ln(c/μ) - 1) + 1))`, valid for `c/μ ≥ 1`.
    #[serde(serialize_with = "ser_f64")]
    pub exact: f64,
    /// `exp(-(Mμ/3B)(c/μ - 1)^2)`, only for `c/μ ∈ [1, 2]`.
    #[serde(serialize_with = "ser_opt_f64")]
    pub quadratic: Option<f64>,
    /// Whether the quadratic form dominates the exact form.
    pub quadratic_dominates: Option<bool>,
}

/// Both forms of the Chernoff bound on `P((1/M) Σ X_m ≥ c)` for i.i.d.
/// `X_m ∈ [0, B]` with mean at most `μ`.
pub fn chernoff_bound(m: u64, mu: f64, b: f64, c: f64) -> Result<ChernoffBound> {
    if m == 0 {
        return Err(Error::validation("M", "must be at least 1"));
    }
    if !(mu > 0.0) || !(b >= mu) || !b.is_finite() {
        return Err(Error::validation("mu", format!("need 0 < mu <= B, got mu={mu}, B={b}")));
    }
    let x = c / mu;
    if !(x >= 1.0) {
        return Err(Error::validation("c", format!("c/mu = {x} must be >= 1")));
    }
    let scale = m as f64 * mu / b;
    let exact = (-scale * (x * (x.ln() - 1.0) + 1.0)).exp();
    let quadratic = (x <= 2.0).then(|| (-scale / 3.0 * (x - 1.0) * (x - 1.0)).exp());
    Ok(ChernoffBound {
        ratio: x,
        exact,
        quadratic,
        quadratic_dominates: quadratic.map(|q| exact <= q),
    })
}

/// `e^{-nγ₁} + n log(1/μ_V) e^{-e^{nγ₂}}`, with `μ_V` the smallest positive
/// mass of `qv`.
pub fn expected_divergence_bound(gamma1: f64, gamma2: f64, n: usize, qv: &Pmf) -> Result<f64> {
    if !(gamma1 > 0.0) || !(gamma2 > 0.0) {
        return Err(Error::validation("gamma", "gamma1 and gamma2 must be > 0"));
    }
    if qv.probs().iter().any(|&p| p == 0.0) {
        return Err(Error::validation(
            "qv",
            "Q_V has zero-mass symbols; restrict to its support first",
        ));
    }
    let n_f = n as f64;
    let cap = n_f * (1.0 / qv.min_support_prob()).log2();
    Ok((-n_f * gamma1).exp() + cap * (-(n_f * gamma2).exp()).exp())
}
