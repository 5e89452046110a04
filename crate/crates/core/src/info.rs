//! Information measures in bits.
//!
//! Conventions: `0 log(0/q) = 0` and `p log(p/0) = +inf`. Divergences that are
//! infinite are returned as `f64::INFINITY`.

use crate::error::{Error, Result};
use crate::numeric::{log2_sum_exp2, neumaier_sum};
use crate::probability::{JointPmf, Pmf, SequenceIndex};

fn same_len(p: &Pmf, q: &Pmf) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::validation(
            "q",
            format!("alphabet sizes differ ({} vs {})", p.len(), q.len()),
        ));
    }
    Ok(())
}

pub fn entropy(p: &Pmf) -> f64 {
    entropy_of(p.probs())
}

pub(crate) fn entropy_of(p: &[f64]) -> f64 {
    neumaier_sum(p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()))
}

/// `h(x)` with `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::validation("x", format!("{x} is not in [0, 1]")));
    }
    Ok(entropy_of(&[x, 1.0 - x]))
}

pub fn relative_entropy(p: &Pmf, q: &Pmf) -> Result<f64> {
    same_len(p, q)?;
    Ok(relative_entropy_of(p.probs(), q.probs()))
}

pub(crate) fn relative_entropy_of(p: &[f64], q: &[f64]) -> f64 {
    let mut terms = Vec::with_capacity(p.len());
    for (&a, &b) in p.iter().zip(q) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return f64::INFINITY;
        }
        terms.push(a * (a / b).log2());
    }
    neumaier_sum(terms).max(0.0)
}

/// `I(U;V) = D(Q_{UV} || Q_U Q_V)`.
pub fn mutual_information(j: &JointPmf) -> f64 {
    mutual_information_of(j.table(), j.rows_len(), j.cols_len())
}

pub(crate) fn mutual_information_of(table: &[f64], rows: usize, cols: usize) -> f64 {
    let mut pu = vec![0.0; rows];
    let mut pv = vec![0.0; cols];
    for u in 0..rows {
        for v in 0..cols {
            let x = table[u * cols + v];
            pu[u] += x;
            pv[v] += x;
        }
    }
    let mut terms = Vec::with_capacity(table.len());
    for u in 0..rows {
        for v in 0..cols {
            let x = table[u * cols + v];
            if x > 0.0 {
                terms.push(x * (x / (pu[u] * pv[v])).log2());
            }
        }
    }
    neumaier_sum(terms).max(0.0)
}

/// Rényi divergence of order `alpha > 1`.
pub fn renyi_divergence(gamma: &Pmf, pi: &Pmf, alpha: f64) -> Result<f64> {
    same_len(gamma, pi)?;
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::validation(
            "alpha",
            format!("{alpha} must be finite and > 1; use renyi_divergence_at_one for the limit"),
        ));
    }
    Ok(renyi_of(gamma.probs(), pi.probs(), alpha))
}

/// `lim_{α↓1} d_α(Γ, Π) = D(Γ || Π)`.
pub fn renyi_divergence_at_one(gamma: &Pmf, pi: &Pmf) -> Result<f64> {
    relative_entropy(gamma, pi)
}

/// Log-sum-exp evaluation; stable for `alpha` close to one and for large `alpha`.
pub(crate) fn renyi_of(gamma: &[f64], pi: &[f64], alpha: f64) -> f64 {
    let mut terms = Vec::with_capacity(gamma.len());
    for (&g, &p) in gamma.iter().zip(pi) {
        if g == 0.0 {
            continue;
        }
        if p == 0.0 {
            return f64::INFINITY;
        }
        terms.push(alpha * g.log2() + (1.0 - alpha) * p.log2());
    }
    let am1 = alpha - 1.0;
    if am1 < 1e-6 {
        // log2 Σ Γ (Γ/Π)^{α-1} ≈ (α-1) D + O((α-1)^2); evaluate the ratio via
        // ln_1p to avoid catastrophic cancellation.
        let s: f64 = neumaier_sum(gamma.iter().zip(pi).filter(|(g, _)| **g > 0.0).map(
            |(&g, &p)| g * (((g / p).log2() * am1 * std::f64::consts::LN_2).exp_m1()),
        ));
        return (s.ln_1p() / std::f64::consts::LN_2 / am1).max(0.0);
    }
    (log2_sum_exp2(&terms) / am1).max(0.0)
}

/// `i(u; v) = log2(Q_{V|U}(v|u) / Q_V(v))`, possibly `-inf`.
pub fn information_density(j: &JointPmf, u: usize, v: usize) -> Result<f64> {
    let pu = j.row_marginal();
    let pv = j.col_marginal();
    if u >= j.rows_len() || pu.get(u) <= 0.0 {
        return Err(Error::validation("u", format!("symbol {u} has zero marginal mass")));
    }
    if v >= j.cols_len() || pv.get(v) <= 0.0 {
        return Err(Error::validation("v", format!("symbol {v} has zero marginal mass")));
    }
    Ok(density_of(j.get(u, v), pu.get(u), pv.get(v)))
}

#[inline]
pub(crate) fn density_of(juv: f64, pu: f64, pv: f64) -> f64 {
    if juv == 0.0 {
        f64::NEG_INFINITY
    } else {
        (juv / (pu * pv)).log2()
    }
}

/// `Σ_t i(u_t; v_t)`.
pub fn information_density_seq(
    j: &JointPmf,
    useq: &SequenceIndex,
    vseq: &SequenceIndex,
) -> Result<f64> {
    if useq.len() != vseq.len() {
        return Err(Error::validation("vseq", "sequence lengths differ"));
    }
    let table = density_table(j)?;
    let k = j.cols_len();
    Ok(useq
        .symbols()
        .iter()
        .zip(vseq.symbols())
        .map(|(&u, &v)| table[u * k + v])
        .sum())
}

/// Per-letter densities, row-major. Rows or columns of zero marginal mass are
/// an error only if they are actually used; here they are set to `-inf`.
pub(crate) fn density_table(j: &JointPmf) -> Result<Vec<f64>> {
    let pu = j.row_marginal();
    let pv = j.col_marginal();
    let k = j.cols_len();
    let mut out = vec![f64::NEG_INFINITY; j.rows_len() * k];
    for u in 0..j.rows_len() {
        for v in 0..k {
            if pu.get(u) > 0.0 && pv.get(v) > 0.0 {
                out[u * k + v] = density_of(j.get(u, v), pu.get(u), pv.get(v));
            }
        }
    }
    Ok(out)
}

/// `D_b(δ, β) = D(Ber(δ) || Ber(β))`.
pub fn binary_divergence(delta: f64, beta: f64) -> Result<f64> {
    for (name, x) in [("delta", delta), ("beta", beta)] {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::validation(name, format!("{x} is not in [0, 1]")));
        }
    }
    Ok(relative_entropy_of(&[delta, 1.0 - delta], &[beta, 1.0 - beta]))
}
