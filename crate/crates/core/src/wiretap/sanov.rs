use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::binary_divergence;
use crate::numeric::ser_f64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SanovBound {
    pub n: usize,
    #[serde(serialize_with = "ser_f64")]
    pub delta: f64,
    /// `D_b(δ, β)` in bits.
    #[serde(serialize_with = "ser_f64")]
    pub divergence: f64,
    /// `(n+1)^2 2^{-n D_b(δ,β)}`, the bound on the probability of too many observations.
    #[serde(serialize_with = "ser_f64")]
    pub tail: f64,
    /// `n log2(|X| + 1)`.
    #[serde(serialize_with = "ser_f64")]
    pub leakage_cap: f64,
    /// `tail * leakage_cap`.
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
}

fn params(alpha: f64, beta: f64, delta: Option<f64>) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&beta) {
        return Err(Error::validation("alpha", "alpha and beta must lie in [0, 1]"));
    }
    if beta >= alpha {
        return Err(Error::validation("beta", format!("{beta} must be < alpha = {alpha}")));
    }
    let delta = delta.unwrap_or(0.5 * (alpha + beta));
    if !(beta..=alpha).contains(&delta) {
        return Err(Error::validation("delta", format!("{delta} is not in [{beta}, {alpha}]")));
    }
    Ok((delta, binary_divergence(delta, beta)?))
}

fn log2_value(n: usize, d: f64, x_size: usize) -> f64 {
    let n = n as f64;
    2.0 * (n + 1.0).log2() + n.log2() + ((x_size + 1) as f64).log2().log2() - n * d
}

/// `(n+1)^2 2^{-n D_b(δ,β)} · n log2(|X|+1)`; `δ` defaults to `(α+β)/2`.
pub fn sanov_bound(n: usize, alpha: f64, beta: f64, x_size: usize, delta: Option<f64>) -> Result<SanovBound> {
    let (delta, d) = params(alpha, beta, delta)?;
    if n == 0 || x_size == 0 {
        return Err(Error::validation("n", "n and |X| must be >= 1"));
    }
    let nf = n as f64;
    let tail = (2.0 * (nf + 1.0).log2() - nf * d).exp2();
    let cap = nf * ((x_size + 1) as f64).log2();
    Ok(SanovBound {
        n,
        delta,
        divergence: d,
        tail,
        leakage_cap: cap,
        value: tail * cap,
    })
}

/// Smallest `n` such that the bound is below `threshold` at `n` and at every
/// larger blocklength. `None` when `D_b(δ,β) = 0` or the point lies beyond
/// `2^52` (less on 32-bit targets).
pub fn sanov_crossover(alpha: f64, beta: f64, x_size: usize, delta: Option<f64>, threshold: f64) -> Result<Option<usize>> {
    let (_, d) = params(alpha, beta, delta)?;
    if !(threshold > 0.0) {
        return Err(Error::validation("threshold", "must be > 0"));
    }
    if d == 0.0 || x_size == 0 {
        return Ok(None);
    }
    let t = threshold.log2();
    let g = |n: usize| log2_value(n, d, x_size);
    // g is concave in n: find the last n where it still increases.
    const LIMIT: usize = 1 << (if usize::BITS > 52 { 52 } else { usize::BITS - 2 });
    let (mut lo, mut hi) = (1usize, 2usize);
    while hi < LIMIT && g(hi + 1) >= g(hi) {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if g(mid + 1) >= g(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let peak = if g(lo + 1) >= g(lo) { hi } else { lo };
    if g(peak) < t {
        // Below threshold everywhere, including the maximum.
        return Ok(Some(1));
    }
    // Decreasing from `peak` on: gallop, then bisect.
    let mut step = 1usize;
    let mut a = peak;
    let mut b = peak + step;
    while g(b) >= t {
        if b >= LIMIT {
            return Ok(None);
        }
        a = b;
        step *= 2;
        b = peak + step;
    }
    while b - a > 1 {
        let mid = a + (b - a) / 2;
        if g(mid) < t {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(Some(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_delta_has_no_decay() {
        let a = sanov_bound(10, 0.5, 0.3, 2, Some(0.3)).unwrap();
        let b = sanov_bound(100, 0.5, 0.3, 2, Some(0.3)).unwrap();
        assert_eq!(a.divergence, 0.0);
        assert!(b.value > a.value);
        assert_eq!(sanov_crossover(0.5, 0.3, 2, Some(0.3), 0.01).unwrap(), None);
    }

    #[test]
    fn direct_formula() {
        let r = sanov_bound(200, 0.5, 0.3, 2, Some(0.4)).unwrap();
        let d = 0.4 * (0.4f64 / 0.3).log2() + 0.6 * (0.6f64 / 0.7).log2();
        let want = 201.0f64.powi(2) * (-200.0 * d).exp2() * 200.0 * 3.0f64.log2();
        assert!((r.value - want).abs() <= 1e-10 * want);
        assert_eq!(r.delta, 0.4);
        assert!(sanov_bound(10, 0.3, 0.5, 2, None).is_err());
        assert!(sanov_bound(10, 0.5, 0.3, 2, Some(0.6)).is_err());
    }

    #[test]
    fn crossover_matches_linear_scan() {
        for (alpha, beta, delta) in [(0.5, 0.3, Some(0.4)), (0.9, 0.1, None), (0.6, 0.5, None)] {
            let c = sanov_crossover(alpha, beta, 2, delta, 0.01).unwrap().unwrap();
            let f = |n| sanov_bound(n, alpha, beta, 2, delta).unwrap().value;
            assert!(f(c) < 0.01);
            assert!(f(c - 1) >= 0.01);
            for n in c..c + 200 {
                assert!(f(n + 1) <= f(n));
            }
            // Oracle: last n (scanning down from far out) where the bound is >= threshold.
            let far = 20 * c;
            let last_above = (1..far).rev().find(|&n| f(n) >= 0.01).unwrap();
            assert_eq!(c, last_above + 1);
        }
    }
}
