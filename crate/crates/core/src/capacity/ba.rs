use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::mutual_information_of;
use crate::numeric::{ser_f64, ser_vec_f64};
use crate::probability::{Channel, Pmf};

pub const BA_TOLERANCE: f64 = 1e-9;
pub const BA_MAX_ITERATIONS: usize = 100_000;

/// Result of the alternating-maximization capacity computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaResult {
    /// `I(p; W)` at the final input law; a lower bound on capacity within
    /// `upper - value` of it.
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    /// `max_x D(W_x || pW)`, an upper bound on capacity.
    #[serde(serialize_with = "ser_f64")]
    pub upper: f64,
    #[serde(serialize_with = "ser_vec_f64")]
    pub input: Vec<f64>,
    pub iterations: usize,
}

/// Capacity of a channel in bits.
pub fn ba_capacity(ch: &Channel) -> Result<(BaResult, Pmf)> {
    let r = ba_capacity_rows(ch.matrix(), ch.input_len(), ch.output_len(), BA_TOLERANCE, BA_MAX_ITERATIONS)?;
    let p = Pmf::new(ch.input_alphabet().clone(), r.input.clone())?;
    Ok((r, p))
}

/// Capacity of the row-stochastic `rows` (`k_in x k_out`, row-major).
///
/// Stops when the gap between the upper bound `max_x D(W_x || q)` and the
/// current mutual information is below `tol`.
pub fn ba_capacity_rows(
    rows: &[f64],
    k_in: usize,
    k_out: usize,
    tol: f64,
    max_iter: usize,
) -> Result<BaResult> {
    debug_assert_eq!(rows.len(), k_in * k_out);
    // Precompute W log W for the divergence terms.
    let wlogw: Vec<f64> = rows
        .iter()
        .map(|&w| if w > 0.0 { w * w.log2() } else { 0.0 })
        .collect();
    let eval = |p: &[f64], d: &mut [f64]| -> (f64, f64) {
        let mut q = vec![0.0; k_out];
        for x in 0..k_in {
            if p[x] == 0.0 {
                continue;
            }
            for (qy, &w) in q.iter_mut().zip(&rows[x * k_out..(x + 1) * k_out]) {
                *qy += p[x] * w;
            }
        }
        let logq: Vec<f64> = q.iter().map(|&v| if v > 0.0 { v.log2() } else { 0.0 }).collect();
        for x in 0..k_in {
            let r = &rows[x * k_out..(x + 1) * k_out];
            let wl = &wlogw[x * k_out..(x + 1) * k_out];
            let mut s = 0.0;
            for y in 0..k_out {
                if r[y] > 0.0 {
                    s += wl[y] - r[y] * logq[y];
                }
            }
            d[x] = s;
        }
        let lower: f64 = p.iter().zip(d.iter()).map(|(a, b)| a * b).sum();
        (lower, d.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    };
    let mut p = vec![1.0 / k_in as f64; k_in];
    let mut d = vec![0.0; k_in];
    let (mut lower, mut upper) = eval(&p, &mut d);
    let step = |p: &[f64], d: &[f64], upper: f64, mu: f64, out: &mut [f64]| {
        let mut z = 0.0;
        for x in 0..k_in {
            // Floored so that no input is lost to underflow: a zero weight
            // could never grow back.
            out[x] = (p[x] * (mu * (d[x] - upper)).exp2()).max(1e-250);
            z += out[x];
        }
        out.iter_mut().for_each(|v| *v /= z);
    };
    let (mut plain, mut plain_d) = (vec![0.0; k_in], vec![0.0; k_in]);
    let (mut fast, mut fast_d) = (vec![0.0; k_in], vec![0.0; k_in]);
    // Each iteration takes the classical update (multiplier 1, which never
    // decreases I(p)) or an over-relaxed one with multiplier `mu`, whichever
    // gives the larger I(p); `mu` adapts to which one won.
    let mut mu = 2.0f64;
    let mut gap = upper - lower;
    for it in 0..=max_iter {
        gap = upper - lower;
        if gap < tol {
            let value = mutual_information_of(&joint_of(&p, rows, k_out), k_in, k_out);
            return Ok(BaResult {
                value: value.min(upper).max(0.0),
                upper: upper.max(0.0),
                input: p,
                iterations: it,
            });
        }
        step(&p, &d, upper, 1.0, &mut plain);
        let (lp, up) = eval(&plain, &mut plain_d);
        step(&p, &d, upper, mu, &mut fast);
        let (lf, uf) = eval(&fast, &mut fast_d);
        if lf > lp {
            std::mem::swap(&mut p, &mut fast);
            std::mem::swap(&mut d, &mut fast_d);
            (lower, upper) = (lf, uf);
            mu = (mu * 2.0).min(256.0);
        } else {
            std::mem::swap(&mut p, &mut plain);
            std::mem::swap(&mut d, &mut plain_d);
            (lower, upper) = (lp, up);
            mu = (mu * 0.5).max(2.0);
        }
    }
    Err(Error::NonConvergence {
        routine: "capacity iteration".into(),
        iterations: max_iter,
        bracket_width: gap,
    })
}

fn joint_of(p: &[f64], rows: &[f64], k_out: usize) -> Vec<f64> {
    p.iter()
        .enumerate()
        .flat_map(|(x, &px)| rows[x * k_out..(x + 1) * k_out].iter().map(move |w| px * w))
        .collect()
}
