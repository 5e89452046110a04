use std::collections::BTreeMap;

use serde::Serialize;

use super::Codebook;
use crate::error::{Error, Result};
use crate::numeric::{neumaier_sum, ser_f64};
use crate::probability::sequence::decode_into;
use crate::probability::tensor::{apply_channel, conditional_product, product_vector};
use crate::probability::{sequence_count, Channel, Pmf};

/// Output law of a uniformly chosen codeword sent through `n` channel uses.
#[derive(Debug, Clone, PartialEq)]
pub enum InducedDistribution {
    /// One entry per sequence in `V^n`, in lexicographic order.
    Dense { n: usize, radix: usize, probs: Vec<f64> },
    /// Only sequences with positive mass, keyed by lexicographic index.
    Sparse {
        n: usize,
        radix: usize,
        probs: BTreeMap<u64, f64>,
    },
}

impl InducedDistribution {
    pub fn n(&self) -> usize {
        match self {
            Self::Dense { n, .. } | Self::Sparse { n, .. } => *n,
        }
    }

    pub fn radix(&self) -> usize {
        match self {
            Self::Dense { radix, .. } | Self::Sparse { radix, .. } => *radix,
        }
    }

    /// `(sequence index, probability)` in index order; dense form includes zeros.
    pub fn entries(&self) -> Box<dyn Iterator<Item = (u64, f64)> + '_> {
        match self {
            Self::Dense { probs, .. } => {
                Box::new(probs.iter().enumerate().map(|(i, &p)| (i as u64, p)))
            }
            Self::Sparse { probs, .. } => Box::new(probs.iter().map(|(&i, &p)| (i, p))),
        }
    }

    pub fn total_mass(&self) -> f64 {
        neumaier_sum(self.entries().map(|(_, p)| p))
    }

    pub fn prob(&self, v: u64) -> f64 {
        match self {
            Self::Dense { probs, .. } => probs[v as usize],
            Self::Sparse { probs, .. } => probs.get(&v).copied().unwrap_or(0.0),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            Self::Dense { probs, .. } => probs.clone(),
            Self::Sparse { n, radix, probs } => {
                let mut out = vec![0.0; radix.pow(*n as u32)];
                for (&i, &p) in probs {
                    out[i as usize] = p;
                }
                out
            }
        }
    }
}

/// Exact induced distribution. Dense when `|V|^n <= cap`, otherwise sparse over
/// the union of the codewords' output supports.
pub fn induced_distribution(cb: &Codebook, ch: &Channel, cap: u64) -> Result<InducedDistribution> {
    if cb.radix != ch.input_len() {
        return Err(Error::validation(
            "channel",
            format!(
                "codebook alphabet has {} symbols but the channel has {} inputs",
                cb.radix,
                ch.input_len()
            ),
        ));
    }
    let n = cb.n;
    let vk = ch.output_len();
    let weight = 1.0 / cb.len() as f64;
    let v_total = sequence_count(vk, n);
    if let Some(total) = v_total.filter(|&t| t <= cap) {
        let u_total = sequence_count(cb.radix, n).unwrap_or(u64::MAX);
        let probs = if u_total <= cap {
            let hist: Vec<f64> = cb
                .histogram()
                .into_iter()
                .map(|c| c as f64 * weight)
                .collect();
            apply_channel(&hist, n, ch)
        } else {
            let mut acc = vec![0.0; total as usize];
            let mut u = vec![0; n];
            for &c in &cb.codewords {
                decode_into(c, cb.radix, &mut u);
                for (a, p) in acc.iter_mut().zip(conditional_product(ch, &u)) {
                    *a += weight * p;
                }
            }
            acc
        };
        return Ok(InducedDistribution::Dense {
            n,
            radix: vk,
            probs,
        });
    }
    // Sparse: enumerate the support of each Q^n(.|u).
    let supports: Vec<Vec<(usize, f64)>> = (0..ch.input_len())
        .map(|x| {
            ch.row(x)
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(v, &p)| (v, p))
                .collect()
        })
        .collect();
    let mut needed: u128 = 0;
    let mut u = vec![0; n];
    for &c in &cb.codewords {
        decode_into(c, cb.radix, &mut u);
        needed += u.iter().map(|&s| supports[s].len() as u128).product::<u128>();
    }
    if needed > cap as u128 || sequence_count(vk, n).is_none() {
        return Err(Error::cap(
            "induced distribution (sparse)",
            needed.max(v_total.map_or(u128::MAX, |t| t as u128)),
            cap as u128,
        ));
    }
    let mut probs = BTreeMap::new();
    for &c in &cb.codewords {
        decode_into(c, cb.radix, &mut u);
        let mut partial: Vec<(u64, f64)> = vec![(0, weight)];
        for &s in &u {
            let mut next = Vec::with_capacity(partial.len() * supports[s].len());
            for &(idx, p) in &partial {
                for &(v, q) in &supports[s] {
                    next.push((idx * vk as u64 + v as u64, p * q));
                }
            }
            partial = next;
        }
        for (idx, p) in partial {
            *probs.entry(idx).or_insert(0.0) += p;
        }
    }
    Ok(InducedDistribution::Sparse {
        n,
        radix: vk,
        probs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    /// `D(P || Q_V^n)` in bits.
    #[serde(serialize_with = "ser_f64")]
    pub divergence: f64,
    /// Almost-sure cap `n log2(1 / μ_V)`.
    #[serde(serialize_with = "ser_f64")]
    pub cap: f64,
    /// First sequence (by index) with positive induced mass but zero reference
    /// mass, when the divergence is infinite.
    pub offending_sequence: Option<u64>,
}

/// Exact `D(P || Q_V^n)`, accumulated with compensation in index order.
pub fn soft_covering_divergence(ind: &InducedDistribution, qv: &Pmf) -> Result<DivergenceReport> {
    if qv.len() != ind.radix() {
        return Err(Error::validation(
            "qv",
            format!("{} symbols, induced distribution has {}", qv.len(), ind.radix()),
        ));
    }
    let n = ind.n();
    let cap = n as f64 * (1.0 / qv.min_support_prob()).log2();
    let log_q: Vec<f64> = qv.probs().iter().map(|p| p.log2()).collect();
    let reference: Option<Vec<f64>> = match ind {
        InducedDistribution::Dense { .. } => Some(product_vector(qv.probs(), n)),
        InducedDistribution::Sparse { .. } => None,
    };
    let mut terms = Vec::new();
    let mut buf = vec![0; n];
    for (v, p) in ind.entries() {
        if p == 0.0 {
            continue;
        }
        let log_ratio = match &reference {
            Some(r) => {
                let q = r[v as usize];
                if q == 0.0 { f64::INFINITY } else { (p / q).log2() }
            }
            None => {
                decode_into(v, ind.radix(), &mut buf);
                p.log2() - buf.iter().map(|&s| log_q[s]).sum::<f64>()
            }
        };
        if log_ratio == f64::INFINITY {
            return Ok(DivergenceReport {
                divergence: f64::INFINITY,
                cap,
                offending_sequence: Some(v),
            });
        }
        terms.push(p * log_ratio);
    }
    Ok(DivergenceReport {
        divergence: neumaier_sum(terms).max(0.0),
        cap,
        offending_sequence: None,
    })
}
