use std::collections::BTreeSet;

use serde::Serialize;

use super::code::WiretapCode;
use crate::capacity::{ba_capacity_rows, BA_MAX_ITERATIONS, BA_TOLERANCE};
use crate::error::{Error, Result};
use crate::info::mutual_information_of;
use crate::numeric::{neumaier_sum, ser_f64, ser_vec_f64};
use crate::parallel::try_map_indexed;
use crate::probability::sequence::decode_into;
use crate::probability::tensor::{conditional_product, product_vector};
use crate::probability::{sequence_count, Channel};
use crate::rng::stream;

/// Leakage of one finite channel `m -> observation`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageReport {
    /// `D(P_{Z|M=m} || reference)` for every message, in bits.
    #[serde(serialize_with = "ser_vec_f64")]
    pub per_message_divergence: Vec<f64>,
    /// Message attaining the largest divergence (smallest index on ties).
    pub max_message: usize,
    #[serde(serialize_with = "ser_f64")]
    pub max_divergence: f64,
    /// `max_{P_M} I(M;Z)`, the capacity of `m -> Z`.
    #[serde(serialize_with = "ser_f64")]
    pub exact_sem: f64,
    /// Maximizing message law.
    #[serde(serialize_with = "ser_vec_f64")]
    pub maximizing_pm: Vec<f64>,
    /// `I(M;Z)` under a uniform message.
    #[serde(serialize_with = "ser_f64")]
    pub uniform_leakage: f64,
    /// `exact_sem <= max_divergence`.
    pub bound_check: bool,
}

/// Builds the report from the conditional rows (`|M| x K`) and a reference law.
pub fn leakage_from_family(rows: &[Vec<f64>], reference: &[f64]) -> Result<LeakageReport> {
    if rows.is_empty() {
        return Err(Error::validation("code", "code has no messages"));
    }
    let k = reference.len();
    let per: Vec<f64> = rows.iter().map(|r| divergence(r, reference)).collect();
    let (mut max_message, mut max_divergence) = (0, per[0]);
    for (m, &d) in per.iter().enumerate() {
        if d > max_divergence {
            max_message = m;
            max_divergence = d;
        }
    }
    let flat: Vec<f64> = rows.concat();
    let ba = ba_capacity_rows(&flat, rows.len(), k, BA_TOLERANCE, BA_MAX_ITERATIONS)?;
    let uniform: Vec<f64> = flat.iter().map(|p| p / rows.len() as f64).collect();
    let uniform_leakage = mutual_information_of(&uniform, rows.len(), k);
    Ok(LeakageReport {
        bound_check: ba.value <= max_divergence + 1e-12,
        per_message_divergence: per,
        max_message,
        max_divergence,
        exact_sem: ba.value,
        maximizing_pm: ba.input,
        uniform_leakage,
    })
}

/// `D(p || q)` in bits, summed in index order.
pub(crate) fn divergence(p: &[f64], q: &[f64]) -> f64 {
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

fn check_code(code: &WiretapCode) -> Result<()> {
    if code.message_count == 0 || code.randomness_count == 0 {
        return Err(Error::validation("code", "code has no codewords"));
    }
    Ok(())
}

/// `P_{Z^n|M=m}` for every message: the average over `w` of `Q^n_{Z|U}(·|u(m,w))`.
pub fn wtc1_conditionals(code: &WiretapCode, eave: &Channel, cap: u64) -> Result<Vec<Vec<f64>>> {
    check_code(code)?;
    let eff = code.through_prefix(eave)?;
    let kz = eff.output_len();
    sequence_count(kz, code.n)
        .filter(|&t| t <= cap)
        .ok_or_else(|| Error::cap("eavesdropper outputs Z^n", (kz as u128).saturating_pow(code.n as u32), cap as u128))?;
    try_map_indexed(code.message_count, |m| -> Result<Vec<f64>> {
        let mut acc: Option<Vec<f64>> = None;
        let mut u = vec![0; code.n];
        for w in 0..code.randomness_count {
            code.codeword_symbols(m, w, &mut u);
            let c = conditional_product(&eff, &u);
            match &mut acc {
                None => acc = Some(c),
                Some(a) => a.iter_mut().zip(&c).for_each(|(x, y)| *x += y),
            }
        }
        let mut a = acc.expect("|W| >= 1");
        a.iter_mut().for_each(|x| *x /= code.randomness_count as f64);
        Ok(a)
    })
}

/// Semantic-security metric of a type I wiretap code, with `Q_Z^n` as reference.
pub fn ss_metric_wtc1(code: &WiretapCode, eave: &Channel, cap: u64) -> Result<LeakageReport> {
    let x_len = code.prefix.as_ref().map_or(code.radix(), |p| p.output_len());
    if eave.input_len() != x_len {
        return Err(Error::validation("eave", "input alphabet differs from the code"));
    }
    let rows = wtc1_conditionals(code, eave, cap)?;
    let qz = eave.output_pmf(&code.letter_law()?)?;
    leakage_from_family(&rows, &product_vector(qz.probs(), code.n))
}

/// `P_{X^S|M=m}` over `X^{|S|}`, positions taken in ascending order.
pub fn eavesdropper_conditional_wtc2(code: &WiretapCode, subset: &[usize], m: usize, cap: u64) -> Result<Vec<f64>> {
    check_code(code)?;
    check_subset(subset, code.n)?;
    if m >= code.message_count {
        return Err(Error::validation("m", format!("{m} >= |M| = {}", code.message_count)));
    }
    let kx = code.prefix.as_ref().map_or(code.radix(), |p| p.output_len());
    let size = sequence_count(kx, subset.len())
        .filter(|&t| t <= cap)
        .ok_or_else(|| Error::cap("observed substrings X^mu", (kx as u128).saturating_pow(subset.len() as u32), cap as u128))?
        as usize;
    let mut out = vec![0.0; size];
    let weight = 1.0 / code.randomness_count as f64;
    let mut u = vec![0; code.n];
    for w in 0..code.randomness_count {
        code.codeword_symbols(m, w, &mut u);
        match &code.prefix {
            None => {
                let idx = subset.iter().fold(0usize, |a, &i| a * kx + u[i]);
                out[idx] += weight;
            }
            Some(p) => {
                let sub: Vec<usize> = subset.iter().map(|&i| u[i]).collect();
                for (o, v) in out.iter_mut().zip(conditional_product(p, &sub)) {
                    *o += weight * v;
                }
            }
        }
    }
    Ok(out)
}

fn check_subset(subset: &[usize], n: usize) -> Result<()> {
    if subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::validation("subset", "positions must be strictly increasing"));
    }
    if subset.last().is_some_and(|&i| i >= n) {
        return Err(Error::validation("subset", format!("position outside [0, {n})")));
    }
    Ok(())
}

/// `μ = ⌊αn⌋`, guarded against `αn` landing just below an integer.
pub fn observed_count(alpha: f64, n: usize) -> usize {
    (alpha * n as f64 + 1e-9).floor() as usize
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SubsetMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct SubsetEntry {
    pub subset: Vec<usize>,
    pub report: LeakageReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubsetLeakage {
    #[serde(serialize_with = "ser_f64")]
    pub alpha: f64,
    pub n: usize,
    pub mu: usize,
    pub mode: SubsetMode,
    /// Subsets were sampled; the maxima are over the recorded subsets only.
    pub sampled: bool,
    pub total_subsets: u128,
    pub per_subset: Vec<SubsetEntry>,
    /// `max_S max_{P_M} I(M; Z^S)` over the recorded subsets.
    #[serde(serialize_with = "ser_f64")]
    pub max_over_subsets: f64,
    /// `max_{m,S} D(P_{Z^S|M=m} || I_Z^μ)` over the recorded subsets.
    #[serde(serialize_with = "ser_f64")]
    pub max_divergence_bound: f64,
    pub argmax_subset: Vec<usize>,
    pub bound_check: bool,
}

/// Lexicographic `k`-subsets of `[0, n)`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Semantic-security metric of a type II wiretap code: the eavesdropper picks
/// `μ = ⌊αn⌋` positions. Reference `I_Z^μ` is the per-letter law of `X`.
///
/// `budget` caps the `(subset, message)` evaluations of exhaustive mode.
pub fn ss_metric_wtc2(code: &WiretapCode, alpha: f64, mode: &SubsetMode, budget: u64, cap: u64) -> Result<SubsetLeakage> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::validation("alpha", format!("{alpha} is not in [0, 1]")));
    }
    check_code(code)?;
    let n = code.n;
    let mu = observed_count(alpha, n);
    let total = binomial(n, mu);
    let (subsets, sampled) = match mode {
        SubsetMode::Exhaustive => {
            let evals = total.saturating_mul(code.message_count as u128);
            if evals > budget as u128 {
                return Err(Error::cap("subset evaluations (use sampled mode)", evals, budget as u128));
            }
            (combinations(n, mu), false)
        }
        SubsetMode::Sampled { count, seed } => {
            if *count == 0 {
                return Err(Error::validation("subsets", "sample count must be >= 1"));
            }
            let want = (*count as u128).min(total) as usize;
            let mut rng = stream(*seed, 0);
            let mut set = BTreeSet::new();
            while set.len() < want {
                let mut s = rand::seq::index::sample(&mut rng, n, mu).into_vec();
                s.sort_unstable();
                set.insert(s);
            }
            (set.into_iter().collect(), true)
        }
    };
    let letter = code.letter_law()?;
    let reference = product_vector(letter.probs(), mu);
    let per_subset = try_map_indexed(subsets.len(), |i| -> Result<SubsetEntry> {
        let s = &subsets[i];
        let rows = (0..code.message_count)
            .map(|m| eavesdropper_conditional_wtc2(code, s, m, cap))
            .collect::<Result<Vec<_>>>()?;
        Ok(SubsetEntry {
            subset: s.clone(),
            report: leakage_from_family(&rows, &reference)?,
        })
    })?;
    let mut best = 0;
    let mut max_div = f64::NEG_INFINITY;
    for (i, e) in per_subset.iter().enumerate() {
        if e.report.exact_sem > per_subset[best].report.exact_sem {
            best = i;
        }
        max_div = max_div.max(e.report.max_divergence);
    }
    Ok(SubsetLeakage {
        alpha,
        n,
        mu,
        mode: mode.clone(),
        sampled,
        total_subsets: total,
        max_over_subsets: per_subset[best].report.exact_sem,
        argmax_subset: per_subset[best].subset.clone(),
        max_divergence_bound: max_div,
        bound_check: per_subset.iter().all(|e| e.report.bound_check),
        per_subset,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionCheck {
    pub subset: Vec<usize>,
    pub message: usize,
    /// `D(P_{Z|M=m} || Γ^{(S)})` over the full `(X ∪ {?})^n`.
    #[serde(serialize_with = "ser_f64")]
    pub full: f64,
    /// `D(P_{Z^S|M=m} || I_Z^μ)`.
    #[serde(serialize_with = "ser_f64")]
    pub substring: f64,
    #[serde(serialize_with = "ser_f64")]
    pub difference: f64,
}

/// Compares the divergence over the erased full observation with the
/// divergence over the observed substring.
pub fn decomposition_check(code: &WiretapCode, subset: &[usize], m: usize, cap: u64) -> Result<DecompositionCheck> {
    check_code(code)?;
    check_subset(subset, code.n)?;
    if m >= code.message_count {
        return Err(Error::validation("m", format!("{m} >= |M| = {}", code.message_count)));
    }
    let kx = code.prefix.as_ref().map_or(code.radix(), |p| p.output_len());
    let kz = kx + 1;
    let erased = kx;
    let total = sequence_count(kz, code.n)
        .filter(|&t| t <= cap)
        .ok_or_else(|| Error::cap("full observation space", (kz as u128).saturating_pow(code.n as u32), cap as u128))?;
    let letter = code.letter_law()?;
    let in_s: Vec<bool> = (0..code.n).map(|i| subset.contains(&i)).collect();
    let mut z = vec![0; code.n];
    let mut u = vec![0; code.n];
    let mut p_full = vec![0.0; total as usize];
    let mut gamma = vec![0.0; total as usize];
    for zi in 0..total {
        decode_into(zi, kz, &mut z);
        if (0..code.n).any(|i| in_s[i] == (z[i] == erased)) {
            continue;
        }
        gamma[zi as usize] = (0..code.n).filter(|&i| in_s[i]).map(|i| letter.get(z[i])).product();
        let mut p = 0.0;
        for w in 0..code.randomness_count {
            code.codeword_symbols(m, w, &mut u);
            let mut q = 1.0;
            for i in (0..code.n).filter(|&i| in_s[i]) {
                q *= match &code.prefix {
                    None => f64::from(u8::from(u[i] == z[i])),
                    Some(pc) => pc.prob(u[i], z[i]),
                };
            }
            p += q;
        }
        p_full[zi as usize] = p / code.randomness_count as f64;
    }
    let full = divergence(&p_full, &gamma);
    let sub = eavesdropper_conditional_wtc2(code, subset, m, cap)?;
    let substring = divergence(&sub, &product_vector(letter.probs(), subset.len()));
    Ok(DecompositionCheck {
        subset: subset.to_vec(),
        message: m,
        full,
        substring,
        difference: (full - substring).abs(),
    })
}
