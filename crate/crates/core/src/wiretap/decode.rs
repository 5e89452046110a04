use rand::Rng;
use serde::Serialize;

use super::code::{row_samplers, WiretapCode};
use crate::error::{Error, Result};
use crate::numeric::{neumaier_sum, ser_f64};
use crate::parallel::{map_indexed, try_map_indexed};
use crate::probability::sequence::decode_into;
use crate::probability::tensor::conditional_product;
use crate::probability::typical::counts_typical;
use crate::probability::{sequence_count, Channel, JointPmf, SequenceIndex};
use crate::rng::{stream, LetterSampler};

/// Two-sided 99% normal quantile for the Wilson interval.
pub const WILSON_Z99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoded {
    Message(usize),
    Erasure,
}

/// Joint-typicality decoder: the message of the unique `(m, w)` whose codeword
/// is letter-typical with `y` under `joint` at `code.typicality_eps`; an
/// erasure when no pair or several pairs pass.
pub fn decode(code: &WiretapCode, y: &SequenceIndex, joint: &JointPmf) -> Result<Decoded> {
    if y.len() != code.n {
        return Err(Error::validation("y", format!("length {} differs from n = {}", y.len(), code.n)));
    }
    if joint.rows_len() != code.radix() || joint.cols_len() != y.radix() {
        return Err(Error::validation("joint", "alphabets do not match the code and output"));
    }
    let d = Decoder::new(code, joint);
    Ok(d.decode(y.symbols()))
}

struct Decoder<'a> {
    code: &'a WiretapCode,
    joint: &'a [f64],
    ky: usize,
    symbols: Vec<Vec<usize>>,
}

impl<'a> Decoder<'a> {
    fn new(code: &'a WiretapCode, joint: &'a JointPmf) -> Self {
        let symbols = (0..code.codewords.len())
            .map(|i| {
                let mut s = vec![0; code.n];
                decode_into(code.codewords[i], code.radix(), &mut s);
                s
            })
            .collect();
        Decoder {
            code,
            joint: joint.table(),
            ky: joint.cols_len(),
            symbols,
        }
    }

    fn decode(&self, y: &[usize]) -> Decoded {
        let mut counts = vec![0u64; self.joint.len()];
        let mut found = None;
        for (i, x) in self.symbols.iter().enumerate() {
            counts.iter_mut().for_each(|c| *c = 0);
            for (&a, &b) in x.iter().zip(y) {
                counts[a * self.ky + b] += 1;
            }
            if counts_typical(&counts, self.code.n, self.joint, self.code.typicality_eps) {
                if found.is_some() {
                    return Decoded::Erasure;
                }
                found = Some(i / self.code.randomness_count);
            }
        }
        found.map_or(Decoded::Erasure, Decoded::Message)
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ErrorMode {
    Exact,
    MonteCarlo { trials: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MessageError {
    pub message: usize,
    #[serde(serialize_with = "ser_f64")]
    pub error: f64,
    /// 99% Wilson interval, Monte Carlo only.
    pub interval: Option<(f64, f64)>,
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub mode: ErrorMode,
    pub per_message: Vec<MessageError>,
    /// `max_m e_m`.
    #[serde(serialize_with = "ser_f64")]
    pub max_error: f64,
    #[serde(serialize_with = "ser_f64")]
    pub average_error: f64,
}

impl ErrorReport {
    pub fn errors(&self) -> Vec<f64> {
        self.per_message.iter().map(|e| e.error).collect()
    }
}

/// Per-message error probabilities of `code` over `main`.
///
/// Exact mode enumerates `Y^n` once, decoding every output, then averages
/// `Q^n(y | x(m,w))` over the outputs not decoded to `m`.
pub fn error_probabilities(code: &WiretapCode, main: &Channel, mode: &ErrorMode, cap: u64) -> Result<ErrorReport> {
    if code.message_count == 0 || code.randomness_count == 0 {
        return Err(Error::validation("code", "code has no codewords"));
    }
    let x_len = code.prefix.as_ref().map_or(code.radix(), |p| p.output_len());
    if main.input_len() != x_len {
        return Err(Error::validation("main", "input alphabet differs from the code"));
    }
    let eff = code.through_prefix(main)?;
    let joint = JointPmf::from_input_and_channel(&code.input, &eff)?;
    let dec = Decoder::new(code, &joint);
    let ky = eff.output_len();
    let per_message = match mode {
        ErrorMode::Exact => {
            let total = sequence_count(ky, code.n)
                .filter(|&t| t <= cap)
                .ok_or_else(|| Error::cap("exact error enumeration over Y^n", (ky as u128).saturating_pow(code.n as u32), cap as u128))?
                as usize;
            let table = map_indexed(total, |y| {
                let mut ys = vec![0; code.n];
                decode_into(y as u64, ky, &mut ys);
                dec.decode(&ys)
            });
            map_indexed(code.message_count, |m| {
                let mut sum = Vec::with_capacity(code.randomness_count);
                for w in 0..code.randomness_count {
                    let cond = conditional_product(&eff, &dec.symbols[m * code.randomness_count + w]);
                    sum.push(neumaier_sum(
                        cond.iter()
                            .zip(&table)
                            .filter(|(_, d)| **d != Decoded::Message(m))
                            .map(|(p, _)| *p),
                    ));
                }
                MessageError {
                    message: m,
                    error: (neumaier_sum(sum) / code.randomness_count as f64).clamp(0.0, 1.0),
                    interval: None,
                    trials: None,
                }
            })
        }
        ErrorMode::MonteCarlo { trials, seed } => {
            if *trials == 0 {
                return Err(Error::validation("trials", "must be at least 1"));
            }
            let main_samplers = row_samplers(main)?;
            let prefix_samplers = code.prefix.as_ref().map(row_samplers).transpose()?;
            let w_dist = LetterSampler::new(&crate::probability::Pmf::uniform(code.randomness_count))?;
            try_map_indexed(code.message_count, |m| -> Result<MessageError> {
                let mut rng = stream(*seed, m as u64);
                let mut errors = 0usize;
                let mut ys = vec![0; code.n];
                for _ in 0..*trials {
                    let w = w_dist.sample(&mut rng);
                    let u = &dec.symbols[m * code.randomness_count + w];
                    for (i, &s) in u.iter().enumerate() {
                        let x = match &prefix_samplers {
                            Some(p) => p[s].sample(&mut rng),
                            None => s,
                        };
                        ys[i] = main_samplers[x].sample(&mut rng);
                    }
                    if dec.decode(&ys) != Decoded::Message(m) {
                        errors += 1;
                    }
                }
                let p = errors as f64 / *trials as f64;
                Ok(MessageError {
                    message: m,
                    error: p,
                    interval: Some(wilson_interval(errors, *trials, WILSON_Z99)),
                    trials: Some(*trials),
                })
            })?
        }
    };
    let errs: Vec<f64> = per_message.iter().map(|e| e.error).collect();
    Ok(ErrorReport {
        mode: mode.clone(),
        max_error: errs.iter().copied().fold(0.0, f64::max),
        average_error: neumaier_sum(errs.iter().copied()) / errs.len() as f64,
        per_message,
    })
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpurgationResult {
    pub code: WiretapCode,
    /// Original indices of the kept messages, ascending.
    pub kept: Vec<usize>,
    /// `|M| = 1`: nothing was removed.
    pub unchanged: bool,
    #[serde(serialize_with = "ser_f64")]
    pub rate_before: f64,
    #[serde(serialize_with = "ser_f64")]
    pub rate_after: f64,
}

/// Keeps the `⌈|M|/2⌉` messages with the smallest error, ties by index.
pub fn expurgate(code: &WiretapCode, errors: &[f64]) -> Result<ExpurgationResult> {
    if errors.len() != code.message_count {
        return Err(Error::validation(
            "errors",
            format!("{} entries for {} messages", errors.len(), code.message_count),
        ));
    }
    let rate_before = code.realized_rate();
    if code.message_count <= 1 {
        return Ok(ExpurgationResult {
            code: code.clone(),
            kept: (0..code.message_count).collect(),
            unchanged: true,
            rate_before,
            rate_after: rate_before,
        });
    }
    let mut order: Vec<usize> = (0..errors.len()).collect();
    order.sort_by(|&a, &b| errors[a].total_cmp(&errors[b]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = order[..code.message_count.div_ceil(2)].to_vec();
    kept.sort_unstable();
    let new = code.restrict_messages(&kept)?;
    Ok(ExpurgationResult {
        rate_after: new.realized_rate(),
        code: new,
        kept,
        unchanged: false,
        rate_before,
    })
}

/// Draws a channel output for `x`, letter by letter.
pub fn sample_output(ch: &Channel, x: &SequenceIndex, rng: &mut impl Rng) -> Result<SequenceIndex> {
    let s = row_samplers(ch)?;
    SequenceIndex::new(ch.output_len(), x.symbols().iter().map(|&a| s[a].sample(rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::{Alphabet, Pmf};
    use crate::wiretap::build_wiretap_code;

    fn seq(bits: &[usize]) -> u64 {
        bits.iter().fold(0, |a, &b| a * 2 + b as u64)
    }

    fn noiseless_joint() -> JointPmf {
        JointPmf::from_input_and_channel(&Pmf::uniform(2), &Channel::identity(Alphabet::binary())).unwrap()
    }

    #[test]
    fn decodes_noiseless_and_erases() {
        let cws = vec![seq(&[0, 0, 1, 1]), seq(&[1, 1, 0, 0]), seq(&[0, 1, 0, 1]), seq(&[1, 0, 1, 0])];
        let code = WiretapCode::from_codewords(4, Pmf::uniform(2), 2, 2, cws.clone(), 0.0).unwrap();
        let j = noiseless_joint();
        for (i, &c) in cws.iter().enumerate() {
            let y = SequenceIndex::from_index(c, 4, 2).unwrap();
            assert_eq!(decode(&code, &y, &j).unwrap(), Decoded::Message(i / 2));
        }
        // Not balanced, so no codeword is typical with it.
        let y = SequenceIndex::from_index(seq(&[1, 1, 1, 0]), 4, 2).unwrap();
        assert_eq!(decode(&code, &y, &j).unwrap(), Decoded::Erasure);
        let empty = WiretapCode::from_codewords(4, Pmf::uniform(2), 0, 2, vec![], 0.0).unwrap();
        assert_eq!(decode(&empty, &y, &j).unwrap(), Decoded::Erasure);
    }

    #[test]
    fn collision_erases() {
        // With a loose eps every sequence is typical under the product law.
        let code = WiretapCode::from_codewords(4, Pmf::uniform(2), 2, 1, vec![seq(&[0, 0, 1, 1]), seq(&[0, 1, 0, 1])], 10.0)
            .unwrap();
        let j = JointPmf::independent(&Pmf::uniform(2), &Pmf::uniform(2));
        let y = SequenceIndex::from_index(seq(&[0, 0, 1, 1]), 4, 2).unwrap();
        assert_eq!(decode(&code, &y, &j).unwrap(), Decoded::Erasure);
    }

    #[test]
    fn noiseless_distinct_codewords_never_err() {
        let cws = vec![seq(&[0, 0, 1, 1]), seq(&[1, 1, 0, 0]), seq(&[0, 1, 0, 1]), seq(&[1, 0, 1, 0])];
        let code = WiretapCode::from_codewords(4, Pmf::uniform(2), 4, 1, cws, 0.0).unwrap();
        let r = error_probabilities(&code, &Channel::identity(Alphabet::binary()), &ErrorMode::Exact, 1 << 20).unwrap();
        assert_eq!(r.max_error, 0.0);
    }

    // Brute-force oracle: every (x-codeword, y) pair, decoding by scanning all pairs.
    fn oracle_errors(code: &WiretapCode, ch: &Channel) -> Vec<f64> {
        let n = code.n;
        let j = JointPmf::from_input_and_channel(&code.input, ch).unwrap();
        let ky = ch.output_len();
        let mut out = vec![0.0; code.message_count];
        for m in 0..code.message_count {
            for w in 0..code.randomness_count {
                let x = code.codeword(m, w).unwrap();
                for yi in 0..(ky as u64).pow(n as u32) {
                    let y = SequenceIndex::from_index(yi, n, ky).unwrap();
                    let mut py = 1.0;
                    for (a, b) in x.symbols().iter().zip(y.symbols()) {
                        py *= ch.prob(*a, *b);
                    }
                    let mut hits = vec![];
                    for mm in 0..code.message_count {
                        for ww in 0..code.randomness_count {
                            let c = code.codeword(mm, ww).unwrap();
                            if crate::probability::joint_typicality_test(&c, &y, &j, code.typicality_eps).unwrap() {
                                hits.push(mm);
                            }
                        }
                    }
                    if !(hits.len() == 1 && hits[0] == m) {
                        out[m] += py / code.randomness_count as f64;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn identical_codewords_match_oracle() {
        let c = seq(&[0, 1, 1, 0, 1]);
        let code = WiretapCode::from_codewords(5, Pmf::uniform(2), 2, 1, vec![c, c], 0.3).unwrap();
        let ch = Channel::bsc(0.1).unwrap();
        let r = error_probabilities(&code, &ch, &ErrorMode::Exact, 1 << 20).unwrap();
        let o = oracle_errors(&code, &ch);
        for m in 0..2 {
            assert!(r.per_message[m].error >= o[m] - 1e-12);
            assert!((r.per_message[m].error - o[m]).abs() < 1e-12);
        }
        assert!((r.max_error - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_matches_oracle_on_random_codes() {
        for seed in 0..4 {
            let code = build_wiretap_code(&Pmf::uniform(2), None, 6, 0.2, 0.2, 0.3, seed, 1 << 20).unwrap();
            let ch = Channel::bsc(0.05).unwrap();
            let r = error_probabilities(&code, &ch, &ErrorMode::Exact, 1 << 20).unwrap();
            let o = oracle_errors(&code, &ch);
            for m in 0..code.message_count {
                assert!((r.per_message[m].error - o[m]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn monte_carlo_within_three_sigma_of_exact() {
        let code = build_wiretap_code(&Pmf::uniform(2), None, 6, 0.2, 0.2, 0.3, 11, 1 << 20).unwrap();
        let ch = Channel::bsc(0.05).unwrap();
        let exact = error_probabilities(&code, &ch, &ErrorMode::Exact, 1 << 20).unwrap();
        let trials = 20_000;
        let mc = error_probabilities(&code, &ch, &ErrorMode::MonteCarlo { trials, seed: 5 }, 1 << 20).unwrap();
        for (a, b) in exact.per_message.iter().zip(&mc.per_message) {
            let sigma = (a.error * (1.0 - a.error) / trials as f64).sqrt().max(1e-12);
            assert!((a.error - b.error).abs() <= 3.0 * sigma, "{} vs {}", a.error, b.error);
            let (lo, hi) = b.interval.unwrap();
            assert!(lo <= b.error && b.error <= hi);
        }
    }

    #[test]
    fn exact_mode_respects_cap() {
        let code = build_wiretap_code(&Pmf::uniform(2), None, 12, 0.1, 0.1, 0.3, 1, 1 << 20).unwrap();
        let e = error_probabilities(&code, &Channel::bsc(0.1).unwrap(), &ErrorMode::Exact, 100).unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn expurgation_rules() {
        let code = build_wiretap_code(&Pmf::uniform(2), None, 6, 0.5, 0.2, 0.3, 2, 1 << 20).unwrap();
        let r = expurgate(&code, &vec![0.1; 8]).unwrap();
        assert_eq!(r.kept, vec![0, 1, 2, 3]);
        assert!((r.rate_after - (r.rate_before - 1.0 / 6.0)).abs() < 1e-12);
        let two = code.restrict_messages(&[0, 1]).unwrap();
        let r = expurgate(&two, &[0.3, 0.2]).unwrap();
        assert_eq!(r.kept, vec![1]);
        let one = code.restrict_messages(&[0]).unwrap();
        assert!(expurgate(&one, &[0.5]).unwrap().unchanged);
    }

    #[test]
    fn expurgated_max_at_most_twice_average() {
        let ch = Channel::bsc(0.05).unwrap();
        for seed in 0..5 {
            let code = build_wiretap_code(&Pmf::uniform(2), None, 6, 0.34, 0.17, 0.3, seed, 1 << 20).unwrap();
            let r = error_probabilities(&code, &ch, &ErrorMode::Exact, 1 << 20).unwrap();
            let e = expurgate(&code, &r.errors()).unwrap();
            let after = error_probabilities(&e.code, &ch, &ErrorMode::Exact, 1 << 20).unwrap();
            assert!(after.max_error <= 2.0 * r.average_error + 1e-12);
        }
    }

    #[test]
    fn wilson_brackets_estimate() {
        let (lo, hi) = wilson_interval(10, 100, WILSON_Z99);
        assert!(lo < 0.1 && 0.1 < hi);
        let (lo, hi) = wilson_interval(0, 50, WILSON_Z99);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.2);
    }
}
