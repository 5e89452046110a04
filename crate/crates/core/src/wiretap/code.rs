use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{ser_f64, ser_opt_f64};
use crate::probability::sequence::decode_into;
use crate::probability::{sequence_count, Channel, Pmf, SequenceIndex};
use crate::rng::{stream, LetterSampler};
use crate::softcover::size_exponent;

/// Default letter-typicality slack for the decoder.
pub const DEFAULT_TYPICALITY_EPS: f64 = 0.2;

/// A wiretap code: codeword `(m, w)` is stored at `m * |W| + w`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WiretapCode {
    pub n: usize,
    pub message_count: usize,
    pub randomness_count: usize,
    /// Law the codeword letters were drawn from (over `U` with a prefix, `X` without).
    pub input: Pmf,
    pub codewords: Vec<u64>,
    /// `Q_{X|U}` applied letterwise at encoding time.
    pub prefix: Option<Channel>,
    #[serde(serialize_with = "ser_f64")]
    pub typicality_eps: f64,
    pub seed: Option<u64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub requested_rate: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub requested_rate_tilde: Option<f64>,
}

/// Codewords i.i.d. from `input^n`: `|M| = 2^{round(nR)}`, `|W| = 2^{round(nR̃)}`.
/// Codeword `(m, w)` comes from stream `(m << 32) | w`, so codes with the same
/// seed and more randomness extend the smaller ones.
#[allow(clippy::too_many_arguments)]
pub fn build_wiretap_code(
    input: &Pmf,
    prefix: Option<Channel>,
    n: usize,
    rate: f64,
    rate_tilde: f64,
    eps: f64,
    seed: u64,
    cap: u64,
) -> Result<WiretapCode> {
    if n == 0 {
        return Err(Error::validation("n", "blocklength must be >= 1"));
    }
    for (name, r) in [("rate", rate), ("rate_tilde", rate_tilde)] {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::validation(name, format!("{r} must be finite and > 0")));
        }
    }
    check_eps(eps)?;
    if let Some(p) = &prefix {
        if p.input_len() != input.len() {
            return Err(Error::validation("prefix", "input alphabet differs from the codeword law"));
        }
    }
    sequence_count(input.len(), n).ok_or_else(|| Error::validation("n", "sequence space overflows 64 bits"))?;
    let km = size_exponent(n, rate);
    let kw = size_exponent(n, rate_tilde);
    if km >= 32 || kw >= 32 || (1u128 << (km + kw)) > cap as u128 {
        return Err(Error::cap("wiretap codewords", 1u128 << (km + kw).min(127), cap as u128));
    }
    let (mc, wc) = (1usize << km, 1usize << kw);
    let sampler = LetterSampler::new(input)?;
    let mut codewords = Vec::with_capacity(mc * wc);
    for m in 0..mc {
        for w in 0..wc {
            let mut rng = stream(seed, ((m as u64) << 32) | w as u64);
            codewords.push(sampler.sample_index(&mut rng, n, input.len()));
        }
    }
    Ok(WiretapCode {
        n,
        message_count: mc,
        randomness_count: wc,
        input: input.clone(),
        codewords,
        prefix,
        typicality_eps: eps,
        seed: Some(seed),
        requested_rate: Some(rate),
        requested_rate_tilde: Some(rate_tilde),
    })
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::validation("eps", format!("{eps} must be finite and >= 0")));
    }
    Ok(())
}

impl WiretapCode {
    /// Code with explicit codewords, row-major in `(m, w)`.
    pub fn from_codewords(
        n: usize,
        input: Pmf,
        message_count: usize,
        randomness_count: usize,
        codewords: Vec<u64>,
        eps: f64,
    ) -> Result<Self> {
        check_eps(eps)?;
        if codewords.len() != message_count * randomness_count {
            return Err(Error::validation(
                "codewords",
                format!("{} codewords for {message_count} x {randomness_count}", codewords.len()),
            ));
        }
        let total = sequence_count(input.len(), n)
            .ok_or_else(|| Error::validation("n", "sequence space overflows 64 bits"))?;
        if let Some(i) = codewords.iter().position(|&c| c >= total) {
            return Err(Error::validation(format!("codewords[{i}]"), format!("index is outside [0, {total})")));
        }
        Ok(WiretapCode {
            n,
            message_count,
            randomness_count,
            input,
            codewords,
            prefix: None,
            typicality_eps: eps,
            seed: None,
            requested_rate: None,
            requested_rate_tilde: None,
        })
    }

    pub fn with_prefix(mut self, prefix: Channel) -> Result<Self> {
        if prefix.input_len() != self.input.len() {
            return Err(Error::validation("prefix", "input alphabet differs from the codeword law"));
        }
        self.prefix = Some(prefix);
        Ok(self)
    }

    pub fn radix(&self) -> usize {
        self.input.len()
    }

    /// `log2|M| / n`.
    pub fn realized_rate(&self) -> f64 {
        (self.message_count as f64).log2() / self.n as f64
    }

    /// `log2|W| / n`.
    pub fn realized_rate_tilde(&self) -> f64 {
        (self.randomness_count as f64).log2() / self.n as f64
    }

    pub fn codeword_index(&self, m: usize, w: usize) -> u64 {
        self.codewords[m * self.randomness_count + w]
    }

    pub fn codeword(&self, m: usize, w: usize) -> Result<SequenceIndex> {
        self.check_pair(m, w)?;
        SequenceIndex::from_index(self.codeword_index(m, w), self.n, self.radix())
    }

    pub(crate) fn codeword_symbols(&self, m: usize, w: usize, out: &mut [usize]) {
        decode_into(self.codeword_index(m, w), self.radix(), out);
    }

    fn check_pair(&self, m: usize, w: usize) -> Result<()> {
        if m >= self.message_count {
            return Err(Error::validation("m", format!("{m} >= |M| = {}", self.message_count)));
        }
        if w >= self.randomness_count {
            return Err(Error::validation("w", format!("{w} >= |W| = {}", self.randomness_count)));
        }
        Ok(())
    }

    /// Channel input for `(m, w)`: the stored codeword, or its image under the
    /// prefix channel drawn from `rng`.
    pub fn encode(&self, m: usize, w: usize, rng: &mut impl Rng) -> Result<SequenceIndex> {
        let cw = self.codeword(m, w)?;
        match &self.prefix {
            None => Ok(cw),
            Some(p) => {
                let samplers = row_samplers(p)?;
                let xs = cw.symbols().iter().map(|&u| samplers[u].sample(rng)).collect();
                SequenceIndex::new(p.output_len(), xs)
            }
        }
    }

    /// `Q_{Y|U}` when a prefix is present, else `ch` itself.
    pub fn through_prefix(&self, ch: &Channel) -> Result<Channel> {
        match &self.prefix {
            None => Ok(ch.clone()),
            Some(p) => p.then(ch),
        }
    }

    /// Law of one transmitted letter `X`.
    pub fn letter_law(&self) -> Result<Pmf> {
        match &self.prefix {
            None => Ok(self.input.clone()),
            Some(p) => p.output_pmf(&self.input),
        }
    }

    /// Same code restricted to the listed messages, in the given order.
    pub fn restrict_messages(&self, keep: &[usize]) -> Result<Self> {
        let mut codewords = Vec::with_capacity(keep.len() * self.randomness_count);
        for &m in keep {
            self.check_pair(m, 0)?;
            codewords.extend_from_slice(
                &self.codewords[m * self.randomness_count..(m + 1) * self.randomness_count],
            );
        }
        Ok(WiretapCode {
            message_count: keep.len(),
            codewords,
            ..self.clone()
        })
    }
}

pub(crate) fn row_samplers(ch: &Channel) -> Result<Vec<LetterSampler>> {
    (0..ch.input_len())
        .map(|x| LetterSampler::new(&Pmf::new(ch.output_alphabet().clone(), ch.row(x).to_vec())?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_rates() {
        let c = build_wiretap_code(&Pmf::uniform(2), None, 8, 0.25, 0.5, 0.2, 1, 1 << 20).unwrap();
        assert_eq!((c.message_count, c.randomness_count), (4, 16));
        assert_eq!(c.codewords.len(), 64);
        assert!((c.realized_rate() - 0.25).abs() < 1e-15);
        assert!((c.realized_rate_tilde() - 0.5).abs() < 1e-15);
        let one = build_wiretap_code(&Pmf::uniform(2), None, 8, 0.01, 0.5, 0.2, 1, 1 << 20).unwrap();
        assert_eq!(one.message_count, 1);
        assert!(build_wiretap_code(&Pmf::uniform(2), None, 8, 2.0, 2.0, 0.2, 1, 1 << 20).is_err());
        assert!(build_wiretap_code(&Pmf::uniform(2), None, 8, 0.0, 0.5, 0.2, 1, 1 << 20).is_err());
    }

    #[test]
    fn deterministic_and_nested() {
        let a = build_wiretap_code(&Pmf::uniform(2), None, 8, 0.25, 0.25, 0.2, 9, 1 << 20).unwrap();
        let b = build_wiretap_code(&Pmf::uniform(2), None, 8, 0.25, 0.25, 0.2, 9, 1 << 20).unwrap();
        assert_eq!(a, b);
        let big = build_wiretap_code(&Pmf::uniform(2), None, 8, 0.25, 0.5, 0.2, 9, 1 << 20).unwrap();
        for m in 0..4 {
            for w in 0..4 {
                assert_eq!(a.codeword_index(m, w), big.codeword_index(m, w));
            }
        }
    }

    #[test]
    fn encode_without_and_with_identity_prefix() {
        let c = build_wiretap_code(&Pmf::uniform(3), None, 5, 0.2, 0.2, 0.2, 4, 1 << 20).unwrap();
        let mut rng = stream(0, 0);
        assert_eq!(c.encode(1, 0, &mut rng).unwrap(), c.codeword(1, 0).unwrap());
        let id = c.clone().with_prefix(Channel::identity(crate::probability::Alphabet::indexed(3))).unwrap();
        assert_eq!(id.encode(1, 0, &mut rng).unwrap(), c.codeword(1, 0).unwrap());
        assert!(c.encode(2, 0, &mut rng).is_err());
    }

    #[test]
    fn bsc_prefix_flip_rate() {
        let c = build_wiretap_code(&Pmf::uniform(2), Some(Channel::bsc(0.1).unwrap()), 10, 0.1, 0.1, 0.2, 3, 1 << 20)
            .unwrap();
        let mut rng = stream(77, 0);
        let trials = 100_000;
        let mut flips = 0u64;
        for t in 0..trials {
            let (m, w) = (t % c.message_count, (t / 2) % c.randomness_count);
            let u = c.codeword(m, w).unwrap();
            let x = c.encode(m, w, &mut rng).unwrap();
            flips += u.symbols().iter().zip(x.symbols()).filter(|(a, b)| a != b).count() as u64;
        }
        let n = (trials * 10) as f64;
        let rate = flips as f64 / n;
        let sigma = (0.1 * 0.9 / n).sqrt();
        assert!((rate - 0.1).abs() < 3.0 * sigma, "{rate}");
    }
}
