use serde::Serialize;

use crate::error::{Error, Result};
use crate::probability::{sequence_count, Pmf, SequenceIndex};
use crate::rng::{stream, LetterSampler};

/// Random codebook `{u(w)}`, stored as lexicographic sequence indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Codebook {
    pub n: usize,
    pub radix: usize,
    /// Rate asked for; the realized rate is `log2(|W|) / n`.
    pub requested_rate: f64,
    pub seed: u64,
    pub codewords: Vec<u64>,
}

/// `round(n R)`, the base-2 log of the codebook size.
pub fn size_exponent(n: usize, rate: f64) -> u32 {
    (n as f64 * rate).round().max(0.0) as u32
}

impl Codebook {
    /// Codebook from explicit codewords (used for constructed examples).
    pub fn from_codewords(n: usize, radix: usize, codewords: Vec<u64>) -> Result<Self> {
        if codewords.is_empty() {
            return Err(Error::validation("codewords", "codebook must not be empty"));
        }
        let total = sequence_count(radix, n)
            .ok_or_else(|| Error::validation("n", "sequence space overflows 64 bits"))?;
        if let Some(i) = codewords.iter().position(|&c| c >= total) {
            return Err(Error::validation(
                format!("codewords[{i}]"),
                format!("index is outside [0, {total})"),
            ));
        }
        let rate = (codewords.len() as f64).log2() / n as f64;
        Ok(Codebook {
            n,
            radix,
            requested_rate: rate,
            seed: 0,
            codewords,
        })
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn realized_rate(&self) -> f64 {
        (self.codewords.len() as f64).log2() / self.n as f64
    }

    pub fn codeword(&self, w: usize) -> SequenceIndex {
        SequenceIndex::from_index(self.codewords[w], self.n, self.radix).expect("stored index")
    }

    /// Multiplicity of every sequence in `U^n`.
    pub fn histogram(&self) -> Vec<u32> {
        let total = self.radix.pow(self.n as u32);
        let mut h = vec![0u32; total];
        for &c in &self.codewords {
            h[c as usize] += 1;
        }
        h
    }
}

/// Draws `2^{round(nR)}` codewords i.i.d. from `qu^n`; codeword `w` comes from
/// stream `w` of the seed, so books with the same seed are nested.
pub fn sample_codebook(qu: &Pmf, n: usize, rate: f64, seed: u64, cap: u64) -> Result<Codebook> {
    if n == 0 {
        return Err(Error::validation("n", "blocklength must be >= 1"));
    }
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::validation("rate", format!("{rate} must be finite and > 0")));
    }
    sequence_count(qu.len(), n)
        .ok_or_else(|| Error::validation("n", "sequence space overflows 64 bits"))?;
    let k = size_exponent(n, rate);
    if k >= 63 || (1u64 << k) > cap {
        return Err(Error::cap("codebook", 1u128 << k.min(127), cap as u128));
    }
    let sampler = LetterSampler::new(qu)?;
    let codewords = (0..1u64 << k)
        .map(|w| sampler.sample_index(&mut stream(seed, w), n, qu.len()))
        .collect();
    Ok(Codebook {
        n,
        radix: qu.len(),
        requested_rate: rate,
        seed,
        codewords,
    })
}
