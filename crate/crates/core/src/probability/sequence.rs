use serde::Serialize;

use super::Pmf;
use crate::error::{Error, Result};

/// Below this many nats a plain running product may underflow.
const LOG_SPACE_THRESHOLD: f64 = -700.0;

/// Length-`n` sequence over a `radix`-ary alphabet.
///
/// Sequences are in bijection with `[0, radix^n)`; the first symbol is the most
/// significant digit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SequenceIndex {
    radix: usize,
    symbols: Vec<usize>,
}

/// `radix^n`, or `None` on overflow of `u64`.
pub fn sequence_count(radix: usize, n: usize) -> Option<u64> {
    (radix as u64).checked_pow(u32::try_from(n).ok()?)
}

impl SequenceIndex {
    pub fn new(radix: usize, symbols: Vec<usize>) -> Result<Self> {
        if radix == 0 {
            return Err(Error::validation("radix", "alphabet must not be empty"));
        }
        if let Some(i) = symbols.iter().position(|&s| s >= radix) {
            return Err(Error::validation(
                format!("symbols[{i}]"),
                format!("symbol {} is outside an alphabet of size {radix}", symbols[i]),
            ));
        }
        Ok(SequenceIndex { radix, symbols })
    }

    pub fn from_index(value: u64, n: usize, radix: usize) -> Result<Self> {
        let total = sequence_count(radix, n)
            .ok_or_else(|| Error::validation("n", "sequence space overflows 64 bits"))?;
        if value >= total {
            return Err(Error::validation(
                "value",
                format!("{value} is outside [0, {total})"),
            ));
        }
        let mut symbols = vec![0; n];
        decode_into(value, radix, &mut symbols);
        Ok(SequenceIndex { radix, symbols })
    }

    pub fn to_index(&self) -> u64 {
        encode(&self.symbols, self.radix)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn radix(&self) -> usize {
        self.radix
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    /// Subsequence at the given positions, in the order given.
    pub fn restrict(&self, positions: &[usize]) -> SequenceIndex {
        SequenceIndex {
            radix: self.radix,
            symbols: positions.iter().map(|&i| self.symbols[i]).collect(),
        }
    }
}

pub(crate) fn encode(symbols: &[usize], radix: usize) -> u64 {
    symbols
        .iter()
        .fold(0u64, |acc, &s| acc * radix as u64 + s as u64)
}

pub(crate) fn decode_into(mut value: u64, radix: usize, out: &mut [usize]) {
    let r = radix as u64;
    for slot in out.iter_mut().rev() {
        *slot = (value % r) as usize;
        value /= r;
    }
}

/// `Π_i p(seq_i)`.
pub fn product_probability(p: &Pmf, seq: &SequenceIndex) -> Result<f64> {
    if p.len() != seq.radix() {
        return Err(Error::validation(
            "seq",
            format!(
                "sequence alphabet has {} symbols but the PMF has {}",
                seq.radix(),
                p.len()
            ),
        ));
    }
    let probs = p.probs();
    if seq.symbols().iter().any(|&s| probs[s] == 0.0) {
        return Ok(0.0);
    }
    let n = seq.len() as f64;
    if n * p.min_support_prob().ln() >= LOG_SPACE_THRESHOLD {
        return Ok(seq.symbols().iter().map(|&s| probs[s]).product());
    }
    let log: f64 = seq.symbols().iter().map(|&s| probs[s].ln()).sum();
    Ok(log.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn product_examples() {
        let half = Pmf::bernoulli(0.5).unwrap();
        let s = SequenceIndex::new(2, vec![0, 1, 0]).unwrap();
        assert_eq!(product_probability(&half, &s).unwrap(), 0.125);

        let q = Pmf::bernoulli(0.25).unwrap();
        let s = SequenceIndex::new(2, vec![1, 1]).unwrap();
        assert_eq!(product_probability(&q, &s).unwrap(), 0.25 * 0.25);

        let z = Pmf::bernoulli(0.0).unwrap();
        let s = SequenceIndex::new(2, vec![0, 1, 0]).unwrap();
        assert_eq!(product_probability(&z, &s).unwrap(), 0.0);

        assert!(product_probability(&Pmf::uniform(3), &s).is_err());
    }

    #[test]
    fn log_space_path_matches_pow() {
        let p = Pmf::bernoulli(1e-3).unwrap();
        // Lands in the subnormal range, which has reduced relative precision.
        let s = SequenceIndex::new(2, vec![1; 104]).unwrap();
        let got = product_probability(&p, &s).unwrap();
        let want = 104.0 * 1e-3f64.ln();
        assert!(got > 0.0);
        assert!((got.ln() - want).abs() < 1e-6);
    }

    #[test]
    fn encoding_is_exhaustively_bijective() {
        for (radix, n) in [(2usize, 12usize), (3, 9), (5, 6), (10, 6)] {
            let total = sequence_count(radix, n).unwrap();
            assert!(total <= 1_000_000);
            let mut buf = vec![0; n];
            for v in 0..total {
                decode_into(v, radix, &mut buf);
                assert_eq!(encode(&buf, radix), v);
            }
        }
    }

    #[test]
    fn first_symbol_is_most_significant() {
        let s = SequenceIndex::new(3, vec![1, 0, 2]).unwrap();
        assert_eq!(s.to_index(), 9 + 2);
    }

    #[test]
    fn binary_products_sum_to_one() {
        for n in 1..=12 {
            for p in [0.5, 0.11, 0.9, 0.0] {
                let pmf = Pmf::bernoulli(p).unwrap();
                let total: f64 = (0..1u64 << n)
                    .map(|v| {
                        let s = SequenceIndex::from_index(v, n, 2).unwrap();
                        product_probability(&pmf, &s).unwrap()
                    })
                    .sum();
                assert!((total - 1.0).abs() < 1e-9, "n={n} p={p}");
            }
        }
    }

    proptest! {
        #[test]
        fn roundtrip(radix in 1usize..7, n in 0usize..12, seed in any::<u64>()) {
            let total = sequence_count(radix, n).unwrap();
            let v = seed % total;
            let s = SequenceIndex::from_index(v, n, radix).unwrap();
            prop_assert_eq!(s.to_index(), v);
            prop_assert_eq!(s.len(), n);
        }
    }
}
