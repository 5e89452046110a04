use serde::Serialize;

use super::pmf::{check_weights, NORMALIZATION_TOLERANCE};
use super::{Alphabet, JointPmf, Pmf};
use crate::error::{Error, Result};

/// Discrete memoryless channel given by its stochastic matrix.
///
/// Rows are stored flat in row-major order, one row per input symbol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Channel {
    input_alphabet: Alphabet,
    output_alphabet: Alphabet,
    rows: Vec<f64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    renormalized: bool,
}

impl Channel {
    pub fn new(input: Alphabet, output: Alphabet, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != input.len() {
            return Err(Error::validation(
                "rows",
                format!("{} rows for {} input symbols", rows.len(), input.len()),
            ));
        }
        let mut flat = Vec::with_capacity(input.len() * output.len());
        let mut renormalized = false;
        for (i, row) in rows.iter().enumerate() {
            let field = format!("rows[{i}]");
            if row.len() != output.len() {
                return Err(Error::validation(
                    field,
                    format!("{} entries for {} output symbols", row.len(), output.len()),
                ));
            }
            let total = check_weights(&field, row)?;
            if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
                renormalized = true;
                flat.extend(row.iter().map(|p| p / total));
            } else {
                flat.extend_from_slice(row);
            }
        }
        Ok(Channel {
            input_alphabet: input,
            output_alphabet: output,
            rows: flat,
            renormalized,
        })
    }

    /// Channel over indexed alphabets from already normalized rows.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k_in = rows.len().max(1);
        let k_out = rows.first().map_or(1, |r| r.len().max(1));
        Channel::new(Alphabet::indexed(k_in), Alphabet::indexed(k_out), rows)
    }

    pub fn identity(alphabet: Alphabet) -> Self {
        let k = alphabet.len();
        let mut rows = vec![0.0; k * k];
        for i in 0..k {
            rows[i * k + i] = 1.0;
        }
        Channel {
            input_alphabet: alphabet.clone(),
            output_alphabet: alphabet,
            rows,
            renormalized: false,
        }
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::validation("crossover", format!("{p} is not in [0, 1]")));
        }
        Ok(Channel {
            input_alphabet: Alphabet::binary(),
            output_alphabet: Alphabet::binary(),
            rows: vec![1.0 - p, p, p, 1.0 - p],
            renormalized: false,
        })
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        &self.input_alphabet
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output_alphabet
    }

    pub fn input_len(&self) -> usize {
        self.input_alphabet.len()
    }

    pub fn output_len(&self) -> usize {
        self.output_alphabet.len()
    }

    pub fn row(&self, u: usize) -> &[f64] {
        let k = self.output_len();
        &self.rows[u * k..(u + 1) * k]
    }

    pub fn prob(&self, u: usize, v: usize) -> f64 {
        self.rows[u * self.output_len() + v]
    }

    /// Row-major flat matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.rows
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.input_len()).map(|u| self.row(u).to_vec()).collect()
    }

    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    /// Output distribution for input distribution `input`.
    pub fn output_pmf(&self, input: &Pmf) -> Result<Pmf> {
        channel_output_pmf(self, input)
    }

    /// Cascade `self` followed by `next`: `(self ∘ next)(w|u) = Σ_x self(x|u) next(w|x)`.
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        if self.output_len() != next.input_len() {
            return Err(Error::validation(
                "channel",
                format!(
                    "cannot cascade a channel with {} outputs into one with {} inputs",
                    self.output_len(),
                    next.input_len()
                ),
            ));
        }
        let (a, b, c) = (self.input_len(), self.output_len(), next.output_len());
        let mut rows = vec![0.0; a * c];
        for u in 0..a {
            for x in 0..b {
                let w = self.prob(u, x);
                if w == 0.0 {
                    continue;
                }
                for z in 0..c {
                    rows[u * c + z] += w * next.prob(x, z);
                }
            }
        }
        Ok(Channel {
            input_alphabet: self.input_alphabet.clone(),
            output_alphabet: next.output_alphabet.clone(),
            rows,
            renormalized: false,
        })
    }

    /// Joint distribution of (input, output) for the given input law.
    pub fn joint(&self, input: &Pmf) -> Result<JointPmf> {
        JointPmf::from_input_and_channel(input, self)
    }
}

/// `output(v) = Σ_u input(u) ch(v|u)`.
pub fn channel_output_pmf(ch: &Channel, input: &Pmf) -> Result<Pmf> {
    if input.len() != ch.input_len() {
        return Err(Error::validation(
            "input",
            format!(
                "input PMF has {} symbols but the channel has {} inputs",
                input.len(),
                ch.input_len()
            ),
        ));
    }
    let k = ch.output_len();
    let mut out = vec![0.0; k];
    for (u, &pu) in input.probs().iter().enumerate() {
        if pu == 0.0 {
            continue;
        }
        for (o, &w) in out.iter_mut().zip(ch.row(u)) {
            *o += pu * w;
        }
    }
    Pmf::new(ch.output_alphabet().clone(), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_preserves_input() {
        let p = Pmf::new(Alphabet::indexed(3), vec![0.2, 0.3, 0.5]).unwrap();
        let ch = Channel::identity(Alphabet::indexed(3));
        assert_eq!(ch.output_pmf(&p).unwrap().probs(), p.probs());
    }

    #[test]
    fn bsc_keeps_uniform() {
        let out = Channel::bsc(0.1)
            .unwrap()
            .output_pmf(&Pmf::uniform(2))
            .unwrap();
        assert!((out.get(0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn erasure_marginal_matches_direct_sum() {
        let z = Alphabet::binary().with_erasure().unwrap();
        let ch = Channel::new(
            Alphabet::binary(),
            z,
            vec![vec![0.7, 0.0, 0.3], vec![0.0, 0.7, 0.3]],
        )
        .unwrap();
        let input = Pmf::new(Alphabet::binary(), vec![0.4, 0.6]).unwrap();
        let out = ch.output_pmf(&input).unwrap();
        let oracle = [0.4 * 0.7, 0.6 * 0.7, 0.4 * 0.3 + 0.6 * 0.3];
        for (a, b) in out.probs().iter().zip(oracle) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((out.get(0) - 0.28).abs() < 1e-12);
        assert!((out.get(1) - 0.42).abs() < 1e-12);
        assert!((out.get(2) - 0.30).abs() < 1e-12);
    }

    #[test]
    fn mismatched_input_is_rejected() {
        let ch = Channel::bsc(0.1).unwrap();
        assert!(ch.output_pmf(&Pmf::uniform(3)).is_err());
    }

    #[test]
    fn cascade_of_bscs() {
        let a = Channel::bsc(0.1).unwrap();
        let b = Channel::bsc(0.2).unwrap();
        let c = a.then(&b).unwrap();
        assert!((c.prob(0, 1) - (0.1 * 0.8 + 0.9 * 0.2)).abs() < 1e-15);
    }

    #[test]
    fn short_row_names_index() {
        let err = Channel::from_rows(vec![vec![0.5, 0.5], vec![1.0]])
            .unwrap_err()
            .to_string();
        assert!(err.contains("rows[1]"), "{err}");
    }
}
