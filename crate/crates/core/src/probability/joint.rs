use serde::Serialize;

use super::pmf::{check_weights, NORMALIZATION_TOLERANCE};
use super::{Alphabet, Channel, Pmf};
use crate::error::{Error, Result};

/// Joint PMF on `rows × cols`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointPmf {
    row_alphabet: Alphabet,
    col_alphabet: Alphabet,
    table: Vec<f64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    renormalized: bool,
}

impl JointPmf {
    pub fn new(rows: Alphabet, cols: Alphabet, table: Vec<Vec<f64>>) -> Result<Self> {
        if table.len() != rows.len() {
            return Err(Error::validation(
                "table",
                format!("{} rows for {} row symbols", table.len(), rows.len()),
            ));
        }
        for (i, r) in table.iter().enumerate() {
            if r.len() != cols.len() {
                return Err(Error::validation(
                    format!("table[{i}]"),
                    format!("{} entries for {} column symbols", r.len(), cols.len()),
                ));
            }
        }
        Self::from_flat(rows, cols, table.concat())
    }

    pub fn from_flat(rows: Alphabet, cols: Alphabet, mut table: Vec<f64>) -> Result<Self> {
        if table.len() != rows.len() * cols.len() {
            return Err(Error::validation(
                "table",
                format!(
                    "{} cells for a {}x{} table",
                    table.len(),
                    rows.len(),
                    cols.len()
                ),
            ));
        }
        let total = check_weights("table", &table)?;
        let renormalized = (total - 1.0).abs() > NORMALIZATION_TOLERANCE;
        if renormalized {
            table.iter_mut().for_each(|p| *p /= total);
        }
        Ok(JointPmf {
            row_alphabet: rows,
            col_alphabet: cols,
            table,
            renormalized,
        })
    }

    /// `J(u, v) = input(u) ch(v|u)`.
    pub fn from_input_and_channel(input: &Pmf, ch: &Channel) -> Result<Self> {
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
        let mut table = Vec::with_capacity(input.len() * k);
        for (u, &pu) in input.probs().iter().enumerate() {
            table.extend(ch.row(u).iter().map(|w| pu * w));
        }
        Ok(JointPmf {
            row_alphabet: ch.input_alphabet().clone(),
            col_alphabet: ch.output_alphabet().clone(),
            table,
            renormalized: false,
        })
    }

    /// Product law `p ⊗ q`.
    pub fn independent(p: &Pmf, q: &Pmf) -> Self {
        let table = p
            .probs()
            .iter()
            .flat_map(|a| q.probs().iter().map(move |b| a * b))
            .collect();
        JointPmf {
            row_alphabet: p.alphabet().clone(),
            col_alphabet: q.alphabet().clone(),
            table,
            renormalized: false,
        }
    }

    pub fn row_alphabet(&self) -> &Alphabet {
        &self.row_alphabet
    }

    pub fn col_alphabet(&self) -> &Alphabet {
        &self.col_alphabet
    }

    pub fn rows_len(&self) -> usize {
        self.row_alphabet.len()
    }

    pub fn cols_len(&self) -> usize {
        self.col_alphabet.len()
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.table[u * self.cols_len() + v]
    }

    /// Row-major flat table.
    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    pub fn row_marginal(&self) -> Pmf {
        let k = self.cols_len();
        let probs = self.table.chunks(k).map(|r| r.iter().sum()).collect();
        Pmf::new(self.row_alphabet.clone(), probs).expect("marginal of a valid joint")
    }

    pub fn col_marginal(&self) -> Pmf {
        let k = self.cols_len();
        let mut probs = vec![0.0; k];
        for r in self.table.chunks(k) {
            for (p, x) in probs.iter_mut().zip(r) {
                *p += x;
            }
        }
        Pmf::new(self.col_alphabet.clone(), probs).expect("marginal of a valid joint")
    }

    /// Conditional law of the column given row `u`.
    pub fn conditional_row(&self, u: usize) -> Result<Pmf> {
        let k = self.cols_len();
        let row = &self.table[u * k..(u + 1) * k];
        let mass: f64 = row.iter().sum();
        if mass <= 0.0 {
            return Err(Error::validation(
                format!("table[{u}]"),
                "conditional is undefined on a row with zero marginal mass",
            ));
        }
        Pmf::from_weights(self.col_alphabet.clone(), row)
    }

    /// Splits into the row marginal and the conditional channel.
    ///
    /// Rows of zero marginal mass have no conditional; they are filled with the
    /// column marginal so the result is a valid channel. Such rows never
    /// contribute to any quantity weighted by the row marginal.
    pub fn split(&self) -> (Pmf, Channel) {
        let marginal = self.row_marginal();
        let fill = self.col_marginal();
        let k = self.cols_len();
        let rows = (0..self.rows_len())
            .map(|u| {
                let m = marginal.get(u);
                if m > 0.0 {
                    self.table[u * k..(u + 1) * k].iter().map(|x| x / m).collect()
                } else {
                    fill.probs().to_vec()
                }
            })
            .collect();
        let ch = Channel::new(self.row_alphabet.clone(), self.col_alphabet.clone(), rows)
            .expect("conditional rows of a valid joint");
        (marginal, ch)
    }

    /// The joint as a PMF over the product alphabet.
    pub fn flattened(&self) -> Pmf {
        Pmf::new(
            self.row_alphabet.product(&self.col_alphabet),
            self.table.clone(),
        )
        .expect("valid joint")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginals_and_split_roundtrip() {
        let ch = Channel::bsc(0.2).unwrap();
        let q = Pmf::new(Alphabet::binary(), vec![0.3, 0.7]).unwrap();
        let j = JointPmf::from_input_and_channel(&q, &ch).unwrap();
        let (m, c) = j.split();
        for i in 0..2 {
            assert!((m.get(i) - q.get(i)).abs() < 1e-15);
            for v in 0..2 {
                assert!((c.prob(i, v) - ch.prob(i, v)).abs() < 1e-15);
            }
        }
        let out = j.col_marginal();
        assert!((out.get(1) - (0.3 * 0.2 + 0.7 * 0.8)).abs() < 1e-15);
    }

    #[test]
    fn zero_row_has_no_conditional() {
        let j = JointPmf::new(
            Alphabet::binary(),
            Alphabet::binary(),
            vec![vec![0.0, 0.0], vec![0.5, 0.5]],
        )
        .unwrap();
        assert!(j.conditional_row(0).is_err());
        assert!(j.conditional_row(1).is_ok());
    }
}
