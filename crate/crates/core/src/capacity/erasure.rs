use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::mutual_information;
use crate::numeric::ser_f64;
use crate::probability::{Alphabet, Channel, JointPmf};

/// Tolerance for the erasure identity `I(U;Z) = β I(U;X)`.
pub const ERASURE_IDENTITY_TOLERANCE: f64 = 1e-12;

/// Erasure channel: `x -> x` with probability `beta`, `x -> ?` otherwise.
pub fn erasure_channel(beta: f64, x_alphabet: &Alphabet) -> Result<Channel> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::validation("beta", format!("{beta} is not in [0, 1]")));
    }
    let z = x_alphabet.with_erasure()?;
    let k = x_alphabet.len();
    let rows = (0..k)
        .map(|x| {
            let mut r = vec![0.0; k + 1];
            r[x] = beta;
            r[k] = 1.0 - beta;
            r
        })
        .collect();
    Channel::new(x_alphabet.clone(), z, rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErasureCheck {
    #[serde(serialize_with = "ser_f64")]
    pub beta: f64,
    #[serde(serialize_with = "ser_f64")]
    pub i_uz: f64,
    #[serde(serialize_with = "ser_f64")]
    pub beta_i_ux: f64,
    #[serde(serialize_with = "ser_f64")]
    pub difference: f64,
    pub holds: bool,
}

/// Computes both sides of `I(U;Z) = β I(U;X)` for `Z` the erasure output of `X`.
pub fn erasure_reduction_check(joint_ux: &JointPmf, beta: f64) -> Result<ErasureCheck> {
    let e = erasure_channel(beta, joint_ux.col_alphabet())?;
    let kx = joint_ux.cols_len();
    let kz = e.output_len();
    let mut table = vec![0.0; joint_ux.rows_len() * kz];
    for u in 0..joint_ux.rows_len() {
        for x in 0..kx {
            let j = joint_ux.get(u, x);
            for z in 0..kz {
                table[u * kz + z] += j * e.prob(x, z);
            }
        }
    }
    let juz = JointPmf::from_flat(joint_ux.row_alphabet().clone(), e.output_alphabet().clone(), table)?;
    let i_uz = mutual_information(&juz);
    let beta_i_ux = beta * mutual_information(joint_ux);
    let difference = (i_uz - beta_i_ux).abs();
    Ok(ErasureCheck {
        beta,
        i_uz,
        beta_i_ux,
        difference,
        holds: difference < ERASURE_IDENTITY_TOLERANCE,
    })
}
