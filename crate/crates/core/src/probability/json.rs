//! JSON documents for channels, PMFs and joints.
//!
//! ```json
//! {"input_alphabet": ["0","1"], "output_alphabet": ["0","1"], "rows": [[0.9,0.1],[0.1,0.9]]}
//! {"alphabet": ["0","1"], "probs": [0.5, 0.5]}
//! {"row_alphabet": ["0","1"], "col_alphabet": ["0","1"], "table": [[0.4,0.1],[0.1,0.4]]}
//! ```
//!
//! Symbol labels may be strings or numbers; numbers are converted to their
//! decimal text.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use super::{Alphabet, Channel, JointPmf, Pmf};
use crate::error::{Error, Result};

fn symbols<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<String>, D::Error> {
    let raw = Vec::<serde_json::Value>::deserialize(d)?;
    raw.into_iter()
        .map(|v| match v {
            serde_json::Value::String(s) => Ok(s),
            serde_json::Value::Number(n) => Ok(n.to_string()),
            other => Err(serde::de::Error::custom(format!(
                "symbol {other} is not a string or number"
            ))),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelDoc {
    #[serde(deserialize_with = "symbols")]
    pub input_alphabet: Vec<String>,
    #[serde(deserialize_with = "symbols")]
    pub output_alphabet: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PmfDoc {
    #[serde(deserialize_with = "symbols")]
    pub alphabet: Vec<String>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JointDoc {
    #[serde(deserialize_with = "symbols")]
    pub row_alphabet: Vec<String>,
    #[serde(deserialize_with = "symbols")]
    pub col_alphabet: Vec<String>,
    pub table: Vec<Vec<f64>>,
}

impl ChannelDoc {
    pub fn build(self) -> Result<Channel> {
        Channel::new(
            Alphabet::new(self.input_alphabet)?,
            Alphabet::new(self.output_alphabet)?,
            self.rows,
        )
    }

    pub fn from_channel(ch: &Channel) -> Self {
        ChannelDoc {
            input_alphabet: ch.input_alphabet().symbols().to_vec(),
            output_alphabet: ch.output_alphabet().symbols().to_vec(),
            rows: ch.rows(),
        }
    }
}

impl PmfDoc {
    pub fn build(self) -> Result<Pmf> {
        Pmf::new(Alphabet::new(self.alphabet)?, self.probs)
    }
}

impl JointDoc {
    pub fn build(self) -> Result<JointPmf> {
        JointPmf::new(
            Alphabet::new(self.row_alphabet)?,
            Alphabet::new(self.col_alphabet)?,
            self.table,
        )
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_channel(path: &Path) -> Result<Channel> {
    read_json::<ChannelDoc>(path)?.build()
}

pub fn load_pmf(path: &Path) -> Result<Pmf> {
    read_json::<PmfDoc>(path)?.build()
}

pub fn load_joint(path: &Path) -> Result<JointPmf> {
    read_json::<JointDoc>(path)?.build()
}
