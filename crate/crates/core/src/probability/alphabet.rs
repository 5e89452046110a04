use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Label of the erasure output of an erasure channel or a type II eavesdropper.
pub const ERASURE_SYMBOL: &str = "?";

/// Ordered list of distinct symbol labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::validation("alphabet", "alphabet must not be empty"));
        }
        let mut seen = HashSet::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if !seen.insert(s.as_str()) {
                return Err(Error::validation(
                    format!("alphabet[{i}]"),
                    format!("duplicate symbol {s:?}"),
                ));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// `{"0", "1", ..., "k-1"}`.
    pub fn indexed(k: usize) -> Self {
        assert!(k > 0, "alphabet must not be empty");
        Alphabet {
            symbols: (0..k).map(|i| i.to_string()).collect(),
        }
    }

    pub fn binary() -> Self {
        Self::indexed(2)
    }

    /// This alphabet followed by the erasure symbol.
    pub fn with_erasure(&self) -> Result<Self> {
        if self.erasure_index().is_some() {
            return Err(Error::validation(
                "alphabet",
                "erasure symbol is already a member of the source alphabet",
            ));
        }
        let mut symbols = self.symbols.clone();
        symbols.push(ERASURE_SYMBOL.to_string());
        Ok(Alphabet { symbols })
    }

    pub fn erasure_index(&self) -> Option<usize> {
        self.index_of(ERASURE_SYMBOL)
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, i: usize) -> &str {
        &self.symbols[i]
    }

    /// Alphabet of pairs `(a, b)` in row-major order, labelled `"a,b"`.
    pub fn product(&self, other: &Alphabet) -> Alphabet {
        let symbols = self
            .symbols
            .iter()
            .flat_map(|a| other.symbols.iter().map(move |b| format!("{a},{b}")))
            .collect();
        Alphabet { symbols }
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = Error;

    fn try_from(symbols: Vec<String>) -> Result<Self> {
        Alphabet::new(symbols)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.symbols
    }
}
