use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported vocabulary; `t = 2^|symbols|` must stay addressable.
pub const MAX_SYMBOLS: usize = 16;

/// A finite set of proposition symbols with its canonical type enumeration.
///
/// Type `i` (0-based) is the `i`-th binary pattern of literal polarities
/// read over the symbol order, most significant bit first, with a set bit
/// meaning the positive literal. For `{p, q}` the order is
/// `!p&!q, !p&q, p&!q, p&q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    symbols: Vec<String>,
}

impl Vocabulary {
    pub fn new<S: AsRef<str>>(symbols: &[S]) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidVocabulary("at least one symbol is required".into()));
        }
        if symbols.len() > MAX_SYMBOLS {
            return Err(Error::InvalidVocabulary(format!(
                "{} symbols given, at most {MAX_SYMBOLS} supported",
                symbols.len()
            )));
        }
        let mut out: Vec<String> = Vec::with_capacity(symbols.len());
        for s in symbols {
            let s = s.as_ref().trim();
            if !is_identifier(s) {
                return Err(Error::InvalidVocabulary(format!("`{s}` is not a valid symbol name")));
            }
            if out.iter().any(|o| o == s) {
                return Err(Error::InvalidVocabulary(format!("duplicate symbol `{s}`")));
            }
            out.push(s.to_string());
        }
        Ok(Self { symbols: out })
    }

    /// Parses a comma-separated symbol list such as `p,q`.
    pub fn parse_list(list: &str) -> Result<Self> {
        let parts: Vec<&str> = list.split(',').map(str::trim).collect();
        Self::new(&parts)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Number of propositional types, `2^|symbols|`.
    pub fn type_count(&self) -> usize {
        1usize << self.symbols.len()
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == name)
    }

    /// Whether type `ty` contains the positive literal of symbol `sym`.
    pub fn type_has_positive(&self, ty: usize, sym: usize) -> bool {
        type_has_positive(self.symbols.len(), ty, sym)
    }

    /// The literals of a type as `(symbol index, positive)` in symbol order.
    pub fn type_literals(&self, ty: usize) -> Vec<(usize, bool)> {
        (0..self.len()).map(|s| (s, self.type_has_positive(ty, s))).collect()
    }

    /// Human-readable type name such as `!p&q`.
    pub fn type_name(&self, ty: usize) -> String {
        self.type_literals(ty)
            .into_iter()
            .map(|(s, pos)| if pos { self.symbols[s].clone() } else { format!("!{}", self.symbols[s]) })
            .collect::<Vec<_>>()
            .join("&")
    }

    pub fn type_names(&self) -> Vec<String> {
        (0..self.type_count()).map(|i| self.type_name(i)).collect()
    }
}

/// Polarity lookup that only needs the vocabulary size.
pub(crate) fn type_has_positive(symbol_count: usize, ty: usize, sym: usize) -> bool {
    (ty >> (symbol_count - 1 - sym)) & 1 == 1
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbols.join(","))
    }
}

impl TryFrom<Vec<String>> for Vocabulary {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        Self::new(&v)
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.symbols
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_type_order() {
        let v = Vocabulary::new(&["p", "q"]).unwrap();
        assert_eq!(v.type_count(), 4);
        assert_eq!(v.type_names(), vec!["!p&!q", "!p&q", "p&!q", "p&q"]);
        let single = Vocabulary::new(&["p"]).unwrap();
        assert_eq!(single.type_names(), vec!["!p", "p"]);
    }

    #[test]
    fn rejects_bad_vocabularies() {
        assert!(Vocabulary::new::<&str>(&[]).is_err());
        assert!(Vocabulary::new(&["p", "p"]).is_err());
        assert!(Vocabulary::new(&["1p"]).is_err());
        assert!(Vocabulary::parse_list("p, q").is_ok());
    }
}
