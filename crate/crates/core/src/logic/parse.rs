//! Text syntax for formulas.
//!
//! ```text
//! formula  := conj ('|' conj)*
//! conj     := unary ('&' unary)*
//! unary    := modality NUMBER unary | '!' SYMBOL | SYMBOL | '(' formula ')'
//! modality := '<>=' | '[]<' | '<>==' | '[]!='
//! ```
//!
//! Whitespace is ignored between tokens. Negation is only accepted directly
//! on a symbol and every literal must sit under some modality.

use super::formula::{Formula, Modality};
use super::vocab::Vocabulary;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_GRADE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    pub max_grade: u64,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { max_grade: DEFAULT_MAX_GRADE }
    }
}

pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Formula> {
    parse_formula_with(text, vocab, ParseOptions::default())
}

pub fn parse_formula_with(text: &str, vocab: &Vocabulary, opts: ParseOptions) -> Result<Formula> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, vocab, opts, modal_depth: 0, bare: None };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    if let Some(pos) = p.bare {
        return Err(Error::BareLiteral { pos });
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vocab: &'a Vocabulary,
    opts: ParseOptions,
    modal_depth: usize,
    bare: Option<usize>,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut left = self.conj()?;
        while self.eat("|") {
            let right = self.conj()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        while self.eat("&") {
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn modality(&mut self) -> Option<Modality> {
        // Longest tokens first: `<>==` before `<>=`.
        for (tok, op) in [
            ("<>==", Modality::DiamondEq),
            ("<>=", Modality::DiamondGeq),
            ("[]!=", Modality::BoxNeq),
            ("[]<", Modality::BoxLt),
        ] {
            if self.eat(tok) {
                return Some(op);
            }
        }
        None
    }

    fn grade(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a grade after the modality"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let grade: u64 = digits.parse().map_err(|_| Error::GradeTooLarge {
            grade: u64::MAX,
            max: self.opts.max_grade,
            pos: start,
        })?;
        if grade > self.opts.max_grade {
            return Err(Error::GradeTooLarge { grade, max: self.opts.max_grade, pos: start });
        }
        Ok(grade)
    }

    fn unary(&mut self) -> Result<Formula> {
        let start = {
            self.skip_ws();
            self.pos
        };
        if let Some(op) = self.modality() {
            let grade = self.grade()?;
            self.modal_depth += 1;
            let body = self.unary()?;
            self.modal_depth -= 1;
            return Ok(Formula::modal(op, grade, body));
        }
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let f = self.formula()?;
                if !self.eat(")") {
                    return Err(self.error("expected `)`"));
                }
                Ok(f)
            }
            Some(b'!') => {
                self.pos += 1;
                self.skip_ws();
                match self.src.get(self.pos) {
                    Some(c) if c.is_ascii_alphabetic() || *c == b'_' => self.literal(false, start),
                    _ => Err(Error::NotNnf { pos: start }),
                }
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.literal(true, start),
            Some(_) => Err(self.error("expected a literal, `(` or a modality")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn literal(&mut self, positive: bool, start: usize) -> Result<Formula> {
        let name_start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[name_start..self.pos]).expect("ascii identifier");
        let symbol = self
            .vocab
            .symbol_index(name)
            .ok_or_else(|| Error::UnknownSymbol { name: name.to_string(), pos: name_start })?;
        if self.modal_depth == 0 && self.bare.is_none() {
            self.bare = Some(start);
        }
        Ok(Formula::lit(symbol, positive))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vp() -> Vocabulary {
        Vocabulary::new(&["p", "q"]).unwrap()
    }

    #[test]
    fn parses_modalities() {
        let v = vp();
        assert_eq!(parse_formula("<>=1 p", &v).unwrap(), Formula::diamond_geq(1, Formula::lit(0, true)));
        assert_eq!(parse_formula("[]<1 p", &v).unwrap(), Formula::box_lt(1, Formula::lit(0, true)));
        assert_eq!(
            parse_formula("<>==2(p&!q)", &v).unwrap(),
            Formula::diamond_eq(2, Formula::and(Formula::lit(0, true), Formula::lit(1, false)))
        );
        assert_eq!(parse_formula(" []!= 0 !q ", &v).unwrap(), Formula::box_neq(0, Formula::lit(1, false)));
    }

    #[test]
    fn precedence_and_before_or() {
        let v = vp();
        let f = parse_formula("<>=1 p | <>=1 q & []<1 p", &v).unwrap();
        assert!(matches!(f, Formula::Or(_, _)));
    }

    #[test]
    fn rejects_bare_literal() {
        let v = vp();
        assert_eq!(parse_formula("p", &v), Err(Error::BareLiteral { pos: 0 }));
        assert_eq!(parse_formula("<>=1 p & q", &v), Err(Error::BareLiteral { pos: 9 }));
    }

    #[test]
    fn rejects_non_nnf_and_unknown_symbols() {
        let v = vp();
        assert_eq!(parse_formula("!(<>=1 p)", &v), Err(Error::NotNnf { pos: 0 }));
        assert!(matches!(parse_formula("<>=1 r", &v), Err(Error::UnknownSymbol { .. })));
        assert!(matches!(parse_formula("<>= p", &v), Err(Error::Syntax { .. })));
        assert!(matches!(parse_formula("<>=1 (p", &v), Err(Error::Syntax { .. })));
        assert!(matches!(parse_formula("<>=1 p)", &v), Err(Error::Syntax { .. })));
    }

    #[test]
    fn grade_cap() {
        let v = vp();
        let opts = ParseOptions { max_grade: 10 };
        assert!(matches!(parse_formula_with("<>=11 p", &v, opts), Err(Error::GradeTooLarge { grade: 11, .. })));
        assert!(matches!(parse_formula("<>=99999999999999999999999 p", &v), Err(Error::GradeTooLarge { .. })));
    }
}
