use std::fmt;

use serde::{Deserialize, Serialize};

use super::vocab::Vocabulary;

/// The four global graded modalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Modality {
    /// `<>=k`: at least `k` points satisfy the body.
    DiamondGeq,
    /// `[]<k`: fewer than `k` points falsify the body.
    BoxLt,
    /// `<>==k`: exactly `k` points satisfy the body.
    DiamondEq,
    /// `[]!=k`: the number of points falsifying the body is not `k`.
    BoxNeq,
}

impl Modality {
    pub fn dual(self) -> Self {
        match self {
            Modality::DiamondGeq => Modality::BoxLt,
            Modality::BoxLt => Modality::DiamondGeq,
            Modality::DiamondEq => Modality::BoxNeq,
            Modality::BoxNeq => Modality::DiamondEq,
        }
    }

    /// Whether this is one of the exact-counting operators.
    pub fn is_exact(self) -> bool {
        matches!(self, Modality::DiamondEq | Modality::BoxNeq)
    }

    /// Size contributed by the operator with grade `k`.
    pub fn cost(self, k: u64) -> u64 {
        if self.is_exact() {
            k + 1
        } else {
            k
        }
    }

    /// Counting depth of the operator with grade `k`.
    pub fn depth(self, k: u64) -> u64 {
        self.cost(k)
    }

    pub fn token(self) -> &'static str {
        match self {
            Modality::DiamondGeq => "<>=",
            Modality::BoxLt => "[]<",
            Modality::DiamondEq => "<>==",
            Modality::BoxNeq => "[]!=",
        }
    }

    /// Truth of the modality given how many of `n` points satisfy the body.
    pub fn holds(self, k: u64, satisfying: u64, n: u64) -> bool {
        let failing = n - satisfying;
        match self {
            Modality::DiamondGeq => satisfying >= k,
            Modality::BoxLt => failing < k,
            Modality::DiamondEq => satisfying == k,
            Modality::BoxNeq => failing != k,
        }
    }
}

/// A graded universal modal formula in negation normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    Lit { symbol: usize, positive: bool },
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Modal { op: Modality, grade: u64, body: Box<Formula> },
}

impl Formula {
    pub fn lit(symbol: usize, positive: bool) -> Self {
        Formula::Lit { symbol, positive }
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn modal(op: Modality, grade: u64, body: Formula) -> Self {
        Formula::Modal { op, grade, body: Box::new(body) }
    }

    pub fn diamond_geq(k: u64, body: Formula) -> Self {
        Self::modal(Modality::DiamondGeq, k, body)
    }

    pub fn box_lt(k: u64, body: Formula) -> Self {
        Self::modal(Modality::BoxLt, k, body)
    }

    pub fn diamond_eq(k: u64, body: Formula) -> Self {
        Self::modal(Modality::DiamondEq, k, body)
    }

    pub fn box_neq(k: u64, body: Formula) -> Self {
        Self::modal(Modality::BoxNeq, k, body)
    }

    /// Left-nested conjunction; `None` for an empty iterator.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    /// The NNF dual: semantically the complement of `self`.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::Lit { symbol, positive } => Formula::lit(*symbol, !positive),
            Formula::And(a, b) => Formula::or(a.negate(), b.negate()),
            Formula::Or(a, b) => Formula::and(a.negate(), b.negate()),
            Formula::Modal { op, grade, body } => Formula::modal(op.dual(), *grade, body.negate()),
        }
    }

    pub fn size(&self) -> u64 {
        match self {
            Formula::Lit { .. } => 1,
            Formula::And(a, b) | Formula::Or(a, b) => a.size() + b.size() + 1,
            Formula::Modal { op, grade, body } => body.size() + op.cost(*grade),
        }
    }

    /// Counting depth: the largest operator depth anywhere in the formula.
    pub fn counting_depth(&self) -> u64 {
        match self {
            Formula::Lit { .. } => 0,
            Formula::And(a, b) | Formula::Or(a, b) => a.counting_depth().max(b.counting_depth()),
            Formula::Modal { op, grade, body } => op.depth(*grade).max(body.counting_depth()),
        }
    }

    /// Depth by the outermost-operator reading, where a modality ignores the
    /// depth of its body. Kept for diagnostics only.
    pub fn outermost_depth(&self) -> u64 {
        match self {
            Formula::Lit { .. } => 0,
            Formula::And(a, b) | Formula::Or(a, b) => a.outermost_depth().max(b.outermost_depth()),
            Formula::Modal { op, grade, .. } => op.depth(*grade),
        }
    }

    /// True when every literal lies under at least one modal operator.
    pub fn is_closed(&self) -> bool {
        match self {
            Formula::Lit { .. } => false,
            Formula::And(a, b) | Formula::Or(a, b) => a.is_closed() && b.is_closed(),
            Formula::Modal { .. } => true,
        }
    }

    /// Largest symbol index used, if any literal occurs.
    pub fn max_symbol(&self) -> Option<usize> {
        match self {
            Formula::Lit { symbol, .. } => Some(*symbol),
            Formula::And(a, b) | Formula::Or(a, b) => a.max_symbol().max(b.max_symbol()),
            Formula::Modal { body, .. } => body.max_symbol(),
        }
    }

    /// Renders the formula in the concrete text syntax.
    pub fn display<'a>(&'a self, vocab: &'a Vocabulary) -> FormulaDisplay<'a> {
        FormulaDisplay { formula: self, vocab }
    }

    pub fn to_text(&self, vocab: &Vocabulary) -> String {
        self.display(vocab).to_string()
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    vocab: &'a Vocabulary,
}

impl FormulaDisplay<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, node: &Formula) -> fmt::Result {
        match node {
            Formula::Lit { symbol, positive } => {
                let name = self.vocab.symbols().get(*symbol).map(String::as_str).unwrap_or("?");
                if *positive {
                    write!(f, "{name}")
                } else {
                    write!(f, "!{name}")
                }
            }
            Formula::And(a, b) => {
                self.write_operand(f, a, |c| matches!(c, Formula::Or(..)))?;
                write!(f, " & ")?;
                self.write_operand(f, b, |c| matches!(c, Formula::Or(..) | Formula::And(..)))
            }
            Formula::Or(a, b) => {
                self.write(f, a)?;
                write!(f, " | ")?;
                self.write_operand(f, b, |c| matches!(c, Formula::Or(..)))
            }
            Formula::Modal { op, grade, body } => {
                write!(f, "{}{} ", op.token(), grade)?;
                self.write_operand(f, body, |c| matches!(c, Formula::Or(..) | Formula::And(..)))
            }
        }
    }

    fn write_operand(
        &self,
        f: &mut fmt::Formatter<'_>,
        node: &Formula,
        needs_parens: impl Fn(&Formula) -> bool,
    ) -> fmt::Result {
        if needs_parens(node) {
            write!(f, "(")?;
            self.write(f, node)?;
            write!(f, ")")
        } else {
            self.write(f, node)
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.formula)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::lit(0, true)
    }

    fn not_q() -> Formula {
        Formula::lit(1, false)
    }

    #[test]
    fn negation_swaps_duals() {
        assert_eq!(Formula::diamond_geq(2, p()).negate(), Formula::box_lt(2, Formula::lit(0, false)));
        assert_eq!(Formula::diamond_eq(1, Formula::lit(0, false)).negate(), Formula::box_neq(1, p()));
        let f = Formula::or(Formula::diamond_eq(3, Formula::and(p(), not_q())), Formula::box_lt(1, p()));
        assert_eq!(f.negate().negate(), f);
    }

    #[test]
    fn size_clauses() {
        assert_eq!(p().size(), 1);
        assert_eq!(Formula::box_lt(1, p()).size(), 2);
        assert_eq!(Formula::diamond_eq(3, Formula::and(p(), not_q())).size(), 7);
    }

    #[test]
    fn depth_clauses() {
        assert_eq!(Formula::box_lt(1, p()).counting_depth(), 1);
        assert_eq!(Formula::diamond_eq(2, p()).counting_depth(), 3);
        let nested = Formula::diamond_geq(1, Formula::diamond_geq(4, p()));
        assert_eq!(nested.counting_depth(), 4);
        assert_eq!(nested.outermost_depth(), 1);
    }

    #[test]
    fn closedness() {
        assert!(!p().is_closed());
        assert!(Formula::box_lt(1, p()).is_closed());
        assert!(!Formula::and(p(), Formula::box_lt(1, p())).is_closed());
        assert!(Formula::diamond_geq(1, Formula::and(p(), Formula::box_lt(1, p()))).is_closed());
    }

    #[test]
    fn renders_text() {
        let v = Vocabulary::new(&["p", "q"]).unwrap();
        let f = Formula::and(Formula::diamond_eq(0, Formula::or(p(), not_q())), Formula::box_neq(2, p()));
        assert_eq!(f.to_text(&v), "<>==0 (p | !q) & []!=2 p");
    }
}
