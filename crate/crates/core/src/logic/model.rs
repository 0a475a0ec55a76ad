use serde::{Deserialize, Serialize};

use super::formula::Formula;
use super::vocab::{type_has_positive, Vocabulary};
use crate::error::{Error, Result};

/// A model up to isomorphism: how many points realize each type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct ModelProfile {
    counts: Vec<u64>,
}

impl ModelProfile {
    /// Builds a profile; the length must be a type count `2^k` with `k ≥ 1`
    /// and the domain must be nonempty.
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        let t = counts.len();
        if t < 2 || !t.is_power_of_two() {
            return Err(Error::VocabularyMismatch(format!("profile has {t} entries, expected a power of two ≥ 2")));
        }
        if counts.iter().sum::<u64>() == 0 {
            return Err(Error::Precondition("a model needs at least one point".into()));
        }
        Ok(Self { counts })
    }

    pub fn for_vocabulary(vocab: &Vocabulary, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != vocab.type_count() {
            return Err(Error::VocabularyMismatch(format!(
                "profile has {} entries but the vocabulary has {} types",
                counts.len(),
                vocab.type_count()
            )));
        }
        Self::new(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, ty: usize) -> u64 {
        self.counts[ty]
    }

    pub fn n(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn type_count(&self) -> usize {
        self.counts.len()
    }

    pub fn symbol_count(&self) -> usize {
        self.counts.len().trailing_zeros() as usize
    }

    /// Types with at least one realizing point.
    pub fn realized(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, _)| i)
    }

    /// Truth value of `f` at a point of each type. Point-independent
    /// subformulas yield a constant vector.
    pub fn truth_by_type(&self, f: &Formula) -> Result<Vec<bool>> {
        if let Some(s) = f.max_symbol() {
            if s >= self.symbol_count() {
                return Err(Error::VocabularyMismatch(format!(
                    "formula uses symbol #{s} but the profile has {} symbols",
                    self.symbol_count()
                )));
            }
        }
        Ok(self.truth_unchecked(f))
    }

    fn truth_unchecked(&self, f: &Formula) -> Vec<bool> {
        let t = self.counts.len();
        match f {
            Formula::Lit { symbol, positive } => {
                (0..t).map(|ty| type_has_positive(self.symbol_count(), ty, *symbol) == *positive).collect()
            }
            Formula::And(a, b) => {
                let (x, y) = (self.truth_unchecked(a), self.truth_unchecked(b));
                x.iter().zip(&y).map(|(p, q)| *p && *q).collect()
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.truth_unchecked(a), self.truth_unchecked(b));
                x.iter().zip(&y).map(|(p, q)| *p || *q).collect()
            }
            Formula::Modal { op, grade, body } => {
                let inner = self.truth_unchecked(body);
                let satisfying: u64 = inner.iter().zip(&self.counts).filter(|(b, _)| **b).map(|(_, c)| *c).sum();
                vec![op.holds(*grade, satisfying, self.n()); t]
            }
        }
    }

    /// Global truth: `f` holds at every point of the model.
    pub fn evaluate(&self, f: &Formula) -> Result<bool> {
        let truth = self.truth_by_type(f)?;
        Ok(self.realized().all(|ty| truth[ty]))
    }
}

impl TryFrom<Vec<u64>> for ModelProfile {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ModelProfile> for Vec<u64> {
    fn from(p: ModelProfile) -> Self {
        p.counts
    }
}

/// A profile together with the type of its evaluation point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PointedProfile {
    pub profile: ModelProfile,
    pub point_type: usize,
}

impl PointedProfile {
    pub fn new(profile: ModelProfile, point_type: usize) -> Result<Self> {
        match profile.counts().get(point_type) {
            Some(&c) if c > 0 => Ok(Self { profile, point_type }),
            Some(_) => Err(Error::Precondition(format!("type {point_type} is not realized in the profile"))),
            None => Err(Error::VocabularyMismatch(format!("type index {point_type} out of range"))),
        }
    }

    pub fn evaluate(&self, f: &Formula) -> Result<bool> {
        Ok(self.profile.truth_by_type(f)?[self.point_type])
    }
}

pub fn evaluate(profile: &ModelProfile, f: &Formula) -> Result<bool> {
    profile.evaluate(f)
}

pub fn evaluate_pointed(pm: &PointedProfile, f: &Formula) -> Result<bool> {
    pm.evaluate(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn vp() -> Vocabulary {
        Vocabulary::new(&["p"]).unwrap()
    }

    // Type order for {p} is (!p, p).
    fn profile(not_p: u64, p: u64) -> ModelProfile {
        ModelProfile::new(vec![not_p, p]).unwrap()
    }

    #[test]
    fn global_truth_examples() {
        let v = vp();
        let all_p = parse_formula("[]<1 p", &v).unwrap();
        assert!(profile(0, 3).evaluate(&all_p).unwrap());
        assert!(!profile(1, 2).evaluate(&all_p).unwrap());
        assert!(profile(2, 2).evaluate(&parse_formula("<>==2 p", &v).unwrap()).unwrap());
    }

    #[test]
    fn pointed_examples() {
        let v = vp();
        let at_p = PointedProfile::new(profile(1, 1), 1).unwrap();
        let at_not_p = PointedProfile::new(profile(1, 1), 0).unwrap();
        assert!(!at_p.evaluate(&parse_formula("<>=2 p", &v).unwrap()).unwrap());
        assert!(at_not_p.evaluate(&parse_formula("<>=1 p", &v).unwrap()).unwrap());
    }

    #[test]
    fn vocabulary_mismatch() {
        let f = Formula::diamond_geq(1, Formula::lit(1, true));
        assert!(matches!(profile(1, 1).evaluate(&f), Err(Error::VocabularyMismatch(_))));
        assert!(ModelProfile::new(vec![1, 1, 1]).is_err());
        assert!(PointedProfile::new(profile(0, 2), 0).is_err());
    }
}
