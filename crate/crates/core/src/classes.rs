//! Admissible tuples, the classes of `≡_d` they name, and exact class sizes.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Pow;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{factorial, multinomial, stirling_unchecked, BigCount};
use crate::error::{precondition, Error, Result};
use crate::logic::{ModelProfile, Vocabulary};

/// An `(n,d)`-admissible tuple: per type, the exact count when below `d`,
/// or `d` meaning "at least `d`".
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawTuple")]
pub struct AdmissibleTuple {
    entries: Vec<u64>,
    n: u64,
    d: u64,
}

#[derive(Deserialize)]
struct RawTuple {
    entries: Vec<u64>,
    n: u64,
    d: u64,
}

impl TryFrom<RawTuple> for AdmissibleTuple {
    type Error = Error;
    fn try_from(raw: RawTuple) -> Result<Self> {
        AdmissibleTuple::new(raw.entries, raw.n, raw.d)
    }
}

impl AdmissibleTuple {
    pub fn new(entries: Vec<u64>, n: u64, d: u64) -> Result<Self> {
        let t = entries.len();
        if t < 2 || !t.is_power_of_two() {
            return Err(Error::VocabularyMismatch(format!("tuple has {t} entries, expected a power of two ≥ 2")));
        }
        if d == 0 {
            return Err(precondition("counting depth must be at least 1"));
        }
        if let Some(e) = entries.iter().find(|&&e| e > d) {
            return Err(precondition(format!("entry {e} exceeds d = {d}")));
        }
        let sum: u64 = entries.iter().sum();
        if sum > n {
            return Err(precondition(format!("entries sum to {sum} > n = {n}")));
        }
        if sum < n && !entries.contains(&d) {
            return Err(precondition(format!("entries sum to {sum} < n = {n} but no entry equals d = {d}")));
        }
        Ok(Self { entries, n, d })
    }

    pub fn for_vocabulary(vocab: &Vocabulary, entries: Vec<u64>, n: u64, d: u64) -> Result<Self> {
        if entries.len() != vocab.type_count() {
            return Err(Error::VocabularyMismatch(format!(
                "tuple has {} entries but the vocabulary has {} types",
                entries.len(),
                vocab.type_count()
            )));
        }
        Self::new(entries, n, d)
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn type_count(&self) -> usize {
        self.entries.len()
    }

    pub fn sum(&self) -> u64 {
        self.entries.iter().sum()
    }

    /// Number of entries equal to `d`.
    pub fn k_d(&self) -> usize {
        self.entries.iter().filter(|&&e| e == self.d).count()
    }

    /// Indices with a nonzero entry.
    pub fn support(&self) -> Vec<usize> {
        (0..self.entries.len()).filter(|&i| self.entries[i] > 0).collect()
    }

    /// The type with the largest entry; lowest index on ties.
    pub fn max_index(&self) -> usize {
        let max = *self.entries.iter().max().expect("nonempty tuple");
        self.entries.iter().position(|&e| e == max).expect("max exists")
    }

    /// `|π_i|`: the count of type `i` shared by every model of the class,
    /// when the tuple determines it.
    pub fn determined_count(&self, i: usize) -> Option<u64> {
        let e = self.entries[i];
        if e < self.d {
            return Some(e);
        }
        if self.k_d() == 1 {
            let others: u64 = self.sum() - e;
            return Some(self.n - others);
        }
        None
    }

    /// The class member where every point not fixed by the tuple takes
    /// the max type.
    pub fn representative(&self) -> ModelProfile {
        let j = self.max_index();
        let mut counts = self.entries.clone();
        counts[j] = self.n - (self.sum() - self.entries[j]);
        ModelProfile::new(counts).expect("admissible tuples have n ≥ 1")
    }

    /// Whether the profile belongs to this class.
    pub fn contains(&self, m: &ModelProfile) -> bool {
        m.n() == self.n
            && m.type_count() == self.entries.len()
            && m.counts().iter().zip(&self.entries).all(|(&c, &e)| c.min(self.d) == e)
    }

    /// Coordinatewise `≤`.
    pub fn le(&self, other: &Self) -> bool {
        self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b)
    }

    fn with_entry(&self, i: usize, value: u64) -> Result<Self> {
        let mut entries = self.entries.clone();
        entries[i] = value;
        Self::new(entries, self.n, self.d)
    }
}

impl std::fmt::Display for AdmissibleTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Caps each count at `d`.
pub fn tuple_of_profile(m: &ModelProfile, d: u64) -> Result<AdmissibleTuple> {
    if d == 0 {
        return Err(precondition("counting depth must be at least 1"));
    }
    let entries = m.counts().iter().map(|&c| c.min(d)).collect();
    AdmissibleTuple::new(entries, m.n(), d)
}

/// All `(n,d)`-admissible tuples over the vocabulary, lexicographically.
pub fn enumerate_admissible(n: u64, d: u64, vocab: &Vocabulary) -> Result<Vec<AdmissibleTuple>> {
    enumerate_admissible_t(n, d, vocab.type_count())
}

pub(crate) fn enumerate_admissible_t(n: u64, d: u64, t: usize) -> Result<Vec<AdmissibleTuple>> {
    if d == 0 {
        return Err(precondition("counting depth must be at least 1"));
    }
    if n == 0 {
        return Err(precondition("domain size must be at least 1"));
    }
    let mut out = Vec::new();
    let mut cur = vec![0u64; t];
    fn rec(pos: usize, sum: u64, cur: &mut Vec<u64>, n: u64, d: u64, out: &mut Vec<AdmissibleTuple>) {
        if pos == cur.len() {
            if sum == n || cur.contains(&d) {
                out.push(AdmissibleTuple { entries: cur.clone(), n, d });
            }
            return;
        }
        for v in 0..=d.min(n - sum) {
            cur[pos] = v;
            rec(pos + 1, sum + v, cur, n, d, out);
        }
        cur[pos] = 0;
    }
    rec(0, 0, &mut cur, n, d, &mut out);
    Ok(out)
}

/// Exact number of size-`n` models (over the fixed domain) in the class.
///
/// Types with `n_i < d` are placed by a multinomial choice; the remaining
/// `m` points are split among the `k_d` capped types, each receiving at
/// least `d`, counted as `k_d! · S(m, k_d)_{≥d}`.
pub fn class_size(tuple: &AdmissibleTuple) -> BigCount {
    let d = tuple.d;
    let exact: Vec<u64> = tuple.entries.iter().copied().filter(|&e| e < d).collect();
    let k_d = (tuple.entries.len() - exact.len()) as u64;
    let m = tuple.n - exact.iter().sum::<u64>();
    let mut parts = exact;
    parts.push(m);
    let choose = multinomial(tuple.n, &parts).expect("parts sum to n by construction");
    choose * factorial(k_d) * stirling_unchecked(m, k_d, d)
}

/// `t^n`, the number of models of size `n`.
pub fn total_models(n: u64, t: usize) -> BigUint {
    Pow::pow(&BigUint::from(t), n)
}

/// Groups all `t^n` labeled models by capped type counts. Exponential;
/// meant for verification at small scale.
pub fn brute_force_class_sizes(n: u64, d: u64, vocab: &Vocabulary) -> Result<BTreeMap<Vec<u64>, u64>> {
    let t = vocab.type_count() as u64;
    let total = (t as f64).powf(n as f64);
    if total > (1u64 << 22) as f64 {
        return Err(Error::ScaleCap(format!("t^n = {total} labeled models exceeds 2^22")));
    }
    let mut out = BTreeMap::new();
    let mut assignment = vec![0u64; n as usize];
    loop {
        let mut counts = vec![0u64; t as usize];
        for &ty in &assignment {
            counts[ty as usize] += 1;
        }
        let key: Vec<u64> = counts.iter().map(|&c| c.min(d)).collect();
        *out.entry(key).or_insert(0) += 1;
        // Odometer increment.
        let mut i = 0;
        loop {
            if i == assignment.len() {
                return Ok(out);
            }
            assignment[i] += 1;
            if assignment[i] < t {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

/// Exact sizes of a tuple and a modified tuple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeComparison {
    pub from: AdmissibleTuple,
    pub to: AdmissibleTuple,
    #[serde(serialize_with = "crate::serde_util::big")]
    pub size_from: BigUint,
    #[serde(serialize_with = "crate::serde_util::big")]
    pub size_to: BigUint,
    pub strictly_increasing: bool,
}

impl SizeComparison {
    fn between(from: AdmissibleTuple, to: AdmissibleTuple) -> Self {
        let size_from = class_size(&from);
        let size_to = class_size(&to);
        let strictly_increasing = size_from < size_to;
        Self { from, to, size_from, size_to, strictly_increasing }
    }
}

fn check_index(tuple: &AdmissibleTuple, i: usize) -> Result<()> {
    if i >= tuple.entries.len() {
        return Err(precondition(format!("type index {i} out of range")));
    }
    Ok(())
}

/// Compares `|M_n̄|` with the class where type `i` gains one exact point.
/// Requires `n_i < d − 1`.
pub fn check_one_more_element(tuple: &AdmissibleTuple, i: usize) -> Result<SizeComparison> {
    check_index(tuple, i)?;
    if tuple.entries[i] + 1 >= tuple.d {
        return Err(precondition(format!(
            "entry {} at index {i} must be below d − 1 = {}",
            tuple.entries[i],
            tuple.d - 1
        )));
    }
    let to = tuple.with_entry(i, tuple.entries[i] + 1)?;
    Ok(SizeComparison::between(tuple.clone(), to))
}

/// Compares `|M_n̄|` with the class where entry `i` is raised to `d`.
/// Requires `n_i < d`.
pub fn check_one_more_d(tuple: &AdmissibleTuple, i: usize) -> Result<SizeComparison> {
    check_index(tuple, i)?;
    if tuple.entries[i] >= tuple.d {
        return Err(precondition(format!("entry at index {i} is already capped at d")));
    }
    let to = tuple.with_entry(i, tuple.d)?;
    Ok(SizeComparison::between(tuple.clone(), to))
}

/// Pairs `(n̄, n̄ + e_i)` with both sides admissible.
pub fn immediate_successor_pairs(tuples: &[AdmissibleTuple]) -> Vec<(AdmissibleTuple, AdmissibleTuple)> {
    let mut out = Vec::new();
    for a in tuples {
        for i in 0..a.entries.len() {
            if a.entries[i] < a.d {
                if let Ok(b) = a.with_entry(i, a.entries[i] + 1) {
                    out.push((a.clone(), b));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub n: u64,
    pub d: u64,
    pub pairs: Vec<SizeComparison>,
    pub all_pass: bool,
    /// Smallest `n0 ≤ n` such that every domain size in `n0..=n` passes.
    pub stable_from: Option<u64>,
    /// Domain sizes below `n` where some pair failed.
    pub failing_sizes: Vec<u64>,
}

fn pairs_at(n: u64, d: u64, t: usize) -> Result<Vec<SizeComparison>> {
    let tuples = enumerate_admissible_t(n, d, t)?;
    Ok(immediate_successor_pairs(&tuples).into_iter().map(|(a, b)| SizeComparison::between(a, b)).collect())
}

/// Checks `|M_n̄| < |M_n̄'|` for every immediate successor pair at size `n`
/// and sweeps smaller sizes to locate where the property starts to hold.
pub fn check_class_size_monotonicity(n: u64, d: u64, vocab: &Vocabulary) -> Result<MonotonicityReport> {
    let t = vocab.type_count();
    let pairs = pairs_at(n, d, t)?;
    let all_pass = pairs.iter().all(|p| p.strictly_increasing);
    let mut failing_sizes = Vec::new();
    for m in 1..n {
        if !pairs_at(m, d, t)?.iter().all(|p| p.strictly_increasing) {
            failing_sizes.push(m);
        }
    }
    let stable_from = if all_pass { Some(failing_sizes.last().map_or(1, |&m| m + 1)) } else { None };
    Ok(MonotonicityReport { n, d, pairs, all_pass, stable_from, failing_sizes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn vp() -> Vocabulary {
        Vocabulary::new(&["p"]).unwrap()
    }

    fn tup(e: &[u64], n: u64, d: u64) -> AdmissibleTuple {
        AdmissibleTuple::new(e.to_vec(), n, d).unwrap()
    }

    #[test]
    fn admissibility_rules() {
        assert!(AdmissibleTuple::new(vec![1, 1], 3, 1).is_ok());
        assert!(AdmissibleTuple::new(vec![0, 0], 3, 1).is_err());
        assert!(AdmissibleTuple::new(vec![2, 1], 3, 1).is_err());
        assert!(AdmissibleTuple::new(vec![1, 1], 2, 3).is_ok());
        assert!(AdmissibleTuple::new(vec![1, 1], 1, 1).is_err());
        assert!(AdmissibleTuple::new(vec![1, 1, 1], 3, 1).is_err());
    }

    #[test]
    fn capping_profiles() {
        // Type order (!p, p): all-p on three points.
        let all_p = ModelProfile::new(vec![0, 3]).unwrap();
        assert_eq!(tuple_of_profile(&all_p, 1).unwrap().entries(), &[0, 1]);
        let m = ModelProfile::new(vec![2, 2]).unwrap();
        assert_eq!(tuple_of_profile(&m, 3).unwrap().entries(), &[2, 2]);
        let big = ModelProfile::new(vec![5, 7]).unwrap();
        assert_eq!(tuple_of_profile(&big, 4).unwrap().entries(), &[4, 4]);
    }

    #[test]
    fn enumeration_examples() {
        let v = vp();
        let names = |n, d| -> Vec<Vec<u64>> {
            enumerate_admissible(n, d, &v).unwrap().iter().map(|t| t.entries().to_vec()).collect()
        };
        assert_eq!(names(3, 1), vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(names(1, 1), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(names(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn size_examples() {
        assert_eq!(class_size(&tup(&[1, 1], 3, 1)), BigUint::from(6u32));
        assert_eq!(class_size(&tup(&[0, 1], 3, 1)), BigUint::one());
        assert_eq!(class_size(&tup(&[2, 2], 4, 2)), BigUint::from(6u32));
        assert_eq!(class_size(&tup(&[2, 1], 4, 2)), BigUint::from(4u32));
    }

    #[test]
    fn determined_counts_and_representatives() {
        let t = tup(&[1, 3], 10, 3);
        assert_eq!(t.determined_count(0), Some(1));
        assert_eq!(t.determined_count(1), Some(9));
        assert_eq!(t.representative().counts(), &[1, 9]);
        let both = tup(&[3, 3], 10, 3);
        assert_eq!(both.determined_count(0), None);
        assert_eq!(both.representative().counts(), &[7, 3]);
        assert!(both.contains(&both.representative()));
    }

    #[test]
    fn one_more_element_and_d() {
        let c = check_one_more_element(&tup(&[0, 3], 12, 3), 0).unwrap();
        assert_eq!(c.to.entries(), &[1, 3]);
        assert_eq!(c.size_from, BigUint::one());
        assert_eq!(c.size_to, BigUint::from(12u32));
        assert!(c.strictly_increasing);

        let c = check_one_more_d(&tup(&[1, 2], 12, 2), 0).unwrap();
        assert_eq!(c.to.entries(), &[2, 2]);
        assert!(c.strictly_increasing);

        assert!(check_one_more_d(&tup(&[2, 2], 12, 2), 0).is_err());
        assert!(check_one_more_element(&tup(&[1, 2], 12, 2), 0).is_err());

        let c = check_one_more_d(&tup(&[1, 2, 2, 0], 20, 2), 3).unwrap();
        assert_eq!(c.size_from, class_size(&tup(&[1, 2, 2, 0], 20, 2)));
    }

    #[test]
    fn monotonicity_examples() {
        let v = vp();
        let r = check_class_size_monotonicity(16, 2, &v).unwrap();
        assert!(r.all_pass);
        let r = check_class_size_monotonicity(3, 1, &v).unwrap();
        let pair = r.pairs.iter().find(|p| p.from.entries() == [1, 0] && p.to.entries() == [1, 1]).unwrap();
        assert_eq!(pair.size_from, BigUint::one());
        assert_eq!(pair.size_to, BigUint::from(6u32));
        assert!(r.all_pass);
    }

    #[test]
    fn small_n_counterexample_is_reported() {
        // n = 4, d = 1, four types: (0,1,1,1) holds 36 models, (1,1,1,1) only 4! = 24.
        let v = Vocabulary::new(&["p", "q"]).unwrap();
        let r = check_class_size_monotonicity(4, 1, &v).unwrap();
        assert!(!r.all_pass);
        assert_eq!(r.stable_from, None);
        let bad = r.pairs.iter().find(|p| p.from.entries() == [0, 1, 1, 1]).unwrap();
        assert_eq!(bad.size_from, BigUint::from(36u32));
        assert_eq!(bad.size_to, BigUint::from(24u32));
        assert!(!bad.strictly_increasing);
    }
}
