//! Size-ordered enumeration of GMLU_d formulas over all models of one
//! domain size, deduplicated by truth signature.
//!
//! Two tables are grown in lockstep. The open table holds arbitrary
//! formulas keyed by their truth value at every realized (profile, type)
//! pair; the closed table holds formulas whose literals all sit under a
//! modality, keyed by their truth value per profile. A signature is kept
//! only at the first size where it shows up, which is sound because
//! swapping a subformula for an equivalent one never changes the result.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::classes::AdmissibleTuple;
use crate::error::{Error, Result};
use crate::logic::{type_has_positive, Formula, Modality, ModelProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchCaps {
    pub max_symbols: usize,
    pub max_n: u64,
    pub max_d: u64,
}

impl Default for SearchCaps {
    fn default() -> Self {
        Self { max_symbols: 1, max_n: 6, max_d: 3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchHit {
    pub size: u64,
    pub formula: Formula,
}

#[derive(Debug, Clone, Copy)]
struct Ref {
    closed: bool,
    size: u32,
    idx: u32,
}

#[derive(Debug, Clone, Copy)]
enum Node {
    Lit(usize, bool),
    And(Ref, Ref),
    Or(Ref, Ref),
    Modal(Modality, u64, Ref),
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    sig: u128,
    node: Node,
}

const MODALITIES: [Modality; 4] = [Modality::DiamondGeq, Modality::BoxLt, Modality::DiamondEq, Modality::BoxNeq];

pub struct FormulaSearch {
    n: u64,
    d: u64,
    symbol_count: usize,
    profiles: Vec<ModelProfile>,
    /// Per profile: (bit, count) for each realized type.
    profile_bits: Vec<Vec<(u32, u64)>>,
    profile_masks: Vec<u128>,
    literal_sigs: Vec<(usize, bool, u128)>,
    open: Vec<Vec<Entry>>,
    closed: Vec<Vec<Entry>>,
    seen_open: HashSet<u128>,
    seen_closed: HashSet<u128>,
}

/// All profiles of domain size `n` over `t` types, lexicographically.
pub fn all_profiles(n: u64, t: usize) -> Vec<ModelProfile> {
    fn rec(pos: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<ModelProfile>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(ModelProfile::new(cur.clone()).expect("n ≥ 1"));
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            rec(pos + 1, left - v, cur, out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, &mut vec![0; t], &mut out);
    out
}

impl FormulaSearch {
    pub fn new(symbol_count: usize, n: u64, d: u64, caps: SearchCaps) -> Result<Self> {
        if symbol_count == 0 || n == 0 || d == 0 {
            return Err(Error::Precondition("need |τ| ≥ 1, n ≥ 1 and d ≥ 1".into()));
        }
        if symbol_count > caps.max_symbols || n > caps.max_n || d > caps.max_d {
            return Err(Error::ScaleCap(format!(
                "formula search limited to |τ| ≤ {}, n ≤ {}, d ≤ {} (got {symbol_count}, {n}, {d})",
                caps.max_symbols, caps.max_n, caps.max_d
            )));
        }
        let t = 1usize << symbol_count;
        let profiles = all_profiles(n, t);
        if profiles.len() > 128 {
            return Err(Error::ScaleCap(format!("{} profiles exceed the 128-bit signature", profiles.len())));
        }
        let mut profile_bits = Vec::with_capacity(profiles.len());
        let mut profile_masks = Vec::with_capacity(profiles.len());
        let mut point_types = Vec::new();
        for p in &profiles {
            let mut bits = Vec::new();
            let mut mask = 0u128;
            for ty in p.realized() {
                let bit = point_types.len() as u32;
                if bit >= 128 {
                    return Err(Error::ScaleCap("more than 128 pointed profiles".into()));
                }
                point_types.push(ty);
                bits.push((bit, p.count(ty)));
                mask |= 1u128 << bit;
            }
            profile_bits.push(bits);
            profile_masks.push(mask);
        }
        let mut literal_sigs = Vec::new();
        for s in 0..symbol_count {
            for positive in [true, false] {
                let mut sig = 0u128;
                for (bit, &ty) in point_types.iter().enumerate() {
                    if type_has_positive(symbol_count, ty, s) == positive {
                        sig |= 1u128 << bit;
                    }
                }
                literal_sigs.push((s, positive, sig));
            }
        }
        Ok(Self {
            n,
            d,
            symbol_count,
            profiles,
            profile_bits,
            profile_masks,
            literal_sigs,
            open: vec![Vec::new()],
            closed: vec![Vec::new()],
            seen_open: HashSet::new(),
            seen_closed: HashSet::new(),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn profiles(&self) -> &[ModelProfile] {
        &self.profiles
    }

    pub fn profile_index(&self, m: &ModelProfile) -> Option<usize> {
        self.profiles.iter().position(|p| p == m)
    }

    fn modal_closed_sig(&self, op: Modality, k: u64, sub: u128) -> u128 {
        let mut out = 0u128;
        for (p, bits) in self.profile_bits.iter().enumerate() {
            let sat: u64 = bits.iter().filter(|(b, _)| sub >> b & 1 == 1).map(|(_, c)| c).sum();
            if op.holds(k, sat, self.n) {
                out |= 1u128 << p;
            }
        }
        out
    }

    fn broadcast(&self, closed: u128) -> u128 {
        (0..self.profiles.len()).filter(|p| closed >> p & 1 == 1).fold(0u128, |acc, p| acc | self.profile_masks[p])
    }

    fn extend_to(&mut self, size: usize) {
        while self.open.len() <= size {
            self.build_level();
        }
    }

    fn build_level(&mut self) {
        let s = self.open.len();
        let mut open = Vec::new();
        let mut closed = Vec::new();
        if s == 1 {
            for &(sym, pos, sig) in &self.literal_sigs {
                if self.seen_open.insert(sig) {
                    open.push(Entry { sig, node: Node::Lit(sym, pos) });
                }
            }
        }
        for op in MODALITIES {
            for k in 0..=self.d {
                let cost = op.cost(k) as usize;
                if op.depth(k) > self.d || cost == 0 || cost >= s {
                    continue;
                }
                let sub_size = s - cost;
                for idx in 0..self.open[sub_size].len() {
                    let sub = self.open[sub_size][idx].sig;
                    let cs = self.modal_closed_sig(op, k, sub);
                    let node = Node::Modal(op, k, Ref { closed: false, size: sub_size as u32, idx: idx as u32 });
                    if self.seen_closed.insert(cs) {
                        closed.push(Entry { sig: cs, node });
                    }
                    let os = self.broadcast(cs);
                    if self.seen_open.insert(os) {
                        open.push(Entry { sig: os, node });
                    }
                }
            }
        }
        for a in 1..s {
            let b = s - 1 - a;
            if b < a {
                break;
            }
            for closed_table in [false, true] {
                let table = if closed_table { &self.closed } else { &self.open };
                let (left, right) = (&table[a], &table[b]);
                let (seen, out) =
                    if closed_table { (&mut self.seen_closed, &mut closed) } else { (&mut self.seen_open, &mut open) };
                for (i, x) in left.iter().enumerate() {
                    let start = if a == b { i } else { 0 };
                    for (j, y) in right.iter().enumerate().skip(start) {
                        let l = Ref { closed: closed_table, size: a as u32, idx: i as u32 };
                        let r = Ref { closed: closed_table, size: b as u32, idx: j as u32 };
                        let and = x.sig & y.sig;
                        if seen.insert(and) {
                            out.push(Entry { sig: and, node: Node::And(l, r) });
                        }
                        let or = x.sig | y.sig;
                        if seen.insert(or) {
                            out.push(Entry { sig: or, node: Node::Or(l, r) });
                        }
                    }
                }
            }
        }
        // Zero-cost modalities wrap formulas of this same size.
        for idx in 0..open.len() {
            let sub = open[idx].sig;
            for op in [Modality::DiamondGeq, Modality::BoxLt] {
                let cs = self.modal_closed_sig(op, 0, sub);
                let node = Node::Modal(op, 0, Ref { closed: false, size: s as u32, idx: idx as u32 });
                if self.seen_closed.insert(cs) {
                    closed.push(Entry { sig: cs, node });
                }
                let os = self.broadcast(cs);
                if self.seen_open.insert(os) {
                    open.push(Entry { sig: os, node });
                }
            }
        }
        self.open.push(open);
        self.closed.push(closed);
    }

    fn formula_of(&self, r: Ref) -> Formula {
        let table = if r.closed { &self.closed } else { &self.open };
        match table[r.size as usize][r.idx as usize].node {
            Node::Lit(s, pos) => Formula::lit(s, pos),
            Node::And(a, b) => Formula::and(self.formula_of(a), self.formula_of(b)),
            Node::Or(a, b) => Formula::or(self.formula_of(a), self.formula_of(b)),
            Node::Modal(op, k, sub) => Formula::modal(op, k, self.formula_of(sub)),
        }
    }

    /// Smallest closed formula whose per-profile truth satisfies `accept`.
    pub fn first_closed(&mut self, max_size: u64, accept: impl Fn(u128) -> bool) -> Option<SearchHit> {
        for s in 1..=max_size as usize {
            self.extend_to(s);
            if let Some(idx) = self.closed[s].iter().position(|e| accept(e.sig)) {
                let formula = self.formula_of(Ref { closed: true, size: s as u32, idx: idx as u32 });
                return Some(SearchHit { size: s as u64, formula });
            }
        }
        None
    }

    fn check_tuple(&self, tuple: &AdmissibleTuple) -> Result<()> {
        if tuple.n() != self.n || tuple.d() != self.d || tuple.type_count() != 1 << self.symbol_count {
            return Err(Error::VocabularyMismatch(format!(
                "tuple {tuple} (n = {}, d = {}) does not match the search over n = {}, d = {}, t = {}",
                tuple.n(),
                tuple.d(),
                self.n,
                self.d,
                1usize << self.symbol_count
            )));
        }
        Ok(())
    }

    /// Bit mask of profiles in the class.
    pub fn class_mask(&self, tuple: &AdmissibleTuple) -> Result<u128> {
        self.check_tuple(tuple)?;
        Ok(self
            .profiles
            .iter()
            .enumerate()
            .filter(|(_, p)| tuple.contains(p))
            .fold(0u128, |acc, (i, _)| acc | 1u128 << i))
    }

    /// Smallest formula true exactly on the class among size-`n` models.
    pub fn defining(&mut self, tuple: &AdmissibleTuple, max_size: u64) -> Result<Option<SearchHit>> {
        let target = self.class_mask(tuple)?;
        Ok(self.first_closed(max_size, |sig| sig == target))
    }

    fn mask_of(&self, models: &[ModelProfile]) -> Result<u128> {
        let mut mask = 0u128;
        for m in models {
            let i = self.profile_index(m).ok_or_else(|| {
                Error::VocabularyMismatch(format!(
                    "profile {:?} is not a size-{} model over this vocabulary",
                    m.counts(),
                    self.n
                ))
            })?;
            mask |= 1u128 << i;
        }
        Ok(mask)
    }

    /// Smallest formula true on every model of `a` and false on every model
    /// of `b`.
    pub fn separating(&mut self, a: &[ModelProfile], b: &[ModelProfile], max_size: u64) -> Result<Option<SearchHit>> {
        let (am, bm) = (self.mask_of(a)?, self.mask_of(b)?);
        Ok(self.first_closed(max_size, |sig| sig & am == am && sig & bm == 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_are_compositions() {
        let ps = all_profiles(3, 2);
        let counts: Vec<_> = ps.iter().map(|p| p.counts().to_vec()).collect();
        assert_eq!(counts, vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]);
        assert_eq!(all_profiles(2, 4).len(), 10);
    }

    #[test]
    fn hits_evaluate_as_claimed() {
        let mut s = FormulaSearch::new(1, 3, 2, SearchCaps::default()).unwrap();
        for tuple in crate::classes::enumerate_admissible_t(3, 2, 2).unwrap() {
            let hit = s.defining(&tuple, 12).unwrap().unwrap();
            assert!(hit.formula.is_closed());
            assert!(hit.formula.counting_depth() <= 2);
            assert_eq!(hit.formula.size(), hit.size);
            for p in all_profiles(3, 2) {
                assert_eq!(p.evaluate(&hit.formula).unwrap(), tuple.contains(&p));
            }
        }
    }

    #[test]
    fn caps_enforced() {
        assert!(matches!(FormulaSearch::new(2, 3, 1, SearchCaps::default()), Err(Error::ScaleCap(_))));
        assert!(matches!(FormulaSearch::new(1, 7, 1, SearchCaps::default()), Err(Error::ScaleCap(_))));
    }
}
