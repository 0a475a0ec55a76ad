//! The GMLU_d formula-size game over sets of pointed profiles.
//!
//! Point choices are made per profile and recorded as type-count vectors;
//! only the set of types chosen affects the next position, so the solver
//! works on bitsets of pointed profiles and memoizes on them.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::complexity::{FormulaSearch, SearchCaps};
use crate::error::{precondition, Error, Result};
use crate::logic::{type_has_positive, Formula, Modality, ModelProfile, PointedProfile, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Winner {
    S,
    D,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GamePosition {
    pub r: u64,
    pub a: Vec<PointedProfile>,
    pub b: Vec<PointedProfile>,
    pub modal_move_made: bool,
}

fn normalize(mut v: Vec<PointedProfile>) -> Vec<PointedProfile> {
    v.sort();
    v.dedup();
    v
}

impl GamePosition {
    /// A starting position; duplicate pointed profiles are merged.
    pub fn new(r: u64, a: Vec<PointedProfile>, b: Vec<PointedProfile>) -> Result<Self> {
        let pos = Self { r, a: normalize(a), b: normalize(b), modal_move_made: false };
        pos.shape()?;
        Ok(pos)
    }

    /// `(n, t)` shared by every profile, if any profile is present.
    fn shape(&self) -> Result<Option<(u64, usize)>> {
        let mut shape = None;
        for pm in self.a.iter().chain(&self.b) {
            let s = (pm.profile.n(), pm.profile.type_count());
            match shape {
                None => shape = Some(s),
                Some(prev) if prev != s => {
                    return Err(Error::VocabularyMismatch(format!(
                        "profiles disagree on (n, t): {prev:?} versus {s:?}"
                    )))
                }
                _ => {}
            }
        }
        Ok(shape)
    }
}

/// Points chosen in one model, as a count per type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Selection {
    pub from: Side,
    pub profile: ModelProfile,
    pub chosen: Vec<u64>,
    pub chosen_to: Side,
    /// Exact-count moves also send the unchosen points somewhere.
    pub rest_to: Option<Side>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GameMove {
    Prop { symbol: usize, positive: bool },
    OrSplit { left: Vec<PointedProfile>, right: Vec<PointedProfile>, r1: u64, r2: u64 },
    AndSplit { left: Vec<PointedProfile>, right: Vec<PointedProfile>, r1: u64, r2: u64 },
    Modal { op: Modality, k: u64, selections: Vec<Selection> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveOutcome {
    Terminal(Winner),
    Next(GamePosition),
    /// D picks one of the two positions.
    DChoice(GamePosition, GamePosition),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameCaps {
    pub max_n: u64,
    pub max_r: u64,
    pub max_side_total: usize,
    pub max_symbols: usize,
}

impl Default for GameCaps {
    fn default() -> Self {
        Self { max_n: 4, max_r: 7, max_side_total: 4, max_symbols: 1 }
    }
}

const MODALITIES: [Modality; 4] = [Modality::DiamondGeq, Modality::BoxLt, Modality::DiamondEq, Modality::BoxNeq];

/// All count vectors `x ≤ counts` with `Σ x = m`.
fn count_vectors(counts: &[u64], m: u64) -> Vec<Vec<u64>> {
    fn rec(pos: usize, left: u64, counts: &[u64], cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if pos == counts.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rest: u64 = counts[pos + 1..].iter().sum();
        let lo = left.saturating_sub(rest);
        for v in lo..=counts[pos].min(left) {
            cur[pos] = v;
            rec(pos + 1, left - v, counts, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    if m <= counts.iter().sum() {
        rec(0, m, counts, &mut vec![0; counts.len()], &mut out);
    }
    out
}

/// One alternative for one model in a modal move.
#[derive(Debug, Clone)]
struct Choice {
    chosen: Vec<u64>,
    chosen_to: Side,
    rest_to: Option<Side>,
}

/// The point-selection alternatives a model on `side` has under `(op, k)`.
fn model_choices(op: Modality, k: u64, side: Side, counts: &[u64], n: u64) -> Vec<Choice> {
    let pick = |m: u64, to: Side, rest: Option<Side>| -> Vec<Choice> {
        if m > n {
            return Vec::new();
        }
        count_vectors(counts, m).into_iter().map(|chosen| Choice { chosen, chosen_to: to, rest_to: rest }).collect()
    };
    let flip = |s: Side| if s == Side::A { Side::B } else { Side::A };
    // Box moves are diamond moves with the roles of A and B exchanged.
    let (diamond, own) = match op {
        Modality::DiamondGeq | Modality::DiamondEq => (op, side),
        Modality::BoxLt => (Modality::DiamondGeq, flip(side)),
        Modality::BoxNeq => (Modality::DiamondEq, flip(side)),
    };
    // `own` is the side the model would occupy in the diamond form; targets
    // are mapped back through the same exchange.
    let back = |s: Side| if own == side { s } else { flip(s) };
    match (diamond, own) {
        (Modality::DiamondGeq, Side::A) => pick(k, back(Side::A), None),
        (Modality::DiamondGeq, Side::B) => pick((n + 1).saturating_sub(k), back(Side::B), None),
        (Modality::DiamondEq, Side::A) => pick(k, back(Side::A), Some(back(Side::B))),
        (Modality::DiamondEq, Side::B) => {
            let mut v = pick(k + 1, back(Side::A), None);
            v.extend(pick((n + 1).saturating_sub(k), back(Side::B), None));
            v
        }
        _ => unreachable!(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrategyNode {
    pub position: GamePosition,
    #[serde(rename = "move")]
    pub mv: GameMove,
    pub children: Vec<StrategyNode>,
}

impl StrategyNode {
    /// The formula read off the strategy tree.
    pub fn formula(&self) -> Formula {
        match &self.mv {
            GameMove::Prop { symbol, positive } => Formula::lit(*symbol, *positive),
            GameMove::OrSplit { .. } => Formula::or(self.children[0].formula(), self.children[1].formula()),
            GameMove::AndSplit { .. } => Formula::and(self.children[0].formula(), self.children[1].formula()),
            GameMove::Modal { op, k, .. } => Formula::modal(*op, *k, self.children[0].formula()),
        }
    }
}

type Key = (u64, u128, u128, bool);

/// Memoized solver for one `(n, t, d)`.
pub struct GameSolver {
    n: u64,
    d: u64,
    symbol_count: usize,
    profiles: Vec<ModelProfile>,
    /// Bit index of (profile, type), if realized.
    point_bit: Vec<Vec<Option<u32>>>,
    points: Vec<PointedProfile>,
    memo: HashMap<Key, bool>,
}

impl GameSolver {
    pub fn new(symbol_count: usize, n: u64, d: u64) -> Result<Self> {
        if symbol_count == 0 || n == 0 || d == 0 {
            return Err(precondition("need |τ| ≥ 1, n ≥ 1 and d ≥ 1"));
        }
        let t = 1usize << symbol_count;
        let profiles = crate::complexity::all_profiles(n, t);
        let mut point_bit = Vec::new();
        let mut points = Vec::new();
        for p in &profiles {
            let mut row = vec![None; t];
            for ty in p.realized() {
                if points.len() >= 128 {
                    return Err(Error::ScaleCap("more than 128 pointed profiles".into()));
                }
                row[ty] = Some(points.len() as u32);
                points.push(PointedProfile::new(p.clone(), ty)?);
            }
            point_bit.push(row);
        }
        Ok(Self { n, d, symbol_count, profiles, point_bit, points, memo: HashMap::new() })
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    fn bit_of(&self, pm: &PointedProfile) -> Result<u32> {
        let pi = self.profiles.iter().position(|p| *p == pm.profile).ok_or_else(|| {
            Error::VocabularyMismatch(format!("profile {:?} is not a size-{} model here", pm.profile.counts(), self.n))
        })?;
        Ok(self.point_bit[pi][pm.point_type].expect("pointed profiles realize their point"))
    }

    fn mask_of(&self, v: &[PointedProfile]) -> Result<u128> {
        v.iter().try_fold(0u128, |acc, pm| Ok(acc | 1u128 << self.bit_of(pm)?))
    }

    fn list_of(&self, mask: u128) -> Vec<PointedProfile> {
        (0..self.points.len()).filter(|b| mask >> b & 1 == 1).map(|b| self.points[b].clone()).collect()
    }

    /// Profile indices present in a mask.
    fn profiles_in(&self, mask: u128) -> Vec<usize> {
        (0..self.profiles.len()).filter(|&p| self.point_bit[p].iter().flatten().any(|&b| mask >> b & 1 == 1)).collect()
    }

    fn types_mask(&self, p: usize, counts: &[u64]) -> u128 {
        counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .fold(0u128, |acc, (ty, _)| acc | 1u128 << self.point_bit[p][ty].expect("chosen types are realized"))
    }

    fn choice_bits(&self, p: usize, c: &Choice) -> (u128, u128) {
        let full = self.profiles[p].counts();
        let chosen = self.types_mask(p, &c.chosen);
        let rest: Vec<u64> = full.iter().zip(&c.chosen).map(|(f, x)| f - x).collect();
        let rest = self.types_mask(p, &rest);
        let mut out = (0u128, 0u128);
        let mut put = |side: Side, bits: u128| match side {
            Side::A => out.0 |= bits,
            Side::B => out.1 |= bits,
        };
        put(c.chosen_to, chosen);
        if let Some(side) = c.rest_to {
            put(side, rest);
        }
        out
    }

    fn legal_grades(&self, op: Modality, r: u64) -> impl Iterator<Item = u64> {
        let d = self.d;
        (0..=d).filter(move |&k| k < r && op.depth(k) <= d)
    }

    /// Per-model alternatives for a modal move; `None` if some model has none.
    fn modal_alternatives(&self, op: Modality, k: u64, a: u128, b: u128) -> Option<Vec<(usize, Side, Vec<Choice>)>> {
        let mut out = Vec::new();
        for (side, mask) in [(Side::A, a), (Side::B, b)] {
            for p in self.profiles_in(mask) {
                let ch = model_choices(op, k, side, self.profiles[p].counts(), self.n);
                if ch.is_empty() {
                    return None;
                }
                out.push((p, side, ch));
            }
        }
        Some(out)
    }

    /// Distinct successor positions of a modal move.
    fn modal_successors(&self, op: Modality, k: u64, a: u128, b: u128) -> Vec<(u128, u128)> {
        let Some(alts) = self.modal_alternatives(op, k, a, b) else {
            return Vec::new();
        };
        let mut acc: HashSet<(u128, u128)> = HashSet::from([(0, 0)]);
        for (p, _, choices) in &alts {
            let bits: HashSet<(u128, u128)> = choices.iter().map(|c| self.choice_bits(*p, c)).collect();
            acc = acc.iter().flat_map(|&(x, y)| bits.iter().map(move |&(u, v)| (x | u, y | v))).collect();
        }
        let mut v: Vec<_> = acc.into_iter().collect();
        v.sort();
        v
    }

    fn literal_holds(&self, bit: usize, symbol: usize, positive: bool) -> bool {
        type_has_positive(self.symbol_count, self.points[bit].point_type, symbol) == positive
    }

    fn prop_wins(&self, a: u128, b: u128, symbol: usize, positive: bool) -> bool {
        (0..self.points.len()).all(|i| {
            (a >> i & 1 == 0 || self.literal_holds(i, symbol, positive))
                && (b >> i & 1 == 0 || !self.literal_holds(i, symbol, positive))
        })
    }

    fn wins(&mut self, r: u64, a: u128, b: u128, modal: bool) -> bool {
        if r == 0 {
            return false;
        }
        let key = (r, a, b, modal);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = self.first_winning(r, a, b, modal).is_some();
        self.memo.insert(key, v);
        v
    }

    /// The first winning move in a fixed order, as an internal descriptor.
    fn first_winning(&mut self, r: u64, a: u128, b: u128, modal: bool) -> Option<InnerMove> {
        if modal {
            for s in 0..self.symbol_count {
                for positive in [true, false] {
                    if self.prop_wins(a, b, s, positive) {
                        return Some(InnerMove::Prop(s, positive));
                    }
                }
            }
        }
        for op in MODALITIES {
            let grades: Vec<u64> = self.legal_grades(op, r).collect();
            for k in grades {
                let next_r = r - op.cost(k);
                for (a2, b2) in self.modal_successors(op, k, a, b) {
                    if self.wins(next_r, a2, b2, true) {
                        return Some(InnerMove::Modal(op, k, a2, b2));
                    }
                }
            }
        }
        if r >= 3 {
            for (split_a, mask) in [(true, a), (false, b)] {
                let mut sub = mask;
                loop {
                    let other = mask & !sub;
                    for r1 in 1..=r - 2 {
                        let r2 = r - 1 - r1;
                        let ok = if split_a {
                            self.wins(r1, sub, b, modal) && self.wins(r2, other, b, modal)
                        } else {
                            self.wins(r1, a, sub, modal) && self.wins(r2, a, other, modal)
                        };
                        if ok {
                            return Some(InnerMove::Split(split_a, sub, other, r1, r2));
                        }
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & mask;
                }
            }
        }
        None
    }

    fn check_position(&self, pos: &GamePosition) -> Result<(u128, u128)> {
        if let Some((n, t)) = pos.shape()? {
            if n != self.n || t != 1 << self.symbol_count {
                return Err(Error::VocabularyMismatch(format!(
                    "position uses n = {n}, t = {t}; solver built for n = {}, t = {}",
                    self.n,
                    1usize << self.symbol_count
                )));
            }
        }
        Ok((self.mask_of(&pos.a)?, self.mask_of(&pos.b)?))
    }

    pub fn solve(&mut self, pos: &GamePosition) -> Result<Winner> {
        let (a, b) = self.check_position(pos)?;
        Ok(if self.wins(pos.r, a, b, pos.modal_move_made) { Winner::S } else { Winner::D })
    }

    /// The S-strategy tree from a winning position, or `None` if D wins.
    pub fn strategy(&mut self, pos: &GamePosition) -> Result<Option<StrategyNode>> {
        let (a, b) = self.check_position(pos)?;
        Ok(self.strategy_inner(pos.r, a, b, pos.modal_move_made))
    }

    fn position(&self, r: u64, a: u128, b: u128, modal: bool) -> GamePosition {
        GamePosition { r, a: self.list_of(a), b: self.list_of(b), modal_move_made: modal }
    }

    fn strategy_inner(&mut self, r: u64, a: u128, b: u128, modal: bool) -> Option<StrategyNode> {
        if !self.wins(r, a, b, modal) {
            return None;
        }
        let position = self.position(r, a, b, modal);
        let found = self.first_winning(r, a, b, modal).expect("winning positions have a winning move");
        let (mv, children) = match found {
            InnerMove::Prop(symbol, positive) => (GameMove::Prop { symbol, positive }, Vec::new()),
            InnerMove::Split(on_a, x, y, r1, r2) => {
                let (left, right) = (self.list_of(x), self.list_of(y));
                let children = if on_a {
                    vec![self.strategy_inner(r1, x, b, modal)?, self.strategy_inner(r2, y, b, modal)?]
                } else {
                    vec![self.strategy_inner(r1, a, x, modal)?, self.strategy_inner(r2, a, y, modal)?]
                };
                let mv = if on_a {
                    GameMove::OrSplit { left, right, r1, r2 }
                } else {
                    GameMove::AndSplit { left, right, r1, r2 }
                };
                (mv, children)
            }
            InnerMove::Modal(op, k, a2, b2) => {
                let selections = self.selections_for(op, k, a, b, (a2, b2)).expect("successor came from a selection");
                let child = self.strategy_inner(r - op.cost(k), a2, b2, true)?;
                (GameMove::Modal { op, k, selections }, vec![child])
            }
        };
        Some(StrategyNode { position, mv, children })
    }

    /// All modal-move selection combinations, one per distinct successor.
    fn modal_moves(&self, op: Modality, k: u64, a: u128, b: u128) -> Vec<(Vec<Selection>, (u128, u128))> {
        let Some(alts) = self.modal_alternatives(op, k, a, b) else {
            return Vec::new();
        };
        let mut partial: Vec<(Vec<Selection>, (u128, u128))> = vec![(Vec::new(), (0, 0))];
        for (p, side, choices) in &alts {
            let mut next = Vec::new();
            let mut seen = HashSet::new();
            for (sels, (x, y)) in &partial {
                for c in choices {
                    let (u, v) = self.choice_bits(*p, c);
                    let bits = (x | u, y | v);
                    if seen.insert(bits) {
                        let mut s = sels.clone();
                        s.push(Selection {
                            from: *side,
                            profile: self.profiles[*p].clone(),
                            chosen: c.chosen.clone(),
                            chosen_to: c.chosen_to,
                            rest_to: c.rest_to,
                        });
                        next.push((s, bits));
                    }
                }
            }
            partial = next;
        }
        partial
    }

    fn selections_for(&self, op: Modality, k: u64, a: u128, b: u128, target: (u128, u128)) -> Option<Vec<Selection>> {
        self.modal_moves(op, k, a, b).into_iter().find(|(_, bits)| *bits == target).map(|(s, _)| s)
    }

    pub fn legal_moves(&self, pos: &GamePosition) -> Result<Vec<GameMove>> {
        if pos.r == 0 {
            return Err(precondition("no moves at r = 0"));
        }
        let (a, b) = self.check_position(pos)?;
        let mut out = Vec::new();
        if pos.modal_move_made {
            for symbol in 0..self.symbol_count {
                for positive in [true, false] {
                    out.push(GameMove::Prop { symbol, positive });
                }
            }
        }
        if pos.r >= 3 {
            for (on_a, mask) in [(true, a), (false, b)] {
                let mut sub = mask;
                loop {
                    for r1 in 1..=pos.r - 2 {
                        let (left, right) = (self.list_of(sub), self.list_of(mask & !sub));
                        let r2 = pos.r - 1 - r1;
                        out.push(if on_a {
                            GameMove::OrSplit { left, right, r1, r2 }
                        } else {
                            GameMove::AndSplit { left, right, r1, r2 }
                        });
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & mask;
                }
            }
        }
        for op in MODALITIES {
            for k in self.legal_grades(op, pos.r) {
                for (selections, _) in self.modal_moves(op, k, a, b) {
                    out.push(GameMove::Modal { op, k, selections });
                }
            }
        }
        Ok(out)
    }

    pub fn apply_move(&self, pos: &GamePosition, mv: &GameMove) -> Result<MoveOutcome> {
        if !self.legal_moves(pos)?.contains(mv) {
            return Err(Error::IllegalMove(format!("{mv:?} is not legal here")));
        }
        let (a, b) = self.check_position(pos)?;
        let m = pos.modal_move_made;
        Ok(match mv {
            GameMove::Prop { symbol, positive } => {
                MoveOutcome::Terminal(if self.prop_wins(a, b, *symbol, *positive) { Winner::S } else { Winner::D })
            }
            GameMove::OrSplit { left, right, r1, r2 } => MoveOutcome::DChoice(
                self.position(*r1, self.mask_of(left)?, b, m),
                self.position(*r2, self.mask_of(right)?, b, m),
            ),
            GameMove::AndSplit { left, right, r1, r2 } => MoveOutcome::DChoice(
                self.position(*r1, a, self.mask_of(left)?, m),
                self.position(*r2, a, self.mask_of(right)?, m),
            ),
            GameMove::Modal { op, k, selections } => {
                let (mut a2, mut b2) = (0u128, 0u128);
                for s in selections {
                    let p = self.profiles.iter().position(|q| *q == s.profile).expect("legal move");
                    let c = Choice { chosen: s.chosen.clone(), chosen_to: s.chosen_to, rest_to: s.rest_to };
                    let (u, v) = self.choice_bits(p, &c);
                    a2 |= u;
                    b2 |= v;
                }
                MoveOutcome::Next(self.position(pos.r - op.cost(*k), a2, b2, true))
            }
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum InnerMove {
    Prop(usize, bool),
    Split(bool, u128, u128, u64, u64),
    Modal(Modality, u64, u128, u128),
}

fn check_caps(pos: &GamePosition, symbol_count: usize, caps: GameCaps) -> Result<()> {
    let n = pos.a.iter().chain(&pos.b).map(|pm| pm.profile.n()).next().unwrap_or(1);
    if symbol_count > caps.max_symbols
        || n > caps.max_n
        || pos.r > caps.max_r
        || pos.a.len() + pos.b.len() > caps.max_side_total
    {
        return Err(Error::ScaleCap(format!(
            "game solving limited to |τ| ≤ {}, n ≤ {}, r ≤ {}, |A|+|B| ≤ {}",
            caps.max_symbols, caps.max_n, caps.max_r, caps.max_side_total
        )));
    }
    Ok(())
}

fn solver_for(pos: &GamePosition, d: u64) -> Result<GameSolver> {
    let (n, t) = pos.shape()?.ok_or_else(|| precondition("position has no models"))?;
    GameSolver::new(t.trailing_zeros() as usize, n, d)
}

pub fn legal_moves(pos: &GamePosition, d: u64) -> Result<Vec<GameMove>> {
    solver_for(pos, d)?.legal_moves(pos)
}

pub fn apply_move(pos: &GamePosition, mv: &GameMove, d: u64) -> Result<MoveOutcome> {
    solver_for(pos, d)?.apply_move(pos, mv)
}

pub fn solve(pos: &GamePosition, d: u64) -> Result<Winner> {
    solve_with(pos, d, GameCaps::default())
}

pub fn solve_with(pos: &GamePosition, d: u64, caps: GameCaps) -> Result<Winner> {
    let mut solver = solver_for(pos, d)?;
    check_caps(pos, solver.symbol_count, caps)?;
    solver.solve(pos)
}

pub fn trace(pos: &GamePosition, d: u64, caps: GameCaps) -> Result<Option<StrategyNode>> {
    let mut solver = solver_for(pos, d)?;
    check_caps(pos, solver.symbol_count, caps)?;
    solver.strategy(pos)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceCheck {
    pub position: GamePosition,
    pub d: u64,
    pub winner: Winner,
    /// Least size of a separating formula, if one of size ≤ r exists.
    pub separating_size: Option<u64>,
    pub separating_formula: Option<String>,
    pub agree: bool,
}

fn distinct_profiles(v: &[PointedProfile]) -> Vec<ModelProfile> {
    v.iter().map(|pm| pm.profile.clone()).collect::<BTreeSet<_>>().into_iter().collect()
}

fn equivalence_with(
    solver: &mut GameSolver,
    search: &mut FormulaSearch,
    pos: &GamePosition,
    vocab: Option<&Vocabulary>,
) -> Result<EquivalenceCheck> {
    let winner = solver.solve(pos)?;
    let hit = search.separating(&distinct_profiles(&pos.a), &distinct_profiles(&pos.b), pos.r)?;
    let agree = (winner == Winner::S) == hit.is_some();
    Ok(EquivalenceCheck {
        position: pos.clone(),
        d: solver.d,
        winner,
        separating_size: hit.as_ref().map(|h| h.size),
        separating_formula: hit.map(|h| match vocab {
            Some(v) => h.formula.to_text(v),
            None => format!("{:?}", h.formula),
        }),
        agree,
    })
}

/// Solves the game and independently searches for a separating formula of
/// size at most `r`; the two must agree.
pub fn check_game_formula_equivalence(
    r: u64,
    a: Vec<PointedProfile>,
    b: Vec<PointedProfile>,
    d: u64,
    vocab: &Vocabulary,
    caps: GameCaps,
) -> Result<EquivalenceCheck> {
    let pos = GamePosition::new(r, a, b)?;
    let mut solver = solver_for(&pos, d)?;
    check_caps(&pos, solver.symbol_count, caps)?;
    let search_caps = SearchCaps { max_symbols: caps.max_symbols, max_n: caps.max_n, max_d: d.max(1) };
    let mut search = FormulaSearch::new(solver.symbol_count, solver.n, d, search_caps)?;
    equivalence_with(&mut solver, &mut search, &pos, Some(vocab))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceGrid {
    pub instances: usize,
    pub s_wins: usize,
    pub disagreements: Vec<EquivalenceCheck>,
}

/// Every position with `|τ| = 1`, `n ≤ max_n`, `d ≤ max_d`, `r ≤ max_r` and
/// at most `max_side` pointed profiles per side.
pub fn equivalence_grid(max_n: u64, max_d: u64, max_r: u64, max_side: usize) -> Result<EquivalenceGrid> {
    let mut grid = EquivalenceGrid { instances: 0, s_wins: 0, disagreements: Vec::new() };
    for n in 1..=max_n {
        for d in 1..=max_d {
            let mut solver = GameSolver::new(1, n, d)?;
            let caps = SearchCaps { max_symbols: 1, max_n: n, max_d: d };
            let mut search = FormulaSearch::new(1, n, d, caps)?;
            let sides = subsets_up_to(&solver.points, max_side);
            for a in &sides {
                for b in &sides {
                    for r in 0..=max_r {
                        let pos = GamePosition { r, a: a.clone(), b: b.clone(), modal_move_made: false };
                        let check = equivalence_with(&mut solver, &mut search, &pos, None)?;
                        grid.instances += 1;
                        if check.winner == Winner::S {
                            grid.s_wins += 1;
                        }
                        if !check.agree {
                            grid.disagreements.push(check);
                        }
                    }
                }
            }
        }
    }
    Ok(grid)
}

fn subsets_up_to(items: &[PointedProfile], max: usize) -> Vec<Vec<PointedProfile>> {
    let mut out = vec![Vec::new()];
    for size in 1..=max {
        let mut idx: Vec<usize> = (0..size).collect();
        if size > items.len() {
            break;
        }
        loop {
            out.push(idx.iter().map(|&i| items[i].clone()).collect());
            let mut i = size;
            while i > 0 && idx[i - 1] == items.len() - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}
