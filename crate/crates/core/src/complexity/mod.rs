//! Description complexity of `≡_d` classes: canonical defining formulas,
//! closed-form bounds, cover graphs and an exhaustive formula search.

mod search;

use serde::Serialize;

use crate::classes::AdmissibleTuple;
use crate::error::{Error, Result};
use crate::logic::{type_has_positive, Formula, Vocabulary};

pub use search::{all_profiles, FormulaSearch, SearchCaps, SearchHit};

/// `c_τ = t(2|τ|+1) − 1`.
pub fn c_tau(symbol_count: usize) -> u64 {
    let t = 1u64 << symbol_count;
    t * (2 * symbol_count as u64 + 1) - 1
}

fn symbol_count_of(tuple: &AdmissibleTuple) -> usize {
    tuple.type_count().trailing_zeros() as usize
}

/// `ψ(π)`: the conjunction of the type's literals in symbol order.
pub fn type_formula(ty: usize, symbol_count: usize) -> Formula {
    Formula::conjunction((0..symbol_count).map(|s| Formula::lit(s, type_has_positive(symbol_count, ty, s))))
        .expect("at least one symbol")
}

/// `φ(n̄)` when at least two entries equal `d`, otherwise the shorter `φ′(n̄)`
/// that leaves the max type implicit.
pub fn canonical_formula(tuple: &AdmissibleTuple) -> Formula {
    let sc = symbol_count_of(tuple);
    let d = tuple.d();
    let e = tuple.entries();
    let conjuncts: Vec<Formula> = if tuple.k_d() >= 2 {
        (0..e.len())
            .map(|i| {
                if e[i] < d {
                    Formula::diamond_eq(e[i], type_formula(i, sc))
                } else {
                    Formula::diamond_geq(d, type_formula(i, sc))
                }
            })
            .collect()
    } else {
        let j = tuple.max_index();
        (0..e.len()).filter(|&i| i != j).map(|i| Formula::diamond_eq(e[i], type_formula(i, sc))).collect()
    };
    Formula::conjunction(conjuncts).expect("t ≥ 2 leaves at least one conjunct")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UpperBound {
    /// Size of the canonical formula.
    pub size: u64,
    /// The printed closed form for that size.
    pub closed_form: u64,
    pub closed_form_matches: bool,
}

pub fn upper_bound(tuple: &AdmissibleTuple) -> UpperBound {
    let size = canonical_formula(tuple).size();
    let sc = symbol_count_of(tuple) as u64;
    let t = tuple.type_count() as u64;
    let closed_form = if tuple.k_d() >= 2 {
        tuple.sum() + t * (2 * sc + 1) - tuple.k_d() as u64 - 1
    } else {
        let pj = tuple.determined_count(tuple.max_index()).expect("k_d ≤ 1 fixes the max type");
        tuple.n() - pj + (t - 1) * (2 * sc + 1) - 2
    };
    UpperBound { size, closed_form, closed_form_matches: size == closed_form }
}

/// `Σ n_i` when at least two entries equal `d`, else `n − |π_j|`.
pub fn lower_bound(tuple: &AdmissibleTuple) -> u64 {
    if tuple.k_d() >= 2 {
        tuple.sum()
    } else {
        let j = tuple.max_index();
        tuple.n() - tuple.determined_count(j).expect("k_d ≤ 1 fixes the max type")
    }
}

/// The initial-position graph of the game on `𝔐_0` versus the perturbed
/// models `𝔐_{i→j}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverGraph {
    pub tuple: AdmissibleTuple,
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    /// The designated max-type index.
    pub max_index: usize,
}

impl CoverGraph {
    pub fn is_cover(&self, cover: &[usize]) -> bool {
        let e = self.tuple.entries();
        let d = self.tuple.d();
        self.edges.iter().all(|&(i, j)| cover.contains(&i) || (cover.contains(&j) && e[j] < d))
    }

    pub fn cost(&self, cover: &[usize]) -> u64 {
        cover.iter().map(|&i| self.tuple.entries()[i]).sum()
    }
}

pub fn build_cover_graph(tuple: &AdmissibleTuple) -> CoverGraph {
    let supp = tuple.support();
    let jhat = tuple.max_index();
    let e = tuple.entries();
    let mut edges = Vec::new();
    for &i in &supp {
        for &j in &supp {
            if i == j {
                continue;
            }
            if i != jhat || e[j] == tuple.d() {
                edges.push((i, j));
            }
        }
    }
    CoverGraph { tuple: tuple.clone(), vertices: supp, edges, max_index: jhat }
}

pub const DEFAULT_MAX_COVER_SUPPORT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinCover {
    pub cover: Vec<usize>,
    pub cost: u64,
}

/// Exhaustive minimum-cost cover; ties resolved toward the lexicographically
/// first subset mask.
pub fn min_cover(graph: &CoverGraph, max_support: usize) -> Result<MinCover> {
    let v = &graph.vertices;
    if v.len() > max_support {
        return Err(Error::ScaleCap(format!("support of size {} exceeds the cover search cap {max_support}", v.len())));
    }
    let mut best: Option<MinCover> = None;
    for mask in 0u64..(1u64 << v.len()) {
        let cover: Vec<usize> = (0..v.len()).filter(|b| mask >> b & 1 == 1).map(|b| v[b]).collect();
        if !graph.is_cover(&cover) {
            continue;
        }
        let cost = graph.cost(&cover);
        if best.as_ref().is_none_or(|b| cost < b.cost) {
            best = Some(MinCover { cover, cost });
        }
    }
    Ok(best.expect("the full support is always a cover"))
}

pub fn min_cover_cost(graph: &CoverGraph) -> Result<u64> {
    min_cover(graph, DEFAULT_MAX_COVER_SUPPORT).map(|c| c.cost)
}

/// Least size of a formula defining the class, or `None` above `max_size`.
pub fn exact_complexity(tuple: &AdmissibleTuple, max_size: u64) -> Result<Option<u64>> {
    exact_complexity_with(tuple, max_size, SearchCaps::default())
}

pub fn exact_complexity_with(tuple: &AdmissibleTuple, max_size: u64, caps: SearchCaps) -> Result<Option<u64>> {
    let mut search = FormulaSearch::new(symbol_count_of(tuple), tuple.n(), tuple.d(), caps)?;
    Ok(search.defining(tuple, max_size)?.map(|h| h.size))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub tuple: AdmissibleTuple,
    pub lower: u64,
    pub upper: u64,
    pub upper_closed_form: u64,
    pub closed_form_matches: bool,
    pub exact: Option<u64>,
    pub exact_witness: Option<String>,
    pub cover_cost: u64,
    pub min_cover: Vec<usize>,
    pub canonical_formula_text: String,
}

/// Bounds and cover cost for one class; `exact` runs the search when given
/// a size budget.
pub fn complexity_report(
    tuple: &AdmissibleTuple,
    vocab: &Vocabulary,
    exact: Option<(u64, SearchCaps)>,
    max_support: usize,
) -> Result<ComplexityReport> {
    if vocab.type_count() != tuple.type_count() {
        return Err(Error::VocabularyMismatch(format!(
            "tuple has {} entries but the vocabulary has {} types",
            tuple.type_count(),
            vocab.type_count()
        )));
    }
    let ub = upper_bound(tuple);
    let cover = min_cover(&build_cover_graph(tuple), max_support)?;
    let (exact, exact_witness) = match exact {
        Some((max_size, caps)) => {
            let mut search = FormulaSearch::new(vocab.len(), tuple.n(), tuple.d(), caps)?;
            match search.defining(tuple, max_size)? {
                Some(hit) => (Some(hit.size), Some(hit.formula.to_text(vocab))),
                None => (None, None),
            }
        }
        None => (None, None),
    };
    Ok(ComplexityReport {
        tuple: tuple.clone(),
        lower: lower_bound(tuple),
        upper: ub.size,
        upper_closed_form: ub.closed_form,
        closed_form_matches: ub.closed_form_matches,
        exact,
        exact_witness,
        cover_cost: cover.cost,
        min_cover: cover.cover,
        canonical_formula_text: canonical_formula(tuple).to_text(vocab),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn tup(e: &[u64], n: u64, d: u64) -> AdmissibleTuple {
        AdmissibleTuple::new(e.to_vec(), n, d).unwrap()
    }

    fn vp() -> Vocabulary {
        Vocabulary::new(&["p"]).unwrap()
    }

    #[test]
    fn canonical_examples() {
        let v = vp();
        let f = canonical_formula(&tup(&[0, 1], 3, 1));
        assert_eq!(f, parse_formula("<>==0 !p", &v).unwrap());
        assert_eq!(f.size(), 2);
        let f = canonical_formula(&tup(&[1, 1], 3, 1));
        assert_eq!(f, parse_formula("<>=1 !p & <>=1 p", &v).unwrap());
        assert_eq!(f.size(), 5);
        assert_eq!(canonical_formula(&tup(&[2, 2], 5, 2)).size(), 7);
    }

    #[test]
    fn bounds_examples() {
        let u = upper_bound(&tup(&[1, 1], 3, 1));
        assert_eq!((u.size, u.closed_form, u.closed_form_matches), (5, 5, true));
        let u = upper_bound(&tup(&[0, 1], 3, 1));
        assert_eq!(u.size, 2);
        assert!(!u.closed_form_matches);
        let u = upper_bound(&tup(&[3, 3, 3, 3], 20, 3));
        assert_eq!(u.size, 12 + 20 - 4 - 1);
        assert!(u.closed_form_matches);

        assert_eq!(lower_bound(&tup(&[2, 2], 5, 2)), 4);
        assert_eq!(lower_bound(&tup(&[0, 1], 3, 1)), 0);
        assert_eq!(lower_bound(&tup(&[1, 3], 10, 3)), 1);
    }

    #[test]
    fn cover_examples() {
        let g = build_cover_graph(&tup(&[2, 2], 5, 2));
        assert_eq!(g.edges, vec![(0, 1), (1, 0)]);
        assert_eq!(min_cover_cost(&g).unwrap(), 4);

        let g = build_cover_graph(&tup(&[1, 0], 1, 1));
        assert!(g.edges.is_empty());
        assert_eq!(min_cover_cost(&g).unwrap(), 0);

        let g = build_cover_graph(&tup(&[1, 3, 3, 0], 12, 3));
        assert_eq!(min_cover_cost(&g).unwrap(), 7);
    }

    #[test]
    fn c_tau_values() {
        assert_eq!(c_tau(1), 5);
        assert_eq!(c_tau(2), 19);
    }

    #[test]
    fn all_p_class_has_complexity_two() {
        for n in 2..=4 {
            assert_eq!(exact_complexity(&tup(&[0, 1], n, 1), 6).unwrap(), Some(2));
        }
        assert_eq!(exact_complexity(&tup(&[0, 1], 3, 1), 1).unwrap(), None);
    }
}
