use gmlu::logic::{
    evaluate, evaluate_pointed, parse_formula, Formula, Modality, ModelProfile, PointedProfile, Vocabulary,
};
use proptest::prelude::*;

/// A model as an explicit list of point types.
type Labeled = Vec<usize>;

fn bit(symbols: usize, ty: usize, s: usize) -> bool {
    (ty >> (symbols - 1 - s)) & 1 == 1
}

/// Direct evaluation at one point of a labeled model.
fn eval_at(f: &Formula, model: &Labeled, point: usize, symbols: usize) -> bool {
    match f {
        Formula::Lit { symbol, positive } => bit(symbols, model[point], *symbol) == *positive,
        Formula::And(a, b) => eval_at(a, model, point, symbols) && eval_at(b, model, point, symbols),
        Formula::Or(a, b) => eval_at(a, model, point, symbols) || eval_at(b, model, point, symbols),
        Formula::Modal { op, grade, body } => {
            let sat = (0..model.len()).filter(|&w| eval_at(body, model, w, symbols)).count() as u64;
            let fail = model.len() as u64 - sat;
            match op {
                Modality::DiamondGeq => sat >= *grade,
                Modality::BoxLt => fail < *grade,
                Modality::DiamondEq => sat == *grade,
                Modality::BoxNeq => fail != *grade,
            }
        }
    }
}

fn profile_of(model: &Labeled, symbols: usize) -> ModelProfile {
    let mut counts = vec![0u64; 1 << symbols];
    for &ty in model {
        counts[ty] += 1;
    }
    ModelProfile::new(counts).unwrap()
}

fn arb_modality() -> impl Strategy<Value = Modality> {
    prop_oneof![Just(Modality::DiamondGeq), Just(Modality::BoxLt), Just(Modality::DiamondEq), Just(Modality::BoxNeq)]
}

fn arb_open(symbols: usize) -> impl Strategy<Value = Formula> {
    let leaf = (0..symbols, any::<bool>()).prop_map(|(s, p)| Formula::lit(s, p));
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (arb_modality(), 0u64..5, inner).prop_map(|(op, k, body)| Formula::modal(op, k, body)),
        ]
    })
}

/// Formulas whose literals all sit under a modality.
fn arb_closed(symbols: usize) -> impl Strategy<Value = Formula> {
    let modal = (arb_modality(), 0u64..5, arb_open(symbols)).prop_map(|(op, k, b)| Formula::modal(op, k, b));
    modal.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::or(a, b)),
        ]
    })
}

fn arb_model(symbols: usize) -> impl Strategy<Value = Labeled> {
    prop::collection::vec(0..(1usize << symbols), 1..7)
}

fn vocab(symbols: usize) -> Vocabulary {
    Vocabulary::new(&["p", "q", "r"][..symbols]).unwrap()
}

proptest! {
    #[test]
    fn profile_evaluation_matches_labeled_models(f in arb_closed(2), model in arb_model(2)) {
        let expected = (0..model.len()).all(|w| eval_at(&f, &model, w, 2));
        prop_assert_eq!(evaluate(&profile_of(&model, 2), &f).unwrap(), expected);
    }

    #[test]
    fn pointed_evaluation_matches_labeled_models(f in arb_open(2), model in arb_model(2), idx in any::<prop::sample::Index>()) {
        let point = idx.index(model.len());
        let pm = PointedProfile::new(profile_of(&model, 2), model[point]).unwrap();
        prop_assert_eq!(evaluate_pointed(&pm, &f).unwrap(), eval_at(&f, &model, point, 2));
    }

    #[test]
    fn closed_formulas_ignore_the_point(f in arb_closed(2), model in arb_model(2)) {
        let first = eval_at(&f, &model, 0, 2);
        prop_assert!((0..model.len()).all(|w| eval_at(&f, &model, w, 2) == first));
    }

    #[test]
    fn negation_is_complement(f in arb_open(2), model in arb_model(2)) {
        let g = f.negate();
        for w in 0..model.len() {
            prop_assert_ne!(eval_at(&f, &model, w, 2), eval_at(&g, &model, w, 2));
        }
        prop_assert_eq!(g.negate(), f.clone());
        prop_assert_eq!(g.size(), f.size());
        prop_assert_eq!(g.counting_depth(), f.counting_depth());
    }

    #[test]
    fn text_round_trips(f in arb_closed(3)) {
        let v = vocab(3);
        let text = f.to_text(&v);
        let back = parse_formula(&text, &v).unwrap();
        prop_assert_eq!(back.to_text(&v), text);
        prop_assert_eq!(back.size(), f.size());
        for model in [vec![0, 3, 5], vec![7], vec![1, 1, 2, 6]] {
            let p = profile_of(&model, 3);
            prop_assert_eq!(evaluate(&p, &back).unwrap(), evaluate(&p, &f).unwrap());
        }
    }
}

#[test]
fn every_point_satisfies_p_example() {
    let v = vocab(1);
    let f = parse_formula("[]<1 p", &v).unwrap();
    assert_eq!(f.size(), 2);
    let g = parse_formula("<>==0 !p", &v).unwrap();
    assert_eq!(g.size(), 2);
    for model in [vec![1, 1, 1], vec![1], vec![0, 1]] {
        let expected = model.iter().all(|&t| t == 1);
        assert_eq!(evaluate(&profile_of(&model, 1), &g).unwrap(), expected);
    }
}
