use gmlu::distribution::{
    build_distribution, dominating_class_sweep, empirical_frequencies, estimate_separation_probability,
    exact_separation_probability, majority_report, sample_profiles, verify_monotone_connection, DRule, MajorityClause,
    MonotoneMode,
};
use gmlu::logic::Vocabulary;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

fn vocab(symbols: usize) -> Vocabulary {
    Vocabulary::new(&["p", "q"][..symbols]).unwrap()
}

fn choose(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Probability that a uniform `n`-point model over one symbol has at least
/// `d` points of each type.
fn both_at_least(n: u64, d: u64) -> BigRational {
    let hits: BigUint = (d..=n.saturating_sub(d)).map(|k| choose(n, k)).sum();
    BigRational::new(BigInt::from(hits), BigInt::from(BigUint::one() << n as usize))
}

#[test]
fn probabilities_are_normalized() {
    for symbols in 1..=2 {
        let v = vocab(symbols);
        for n in 1..=10 {
            for d in 1..=n {
                assert_eq!(build_distribution(n, d, &v).unwrap().probability_sum(), BigRational::one());
            }
        }
    }
}

#[test]
fn single_class_and_isomorphism_class_entropies() {
    let v = vocab(1);
    // With d > n every class is an isomorphism class.
    let dist = build_distribution(6, 7, &v).unwrap();
    let expected: f64 = (0..=6u64)
        .map(|k| {
            let c = choose(6, k).to_f64().unwrap();
            c / 64.0 * c.log2()
        })
        .sum();
    assert!((dist.boltzmann_entropy() - expected).abs() < 1e-12);

    let v2 = vocab(2);
    let dist = build_distribution(40, 1, &v2).unwrap();
    let full = dist.entry(&[1, 1, 1, 1]).unwrap();
    assert!(full.probability_f64(40, 2) > 0.999);
}

#[test]
fn sweep_matches_binomial_sums() {
    let v = vocab(1);
    let ns = [16, 36, 64, 144, 256];
    let rows = dominating_class_sweep(DRule::SqrtBelow(2.0), &v, &ns).unwrap();
    for row in &rows {
        let root = (row.n as f64).sqrt() as u64;
        let d = (row.n / 2).saturating_sub(2 * root).max(1);
        assert_eq!(row.d, d);
        assert_eq!(row.candidate_probability, both_at_least(row.n, d));
    }
    let rows = dominating_class_sweep(DRule::CeilShare, &v, &[256]).unwrap();
    let central = BigRational::new(BigInt::from(choose(256, 128)), BigInt::from(BigUint::one() << 256usize));
    assert_eq!(rows[0].max_probability, central);

    let rows = dominating_class_sweep(DRule::Constant(1), &v, &[4, 8, 16, 32]).unwrap();
    assert!(rows.windows(2).all(|w| w[0].candidate_probability < w[1].candidate_probability));
}

#[test]
fn majority_examples() {
    let v = vocab(1);
    let r = majority_report(64, 1, &v).unwrap();
    assert_eq!(r.clause, MajorityClause::Majority);
    assert!(r.has_majority && r.consistent_with_clause);
    let r = majority_report(64, 32, &v).unwrap();
    assert_eq!(r.clause, MajorityClause::NoMajority);
    assert!(!r.has_majority && r.consistent_with_clause);
    let central = choose(64, 32).to_f64().unwrap() / 2f64.powi(64);
    assert!((r.max_probability - central).abs() < 1e-15);
}

#[test]
fn sampled_frequencies_track_exact_probabilities() {
    let v = vocab(1);
    let (n, d, count) = (10, 3, 100_000);
    let samples = sample_profiles(n, &v, count, 2024).unwrap();
    let freq = empirical_frequencies(&samples, d).unwrap();
    for e in &build_distribution(n, d, &v).unwrap().entries {
        let p = e.probability_f64(n, 1);
        let se = (p * (1.0 - p) / count as f64).sqrt();
        let observed = *freq.get(e.tuple.entries()).unwrap_or(&0) as f64 / count as f64;
        assert!((observed - p).abs() <= 4.0 * se + 1e-12, "{}: {observed} vs {p}", e.tuple);
    }
    let mean = samples.iter().map(|s| s.count(1)).sum::<u64>() as f64 / count as f64;
    // σ of a single count is √(n/4); the mean's standard error divides by √count.
    assert!((mean - 5.0).abs() < 3.0 * (2.5f64).sqrt() / (count as f64).sqrt());

    let big = sample_profiles(100, &v, 1000, 7).unwrap();
    let mean = big.iter().map(|s| s.count(1)).sum::<u64>() as f64 / 1000.0;
    assert!((mean - 50.0).abs() < 3.0 * 5.0 / (1000f64).sqrt());
}

#[test]
fn separation_estimate_tracks_collision_probability() {
    let v = vocab(1);
    // d ≥ n: tuples are the raw counts.
    let exact = exact_separation_probability(5, 5, &v).unwrap();
    let collide: BigUint = (0..=5u64).map(|k| choose(5, k).pow(2)).sum();
    let expected = BigRational::one() - BigRational::new(BigInt::from(collide), BigInt::from(1024u32));
    assert_eq!(exact, expected);

    let est = estimate_separation_probability(5, 5, &v, 40_000, 11).unwrap();
    let p = exact.to_f64().unwrap();
    let se = (p * (1.0 - p) / 40_000.0).sqrt();
    assert!((est.probability - p).abs() < 4.0 * se);

    let far = estimate_separation_probability(400, 1, &v, 2000, 5).unwrap();
    assert_eq!(far.separated, 0);
    assert!(exact_separation_probability(400, 1, &v).unwrap() > BigRational::zero());
}

#[test]
fn bounds_mode_passes_at_moderate_size() {
    let r = verify_monotone_connection(40, 8, &vocab(1), MonotoneMode::Bounds).unwrap();
    assert!(r.comparable_pairs > 0 && r.all_pass);
    let r = verify_monotone_connection(64, 2, &vocab(1), MonotoneMode::Bounds).unwrap();
    assert_eq!(r.comparable_pairs, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropies_sum_to_model_bits(n in 1u64..30, d in 1u64..8, symbols in 1usize..3) {
        let v = vocab(symbols);
        let dist = build_distribution(n, d, &v).unwrap();
        let sum = dist.shannon_entropy() + dist.boltzmann_entropy();
        prop_assert!((sum - (symbols as u64 * n) as f64).abs() < 1e-9);
    }

    #[test]
    fn sampling_is_reproducible(seed in any::<u64>(), n in 1u64..20) {
        let v = vocab(2);
        let a = sample_profiles(n, &v, 5, seed).unwrap();
        prop_assert_eq!(&a, &sample_profiles(n, &v, 5, seed).unwrap());
        prop_assert!(a.iter().all(|p| p.n() == n));
    }
}
