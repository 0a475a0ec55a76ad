//! The class distribution of `≡_d`, its entropies, and the phase-transition
//! experiments built on it.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classes::{class_size, enumerate_admissible, total_models, tuple_of_profile, AdmissibleTuple};
use crate::combinatorics::{log2_big, scaled_to_f64};
use crate::complexity::{c_tau, lower_bound, upper_bound, FormulaSearch, SearchCaps};
use crate::error::{precondition, Error, Result};
use crate::logic::{ModelProfile, Vocabulary};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassEntry {
    pub tuple: AdmissibleTuple,
    #[serde(serialize_with = "crate::serde_util::big")]
    pub size: BigUint,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub probability: BigRational,
}

impl ClassEntry {
    /// Probability as a float, exact up to rounding even for huge `n`.
    pub fn probability_f64(&self, n: u64, symbol_count: usize) -> f64 {
        scaled_to_f64(&self.size, n * symbol_count as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassDistribution {
    pub n: u64,
    pub d: u64,
    pub vocabulary: Vocabulary,
    pub entries: Vec<ClassEntry>,
}

fn big_ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

pub fn build_distribution(n: u64, d: u64, vocab: &Vocabulary) -> Result<ClassDistribution> {
    let total = total_models(n, vocab.type_count());
    let entries = enumerate_admissible(n, d, vocab)?
        .into_iter()
        .map(|tuple| {
            let size = class_size(&tuple);
            let probability = big_ratio(&size, &total);
            ClassEntry { tuple, size, probability }
        })
        .collect();
    Ok(ClassDistribution { n, d, vocabulary: vocab.clone(), entries })
}

impl ClassDistribution {
    pub fn total(&self) -> BigUint {
        total_models(self.n, self.vocabulary.type_count())
    }

    pub fn probability_sum(&self) -> BigRational {
        self.entries.iter().fold(BigRational::zero(), |acc, e| acc + &e.probability)
    }

    pub fn probabilities_f64(&self) -> Vec<f64> {
        let sc = self.vocabulary.len();
        self.entries.iter().map(|e| e.probability_f64(self.n, sc)).collect()
    }

    /// `Σ p · log₂|M|`.
    pub fn boltzmann_entropy(&self) -> f64 {
        self.entries.iter().zip(self.probabilities_f64()).map(|(e, p)| p * log2_big(&e.size)).sum()
    }

    /// `−Σ p · log₂ p`.
    pub fn shannon_entropy(&self) -> f64 {
        self.probabilities_f64().into_iter().filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum()
    }

    /// The class of largest size; lowest tuple on ties.
    pub fn max_entry(&self) -> &ClassEntry {
        let mut best = &self.entries[0];
        for e in &self.entries[1..] {
            if e.size > best.size {
                best = e;
            }
        }
        best
    }

    pub fn entry(&self, entries: &[u64]) -> Option<&ClassEntry> {
        self.entries.iter().find(|e| e.tuple.entries() == entries)
    }

    /// Class sizes in ascending order: equal for two depths exactly when
    /// the partitions have the same shape.
    pub fn sorted_sizes(&self) -> Vec<BigUint> {
        let mut v: Vec<BigUint> = self.entries.iter().map(|e| e.size.clone()).collect();
        v.sort();
        v
    }

    /// Probability that two independent uniform models fall in different
    /// classes: `1 − Σ p²`.
    pub fn separation_probability(&self) -> BigRational {
        let collide = self.entries.iter().fold(BigRational::zero(), |acc, e| acc + &e.probability * &e.probability);
        BigRational::one() - collide
    }

    /// One CSV row per class, in the column order of [`CSV_HEADER`].
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.entries
            .iter()
            .zip(self.probabilities_f64())
            .map(|(e, p)| {
                vec![
                    self.n.to_string(),
                    self.d.to_string(),
                    e.tuple.to_string(),
                    e.size.to_string(),
                    format_sig(p),
                    format_sig(p * log2_big(&e.size)),
                ]
            })
            .collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let io = |e: csv::Error| Error::Domain(format!("csv output failed: {e}"));
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER).map_err(io)?;
        for row in self.csv_rows() {
            out.write_record(&row).map_err(io)?;
        }
        out.flush().map_err(|e| Error::Domain(format!("csv output failed: {e}")))?;
        Ok(())
    }
}

pub const CSV_HEADER: [&str; 6] = ["n", "d", "tuple", "size", "probability", "H_B_contrib"];

/// Rounds to six significant digits.
pub fn sig6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.5e}").parse().expect("formatted float parses")
}

pub fn format_sig(x: f64) -> String {
    sig6(x).to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyRow {
    pub d: u64,
    pub classes: usize,
    pub h_s: f64,
    pub h_b: f64,
    pub sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyTable {
    pub n: u64,
    pub symbol_count: usize,
    pub rows: Vec<EntropyRow>,
    /// `⌈n/2⌉`, where the partition is expected to stop changing.
    pub asserted_pivot: u64,
    /// Smallest `d` from which every larger depth gives the same partition.
    pub observed_pivot: u64,
    /// `H_S` strictly increases and `H_B` strictly decreases for `d < pivot`.
    pub strictly_monotone_below_pivot: bool,
    /// Identical class-size multisets for every `d ≥ asserted_pivot`.
    pub constant_from_pivot: bool,
}

pub fn entropy_vs_depth(n: u64, vocab: &Vocabulary) -> Result<EntropyTable> {
    if n == 0 {
        return Err(precondition("domain size must be at least 1"));
    }
    let dists: Vec<ClassDistribution> = (1..=n).map(|d| build_distribution(n, d, vocab)).collect::<Result<_>>()?;
    let rows: Vec<EntropyRow> = dists
        .iter()
        .map(|dist| {
            let (h_s, h_b) = (dist.shannon_entropy(), dist.boltzmann_entropy());
            EntropyRow { d: dist.d, classes: dist.entries.len(), h_s, h_b, sum: h_s + h_b }
        })
        .collect();
    let shapes: Vec<Vec<BigUint>> = dists.iter().map(ClassDistribution::sorted_sizes).collect();
    let last = shapes.last().expect("n ≥ 1");
    let mut observed = n;
    while observed > 1 && &shapes[observed as usize - 2] == last {
        observed -= 1;
    }
    let asserted = n.div_ceil(2);
    let below = &rows[..asserted as usize];
    let strictly_monotone_below_pivot =
        below.windows(2).all(|w| w[1].classes > w[0].classes && w[1].h_s > w[0].h_s && w[1].h_b < w[0].h_b);
    let constant_from_pivot = shapes[asserted as usize - 1..].iter().all(|s| s == last);
    Ok(EntropyTable {
        n,
        symbol_count: vocab.len(),
        rows,
        asserted_pivot: asserted,
        observed_pivot: observed,
        strictly_monotone_below_pivot,
        constant_from_pivot,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseConstants {
    pub t: usize,
    pub c1: f64,
    pub c2: f64,
}

pub fn phase_constants_for_t(t: usize) -> Result<PhaseConstants> {
    if t < 2 {
        return Err(precondition(format!("phase constants need t ≥ 2, got {t}")));
    }
    let tf = t as f64;
    let c1 = (2.0 * tf * (2.0 * tf).ln()).sqrt() / tf;
    let c2 = (std::f64::consts::PI / (2.0 * tf.powi(3) * (4.0 * tf).powf(1.0 / (tf - 1.0)))).sqrt();
    Ok(PhaseConstants { t, c1, c2 })
}

pub fn phase_constants(vocab: &Vocabulary) -> Result<PhaseConstants> {
    phase_constants_for_t(vocab.type_count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MajorityClause {
    /// `d ≤ n/t − c₁√n`: a majority class is predicted.
    Majority,
    /// `d ≥ n/t − c₂√n`: no majority class is predicted.
    NoMajority,
    /// Strictly between the two thresholds; no prediction.
    Gap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorityReport {
    pub n: u64,
    pub d: u64,
    pub constants: PhaseConstants,
    pub clause: MajorityClause,
    /// `(d,…,d)`, when admissible.
    pub candidate: Option<AdmissibleTuple>,
    pub candidate_probability: Option<f64>,
    pub max_tuple: AdmissibleTuple,
    pub max_probability: f64,
    /// Exact comparison of the largest class against `t^n / 2`.
    pub has_majority: bool,
    pub consistent_with_clause: bool,
}

pub fn clause_for(n: u64, d: u64, consts: &PhaseConstants) -> MajorityClause {
    let base = n as f64 / consts.t as f64;
    let root = (n as f64).sqrt();
    let d = d as f64;
    if d <= base - consts.c1 * root {
        MajorityClause::Majority
    } else if d >= base - consts.c2 * root {
        MajorityClause::NoMajority
    } else {
        MajorityClause::Gap
    }
}

pub fn majority_report(n: u64, d: u64, vocab: &Vocabulary) -> Result<MajorityReport> {
    let constants = phase_constants(vocab)?;
    let dist = build_distribution(n, d, vocab)?;
    let sc = vocab.len();
    let max = dist.max_entry();
    let has_majority = max.size.clone() * 2u32 > dist.total();
    let cand: Vec<u64> = vec![d; vocab.type_count()];
    let candidate = dist.entry(&cand);
    let clause = clause_for(n, d, &constants);
    let consistent_with_clause = match clause {
        MajorityClause::Majority => has_majority,
        MajorityClause::NoMajority => !has_majority,
        MajorityClause::Gap => true,
    };
    Ok(MajorityReport {
        n,
        d,
        constants,
        clause,
        candidate: candidate.map(|e| e.tuple.clone()),
        candidate_probability: candidate.map(|e| e.probability_f64(n, sc)),
        max_tuple: max.tuple.clone(),
        max_probability: max.probability_f64(n, sc),
        has_majority,
        consistent_with_clause,
    })
}

/// `count` profiles of size `n`, each point's type uniform and independent.
pub fn sample_profiles(n: u64, vocab: &Vocabulary, count: usize, seed: u64) -> Result<Vec<ModelProfile>> {
    if count == 0 {
        return Err(precondition("sample count must be at least 1"));
    }
    if n == 0 {
        return Err(precondition("domain size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| sample_one(&mut rng, n, vocab.type_count())).collect())
}

fn sample_one(rng: &mut ChaCha8Rng, n: u64, t: usize) -> ModelProfile {
    let mut counts = vec![0u64; t];
    for _ in 0..n {
        counts[rng.gen_range(0..t)] += 1;
    }
    ModelProfile::new(counts).expect("n ≥ 1")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationEstimate {
    pub n: u64,
    pub d: u64,
    pub trials: usize,
    pub seed: u64,
    pub separated: usize,
    pub probability: f64,
}

/// Draws `trials` independent pairs and counts those with different tuples.
pub fn estimate_separation_probability(
    n: u64,
    d: u64,
    vocab: &Vocabulary,
    trials: usize,
    seed: u64,
) -> Result<SeparationEstimate> {
    if trials == 0 {
        return Err(precondition("need at least one trial"));
    }
    if d == 0 || n == 0 {
        return Err(precondition("need n ≥ 1 and d ≥ 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = vocab.type_count();
    let mut separated = 0;
    for _ in 0..trials {
        let x = tuple_of_profile(&sample_one(&mut rng, n, t), d)?;
        let y = tuple_of_profile(&sample_one(&mut rng, n, t), d)?;
        if x != y {
            separated += 1;
        }
    }
    Ok(SeparationEstimate { n, d, trials, seed, separated, probability: separated as f64 / trials as f64 })
}

pub fn exact_separation_probability(n: u64, d: u64, vocab: &Vocabulary) -> Result<BigRational> {
    Ok(build_distribution(n, d, vocab)?.separation_probability())
}

/// Depth as a function of domain size, rounded down and clamped to ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "a", rename_all = "kebab-case")]
pub enum DRule {
    /// `n/t − a√n`
    SqrtBelow(f64),
    /// `n/t − a·n^{1/4}`
    QuarterBelow(f64),
    /// `n/t + a√n`
    SqrtAbove(f64),
    /// `⌈n/t⌉`
    CeilShare,
    Constant(u64),
}

impl DRule {
    pub fn eval(&self, n: u64, t: usize) -> u64 {
        let share = n as f64 / t as f64;
        let nf = n as f64;
        let raw = match *self {
            DRule::SqrtBelow(a) => share - a * nf.sqrt(),
            DRule::QuarterBelow(a) => share - a * nf.powf(0.25),
            DRule::SqrtAbove(a) => share + a * nf.sqrt(),
            DRule::CeilShare => return n.div_ceil(t as u64).max(1),
            DRule::Constant(d) => return d.max(1),
        };
        if raw < 1.0 {
            1
        } else {
            raw.floor() as u64
        }
    }

    /// Parses `sqrt-below:A`, `quarter-below:A`, `sqrt-above:A`, `ceil-share`
    /// or `const:D`.
    pub fn parse(text: &str) -> Result<Self> {
        let (name, arg) = match text.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (text, None),
        };
        let num = |arg: Option<&str>| -> Result<f64> {
            arg.and_then(|a| a.parse::<f64>().ok())
                .filter(|a| a.is_finite())
                .ok_or_else(|| precondition(format!("rule `{text}` needs a numeric argument")))
        };
        match name {
            "sqrt-below" => Ok(DRule::SqrtBelow(num(arg)?)),
            "quarter-below" => Ok(DRule::QuarterBelow(num(arg)?)),
            "sqrt-above" => Ok(DRule::SqrtAbove(num(arg)?)),
            "ceil-share" if arg.is_none() => Ok(DRule::CeilShare),
            "const" => arg
                .and_then(|a| a.parse::<u64>().ok())
                .map(DRule::Constant)
                .ok_or_else(|| precondition(format!("rule `{text}` needs an integer depth"))),
            _ => Err(precondition(format!("unknown depth rule `{text}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u64,
    pub d: u64,
    /// Exact probability of `(d,…,d)`, zero when not admissible.
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub candidate_probability: BigRational,
    pub candidate_probability_f64: f64,
    pub max_tuple: AdmissibleTuple,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub max_probability: BigRational,
    pub max_probability_f64: f64,
}

pub fn dominating_class_sweep(rule: DRule, vocab: &Vocabulary, n_values: &[u64]) -> Result<Vec<SweepRow>> {
    let t = vocab.type_count();
    let sc = vocab.len();
    n_values
        .iter()
        .map(|&n| {
            let d = rule.eval(n, t);
            let dist = build_distribution(n, d, vocab)?;
            let cand = dist.entry(&vec![d; t]);
            let max = dist.max_entry();
            Ok(SweepRow {
                n,
                d,
                candidate_probability: cand.map_or_else(BigRational::zero, |e| e.probability.clone()),
                candidate_probability_f64: cand.map_or(0.0, |e| e.probability_f64(n, sc)),
                max_tuple: max.tuple.clone(),
                max_probability: max.probability.clone(),
                max_probability_f64: max.probability_f64(n, sc),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonotoneMode {
    Exact,
    Bounds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonePair {
    pub from: AdmissibleTuple,
    pub to: AdmissibleTuple,
    pub size_increases: bool,
    /// Bounds mode: `upper(from) < lower(to)`. Exact mode: `C(from) < C(to)`.
    pub complexity_increases: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub n: u64,
    pub d: u64,
    pub mode: MonotoneMode,
    pub c_tau: u64,
    /// Pairs with coordinatewise `≤` and coordinate-sum gap above `c_τ`.
    pub comparable_pairs: usize,
    pub failures: Vec<MonotonePair>,
    pub all_pass: bool,
    /// Exact mode only: every coordinatewise-comparable distinct pair,
    /// checked for `|M| < |M′| ⇔ C < C′` without the gap condition.
    pub unrestricted_pairs: usize,
    pub unrestricted_failures: Vec<MonotonePair>,
}

fn coordinatewise_le(a: &AdmissibleTuple, b: &AdmissibleTuple) -> bool {
    a.le(b)
}

pub fn verify_monotone_connection(n: u64, d: u64, vocab: &Vocabulary, mode: MonotoneMode) -> Result<MonotoneReport> {
    verify_monotone_connection_with(n, d, vocab, mode, SearchCaps::default())
}

pub fn verify_monotone_connection_with(
    n: u64,
    d: u64,
    vocab: &Vocabulary,
    mode: MonotoneMode,
    caps: SearchCaps,
) -> Result<MonotoneReport> {
    let tuples = enumerate_admissible(n, d, vocab)?;
    let sizes: Vec<BigUint> = tuples.iter().map(class_size).collect();
    let gap = c_tau(vocab.len());
    let sums: Vec<u64> = tuples.iter().map(AdmissibleTuple::sum).collect();
    let mut report = MonotoneReport {
        n,
        d,
        mode,
        c_tau: gap,
        comparable_pairs: 0,
        failures: Vec::new(),
        all_pass: true,
        unrestricted_pairs: 0,
        unrestricted_failures: Vec::new(),
    };
    match mode {
        MonotoneMode::Bounds => {
            let uppers: Vec<u64> = tuples.iter().map(|t| upper_bound(t).size).collect();
            let lowers: Vec<u64> = tuples.iter().map(lower_bound).collect();
            for i in 0..tuples.len() {
                for j in 0..tuples.len() {
                    if sums[j] <= sums[i] + gap || !coordinatewise_le(&tuples[i], &tuples[j]) {
                        continue;
                    }
                    report.comparable_pairs += 1;
                    let size_increases = sizes[i] < sizes[j];
                    let complexity_increases = uppers[i] < lowers[j];
                    if !(size_increases && complexity_increases) {
                        report.failures.push(MonotonePair {
                            from: tuples[i].clone(),
                            to: tuples[j].clone(),
                            size_increases,
                            complexity_increases,
                            holds: false,
                        });
                    }
                }
            }
        }
        MonotoneMode::Exact => {
            let mut search = FormulaSearch::new(vocab.len(), n, d, caps)?;
            let mut exact = Vec::with_capacity(tuples.len());
            for t in &tuples {
                let budget = upper_bound(t).size;
                let c = search
                    .defining(t, budget)?
                    .ok_or_else(|| Error::Domain(format!("no defining formula within the upper bound for {t}")))?;
                exact.push(c.size);
            }
            for i in 0..tuples.len() {
                for j in 0..tuples.len() {
                    if i == j || !coordinatewise_le(&tuples[i], &tuples[j]) {
                        continue;
                    }
                    let size_increases = sizes[i] < sizes[j];
                    let complexity_increases = exact[i] < exact[j];
                    let pair = MonotonePair {
                        from: tuples[i].clone(),
                        to: tuples[j].clone(),
                        size_increases,
                        complexity_increases,
                        holds: size_increases == complexity_increases,
                    };
                    report.unrestricted_pairs += 1;
                    if !pair.holds {
                        report.unrestricted_failures.push(pair.clone());
                    }
                    if sums[j] > sums[i] + gap {
                        report.comparable_pairs += 1;
                        if !pair.holds {
                            report.failures.push(pair);
                        }
                    }
                }
            }
        }
    }
    report.all_pass = report.failures.is_empty();
    Ok(report)
}

/// Empirical class frequencies, keyed by tuple entries.
pub fn empirical_frequencies(profiles: &[ModelProfile], d: u64) -> Result<HashMap<Vec<u64>, usize>> {
    let mut out = HashMap::new();
    for p in profiles {
        *out.entry(tuple_of_profile(p, d)?.entries().to_vec()).or_insert(0) += 1;
    }
    Ok(out)
}
