//! Exact counting with big integers, plus the analytic tail and factorial
//! bounds used when reasoning about class-size distributions.
//!
//! Counting paths never touch floating point. Only the Chernoff and Robbins
//! estimates return `f64`.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::Serialize;

use crate::error::{precondition, Error, Result};

pub type BigCount = BigUint;

/// A two-sided estimate `lower ≤ value ≤ upper`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundPair<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: PartialOrd> BoundPair<T> {
    pub fn contains(&self, x: &T) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    pub fn strictly_contains(&self, x: &T) -> bool {
        &self.lower < x && x < &self.upper
    }
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// The multinomial coefficient `n! / ∏ parts_i!`.
pub fn multinomial(n: u64, parts: &[u64]) -> Result<BigUint> {
    let total: u64 = parts.iter().sum();
    if total != n {
        return Err(precondition(format!("parts sum to {total}, expected {n}")));
    }
    let mut acc = BigUint::one();
    let mut used = 0;
    for &p in parts {
        used += p;
        acc *= binomial(used, p);
    }
    Ok(acc)
}

/// Table of `S(n, m)_{≥r}` for one fixed `r`, grown on demand.
///
/// Rows are filled with the two-term recurrence
/// `S(n+1, m) = m·S(n, m) + C(n, r−1)·S(n−r+1, m−1)`, iterating over `n`.
#[derive(Debug, Clone)]
struct StirlingTable {
    r: u64,
    max_m: usize,
    rows: Vec<Vec<BigUint>>,
}

impl StirlingTable {
    fn new(r: u64) -> Self {
        Self { r, max_m: 0, rows: vec![vec![BigUint::one()]] }
    }

    fn ensure(&mut self, n: usize, m: usize) {
        if m > self.max_m {
            // Rebuild with the wider column range.
            self.max_m = m;
            self.rows.truncate(1);
            self.rows[0] = (0..=m).map(|j| if j == 0 { BigUint::one() } else { BigUint::zero() }).collect();
        }
        let r = self.r as usize;
        while self.rows.len() <= n {
            let prev_n = self.rows.len() - 1;
            let choose = binomial(prev_n as u64, self.r - 1);
            let mut row = vec![BigUint::zero(); self.max_m + 1];
            for (j, cell) in row.iter_mut().enumerate().skip(1) {
                let mut v = &self.rows[prev_n][j] * j;
                if prev_n + 1 >= r {
                    v += &choose * &self.rows[prev_n + 1 - r][j - 1];
                }
                *cell = v;
            }
            self.rows.push(row);
        }
    }

    fn get(&mut self, n: usize, m: usize) -> BigUint {
        self.ensure(n, m);
        self.rows[n][m].clone()
    }
}

/// Memo of r-associated Stirling numbers keyed by `(n, m, r)`.
#[derive(Debug, Default, Clone)]
pub struct StirlingCache {
    tables: HashMap<u64, StirlingTable>,
}

impl StirlingCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// `S(n, m)_{≥r}` for any arguments; zero outside the support.
    /// `S(0, 0)_{≥r} = 1`.
    pub fn get(&mut self, n: u64, m: u64, r: u64) -> BigUint {
        if m == 0 {
            return if n == 0 { BigUint::one() } else { BigUint::zero() };
        }
        if r == 0 || n < m * r {
            return BigUint::zero();
        }
        self.tables.entry(r).or_insert_with(|| StirlingTable::new(r)).get(n as usize, m as usize)
    }
}

thread_local! {
    static STIRLING: RefCell<StirlingCache> = RefCell::new(StirlingCache::new());
}

/// Memoized `S(n, m)_{≥r}` without precondition checks (zero when empty).
pub(crate) fn stirling_unchecked(n: u64, m: u64, r: u64) -> BigUint {
    STIRLING.with(|c| c.borrow_mut().get(n, m, r))
}

/// Number of partitions of an `n`-set into `m` blocks of size at least `r`.
pub fn stirling_r_assoc(n: u64, m: u64, r: u64) -> Result<BigUint> {
    check_stirling_args(n, m, r)?;
    Ok(stirling_unchecked(n, m, r))
}

fn check_stirling_args(n: u64, m: u64, r: u64) -> Result<()> {
    if m == 0 || r == 0 {
        return Err(precondition(format!("m and r must be positive (m = {m}, r = {r})")));
    }
    if n < m * r {
        return Err(precondition(format!("need n ≥ m·r, got n = {n}, m·r = {}", m * r)));
    }
    Ok(())
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn rational_of(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StirlingBoundsCheck {
    pub n: u64,
    pub m: u64,
    pub r: u64,
    #[serde(serialize_with = "crate::serde_util::big")]
    pub value: BigUint,
    #[serde(serialize_with = "crate::serde_util::rational_pair")]
    pub bounds: BoundPair<BigRational>,
    pub holds: bool,
}

/// Checks `m^n / m^{mr} ≤ S(n, m)_{≥r} ≤ m^n / m!` exactly.
pub fn check_stirling_bounds(n: u64, m: u64, r: u64) -> Result<StirlingBoundsCheck> {
    check_stirling_args(n, m, r)?;
    let value = stirling_unchecked(n, m, r);
    let mb = BigUint::from(m);
    let lower = ratio(Pow::pow(&mb, n), Pow::pow(&mb, m * r));
    let upper = ratio(Pow::pow(&mb, n), factorial(m));
    let bounds = BoundPair { lower, upper };
    let holds = bounds.contains(&rational_of(&value));
    Ok(StirlingBoundsCheck { n, m, r, value, bounds, holds })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCheck {
    pub n: u64,
    pub m: u64,
    pub r: u64,
    #[serde(serialize_with = "crate::serde_util::big")]
    pub lhs: BigUint,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub rhs: BigRational,
    pub holds: bool,
}

/// Checks `S(n, m)_{≥r} ≤ (m^{mr+1} / m!) · S(n−1, m)_{≥r}` exactly.
pub fn check_growth_bound(n: u64, m: u64, r: u64) -> Result<GrowthCheck> {
    check_stirling_args(n, m, r)?;
    if n < m * r + 1 {
        return Err(precondition(format!("need n ≥ m·r + 1, got n = {n}, m·r = {}", m * r)));
    }
    let lhs = stirling_unchecked(n, m, r);
    let prev = stirling_unchecked(n - 1, m, r);
    let rhs = ratio(Pow::pow(&BigUint::from(m), m * r + 1) * prev, factorial(m));
    let holds = rational_of(&lhs) <= rhs;
    Ok(GrowthCheck { n, m, r, lhs, rhs, holds })
}

fn check_tail_args(p: f64, delta: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("success probability {p} must lie in (0, 1]")));
    }
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::Domain(format!("delta {delta} must be a finite nonnegative number")));
    }
    Ok(())
}

/// Lower-tail Chernoff bound `Pr[X ≤ (1−δ)np] ≤ e^{−δ²np/2}`.
pub fn chernoff_lower(n: u64, p: f64, delta: f64) -> Result<f64> {
    check_tail_args(p, delta)?;
    Ok((-delta * delta * n as f64 * p / 2.0).exp())
}

/// Upper-tail Chernoff bound `Pr[X ≥ (1+δ)np] ≤ e^{−δ²np/(2+δ)}`.
pub fn chernoff_upper(n: u64, p: f64, delta: f64) -> Result<f64> {
    check_tail_args(p, delta)?;
    Ok((-delta * delta * n as f64 * p / (2.0 + delta)).exp())
}

/// Robbins' two-sided bound on `n!`:
/// `√(2πn)(n/e)^n e^{1/(12n+1)} < n! < √(2πn)(n/e)^n e^{1/(12n)}`.
pub fn robbins_bounds(n: u64) -> Result<BoundPair<f64>> {
    let (lo, hi) = robbins_ln_bounds(n)?;
    Ok(BoundPair { lower: lo.exp(), upper: hi.exp() })
}

/// Natural logarithms of the Robbins bounds; usable beyond `f64` range.
pub fn robbins_ln_bounds(n: u64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Domain("Robbins bounds need n ≥ 1".into()));
    }
    let x = n as f64;
    let base = 0.5 * (2.0 * std::f64::consts::PI * x).ln() + x * (x.ln() - 1.0);
    Ok((base + 1.0 / (12.0 * x + 1.0), base + 1.0 / (12.0 * x)))
}

/// Base-2 logarithm of a big integer (`-inf` for zero).
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return (x.iter_u64_digits().next().unwrap_or(0) as f64).log2();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    let top = top.iter_u64_digits().next().unwrap_or(0) as f64;
    top.log2() + shift as f64
}

/// `x / 2^shift` as a float without overflowing on huge `x`.
pub fn scaled_to_f64(x: &BigUint, shift: u64) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return 0.0;
    }
    let drop = bits.saturating_sub(64);
    let top: BigUint = x >> drop;
    let top = top.iter_u64_digits().next().unwrap_or(0) as f64;
    let exp = drop as i64 - shift as i64;
    top * 2f64.powi(exp.clamp(-1100, 1100) as i32)
}

/// Counts partitions of `{0..n}` into `m` blocks of size ≥ `r` by walking
/// restricted growth strings. Exponential; used for verification only.
pub fn brute_force_partition_count(n: u64, m: u64, r: u64) -> Result<u64> {
    if n > 12 {
        return Err(Error::ScaleCap(format!("brute-force partition count limited to n ≤ 12, got {n}")));
    }
    fn walk(i: usize, n: usize, sizes: &mut Vec<u64>, m: usize, r: u64, acc: &mut u64) {
        if sizes.len() > m {
            return;
        }
        let missing_blocks = (m - sizes.len()) as u64;
        let deficit: u64 = sizes.iter().map(|&s| r.saturating_sub(s)).sum::<u64>() + missing_blocks * r;
        if deficit > (n - i) as u64 {
            return;
        }
        if i == n {
            *acc += 1;
            return;
        }
        for b in 0..sizes.len() {
            sizes[b] += 1;
            walk(i + 1, n, sizes, m, r, acc);
            sizes[b] -= 1;
        }
        sizes.push(1);
        walk(i + 1, n, sizes, m, r, acc);
        sizes.pop();
    }
    let mut acc = 0;
    walk(0, n as usize, &mut Vec::new(), m as usize, r, &mut acc);
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirling_small_values() {
        assert_eq!(stirling_r_assoc(7, 1, 1).unwrap(), BigUint::one());
        assert_eq!(stirling_r_assoc(4, 2, 2).unwrap(), BigUint::from(3u32));
        assert_eq!(stirling_r_assoc(5, 2, 1).unwrap(), BigUint::from(15u32));
        assert!(stirling_r_assoc(3, 2, 2).is_err());
        assert!(stirling_r_assoc(3, 0, 1).is_err());
    }

    #[test]
    fn cache_survives_widening() {
        let mut c = StirlingCache::new();
        assert_eq!(c.get(6, 1, 2), BigUint::one());
        assert_eq!(c.get(6, 3, 2), BigUint::from(15u32));
        assert_eq!(c.get(6, 2, 2), BigUint::from(25u32));
    }

    #[test]
    fn stirling_bound_examples() {
        let c = check_stirling_bounds(4, 2, 2).unwrap();
        assert_eq!(c.value, BigUint::from(3u32));
        assert_eq!(c.bounds.lower, BigRational::from_integer(1.into()));
        assert_eq!(c.bounds.upper, BigRational::from_integer(8.into()));
        assert!(c.holds);
        let c = check_stirling_bounds(6, 2, 2).unwrap();
        assert_eq!(c.bounds.lower, BigRational::from_integer(4.into()));
        assert_eq!(c.bounds.upper, BigRational::from_integer(32.into()));
        assert!(c.holds);
        for (m, r) in [(1, 1), (2, 3), (3, 2)] {
            let c = check_stirling_bounds(m * r, m, r).unwrap();
            assert_eq!(c.bounds.lower, BigRational::from_integer(1.into()));
            assert!(c.holds);
        }
    }

    #[test]
    fn growth_examples() {
        assert!(check_growth_bound(5, 2, 2).unwrap().holds);
        assert!(check_growth_bound(7, 2, 3).unwrap().holds);
        assert!(check_growth_bound(8, 2, 3).unwrap().holds);
        assert!(check_growth_bound(4, 2, 2).is_err());
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(3, &[0, 3]).unwrap(), BigUint::one());
        assert_eq!(multinomial(4, &[2, 2]).unwrap(), BigUint::from(6u32));
        assert_eq!(multinomial(3, &[1, 1, 1]).unwrap(), BigUint::from(6u32));
        assert!(multinomial(3, &[1, 1]).is_err());
    }

    #[test]
    fn chernoff_examples() {
        assert_eq!(chernoff_lower(100, 0.5, 0.0).unwrap(), 1.0);
        assert_eq!(chernoff_upper(100, 0.5, 0.0).unwrap(), 1.0);
        assert!((chernoff_lower(100, 0.5, 0.2).unwrap() - (-1.0f64).exp()).abs() < 1e-12);
        assert!((chernoff_upper(100, 0.5, 1.0).unwrap() - (-50.0f64 / 3.0).exp()).abs() < 1e-18);
        assert!(chernoff_lower(10, 0.0, 1.0).is_err());
        assert!(chernoff_upper(10, 0.5, -1.0).is_err());
    }

    #[test]
    fn robbins_examples() {
        for (n, f) in [(1u64, 1.0), (5, 120.0), (10, 3_628_800.0)] {
            assert!(robbins_bounds(n).unwrap().strictly_contains(&f), "n = {n}");
        }
        assert!(robbins_bounds(0).is_err());
    }

    #[test]
    fn big_logs() {
        assert_eq!(log2_big(&BigUint::from(8u32)), 3.0);
        let big = BigUint::one() << 300u32;
        assert_eq!(log2_big(&big), 300.0);
        assert_eq!(scaled_to_f64(&big, 301), 0.5);
        assert_eq!(scaled_to_f64(&BigUint::from(3u32), 2), 0.75);
    }

    #[test]
    fn brute_force_agrees_on_small_cases() {
        assert_eq!(brute_force_partition_count(4, 2, 2).unwrap(), 3);
        assert_eq!(brute_force_partition_count(5, 2, 1).unwrap(), 15);
        assert_eq!(brute_force_partition_count(0, 0, 1).unwrap(), 1);
    }
}
