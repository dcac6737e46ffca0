//! Golod-Shafarevich accounting in exact rational arithmetic.
//!
//! For a presentation with relator degree counts `n_i` and `d_hat` minimal
//! generators, `H(t) = 1 - d_hat t + sum_i n_i t^i`. A witness `t0` in `(0, 1)`
//! with `H(t0) < 0` certifies the Golod-Shafarevich condition. The forcing
//! threshold `k` is the least integer with `t0^(k+1) / (1 - t0)^2 < |H(t0)|`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::magnus::{magnus_embed, SeriesContext, SeriesError};
use crate::words::Word;
use crate::zassenhaus::{degree, DegreeValue};

pub type Rational = BigRational;

/// Grid denominator used by [`find_t0`] unless configured otherwise.
pub const DEFAULT_GRID_RESOLUTION: u32 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GsError {
    #[error("relator {0} is the empty word")]
    EmptyRelator(usize),
    #[error("t = {0} is outside the open interval (0, 1)")]
    OutOfRange(String),
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(String),
    #[error("H(t0) = {0} is not negative")]
    NotGolodShafarevich(String),
    #[error("invalid rational {0:?}")]
    BadRational(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Counts `n_i` of relators by degree.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DegreeHistogram {
    pub counts: BTreeMap<u32, u64>,
    /// Relators whose degree was not resolved, keyed by the lower bound
    /// they are scored at.
    pub overflow: BTreeMap<u32, u64>,
    /// Truncation order used, when the histogram came from [`histogram`].
    pub truncation: Option<u32>,
}

impl DegreeHistogram {
    pub fn record(&mut self, d: DegreeValue) {
        match d {
            DegreeValue::Finite(m) => *self.counts.entry(m).or_default() += 1,
            DegreeValue::AtLeast(m) => *self.overflow.entry(m).or_default() += 1,
            DegreeValue::Infinite => panic!("the identity has no place in a degree histogram"),
        }
    }

    pub fn count(&self, i: u32) -> u64 {
        self.counts.get(&i).copied().unwrap_or(0)
    }

    pub fn overflow_count(&self) -> u64 {
        self.overflow.values().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum::<u64>() + self.overflow_count()
    }

    pub fn merge(&mut self, other: &DegreeHistogram) {
        for (&i, &n) in &other.counts {
            *self.counts.entry(i).or_default() += n;
        }
        for (&i, &n) in &other.overflow {
            *self.overflow.entry(i).or_default() += n;
        }
        if self.truncation != other.truncation {
            self.truncation = None;
        }
    }

    /// `(exponent, count)` pairs entering `H`, overflow included.
    fn scored(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.counts
            .iter()
            .chain(&self.overflow)
            .map(|(&i, &n)| (i, n))
    }
}

/// Degree histogram of `relators`. Degrees beyond the truncation are scored
/// at `N + 1`, which can only overestimate `H`.
pub fn histogram(relators: &[Word], ctx: &Arc<SeriesContext>) -> Result<DegreeHistogram, GsError> {
    let mut hist = DegreeHistogram {
        truncation: Some(ctx.order() as u32),
        ..Default::default()
    };
    for (i, r) in relators.iter().enumerate() {
        if r.is_identity() {
            return Err(GsError::EmptyRelator(i));
        }
        hist.record(degree(r, ctx)?);
    }
    Ok(hist)
}

/// `d` minus the `F_p`-rank of the linear parts of the relators' Magnus images.
pub fn dhat(relators: &[Word], p: u32, rank: usize) -> Result<usize, GsError> {
    let ctx = SeriesContext::new(p, rank, 1)?;
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for r in relators {
        let image = magnus_embed(r, &ctx)?;
        rows.push(
            image.coefficients_below(2)[1..]
                .iter()
                .map(|&c| c as u64)
                .collect(),
        );
    }
    Ok(rank - rank_mod_p(rows, p as u64))
}

fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = pow_mod(rows[rank][col], p - 2, p);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + p * p - f * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut out = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            out = out * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    out
}

fn check_unit_interval(t: &Rational) -> Result<(), GsError> {
    if t.is_positive() && t < &Rational::one() {
        Ok(())
    } else {
        Err(GsError::OutOfRange(format_rational(t)))
    }
}

/// `H(t) = 1 - d_hat t + sum n_i t^i`.
pub fn evaluate_h(hist: &DegreeHistogram, dhat: usize, t: &Rational) -> Result<Rational, GsError> {
    check_unit_interval(t)?;
    let mut h = Rational::one() - Rational::from_integer(BigInt::from(dhat)) * t;
    for (i, n) in hist.scored() {
        h += Rational::from_integer(BigInt::from(n)) * num_traits::pow(t.clone(), i as usize);
    }
    Ok(h)
}

/// Deterministic search for a witness: evaluate `H` on the grid `i / res`,
/// take the first minimiser, and when it is interior refine on the grid
/// `1 / (10 res)` between its neighbours. Returns the point only if
/// `H < 0` there.
pub fn find_t0(hist: &DegreeHistogram, dhat: usize, resolution: u32) -> Option<Rational> {
    let res = resolution.max(2);
    let at = |num: u32, den: u32| Rational::new(BigInt::from(num), BigInt::from(den));
    let mut best: Option<(u32, Rational)> = None;
    for i in 1..res {
        let h = evaluate_h(hist, dhat, &at(i, res)).expect("grid point inside (0, 1)");
        if best.as_ref().is_none_or(|(_, b)| h < *b) {
            best = Some((i, h));
        }
    }
    let (i, h) = best?;
    let (mut t, mut h) = (at(i, res), h);
    if i > 1 && i < res - 1 {
        let fine = res * 10;
        for j in (i - 1) * 10 + 1..(i + 1) * 10 {
            let tj = at(j, fine);
            let hj = evaluate_h(hist, dhat, &tj).expect("inside (0, 1)");
            if hj < h {
                t = tj;
                h = hj;
            }
        }
    }
    h.is_negative().then_some(t)
}

/// Grid point (denominator `resolution`) with `H < 0` whose forcing
/// threshold `k` is smallest; ties go to the smaller `t`.
pub fn find_t0_min_k(hist: &DegreeHistogram, dhat: usize, resolution: u32) -> Option<Rational> {
    let res = resolution.max(2);
    let mut best: Option<(u64, Rational)> = None;
    for i in 1..res {
        let t = Rational::new(BigInt::from(i), BigInt::from(res));
        let h = evaluate_h(hist, dhat, &t).expect("grid point inside (0, 1)");
        if !h.is_negative() {
            continue;
        }
        let k = compute_k(&t, &h.abs()).expect("valid inputs");
        if best.as_ref().is_none_or(|(bk, _)| k < *bk) {
            best = Some((k, t));
        }
    }
    best.map(|(_, t)| t)
}

fn to_biguint(x: &BigInt) -> BigUint {
    x.to_biguint().expect("nonnegative")
}

/// Least `k >= 0` with `t0^(k+1) / (1 - t0)^2 < epsilon`.
pub fn compute_k(t0: &Rational, epsilon: &Rational) -> Result<u64, GsError> {
    check_unit_interval(t0)?;
    if !epsilon.is_positive() {
        return Err(GsError::NonPositiveEpsilon(format_rational(epsilon)));
    }
    let (a, b) = (to_biguint(t0.numer()), to_biguint(t0.denom()));
    let (c, e) = (to_biguint(epsilon.numer()), to_biguint(epsilon.denom()));
    let gap = &b - &a;
    // a^(k+1) e b^2 < c (b - a)^2 b^(k+1)
    let holds = |k: u64| -> bool {
        let lhs = num_traits::pow(a.clone(), k as usize + 1) * &e * &b * &b;
        let rhs = &c * &gap * &gap * num_traits::pow(b.clone(), k as usize + 1);
        lhs < rhs
    };
    let tf = t0.to_f64().unwrap_or(0.5);
    let target = epsilon.to_f64().unwrap_or(f64::MIN_POSITIVE) * (1.0 - tf).powi(2);
    let guess = (target.ln() / tf.ln() - 1.0).ceil();
    let mut k = if guess.is_finite() && guess > 0.0 {
        guess as u64
    } else {
        0
    };
    if holds(k) {
        while k > 0 && holds(k - 1) {
            k -= 1;
        }
    } else {
        while !holds(k) {
            k += 1;
        }
    }
    Ok(k)
}

/// `t^(k+1) / (1 - t)^2`, which equals `sum_{i >= k} (i - k) t^i`.
pub fn tail_bound(k: u64, t: &Rational) -> Result<Rational, GsError> {
    check_unit_interval(t)?;
    let gap = Rational::one() - t;
    Ok(num_traits::pow(t.clone(), k as usize + 1) / (&gap * &gap))
}

/// A checked witness of the Golod-Shafarevich condition together with the
/// forcing threshold it implies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GsCertificate {
    #[serde(with = "ratio_string")]
    pub t0: Rational,
    #[serde(with = "ratio_string")]
    pub h_value: Rational,
    #[serde(with = "ratio_string")]
    pub epsilon: Rational,
    pub k: u64,
    pub dhat: usize,
}

impl GsCertificate {
    pub fn new(hist: &DegreeHistogram, dhat: usize, t0: Rational) -> Result<Self, GsError> {
        let h_value = evaluate_h(hist, dhat, &t0)?;
        if !h_value.is_negative() {
            return Err(GsError::NotGolodShafarevich(format_rational(&h_value)));
        }
        let epsilon = h_value.abs();
        let k = compute_k(&t0, &epsilon)?;
        Ok(GsCertificate {
            t0,
            h_value,
            epsilon,
            k,
            dhat,
        })
    }

    /// Re-derives every field and checks the stated invariants.
    pub fn validate(&self, hist: &DegreeHistogram) -> Result<(), GsError> {
        let again = GsCertificate::new(hist, self.dhat, self.t0.clone())?;
        if &again != self {
            return Err(GsError::NotGolodShafarevich(format!(
                "certificate fields disagree with recomputation (H = {})",
                format_rational(&again.h_value)
            )));
        }
        Ok(())
    }
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `a/b`, an integer, or a finite decimal such as `0.6`.
pub fn parse_rational(s: &str) -> Result<Rational, GsError> {
    let bad = || GsError::BadRational(s.to_string());
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => digits.parse().map_err(|_| bad())?,
        };
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let magnitude = Rational::new(int_part * &scale + frac_part, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Serde adapter writing rationals as `"num/den"` strings.
pub mod ratio_string {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Signed helper for tests and reports.
pub fn rational(num: i64, den: i64) -> Rational {
    let sign = if (num < 0) ^ (den < 0) {
        Sign::Minus
    } else {
        Sign::Plus
    };
    let n = BigInt::from_biguint(sign, BigUint::from(num.unsigned_abs()));
    Rational::new(n, BigInt::from(den.unsigned_abs()))
}
