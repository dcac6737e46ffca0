//! Sphere densities `rho_n(T) = |T n S_n| / |S_n|`, their sampled estimates,
//! exponential decay fits and cogrowth profiles.
//!
//! Predicates must be total and decidable, so the kernels used here are those
//! of the finite quotients `F -> F / D_n F`.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gs::{ratio_string, Rational};
use crate::magnus::SeriesError;
use crate::words::{sphere_size_u64, Alphabet, Letter, Sphere, Word, WordError};
use crate::zassenhaus::EqualityOracle;

pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Identifier of the sampling scheme, recorded in every sampled report.
pub const SAMPLER_ID: &str = "chacha8-stream-per-4096-v1";

const SAMPLE_CHUNK: u64 = 4096;
const EXACT_CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DensityError {
    #[error("sphere S_{n} has {size} words, above the enumeration cap {cap}")]
    CapExceeded { n: usize, size: String, cap: u64 },
    #[error("at least one sample is required")]
    NoSamples,
    #[error("a decay fit needs at least 3 points with positive density, got {0}")]
    TooFewPoints(usize),
    #[error("predicate: {0}")]
    Predicate(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Serializable description of a membership test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PredicateSpec {
    All {},
    Identity {},
    /// Kernel of `F -> F / D_level F`.
    Kernel {
        level: usize,
        p: u32,
    },
    /// The coset `u N`, tested by `u^-1 w in N`.
    Coset {
        u: String,
        of: Box<PredicateSpec>,
    },
    Union {
        of: Vec<PredicateSpec>,
    },
    Words {
        words: Vec<String>,
    },
}

impl PredicateSpec {
    pub fn describe(&self) -> String {
        serde_json::to_string(self).expect("predicate serializes")
    }
}

/// A compiled predicate, shareable across threads.
#[derive(Debug, Clone)]
pub enum MembershipPredicate {
    All,
    Identity,
    Kernel(EqualityOracle),
    Coset {
        u_inverse: Word,
        of: Box<MembershipPredicate>,
    },
    Union(Vec<MembershipPredicate>),
    Words(HashSet<Word>),
}

impl MembershipPredicate {
    pub fn compile(spec: &PredicateSpec, alphabet: &Alphabet) -> Result<Self, DensityError> {
        Ok(match spec {
            PredicateSpec::All {} => MembershipPredicate::All,
            PredicateSpec::Identity {} => MembershipPredicate::Identity,
            PredicateSpec::Kernel { level, p } => {
                if *level == 0 {
                    return Err(DensityError::Predicate(
                        "kernel level must be at least 1".into(),
                    ));
                }
                MembershipPredicate::Kernel(EqualityOracle::new(*level, *p, alphabet.rank())?)
            }
            PredicateSpec::Coset { u, of } => MembershipPredicate::Coset {
                u_inverse: alphabet.parse(u)?.inverse(),
                of: Box::new(Self::compile(of, alphabet)?),
            },
            PredicateSpec::Union { of } => MembershipPredicate::Union(
                of.iter()
                    .map(|s| Self::compile(s, alphabet))
                    .collect::<Result<_, _>>()?,
            ),
            PredicateSpec::Words { words } => MembershipPredicate::Words(
                words
                    .iter()
                    .map(|w| alphabet.parse(w))
                    .collect::<Result<_, _>>()?,
            ),
        })
    }

    pub fn contains(&self, w: &Word) -> bool {
        match self {
            MembershipPredicate::All => true,
            MembershipPredicate::Identity => w.is_identity(),
            MembershipPredicate::Kernel(oracle) => {
                oracle.is_trivial(w).expect("rank fixed at compile time")
            }
            MembershipPredicate::Coset { u_inverse, of } => {
                of.contains(&u_inverse.multiply(w).expect("rank fixed at compile time"))
            }
            MembershipPredicate::Union(parts) => parts.iter().any(|p| p.contains(w)),
            MembershipPredicate::Words(set) => set.contains(w),
        }
    }
}

/// One row of a density report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRecord {
    pub n: usize,
    pub sphere_size: u64,
    /// Exact hit count, or the number of sampled hits.
    pub hits: u64,
    /// Number of samples; `None` for exact rows.
    pub samples: Option<u64>,
    pub rho: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Exact density with its rational value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactDensity {
    pub n: usize,
    pub sphere_size: u64,
    pub hits: u64,
    #[serde(with = "ratio_string")]
    pub rho: Rational,
}

impl ExactDensity {
    pub fn record(&self) -> DensityRecord {
        let rho = self.rho.to_f64().unwrap_or(f64::NAN);
        DensityRecord {
            n: self.n,
            sphere_size: self.sphere_size,
            hits: self.hits,
            samples: None,
            rho,
            ci_low: rho,
            ci_high: rho,
        }
    }
}

/// Counts `|T n S_n|` by walking the whole sphere in parallel chunks.
pub fn count_exact(
    pred: &MembershipPredicate,
    rank: usize,
    n: usize,
    cap: u64,
) -> Result<(u64, u64), DensityError> {
    let size = sphere_size_u64(rank, n).map_err(|_| DensityError::CapExceeded {
        n,
        size: crate::words::sphere_size(rank, n).to_string(),
        cap,
    })?;
    if size > cap {
        return Err(DensityError::CapExceeded {
            n,
            size: size.to_string(),
            cap,
        });
    }
    let chunks = size.div_ceil(EXACT_CHUNK);
    let hits = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * EXACT_CHUNK;
            let count = EXACT_CHUNK.min(size - start);
            Sphere::range(rank, n, start, Some(count))
                .expect("range inside sphere")
                .filter(|w| pred.contains(w))
                .count() as u64
        })
        .sum();
    Ok((hits, size))
}

pub fn rho_exact(
    pred: &MembershipPredicate,
    rank: usize,
    n: usize,
    cap: u64,
) -> Result<ExactDensity, DensityError> {
    let (hits, size) = count_exact(pred, rank, n, cap)?;
    Ok(ExactDensity {
        n,
        sphere_size: size,
        hits,
        rho: Rational::new(BigInt::from(hits), BigInt::from(size)),
    })
}

/// Uniform random element of `S_n`: first letter uniform among `2d`, each
/// later one uniform among the `2d - 1` letters that do not cancel.
pub fn random_reduced_word<R: Rng>(rng: &mut R, rank: usize, n: usize) -> Word {
    let width = 2 * rank as u32;
    let mut letters: Vec<Letter> = Vec::with_capacity(n);
    for i in 0..n {
        let code = if i == 0 {
            rng.random_range(0..width)
        } else {
            let forbidden = letters[i - 1].inverse().code();
            let c = rng.random_range(0..width - 1);
            if c >= forbidden {
                c + 1
            } else {
                c
            }
        };
        letters.push(Letter::from_code(code));
    }
    Word::reduce(rank, letters)
}

/// Wilson score interval for `hits` successes in `n` trials.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    let nf = n as f64;
    let phat = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (phat + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / nf + z2 / (4.0 * nf * nf)).sqrt();
    let low = if hits == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let high = if hits == n {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (low, high)
}

/// Counts hits among `samples` uniform words of `S_n`. Samples are drawn in
/// blocks of 4096, block `b` using ChaCha8 stream `b` of `seed`, so the result
/// does not depend on how blocks are scheduled.
pub fn sample_hits(
    pred: &MembershipPredicate,
    rank: usize,
    n: usize,
    samples: u64,
    seed: u64,
) -> u64 {
    let blocks = samples.div_ceil(SAMPLE_CHUNK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = SAMPLE_CHUNK.min(samples - b * SAMPLE_CHUNK);
            (0..count)
                .filter(|_| pred.contains(&random_reduced_word(&mut rng, rank, n)))
                .count() as u64
        })
        .sum()
}

pub fn rho_sample(
    pred: &MembershipPredicate,
    rank: usize,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<DensityRecord, DensityError> {
    if samples == 0 {
        return Err(DensityError::NoSamples);
    }
    let hits = sample_hits(pred, rank, n, samples, seed);
    let (ci_low, ci_high) = wilson_interval(hits, samples, Z95);
    Ok(DensityRecord {
        n,
        sphere_size: sphere_size_u64(rank, n).unwrap_or(u64::MAX),
        hits,
        samples: Some(samples),
        rho: hits as f64 / samples as f64,
        ci_low,
        ci_high,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayVerdict {
    /// `t > 1`: the data look like `O(t^-n)` decay. Never a proof.
    Consistent,
    Inconsistent,
    ExactlyZero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub t_hat: Option<f64>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// `log rho_n` minus the fitted line, per used point.
    pub residuals: Vec<(usize, f64)>,
    /// Points dropped because their density is zero.
    pub excluded: Vec<usize>,
    pub verdict: DecayVerdict,
}

/// Least-squares fit of `log rho_n` against `n`; `t_hat = exp(-slope)`.
pub fn decay_fit(points: &[(usize, f64)]) -> Result<DecayFit, DensityError> {
    let (used, excluded): (Vec<_>, Vec<_>) = points.iter().partition(|(_, r)| *r > 0.0);
    let excluded: Vec<usize> = excluded.iter().map(|(n, _)| *n).collect();
    if used.is_empty() && !points.is_empty() {
        return Ok(DecayFit {
            t_hat: None,
            slope: None,
            intercept: None,
            residuals: Vec::new(),
            excluded,
            verdict: DecayVerdict::ExactlyZero,
        });
    }
    if used.len() < 3 {
        return Err(DensityError::TooFewPoints(used.len()));
    }
    let m = used.len() as f64;
    let xs: Vec<f64> = used.iter().map(|(n, _)| *n as f64).collect();
    let ys: Vec<f64> = used.iter().map(|(_, r)| r.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let t_hat = (-slope).exp();
    let residuals = used
        .iter()
        .zip(xs.iter().zip(&ys))
        .map(|((n, _), (x, y))| (*n, y - (intercept + slope * x)))
        .collect();
    Ok(DecayFit {
        t_hat: Some(t_hat),
        slope: Some(slope),
        intercept: Some(intercept),
        residuals,
        excluded,
        verdict: if t_hat > 1.0 + 1e-9 {
            DecayVerdict::Consistent
        } else {
            DecayVerdict::Inconsistent
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CogrowthPoint {
    pub k: usize,
    pub count: u64,
    pub root: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CogrowthProfile {
    pub points: Vec<CogrowthPoint>,
    /// `2m - 1`, the value of the lim sup exactly for amenable quotients.
    pub reference: u64,
}

/// `|N n S_k|^(1/k)` for each `k` in `ks` (the value at `k = 0` is the count).
pub fn cogrowth_profile(
    pred: &MembershipPredicate,
    rank: usize,
    ks: impl IntoIterator<Item = usize>,
    cap: u64,
) -> Result<CogrowthProfile, DensityError> {
    let mut points = Vec::new();
    for k in ks {
        let (count, _) = count_exact(pred, rank, k, cap)?;
        let root = if k == 0 {
            count as f64
        } else {
            (count as f64).powf(1.0 / k as f64)
        };
        points.push(CogrowthPoint { k, count, root });
    }
    Ok(CogrowthProfile {
        points,
        reference: 2 * rank as u64 - 1,
    })
}

/// Both sides of `rho_k(uN) <= rho_{k-m}(N) + ... + rho_{k+m}(N)`, `m = |u|`,
/// together with the underlying count bound
/// `|uN n S_k| <= |N n S_(k-m)| + ... + |N n S_(k+m)|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranslationCheck {
    pub k: usize,
    pub m: usize,
    #[serde(with = "ratio_string")]
    pub lhs: Rational,
    #[serde(with = "ratio_string")]
    pub rhs: Rational,
    pub coset_count: u64,
    pub count_bound: u64,
}

impl TranslationCheck {
    pub fn density_holds(&self) -> bool {
        self.lhs <= self.rhs
    }

    pub fn count_holds(&self) -> bool {
        self.coset_count <= self.count_bound
    }
}

pub fn translation_check(
    u: &Word,
    subgroup: &MembershipPredicate,
    rank: usize,
    k: usize,
    cap: u64,
) -> Result<TranslationCheck, DensityError> {
    let m = u.len();
    let coset = MembershipPredicate::Coset {
        u_inverse: u.inverse(),
        of: Box::new(subgroup.clone()),
    };
    let lhs = rho_exact(&coset, rank, k, cap)?;
    let mut rhs = Rational::zero();
    let mut count_bound = 0;
    for j in k.saturating_sub(m)..=k + m {
        let d = rho_exact(subgroup, rank, j, cap)?;
        count_bound += d.hits;
        rhs += d.rho;
    }
    Ok(TranslationCheck {
        k,
        m,
        lhs: lhs.rho,
        rhs,
        coset_count: lhs.hits,
        count_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DensityMode {
    Exact,
    Sampled {
        samples: u64,
        seed: u64,
        sampler: String,
    },
}

/// A density sweep over a range of `n`, with its decay fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    #[serde(flatten)]
    pub mode: DensityMode,
    pub predicate: String,
    pub rank: usize,
    pub records: Vec<DensityRecord>,
    pub fit: Option<DecayFit>,
}

impl DensityReport {
    pub fn exact(
        spec: &PredicateSpec,
        alphabet: &Alphabet,
        ns: impl IntoIterator<Item = usize>,
        cap: u64,
    ) -> Result<Self, DensityError> {
        let pred = MembershipPredicate::compile(spec, alphabet)?;
        let records = ns
            .into_iter()
            .map(|n| rho_exact(&pred, alphabet.rank(), n, cap).map(|d| d.record()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::finish(DensityMode::Exact, spec, alphabet, records))
    }

    pub fn sampled(
        spec: &PredicateSpec,
        alphabet: &Alphabet,
        ns: impl IntoIterator<Item = usize>,
        samples: u64,
        seed: u64,
    ) -> Result<Self, DensityError> {
        let pred = MembershipPredicate::compile(spec, alphabet)?;
        let records = ns
            .into_iter()
            .map(|n| rho_sample(&pred, alphabet.rank(), n, samples, seed))
            .collect::<Result<Vec<_>, _>>()?;
        let mode = DensityMode::Sampled {
            samples,
            seed,
            sampler: SAMPLER_ID.into(),
        };
        Ok(Self::finish(mode, spec, alphabet, records))
    }

    fn finish(
        mode: DensityMode,
        spec: &PredicateSpec,
        alphabet: &Alphabet,
        records: Vec<DensityRecord>,
    ) -> Self {
        let points: Vec<(usize, f64)> = records
            .iter()
            .filter(|r| r.n > 0)
            .map(|r| (r.n, r.rho))
            .collect();
        DensityReport {
            mode,
            predicate: spec.describe(),
            rank: alphabet.rank(),
            records,
            fit: decay_fit(&points).ok(),
        }
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("n,sphere_size,hits_or_estimate,rho,ci_low,ci_high\n");
        for r in &self.records {
            let hits = match r.samples {
                None => r.hits.to_string(),
                Some(_) => format!("{}", r.rho),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.n, r.sphere_size, hits, r.rho, r.ci_low, r.ci_high
            );
        }
        out
    }

    /// JSON header: everything except the per-row records.
    pub fn header(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("records");
            obj.insert(
                "t_hat".into(),
                serde_json::json!(self.fit.as_ref().and_then(|f| f.t_hat)),
            );
        }
        v
    }
}
