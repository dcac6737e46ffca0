//! Degrees with respect to the Zassenhaus p-filtration `D_n F`, and the
//! equality test in the finite quotients `F / D_n F`.
//!
//! `f` lies in `D_n F` exactly when its Magnus image is `1 mod I^n`; the
//! degree of `f != 1` is the largest such `n`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::magnus::{magnus_embed, SeriesContext, SeriesError, TruncatedSeries};
use crate::words::Word;

/// Degree of a word as far as a given truncation can see.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeValue {
    Finite(u32),
    /// Nontrivial word whose image is `1` up to the truncation `N`; the
    /// payload is `N + 1`.
    AtLeast(u32),
    /// The identity.
    Infinite,
}

impl DegreeValue {
    /// Whether the degree is known to be at least `n`. `None` when the
    /// truncation is too shallow to tell.
    pub fn is_at_least(self, n: u32) -> Option<bool> {
        match self {
            DegreeValue::Finite(m) => Some(m >= n),
            DegreeValue::AtLeast(m) if m >= n => Some(true),
            DegreeValue::AtLeast(_) => None,
            DegreeValue::Infinite => Some(true),
        }
    }

    /// Whether the degree is known to be at most `n`.
    pub fn is_at_most(self, n: u32) -> Option<bool> {
        match self {
            DegreeValue::Finite(m) => Some(m <= n),
            DegreeValue::AtLeast(m) if m > n => Some(false),
            DegreeValue::AtLeast(_) => None,
            DegreeValue::Infinite => Some(false),
        }
    }

    /// Smallest degree consistent with this value.
    pub fn lower_bound(self) -> Option<u32> {
        match self {
            DegreeValue::Finite(m) | DegreeValue::AtLeast(m) => Some(m),
            DegreeValue::Infinite => None,
        }
    }
}

impl fmt::Display for DegreeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeValue::Finite(m) => write!(f, "{m}"),
            DegreeValue::AtLeast(m) => write!(f, ">={m}"),
            DegreeValue::Infinite => f.write_str("inf"),
        }
    }
}

pub fn degree(w: &Word, ctx: &Arc<SeriesContext>) -> Result<DegreeValue, SeriesError> {
    let image = magnus_embed(w, ctx)?;
    Ok(degree_of_image(w, &image))
}

fn degree_of_image(w: &Word, image: &TruncatedSeries) -> DegreeValue {
    if w.is_identity() {
        return DegreeValue::Infinite;
    }
    // the constant term of a Magnus image is always 1
    match image.augmentation_valuation() {
        Some(m) => DegreeValue::Finite(m as u32),
        None => DegreeValue::AtLeast(image.context().order() as u32 + 1),
    }
}

/// Equality in `F / D_n F` for a fixed `n`, `p` and rank, reusing one series
/// context across calls.
#[derive(Debug, Clone)]
pub struct EqualityOracle {
    level: usize,
    ctx: Arc<SeriesContext>,
}

impl EqualityOracle {
    /// The context has truncation order `N = n`.
    pub fn new(level: usize, p: u32, rank: usize) -> Result<Self, SeriesError> {
        if level == 0 {
            return Err(SeriesError::ZeroOrder);
        }
        Ok(EqualityOracle {
            level,
            ctx: SeriesContext::new(p, rank, level)?,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn context(&self) -> &Arc<SeriesContext> {
        &self.ctx
    }

    /// `u = v` in `F / D_n F`, decided by `pi(u v^-1) = 1 mod I^n`.
    pub fn equal(&self, u: &Word, v: &Word) -> Result<bool, SeriesError> {
        let q = u
            .multiply(&v.inverse())
            .map_err(|_| SeriesError::RankMismatch {
                word: v.rank(),
                context: u.rank(),
            })?;
        self.is_trivial(&q)
    }

    /// `w` lies in `D_n F`.
    pub fn is_trivial(&self, w: &Word) -> Result<bool, SeriesError> {
        let image = magnus_embed(w, &self.ctx)?;
        let low = image.coefficients_below(self.level);
        Ok(low[0] == 1 && low[1..].iter().all(|&c| c == 0))
    }

    /// The image of `w` modulo `I^n`; two words are equal in `F / D_n F` iff
    /// their keys are equal.
    pub fn class_key(&self, w: &Word) -> Result<Vec<u16>, SeriesError> {
        let image = magnus_embed(w, &self.ctx)?;
        Ok(image.coefficients_below(self.level).to_vec())
    }
}

/// One-shot equality test in `F / D_n F`.
pub fn equal_mod_dn(u: &Word, v: &Word, n: usize, p: u32) -> Result<bool, SeriesError> {
    if n <= 1 {
        // D_1 F = F
        if u.rank() != v.rank() {
            return Err(SeriesError::RankMismatch {
                word: v.rank(),
                context: u.rank(),
            });
        }
        return Ok(true);
    }
    EqualityOracle::new(n, p, u.rank())?.equal(u, v)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiltrationLaw {
    /// `deg [g, h] >= i + j`
    Commutator,
    /// `deg g^p >= p i`
    PowerOfG,
    /// `deg h^p >= p j`
    PowerOfH,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationViolation {
    pub sample: usize,
    pub law: FiltrationLaw,
    pub required: u32,
    pub found: DegreeValue,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FiltrationReport {
    pub violations: Vec<FiltrationViolation>,
    /// Checks the truncation was too shallow to decide.
    pub indeterminate: Vec<FiltrationViolation>,
    pub checked: usize,
}

impl FiltrationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `[D_i, D_j] <= D_{i+j}` and `(D_i)^p <= D_{ip}` on sample pairs
/// `(g, h)` with `deg g >= i`, `deg h >= j`.
pub fn filtration_check(
    samples: &[(Word, Word)],
    i: u32,
    j: u32,
    ctx: &Arc<SeriesContext>,
) -> Result<FiltrationReport, SeriesError> {
    let p = ctx.prime() as i64;
    let mut report = FiltrationReport::default();
    for (idx, (g, h)) in samples.iter().enumerate() {
        let comm = Word::commutator(g, h).map_err(|_| SeriesError::RankMismatch {
            word: h.rank(),
            context: g.rank(),
        })?;
        let checks = [
            (FiltrationLaw::Commutator, comm, i + j),
            (FiltrationLaw::PowerOfG, g.pow(p), p as u32 * i),
            (FiltrationLaw::PowerOfH, h.pow(p), p as u32 * j),
        ];
        for (law, word, required) in checks {
            let found = degree(&word, ctx)?;
            report.checked += 1;
            let entry = FiltrationViolation {
                sample: idx,
                law,
                required,
                found,
            };
            match found.is_at_least(required) {
                Some(true) => {}
                Some(false) => report.violations.push(entry),
                None => report.indeterminate.push(entry),
            }
        }
    }
    Ok(report)
}
