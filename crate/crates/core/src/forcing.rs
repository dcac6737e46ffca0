//! Staged construction of a relation set `R` that collides every supplied
//! enumerator while keeping `<X | S u R>` Golod-Shafarevich.
//!
//! At stage `s`, every enumerator `W_e` with `e < s` that has not yet
//! contributed is scanned for two distinct members `u_{x1}, u_{x2}` of
//! `W_{e,s}` that agree in `F / D_{e+k+1} F`. The first such pair in Cantor
//! order of `(x1, x2)` contributes the relator `u_{x1} u_{x2}^-1`, and `W_e`
//! is marked satisfied. Every relator contributed by `W_e` therefore has
//! degree at least `e + k + 1`, so at most `max(i - k, 0)` relators have
//! degree `<= i` for any `i`, which is what keeps `H(t0)` negative.
//!
//! Correctness statements are relative to the supplied family: a finite list
//! of enumerators stands in for the list of all computably enumerable sets.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io;
use std::path::Path;
use std::sync::Arc;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::enumerators::{
    distinct_pairs, Enumerator, EnumeratorError, EnumeratorSpec, IndexedWord, StageSet,
};
use crate::gs::{
    dhat, evaluate_h, format_rational, histogram, ratio_string, tail_bound, DegreeHistogram,
    GsCertificate, GsError, Rational,
};
use crate::magnus::{SeriesContext, SeriesError, DEFAULT_MONOMIAL_CAP};
use crate::words::{index_to_word, pair_order_key, Alphabet, Word, WordError, WordIndex};
use crate::zassenhaus::{degree, DegreeValue, EqualityOracle};

pub const CHECKPOINT_FORMAT: &str = "dehn-forcing-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Truncation used to score the base relators `S` when none is configured.
pub const DEFAULT_BASE_TRUNCATION: usize = 16;

#[derive(Debug, Error)]
pub enum ForcingError {
    #[error("base relator {0} is the empty word")]
    EmptyBaseRelator(usize),
    #[error("enumerator index e = {0} appears twice in the family")]
    DuplicateEnumerator(u64),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Gs(#[from] GsError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Enumerator(#[from] EnumeratorError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Inputs of a forcing run. The certificate is derived from `S` and `t0` at
/// construction, so `k` always equals `compute_k(t0, |H(S, t0)|)`.
#[derive(Debug, Clone)]
pub struct ForcingConfig {
    alphabet: Alphabet,
    p: u32,
    base_relators: Vec<Word>,
    base_truncation: usize,
    certificate: GsCertificate,
    family: Vec<EnumeratorSpec>,
    pub stage_budget: u64,
}

impl ForcingConfig {
    pub fn new(
        alphabet: Alphabet,
        p: u32,
        base_relators: Vec<Word>,
        t0: Rational,
        family: Vec<EnumeratorSpec>,
        stage_budget: u64,
    ) -> Result<Self, ForcingError> {
        Self::with_base_truncation(
            alphabet,
            p,
            base_relators,
            t0,
            family,
            stage_budget,
            DEFAULT_BASE_TRUNCATION,
        )
    }

    pub fn with_base_truncation(
        alphabet: Alphabet,
        p: u32,
        base_relators: Vec<Word>,
        t0: Rational,
        mut family: Vec<EnumeratorSpec>,
        stage_budget: u64,
        base_truncation: usize,
    ) -> Result<Self, ForcingError> {
        if let Some(i) = base_relators.iter().position(Word::is_identity) {
            return Err(ForcingError::EmptyBaseRelator(i));
        }
        for r in &base_relators {
            if r.rank() != alphabet.rank() {
                return Err(WordError::RankMismatch {
                    left: r.rank(),
                    right: alphabet.rank(),
                }
                .into());
            }
        }
        family.sort_by_key(|s| s.e);
        if let Some(w) = family.windows(2).find(|w| w[0].e == w[1].e) {
            return Err(ForcingError::DuplicateEnumerator(w[0].e));
        }
        let base_truncation = capped_order(alphabet.rank(), base_truncation);
        let ctx = SeriesContext::new(p, alphabet.rank(), base_truncation)?;
        let hist = histogram(&base_relators, &ctx)?;
        let certificate = GsCertificate::new(&hist, dhat(&base_relators, p, alphabet.rank())?, t0)?;
        Ok(ForcingConfig {
            alphabet,
            p,
            base_relators,
            base_truncation,
            certificate,
            family,
            stage_budget,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn base_relators(&self) -> &[Word] {
        &self.base_relators
    }

    pub fn certificate(&self) -> &GsCertificate {
        &self.certificate
    }

    pub fn k(&self) -> u64 {
        self.certificate.k
    }

    pub fn family(&self) -> &[EnumeratorSpec] {
        &self.family
    }

    /// Level of the quotient `F / D_n F` in which `W_e` must collide.
    pub fn collision_level(&self, e: u64) -> usize {
        (e + self.k() + 1) as usize
    }

    /// SHA-256 over everything that determines the run except the stage
    /// budget, so that a checkpoint can be resumed with a larger budget.
    pub fn digest(&self) -> String {
        let doc = serde_json::json!({
            "generators": self.alphabet.names(),
            "p": self.p,
            "base_relators": self.base_relators.iter().map(|r| self.alphabet.format(r)).collect::<Vec<_>>(),
            "base_truncation": self.base_truncation,
            "t0": format_rational(&self.certificate.t0),
            "family": self.family,
        });
        hex::encode(Sha256::digest(doc.to_string().as_bytes()))
    }
}

/// Largest order not above `wanted` whose series universe fits the default cap.
fn capped_order(rank: usize, wanted: usize) -> usize {
    SeriesContext::max_order_within(rank, DEFAULT_MONOMIAL_CAP)
        .map_or(wanted, |m| wanted.min(m))
        .max(1)
}

/// One emitted relator with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelatorRecord {
    pub stage: u64,
    pub e: u64,
    pub x1: WordIndex,
    pub x2: WordIndex,
    pub relator: Word,
    pub degree: DegreeValue,
}

#[derive(Serialize, Deserialize)]
struct RecordRepr {
    stage: u64,
    e: u64,
    x1: WordIndex,
    x2: WordIndex,
    relator: String,
    #[serde(with = "degree_json")]
    degree: DegreeValue,
}

impl RelatorRecord {
    /// One line of the relator log (no trailing newline), e.g.
    /// `{"stage":6,"e":0,"x1":...,"x2":...,"relator":"x1^-8","degree":8}`.
    pub fn log_line(&self, alphabet: &Alphabet) -> String {
        serde_json::to_string(&self.repr(alphabet)).expect("records serialize")
    }

    fn repr(&self, alphabet: &Alphabet) -> RecordRepr {
        RecordRepr {
            stage: self.stage,
            e: self.e,
            x1: self.x1.clone(),
            x2: self.x2.clone(),
            relator: alphabet.format(&self.relator),
            degree: self.degree,
        }
    }

    fn from_repr(r: RecordRepr, alphabet: &Alphabet) -> Result<Self, WordError> {
        Ok(RelatorRecord {
            stage: r.stage,
            e: r.e,
            x1: r.x1,
            x2: r.x2,
            relator: alphabet.parse(&r.relator)?,
            degree: r.degree,
        })
    }
}

/// Degrees as JSON: a number when finite, `">=N"` when unresolved, `"inf"`.
pub mod degree_json {
    use super::DegreeValue;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &DegreeValue, s: S) -> Result<S::Ok, S::Error> {
        match d {
            DegreeValue::Finite(m) => s.serialize_u32(*m),
            other => s.serialize_str(&other.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DegreeValue, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u32),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(m) => Ok(DegreeValue::Finite(m)),
            Repr::Str(s) if s == "inf" => Ok(DegreeValue::Infinite),
            Repr::Str(s) => s
                .strip_prefix(">=")
                .and_then(|n| n.parse().ok())
                .map(DegreeValue::AtLeast)
                .ok_or_else(|| serde::de::Error::custom(format!("bad degree {s:?}"))),
        }
    }
}

/// Progress of a run: stages `0..next_stage` are done.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ForcingState {
    pub next_stage: u64,
    pub satisfied: BTreeSet<u64>,
    pub relators: Vec<RelatorRecord>,
    /// For each still unsatisfied `e`, the number of candidate pairs in its
    /// most recent scan.
    pub examined: BTreeMap<u64, u64>,
}

impl ForcingState {
    /// The relator log, one JSON object per line, each line newline-terminated.
    pub fn log(&self, alphabet: &Alphabet) -> String {
        self.relators
            .iter()
            .map(|r| r.log_line(alphabet) + "\n")
            .collect()
    }

    pub fn relator_words(&self) -> Vec<Word> {
        self.relators.iter().map(|r| r.relator.clone()).collect()
    }
}

/// Cached class keys and oracles shared across stages.
pub struct ForcingEngine<'a> {
    config: &'a ForcingConfig,
    enumerators: Vec<Enumerator>,
    oracles: HashMap<usize, EqualityOracle>,
    keys: HashMap<u64, HashMap<WordIndex, Vec<u16>>>,
    degree_contexts: HashMap<usize, Arc<SeriesContext>>,
}

impl<'a> ForcingEngine<'a> {
    pub fn new(config: &'a ForcingConfig) -> Result<Self, ForcingError> {
        let enumerators = config
            .family
            .iter()
            .map(|spec| Enumerator::new(spec, &config.alphabet, config.p))
            .collect::<Result<_, _>>()?;
        Ok(ForcingEngine {
            config,
            enumerators,
            oracles: HashMap::new(),
            keys: HashMap::new(),
            degree_contexts: HashMap::new(),
        })
    }

    fn oracle(&mut self, level: usize) -> Result<&EqualityOracle, ForcingError> {
        if !self.oracles.contains_key(&level) {
            let oracle = EqualityOracle::new(level, self.config.p, self.config.alphabet.rank())?;
            self.oracles.insert(level, oracle);
        }
        Ok(&self.oracles[&level])
    }

    /// Degree of an emitted relator, resolved to `max(e + k + 8, 16)` where
    /// the series cap allows.
    fn record_degree(&mut self, relator: &Word, level: usize) -> Result<DegreeValue, ForcingError> {
        let order = capped_order(self.config.alphabet.rank(), (level + 7).max(16));
        let ctx = match self.degree_contexts.get(&order) {
            Some(c) => Arc::clone(c),
            None => {
                let c = SeriesContext::new(self.config.p, self.config.alphabet.rank(), order)?;
                self.degree_contexts.insert(order, Arc::clone(&c));
                c
            }
        };
        Ok(degree(relator, &ctx)?)
    }

    /// Runs the single stage `state.next_stage` and returns the relators it
    /// emitted.
    pub fn step(&mut self, state: &mut ForcingState) -> Result<Vec<RelatorRecord>, ForcingError> {
        let s = state.next_stage;
        let mut emitted = Vec::new();
        for i in 0..self.enumerators.len() {
            let e = self.enumerators[i].e();
            if e >= s || state.satisfied.contains(&e) {
                continue;
            }
            let set = self.enumerators[i].enumerate_up_to(s)?;
            let level = self.config.collision_level(e);
            let n = set.len() as u64;
            state.examined.insert(e, n * n.saturating_sub(1));
            let hit = {
                self.oracle(level)?;
                let oracle = &self.oracles[&level];
                let cache = self.keys.entry(e).or_default();
                first_collision_grouped(&set, oracle, cache)?
            };
            if let Some((u, v)) = hit {
                let relator = u.word.multiply(&v.word.inverse())?;
                let degree = self.record_degree(&relator, level)?;
                let record = RelatorRecord {
                    stage: s,
                    e,
                    x1: u.index.clone(),
                    x2: v.index.clone(),
                    relator,
                    degree,
                };
                state.satisfied.insert(e);
                state.examined.remove(&e);
                self.keys.remove(&e);
                state.relators.push(record.clone());
                emitted.push(record);
            }
        }
        state.next_stage = s + 1;
        Ok(emitted)
    }

    /// Runs stages up to (excluding) the configured budget, reporting each
    /// relator as it is found.
    pub fn run_until_budget(
        &mut self,
        state: &mut ForcingState,
        mut on_relator: impl FnMut(&RelatorRecord) -> Result<(), ForcingError>,
    ) -> Result<(), ForcingError> {
        while state.next_stage < self.config.stage_budget {
            for r in self.step(state)? {
                on_relator(&r)?;
            }
        }
        Ok(())
    }
}

/// Runs stages `0..stage_budget` from scratch.
pub fn run(config: &ForcingConfig) -> Result<ForcingState, ForcingError> {
    resume(config, ForcingState::default())
}

/// Continues a run from `state` up to the configured budget.
pub fn resume(
    config: &ForcingConfig,
    mut state: ForcingState,
) -> Result<ForcingState, ForcingError> {
    ForcingEngine::new(config)?.run_until_budget(&mut state, |_| Ok(()))?;
    Ok(state)
}

/// First pair in Cantor order whose members agree in `F / D_n F`, found by
/// bucketing members by their image mod `I^n`.
pub fn first_collision_grouped<'s>(
    set: &'s StageSet,
    oracle: &EqualityOracle,
    cache: &mut HashMap<WordIndex, Vec<u16>>,
) -> Result<Option<(&'s IndexedWord, &'s IndexedWord)>, ForcingError> {
    let mut classes: HashMap<Vec<u16>, Vec<&IndexedWord>> = HashMap::new();
    for m in &set.members {
        let key = match cache.get(&m.index) {
            Some(k) => k.clone(),
            None => {
                let k = oracle.class_key(&m.word)?;
                cache.insert(m.index.clone(), k.clone());
                k
            }
        };
        classes.entry(key).or_default().push(m);
    }
    // Within a class sorted by index a1 < a2 < ..., the Cantor-least ordered
    // pair is (a1, a2): least sum, then least first coordinate.
    let best = classes
        .values()
        .filter(|c| c.len() >= 2)
        .map(|c| (c[0], c[1]))
        .min_by_key(|(a, b)| pair_order_key(&a.index, &b.index));
    Ok(best)
}

/// Same result as [`first_collision_grouped`], by testing `u v^-1` for every
/// ordered pair in Cantor order.
pub fn first_collision_literal<'s>(
    set: &'s StageSet,
    oracle: &EqualityOracle,
) -> Result<Option<(&'s IndexedWord, &'s IndexedWord)>, ForcingError> {
    for (u, v) in distinct_pairs(set) {
        if oracle.equal(&u.word, &v.word)? {
            return Ok(Some((u, v)));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LViolation {
    pub e: u64,
    pub count: u64,
    pub bound: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LReport {
    pub violations: Vec<LViolation>,
    /// Levels where some relator's degree was not resolved deeply enough.
    pub indeterminate: Vec<u64>,
}

impl LReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty() && self.indeterminate.is_empty()
    }
}

/// Largest `e` for which every recorded degree is known to be `<= e` or
/// `> e`, and at least `k`.
pub fn resolved_depth(relators: &[RelatorRecord], k: u64) -> u64 {
    let unresolved = relators
        .iter()
        .filter_map(|r| match r.degree {
            DegreeValue::AtLeast(m) => Some(m as u64 - 1),
            _ => None,
        })
        .min();
    let deepest = relators
        .iter()
        .filter_map(|r| match r.degree {
            DegreeValue::Finite(m) => Some(m as u64),
            _ => None,
        })
        .max()
        .unwrap_or(0)
        .max(k);
    unresolved.map_or(deepest, |u| u.max(k))
}

/// Checks `|{r in R : deg r <= e}| <= max(e - k, 0)` for every `e <= e_max`.
pub fn verify_l(relators: &[RelatorRecord], k: u64, e_max: u64) -> LReport {
    let mut report = LReport::default();
    for e in 0..=e_max {
        let mut count = 0;
        let mut unknown = false;
        for r in relators {
            match r.degree.is_at_most(e as u32) {
                Some(true) => count += 1,
                Some(false) => {}
                None => unknown = true,
            }
        }
        let bound = e.saturating_sub(k);
        if count > bound {
            report.violations.push(LViolation { e, count, bound });
        } else if unknown {
            report.indeterminate.push(e);
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MEntry {
    Satisfied {
        stage: u64,
        problems: Vec<String>,
    },
    /// No collision yet; infinitude of `W_e` is not decidable, so this is a
    /// diagnostic only.
    Unsatisfied {
        candidates_examined: u64,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MReport {
    pub entries: BTreeMap<u64, MEntry>,
    /// Problems not attached to a single enumerator.
    pub global: Vec<String>,
}

impl MReport {
    pub fn passes(&self) -> bool {
        self.global.is_empty()
            && self
                .entries
                .values()
                .all(|e| !matches!(e, MEntry::Satisfied { problems, .. } if !problems.is_empty()))
    }
}

/// Replays every recorded collision: both words belong to `W_{e,s}` at the
/// recorded stage, they are distinct, they agree in `F / D_{e+k+1} F`, and the
/// relator is their quotient.
pub fn verify_m(state: &ForcingState, config: &ForcingConfig) -> Result<MReport, ForcingError> {
    let mut report = MReport::default();
    let rank = config.alphabet.rank();
    let mut per_e: BTreeMap<u64, usize> = BTreeMap::new();
    for r in &state.relators {
        *per_e.entry(r.e).or_default() += 1;
    }
    for (e, n) in &per_e {
        if *n > 1 {
            report
                .global
                .push(format!("W_{e} contributed {n} relators"));
        }
    }
    let sources: BTreeSet<u64> = per_e.keys().copied().collect();
    if sources != state.satisfied {
        report
            .global
            .push("satisfied set differs from relator sources".into());
    }
    for spec in &config.family {
        let e = spec.e;
        let Some(r) = state.relators.iter().find(|r| r.e == e) else {
            report.entries.insert(
                e,
                MEntry::Unsatisfied {
                    candidates_examined: state.examined.get(&e).copied().unwrap_or(0),
                },
            );
            continue;
        };
        let mut problems = Vec::new();
        let en = Enumerator::new(spec, &config.alphabet, config.p)?;
        let set = en.enumerate_up_to(r.stage)?;
        let u = index_to_word(&r.x1, rank);
        let v = index_to_word(&r.x2, rank);
        if !set.contains(&u) {
            problems.push(format!("u_{} is not in W_{{{e},{}}}", r.x1, r.stage));
        }
        if !set.contains(&v) {
            problems.push(format!("u_{} is not in W_{{{e},{}}}", r.x2, r.stage));
        }
        if u == v {
            problems.push("recorded words coincide".into());
        }
        if u.multiply(&v.inverse())? != r.relator {
            problems.push("relator is not u_x1 u_x2^-1".into());
        }
        let level = config.collision_level(e);
        if !EqualityOracle::new(level, config.p, rank)?.equal(&u, &v)? {
            problems.push(format!("words differ in F/D_{level}F"));
        }
        if r.degree.is_at_least(level as u32) == Some(false) {
            problems.push(format!("recorded degree {} is below {level}", r.degree));
        }
        report.entries.insert(
            e,
            MEntry::Satisfied {
                stage: r.stage,
                problems,
            },
        );
    }
    for r in &state.relators {
        if !config.family.iter().any(|s| s.e == r.e) {
            report
                .global
                .push(format!("relator from unknown enumerator e = {}", r.e));
        }
    }
    Ok(report)
}

/// Exact values behind the Golod-Shafarevich check of `<X | S u R>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GsReport {
    #[serde(with = "ratio_string")]
    pub t0: Rational,
    pub k: u64,
    #[serde(with = "ratio_string")]
    pub base_h: Rational,
    #[serde(with = "ratio_string")]
    pub tail: Rational,
    /// `H(S, t0) + t0^(k+1) / (1 - t0)^2`.
    #[serde(with = "ratio_string")]
    pub bound: Rational,
    #[serde(with = "ratio_string")]
    pub total_h: Rational,
    pub dhat: usize,
    pub histogram: DegreeHistogram,
}

impl GsReport {
    pub fn passes(&self) -> bool {
        self.total_h <= self.bound && self.bound.is_negative()
    }
}

/// Recomputes `H(S u R, t0)` and compares it with `H(S, t0)` plus the tail
/// bound. Relators of `R` are scored at their recorded degrees.
pub fn certify_gs(state: &ForcingState, config: &ForcingConfig) -> Result<GsReport, ForcingError> {
    let rank = config.alphabet.rank();
    let cert = &config.certificate;
    let ctx = SeriesContext::new(config.p, rank, config.base_truncation)?;
    let base_hist = histogram(&config.base_relators, &ctx)?;
    let base_h = evaluate_h(
        &base_hist,
        dhat(&config.base_relators, config.p, rank)?,
        &cert.t0,
    )?;

    let mut hist = base_hist;
    for r in &state.relators {
        if r.relator.is_identity() {
            return Err(GsError::EmptyRelator(0).into());
        }
        hist.record(r.degree);
    }
    let mut all = config.base_relators.clone();
    all.extend(state.relator_words());
    let dhat_total = dhat(&all, config.p, rank)?;
    let total_h = evaluate_h(&hist, dhat_total, &cert.t0)?;
    let tail = tail_bound(cert.k, &cert.t0)?;
    Ok(GsReport {
        t0: cert.t0.clone(),
        k: cert.k,
        bound: &base_h + &tail,
        base_h,
        tail,
        total_h,
        dhat: dhat_total,
        histogram: hist,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckpointFile {
    format: String,
    version: u32,
    config_digest: String,
    next_stage: u64,
    satisfied: Vec<u64>,
    examined: BTreeMap<u64, u64>,
    relators: Vec<RecordRepr>,
}

/// Writes `state` as versioned JSON bound to the config digest.
pub fn checkpoint_save(
    state: &ForcingState,
    config: &ForcingConfig,
    path: &Path,
) -> Result<(), ForcingError> {
    let file = CheckpointFile {
        format: CHECKPOINT_FORMAT.into(),
        version: CHECKPOINT_VERSION,
        config_digest: config.digest(),
        next_stage: state.next_stage,
        satisfied: state.satisfied.iter().copied().collect(),
        examined: state.examined.clone(),
        relators: state
            .relators
            .iter()
            .map(|r| r.repr(&config.alphabet))
            .collect(),
    };
    let json =
        serde_json::to_string_pretty(&file).map_err(|e| ForcingError::Checkpoint(e.to_string()))?;
    // write-then-rename so an interrupted save never leaves a torn file
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, json + "\n")?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn checkpoint_load(path: &Path, config: &ForcingConfig) -> Result<ForcingState, ForcingError> {
    let text = fs::read_to_string(path)?;
    let file: CheckpointFile = serde_json::from_str(&text)
        .map_err(|e| ForcingError::Checkpoint(format!("{}: {e}", path.display())))?;
    if file.format != CHECKPOINT_FORMAT {
        return Err(ForcingError::Checkpoint(format!(
            "unexpected format {:?}",
            file.format
        )));
    }
    if file.version != CHECKPOINT_VERSION {
        return Err(ForcingError::Checkpoint(format!(
            "unsupported version {} (expected {CHECKPOINT_VERSION})",
            file.version
        )));
    }
    if file.config_digest != config.digest() {
        return Err(ForcingError::Checkpoint(
            "checkpoint was written for a different configuration".into(),
        ));
    }
    let relators = file
        .relators
        .into_iter()
        .map(|r| RelatorRecord::from_repr(r, &config.alphabet))
        .collect::<Result<_, _>>()?;
    Ok(ForcingState {
        next_stage: file.next_stage,
        satisfied: file.satisfied.into_iter().collect(),
        relators,
        examined: file.examined,
    })
}
