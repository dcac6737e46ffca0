//! Normal-closure enumeration, budgeted coset membership, and the filter that
//! keeps only pairwise inequivalent words of a stream.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::words::{Sphere, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecisionError {
    #[error("relator list is empty")]
    NoRelators,
    #[error("relator {0} is the empty word")]
    EmptyRelator(usize),
    #[error("no coset representatives given")]
    NoRepresentatives,
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Deterministic enumeration of the normal closure `<<R>>`.
///
/// Generation `g` covers every reduced product of at most `g` conjugates
/// `c r^(+-1) c^-1` with `|c| <= g`. Inside a generation, tuples of conjugates
/// are visited by increasing sum of their positions in the conjugate list
/// (short conjugators first), then by length, then lexicographically. Words
/// already yielded are skipped, so every element appears exactly once.
pub struct NormalClosureEnumerator {
    rank: usize,
    relators: Vec<Word>,
    generation: usize,
    conjugates: Vec<Word>,
    /// Size of the conjugate list of the previous generation.
    previous: usize,
    sum: usize,
    length: usize,
    tuple: Option<Vec<usize>>,
    seen: HashSet<Word>,
    yielded: u64,
}

impl NormalClosureEnumerator {
    pub fn new(relators: &[Word]) -> Result<Self, DecisionError> {
        let first = relators.first().ok_or(DecisionError::NoRelators)?;
        let rank = first.rank();
        for (i, r) in relators.iter().enumerate() {
            if r.is_identity() {
                return Err(DecisionError::EmptyRelator(i));
            }
            if r.rank() != rank {
                return Err(WordError::RankMismatch {
                    left: rank,
                    right: r.rank(),
                }
                .into());
            }
        }
        Ok(NormalClosureEnumerator {
            rank,
            relators: relators.to_vec(),
            generation: 0,
            conjugates: Vec::new(),
            previous: 0,
            sum: 0,
            length: 0,
            tuple: None,
            seen: HashSet::new(),
            yielded: 0,
        })
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Number of distinct words yielded so far.
    pub fn yielded(&self) -> u64 {
        self.yielded
    }

    fn conjugates_up_to(&self, g: usize) -> Vec<Word> {
        let mut out = Vec::new();
        for len in 0..=g {
            for c in Sphere::new(self.rank, len).expect("rank checked") {
                let ci = c.inverse();
                for r in &self.relators {
                    for rr in [r.clone(), r.inverse()] {
                        out.push(
                            c.multiply(&rr)
                                .and_then(|x| x.multiply(&ci))
                                .expect("ranks agree"),
                        );
                    }
                }
            }
        }
        out
    }

    fn start_generation(&mut self, g: usize) {
        self.generation = g;
        self.previous = self.conjugates.len();
        self.conjugates = self.conjugates_up_to(g);
        self.sum = 0;
        self.length = 1;
        self.tuple = first_composition(0, 1, self.conjugates.len());
    }

    /// Moves to the next tuple of the current generation, or `false` when the
    /// generation is exhausted.
    fn advance(&mut self) -> bool {
        let bound = self.conjugates.len();
        let g = self.generation;
        if let Some(t) = self.tuple.as_mut() {
            if next_composition(t, bound) {
                return true;
            }
        }
        loop {
            if self.length < g {
                self.length += 1;
            } else {
                self.length = 1;
                self.sum += 1;
                if self.sum > g * (bound - 1) {
                    self.tuple = None;
                    return false;
                }
            }
            self.tuple = first_composition(self.sum, self.length, bound);
            if self.tuple.is_some() {
                return true;
            }
        }
    }

    fn current_product(&self) -> Option<Word> {
        let t = self.tuple.as_ref()?;
        // tuples lying entirely in the previous generation were handled there
        if self.length < self.generation && t.iter().all(|&i| i < self.previous) {
            return None;
        }
        let mut letters = Vec::new();
        for &i in t {
            letters.extend_from_slice(self.conjugates[i].letters());
        }
        Some(Word::reduce(self.rank, letters))
    }
}

impl Iterator for NormalClosureEnumerator {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.generation == 0 && self.conjugates.is_empty() {
            self.start_generation(1);
            let id = Word::identity(self.rank);
            self.seen.insert(id.clone());
            self.yielded += 1;
            return Some(id);
        }
        loop {
            if self.tuple.is_none() {
                let g = self.generation + 1;
                self.start_generation(g);
            }
            let candidate = self.current_product();
            if !self.advance() {
                self.tuple = None;
            }
            if let Some(w) = candidate {
                if self.seen.insert(w.clone()) {
                    self.yielded += 1;
                    return Some(w);
                }
            }
        }
    }
}

/// Lexicographically least `parts`-tuple with entries `< bound` summing to `sum`.
fn first_composition(sum: usize, parts: usize, bound: usize) -> Option<Vec<usize>> {
    if bound == 0 || sum > parts * (bound - 1) {
        return None;
    }
    let mut t = vec![0; parts];
    let mut rest = sum;
    for slot in t.iter_mut().rev() {
        let v = rest.min(bound - 1);
        *slot = v;
        rest -= v;
    }
    Some(t)
}

/// Next tuple in lexicographic order with the same sum and bound.
fn next_composition(t: &mut [usize], bound: usize) -> bool {
    let n = t.len();
    let mut tail = 0;
    for i in (0..n.saturating_sub(1)).rev() {
        tail += t[i + 1];
        if t[i] + 1 < bound && tail > 0 {
            t[i] += 1;
            let mut rest = tail - 1;
            for slot in t[i + 1..].iter_mut().rev() {
                let v = rest.min(bound - 1);
                *slot = v;
                rest -= v;
            }
            return true;
        }
    }
    false
}

pub fn closure_stream(relators: &[Word]) -> Result<NormalClosureEnumerator, DecisionError> {
    NormalClosureEnumerator::new(relators)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosetOutcome {
    /// 1-based index of the representative whose coset contains the word.
    Index(usize),
    Timeout {
        consumed: u64,
    },
}

/// Looks for `rep_i w^-1` among the first `budget` elements of the closure
/// stream and returns the first `i` found. An empty test word answers at once.
pub fn coset_decide(
    w: &Word,
    reps: &[Word],
    relators: &[Word],
    budget: u64,
) -> Result<CosetOutcome, DecisionError> {
    if reps.is_empty() {
        return Err(DecisionError::NoRepresentatives);
    }
    let winv = w.inverse();
    let mut targets: HashMap<Word, usize> = HashMap::new();
    for (i, rep) in reps.iter().enumerate() {
        let t = rep.multiply(&winv)?;
        if t.is_identity() {
            return Ok(CosetOutcome::Index(i + 1));
        }
        targets.entry(t).or_insert(i + 1);
    }
    let mut consumed = 0;
    for x in closure_stream(relators)?.take(budget as usize) {
        consumed += 1;
        if let Some(&i) = targets.get(&x) {
            return Ok(CosetOutcome::Index(i));
        }
    }
    Ok(CosetOutcome::Timeout { consumed })
}

/// Keeps the elements of `words` that are inequivalent under `eq` to every
/// element kept before. Each candidate is compared with all kept words.
pub struct DistinctFilter<I, F> {
    inner: I,
    eq: F,
    kept: Vec<Word>,
}

impl<I, F> DistinctFilter<I, F> {
    pub fn kept(&self) -> &[Word] {
        &self.kept
    }
}

impl<I, F, E> Iterator for DistinctFilter<I, F>
where
    I: Iterator<Item = Result<Word, E>>,
    F: FnMut(&Word, &Word) -> Result<bool, E>,
{
    type Item = Result<Word, E>;

    fn next(&mut self) -> Option<Self::Item> {
        'outer: loop {
            let w = match self.inner.next()? {
                Ok(w) => w,
                Err(e) => return Some(Err(e)),
            };
            for k in &self.kept {
                match (self.eq)(k, &w) {
                    Ok(true) => continue 'outer,
                    Ok(false) => {}
                    Err(e) => return Some(Err(e)),
                }
            }
            self.kept.push(w.clone());
            return Some(Ok(w));
        }
    }
}

pub fn distinct_filter<I, F, E>(words: I, eq: F) -> DistinctFilter<I::IntoIter, F>
where
    I: IntoIterator<Item = Result<Word, E>>,
    F: FnMut(&Word, &Word) -> Result<bool, E>,
{
    DistinctFilter {
        inner: words.into_iter(),
        eq,
        kept: Vec::new(),
    }
}
