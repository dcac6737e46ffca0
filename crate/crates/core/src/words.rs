//! Free groups as freely reduced words.
//!
//! A [`Word`] over an alphabet of rank `d` is a freely reduced sequence of
//! [`Letter`]s. Letters are ordered `x1 < x1^-1 < x2 < x2^-1 < ...`, and that
//! order drives the shortlex enumeration `u_0, u_1, u_2, ...` of the whole
//! group: the empty word first, then every word of length 1, then length 2,
//! and so on.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("generator index {generator} out of range for rank {rank}")]
    GeneratorOutOfRange { generator: i64, rank: usize },
    #[error("alphabet mismatch: rank {left} vs rank {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("no image given for generator y{0}")]
    MissingImage(usize),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("cannot parse word {input:?} at byte {position}: {message}")]
    Parse {
        input: String,
        position: usize,
        message: String,
    },
}

/// A generator or inverse generator. The internal code is
/// `2 * (generator - 1) + inverse`, which is also the shortlex letter order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u32);

impl Letter {
    /// `generator` is 1-based.
    pub fn new(generator: usize, inverse: bool) -> Self {
        assert!(generator >= 1, "generators are numbered from 1");
        Letter(2 * (generator as u32 - 1) + inverse as u32)
    }

    pub(crate) fn from_code(code: u32) -> Self {
        Letter(code)
    }

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn generator(self) -> usize {
        (self.0 / 2) as usize + 1
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }
}

/// Generator count and printable names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    /// Alphabet `x1, ..., xd`.
    pub fn new(rank: usize) -> Result<Self, WordError> {
        if rank == 0 {
            return Err(WordError::InvalidAlphabet("rank must be at least 1".into()));
        }
        Ok(Alphabet {
            names: (1..=rank).map(|i| format!("x{i}")).collect(),
        })
    }

    pub fn with_names<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
    ) -> Result<Self, WordError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(WordError::InvalidAlphabet("rank must be at least 1".into()));
        }
        for (i, name) in names.iter().enumerate() {
            let mut chars = name.chars();
            let ok_start = chars.next().is_some_and(|c| c.is_alphabetic() || c == '_');
            let ok_rest = name.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !ok_start || !ok_rest {
                return Err(WordError::InvalidAlphabet(format!(
                    "generator name {name:?} must start with a letter and contain only letters, digits or '_'"
                )));
            }
            if names[..i].contains(name) {
                return Err(WordError::InvalidAlphabet(format!(
                    "duplicate generator name {name:?}"
                )));
            }
        }
        Ok(Alphabet { names })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn identity(&self) -> Word {
        Word::identity(self.rank())
    }

    /// Parses `x1*x2^-1`, `x1x1`, `(x1*x2)^3`, or `1` for the empty word.
    /// Unreduced input is reduced.
    pub fn parse(&self, input: &str) -> Result<Word, WordError> {
        let mut parser = Parser {
            alphabet: self,
            input,
            pos: 0,
        };
        let word = parser.product()?;
        parser.skip_separators();
        if parser.pos != input.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(word)
    }

    pub fn format(&self, word: &Word) -> String {
        assert_eq!(word.rank(), self.rank(), "word and alphabet ranks differ");
        format_with(word, |g| self.names[g - 1].as_str())
    }
}

/// A freely reduced word. Equality of words is equality in the free group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity(rank: usize) -> Self {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    /// The word `x_g` (1-based `g`).
    pub fn generator(rank: usize, g: usize) -> Result<Self, WordError> {
        Self::from_signed(rank, [g as i64])
    }

    /// Reduces a raw sequence of signed generator indices: `+g` is `x_g`,
    /// `-g` is `x_g^-1`.
    pub fn from_signed(rank: usize, raw: impl IntoIterator<Item = i64>) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        for g in raw {
            if g == 0 || g.unsigned_abs() as usize > rank {
                return Err(WordError::GeneratorOutOfRange { generator: g, rank });
            }
            letters.push(Letter::new(g.unsigned_abs() as usize, g < 0));
        }
        Ok(Self::reduce(rank, letters))
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(rank: usize, raw: impl IntoIterator<Item = Letter>) -> Self {
        let mut letters: Vec<Letter> = Vec::new();
        for l in raw {
            debug_assert!(l.generator() <= rank);
            if letters.last() == Some(&l.inverse()) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Word { rank, letters }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Signed generator indices, the inverse of [`Word::from_signed`].
    pub fn to_signed(&self) -> Vec<i64> {
        self.letters
            .iter()
            .map(|l| {
                let g = l.generator() as i64;
                if l.is_inverse() {
                    -g
                } else {
                    g
                }
            })
            .collect()
    }

    pub fn multiply(&self, other: &Word) -> Result<Word, WordError> {
        if self.rank != other.rank {
            return Err(WordError::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        // Only the junction can cancel.
        let mut overlap = 0;
        while overlap < self.len().min(other.len())
            && self.letters[self.len() - 1 - overlap] == other.letters[overlap].inverse()
        {
            overlap += 1;
        }
        let mut letters = Vec::with_capacity(self.len() + other.len() - 2 * overlap);
        letters.extend_from_slice(&self.letters[..self.len() - overlap]);
        letters.extend_from_slice(&other.letters[overlap..]);
        Ok(Word {
            rank: self.rank,
            letters,
        })
    }

    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `self^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let reps = k.unsigned_abs() as usize;
        Word::reduce(
            self.rank,
            base.letters.iter().copied().cycle().take(base.len() * reps),
        )
    }

    /// `[g, h] = g^-1 h^-1 g h`.
    pub fn commutator(g: &Word, h: &Word) -> Result<Word, WordError> {
        g.inverse().multiply(&h.inverse())?.multiply(g)?.multiply(h)
    }

    /// `c * self * c^-1`.
    pub fn conjugate_by(&self, c: &Word) -> Result<Word, WordError> {
        c.multiply(self)?.multiply(&c.inverse())
    }

    /// Replaces each generator `y_g` of this word by `images[g]`, a word over
    /// an alphabet of rank `target_rank`.
    pub fn substitute(
        &self,
        images: &BTreeMap<usize, Word>,
        target_rank: usize,
    ) -> Result<Word, WordError> {
        for image in images.values() {
            if image.rank != target_rank {
                return Err(WordError::RankMismatch {
                    left: image.rank,
                    right: target_rank,
                });
            }
        }
        let mut out = Vec::new();
        for l in &self.letters {
            let image = images
                .get(&l.generator())
                .ok_or(WordError::MissingImage(l.generator()))?;
            if l.is_inverse() {
                out.extend(image.letters.iter().rev().map(|x| x.inverse()));
            } else {
                out.extend_from_slice(&image.letters);
            }
        }
        Ok(Word::reduce(target_rank, out))
    }

    /// Sum of exponents of each generator, indexed from 0.
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut sums = vec![0i64; self.rank];
        for l in &self.letters {
            sums[l.generator() - 1] += if l.is_inverse() { -1 } else { 1 };
        }
        sums
    }
}

impl Mul for &Word {
    type Output = Word;

    /// Panics when the ranks differ; use [`Word::multiply`] to get an error instead.
    fn mul(self, rhs: &Word) -> Word {
        self.multiply(rhs)
            .expect("multiplying words of different ranks")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.rank).map(|i| format!("x{i}")).collect();
        f.write_str(&format_with(self, |g| names[g - 1].as_str()))
    }
}

fn format_with<'a>(word: &Word, name: impl Fn(usize) -> &'a str) -> String {
    if word.is_empty() {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    let mut i = 0;
    while i < word.len() {
        let l = word.letters[i];
        let mut run = 1;
        while i + run < word.len() && word.letters[i + run] == l {
            run += 1;
        }
        let n = name(l.generator());
        parts.push(match (run, l.is_inverse()) {
            (1, false) => n.to_string(),
            (r, false) => format!("{n}^{r}"),
            (r, true) => format!("{n}^-{r}"),
        });
        i += run;
    }
    parts.join("*")
}

struct Parser<'a> {
    alphabet: &'a Alphabet,
    input: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> WordError {
        WordError::Parse {
            input: self.input.to_string(),
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn rest(&self) -> &str {
        &self.input[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.input.len() - trimmed.len();
    }

    fn skip_separators(&mut self) {
        loop {
            self.skip_ws();
            if self.rest().starts_with('*') {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn product(&mut self) -> Result<Word, WordError> {
        let rank = self.alphabet.rank();
        let mut letters: Vec<Letter> = Vec::new();
        let mut any = false;
        loop {
            self.skip_separators();
            let Some(factor) = self.factor()? else { break };
            any = true;
            letters.extend_from_slice(factor.letters());
        }
        if !any {
            return Err(self.error("expected a generator, '1' or '('"));
        }
        Ok(Word::reduce(rank, letters))
    }

    fn factor(&mut self) -> Result<Option<Word>, WordError> {
        let rank = self.alphabet.rank();
        let base = if self.rest().starts_with('(') {
            self.pos += 1;
            let inner = self.product()?;
            self.skip_ws();
            if !self.rest().starts_with(')') {
                return Err(self.error("expected ')'"));
            }
            self.pos += 1;
            inner
        } else if let Some(g) = self.generator_name() {
            Word::generator(rank, g)?
        } else if self.rest().starts_with('1')
            && !self.rest()[1..].starts_with(|c: char| c.is_ascii_digit())
        {
            self.pos += 1;
            Word::identity(rank)
        } else {
            return Ok(None);
        };
        let exp = self.exponent()?;
        Ok(Some(base.pow(exp)))
    }

    /// Longest generator name at the cursor.
    fn generator_name(&mut self) -> Option<usize> {
        let rest = self.rest();
        let (g, name) = self
            .alphabet
            .names
            .iter()
            .enumerate()
            .filter(|(_, n)| rest.starts_with(n.as_str()))
            .max_by_key(|(_, n)| n.len())?;
        self.pos += name.len();
        Some(g + 1)
    }

    fn exponent(&mut self) -> Result<i64, WordError> {
        self.skip_ws();
        if !self.rest().starts_with('^') {
            return Ok(1);
        }
        self.pos += 1;
        self.skip_ws();
        let rest = self.rest();
        let digits_start = usize::from(rest.starts_with('-') || rest.starts_with('+'));
        let len = rest[digits_start..]
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len() - digits_start);
        if len == 0 {
            return Err(self.error("expected an integer exponent"));
        }
        let text = &rest[..digits_start + len];
        let value = text
            .parse::<i64>()
            .map_err(|_| self.error("exponent out of range"))?;
        self.pos += text.len();
        Ok(value)
    }
}

/// Position of a word in the shortlex enumeration `u_0, u_1, ...`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct WordIndex(pub BigUint);

impl WordIndex {
    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl From<u64> for WordIndex {
    fn from(i: u64) -> Self {
        WordIndex(BigUint::from(i))
    }
}

impl fmt::Display for WordIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Indices serialize as JSON numbers while they fit in a `u64`, and as
/// decimal strings beyond that.
impl Serialize for WordIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str(&self.0.to_str_radix(10)),
        }
    }
}

impl<'de> Deserialize<'de> for WordIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(WordIndex::from(v)),
            Repr::Str(s) => BigUint::parse_bytes(s.as_bytes(), 10)
                .map(WordIndex)
                .ok_or_else(|| serde::de::Error::custom(format!("invalid word index {s:?}"))),
        }
    }
}

/// `|S_n| = 2d(2d-1)^(n-1)` for `n >= 1`, and 1 for `n = 0`.
pub fn sphere_size(rank: usize, n: usize) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    BigUint::from(2 * rank) * num_traits::pow(BigUint::from(2 * rank - 1), n - 1)
}

/// Checked machine-width sphere size.
pub fn sphere_size_u64(rank: usize, n: usize) -> Result<u64, WordError> {
    if n == 0 {
        return Ok(1);
    }
    let base = (2 * rank as u64)
        .checked_sub(1)
        .ok_or(WordError::Overflow("sphere size"))?;
    let mut size = 2 * rank as u64;
    for _ in 1..n {
        size = size
            .checked_mul(base)
            .ok_or(WordError::Overflow("sphere size"))?;
    }
    Ok(size)
}

/// Number of words of length strictly less than `n`.
fn ball_below(rank: usize, n: usize) -> BigUint {
    (0..n).map(|l| sphere_size(rank, l)).sum()
}

/// Rank of a reduced word among the words of its length, in shortlex order.
fn rank_in_sphere(word: &Word) -> BigUint {
    let radix = BigUint::from(2 * word.rank() as u64 - 1);
    let mut acc = BigUint::zero();
    let mut prev: Option<Letter> = None;
    for &l in word.letters() {
        let digit = match prev {
            None => l.code(),
            Some(p) if l.code() > p.inverse().code() => l.code() - 1,
            Some(_) => l.code(),
        };
        acc = match prev {
            None => BigUint::from(digit),
            Some(_) => acc * &radix + digit,
        };
        prev = Some(l);
    }
    acc
}

pub fn word_to_index(word: &Word) -> WordIndex {
    WordIndex(ball_below(word.rank(), word.len()) + rank_in_sphere(word))
}

pub fn index_to_word(index: &WordIndex, rank: usize) -> Word {
    assert!(rank >= 1);
    let mut rest = index.0.clone();
    let mut n = 0;
    loop {
        let size = sphere_size(rank, n);
        if rest < size {
            break;
        }
        rest -= size;
        n += 1;
    }
    word_in_sphere(rank, n, rest)
}

/// Inverse of [`rank_in_sphere`].
fn word_in_sphere(rank: usize, n: usize, mut r: BigUint) -> Word {
    if n == 0 {
        return Word::identity(rank);
    }
    let radix = BigUint::from(2 * rank as u64 - 1);
    let mut digits = vec![0u32; n];
    for slot in digits.iter_mut().skip(1).rev() {
        *slot = (&r % &radix).to_u32().unwrap();
        r /= &radix;
    }
    digits[0] = r.to_u32().expect("rank within sphere");
    Word {
        rank,
        letters: letters_from_digits(&digits),
    }
}

fn letters_from_digits(digits: &[u32]) -> Vec<Letter> {
    let mut letters: Vec<Letter> = Vec::with_capacity(digits.len());
    for (i, &dgt) in digits.iter().enumerate() {
        let code = if i == 0 {
            dgt
        } else {
            let forbidden = letters[i - 1].inverse().code();
            if dgt >= forbidden {
                dgt + 1
            } else {
                dgt
            }
        };
        letters.push(Letter::from_code(code));
    }
    letters
}

/// The words of length `n`, in shortlex order.
#[derive(Debug, Clone)]
pub struct Sphere {
    rank: usize,
    digits: Vec<u32>,
    remaining: u64,
}

impl Sphere {
    pub fn new(rank: usize, n: usize) -> Result<Self, WordError> {
        Self::range(rank, n, 0, None)
    }

    /// Words with sphere rank in `start..start + count` (to the end of the
    /// sphere when `count` is `None`). Used to partition a sphere.
    pub fn range(rank: usize, n: usize, start: u64, count: Option<u64>) -> Result<Self, WordError> {
        if rank == 0 {
            return Err(WordError::InvalidAlphabet("rank must be at least 1".into()));
        }
        let size = sphere_size_u64(rank, n)?;
        let start = start.min(size);
        let remaining = count.map_or(size - start, |c| c.min(size - start));
        let mut digits = vec![0u32; n];
        let radix = 2 * rank as u64 - 1;
        let mut r = start;
        for slot in digits.iter_mut().skip(1).rev() {
            *slot = (r % radix) as u32;
            r /= radix;
        }
        if n > 0 {
            digits[0] = r as u32;
        }
        Ok(Sphere {
            rank,
            digits,
            remaining,
        })
    }

    fn advance(&mut self) {
        let radix = 2 * self.rank as u32 - 1;
        for i in (0..self.digits.len()).rev() {
            let limit = if i == 0 { radix + 1 } else { radix };
            self.digits[i] += 1;
            if self.digits[i] < limit {
                return;
            }
            self.digits[i] = 0;
        }
    }
}

impl Iterator for Sphere {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.remaining == 0 {
            return None;
        }
        let word = Word {
            rank: self.rank,
            letters: letters_from_digits(&self.digits),
        };
        self.remaining -= 1;
        if self.remaining > 0 {
            self.advance();
        }
        Some(word)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining as usize;
        (r, Some(r))
    }
}

/// Cantor pairing `(x + y)(x + y + 1) / 2 + x`.
pub fn pair(x: u64, y: u64) -> Result<u64, WordError> {
    let s = x.checked_add(y).ok_or(WordError::Overflow("pairing"))?;
    let tri = (s as u128) * (s as u128 + 1) / 2;
    u64::try_from(tri + x as u128).map_err(|_| WordError::Overflow("pairing"))
}

pub fn unpair(z: u64) -> (u64, u64) {
    let z = z as u128;
    let mut w = ((8 * z + 1).sqrt() - 1) / 2;
    // guard against rounding at perfect squares
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let x = z - w * (w + 1) / 2;
    ((x) as u64, (w - x) as u64)
}

/// Sort key reproducing Cantor pairing order on arbitrarily large indices:
/// pairs compare by `x + y`, then by `x`.
pub fn pair_order_key(x: &WordIndex, y: &WordIndex) -> (BigUint, BigUint) {
    (&x.0 + &y.0, x.0.clone())
}
