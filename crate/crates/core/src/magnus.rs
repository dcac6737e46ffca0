//! Non-commutative polynomials over `F_p` truncated above a fixed length,
//! and the Magnus map `x_i -> 1 + u_i`.
//!
//! Coefficients are stored densely. A monomial `u_{i_1} ... u_{i_l}` lives at
//! position `offset(l) + sum_j (i_j - 1) d^(l - j)`, where `offset(l)` counts
//! the monomials of length below `l`. Storage order is therefore
//! length-then-lexicographic, which is also the print order.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::words::Word;

/// Default bound on `sum_{i <= N} d^i`.
pub const DEFAULT_MONOMIAL_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("{0} is not a prime below 65536")]
    InvalidPrime(u32),
    #[error("truncation order must be at least 1")]
    ZeroOrder,
    #[error("series universe of {size} monomials exceeds the cap of {cap}")]
    UniverseTooLarge { size: u128, cap: usize },
    #[error("series contexts differ")]
    ContextMismatch,
    #[error("word has rank {word}, series context has {context} variables")]
    RankMismatch { word: usize, context: usize },
    #[error("constant term is not invertible mod {0}")]
    NonUnit(u32),
    #[error("variable index {0} out of range")]
    VariableOutOfRange(usize),
}

pub fn is_prime(p: u32) -> bool {
    p >= 2
        && (2..)
            .take_while(|q| q * q <= p)
            .all(|q| !p.is_multiple_of(q))
}

/// The ring `F_p<<u_1, ..., u_d>> / I^(N+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesContext {
    p: u32,
    rank: usize,
    order: usize,
    offsets: Vec<usize>,
}

impl SeriesContext {
    pub fn new(p: u32, rank: usize, order: usize) -> Result<Arc<Self>, SeriesError> {
        Self::with_cap(p, rank, order, DEFAULT_MONOMIAL_CAP)
    }

    pub fn with_cap(
        p: u32,
        rank: usize,
        order: usize,
        cap: usize,
    ) -> Result<Arc<Self>, SeriesError> {
        if p >= 1 << 16 || !is_prime(p) {
            return Err(SeriesError::InvalidPrime(p));
        }
        if order == 0 {
            return Err(SeriesError::ZeroOrder);
        }
        if rank == 0 {
            return Err(SeriesError::VariableOutOfRange(0));
        }
        let size = universe_size(rank, order);
        if size > cap as u128 {
            return Err(SeriesError::UniverseTooLarge { size, cap });
        }
        let mut offsets = Vec::with_capacity(order + 2);
        let mut acc = 0usize;
        let mut block = 1usize;
        for _ in 0..=order {
            offsets.push(acc);
            acc += block;
            block *= rank;
        }
        offsets.push(acc);
        Ok(Arc::new(SeriesContext {
            p,
            rank,
            order,
            offsets,
        }))
    }

    /// Largest order whose universe fits under `cap`, if any.
    pub fn max_order_within(rank: usize, cap: usize) -> Option<usize> {
        match rank {
            0 => return None,
            1 => return cap.checked_sub(1).filter(|&n| n > 0),
            _ => {}
        }
        let (mut total, mut block, mut best) = (1u128, 1u128, None);
        for n in 1.. {
            block *= rank as u128;
            total += block;
            if total > cap as u128 {
                break;
            }
            best = Some(n);
        }
        best
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Truncation order `N`: monomials longer than `N` are dropped.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn size(&self) -> usize {
        self.offsets[self.order + 1]
    }

    /// Index range of the monomials of length `l`.
    pub fn block(&self, l: usize) -> std::ops::Range<usize> {
        self.offsets[l]..self.offsets[l + 1]
    }

    fn block_len(&self, l: usize) -> usize {
        self.offsets[l + 1] - self.offsets[l]
    }

    fn position(&self, m: &Monomial) -> Result<usize, SeriesError> {
        if m.len() > self.order {
            return Err(SeriesError::VariableOutOfRange(m.len()));
        }
        let mut within = 0usize;
        for &v in &m.0 {
            if v == 0 || v > self.rank {
                return Err(SeriesError::VariableOutOfRange(v));
            }
            within = within * self.rank + (v - 1);
        }
        Ok(self.offsets[m.len()] + within)
    }

    fn monomial_at(&self, pos: usize) -> Monomial {
        let l = (0..=self.order)
            .find(|&l| pos < self.offsets[l + 1])
            .expect("position in range");
        let mut within = pos - self.offsets[l];
        let mut vars = vec![0; l];
        for slot in vars.iter_mut().rev() {
            *slot = within % self.rank + 1;
            within /= self.rank;
        }
        Monomial(vars)
    }

    fn length_of(&self, pos: usize) -> usize {
        (0..=self.order)
            .find(|&l| pos < self.offsets[l + 1])
            .expect("position in range")
    }

    fn same(&self, other: &SeriesContext) -> bool {
        self.p == other.p && self.rank == other.rank && self.order == other.order
    }
}

fn universe_size(rank: usize, order: usize) -> u128 {
    let mut total: u128 = 0;
    let mut block: u128 = 1;
    for _ in 0..=order {
        total = total.saturating_add(block);
        block = block.saturating_mul(rank as u128);
    }
    total
}

/// A product `u_{i_1} ... u_{i_l}` of variables (1-based); empty is the constant 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<usize>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|v| format!("u{v}")).collect();
        f.write_str(&parts.join("*"))
    }
}

/// An element of the truncated ring. Zero coefficients mean "absent".
#[derive(Debug, Clone)]
pub struct TruncatedSeries {
    ctx: Arc<SeriesContext>,
    coeffs: Vec<u16>,
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same(&other.ctx) && self.coeffs == other.coeffs
    }
}

impl Eq for TruncatedSeries {}

impl TruncatedSeries {
    pub fn zero(ctx: &Arc<SeriesContext>) -> Self {
        TruncatedSeries {
            ctx: Arc::clone(ctx),
            coeffs: vec![0; ctx.size()],
        }
    }

    pub fn one(ctx: &Arc<SeriesContext>) -> Self {
        Self::constant(ctx, 1)
    }

    pub fn constant(ctx: &Arc<SeriesContext>, c: u32) -> Self {
        let mut s = Self::zero(ctx);
        s.coeffs[0] = (c % ctx.p) as u16;
        s
    }

    /// `c * m`.
    pub fn monomial(ctx: &Arc<SeriesContext>, m: &Monomial, c: u32) -> Result<Self, SeriesError> {
        let mut s = Self::zero(ctx);
        s.coeffs[ctx.position(m)?] = (c % ctx.p) as u16;
        Ok(s)
    }

    /// `1 + u_i`.
    pub fn one_plus_variable(ctx: &Arc<SeriesContext>, i: usize) -> Result<Self, SeriesError> {
        let mut s = Self::monomial(ctx, &Monomial(vec![i]), 1)?;
        s.coeffs[0] = 1;
        Ok(s)
    }

    pub fn context(&self) -> &Arc<SeriesContext> {
        &self.ctx
    }

    pub fn coefficient(&self, m: &Monomial) -> Result<u32, SeriesError> {
        Ok(self.coeffs[self.ctx.position(m)?] as u32)
    }

    pub fn constant_term(&self) -> u32 {
        self.coeffs[0] as u32
    }

    /// Nonzero terms in length-then-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, u32)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(pos, &c)| (self.ctx.monomial_at(pos), c as u32))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Length of the shortest monomial with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .position(|&c| c != 0)
            .map(|pos| self.ctx.length_of(pos))
    }

    /// Length of the shortest non-constant monomial with a nonzero coefficient.
    pub fn augmentation_valuation(&self) -> Option<usize> {
        self.coeffs[1..]
            .iter()
            .position(|&c| c != 0)
            .map(|pos| self.ctx.length_of(pos + 1))
    }

    /// Raw coefficients of all monomials shorter than `len`, in storage order.
    /// Two series agree modulo `I^len` iff these slices are equal.
    pub fn coefficients_below(&self, len: usize) -> &[u16] {
        let end = self.ctx.offsets[len.min(self.ctx.order + 1)];
        &self.coeffs[..end]
    }

    fn check(&self, other: &Self) -> Result<(), SeriesError> {
        if self.ctx.same(&other.ctx) {
            Ok(())
        } else {
            Err(SeriesError::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let p = self.ctx.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ((a as u32 + b as u32) % p) as u16)
            .collect();
        Ok(TruncatedSeries {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        self.scale(self.ctx.p - 1)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u32) -> Self {
        let p = self.ctx.p as u64;
        let c = c as u64 % p;
        TruncatedSeries {
            ctx: Arc::clone(&self.ctx),
            coeffs: self
                .coeffs
                .iter()
                .map(|&a| (a as u64 * c % p) as u16)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let ctx = &self.ctx;
        let n = ctx.order;
        let p = ctx.p as u64;
        let mut acc = vec![0u64; ctx.size()];
        // nonzero entries of `other`, grouped by length
        let rhs: Vec<Vec<(usize, u64)>> = (0..=n)
            .map(|l| {
                ctx.block(l)
                    .filter(|&pos| other.coeffs[pos] != 0)
                    .map(|pos| (pos - ctx.offsets[l], other.coeffs[pos] as u64))
                    .collect()
            })
            .collect();
        for la in 0..=n {
            for pos_a in ctx.block(la) {
                let a = self.coeffs[pos_a] as u64;
                if a == 0 {
                    continue;
                }
                let ia = pos_a - ctx.offsets[la];
                for (lb, terms) in rhs.iter().enumerate().take(n - la + 1) {
                    let base = ctx.offsets[la + lb] + ia * ctx.block_len(lb);
                    for &(ib, b) in terms {
                        acc[base + ib] += a * b;
                    }
                }
            }
        }
        Ok(TruncatedSeries {
            ctx: Arc::clone(ctx),
            coeffs: acc.into_iter().map(|v| (v % p) as u16).collect(),
        })
    }

    /// Multiplicative inverse via the truncated geometric series of the
    /// augmentation part.
    pub fn invert_unit(&self) -> Result<Self, SeriesError> {
        let p = self.ctx.p;
        let c = self.constant_term();
        if c == 0 {
            return Err(SeriesError::NonUnit(p));
        }
        let c_inv = mod_pow(c, p - 2, p);
        // a = c (1 + q) with q = c^-1 a - 1
        let mut q = self.scale(c_inv);
        q.coeffs[0] = 0;
        let one = Self::one(&self.ctx);
        let mut r = one.clone();
        for _ in 0..self.ctx.order {
            r = one.sub(&q.mul(&r)?)?;
        }
        Ok(r.scale(c_inv))
    }

    /// `self * (1 + u_i)`, or `self * (1 + u_i)^-1` when `inverse` is set.
    pub fn mul_generator(&mut self, i: usize, inverse: bool) {
        let ctx = Arc::clone(&self.ctx);
        let d = ctx.rank;
        let p = ctx.p;
        let v = i - 1;
        if inverse {
            // x (1 + u) = s, solved length by length
            for l in 1..=ctx.order {
                let prev = ctx.offsets[l - 1];
                let cur = ctx.offsets[l];
                for j in 0..ctx.block_len(l - 1) {
                    let src = self.coeffs[prev + j] as u32;
                    if src != 0 {
                        let dst = cur + j * d + v;
                        self.coeffs[dst] = ((self.coeffs[dst] as u32 + p - src) % p) as u16;
                    }
                }
            }
        } else {
            for l in (0..ctx.order).rev() {
                let src_off = ctx.offsets[l];
                let dst_off = ctx.offsets[l + 1];
                for j in 0..ctx.block_len(l) {
                    let src = self.coeffs[src_off + j] as u32;
                    if src != 0 {
                        let dst = dst_off + j * d + v;
                        self.coeffs[dst] = ((self.coeffs[dst] as u32 + src) % p) as u16;
                    }
                }
            }
        }
    }
}

fn mod_pow(base: u32, mut exp: u32, p: u32) -> u32 {
    let p = p as u64;
    let mut b = base as u64 % p;
    let mut out = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            out = out * b % p;
        }
        b = b * b % p;
        exp >>= 1;
    }
    out as u32
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (m, c) in self.terms() {
            parts.push(match (m.is_empty(), c) {
                (true, c) => c.to_string(),
                (false, 1) => m.to_string(),
                (false, c) => format!("{c}*{m}"),
            });
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Image of `w` under `x_i -> 1 + u_i`, `x_i^-1 -> (1 + u_i)^-1`.
pub fn magnus_embed(w: &Word, ctx: &Arc<SeriesContext>) -> Result<TruncatedSeries, SeriesError> {
    if w.rank() != ctx.rank() {
        return Err(SeriesError::RankMismatch {
            word: w.rank(),
            context: ctx.rank(),
        });
    }
    let mut s = TruncatedSeries::one(ctx);
    for l in w.letters() {
        s.mul_generator(l.generator(), l.is_inverse());
    }
    Ok(s)
}
