//! Weighted sample spaces and incidence bit vectors.
//!
//! An [`Incidence`] is a fixed-width bit vector; bit `k` is set iff point `k`
//! of the owning [`SampleSpace`] belongs to the incidence. Bits beyond the
//! width in the last storage word are kept clear so that equality, hashing and
//! popcount work on whole words.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Largest sample space accepted by the constructors.
pub const MAX_WIDTH: usize = 1 << 24;

const WORD_BITS: usize = u64::BITS as usize;

/// A point of a sample space together with its probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    pub index: usize,
    pub weight: Rational,
}

/// A finite, ordered sample space whose point weights sum to exactly one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSpace {
    points: Vec<Point>,
    uniform: bool,
}

impl SampleSpace {
    /// Equi-probable space of `size` points, each weighing `1/size`.
    pub fn uniform(size: usize) -> Result<Self> {
        check_size(size)?;
        let weight = Rational::new(BigInt::one(), BigInt::from(size));
        let points = (0..size)
            .map(|index| Point {
                index,
                weight: weight.clone(),
            })
            .collect();
        Ok(SampleSpace { points, uniform: true })
    }

    /// Space with explicit weights. Weights must be nonnegative and sum to one.
    pub fn from_weights(weights: Vec<Rational>) -> Result<Self> {
        check_size(weights.len())?;
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::InvalidSpace(format!("negative weight {w}")));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidSpace(format!("weights sum to {total}, expected 1")));
        }
        let uniform = weights.windows(2).all(|pair| pair[0] == pair[1]);
        let points = weights
            .into_iter()
            .enumerate()
            .map(|(index, weight)| Point { index, weight })
            .collect();
        Ok(SampleSpace { points, uniform })
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weight(&self, index: usize) -> &Rational {
        &self.points[index].weight
    }

    /// True when every point carries the same weight.
    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// The incidence containing every point.
    pub fn full(&self) -> Incidence {
        Incidence::full(self.size())
    }

    pub fn empty(&self) -> Incidence {
        Incidence::empty(self.size())
    }

    /// Weighted probability: the total weight of the points in `incidence`.
    pub fn wp(&self, incidence: &Incidence) -> Result<Rational> {
        self.check_width(incidence)?;
        if self.uniform {
            return Ok(Rational::new(
                BigInt::from(incidence.count()),
                BigInt::from(self.size()),
            ));
        }
        Ok(incidence
            .iter()
            .map(|k| &self.points[k].weight)
            .fold(Rational::zero(), |acc, w| acc + w))
    }

    pub fn check_width(&self, incidence: &Incidence) -> Result<()> {
        if incidence.width() != self.size() {
            return Err(Error::WidthMismatch {
                expected: self.size(),
                found: incidence.width(),
            });
        }
        Ok(())
    }

    /// Parses a bit string or a point-set literal over this space.
    pub fn parse_incidence(&self, text: &str) -> Result<Incidence> {
        Incidence::parse(text, self.size())
    }
}

/// Weighted probability of `incidence` in `space`.
pub fn wp(incidence: &Incidence, space: &SampleSpace) -> Result<Rational> {
    space.wp(incidence)
}

fn check_size(size: usize) -> Result<()> {
    if size == 0 {
        return Err(Error::InvalidSpace("a sample space needs at least one point".into()));
    }
    if size > MAX_WIDTH {
        return Err(Error::InvalidSpace(format!(
            "{size} points exceeds the maximum of {MAX_WIDTH}"
        )));
    }
    Ok(())
}

/// Parses an exact rational: `3`, `2/5`, or a finite decimal such as `0.125`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::InvalidSpace(format!("not a rational number: `{text}`"));
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?.abs()
        };
        let scale = num::pow(BigInt::from(10), frac.len());
        let frac_part = BigInt::from_str(frac).map_err(|_| bad())?;
        let value = Rational::new(int_part * &scale + frac_part, scale);
        return Ok(if negative { -value } else { value });
    }
    BigInt::from_str(text).map(Rational::from_integer).map_err(|_| bad())
}

/// Set operations accepted by [`boolean_combine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    Not,
    And,
    Or,
    Diff,
}

/// Applies `op` to one or two incidences. `Not` ignores `rhs`; the binary
/// operators require it.
pub fn boolean_combine(op: BoolOp, lhs: &Incidence, rhs: Option<&Incidence>) -> Result<Incidence> {
    if op == BoolOp::Not {
        return Ok(lhs.complement());
    }
    let rhs = rhs.ok_or_else(|| Error::InvalidIncidence(format!("{op:?} needs two operands")))?;
    lhs.check_same_width(rhs)?;
    Ok(match op {
        BoolOp::And => lhs.intersection(rhs),
        BoolOp::Or => lhs.union(rhs),
        BoolOp::Diff => lhs.difference(rhs),
        BoolOp::Not => unreachable!(),
    })
}

/// Storage cost, in bits, of keeping every sentence over `propositions`
/// atoms at `digits` decimal digits of precision: first as one number per
/// clause, then as one incidence of `10^digits` points per proposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StorageCost {
    pub numeric_bits: u128,
    pub incidence_bits: u128,
}

pub fn storage_bits(propositions: u32, digits: u32) -> Result<StorageCost> {
    if propositions == 0 || digits == 0 {
        return Err(Error::TooLarge(
            "storage cost needs at least one proposition and one digit".into(),
        ));
    }
    let overflow = || Error::TooLarge(format!("n = {propositions}, m = {digits} overflows"));
    let clauses = 1u128
        .checked_shl(propositions)
        .filter(|_| propositions < 128)
        .ok_or_else(overflow)?;
    let numeric_bits = 10u128
        .checked_mul(digits as u128)
        .and_then(|b| b.checked_mul(clauses))
        .ok_or_else(overflow)?;
    let incidence_bits = 10u128
        .checked_pow(digits)
        .and_then(|b| b.checked_mul(propositions as u128))
        .ok_or_else(overflow)?;
    Ok(StorageCost {
        numeric_bits,
        incidence_bits,
    })
}

/// A set of sample-space points, stored as a fixed-width bit vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Incidence {
    width: usize,
    words: Vec<u64>,
}

impl Incidence {
    pub fn empty(width: usize) -> Self {
        Incidence {
            width,
            words: vec![0; width.div_ceil(WORD_BITS)],
        }
    }

    pub fn full(width: usize) -> Self {
        let mut inc = Incidence {
            width,
            words: vec![!0; width.div_ceil(WORD_BITS)],
        };
        inc.clear_tail();
        inc
    }

    /// Builds an incidence from point indices; every index must be below `width`.
    pub fn from_indices<I: IntoIterator<Item = usize>>(width: usize, indices: I) -> Result<Self> {
        let mut inc = Incidence::empty(width);
        for k in indices {
            if k >= width {
                return Err(Error::PointOutOfRange { index: k, width });
            }
            inc.insert(k);
        }
        Ok(inc)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn contains(&self, k: usize) -> bool {
        assert!(k < self.width, "point {k} out of range {}", self.width);
        self.words[k / WORD_BITS] >> (k % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, k: usize) {
        assert!(k < self.width, "point {k} out of range {}", self.width);
        self.words[k / WORD_BITS] |= 1 << (k % WORD_BITS);
    }

    #[inline]
    pub fn remove(&mut self, k: usize) {
        assert!(k < self.width, "point {k} out of range {}", self.width);
        self.words[k / WORD_BITS] &= !(1 << (k % WORD_BITS));
    }

    /// Number of points in the incidence.
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.width
    }

    /// Point indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * WORD_BITS + bit)
            })
        })
    }

    pub fn check_same_width(&self, other: &Incidence) -> Result<()> {
        if self.width != other.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                found: other.width,
            });
        }
        Ok(())
    }

    /// Complement relative to the full space of this width.
    pub fn complement(&self) -> Incidence {
        let mut out = Incidence {
            width: self.width,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_tail();
        out
    }

    // The binary operators below panic on width mismatch; use
    // `boolean_combine` for checked combination of untrusted inputs.

    pub fn intersection(&self, other: &Incidence) -> Incidence {
        self.zip(other, |a, b| a & b)
    }

    pub fn union(&self, other: &Incidence) -> Incidence {
        self.zip(other, |a, b| a | b)
    }

    pub fn difference(&self, other: &Incidence) -> Incidence {
        self.zip(other, |a, b| a & !b)
    }

    /// `self ∪ (w \ other)`; the shape shared by most upper-bound rules.
    pub fn union_complement(&self, other: &Incidence) -> Incidence {
        let mut out = self.zip(other, |a, b| a | !b);
        out.clear_tail();
        out
    }

    pub fn is_subset(&self, other: &Incidence) -> bool {
        self.assert_width(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// In-place union. Returns true if any bit was added.
    pub fn union_with(&mut self, other: &Incidence) -> bool {
        self.assert_width(other);
        let mut changed = false;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            let next = *a | b;
            changed |= next != *a;
            *a = next;
        }
        changed
    }

    /// In-place intersection. Returns true if any bit was removed.
    pub fn intersect_with(&mut self, other: &Incidence) -> bool {
        self.assert_width(other);
        let mut changed = false;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            let next = *a & b;
            changed |= next != *a;
            *a = next;
        }
        changed
    }

    /// Bit string with character `k` standing for point `k`.
    pub fn to_bitstring(&self) -> String {
        (0..self.width)
            .map(|k| if self.contains(k) { '1' } else { '0' })
            .collect()
    }

    /// Point-set literal such as `{0,2,5}`.
    pub fn to_set_literal(&self) -> String {
        let items: Vec<String> = self.iter().map(|k| k.to_string()).collect();
        format!("{{{}}}", items.join(","))
    }

    pub fn from_bitstring(text: &str, width: usize) -> Result<Self> {
        let len = text.chars().count();
        if len != width {
            return Err(Error::WidthMismatch {
                expected: width,
                found: len,
            });
        }
        let mut inc = Incidence::empty(width);
        for (k, c) in text.chars().enumerate() {
            match c {
                '1' => inc.insert(k),
                '0' => {}
                other => {
                    return Err(Error::InvalidIncidence(format!(
                        "illegal character `{other}` at position {k}"
                    )))
                }
            }
        }
        Ok(inc)
    }

    /// Parses `{k1,k2,...}`. Inclusive ranges `a..b` are accepted as items.
    pub fn from_set_literal(text: &str, width: usize) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidIncidence(format!("{msg} in `{text}`"));
        let inner = text
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| bad("expected braces"))?;
        let mut inc = Incidence::empty(width);
        if inner.trim().is_empty() {
            return Ok(inc);
        }
        let index = |s: &str| s.trim().parse::<usize>().map_err(|_| bad("bad point index"));
        for item in inner.split(',') {
            let (lo, hi) = match item.split_once("..") {
                Some((lo, hi)) => (index(lo)?, index(hi)?),
                None => {
                    let k = index(item)?;
                    (k, k)
                }
            };
            if lo > hi {
                return Err(bad("empty range"));
            }
            if hi >= width {
                return Err(Error::PointOutOfRange { index: hi, width });
            }
            for k in lo..=hi {
                inc.insert(k);
            }
        }
        Ok(inc)
    }

    /// Accepts either a bit string or a point-set literal.
    pub fn parse(text: &str, width: usize) -> Result<Self> {
        let text = text.trim();
        if text.starts_with('{') {
            Incidence::from_set_literal(text, width)
        } else {
            Incidence::from_bitstring(text, width)
        }
    }

    fn zip(&self, other: &Incidence, f: impl Fn(u64, u64) -> u64) -> Incidence {
        self.assert_width(other);
        Incidence {
            width: self.width,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    #[inline]
    fn assert_width(&self, other: &Incidence) {
        assert_eq!(self.width, other.width, "incidence width mismatch");
    }

    fn clear_tail(&mut self) {
        let rem = self.width % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

/// Encodes an incidence as a bit string.
pub fn encode_bitstring(incidence: &Incidence) -> String {
    incidence.to_bitstring()
}

/// Decodes a bit string over `space`.
pub fn decode_bitstring(text: &str, space: &SampleSpace) -> Result<Incidence> {
    Incidence::from_bitstring(text, space.size())
}

impl fmt::Display for Incidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

impl fmt::Debug for Incidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Incidence({}/{})", self.to_set_literal(), self.width)
    }
}
