//! 2x2 matrices over `O_d` and its fraction field, elements of `PSL_2(O_d)`
//! with projective equality, word evaluation, and the trace trichotomy.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed};
use thiserror::Error;

use crate::quadint::{QuadError, QuadInt, QuadRat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Psl2Error {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("determinant is {0}, expected 1")]
    NotUnimodular(String),
    #[error("generator {0:?} is not bound")]
    UnboundGenerator(String),
    #[error("cannot parse matrix {0:?}")]
    Parse(String),
}

/// Ring elements that carry their own ring parameter.
pub trait Scalar:
    Clone + PartialEq + fmt::Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn conj(&self) -> Self;
}

impl Scalar for QuadInt {
    fn zero_like(&self) -> Self {
        QuadInt::zero(self.d())
    }
    fn one_like(&self) -> Self {
        QuadInt::one(self.d())
    }
    fn conj(&self) -> Self {
        QuadInt::conj(self)
    }
}

impl Scalar for QuadRat {
    fn zero_like(&self) -> Self {
        QuadRat::zero(self.d())
    }
    fn one_like(&self) -> Self {
        QuadRat::one(self.d())
    }
    fn conj(&self) -> Self {
        QuadRat::conj(self)
    }
}

/// A 2x2 matrix `[[a11, a12], [a21, a22]]`.
#[derive(Clone, PartialEq, Debug)]
pub struct Mat2<T> {
    pub a11: T,
    pub a12: T,
    pub a21: T,
    pub a22: T,
}

impl<T: Scalar> Mat2<T> {
    pub fn new(a11: T, a12: T, a21: T, a22: T) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    pub fn identity_like(e: &T) -> Self {
        Mat2::new(e.one_like(), e.zero_like(), e.zero_like(), e.one_like())
    }

    pub fn entries(&self) -> [&T; 4] {
        [&self.a11, &self.a12, &self.a21, &self.a22]
    }

    pub fn det(&self) -> T {
        self.a11.clone() * self.a22.clone() - self.a12.clone() * self.a21.clone()
    }

    pub fn trace(&self) -> T {
        self.a11.clone() + self.a22.clone()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let m = |a: &T, b: &T, c: &T, d: &T| a.clone() * b.clone() + c.clone() * d.clone();
        Mat2::new(
            m(&self.a11, &o.a11, &self.a12, &o.a21),
            m(&self.a11, &o.a12, &self.a12, &o.a22),
            m(&self.a21, &o.a11, &self.a22, &o.a21),
            m(&self.a21, &o.a12, &self.a22, &o.a22),
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        Mat2::new(
            self.a11.clone() + o.a11.clone(),
            self.a12.clone() + o.a12.clone(),
            self.a21.clone() + o.a21.clone(),
            self.a22.clone() + o.a22.clone(),
        )
    }

    /// The adjugate; equals the inverse when `det = 1`.
    pub fn adjugate(&self) -> Self {
        Mat2::new(self.a22.clone(), -self.a12.clone(), -self.a21.clone(), self.a11.clone())
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.a11.clone(), self.a21.clone(), self.a12.clone(), self.a22.clone())
    }

    /// Conjugate transpose.
    pub fn star(&self) -> Self {
        Mat2::new(self.a11.conj(), self.a21.conj(), self.a12.conj(), self.a22.conj())
    }

    pub fn negate(&self) -> Self {
        Mat2::new(-self.a11.clone(), -self.a12.clone(), -self.a21.clone(), -self.a22.clone())
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Mat2<U> {
        Mat2 { a11: f(&self.a11), a12: f(&self.a12), a21: f(&self.a21), a22: f(&self.a22) }
    }
}

impl Mat2<QuadInt> {
    pub fn d(&self) -> u64 {
        self.a11.d()
    }

    pub fn identity(d: u64) -> Self {
        Self::identity_like(&QuadInt::zero(d))
    }

    /// Checked constructor: all entries must share `d`.
    pub fn try_new(a11: QuadInt, a12: QuadInt, a21: QuadInt, a22: QuadInt) -> Result<Self, QuadError> {
        let d = a11.d();
        for e in [&a12, &a21, &a22] {
            if e.d() != d {
                return Err(QuadError::MismatchedRing(d, e.d()));
            }
        }
        Ok(Mat2::new(a11, a12, a21, a22))
    }

    /// Parses `[[e11,e12],[e21,e22]]`.
    pub fn parse(s: &str, d: u64) -> Result<Self, Psl2Error> {
        let bad = || Psl2Error::Parse(s.to_owned());
        let body: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = body.strip_prefix("[[").and_then(|b| b.strip_suffix("]]")).ok_or_else(bad)?;
        let (row1, row2) = inner.split_once("],[").ok_or_else(bad)?;
        let split_row = |r: &str| -> Result<(QuadInt, QuadInt), Psl2Error> {
            let (a, b) = split_top_level_comma(r).ok_or_else(bad)?;
            Ok((QuadInt::parse(a, d)?, QuadInt::parse(b, d)?))
        };
        let (a11, a12) = split_row(row1)?;
        let (a21, a22) = split_row(row2)?;
        Ok(Mat2::new(a11, a12, a21, a22))
    }
}

fn split_top_level_comma(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

impl<T: fmt::Display> fmt::Display for Mat2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a11, self.a12, self.a21, self.a22)
    }
}

/// `(generator id, exponent)` pairs, evaluated left to right.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Word(pub Vec<(String, BigInt)>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn generator(id: &str) -> Self {
        Word(vec![(id.to_owned(), BigInt::one())])
    }

    pub fn push(&mut self, id: &str, exp: impl Into<BigInt>) {
        self.0.push((id.to_owned(), exp.into()));
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|(g, e)| (g.clone(), -e)).collect())
    }

    pub fn power(&self, n: &BigInt) -> Option<Word> {
        // Only single-letter words are compressed; longer words are not expanded.
        match self.0.as_slice() {
            [(g, e)] => Some(Word(vec![(g.clone(), e * n)])),
            _ => None,
        }
    }

    /// Parses the space-separated form `sigma^-3 h^1 ...`.
    pub fn parse(s: &str) -> Option<Word> {
        let mut out = Vec::new();
        for tok in s.split_whitespace() {
            let (g, e) = tok.split_once('^')?;
            if g.is_empty() {
                return None;
            }
            out.push((g.to_owned(), e.parse().ok()?));
        }
        Some(Word(out))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (g, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{g}^{e}")?;
        }
        Ok(())
    }
}

/// An element of `PSL_2(O_d)`: a determinant-one representative, compared up
/// to sign, with an optional provenance word.
#[derive(Clone, Debug)]
pub struct PslElement {
    rep: Mat2<QuadInt>,
    word: Option<Word>,
}

impl PslElement {
    pub fn new(rep: Mat2<QuadInt>) -> Result<Self, Psl2Error> {
        let det = rep.det();
        if !det.is_one() {
            return Err(Psl2Error::NotUnimodular(det.to_string()));
        }
        Ok(PslElement { rep, word: None })
    }

    pub fn from_entries(a11: QuadInt, a12: QuadInt, a21: QuadInt, a22: QuadInt) -> Result<Self, Psl2Error> {
        Self::new(Mat2::try_new(a11, a12, a21, a22)?)
    }

    /// Upper-triangular unipotent `[[1, b], [0, 1]]`.
    pub fn translation(b: QuadInt) -> Self {
        let d = b.d();
        PslElement { rep: Mat2::new(QuadInt::one(d), b, QuadInt::zero(d), QuadInt::one(d)), word: None }
    }

    pub fn identity(d: u64) -> Self {
        PslElement { rep: Mat2::identity(d), word: Some(Word::new()) }
    }

    pub fn with_word(mut self, word: Word) -> Self {
        self.word = Some(word);
        self
    }

    pub fn named(self, id: &str) -> Self {
        self.with_word(Word::generator(id))
    }

    pub fn rep(&self) -> &Mat2<QuadInt> {
        &self.rep
    }

    pub fn word(&self) -> Option<&Word> {
        self.word.as_ref()
    }

    pub fn d(&self) -> u64 {
        self.rep.d()
    }

    pub fn trace(&self) -> QuadInt {
        self.rep.trace()
    }

    pub fn negate(&self) -> Self {
        PslElement { rep: self.rep.negate(), word: self.word.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let word = match (&self.word, &other.word) {
            (Some(a), Some(b)) => Some(a.concat(b)),
            _ => None,
        };
        PslElement { rep: self.rep.mul(&other.rep), word }
    }

    pub fn inv(&self) -> Self {
        PslElement { rep: self.rep.adjugate(), word: self.word.as_ref().map(Word::inverse) }
    }

    /// `self^n` by repeated squaring; negative `n` goes through the inverse.
    pub fn pow(&self, n: &BigInt) -> Self {
        let word = self.word.as_ref().and_then(|w| w.power(n));
        let base = if n.is_negative() { self.rep.adjugate() } else { self.rep.clone() };
        let mut result = Mat2::identity(self.d());
        let e = n.magnitude();
        for i in (0..e.bits()).rev() {
            result = result.mul(&result);
            if e.bit(i) {
                result = result.mul(&base);
            }
        }
        PslElement { rep: result, word }
    }

    pub fn pow_i64(&self, n: i64) -> Self {
        self.pow(&BigInt::from(n))
    }

    pub fn is_identity(&self) -> bool {
        let r = &self.rep;
        r.a12.is_zero() && r.a21.is_zero() && r.a11 == r.a22 && (r.a11.is_one() || (-&r.a11).is_one())
    }

    /// Representative with the sign fixed so that the first nonzero entry has
    /// positive rational part, or zero rational part and positive
    /// `sqrt(-d)` part.
    pub fn normalized_rep(&self) -> Mat2<QuadInt> {
        for e in self.rep.entries() {
            let (b1, b2) = e.doubled_sqrt_coords();
            let s = if b1.sign() != Sign::NoSign { b1.sign() } else { b2.sign() };
            match s {
                Sign::Plus => return self.rep.clone(),
                Sign::Minus => return self.rep.negate(),
                Sign::NoSign => continue,
            }
        }
        unreachable!("determinant-one matrix has a nonzero entry")
    }
}

/// Projective equality: `M = +-N` entrywise.
pub fn psl_eq(m: &PslElement, n: &PslElement) -> bool {
    m.rep == n.rep || m.rep == n.rep.negate()
}

impl PartialEq for PslElement {
    fn eq(&self, other: &Self) -> bool {
        psl_eq(self, other)
    }
}

impl Eq for PslElement {}

impl fmt::Display for PslElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.normalized_rep())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IsometryClass {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl fmt::Display for IsometryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IsometryClass::Identity => "identity",
            IsometryClass::Elliptic => "elliptic",
            IsometryClass::Parabolic => "parabolic",
            IsometryClass::Hyperbolic => "hyperbolic",
        })
    }
}

/// Elliptic for real trace in `(-2, 2)`, parabolic for trace `+-2`,
/// hyperbolic otherwise (including non-real traces).
pub fn classify(m: &PslElement) -> IsometryClass {
    if m.is_identity() {
        return IsometryClass::Identity;
    }
    let tr = m.trace();
    let Some(t) = tr.as_integer() else {
        return IsometryClass::Hyperbolic;
    };
    let two = BigInt::from(2);
    let abs = t.abs();
    if abs < two {
        IsometryClass::Elliptic
    } else if abs == two {
        IsometryClass::Parabolic
    } else {
        IsometryClass::Hyperbolic
    }
}

/// Evaluates `word` left to right as a product of `gens[id]^exponent`.
pub fn eval_word(gens: &HashMap<String, PslElement>, word: &Word) -> Result<PslElement, Psl2Error> {
    let mut acc: Option<PslElement> = None;
    for (id, e) in &word.0 {
        let g = gens.get(id).ok_or_else(|| Psl2Error::UnboundGenerator(id.clone()))?;
        let factor = g.pow(e);
        acc = Some(match acc {
            None => factor,
            Some(a) => a.mul(&factor),
        });
    }
    let d = gens.values().next().map(PslElement::d).unwrap_or(1);
    let mut out = acc.unwrap_or_else(|| PslElement::identity(d));
    out.word = Some(word.clone());
    Ok(out)
}
