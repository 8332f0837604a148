//! Exact arithmetic in the ring of integers `O_d` of `Q(sqrt(-d))` and in its
//! fraction field.
//!
//! Elements are stored on the integral basis `{1, tau}` where `tau = sqrt(-d)`
//! when `d = 1, 2 (mod 4)` and `tau = (1 + sqrt(-d)) / 2` when `d = 3 (mod 4)`.
//! Every pair of integer coordinates is therefore an element of `O_d`; the
//! half-integer parity condition of the `d = 3 (mod 4)` case cannot be violated.
//!
//! The canonical text form is `u+v*sqrt(-d)` (or `u` when `v = 0`), where `u`
//! and `v` are decimal integers or halves `a/2`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::congruence::ResidueElement;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadError {
    #[error("d = {0} is not a positive square-free integer")]
    NotSquareFree(u64),
    #[error("mismatched rings: d = {0} vs d = {1}")]
    MismatchedRing(u64, u64),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(BigInt),
    #[error("cannot parse {input:?} as an element of O_{d}: {reason}")]
    Parse {
        input: String,
        d: u64,
        reason: String,
    },
    #[error("{0} is not integral over Z")]
    NotIntegral(String),
}

/// Returns true when `d` is positive and square-free.
pub fn is_square_free(d: u64) -> bool {
    if d == 0 {
        return false;
    }
    let mut n = d;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// `d = 3 (mod 4)`: the integral basis uses `tau = (1 + sqrt(-d)) / 2`.
#[inline]
pub(crate) fn half_basis(d: u64) -> bool {
    d % 4 == 3
}

/// An element `x + y*tau` of `O_d`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadInt {
    d: u64,
    x: BigInt,
    y: BigInt,
}

impl QuadInt {
    pub fn new(d: u64, x: impl Into<BigInt>, y: impl Into<BigInt>) -> Result<Self, QuadError> {
        if !is_square_free(d) {
            return Err(QuadError::NotSquareFree(d));
        }
        Ok(Self::raw(d, x.into(), y.into()))
    }

    /// Constructor for callers that already hold a validated `d`.
    pub(crate) fn raw(d: u64, x: BigInt, y: BigInt) -> Self {
        QuadInt { d, x, y }
    }

    pub fn from_int(d: u64, n: impl Into<BigInt>) -> Self {
        Self::raw(d, n.into(), BigInt::zero())
    }

    pub fn zero(d: u64) -> Self {
        Self::from_int(d, 0)
    }

    pub fn one(d: u64) -> Self {
        Self::from_int(d, 1)
    }

    /// The integral basis element `tau_d`.
    pub fn tau(d: u64) -> Self {
        Self::raw(d, BigInt::zero(), BigInt::one())
    }

    /// `sqrt(-d)`, which is `2*tau - 1` on the half basis.
    pub fn sqrt_neg_d(d: u64) -> Self {
        if half_basis(d) {
            Self::raw(d, BigInt::from(-1), BigInt::from(2))
        } else {
            Self::tau(d)
        }
    }

    /// The cube root of unity `omega = (-1 + sqrt(-3)) / 2` in `O_3`, with
    /// `omega^2 + omega + 1 = 0`.
    pub fn omega() -> Self {
        Self::raw(3, BigInt::from(-1), BigInt::one())
    }

    /// Builds `(b1 + b2*sqrt(-d)) / 2`. Fails when the result is not in `O_d`.
    pub fn from_doubled_sqrt_coords(d: u64, b1: BigInt, b2: BigInt) -> Result<Self, QuadError> {
        if !is_square_free(d) {
            return Err(QuadError::NotSquareFree(d));
        }
        let not_integral = || QuadError::NotIntegral(format!("({b1}+{b2}*sqrt(-{d}))/2"));
        if half_basis(d) {
            // (b1 + b2 sqrt(-d))/2 = (b1 - b2)/2 + b2 tau
            if (&b1 - &b2).is_odd() {
                return Err(not_integral());
            }
            Ok(Self::raw(d, (&b1 - &b2) / 2, b2))
        } else {
            if b1.is_odd() || b2.is_odd() {
                return Err(not_integral());
            }
            Ok(Self::raw(d, b1 / 2, b2 / 2))
        }
    }

    /// Builds `u + v*sqrt(-d)` for integers `u`, `v`.
    pub fn from_sqrt_coords(d: u64, u: impl Into<BigInt>, v: impl Into<BigInt>) -> Result<Self, QuadError> {
        let (u, v) = (u.into(), v.into());
        Self::from_doubled_sqrt_coords(d, u * 2, v * 2)
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// Coordinate on `1` in the integral basis.
    pub fn x(&self) -> &BigInt {
        &self.x
    }

    /// Coordinate on `tau` in the integral basis.
    pub fn y(&self) -> &BigInt {
        &self.y
    }

    /// `(b1, b2)` with `self = (b1 + b2*sqrt(-d)) / 2`.
    pub fn doubled_sqrt_coords(&self) -> (BigInt, BigInt) {
        if half_basis(self.d) {
            (&self.x * 2 + &self.y, self.y.clone())
        } else {
            (&self.x * 2, &self.y * 2)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.x.is_one() && self.y.is_zero()
    }

    /// True when the element is fixed by conjugation, i.e. lies in `Z`.
    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn as_integer(&self) -> Option<&BigInt> {
        self.is_rational().then_some(&self.x)
    }

    pub fn conj(&self) -> Self {
        if half_basis(self.d) {
            // conj(tau) = 1 - tau
            Self::raw(self.d, &self.x + &self.y, -&self.y)
        } else {
            Self::raw(self.d, self.x.clone(), -&self.y)
        }
    }

    /// `a * conj(a)`.
    pub fn norm(&self) -> BigInt {
        let (x, y) = (&self.x, &self.y);
        if half_basis(self.d) {
            x * x + x * y + BigInt::from((self.d + 1) / 4) * y * y
        } else {
            x * x + BigInt::from(self.d) * y * y
        }
    }

    /// `a + conj(a)`.
    pub fn trace(&self) -> BigInt {
        if half_basis(self.d) {
            &self.x * 2 + &self.y
        } else {
            &self.x * 2
        }
    }

    fn check_ring(&self, other: &Self) -> Result<(), QuadError> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(QuadError::MismatchedRing(self.d, other.d))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, QuadError> {
        self.check_ring(other)?;
        Ok(Self::raw(self.d, &self.x + &other.x, &self.y + &other.y))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, QuadError> {
        self.check_ring(other)?;
        Ok(Self::raw(self.d, &self.x - &other.x, &self.y - &other.y))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, QuadError> {
        self.check_ring(other)?;
        let (a, b, c, e) = (&self.x, &self.y, &other.x, &other.y);
        let be = b * e;
        Ok(if half_basis(self.d) {
            // tau^2 = tau - (1 + d)/4
            let m = BigInt::from((self.d + 1) / 4);
            Self::raw(self.d, a * c - &m * &be, a * e + b * c + be)
        } else {
            // tau^2 = -d
            Self::raw(self.d, a * c - BigInt::from(self.d) * be, a * e + b * c)
        })
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::raw(self.d, &self.x * k, &self.y * k)
    }

    /// Exact division by a rational integer, if the quotient is in `O_d`.
    pub fn div_exact(&self, k: &BigInt) -> Option<Self> {
        if k.is_zero() {
            return None;
        }
        let (qx, rx) = self.x.div_rem(k);
        let (qy, ry) = self.y.div_rem(k);
        (rx.is_zero() && ry.is_zero()).then(|| Self::raw(self.d, qx, qy))
    }

    /// Image in `O_d / (n)`, coordinates taken on the integral basis.
    pub fn reduce_mod(&self, n: &BigInt) -> Result<ResidueElement, QuadError> {
        if *n < BigInt::from(2) {
            return Err(QuadError::BadModulus(n.clone()));
        }
        let n_small = u32::try_from(n).map_err(|_| QuadError::BadModulus(n.clone()))?;
        let s = self.x.mod_floor(n);
        let t = self.y.mod_floor(n);
        Ok(ResidueElement::new(
            self.d,
            n_small,
            u32::try_from(&s).expect("residue below modulus"),
            u32::try_from(&t).expect("residue below modulus"),
        ))
    }

    /// Parses the canonical form `u+v*sqrt(-d)` and the basis forms
    /// `x+y*tau`, `x+y*eta` (an alias of `tau` for `d = 3 mod 4`) and, for
    /// `d = 3`, `x+y*omega`. Coefficients may be integers or halves `a/2`.
    pub fn parse(input: &str, d: u64) -> Result<Self, QuadError> {
        let r = QuadRat::parse(input, d)?;
        r.to_quad_int().ok_or_else(|| QuadError::Parse {
            input: input.to_owned(),
            d,
            reason: "value is not an algebraic integer".into(),
        })
    }
}

fn fmt_half(num: &BigInt) -> String {
    // num / 2
    if num.is_even() {
        (num / BigInt::from(2)).to_string()
    } else {
        format!("{num}/2")
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (b1, b2) = self.doubled_sqrt_coords();
        if b2.is_zero() {
            return write!(f, "{}", fmt_half(&b1));
        }
        let sign = if b2.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}*sqrt(-{})", fmt_half(&b1), sign, fmt_half(&b2.abs()), self.d)
    }
}

macro_rules! forward_binop {
    ($ty:ident, $trait:ident, $method:ident, $try:ident) => {
        impl $trait<&$ty> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                (&self).$method(rhs)
            }
        }
        impl $trait<$ty> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(QuadInt, Add, add, try_add);
forward_binop!(QuadInt, Sub, sub, try_sub);
forward_binop!(QuadInt, Mul, mul, try_mul);

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt::raw(self.d, -self.x, -self.y)
    }
}

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt::raw(self.d, -&self.x, -&self.y)
    }
}

/// An element `(x + y*tau) / den` of `Q(sqrt(-d))`, kept in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadRat {
    d: u64,
    x: BigInt,
    y: BigInt,
    den: BigInt,
}

impl QuadRat {
    pub fn new(d: u64, x: BigInt, y: BigInt, den: BigInt) -> Result<Self, QuadError> {
        if !is_square_free(d) {
            return Err(QuadError::NotSquareFree(d));
        }
        assert!(!den.is_zero(), "zero denominator");
        Ok(Self::normalized(d, x, y, den))
    }

    fn normalized(d: u64, mut x: BigInt, mut y: BigInt, mut den: BigInt) -> Self {
        if den.is_negative() {
            x = -x;
            y = -y;
            den = -den;
        }
        let g = x.gcd(&y).gcd(&den);
        if !g.is_one() && !g.is_zero() {
            x /= &g;
            y /= &g;
            den /= &g;
        }
        QuadRat { d, x, y, den }
    }

    pub fn from_rational(d: u64, r: &BigRational) -> Self {
        Self::normalized(d, r.numer().clone(), BigInt::zero(), r.denom().clone())
    }

    /// `u + v*sqrt(-d)` with rational `u`, `v`.
    pub fn from_sqrt_rationals(d: u64, u: &BigRational, v: &BigRational) -> Self {
        let den = u.denom().lcm(v.denom());
        let un = u.numer() * (&den / u.denom());
        let vn = v.numer() * (&den / v.denom());
        if half_basis(d) {
            // u + v sqrt(-d) = (u - v) + 2v tau
            Self::normalized(d, &un - &vn, vn * 2, den)
        } else {
            Self::normalized(d, un, vn, den)
        }
    }

    pub fn zero(d: u64) -> Self {
        Self::from_quad_int(&QuadInt::zero(d))
    }

    pub fn one(d: u64) -> Self {
        Self::from_quad_int(&QuadInt::one(d))
    }

    pub fn from_quad_int(a: &QuadInt) -> Self {
        QuadRat { d: a.d, x: a.x.clone(), y: a.y.clone(), den: BigInt::one() }
    }

    pub fn to_quad_int(&self) -> Option<QuadInt> {
        self.den.is_one().then(|| QuadInt::raw(self.d, self.x.clone(), self.y.clone()))
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    /// Rational coordinates `(u, v)` with `self = u + v*sqrt(-d)`.
    pub fn sqrt_rationals(&self) -> (BigRational, BigRational) {
        let two_den = &self.den * BigInt::from(2);
        if half_basis(self.d) {
            (
                BigRational::new(&self.x * 2 + &self.y, two_den.clone()),
                BigRational::new(self.y.clone(), two_den),
            )
        } else {
            (
                BigRational::new(self.x.clone(), self.den.clone()),
                BigRational::new(self.y.clone(), self.den.clone()),
            )
        }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| BigRational::new(self.x.clone(), self.den.clone()))
    }

    fn numerator(&self) -> QuadInt {
        QuadInt::raw(self.d, self.x.clone(), self.y.clone())
    }

    pub fn conj(&self) -> Self {
        let c = self.numerator().conj();
        Self::normalized(self.d, c.x, c.y, self.den.clone())
    }

    pub fn norm(&self) -> BigRational {
        BigRational::new(self.numerator().norm(), &self.den * &self.den)
    }

    pub fn trace(&self) -> BigRational {
        BigRational::new(self.numerator().trace(), self.den.clone())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, QuadError> {
        if self.d != other.d {
            return Err(QuadError::MismatchedRing(self.d, other.d));
        }
        Ok(Self::normalized(
            self.d,
            &self.x * &other.den + &other.x * &self.den,
            &self.y * &other.den + &other.y * &self.den,
            &self.den * &other.den,
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, QuadError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, QuadError> {
        let p = self.numerator().try_mul(&other.numerator())?;
        Ok(Self::normalized(self.d, p.x, p.y, &self.den * &other.den))
    }

    pub fn parse(input: &str, d: u64) -> Result<Self, QuadError> {
        if !is_square_free(d) {
            return Err(QuadError::NotSquareFree(d));
        }
        parse_terms(input, d)
    }
}

impl fmt::Display for QuadRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (u, v) = self.sqrt_rationals();
        if v.is_zero() {
            return write!(f, "{u}");
        }
        let sign = if v.is_negative() { '-' } else { '+' };
        write!(f, "{u}{sign}{}*sqrt(-{})", v.abs(), self.d)
    }
}

forward_binop!(QuadRat, Add, add, try_add);
forward_binop!(QuadRat, Sub, sub, try_sub);
forward_binop!(QuadRat, Mul, mul, try_mul);

impl Neg for QuadRat {
    type Output = QuadRat;
    fn neg(self) -> QuadRat {
        QuadRat { d: self.d, x: -self.x, y: -self.y, den: self.den }
    }
}

impl Neg for &QuadRat {
    type Output = QuadRat;
    fn neg(self) -> QuadRat {
        QuadRat { d: self.d, x: -&self.x, y: -&self.y, den: self.den.clone() }
    }
}

fn parse_terms(input: &str, d: u64) -> Result<QuadRat, QuadError> {
    let err = |reason: &str| QuadError::Parse { input: input.to_owned(), d, reason: reason.to_owned() };
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err("empty input"));
    }

    // Split into signed terms at top-level '+'/'-' (not inside parentheses).
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let bytes = s.as_bytes();
    let mut depth = 0i32;
    let mut start = 0usize;
    let mut negative = false;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 => {
                if i > 0 {
                    terms.push((negative, &s[start..i]));
                }
                negative = b == b'-';
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(err("unbalanced parentheses"));
    }
    terms.push((negative, &s[start..]));

    let mut acc = QuadRat::zero(d);
    for (neg, term) in terms {
        if term.is_empty() {
            return Err(err("empty term"));
        }
        let (coef_str, atom) = match term.split_once('*') {
            Some((c, a)) => (Some(c), Some(a)),
            None if term.chars().next().is_some_and(|c| c.is_ascii_digit()) => (Some(term), None),
            None => (None, Some(term)),
        };
        let coef = match coef_str {
            Some(c) => parse_rational(c).ok_or_else(|| err("bad coefficient"))?,
            None => BigRational::one(),
        };
        let coef = if neg { -coef } else { coef };
        let unit = match atom {
            None => QuadRat::one(d),
            Some(a) => parse_atom(a, d).map_err(|r| err(&r))?,
        };
        acc = &acc + &(&QuadRat::from_rational(d, &coef) * &unit);
    }
    Ok(acc)
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, m)) => {
            let n: BigInt = n.parse().ok()?;
            let m: BigInt = m.parse().ok()?;
            (!m.is_zero()).then(|| BigRational::new(n, m))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

fn parse_atom(atom: &str, d: u64) -> Result<QuadRat, String> {
    if let Some(inner) = atom.strip_prefix("sqrt(-").and_then(|r| r.strip_suffix(')')) {
        let dd: u64 = inner.parse().map_err(|_| format!("bad radicand in {atom}"))?;
        if dd != d {
            return Err(format!("radicand {dd} does not match d = {d}"));
        }
        return Ok(QuadRat::from_quad_int(&QuadInt::sqrt_neg_d(d)));
    }
    match atom {
        "tau" => Ok(QuadRat::from_quad_int(&QuadInt::tau(d))),
        "eta" if half_basis(d) => Ok(QuadRat::from_quad_int(&QuadInt::tau(d))),
        "omega" if d == 3 => Ok(QuadRat::from_quad_int(&QuadInt::omega())),
        _ => Err(format!("unknown symbol {atom:?}")),
    }
}
