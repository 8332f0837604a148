//! Finite quotients `PSL_2(O_d / (n))`, the reduction map `phi_n`, closure of
//! finite matrix groups, principal congruence subgroups `Gamma(n)`, and the
//! membership test for the figure-eight knot group `Gamma_8` in `PSL_2(O_3)`.
//!
//! `Gamma_8` contains `Gamma(4)`, so `M` lies in `Gamma_8` exactly when
//! `phi_4(M)` lies in `H_8`, the finite subgroup generated by the reductions
//! of the two `Gamma_8` generators.

use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use indexmap::IndexSet;
use num_bigint::BigInt;
use thiserror::Error;

use crate::psl2::PslElement;
use crate::quadint::{half_basis, QuadError, QuadInt};

/// Default bound on the size of a closure or enumeration.
pub const DEFAULT_CAP: usize = 1_000_000;

/// Logged wherever finite-model counts stand in for indices of infinite groups.
pub const SURJECTIVITY_ASSUMPTION: &str = "finite-model counts describe subsets of PSL2(O3/(4)); reading them \
as indices of Gamma(2), Gamma(4) and Gamma8 in PSL2(O3) assumes reduction mod (4) maps PSL2(O3) onto PSL2(O3/(4))";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CongruenceError {
    #[error("group exceeds the cap of {0} elements")]
    CapExceeded(usize),
    #[error("generators must be nonempty and share (d, n)")]
    BadGenerators,
    #[error("Gamma8 membership is defined only for d = 3, got d = {0}")]
    NotEisenstein(u64),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// An element `s + t*tau` of `O_d / (n)` with `0 <= s, t < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueElement {
    d: u64,
    n: u32,
    s: u32,
    t: u32,
}

impl ResidueElement {
    pub fn new(d: u64, n: u32, s: u32, t: u32) -> Self {
        debug_assert!(s < n && t < n);
        ResidueElement { d, n, s, t }
    }

    pub fn coords(&self) -> (u32, u32) {
        (self.s, self.t)
    }

    pub fn modulus(&self) -> u32 {
        self.n
    }
}

impl fmt::Display for ResidueElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*tau (mod {})", self.s, self.t, self.n)
    }
}

/// Arithmetic in `R_n = O_d / (n)` on raw coordinate pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct ResidueRing {
    d: u64,
    n: u32,
}

type Pair = (u32, u32);

impl ResidueRing {
    fn add(&self, a: Pair, b: Pair) -> Pair {
        let n = self.n;
        ((a.0 + b.0) % n, (a.1 + b.1) % n)
    }

    fn neg(&self, a: Pair) -> Pair {
        let n = self.n;
        ((n - a.0) % n, (n - a.1) % n)
    }

    fn mul(&self, a: Pair, b: Pair) -> Pair {
        let n = u64::from(self.n);
        let (x, y, u, v) = (u64::from(a.0), u64::from(a.1), u64::from(b.0), u64::from(b.1));
        let yv = y * v % n;
        let (s, t) = if half_basis(self.d) {
            // tau^2 = tau - m
            let m = ((self.d + 1) / 4) % n;
            ((x * u + (n - m) * yv) % n, (x * v + y * u + yv) % n)
        } else {
            let dd = self.d % n;
            ((x * u + (n - dd) * yv) % n, (x * v + y * u) % n)
        };
        (s as u32, t as u32)
    }
}

/// A class in `PSL_2(O_d / (n))`, stored as the lexicographically smaller
/// of the coordinate tuples of `M` and `-M`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueMatrix {
    d: u64,
    n: u32,
    coords: [u32; 8],
}

impl ResidueMatrix {
    fn ring(&self) -> ResidueRing {
        ResidueRing { d: self.d, n: self.n }
    }

    fn entry(&self, i: usize) -> Pair {
        (self.coords[2 * i], self.coords[2 * i + 1])
    }

    fn from_entries(d: u64, n: u32, e: [Pair; 4]) -> Self {
        let coords = [e[0].0, e[0].1, e[1].0, e[1].1, e[2].0, e[2].1, e[3].0, e[3].1];
        let ring = ResidueRing { d, n };
        let neg = e.map(|p| ring.neg(p));
        let neg_coords = [neg[0].0, neg[0].1, neg[1].0, neg[1].1, neg[2].0, neg[2].1, neg[3].0, neg[3].1];
        ResidueMatrix { d, n, coords: coords.min(neg_coords) }
    }

    pub fn identity(d: u64, n: u32) -> Self {
        Self::from_entries(d, n, [(1 % n, 0), (0, 0), (0, 0), (1 % n, 0)])
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn modulus(&self) -> u32 {
        self.n
    }

    pub fn coords(&self) -> [u32; 8] {
        self.coords
    }

    pub fn entries(&self) -> [ResidueElement; 4] {
        std::array::from_fn(|i| {
            let (s, t) = self.entry(i);
            ResidueElement::new(self.d, self.n, s, t)
        })
    }

    fn det_of(ring: ResidueRing, e: &[Pair; 4]) -> Pair {
        ring.add(ring.mul(e[0], e[3]), ring.neg(ring.mul(e[1], e[2])))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!((self.d, self.n), (o.d, o.n), "residue matrices over different rings");
        let r = self.ring();
        let (a, b) = (self, o);
        let m = |i: usize, j: usize, k: usize, l: usize| r.add(r.mul(a.entry(i), b.entry(j)), r.mul(a.entry(k), b.entry(l)));
        Self::from_entries(self.d, self.n, [m(0, 0, 1, 2), m(0, 1, 1, 3), m(2, 0, 3, 2), m(2, 1, 3, 3)])
    }

    pub fn inv(&self) -> Self {
        let r = self.ring();
        Self::from_entries(self.d, self.n, [self.entry(3), r.neg(self.entry(1)), r.neg(self.entry(2)), self.entry(0)])
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.d, self.n)
    }

    /// Image under `O_d / (n) -> O_d / (m)` for `m | n`.
    pub fn reduce_to(&self, m: u32) -> Self {
        assert!(m >= 2 && self.n.is_multiple_of(m), "{m} does not divide {}", self.n);
        let e = std::array::from_fn(|i| {
            let (s, t) = self.entry(i);
            (s % m, t % m)
        });
        Self::from_entries(self.d, m, e)
    }
}

impl fmt::Display for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.coords;
        write!(
            f,
            "[[({},{}),({},{})],[({},{}),({},{})]] mod {}",
            c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7], self.n
        )
    }
}

/// Entrywise reduction of `M` modulo `(n)`, projectively normalized.
pub fn phi_n(m: &PslElement, n: u32) -> Result<ResidueMatrix, CongruenceError> {
    let nb = BigInt::from(n);
    let r = m.rep();
    let mut e = [(0u32, 0u32); 4];
    for (slot, q) in e.iter_mut().zip(r.entries()) {
        *slot = q.reduce_mod(&nb)?.coords();
    }
    Ok(ResidueMatrix::from_entries(m.d(), n, e))
}

/// `M` in the principal congruence subgroup `Gamma(n)`.
pub fn in_gamma_n(m: &PslElement, n: u32) -> Result<bool, CongruenceError> {
    Ok(phi_n(m, n)?.is_identity())
}

/// A finite subgroup of `PSL_2(O_d / (n))` with its generators, elements in
/// breadth-first discovery order.
#[derive(Debug, Clone)]
pub struct FiniteSubgroup {
    elements: IndexSet<ResidueMatrix>,
    generators: Vec<ResidueMatrix>,
}

impl FiniteSubgroup {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, m: &ResidueMatrix) -> bool {
        self.elements.contains(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ResidueMatrix> {
        self.elements.iter()
    }

    pub fn generators(&self) -> &[ResidueMatrix] {
        &self.generators
    }

    /// `[other : self]` when `self` is contained in `other`.
    pub fn index_in(&self, other: &FiniteSubgroup) -> Option<usize> {
        let contained = self.iter().all(|m| other.contains(m));
        (contained && other.len().is_multiple_of(self.len())).then(|| other.len() / self.len())
    }

    pub fn is_abelian(&self) -> bool {
        let els: Vec<_> = self.iter().collect();
        els.iter().enumerate().all(|(i, a)| els[i + 1..].iter().all(|b| a.mul(b) == b.mul(a)))
    }

    pub fn has_exponent_two(&self) -> bool {
        self.iter().all(|m| m.mul(m).is_identity())
    }

    /// Subgroup of elements satisfying `keep`; the caller asserts it is a group.
    pub fn filter(&self, keep: impl Fn(&ResidueMatrix) -> bool) -> FiniteSubgroup {
        let elements: IndexSet<_> = self.iter().filter(|m| keep(m)).cloned().collect();
        let generators = elements.iter().cloned().collect();
        FiniteSubgroup { elements, generators }
    }
}

/// Breadth-first closure of `gens` under right multiplication by generators.
pub fn group_closure(gens: &[ResidueMatrix], cap: usize) -> Result<FiniteSubgroup, CongruenceError> {
    let first = gens.first().ok_or(CongruenceError::BadGenerators)?;
    let (d, n) = (first.d, first.n);
    if gens.iter().any(|g| (g.d, g.n) != (d, n)) {
        return Err(CongruenceError::BadGenerators);
    }
    let mut elements = IndexSet::new();
    let id = ResidueMatrix::identity(d, n);
    elements.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(g);
            if elements.insert(y.clone()) {
                if elements.len() > cap {
                    return Err(CongruenceError::CapExceeded(cap));
                }
                queue.push_back(y);
            }
        }
    }
    Ok(FiniteSubgroup { elements, generators: gens.to_vec() })
}

/// Every class of `PSL_2(O_d / (n))`, by exhaustive scan of all `n^8`
/// coordinate tuples.
pub fn enumerate_psl2(d: u64, n: u32, cap: usize) -> Result<FiniteSubgroup, CongruenceError> {
    if n < 2 {
        return Err(QuadError::BadModulus(n.into()).into());
    }
    let space = u64::from(n).checked_pow(8).unwrap_or(u64::MAX);
    if space > 64 * cap as u64 {
        return Err(CongruenceError::CapExceeded(cap));
    }
    let ring = ResidueRing { d, n };
    let one = (1 % n, 0);
    let mut elements = IndexSet::new();
    let mut digits = [0u32; 8];
    for _ in 0..space {
        let e = [(digits[0], digits[1]), (digits[2], digits[3]), (digits[4], digits[5]), (digits[6], digits[7])];
        if ResidueMatrix::det_of(ring, &e) == one {
            elements.insert(ResidueMatrix::from_entries(d, n, e));
            if elements.len() > cap {
                return Err(CongruenceError::CapExceeded(cap));
            }
        }
        for digit in digits.iter_mut().rev() {
            *digit += 1;
            if *digit < n {
                break;
            }
            *digit = 0;
        }
    }
    let generators = elements.iter().cloned().collect();
    Ok(FiniteSubgroup { elements, generators })
}

/// `mu = [[1, 1], [0, 1]]` and `[[1, 0], [-omega, 1]]`.
pub fn gamma8_generators() -> [PslElement; 2] {
    let one = QuadInt::one(3);
    let zero = QuadInt::zero(3);
    [
        PslElement::translation(one.clone()).named("mu"),
        PslElement::from_entries(one.clone(), zero, -QuadInt::omega(), one)
            .expect("unimodular")
            .named("y"),
    ]
}

/// The extra generator `[[1, 1 + 2*omega], [0, 1]]` of the index-2 overgroup.
pub fn gamma8_prime_extra_generator() -> PslElement {
    PslElement::translation(QuadInt::one(3) + QuadInt::omega().scale(&BigInt::from(2)))
}

/// `H_8 = phi_4(Gamma_8)`.
pub fn h8() -> &'static FiniteSubgroup {
    static H8: OnceLock<FiniteSubgroup> = OnceLock::new();
    H8.get_or_init(|| {
        let gens: Vec<_> = gamma8_generators().iter().map(|g| phi_n(g, 4).expect("n = 4")).collect();
        group_closure(&gens, DEFAULT_CAP).expect("H8 is finite")
    })
}

pub fn in_gamma8(m: &PslElement) -> Result<bool, CongruenceError> {
    if m.d() != 3 {
        return Err(CongruenceError::NotEisenstein(m.d()));
    }
    Ok(h8().contains(&phi_n(m, 4)?))
}

/// Exact counts inside `PSL_2(O_3 / (4))` that model the congruence facts
/// about `Gamma(2)`, `Gamma(4)`, `Gamma_8` and its index-2 overgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteModelReport {
    pub psl2_r4_order: usize,
    /// Size of the kernel of reduction `PSL_2(R_4) -> PSL_2(R_2)`.
    pub level2_kernel_order: usize,
    pub level2_kernel_abelian: bool,
    pub level2_kernel_exponent_two: bool,
    /// `r` with `|kernel| = 2^r`, when the kernel is elementary abelian.
    pub level2_kernel_rank: Option<u32>,
    pub h8_order: usize,
    pub h8_index: Option<usize>,
    pub h8_prime_order: usize,
    pub h8_index_in_h8_prime: Option<usize>,
    pub assumption: &'static str,
}

pub fn finite_model_report() -> Result<FiniteModelReport, CongruenceError> {
    let all = enumerate_psl2(3, 4, DEFAULT_CAP)?;
    let kernel = all.filter(|m| m.reduce_to(2).is_identity());
    let abelian = kernel.is_abelian();
    let exp2 = kernel.has_exponent_two();
    let rank = (abelian && exp2 && kernel.len().is_power_of_two()).then(|| kernel.len().trailing_zeros());

    let h8 = h8();
    let mut gens: Vec<_> = h8.generators().to_vec();
    gens.push(phi_n(&gamma8_prime_extra_generator(), 4)?);
    let h8p = group_closure(&gens, DEFAULT_CAP)?;

    Ok(FiniteModelReport {
        psl2_r4_order: all.len(),
        level2_kernel_order: kernel.len(),
        level2_kernel_abelian: abelian,
        level2_kernel_exponent_two: exp2,
        level2_kernel_rank: rank,
        h8_order: h8.len(),
        h8_index: h8.index_in(&all),
        h8_prime_order: h8p.len(),
        h8_index_in_h8_prime: h8.index_in(&h8p),
        assumption: SURJECTIVITY_ASSUMPTION,
    })
}
