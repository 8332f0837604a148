//! Circles `a|z|^2 + Bz + conj(Bz) + c = 0` with `a, c` in `Z` and `B` in `O_d`,
//! their discriminant `|B|^2 - ac`, the two `PSL_2(O_d)` actions, the
//! stabilizer shape of the circles `C_D : |z|^2 = D`, and co-compactness
//! certificates through quadratic non-residues.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::numtheory::{gcd_all, is_prime, mod_pow};
use crate::psl2::{Mat2, PslElement};
use crate::quadint::{QuadError, QuadInt};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircleError {
    #[error("degenerate circle datum: |B|^2 - ac = {0} is not positive")]
    Degenerate(BigInt),
    #[error("matrix is not Hermitian with integral diagonal")]
    NotHermitian,
    #[error("modulus d = {0} must be a prime >= 3")]
    BadPrime(u64),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// A primitive, sign-canonical triple `(a, B, c)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CircleTriple {
    a: BigInt,
    b: QuadInt,
    c: BigInt,
}

impl CircleTriple {
    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &QuadInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn d(&self) -> u64 {
        self.b.d()
    }

    /// `C_D`: the circle of radius `sqrt(D)` about the origin, `(1, 0, -D)`.
    pub fn centered(d: u64, disc: impl Into<BigInt>) -> Result<Self, CircleError> {
        primitive_triple(BigInt::one(), QuadInt::zero(d), -disc.into())
    }

    pub fn matrix(&self) -> HermitianMat {
        HermitianMat { a: self.a.clone(), b: self.b.clone(), c: self.c.clone() }
    }
}

impl fmt::Display for CircleTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// The Hermitian matrix `[[a, B], [conj(B), c]]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HermitianMat {
    pub a: BigInt,
    pub b: QuadInt,
    pub c: BigInt,
}

impl HermitianMat {
    pub fn det(&self) -> BigInt {
        &self.a * &self.c - self.b.norm()
    }

    pub fn to_mat2(&self) -> Mat2<QuadInt> {
        let d = self.b.d();
        Mat2::new(
            QuadInt::from_int(d, self.a.clone()),
            self.b.clone(),
            self.b.conj(),
            QuadInt::from_int(d, self.c.clone()),
        )
    }

    pub fn from_mat2(m: &Mat2<QuadInt>) -> Result<Self, CircleError> {
        let a = m.a11.as_integer().ok_or(CircleError::NotHermitian)?;
        let c = m.a22.as_integer().ok_or(CircleError::NotHermitian)?;
        if m.a21 != m.a12.conj() {
            return Err(CircleError::NotHermitian);
        }
        Ok(HermitianMat { a: a.clone(), b: m.a12.clone(), c: c.clone() })
    }

    /// Divides out the integer content `g`, the largest integer with
    /// `g | a`, `g | c` and `B / g` in `O_d`.
    fn primitive_part(&self) -> HermitianMat {
        let g = content(&self.a, &self.b, &self.c);
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        HermitianMat {
            a: &self.a / &g,
            b: self.b.div_exact(&g).expect("content divides B"),
            c: &self.c / &g,
        }
    }
}

// `B / g` is integral exactly when `g` divides both integral-basis coordinates.
fn content(a: &BigInt, b: &QuadInt, c: &BigInt) -> BigInt {
    gcd_all([a, b.x(), b.y(), c])
}

/// Reduces `(a, B, c)` to its primitive, sign-canonical triple.
pub fn primitive_triple(a: BigInt, b: QuadInt, c: BigInt) -> Result<CircleTriple, CircleError> {
    let disc = b.norm() - &a * &c;
    if !disc.is_positive() {
        return Err(CircleError::Degenerate(disc));
    }
    let p = HermitianMat { a, b, c }.primitive_part();
    let (b1, b2) = p.b.doubled_sqrt_coords();
    let leading = [&p.a, &b1, &b2, &p.c].into_iter().find(|v| !v.is_zero()).cloned().unwrap_or_default();
    Ok(if leading.is_negative() {
        CircleTriple { a: -p.a, b: -p.b, c: -p.c }
    } else {
        CircleTriple { a: p.a, b: p.b, c: p.c }
    })
}

/// `|B|^2 - ac`.
pub fn discriminant(c: &CircleTriple) -> BigInt {
    c.b.norm() - &c.a * &c.c
}

/// `T A T*`, with any integer content divided out.
pub fn hermitian_action(t: &PslElement, a: &HermitianMat) -> Result<HermitianMat, CircleError> {
    if t.d() != a.b.d() {
        return Err(QuadError::MismatchedRing(t.d(), a.b.d()).into());
    }
    let m = t.rep().mul(&a.to_mat2()).mul(&t.rep().star());
    Ok(HermitianMat::from_mat2(&m)?.primitive_part())
}

/// The image circle `T(C)`, computed as `V A V*` with `V = (T^-1)^t`.
pub fn circle_action(t: &PslElement, c: &CircleTriple) -> Result<CircleTriple, CircleError> {
    let v = PslElement::new(t.rep().adjugate().transpose()).expect("transpose of an inverse is unimodular");
    let image = hermitian_action(&v, &c.matrix())?;
    primitive_triple(image.a, image.b, image.c)
}

/// Returns `(alpha, beta)` when some sign of `M` has the shape
/// `[[alpha, D*beta], [conj(beta), conj(alpha)]]` with
/// `|alpha|^2 - D|beta|^2 = 1`, i.e. when `M` stabilizes `C_D`.
pub fn stab_form(m: &PslElement, disc: &BigInt) -> Option<(QuadInt, QuadInt)> {
    let n = m.normalized_rep();
    [n.negate(), n].into_iter().rev().find_map(|r| {
        let alpha = r.a11.clone();
        let beta = r.a21.conj();
        let shaped = r.a22 == alpha.conj() && r.a12 == beta.scale(disc);
        let unit = alpha.norm() - disc * beta.norm() == BigInt::one();
        (shaped && unit).then_some((alpha, beta))
    })
}

fn check_odd_prime(d: u64) -> Result<(), CircleError> {
    if d >= 3 && is_prime(d) {
        Ok(())
    } else {
        Err(CircleError::BadPrime(d))
    }
}

/// Euler's criterion: `D` is a non-residue mod the odd prime `d` iff
/// `D` is a unit and `D^((d-1)/2) != 1 (mod d)`.
pub fn is_quadratic_nonresidue(disc: &BigInt, d: u64) -> Result<bool, CircleError> {
    check_odd_prime(d)?;
    let m = BigInt::from(d);
    if disc.mod_floor(&m).is_zero() {
        return Ok(false);
    }
    Ok(!mod_pow(disc, &BigInt::from((d - 1) / 2), &m).is_one())
}

pub fn smallest_nonresidue(d: u64) -> Result<u64, CircleError> {
    check_odd_prime(d)?;
    (2..d)
        .find(|&x| is_quadratic_nonresidue(&BigInt::from(x), d).unwrap_or(false))
        .ok_or(CircleError::BadPrime(d))
}

/// Nonzero squares and non-squares modulo the odd prime `d`, both ascending.
pub fn residue_classes(d: u64) -> Result<(Vec<u64>, Vec<u64>), CircleError> {
    check_odd_prime(d)?;
    Ok((1..d).partition(|&x| !is_quadratic_nonresidue(&BigInt::from(x), d).unwrap_or(false)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateStatus {
    Certified,
    NotApplicable,
}

/// Records the hypotheses under which `Stab(C_D)` in `PSL_2(O_d)` is
/// co-compact: `d >= 3` prime and `D` a quadratic non-residue mod `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocompactCertificate {
    pub d: u64,
    pub disc: BigInt,
    pub d_is_odd_prime: bool,
    pub disc_is_nonresidue: bool,
    pub status: CertificateStatus,
}

impl CocompactCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == CertificateStatus::Certified
    }
}

pub fn cocompact_certificate(d: u64, disc: &BigInt) -> CocompactCertificate {
    let d_is_odd_prime = check_odd_prime(d).is_ok();
    let disc_is_nonresidue =
        d_is_odd_prime && disc.is_positive() && is_quadratic_nonresidue(disc, d).unwrap_or(false);
    let status = if d_is_odd_prime && disc_is_nonresidue {
        CertificateStatus::Certified
    } else {
        CertificateStatus::NotApplicable
    };
    CocompactCertificate { d, disc: disc.clone(), d_is_odd_prime, disc_is_nonresidue, status }
}
