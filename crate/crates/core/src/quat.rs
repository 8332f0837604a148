//! Quaternion algebras `(a, b / Q)`, the embedding `rho` of `(-d, D / Q)` into
//! `M_2(Q(sqrt(-d)))`, and the orders whose norm-one units map onto the
//! stabilizers of the circles `C_D`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::circles::stab_form;
use crate::psl2::{Mat2, Psl2Error, PslElement};
use crate::quadint::{is_square_free, QuadRat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuatError {
    #[error("Hilbert symbol parameters must be nonzero")]
    ZeroParameter,
    #[error("quaternions from different algebras")]
    AlgebraMismatch,
    #[error("the embedding needs i^2 = -d for a positive square-free d, got {0}")]
    UnsupportedEmbedding(BigRational),
    #[error("algebra is not (-{d}, {disc}/Q)")]
    WrongAlgebra { d: u64, disc: BigInt },
    #[error("quaternion is not in the order for d = {0}")]
    NotInOrder(u64),
    #[error("reduced norm is {0}, expected 1")]
    NotNormOne(BigRational),
    #[error("image does not have stabilizer shape")]
    ShapeFailure,
    #[error(transparent)]
    Psl2(#[from] Psl2Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuatAlgebra {
    a: BigRational,
    b: BigRational,
}

impl QuatAlgebra {
    pub fn new(a: BigRational, b: BigRational) -> Result<Self, QuatError> {
        if a.is_zero() || b.is_zero() {
            return Err(QuatError::ZeroParameter);
        }
        Ok(QuatAlgebra { a, b })
    }

    /// `(-d, D / Q)`.
    pub fn bianchi(d: u64, disc: impl Into<BigInt>) -> Result<Self, QuatError> {
        Self::new(BigRational::from_integer(-BigInt::from(d)), BigRational::from_integer(disc.into()))
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn element(&self, coords: [BigRational; 4]) -> Quaternion {
        Quaternion { alg: self.clone(), x: coords }
    }

    pub fn from_ints(&self, coords: [i64; 4]) -> Quaternion {
        self.element(coords.map(|c| BigRational::from_integer(c.into())))
    }

    pub fn one(&self) -> Quaternion {
        self.from_ints([1, 0, 0, 0])
    }

    pub fn i(&self) -> Quaternion {
        self.from_ints([0, 1, 0, 0])
    }

    pub fn j(&self) -> Quaternion {
        self.from_ints([0, 0, 1, 0])
    }

    pub fn k(&self) -> Quaternion {
        self.from_ints([0, 0, 0, 1])
    }

    /// The `d` with `a = -d`, when `d` is a positive square-free integer.
    fn embedding_d(&self) -> Result<u64, QuatError> {
        let unsupported = || QuatError::UnsupportedEmbedding(self.a.clone());
        if !self.a.is_integer() {
            return Err(unsupported());
        }
        let d = u64::try_from(-self.a.to_integer()).map_err(|_| unsupported())?;
        if !is_square_free(d) {
            return Err(unsupported());
        }
        Ok(d)
    }
}

/// `x0 + x1*i + x2*j + x3*k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quaternion {
    alg: QuatAlgebra,
    x: [BigRational; 4],
}

impl Quaternion {
    pub fn algebra(&self) -> &QuatAlgebra {
        &self.alg
    }

    pub fn coords(&self) -> &[BigRational; 4] {
        &self.x
    }

    pub fn conj(&self) -> Quaternion {
        let [x0, x1, x2, x3] = &self.x;
        self.alg.element([x0.clone(), -x1, -x2, -x3])
    }

    pub fn add(&self, o: &Quaternion) -> Result<Quaternion, QuatError> {
        if self.alg != o.alg {
            return Err(QuatError::AlgebraMismatch);
        }
        let x = std::array::from_fn(|n| &self.x[n] + &o.x[n]);
        Ok(self.alg.element(x))
    }

    /// Multiplication from `i^2 = a`, `j^2 = b`, `ij = -ji = k`.
    pub fn mul(&self, o: &Quaternion) -> Result<Quaternion, QuatError> {
        if self.alg != o.alg {
            return Err(QuatError::AlgebraMismatch);
        }
        let (a, b) = (&self.alg.a, &self.alg.b);
        let ab = a * b;
        let [x0, x1, x2, x3] = &self.x;
        let [y0, y1, y2, y3] = &o.x;
        let z0 = x0 * y0 + a * x1 * y1 + b * x2 * y2 - &ab * x3 * y3;
        let z1 = x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2;
        let z2 = x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1;
        let z3 = x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1;
        Ok(self.alg.element([z0, z1, z2, z3]))
    }

    /// `x * conj(x) = x0^2 - a x1^2 - b x2^2 + ab x3^2`.
    pub fn reduced_norm(&self) -> BigRational {
        let (a, b) = (&self.alg.a, &self.alg.b);
        let [x0, x1, x2, x3] = &self.x;
        x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3
    }

    /// `x + conj(x) = 2 x0`.
    pub fn reduced_trace(&self) -> BigRational {
        &self.x[0] * BigRational::from_integer(2.into())
    }

    /// `[[x0 + x1 sqrt(a), b (x2 + x3 sqrt(a))], [x2 - x3 sqrt(a), x0 - x1 sqrt(a)]]`
    /// for algebras with `a = -d`.
    pub fn rho(&self) -> Result<Mat2<QuadRat>, QuatError> {
        let d = self.alg.embedding_d()?;
        let [x0, x1, x2, x3] = &self.x;
        let b = &self.alg.b;
        Ok(Mat2::new(
            QuadRat::from_sqrt_rationals(d, x0, x1),
            QuadRat::from_sqrt_rationals(d, &(b * x2), &(b * x3)),
            QuadRat::from_sqrt_rationals(d, x2, &-x3),
            QuadRat::from_sqrt_rationals(d, x0, &-x1),
        ))
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x0, x1, x2, x3] = &self.x;
        write!(f, "{x0} + {x1}i + {x2}j + {x3}k")
    }
}

fn is_algebra(x: &Quaternion, d: u64) -> bool {
    x.alg.a == BigRational::from_integer(-BigInt::from(d)) && x.alg.b.is_integer()
}

/// Membership in the order: integer coordinates for `d = 1, 2 (mod 4)`;
/// for `d = 3 (mod 4)`, halves `y_n / 2` with `y0 = y1` and `y2 = y3 (mod 2)`.
pub fn in_order(x: &Quaternion, d: u64) -> bool {
    if !is_algebra(x, d) {
        return false;
    }
    if d % 4 == 3 {
        let two = BigRational::from_integer(2.into());
        let doubled: Option<Vec<BigInt>> =
            x.x.iter().map(|c| (c * &two).is_integer().then(|| (c * &two).to_integer())).collect();
        match doubled.as_deref() {
            Some([y0, y1, y2, y3]) => (y0 - y1).is_even() && (y2 - y3).is_even(),
            _ => false,
        }
    } else {
        x.x.iter().all(BigRational::is_integer)
    }
}

/// Maps a norm-one unit of the order to `rho(x)` in `Stab(C_D)`.
pub fn order_unit_to_stab(x: &Quaternion, d: u64, disc: &BigInt) -> Result<PslElement, QuatError> {
    if !is_algebra(x, d) || x.alg.b != BigRational::from_integer(disc.clone()) {
        return Err(QuatError::WrongAlgebra { d, disc: disc.clone() });
    }
    if !in_order(x, d) {
        return Err(QuatError::NotInOrder(d));
    }
    let n = x.reduced_norm();
    if !n.is_one() {
        return Err(QuatError::NotNormOne(n));
    }
    let m = x.rho()?;
    let entries = m.map(QuadRat::to_quad_int);
    let [Some(a11), Some(a12), Some(a21), Some(a22)] = [entries.a11, entries.a12, entries.a21, entries.a22] else {
        return Err(QuatError::NotInOrder(d));
    };
    let g = PslElement::from_entries(a11, a12, a21, a22)?;
    stab_form(&g, disc).ok_or(QuatError::ShapeFailure)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadint::QuadInt;
    use proptest::prelude::*;

    fn rat(n: i64, m: i64) -> BigRational {
        BigRational::new(n.into(), m.into())
    }

    #[test]
    fn defining_relations() {
        let alg = QuatAlgebra::new(rat(-3, 1), rat(5, 1)).unwrap();
        let (i, j, k) = (alg.i(), alg.j(), alg.k());
        assert_eq!(i.mul(&j).unwrap(), k);
        assert_eq!(j.mul(&i).unwrap(), alg.from_ints([0, 0, 0, -1]));
        assert_eq!(i.mul(&i).unwrap(), alg.from_ints([-3, 0, 0, 0]));
        assert_eq!(j.mul(&j).unwrap(), alg.from_ints([5, 0, 0, 0]));
        assert_eq!(k.mul(&k).unwrap(), alg.from_ints([15, 0, 0, 0]));
        let x = alg.from_ints([2, -1, 3, 7]);
        assert_eq!(x.mul(&alg.one()).unwrap(), x);
    }

    #[test]
    fn parameters_and_mismatch() {
        assert_eq!(QuatAlgebra::new(rat(0, 1), rat(1, 1)), Err(QuatError::ZeroParameter));
        let a = QuatAlgebra::bianchi(3, 2).unwrap();
        let b = QuatAlgebra::bianchi(3, 5).unwrap();
        assert_eq!(a.one().mul(&b.one()), Err(QuatError::AlgebraMismatch));
    }

    #[test]
    fn norm_and_trace() {
        let alg = QuatAlgebra::bianchi(3, 7).unwrap();
        assert_eq!(alg.one().reduced_norm(), rat(1, 1));
        assert_eq!(alg.one().reduced_trace(), rat(2, 1));
        let x = alg.from_ints([1, 1, 0, 0]);
        assert_eq!(x.reduced_norm(), rat(4, 1));
        // oracle: x * conj(x)
        assert_eq!(x.mul(&x.conj()).unwrap(), alg.from_ints([4, 0, 0, 0]));
    }

    #[test]
    fn embedding_of_basis() {
        let alg = QuatAlgebra::bianchi(3, 7).unwrap();
        let id = alg.one().rho().unwrap();
        assert_eq!(id, Mat2::identity_like(&QuadRat::zero(3)));
        let ri = alg.i().rho().unwrap();
        let s = QuadRat::from_quad_int(&QuadInt::sqrt_neg_d(3));
        assert_eq!(ri, Mat2::new(s.clone(), QuadRat::zero(3), QuadRat::zero(3), -s));
        let bad = QuatAlgebra::new(rat(2, 1), rat(3, 1)).unwrap();
        assert!(matches!(bad.i().rho(), Err(QuatError::UnsupportedEmbedding(_))));
    }

    #[test]
    fn order_membership() {
        let alg3 = QuatAlgebra::bianchi(3, 2).unwrap();
        assert!(in_order(&alg3.one(), 3));
        assert!(in_order(&alg3.element([rat(1, 2), rat(1, 2), rat(0, 1), rat(0, 1)]), 3));
        assert!(!in_order(&alg3.element([rat(1, 2), rat(0, 1), rat(0, 1), rat(0, 1)]), 3));
        let alg2 = QuatAlgebra::bianchi(2, 5).unwrap();
        assert!(!in_order(&alg2.element([rat(0, 1), rat(1, 2), rat(0, 1), rat(0, 1)]), 2));
        assert!(in_order(&alg2.from_ints([1, 2, 3, 4]), 2));
    }

    #[test]
    fn unit_to_stabilizer() {
        let disc = BigInt::from(2);
        let alg = QuatAlgebra::bianchi(3, 2).unwrap();
        assert!(order_unit_to_stab(&alg.one(), 3, &disc).unwrap().is_identity());
        // 3^2 - 2*2^2 = 1
        let x = alg.from_ints([3, 0, 2, 0]);
        let g = order_unit_to_stab(&x, 3, &disc).unwrap();
        assert!(stab_form(&g, &disc).is_some());
        assert_eq!(order_unit_to_stab(&alg.i(), 3, &disc), Err(QuatError::NotNormOne(rat(3, 1))));
        let half = alg.element([rat(1, 2), rat(0, 1), rat(0, 1), rat(0, 1)]);
        assert_eq!(order_unit_to_stab(&half, 3, &disc), Err(QuatError::NotInOrder(3)));
        assert!(matches!(order_unit_to_stab(&x, 3, &BigInt::from(5)), Err(QuatError::WrongAlgebra { .. })));
    }

    fn arb_quat() -> impl Strategy<Value = Quaternion> {
        (
            prop::sample::select(vec![1u64, 2, 3, 5, 7, 11]),
            1i64..=12,
            prop::array::uniform4((-20i64..=20, 1i64..=4)),
        )
            .prop_map(|(d, disc, cs)| {
                QuatAlgebra::bianchi(d, disc).unwrap().element(cs.map(|(n, m)| rat(n, m)))
            })
    }

    /// Integer combination of the order basis: `1, i, j, ij` for
    /// `d = 1, 2 (mod 4)`, and `1, (1+i)/2, j, (j+ij)/2` for `d = 3 (mod 4)`.
    fn order_element(alg: &QuatAlgebra, d: u64, c: [i64; 4]) -> Quaternion {
        if d % 4 == 3 {
            alg.element([rat(2 * c[0] + c[1], 2), rat(c[1], 2), rat(2 * c[2] + c[3], 2), rat(c[3], 2)])
        } else {
            alg.from_ints(c)
        }
    }

    fn order_pair() -> impl Strategy<Value = (u64, i64, [i64; 4], [i64; 4])> {
        (
            prop::sample::select(vec![1u64, 2, 3, 7, 11, 19]),
            1i64..=30,
            prop::array::uniform4(-30i64..=30),
            prop::array::uniform4(-30i64..=30),
        )
    }

    fn pair() -> impl Strategy<Value = (Quaternion, Quaternion)> {
        arb_quat().prop_flat_map(|x| {
            let alg = x.algebra().clone();
            (Just(x), prop::array::uniform4((-20i64..=20, 1i64..=4)))
                .prop_map(move |(x, cs)| (x, alg.element(cs.map(|(n, m)| rat(n, m)))))
        })
    }

    proptest! {
        #[test]
        fn norm_matches_defining_product(x in arb_quat()) {
            let prod = x.mul(&x.conj()).unwrap();
            let [p0, p1, p2, p3] = prod.coords().clone();
            prop_assert_eq!(p0, x.reduced_norm());
            prop_assert!(p1.is_zero() && p2.is_zero() && p3.is_zero());
            let sum = x.add(&x.conj()).unwrap();
            prop_assert_eq!(sum.coords()[0].clone(), x.reduced_trace());
        }

        #[test]
        fn conj_is_an_anti_automorphism((x, y) in pair()) {
            prop_assert_eq!(x.mul(&y).unwrap().conj(), y.conj().mul(&x.conj()).unwrap());
            prop_assert_eq!(
                x.mul(&y).unwrap().reduced_norm(),
                x.reduced_norm() * y.reduced_norm()
            );
        }

        #[test]
        fn rho_is_a_ring_homomorphism((x, y) in pair()) {
            let rx = x.rho().unwrap();
            let ry = y.rho().unwrap();
            prop_assert_eq!(x.mul(&y).unwrap().rho().unwrap(), rx.mul(&ry));
            prop_assert_eq!(x.add(&y).unwrap().rho().unwrap(), rx.add(&ry));
        }

        #[test]
        fn rho_preserves_trace_and_norm(x in arb_quat()) {
            let r = x.rho().unwrap();
            prop_assert_eq!(r.trace().as_rational().unwrap(), x.reduced_trace());
            prop_assert_eq!(r.det().as_rational().unwrap(), x.reduced_norm());
        }

        #[test]
        fn order_is_a_ring((d, disc, a, b) in order_pair()) {
            let alg = QuatAlgebra::bianchi(d, disc).unwrap();
            let (x, y) = (order_element(&alg, d, a), order_element(&alg, d, b));
            prop_assert!(in_order(&x, d) && in_order(&y, d));
            prop_assert!(in_order(&x.mul(&y).unwrap(), d));
            prop_assert!(in_order(&x.add(&y).unwrap(), d));
            prop_assert!(in_order(&x.conj(), d));
        }
    }
}
