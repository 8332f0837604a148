//! Small integer helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut p = 3u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 2;
    }
    true
}

/// `base^exp mod m` for `m >= 1`.
pub fn mod_pow(base: &BigInt, exp: &BigInt, m: &BigInt) -> BigInt {
    base.mod_floor(m).modpow(exp, m)
}

/// Extended gcd: returns `(g, s, t)` with `s*a + t*b = g`, `g >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let (g, s, _) = ext_gcd(&a.mod_floor(m), m);
    g.is_one().then(|| s.mod_floor(m))
}

pub fn gcd_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}
