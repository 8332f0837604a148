//! Construction of compression witnesses: elements
//! `g_k = sigma^{n_k} (h sigma h^-1)^m sigma^{n_k}` of the normal closure of a
//! parabolic `sigma = [[1, xi], [0, 1]]` that stabilize the circle
//! `|z|^2 = D_k`, together with the named checks that certify them.
//!
//! Two modes are supported:
//!
//! * `Fig8`: `d = 3`, `xi = p + q(4 omega + 2)` from a surgery slope `p/q` with
//!   `4 | p`, `3 !| p`, `gcd(p, q) = 1`; `m = 6` and
//!   `n_k = -3|xi|^2 (2 + 3k) + 9`, `D_k = |xi|^2 n_k^2 + 2 + 3k`.
//! * `General`: a prime `d >= 3`, any `xi` in `O_d` with `d !| |xi|^2`, and a
//!   non-residue `x`; `m = 2d` and `n_k = -d|xi|^2 (dk + x) + d^2`,
//!   `D_k = n_k^2 |xi|^2 + dk + x`.
//!
//! In both modes `alpha_k = 1 - m n_k |xi|^4 - m |xi|^2 sqrt(-d)` and
//! `beta_k = -m |xi|^2 xi`.

use std::collections::HashMap;
use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::circles::{cocompact_certificate, is_quadratic_nonresidue, smallest_nonresidue, stab_form};
use crate::congruence::{in_gamma8, SURJECTIVITY_ASSUMPTION};
use crate::numtheory::{is_prime, mod_inverse};
use crate::psl2::{classify, eval_word, IsometryClass, Mat2, PslElement, Word};
use crate::quadint::QuadInt;

pub const SIGMA: &str = "sigma";
pub const H: &str = "h";

const GAMMA8_ASSUMPTION: &str =
    "Gamma8 membership is decided as phi_4(M) in phi_4(Gamma8), which uses that Gamma8 contains Gamma(4)";
const GENERAL_ASSUMPTION: &str =
    "certified in PSL2(O_d); lifting sigma to a torsion-free finite-index subgroup is not computed";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("internal consistency check failed: {0}")]
    CheckFailed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Fig8,
    General,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Fig8 => "fig8",
            Mode::General => "general",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "fig8" => Some(Mode::Fig8),
            "general" => Some(Mode::General),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A slope `p/q`, identified with `mu^p lambda^q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slope {
    pub p: BigInt,
    pub q: BigInt,
}

impl Slope {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self, PipelineError> {
        let (p, q) = (p.into(), q.into());
        if p.is_zero() && q.is_zero() {
            return Err(PipelineError::InvalidParams("slope 0/0".into()));
        }
        if !p.gcd(&q).is_one() {
            return Err(PipelineError::InvalidParams(format!("slope {p}/{q} is not reduced")));
        }
        Ok(Slope { p, q })
    }
}

/// Distance `|p q' - p' q|` between slopes.
pub fn delta(a: &Slope, b: &Slope) -> BigInt {
    (&a.p * &b.q - &b.p * &a.q).abs()
}

/// Validated figure-eight surgery parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeParams {
    p: BigInt,
    q: BigInt,
}

impl SlopeParams {
    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }
}

pub fn validate_fig8(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<SlopeParams, PipelineError> {
    let (p, q) = (p.into(), q.into());
    let mut failures = Vec::new();
    if !(&p % BigInt::from(4)).is_zero() {
        failures.push("4 does not divide p");
    }
    if (&p % BigInt::from(3)).is_zero() {
        failures.push("3 divides p");
    }
    if !p.gcd(&q).is_one() {
        failures.push("gcd(p, q) != 1");
    }
    if failures.is_empty() {
        Ok(SlopeParams { p, q })
    } else {
        Err(PipelineError::InvalidParams(failures.join("; ")))
    }
}

/// `xi = p + q(4 omega + 2)`, so `|xi|^2 = p^2 + 12 q^2`.
pub fn xi_fig8(params: &SlopeParams) -> QuadInt {
    let lambda_entry = QuadInt::omega().scale(&BigInt::from(4)) + QuadInt::from_int(3, 2);
    QuadInt::from_int(3, params.p.clone()) + lambda_entry.scale(&params.q)
}

/// Validated parameters for a prime `d >= 3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralParams {
    d: u64,
    xi: QuadInt,
    x: u64,
}

impl GeneralParams {
    /// `x` defaults to the smallest non-residue mod `d`.
    pub fn new(d: u64, xi: QuadInt, x: Option<u64>) -> Result<Self, PipelineError> {
        let invalid = |s: String| Err(PipelineError::InvalidParams(s));
        if d < 3 || !is_prime(d) {
            return invalid(format!("d = {d} is not a prime >= 3"));
        }
        if xi.d() != d {
            return invalid(format!("xi lies in O_{} but d = {d}", xi.d()));
        }
        if (xi.norm() % d).is_zero() {
            return invalid(format!("d = {d} divides |xi|^2 = {}", xi.norm()));
        }
        let x = match x {
            Some(x) => x,
            None => smallest_nonresidue(d).map_err(|e| PipelineError::InvalidParams(e.to_string()))?,
        };
        if !(1 < x && x < d) {
            return invalid(format!("x = {x} is outside (1, {d})"));
        }
        if !is_quadratic_nonresidue(&BigInt::from(x), d).unwrap_or(false) {
            return invalid(format!("x = {x} is a quadratic residue mod {d}"));
        }
        Ok(GeneralParams { d, xi, x })
    }

    /// `xi = p + q*tau_d`; for `d = 7` this is `p + q*eta`, `eta = (1 + sqrt(-7))/2`.
    pub fn from_pq(d: u64, p: impl Into<BigInt>, q: impl Into<BigInt>, x: Option<u64>) -> Result<Self, PipelineError> {
        let xi = QuadInt::new(d, p.into(), q.into()).map_err(|e| PipelineError::InvalidParams(e.to_string()))?;
        Self::new(d, xi, x)
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn xi(&self) -> &QuadInt {
        &self.xi
    }

    pub fn x(&self) -> u64 {
        self.x
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Params {
    Fig8(SlopeParams),
    General(GeneralParams),
}

impl Params {
    pub fn mode(&self) -> Mode {
        match self {
            Params::Fig8(_) => Mode::Fig8,
            Params::General(_) => Mode::General,
        }
    }

    pub fn d(&self) -> u64 {
        match self {
            Params::Fig8(_) => 3,
            Params::General(g) => g.d,
        }
    }

    pub fn xi(&self) -> QuadInt {
        match self {
            Params::Fig8(s) => xi_fig8(s),
            Params::General(g) => g.xi.clone(),
        }
    }

    /// Exponent `m` of the middle factor `h sigma^m h^-1`.
    pub fn middle_exponent(&self) -> u64 {
        match self {
            Params::Fig8(_) => 6,
            Params::General(g) => 2 * g.d,
        }
    }

    /// The modulus `c` in `-d r - c t = 1`.
    fn bezout_modulus(&self, norm_xi: &BigInt) -> BigInt {
        match self {
            Params::Fig8(_) => norm_xi * 4,
            Params::General(_) => norm_xi.clone(),
        }
    }
}

/// Solves `-d r - c t = 1`, choosing `t` of least absolute value with ties
/// going to the negative `t`.
pub fn bezout_rt(d: &BigInt, c: &BigInt) -> Result<(BigInt, BigInt), PipelineError> {
    if !d.is_positive() {
        return Err(PipelineError::InvalidParams(format!("d = {d} must be positive")));
    }
    // c t = -1 (mod d)
    let inv = mod_inverse(c, d).ok_or_else(|| PipelineError::InvalidParams(format!("gcd({d}, {c}) != 1")))?;
    let t0 = (-inv).mod_floor(d);
    let t1 = &t0 - d;
    let t = if t1.abs() <= t0.abs() { t1 } else { t0 };
    let num = -BigInt::one() - c * &t;
    let (r, rem) = num.div_rem(d);
    debug_assert!(rem.is_zero());
    Ok((r, t))
}

/// `h = [[sqrt(-d), s*xi*t], [conj(xi), sqrt(-d)*r]]` with `s = 4` in
/// figure-eight mode and `s = 1` otherwise.
pub fn build_h(mode: Mode, d: u64, xi: &QuadInt, r: &BigInt, t: &BigInt) -> Result<PslElement, PipelineError> {
    let s = QuadInt::sqrt_neg_d(d);
    let scale = if mode == Mode::Fig8 { BigInt::from(4) * t } else { t.clone() };
    let h = PslElement::from_entries(s.clone(), xi.scale(&scale), xi.conj(), s.scale(r))
        .map_err(|e| PipelineError::CheckFailed(format!("det(h): {e}")))?
        .named(H);
    if mode == Mode::Fig8 && !in_gamma8(&h).unwrap_or(false) {
        return Err(PipelineError::CheckFailed("h in Gamma8".into()));
    }
    Ok(h)
}

/// `[[1 - m N sqrt(-d), -d m xi], [-m N conj(xi), 1 + m N sqrt(-d)]]`, the
/// closed form of `h sigma^m h^-1` where `N = |xi|^2`.
pub fn middle_closed_form(d: u64, xi: &QuadInt, m: u64) -> Mat2<QuadInt> {
    let mn = BigInt::from(m) * xi.norm();
    let s = QuadInt::sqrt_neg_d(d).scale(&mn);
    let one = QuadInt::one(d);
    Mat2::new(
        &one - &s,
        xi.scale(&-(BigInt::from(d) * m)),
        xi.conj().scale(&-&mn),
        &one + &s,
    )
}

/// `h sigma^m h^-1`, checked against its closed form.
pub fn middle_factor(mode: Mode, h: &PslElement, sigma: &PslElement) -> Result<PslElement, PipelineError> {
    let d = sigma.d();
    let m = if mode == Mode::Fig8 { 6 } else { 2 * d };
    let xi = &sigma.rep().a12;
    let gens = generator_map(sigma, h);
    let mut w = Word::new();
    w.push(H, 1);
    w.push(SIGMA, m);
    w.push(H, -1);
    let c = eval_word(&gens, &w).map_err(|e| PipelineError::CheckFailed(e.to_string()))?;
    if c.rep() != &middle_closed_form(d, xi, m) {
        return Err(PipelineError::CheckFailed("middle factor closed form".into()));
    }
    Ok(c)
}

fn generator_map(sigma: &PslElement, h: &PslElement) -> HashMap<String, PslElement> {
    [(SIGMA.to_string(), sigma.clone()), (H.to_string(), h.clone())].into_iter().collect()
}

/// The certificate word `sigma^n h sigma^m h^-1 sigma^n`.
pub fn certificate_word(n_k: &BigInt, m: u64) -> Word {
    let mut w = Word::new();
    w.push(SIGMA, n_k.clone());
    w.push(H, 1);
    w.push(SIGMA, m);
    w.push(H, -1);
    w.push(SIGMA, n_k.clone());
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    ClosedForm,
    NormEquation,
    ResidueCondition,
    NonTrivial,
    HyperbolicTrace,
    StabilizerShape,
    NormalClosureWord,
    Gamma8Membership,
    Cocompact,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::ClosedForm,
        Check::NormEquation,
        Check::ResidueCondition,
        Check::NonTrivial,
        Check::HyperbolicTrace,
        Check::StabilizerShape,
        Check::NormalClosureWord,
        Check::Gamma8Membership,
        Check::Cocompact,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::ClosedForm => "closed_form",
            Check::NormEquation => "norm_equation",
            Check::ResidueCondition => "residue_condition",
            Check::NonTrivial => "nontrivial",
            Check::HyperbolicTrace => "hyperbolic_trace",
            Check::StabilizerShape => "stabilizer_shape",
            Check::NormalClosureWord => "normal_closure_word",
            Check::Gamma8Membership => "gamma8_membership",
            Check::Cocompact => "cocompact",
        }
    }

    pub fn applies_to(&self, mode: Mode) -> bool {
        *self != Check::Gamma8Membership || mode == Mode::Fig8
    }
}

/// Everything determined by `(params, k)` alone.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub params: Params,
    pub k: u64,
    pub xi: QuadInt,
    pub norm_xi: BigInt,
    pub r: BigInt,
    pub t: BigInt,
    pub sigma: PslElement,
    pub h: PslElement,
    pub m: u64,
    pub n_k: BigInt,
    pub d_k: BigInt,
    pub alpha_k: QuadInt,
    pub beta_k: QuadInt,
}

pub fn derive(params: &Params, k: u64) -> Result<Derivation, PipelineError> {
    if k == 0 {
        return Err(PipelineError::InvalidParams("k must be positive".into()));
    }
    let d = params.d();
    let db = BigInt::from(d);
    let kb = BigInt::from(k);
    let xi = params.xi();
    let norm_xi = xi.norm();
    let (r, t) = bezout_rt(&db, &params.bezout_modulus(&norm_xi))?;
    let h = build_h(params.mode(), d, &xi, &r, &t)?;
    let sigma = PslElement::translation(xi.clone()).named(SIGMA);
    let m = params.middle_exponent();
    let (n_k, d_k) = match params {
        Params::Fig8(_) => {
            let shift = BigInt::from(2) + &kb * 3;
            let n: BigInt = BigInt::from(9) - BigInt::from(3) * &norm_xi * &shift;
            let dk = &norm_xi * &n * &n + shift;
            (n, dk)
        }
        Params::General(g) => {
            let shift = &db * &kb + g.x;
            let n = -(&db * &norm_xi * &shift) + &db * &db;
            let dk = &n * &n * &norm_xi + shift;
            (n, dk)
        }
    };
    let mb = BigInt::from(m);
    let alpha_k = QuadInt::from_int(d, BigInt::one() - &mb * &n_k * &norm_xi * &norm_xi)
        - QuadInt::sqrt_neg_d(d).scale(&(&mb * &norm_xi));
    let beta_k = xi.scale(&-(&mb * &norm_xi));
    Ok(Derivation { params: params.clone(), k, xi, norm_xi, r, t, sigma, h, m, n_k, d_k, alpha_k, beta_k })
}

/// Values a witness asserts, checked against the word it carries.
pub struct Claims<'a> {
    pub d_k: &'a BigInt,
    pub alpha_k: &'a QuadInt,
    pub beta_k: &'a QuadInt,
    pub g_k: &'a Mat2<QuadInt>,
    pub word: &'a Word,
}

fn mat_psl_eq(a: &Mat2<QuadInt>, b: &Mat2<QuadInt>) -> bool {
    a == b || *a == b.negate()
}

/// Evaluates the nine named checks for `claims`, with `sigma`, `h`, `n_k`
/// and `m` taken from `der`.
pub fn evaluate_checks(der: &Derivation, claims: &Claims<'_>) -> Vec<(Check, bool)> {
    let mode = der.params.mode();
    let d = der.params.d();
    let g = eval_word(&generator_map(&der.sigma, &der.h), claims.word).ok();
    let (alpha, beta, dk) = (claims.alpha_k, claims.beta_k, claims.d_k);
    let same_ring = alpha.d() == d && beta.d() == d && claims.g_k.d() == d;

    let mut out = Vec::new();
    for check in Check::ALL.into_iter().filter(|c| c.applies_to(mode)) {
        let ok = match check {
            Check::ClosedForm => {
                same_ring
                    && g.as_ref().is_some_and(|g| {
                        let shape = Mat2::new(alpha.clone(), beta.scale(dk), beta.conj(), alpha.conj());
                        mat_psl_eq(g.rep(), &shape) && mat_psl_eq(g.rep(), claims.g_k)
                    })
            }
            Check::NormEquation => {
                same_ring
                    && alpha.norm() - dk * beta.norm() == BigInt::one()
                    && g.as_ref().is_some_and(|g| g.rep().det().is_one())
            }
            Check::ResidueCondition => match &der.params {
                Params::Fig8(_) => dk.mod_floor(&BigInt::from(3)) == BigInt::from(2),
                Params::General(p) => {
                    dk.mod_floor(&BigInt::from(d)) == BigInt::from(p.x)
                        && is_quadratic_nonresidue(&BigInt::from(p.x), d).unwrap_or(false)
                }
            },
            Check::NonTrivial => !beta.is_zero() && g.as_ref().is_some_and(|g| !g.is_identity()),
            Check::HyperbolicTrace => g.as_ref().is_some_and(|g| {
                let n = &der.norm_xi;
                let expected = BigInt::from(2) - BigInt::from(2 * der.m) * &der.n_k * n * n;
                classify(g) == IsometryClass::Hyperbolic && g.trace() == QuadInt::from_int(d, expected)
            }),
            Check::StabilizerShape => same_ring && g.as_ref().is_some_and(|g| stab_form(g, dk).is_some()),
            Check::NormalClosureWord => *claims.word == certificate_word(&der.n_k, der.m),
            Check::Gamma8Membership => {
                g.as_ref().is_some_and(|g| in_gamma8(g).unwrap_or(false))
                    && in_gamma8(&der.h).unwrap_or(false)
                    && in_gamma8(&der.sigma).unwrap_or(false)
            }
            Check::Cocompact => dk.is_positive() && cocompact_certificate(d, dk).is_certified(),
        };
        out.push((check, ok));
    }
    out
}

/// A certified record of one `g_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionWitness {
    pub mode: Mode,
    pub d: u64,
    /// Slope numerator and denominator (figure-eight mode only).
    pub p: Option<BigInt>,
    pub q: Option<BigInt>,
    /// The non-residue (general mode only).
    pub x: Option<u64>,
    pub xi: QuadInt,
    pub norm_xi: BigInt,
    pub r: BigInt,
    pub t: BigInt,
    pub h: Mat2<QuadInt>,
    pub k: u64,
    pub n_k: BigInt,
    pub d_k: BigInt,
    pub g_k: Mat2<QuadInt>,
    pub alpha_k: QuadInt,
    pub beta_k: QuadInt,
    pub word: Word,
    pub checks: Vec<(String, bool)>,
    pub assumptions: Vec<String>,
}

impl CompressionWitness {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    /// Rebuilds the parameters recorded in the witness.
    pub fn params(&self) -> Result<Params, PipelineError> {
        match self.mode {
            Mode::Fig8 => {
                let (Some(p), Some(q)) = (&self.p, &self.q) else {
                    return Err(PipelineError::InvalidParams("fig8 witness without p, q".into()));
                };
                if self.d != 3 {
                    return Err(PipelineError::InvalidParams(format!("fig8 witness with d = {}", self.d)));
                }
                Ok(Params::Fig8(validate_fig8(p.clone(), q.clone())?))
            }
            Mode::General => {
                if self.p.is_some() || self.q.is_some() {
                    return Err(PipelineError::InvalidParams("general witness carries p, q".into()));
                }
                Ok(Params::General(GeneralParams::new(self.d, self.xi.clone(), self.x)?))
            }
        }
    }
}

pub fn assumptions_for(mode: Mode) -> Vec<String> {
    match mode {
        Mode::Fig8 => vec![GAMMA8_ASSUMPTION.to_string(), SURJECTIVITY_ASSUMPTION.to_string()],
        Mode::General => vec![GENERAL_ASSUMPTION.to_string()],
    }
}

/// Builds and certifies `g_k`; any failed check is reported as an internal
/// error naming the check.
pub fn construct_witness(params: &Params, k: u64) -> Result<CompressionWitness, PipelineError> {
    let der = derive(params, k)?;
    middle_factor(params.mode(), &der.h, &der.sigma)?;
    let word = certificate_word(&der.n_k, der.m);
    let g = eval_word(&generator_map(&der.sigma, &der.h), &word).map_err(|e| PipelineError::CheckFailed(e.to_string()))?;
    let g_k = PslElement::new(g.rep().clone())
        .map_err(|e| PipelineError::CheckFailed(e.to_string()))?
        .normalized_rep();
    let claims = Claims { d_k: &der.d_k, alpha_k: &der.alpha_k, beta_k: &der.beta_k, g_k: &g_k, word: &word };
    let checks = evaluate_checks(&der, &claims);
    if let Some((c, _)) = checks.iter().find(|(_, ok)| !ok) {
        return Err(PipelineError::CheckFailed(c.name().to_string()));
    }
    let (p, q, x) = match params {
        Params::Fig8(s) => (Some(s.p.clone()), Some(s.q.clone()), None),
        Params::General(g) => (None, None, Some(g.x)),
    };
    Ok(CompressionWitness {
        mode: params.mode(),
        d: params.d(),
        p,
        q,
        x,
        h: der.h.normalized_rep(),
        xi: der.xi,
        norm_xi: der.norm_xi,
        r: der.r,
        t: der.t,
        k,
        n_k: der.n_k,
        d_k: der.d_k,
        g_k,
        alpha_k: der.alpha_k,
        beta_k: der.beta_k,
        word,
        checks: checks.into_iter().map(|(c, ok)| (c.name().to_string(), ok)).collect(),
        assumptions: assumptions_for(params.mode()),
    })
}

/// Witnesses for every `k` in the range, ordered by `k`, with `D_k` checked
/// to be strictly increasing.
pub fn construct_series(params: &Params, ks: RangeInclusive<u64>) -> Result<Vec<CompressionWitness>, PipelineError> {
    if ks.is_empty() {
        return Err(PipelineError::InvalidParams("empty k range".into()));
    }
    let ks: Vec<u64> = ks.collect();
    let out: Vec<CompressionWitness> =
        ks.par_iter().map(|&k| construct_witness(params, k)).collect::<Result<_, _>>()?;
    if out.windows(2).any(|w| w[0].d_k >= w[1].d_k) {
        return Err(PipelineError::CheckFailed("D_k strictly increasing".into()));
    }
    Ok(out)
}

/// Outcome of re-deriving a witness from its parameters and word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub results: Vec<(String, bool)>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|(_, ok)| *ok)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.results.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect()
    }
}

/// Re-derives everything from `(mode, params, k)` and the stored word. The
/// nine checks run against the stored `alpha_k`, `beta_k`, `D_k`, `g_k`; every
/// other stored field must equal its re-derived value.
pub fn verify(w: &CompressionWitness) -> VerifyReport {
    let mut results = Vec::new();
    let der = match w.params().and_then(|p| derive(&p, w.k)) {
        Ok(der) => der,
        Err(e) => {
            results.push((format!("params: {e}"), false));
            return VerifyReport { results };
        }
    };
    results.push(("params".to_string(), true));

    let claims = Claims { d_k: &w.d_k, alpha_k: &w.alpha_k, beta_k: &w.beta_k, g_k: &w.g_k, word: &w.word };
    let checks = evaluate_checks(&der, &claims);
    let expected_names: Vec<(String, bool)> = checks.iter().map(|(c, _)| (c.name().to_string(), true)).collect();
    results.extend(checks.iter().map(|(c, ok)| (c.name().to_string(), *ok)));

    let fields: [(&str, bool); 12] = [
        ("field:xi", w.xi == der.xi),
        ("field:norm_xi", w.norm_xi == der.norm_xi),
        ("field:r", w.r == der.r),
        ("field:t", w.t == der.t),
        ("field:h", w.h == der.h.normalized_rep()),
        ("field:n_k", w.n_k == der.n_k),
        ("field:D_k", w.d_k == der.d_k),
        ("field:alpha_k", w.alpha_k == der.alpha_k),
        ("field:beta_k", w.beta_k == der.beta_k),
        ("field:g_k", {
            let g = eval_word(&generator_map(&der.sigma, &der.h), &certificate_word(&der.n_k, der.m));
            g.is_ok_and(|g| w.g_k == g.normalized_rep())
        }),
        ("field:checks", w.checks == expected_names),
        ("field:assumptions", w.assumptions == assumptions_for(w.mode)),
    ];
    results.extend(fields.into_iter().map(|(n, ok)| (n.to_string(), ok)));
    VerifyReport { results }
}

/// `g_k` as a group element, for callers that want to keep computing with it.
pub fn witness_element(w: &CompressionWitness) -> Result<PslElement, PipelineError> {
    let der = derive(&w.params()?, w.k)?;
    eval_word(&generator_map(&der.sigma, &der.h), &w.word).map_err(|e| PipelineError::CheckFailed(e.to_string()))
}
