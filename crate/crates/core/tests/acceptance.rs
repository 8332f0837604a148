//! Acceptance gate. Runs the nine criteria in order and prints one
//! PASS/FAIL line per criterion; exits non-zero if any fails. All
//! comparisons are exact.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use bianchi_core::appendix::{check_golden, parse_golden, GOLDEN};
use bianchi_core::circles::{
    circle_action, discriminant, is_quadratic_nonresidue, primitive_triple, residue_classes, stab_form,
};
use bianchi_core::congruence::{finite_model_report, in_gamma8, phi_n, SURJECTIVITY_ASSUMPTION};
use bianchi_core::pipeline::{
    construct_series, construct_witness, validate_fig8, verify, GeneralParams, Params,
};
use bianchi_core::quat::{in_order, order_unit_to_stab, QuatAlgebra};
use bianchi_core::witness::{from_machine, to_machine};
use bianchi_core::{CompressionWitness, Mat2, PslElement, QuadInt};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

fn sq3(u: i64, v: i64) -> QuadInt {
    QuadInt::from_sqrt_coords(3, u, v).unwrap()
}

fn random_fig8(rng: &mut ChaCha8Rng) -> (i64, i64) {
    loop {
        let p = 4 * rng.gen_range(-250i64..=250);
        let q = rng.gen_range(-400i64..=400);
        if p % 3 != 0 && p.gcd(&q) == 1 {
            return (p, q);
        }
    }
}

fn random_general(rng: &mut ChaCha8Rng, d: u64) -> GeneralParams {
    let (_, nonres) = residue_classes(d).unwrap();
    loop {
        let xi = QuadInt::new(d, rng.gen_range(-60i64..=60), rng.gen_range(-60i64..=60)).unwrap();
        if xi.is_zero() || (xi.norm() % d).is_zero() {
            continue;
        }
        let x = *nonres.choose(rng).unwrap();
        return GeneralParams::new(d, xi, Some(x)).unwrap();
    }
}

/// `g_k` evaluated from its word, with `h` rebuilt from the stored `r, t`.
fn word_element(w: &CompressionWitness) -> PslElement {
    let d = w.d;
    let s = QuadInt::sqrt_neg_d(d);
    let (a12, m) = match w.p {
        Some(_) => (w.xi.scale(&(int(4) * &w.t)), 6),
        None => (w.xi.scale(&w.t), 2 * d as i64),
    };
    let h = PslElement::from_entries(s.clone(), a12, w.xi.conj(), s.scale(&w.r)).unwrap();
    let sigma = PslElement::translation(w.xi.clone());
    let outer = sigma.pow(&w.n_k);
    outer.mul(&h).mul(&sigma.pow_i64(m)).mul(&h.inv()).mul(&outer)
}

/// `(n_k, D_k, alpha_k, beta_k)` straight from the closed forms.
fn closed_forms(d: u64, xi: &QuadInt, x: Option<u64>, k: u64) -> (BigInt, BigInt, QuadInt, QuadInt) {
    let n = xi.norm();
    let (m, nk, dk) = match x {
        None => {
            let shift = int(2 + 3 * k as i64);
            let nk: BigInt = int(9) - int(3) * &n * &shift;
            let dk = &n * &nk * &nk + shift;
            (int(6), nk, dk)
        }
        Some(x) => {
            let db = BigInt::from(d);
            let shift = &db * k + x;
            let nk: BigInt = &db * &db - &db * &n * &shift;
            let dk = &nk * &nk * &n + shift;
            (int(2 * d as i64), nk, dk)
        }
    };
    let alpha = QuadInt::from_int(d, BigInt::one() - &m * &nk * &n * &n) - QuadInt::sqrt_neg_d(d).scale(&(&m * &n));
    let beta = xi.scale(&-(&m * &n));
    (nk, dk, alpha, beta)
}

fn shape(alpha: &QuadInt, beta: &QuadInt, dk: &BigInt) -> PslElement {
    PslElement::from_entries(alpha.clone(), beta.scale(dk), beta.conj(), alpha.conj()).unwrap()
}

fn witness_pool() -> Vec<CompressionWitness> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa11ce);
    let mut out = Vec::new();
    for _ in 0..120 {
        let (p, q) = random_fig8(&mut rng);
        let k = rng.gen_range(1u64..=20);
        out.push(construct_witness(&Params::Fig8(validate_fig8(p, q).unwrap()), k).unwrap());
    }
    for d in [3u64, 7, 11, 19] {
        for _ in 0..30 {
            let k = rng.gen_range(1u64..=20);
            out.push(construct_witness(&Params::General(random_general(&mut rng, d)), k).unwrap());
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let report = check_golden(GOLDEN).map_err(|e| e.to_string())?;
    if let Some(m) = report.mismatch {
        return Err(m.to_string());
    }
    let table = parse_golden(GOLDEN).map_err(|e| e.to_string())?;
    ensure(table.rows.len() == 10, || "expected 10 rows".into())?;
    let ws = construct_series(&Params::Fig8(validate_fig8(20, 7).unwrap()), 1..=10).map_err(|e| e.to_string())?;
    let h = Mat2::new(sq3(0, 1), sq3(-80, -56), sq3(20, -14), sq3(0, 1317));
    ensure(ws[0].h == h, || format!("h = {}", ws[0].h))?;
    ensure(ws[0].d_k == int(216733332353), || format!("D_1 = {}", ws[0].d_k))?;
    let g1 = &ws[0].g_k;
    ensure(g1.a11 == sq3(86746012705, -5928) && g1.a22 == sq3(86746012705, 5928), || format!("g_1 = {g1}"))?;
    ensure(g1.a21 == sq3(-118560, 82992), || format!("g_1[2,1] = {}", g1.a21))?;
    for (row, w) in table.rows.iter().zip(&ws) {
        ensure(row.d_k == w.d_k && row.g_k == w.g_k, || format!("row {}", row.k))?;
    }
    Ok("h and k = 1..10 match the golden table".into())
}

fn criterion_2(pool: &[CompressionWitness]) -> Outcome {
    let mut general = [0usize; 4];
    for w in pool {
        let (nk, dk, alpha, beta) = closed_forms(w.d, &w.xi, w.x, w.k);
        ensure(nk == w.n_k && dk == w.d_k, || format!("n_k/D_k for d={} xi={} k={}", w.d, w.xi, w.k))?;
        let g = word_element(w);
        ensure(g == shape(&alpha, &beta, &dk), || format!("closed form for d={} xi={} k={}", w.d, w.xi, w.k))?;
        ensure(g.rep() == &w.g_k || g.rep().negate() == w.g_k, || "stored g_k".into())?;
        if w.x.is_some() {
            general[[3, 7, 11, 19].iter().position(|&d| d == w.d).unwrap()] += 1;
        }
    }
    let fig8 = pool.iter().filter(|w| w.p.is_some()).count();
    ensure(fig8 >= 100 && general.iter().all(|&c| c >= 20), || "sample too small".into())?;
    Ok(format!("{fig8} fig8 and {general:?} general (d = 3, 7, 11, 19) witnesses"))
}

fn criterion_3(pool: &[CompressionWitness]) -> Outcome {
    for w in pool {
        ensure(w.alpha_k.norm() - &w.d_k * w.beta_k.norm() == BigInt::one(), || {
            format!("norm equation fails for d={} xi={} k={}", w.d, w.xi, w.k)
        })?;
        ensure(stab_form(&word_element(w), &w.d_k).is_some(), || "stabilizer shape".into())?;
    }
    Ok(format!("{} witnesses", pool.len()))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut series = 0;
    let mut check = |params: Params| -> Result<(), String> {
        let ws = construct_series(&params, 1..=20).map_err(|e| e.to_string())?;
        for pair in ws.windows(2) {
            ensure(pair[0].d_k < pair[1].d_k, || "D_k not strictly increasing".into())?;
        }
        for w in &ws {
            match w.x {
                None => ensure(w.d_k.mod_floor(&int(3)) == int(2), || format!("D_k = {} mod 3", w.d_k))?,
                Some(x) => {
                    ensure(w.d_k.mod_floor(&BigInt::from(w.d)) == BigInt::from(x), || "D_k mod d".into())?;
                    ensure(is_quadratic_nonresidue(&BigInt::from(x), w.d).unwrap(), || "x is a residue".into())?;
                }
            }
        }
        series += 1;
        Ok(())
    };
    for _ in 0..20 {
        let (p, q) = random_fig8(&mut rng);
        check(Params::Fig8(validate_fig8(p, q).unwrap()))?;
    }
    for d in [3u64, 5, 7, 11, 13, 19, 23] {
        for _ in 0..3 {
            check(Params::General(random_general(&mut rng, d)))?;
        }
    }
    Ok(format!("{series} series of k = 1..20"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // ((1, 2; 0, 1)(1, 0; omega, 1))^2
    let a = PslElement::translation(QuadInt::from_int(3, 2));
    let b = PslElement::from_entries(QuadInt::one(3), QuadInt::zero(3), QuadInt::omega(), QuadInt::one(3)).unwrap();
    let g = a.mul(&b).pow_i64(2);
    ensure(g.rep() == &Mat2::new(sq3(-4, 1), sq3(2, 2), QuadInt::from_int(3, -2), sq3(0, 1)), || format!("g = {g}"))?;
    let target = phi_n(&g, 4).map_err(|e| e.to_string())?;
    let mut n = 0;
    for _ in 0..40 {
        let (p, q) = random_fig8(&mut rng);
        let w = construct_witness(&Params::Fig8(validate_fig8(p, q).unwrap()), 1).map_err(|e| e.to_string())?;
        let h = PslElement::new(w.h.clone()).unwrap();
        ensure(phi_n(&h, 4).unwrap() == target, || format!("phi_4(h) != phi_4(g) for ({p}, {q})"))?;
        ensure(in_gamma8(&h).unwrap(), || format!("h not in Gamma8 for ({p}, {q})"))?;
        n += 1;
    }
    Ok(format!("{n} slopes"))
}

fn criterion_6() -> Outcome {
    let r = finite_model_report().map_err(|e| e.to_string())?;
    ensure(r.psl2_r4_order == 1920, || format!("|PSL2(R4)| = {}", r.psl2_r4_order))?;
    ensure(r.level2_kernel_order == 32, || format!("level-2 kernel = {}", r.level2_kernel_order))?;
    ensure(r.level2_kernel_exponent_two && r.level2_kernel_abelian, || "kernel not elementary abelian".into())?;
    ensure(r.level2_kernel_rank == Some(5), || format!("rank {:?}", r.level2_kernel_rank))?;
    ensure(r.h8_index == Some(12), || format!("H8 index {:?}", r.h8_index))?;
    ensure(r.h8_prime_order == 2 * r.h8_order, || format!("|H8'| = {}, |H8| = {}", r.h8_prime_order, r.h8_order))?;
    ensure(r.h8_index_in_h8_prime == Some(2), || "H8 not index 2 in H8'".into())?;
    ensure(r.assumption == SURJECTIVITY_ASSUMPTION, || "report lacks the assumption note".into())?;
    let w = construct_witness(&Params::Fig8(validate_fig8(20, 7).unwrap()), 1).unwrap();
    ensure(w.assumptions.iter().any(|a| a == SURJECTIVITY_ASSUMPTION), || "witness lacks the assumption note".into())?;
    Ok(format!("|PSL2(R4)| = 1920, kernel 32 = 2^5, |H8| = {}, |H8'| = {}", r.h8_order, r.h8_prime_order))
}

fn random_psl(rng: &mut ChaCha8Rng, d: u64) -> PslElement {
    let s = PslElement::from_entries(QuadInt::zero(d), QuadInt::from_int(d, -1), QuadInt::one(d), QuadInt::zero(d))
        .unwrap();
    let mut t = PslElement::identity(d);
    for _ in 0..rng.gen_range(1..=6) {
        let b = QuadInt::new(d, rng.gen_range(-4i64..=4), rng.gen_range(-4i64..=4)).unwrap();
        t = t.mul(&PslElement::translation(b));
        if rng.gen_bool(0.7) {
            t = t.mul(&s);
        }
    }
    t
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut n = 0;
    for d in [1u64, 2, 3, 7] {
        let mut done = 0;
        while done < 300 {
            let b = QuadInt::new(d, rng.gen_range(-30i64..=30), rng.gen_range(-30i64..=30)).unwrap();
            let Ok(c) = primitive_triple(int(rng.gen_range(-30..=30)), b, int(rng.gen_range(-30..=30))) else {
                continue;
            };
            let t = random_psl(&mut rng, d);
            let moved = circle_action(&t, &c).map_err(|e| e.to_string())?;
            ensure(discriminant(&moved) == discriminant(&c), || format!("d={d}: {c} -> {moved} under {t}"))?;
            done += 1;
        }
        n += done;
    }
    Ok(format!("{n} pairs over d = 1, 2, 3, 7"))
}

fn rat(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(int(rng.gen_range(-40..=40)), int(rng.gen_range(1..=6)))
}

/// Order element from integer coefficients on the order basis.
fn order_element(alg: &QuatAlgebra, d: u64, c: [i64; 4]) -> bianchi_core::Quaternion {
    let h = |n: i64| BigRational::new(int(n), int(2));
    if d % 4 == 3 {
        alg.element([h(2 * c[0] + c[1]), h(c[1]), h(2 * c[2] + c[3]), h(c[3])])
    } else {
        alg.from_ints(c)
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..1000 {
        let d = *[1u64, 2, 3, 5, 7, 11].choose(&mut rng).unwrap();
        let alg = QuatAlgebra::bianchi(d, rng.gen_range(1i64..=25)).unwrap();
        let x = alg.element([rat(&mut rng), rat(&mut rng), rat(&mut rng), rat(&mut rng)]);
        let y = alg.element([rat(&mut rng), rat(&mut rng), rat(&mut rng), rat(&mut rng)]);
        let (rx, ry) = (x.rho().unwrap(), y.rho().unwrap());
        ensure(rx.trace().as_rational() == Some(x.reduced_trace()), || format!("trace of {x}"))?;
        ensure(rx.det().as_rational() == Some(x.reduced_norm()), || format!("norm of {x}"))?;
        ensure(x.mul(&y).unwrap().rho().unwrap() == rx.mul(&ry), || format!("rho({x} * {y})"))?;
    }
    let mut units = 0;
    for d in [1u64, 2, 3, 7] {
        for disc in [2i64, 3, 5, 6, 7] {
            let alg = QuatAlgebra::bianchi(d, disc).unwrap();
            let discb = int(disc);
            let r = -3i64..=3;
            for c0 in r.clone() {
                for c1 in r.clone() {
                    for c2 in r.clone() {
                        for c3 in r.clone() {
                            let x = order_element(&alg, d, [c0, c1, c2, c3]);
                            if !in_order(&x, d) || !x.reduced_norm().is_one() {
                                continue;
                            }
                            let g = order_unit_to_stab(&x, d, &discb)
                                .map_err(|e| format!("d={d} D={disc} x={x}: {e}"))?;
                            ensure(stab_form(&g, &discb).is_some(), || format!("{g} not in Stab"))?;
                            units += 1;
                        }
                    }
                }
            }
        }
    }
    ensure(units > 40, || format!("only {units} order units found"))?;
    Ok(format!("1000 random quaternions; {units} norm-one order elements map into Stab(C_D)"))
}

fn tamper_string(s: &str, pick: usize) -> String {
    let digits: Vec<usize> = s.char_indices().filter(|(_, c)| c.is_ascii_digit()).map(|(i, _)| i).collect();
    if digits.is_empty() {
        return format!("{s}x");
    }
    let i = digits[pick % digits.len()];
    let c = s.as_bytes()[i] - b'0';
    let mut out = s.to_string();
    out.replace_range(i..=i, &((c + 1) % 10).to_string());
    out
}

/// Every leaf of the first witness record, as a JSON pointer.
fn leaves(v: &serde_json::Value, path: String, out: &mut Vec<String>) {
    match v {
        serde_json::Value::Object(m) => m.iter().for_each(|(k, v)| leaves(v, format!("{path}/{k}"), out)),
        serde_json::Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| leaves(v, format!("{path}/{i}"), out)),
        _ => out.push(path),
    }
}

fn detected(doc: &serde_json::Value) -> bool {
    match from_machine(&doc.to_string()) {
        Err(_) => true,
        Ok(ws) => ws.iter().any(|w| !verify(w).all_pass()),
    }
}

fn criterion_9(pool: &[CompressionWitness]) -> Outcome {
    let text = to_machine(pool);
    let back = from_machine(&text).map_err(|e| e.to_string())?;
    ensure(back == pool, || "round trip changed the witnesses".into())?;
    for w in &back {
        let r = verify(w);
        ensure(r.all_pass(), || format!("verify failed on d={} k={}: {:?}", w.d, w.k, r.failures()))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut tampers = 0;
    let samples = [&pool[0], &pool[pool.len() - 1]];
    let mut cases = Vec::new();
    for w in samples {
        let doc: serde_json::Value = serde_json::from_str(&to_machine(std::slice::from_ref(w))).unwrap();
        let mut paths = Vec::new();
        leaves(&doc["witnesses"][0], "/witnesses/0".into(), &mut paths);
        for p in paths {
            for pick in 0..3 {
                cases.push((doc.clone(), p.clone(), pick));
            }
        }
    }
    for _ in 0..200 {
        let w = pool.choose(&mut rng).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&to_machine(std::slice::from_ref(w))).unwrap();
        let mut paths = Vec::new();
        leaves(&doc["witnesses"][0], "/witnesses/0".into(), &mut paths);
        let p = paths.choose(&mut rng).unwrap().clone();
        cases.push((doc, p, rng.gen_range(0..64)));
    }
    for (mut doc, path, pick) in cases {
        let leaf = doc.pointer_mut(&path).unwrap();
        *leaf = match leaf {
            serde_json::Value::Bool(b) => serde_json::Value::Bool(!*b),
            serde_json::Value::String(s) => serde_json::Value::String(tamper_string(s, pick)),
            other => return Err(format!("unexpected leaf {other} at {path}")),
        };
        ensure(detected(&doc), || format!("tamper at {path} (pick {pick}) not detected"))?;
        tampers += 1;
    }
    Ok(format!("{} witnesses round-trip; {tampers} single-field tampers all detected", pool.len()))
}

fn main() -> ExitCode {
    let pool = witness_pool();
    let criteria: Vec<Criterion<'_>> = vec![
        ("appendix reproduction", Box::new(criterion_1)),
        ("closed-form identity", Box::new(|| criterion_2(&pool))),
        ("stabilizer norm equation", Box::new(|| criterion_3(&pool))),
        ("residue conditions", Box::new(criterion_4)),
        ("congruence claim", Box::new(criterion_5)),
        ("finite-model congruence suite", Box::new(criterion_6)),
        ("discriminant invariance", Box::new(criterion_7)),
        ("quaternion correspondence", Box::new(criterion_8)),
        ("verifier integrity", Box::new(|| criterion_9(&pool))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
