use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recigal::ffpoly::{factor, Fq, FqPoly, IntPoly, RatPoly, SquareClass};
use recigal::recpoly::*;
use recigal::Error;

fn rp(c: &[i64]) -> RatPoly {
    RatPoly::from_i64s(c)
}

#[test]
fn strip_examples() {
    // (1 - T)(T^2 - 3T + 1)
    let p = rp(&[1, -3, 1]).mul(&rp(&[1, -1]));
    let s = strip(&p).unwrap();
    assert_eq!(s.epsilon, -1);
    assert_eq!(s.removed, Removed::OnePlusEpsT);
    assert_eq!(s.f, rp(&[1, -3, 1]));
    assert_eq!(s.original_degree, 3);

    let p = rp(&[1, 0, -1]).mul(&rp(&[1, 1, 1]));
    let s = strip(&p).unwrap();
    assert_eq!(s.epsilon, -1);
    assert_eq!(s.removed, Removed::OneMinusTSquared);
    assert_eq!(s.f, rp(&[1, 1, 1]));

    let p = rp(&[1, 0, 3, 0, 1]);
    let s = strip(&p).unwrap();
    assert_eq!((s.epsilon, s.removed), (1, Removed::Nothing));
    assert_eq!(s.f, p);

    assert_eq!(strip(&rp(&[1, 2, 0, 1])), Err(Error::NotReciprocal));
    assert!(strip(&rp(&[1, 1])).is_err());
}

#[test]
fn strip_non_monic_gives_monic() {
    // 2 + 5T + 5T^2 + 2T^3 = (1 + T)(2 + 3T + 2T^2)
    let s = strip(&rp(&[2, 5, 5, 2])).unwrap();
    assert_eq!(s.epsilon, 1);
    assert_eq!(s.f, RatPoly::parse("1,3/2,1").unwrap());
}

#[test]
fn trace_form_examples() {
    assert_eq!(to_trace_form(&rp(&[1, 0, 1])).unwrap(), rp(&[0, 1]));
    assert_eq!(to_trace_form(&rp(&[1, -3, 1])).unwrap(), rp(&[-3, 1]));
    assert_eq!(to_trace_form(&rp(&[1, 0, 3, 0, 1])).unwrap(), rp(&[1, 0, 1]));
    assert_eq!(to_trace_form(&rp(&[1, 2, 1, 1])), Err(Error::NotReciprocal));
    assert_eq!(to_trace_form(&rp(&[1, 2, 3])), Err(Error::NotReciprocal));
}

fn random_reciprocal_q(rng: &mut ChaCha8Rng, deg: usize, eps: i64) -> RatPoly {
    loop {
        let mut c = vec![0i64; deg + 1];
        for i in 0..=deg / 2 {
            let v = rng.gen_range(-9..=9);
            c[i] = v;
            c[deg - i] = eps * v;
        }
        if deg % 2 == 0 && eps == -1 {
            c[deg / 2] = 0;
        }
        if c[0] != 0 {
            return rp(&c);
        }
    }
}

#[test]
fn strip_and_trace_round_trip_over_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for deg in 3..=24 {
        for eps in [1i64, -1] {
            for _ in 0..20 {
                let p = random_reciprocal_q(&mut rng, deg, eps);
                let s = strip(&p).unwrap();
                assert_eq!(s.epsilon, eps as i32, "{p}");
                assert_eq!(s.f.deg() % 2, 0);
                let expected = deg - match s.removed {
                    Removed::Nothing => 0,
                    Removed::OnePlusEpsT => 1,
                    Removed::OneMinusTSquared => 2,
                };
                assert_eq!(s.f.deg(), expected);
                assert_eq!(s.f.reversed(), s.f);
                let h = to_trace_form(&s.f).unwrap();
                assert_eq!(h.deg(), s.f.deg() / 2);
                assert_eq!(from_trace_form(&h), s.f);
            }
        }
    }
}

#[test]
fn strip_and_trace_round_trip_over_fq() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for q in [3u64, 5, 7, 9, 11, 13] {
        let fq = Fq::with_order(q).unwrap();
        for deg in 3..=24usize {
            for eps in [1i64, -1] {
                let mut c = vec![0u64; deg + 1];
                loop {
                    for i in 0..=deg / 2 {
                        let v = rng.gen_range(0..q);
                        c[i] = v;
                        c[deg - i] = if eps == 1 { v } else { fq.neg(v) };
                    }
                    if deg % 2 == 0 && eps == -1 {
                        c[deg / 2] = 0;
                    }
                    if c[0] != 0 {
                        break;
                    }
                }
                let p = FqPoly::new(c.clone());
                let s = strip_fq(&fq, &p).unwrap();
                assert!(s.f.is_monic());
                let h = to_trace_form_fq(&fq, &s.f).unwrap();
                assert_eq!(from_trace_form_fq(&fq, &h), s.f);
            }
        }
    }
}

#[test]
fn disc_identity_examples() {
    let d = disc_identity(&IntPoly::from_i64s(&[1, -3, 1])).unwrap();
    assert_eq!(d.lhs, BigInt::from(5));
    assert_eq!(d.rhs, BigInt::from(5));
    assert_eq!(d.rhs_alt, BigInt::from(5));
    let d = disc_identity(&IntPoly::from_i64s(&[1, 0, 1])).unwrap();
    assert_eq!((d.lhs.clone(), d.rhs.clone()), (BigInt::from(-4), BigInt::from(-4)));
    let sq = IntPoly::from_i64s(&[1, 0, 1]).pow(2);
    let d = disc_identity(&sq).unwrap();
    assert_eq!(d.lhs, BigInt::from(0));
    assert_eq!(d.rhs, BigInt::from(0));
    assert_eq!(d.rhs_alt, BigInt::from(0));
}

#[test]
fn disc_identity_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in 1..=10usize {
        for _ in 0..1000 {
            let mut c = vec![0i64; 2 * n + 1];
            c[0] = 1;
            c[2 * n] = 1;
            for i in 1..=n {
                let v = rng.gen_range(-6..=6);
                c[i] = v;
                c[2 * n - i] = v;
            }
            let d = disc_identity(&IntPoly::from_i64s(&c)).unwrap();
            assert_eq!(d.lhs, d.rhs, "{c:?}");
            assert_eq!(d.lhs, d.rhs_alt, "{c:?}");
        }
    }
}

/// Dichotomy: for irreducible h with h(±2) ≠ 0, f is
/// irreducible iff h(2)h(-2) is a nonsquare, else two factors of degree n.
#[test]
fn irreducible_h_dichotomy() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for q in [3u64, 5, 7, 9, 11, 13] {
        let fq = Fq::with_order(q).unwrap();
        for n in 1..=6usize {
            let all: Vec<FqPoly> = if q.pow(n as u32) <= 20_000 {
                monic_polys(&fq, n).collect()
            } else {
                (0..3000)
                    .map(|_| {
                        let mut c: Vec<u64> = (0..n).map(|_| rng.gen_range(0..q)).collect();
                        c.push(1);
                        FqPoly::new(c)
                    })
                    .collect()
            };
            for h in all {
                if !fq.poly_is_irreducible(&h) {
                    continue;
                }
                let v = fq.mul(fq.poly_eval(&h, fq.from_i64(2)), fq.poly_eval(&h, fq.from_i64(-2)));
                if v == 0 {
                    continue;
                }
                let f = from_trace_form_fq(&fq, &h);
                let ff = factor(&fq, &f).unwrap();
                if fq.square_class(v) == SquareClass::NonSquare {
                    assert_eq!(ff.degrees(), vec![2 * n], "q={q} h={h}");
                } else {
                    assert_eq!(ff.degrees(), vec![n, n], "q={q} h={h}");
                }
                let prof = profile(&fq, &h).unwrap();
                assert_eq!(prof.e_signs.len(), 1);
                assert_eq!(prof.f_degrees, ff.degrees());
            }
        }
    }
}

/// Independent oracle: membership computed from the full factorization.
fn classify_oracle(fq: &Fq, h: &FqPoly) -> BTreeSet<u8> {
    let n = h.deg();
    let two = fq.from_i64(2);
    if fq.poly_eval(h, two) == 0 || fq.poly_eval(h, fq.neg(two)) == 0 {
        return BTreeSet::new();
    }
    let hf = factor(fq, h).unwrap();
    if hf.factors.iter().any(|(_, m)| *m > 1) {
        return BTreeSet::new();
    }
    let f = from_trace_form_fq(fq, h);
    let ff = factor(fq, &f).unwrap();
    let hd: Vec<usize> = hf.degrees();
    let fd: Vec<usize> = ff.degrees();
    let mut s = BTreeSet::new();
    let is_prime = |d: usize| d >= 2 && (2..d).all(|k| d % k != 0);
    let evens = |v: &[usize]| v.iter().copied().filter(|d| d % 2 == 0).collect::<Vec<usize>>();
    if n == 1 {
        for i in 1..=5 {
            s.insert(i);
        }
    } else {
        if hd.len() == 1 {
            s.insert(1);
        }
        if hd.iter().any(|&d| is_prime(d) && 2 * d > n) {
            s.insert(2);
        }
        if evens(&hd) == vec![2] {
            s.insert(3);
        }
        let fe = evens(&fd);
        if evens(&hd).is_empty() && (fe == vec![2] || fe == vec![2, 2]) {
            s.insert(4);
        }
        if (evens(&hd).len() + fe.len()) % 2 == 1 {
            s.insert(5);
        }
    }
    if evens(&fd) == vec![2] {
        s.insert(6);
    }
    s
}

#[test]
fn classify_h_examples() {
    let f3 = Fq::prime(3).unwrap();
    let s = classify_h(&f3, &FqPoly::new(vec![1, 0, 1]));
    assert!(s.contains(&1) && s.contains(&2));
    assert!(classify_h(&f3, &FqPoly::new(vec![0, 0, 1])).is_empty());

    let f5 = Fq::prime(5).unwrap();
    // h = x - 1: f = T^2 - T + 1, disc -3 = 2 is a nonsquare mod 5
    let h = f5.poly_from_i64(&[-1, 1]);
    let f = from_trace_form_fq(&f5, &h);
    assert_eq!(f, f5.poly_from_i64(&[1, -1, 1]));
    assert!(f5.poly_is_irreducible(&f));
    assert_eq!(classify_h(&f5, &h), (1..=6).collect());
    // h = x: f = T^2 + 1 = (T - 2)(T - 3) over F_5
    assert_eq!(classify_h(&f5, &FqPoly::x()), (1..=5).collect());
    // h = x - 2 has h(2) = 0
    assert!(classify_h(&f5, &f5.poly_from_i64(&[-2, 1])).is_empty());
}

#[test]
fn classify_h_matches_oracle() {
    for q in [3u64, 5, 7, 9] {
        let fq = Fq::with_order(q).unwrap();
        for n in 1..=5usize {
            if q.pow(n as u32) > 20_000 {
                continue;
            }
            for h in monic_polys(&fq, n) {
                assert_eq!(classify_h(&fq, &h), classify_oracle(&fq, &h), "q={q} h={h}");
            }
        }
    }
}

#[test]
fn in_f_class_examples() {
    let f3 = Fq::prime(3).unwrap();
    let f = FqPoly::new(vec![1, 0, 0, 0, 1]);
    let ns = SquareClass::NonSquare;
    assert!(in_f_class(&f3, &f, 1, ns, ns));
    assert!(!in_f_class(&f3, &f, 1, SquareClass::Square, ns));
    // f(1) = 0
    let f5 = Fq::prime(5).unwrap();
    let g = f5.poly_from_i64(&[1, -2, 1]);
    for i in 1..=6 {
        for a in [SquareClass::Square, ns] {
            for b in [SquareClass::Square, ns] {
                assert!(!in_f_class(&f5, &g, i, a, b));
            }
        }
    }
    // h = product of distinct (x - c): four split c and one nonsplit c gives
    // f with nine irreducible factors, one of them quadratic
    let f13 = Fq::prime(13).unwrap();
    let mut split = vec![];
    let mut nonsplit = vec![];
    for c in 0..13u64 {
        let d = f13.sub(f13.mul(c, c), 4);
        match f13.square_class(d) {
            SquareClass::Square => split.push(c),
            SquareClass::NonSquare => nonsplit.push(c),
            SquareClass::Zero => {}
        }
    }
    let mut h = FqPoly::one();
    for &c in split.iter().take(4).chain(nonsplit.iter().take(1)) {
        h = f13.poly_mul(&h, &FqPoly::new(vec![f13.neg(c), 1]));
    }
    let f9 = from_trace_form_fq(&f13, &h);
    assert_eq!(factor(&f13, &f9).unwrap().count(), 9);
    let cls = classify_h(&f13, &h);
    assert!(cls.contains(&5) && cls.contains(&6));
    for i in 1..=6 {
        for a in [SquareClass::Square, ns] {
            for b in [SquareClass::Square, ns] {
                assert!(!in_f_class(&f13, &f9, i, a, b));
            }
        }
    }
    // dropping one split factor brings the count to seven and membership back
    let mut h7 = FqPoly::one();
    for &c in split.iter().take(3).chain(nonsplit.iter().take(1)) {
        h7 = f13.poly_mul(&h7, &FqPoly::new(vec![f13.neg(c), 1]));
    }
    let f7 = from_trace_form_fq(&f13, &h7);
    let a = f13.square_class(f13.poly_eval(&f7, 1));
    let b = f13.square_class(f13.poly_eval(&f7, 12));
    assert!(in_f_class(&f13, &f7, 6, a, b));
}

#[test]
fn count_irreducible_examples() {
    let f5 = Fq::prime(5).unwrap();
    let t = count_irreducible_classes(&f5, 1, IRRED_BUDGET).unwrap();
    let (s, n) = (SquareClass::Square, SquareClass::NonSquare);
    assert_eq!(t.bucket(s, s), 0);
    assert_eq!(t.bucket(s, n), 1);
    assert_eq!(t.bucket(n, s), 1);
    assert_eq!(t.bucket(n, n), 1);
    let f3 = Fq::prime(3).unwrap();
    assert_eq!(count_irreducible_classes(&f3, 1, IRRED_BUDGET).unwrap().total, 1);
    assert!(matches!(
        count_irreducible_classes(&f3, 13, IRRED_BUDGET),
        Err(Error::Budget { .. })
    ));
}

#[test]
fn count_irreducible_norm_cross_check() {
    for (q, mmax) in [(3u64, 8usize), (5, 5), (7, 4), (9, 4), (11, 3), (13, 3)] {
        let fq = Fq::with_order(q).unwrap();
        for m in 1..=mmax {
            let a = count_irreducible_classes(&fq, m, IRRED_BUDGET).unwrap();
            let b = count_irreducible_classes_norm(&fq, m, IRRED_BUDGET).unwrap();
            assert_eq!(a, b, "q={q} m={m}");
        }
    }
}
