//! Galois groups of reciprocal polynomials over `Q` from mod-`ℓ`
//! factorization patterns, the quadratic field `K`, and a Chebotarev check.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ffpoly::{
    discriminant, is_perfect_square, odd_primes, squarefree_factor_degrees, squarefree_part, Fq,
    FqPoly, IntPoly, RatPoly,
};
use crate::recpoly::{
    classify_h, from_trace_form_fq, in_p_n, strip, to_trace_form_int, ClassIndex, Removed,
};
use crate::signedperm::{class_statistics, JointType};

/// Default prime budget for [`classify`]: all odd primes up to this bound.
pub const DEFAULT_PRIME_BUDGET: u64 = 10_000;

/// Trial-division bound used for the displayed squarefree radicand.
pub const FACTOR_LIMIT: u64 = 1_000_000;

const BLOCK: usize = 64;

/// `W_m` (`plus = false`) or its index-two subgroup `W_m^+`, `m` even.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupName {
    pub rank: usize,
    pub plus: bool,
}

impl GroupName {
    pub fn w(rank: usize) -> GroupName {
        GroupName { rank, plus: false }
    }

    pub fn w_plus(rank: usize) -> GroupName {
        GroupName { rank, plus: true }
    }

    /// Number of pairs `n = rank / 2`.
    pub fn pairs(&self) -> usize {
        self.rank / 2
    }

    pub fn order(&self) -> BigInt {
        let n = self.pairs();
        let mut o = BigInt::one() << n;
        for k in 2..=n {
            o *= k;
        }
        if self.plus && n >= 1 {
            o /= 2;
        }
        o
    }
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}{}", self.rank, if self.plus { "+" } else { "" })
    }
}

impl Serialize for GroupName {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `K = Q(√m)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KField {
    #[serde(serialize_with = "crate::ser::bigint")]
    pub radicand: BigInt,
    pub is_rational: bool,
    /// Squarefree part of the radicand (sign kept).
    #[serde(serialize_with = "crate::ser::bigint")]
    pub squarefree: BigInt,
    /// `true` when trial division did not finish the factorization.
    pub partially_factored: bool,
    /// Whether `disc f` lies in the square class of `m`; `None` when `f` is
    /// not separable.
    pub disc_class_agrees: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "reason", rename_all = "lowercase")]
pub enum Status {
    Certified,
    Inconclusive(String),
    Rejected(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GaloisCertificate {
    #[serde(serialize_with = "ser_rat")]
    pub input: RatPoly,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub epsilon: i32,
    pub removed: Removed,
    /// Stripped monic `f` of degree `2n`.
    #[serde(serialize_with = "ser_rat")]
    pub f: RatPoly,
    pub n: usize,
    /// Primitive integer multiple of `f`; reductions use `F / lc(F) mod ℓ`.
    #[serde(serialize_with = "ser_int")]
    pub normalized: IntPoly,
    /// Ambient group from the degree table.
    pub ambient: GroupName,
    #[serde(rename = "group")]
    pub claimed_group: Option<GroupName>,
    pub witnesses: BTreeMap<ClassIndex, u64>,
    #[serde(rename = "disc_square")]
    pub disc_is_square: bool,
    #[serde(rename = "K")]
    pub k: Option<KField>,
    pub status: Status,
    pub primes_scanned: usize,
    pub largest_prime: u64,
    pub prime_budget: u64,
}

fn ser_rat<S: Serializer>(p: &RatPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    p.to_json().serialize(s)
}

fn ser_int<S: Serializer>(p: &IntPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    p.to_rat().to_json().serialize(s)
}

impl GaloisCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }
}

/// The mod-`ℓ` reduction data of a monic reciprocal `f` over `Q`.
#[derive(Clone, Debug)]
struct Reducer {
    big_f: IntPoly,
    big_h: IntPoly,
    lc: BigInt,
}

impl Reducer {
    fn new(f: &RatPoly) -> Result<Reducer> {
        let (fi, _) = f.clear_denominators();
        let big_f = fi.primitive();
        let big_h = to_trace_form_int(&big_f)?;
        let lc = big_f.lc();
        Ok(Reducer { big_f, big_h, lc })
    }

    fn good(&self, l: u64) -> bool {
        !(&self.lc % BigInt::from(l)).is_zero()
    }

    /// Monic `h mod ℓ` when `ℓ ∤ lc`.
    fn h_mod(&self, fq: &Fq) -> FqPoly {
        fq.poly_monic(&self.big_h.reduce(fq)).1
    }
}

/// Ambient group per the degree table; `k_rational` matters only for `N`
/// even with `ε = 1`.
pub fn group_constraint(big_n: usize, epsilon: i32, k_rational: bool) -> Result<GroupName> {
    if big_n <= 2 {
        return Err(Error::invalid("N must exceed 2"));
    }
    if epsilon != 1 && epsilon != -1 {
        return Err(Error::invalid("epsilon must be ±1"));
    }
    Ok(if big_n % 2 == 1 {
        GroupName::w(big_n - 1)
    } else if epsilon == -1 {
        GroupName::w(big_n - 2)
    } else if k_rational {
        GroupName::w_plus(big_n)
    } else {
        GroupName::w(big_n)
    })
}

/// Integer in the square class of a nonzero rational `a/b` (namely `ab`).
fn class_integer(r: &BigRational) -> BigInt {
    r.numer() * r.denom()
}

/// `K = Q(√((-1)^{N/2} P(1) P(-1)))` for `N = deg P` even.
pub fn compute_k(p: &RatPoly) -> Result<KField> {
    let big_n = p.deg();
    if p.is_zero() || big_n % 2 == 1 {
        return Err(Error::invalid("compute_K needs N even"));
    }
    let p1 = p.eval_i64(1);
    let pm1 = p.eval_i64(-1);
    if p1.is_zero() || pm1.is_zero() {
        return Err(Error::BoundaryRoot);
    }
    let mut m = class_integer(&(p1 * pm1));
    if (big_n / 2) % 2 == 1 {
        m = -m;
    }
    let (squarefree, partially_factored) = squarefree_part(&m, FACTOR_LIMIT);
    let (pi, _) = p.clear_denominators();
    let disc = discriminant(&pi.primitive())?;
    let disc_class_agrees = if disc.is_zero() {
        None
    } else {
        Some(is_perfect_square(&(&disc * &m)))
    };
    Ok(KField {
        is_rational: is_perfect_square(&m),
        radicand: m,
        squarefree,
        partially_factored,
        disc_class_agrees,
    })
}

/// Classes of `f mod ℓ`, or `None` for a bad prime.
fn classes_at(red: &Reducer, l: u64) -> Option<BTreeSet<ClassIndex>> {
    if !red.good(l) {
        return None;
    }
    let fq = Fq::prime(l).ok()?;
    let h = red.h_mod(&fq);
    if !in_p_n(&fq, &h) {
        return None;
    }
    Some(classify_h(&fq, &h))
}

/// Scan primes in increasing order until `want` are all witnessed.
fn scan_witnesses(
    red: &Reducer,
    budget: u64,
    want: &[ClassIndex],
) -> (BTreeMap<ClassIndex, u64>, usize, u64) {
    let primes = odd_primes(3, budget);
    let mut found = BTreeMap::new();
    let mut scanned = 0usize;
    let mut last = 0u64;
    for block in primes.chunks(BLOCK) {
        let results: Vec<Option<BTreeSet<ClassIndex>>> =
            block.par_iter().map(|&l| classes_at(red, l)).collect();
        for (&l, cls) in block.iter().zip(results) {
            scanned += 1;
            last = l;
            if let Some(cls) = cls {
                for i in cls {
                    found.entry(i).or_insert(l);
                }
            }
            if want.iter().all(|i| found.contains_key(i)) {
                return (found, scanned, last);
            }
        }
    }
    (found, scanned, last)
}

/// Classify the Galois group of a reciprocal `P` over `Q`.
pub fn classify(p: &RatPoly, prime_budget: u64) -> Result<GaloisCertificate> {
    let st = strip(p)?;
    let big_n = st.original_degree;
    let f = st.f.clone();
    let n = f.deg() / 2;
    let ambient_k = if big_n % 2 == 0 && st.epsilon == 1 {
        Some(compute_k(p).ok())
    } else {
        None
    };
    let ambient = group_constraint(
        big_n,
        st.epsilon,
        matches!(&ambient_k, Some(Some(k)) if k.is_rational),
    )?;
    let red = Reducer::new(&f)?;
    let mut cert = GaloisCertificate {
        input: p.clone(),
        big_n,
        epsilon: st.epsilon,
        removed: st.removed,
        f: f.clone(),
        n,
        normalized: red.big_f.clone(),
        ambient,
        claimed_group: None,
        witnesses: BTreeMap::new(),
        disc_is_square: false,
        k: ambient_k.flatten(),
        status: Status::Inconclusive(String::new()),
        primes_scanned: 0,
        largest_prime: 0,
        prime_budget,
    };
    if f.eval_i64(1).is_zero() || f.eval_i64(-1).is_zero() {
        cert.status = Status::Rejected("boundary root: f(1) f(-1) = 0".into());
        return Ok(cert);
    }
    let disc = discriminant(&red.big_f)?;
    if disc.is_zero() {
        return Err(Error::NotSeparable);
    }
    cert.disc_is_square = is_perfect_square(&disc);

    let need_six = big_n % 2 == 1 || st.epsilon == -1;
    // class 6 is sought whenever it can occur, but required only when ε = -1 or N is odd
    let want: Vec<ClassIndex> = if need_six && !cert.disc_is_square {
        (1..=6).collect()
    } else {
        (1..=5).collect()
    };
    let seek: Vec<ClassIndex> = if cert.disc_is_square {
        (1..=5).collect()
    } else {
        (1..=6).collect()
    };
    let (found, scanned, last) = scan_witnesses(&red, prime_budget, &seek);
    cert.witnesses = found;
    cert.primes_scanned = scanned;
    cert.largest_prime = last;

    let missing: Vec<String> = want
        .iter()
        .filter(|i| !cert.witnesses.contains_key(i))
        .map(|i| i.to_string())
        .collect();
    if !missing.is_empty() {
        cert.status = Status::Inconclusive(format!(
            "budget {prime_budget}: no witness for class {}",
            missing.join(",")
        ));
        return Ok(cert);
    }
    if cert.disc_is_square && cert.witnesses.contains_key(&6) {
        return Err(Error::Inconsistent(
            "square discriminant with a class-6 witness".into(),
        ));
    }
    cert.claimed_group = Some(if cert.disc_is_square {
        GroupName::w_plus(2 * n)
    } else {
        GroupName::w(2 * n)
    });
    cert.status = Status::Certified;
    Ok(cert)
}

/// Offline re-check of a certificate: every witness prime still lands in its
/// class and the square decision is reproduced.
pub fn reverify(cert: &GaloisCertificate) -> Result<bool> {
    let st = strip(&cert.input)?;
    if st.f != cert.f {
        return Ok(false);
    }
    let red = Reducer::new(&cert.f)?;
    if red.big_f != cert.normalized {
        return Ok(false);
    }
    for (&i, &l) in &cert.witnesses {
        if l % 2 == 0 {
            return Ok(false);
        }
        match classes_at(&red, l) {
            Some(cls) if cls.contains(&i) => {}
            _ => return Ok(false),
        }
    }
    if cert.status == Status::Certified {
        let disc = discriminant(&red.big_f)?;
        let sq = is_perfect_square(&disc);
        if sq != cert.disc_is_square {
            return Ok(false);
        }
        let expect = if sq {
            GroupName::w_plus(2 * cert.n)
        } else {
            GroupName::w(2 * cert.n)
        };
        if cert.claimed_group != Some(expect) || (sq && cert.witnesses.contains_key(&6)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct ChebotarevReport {
    pub claimed: GroupName,
    pub prime_bound: u64,
    pub good_primes: usize,
    pub distinct_types: usize,
    /// Types seen that do not occur in the claimed group.
    pub foreign_types: usize,
    pub tv_distance: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compare the factorization-type frequencies of `(f, h)` mod `ℓ` over good
/// primes with the class statistics of the claimed group.
pub fn chebotarev_validate(
    f: &RatPoly,
    claimed: GroupName,
    prime_bound: u64,
    tolerance: f64,
) -> Result<ChebotarevReport> {
    let f = f.monic();
    let n = f.deg() / 2;
    if f.deg() % 2 == 1 || claimed.rank != 2 * n {
        return Err(Error::invalid("claimed group does not match deg f"));
    }
    let red = Reducer::new(&f)?;
    let theory = class_statistics(n, claimed.plus)?;
    let primes = odd_primes(3, prime_bound);
    let types: Vec<Option<JointType>> = primes
        .par_iter()
        .map(|&l| {
            if !red.good(l) {
                return None;
            }
            let fq = Fq::prime(l).ok()?;
            let h = red.h_mod(&fq);
            if !in_p_n(&fq, &h) {
                return None;
            }
            let fm = from_trace_form_fq(&fq, &h);
            let mut x = squarefree_factor_degrees(&fq, &fm);
            let mut pairs = squarefree_factor_degrees(&fq, &h);
            x.sort_unstable();
            pairs.sort_unstable();
            let even = x.iter().filter(|d| *d % 2 == 0).count();
            let eps1 = if even % 2 == 0 { 1 } else { -1 };
            Some(JointType { x, pairs, eps1 })
        })
        .collect();
    let mut counts: BTreeMap<JointType, u64> = BTreeMap::new();
    for t in types.into_iter().flatten() {
        *counts.entry(t).or_default() += 1;
    }
    let good: u64 = counts.values().sum();
    if good < 100 {
        return Err(Error::invalid(format!(
            "only {good} good primes up to {prime_bound}; need 100"
        )));
    }
    let mut tv = 0.0;
    let mut foreign = 0;
    let keys: BTreeSet<&JointType> = counts.keys().chain(theory.keys()).collect();
    for k in keys {
        let emp = counts.get(k).copied().unwrap_or(0) as f64 / good as f64;
        let th = theory.get(k).map(ratio_to_f64).unwrap_or(0.0);
        if !theory.contains_key(k) {
            foreign += 1;
        }
        tv += (emp - th).abs();
    }
    tv /= 2.0;
    Ok(ChebotarevReport {
        claimed,
        prime_bound,
        good_primes: good as usize,
        distinct_types: counts.len(),
        foreign_types: foreign,
        tv_distance: tv,
        tolerance,
        pass: tv <= tolerance,
    })
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
