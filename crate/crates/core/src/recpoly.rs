//! Reciprocal polynomials: stripping the forced linear factors, the trace
//! form `f(T) = T^n h(T + 1/T)`, the discriminant identity and the six
//! factorization-pattern classes `H_{n,i}` / `F_{2n,i}`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffpoly::{
    discriminant, factor, squarefree_factor_degrees, Fq, FqPoly, IntPoly, RatPoly, SquareClass,
};

/// Which linear factor was divided out by [`strip`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Removed {
    /// `N` even and `ε = 1`: nothing removed.
    Nothing,
    /// `N` odd: the factor `1 + εT`.
    OnePlusEpsT,
    /// `N` even and `ε = -1`: the factor `1 - T^2`.
    OneMinusTSquared,
}

/// A reciprocal polynomial with its forced linear factors removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrippedPoly<P> {
    /// Monic, even degree `2n`, `T^{2n} f(1/T) = f(T)`.
    pub f: P,
    pub removed: Removed,
    pub epsilon: i32,
    pub original_degree: usize,
}

/// Class index `i ∈ {1, …, 6}`.
pub type ClassIndex = u8;

/// Factorization data attached to a trace form over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorizationProfile {
    pub h_degrees: Vec<usize>,
    pub f_degrees: Vec<usize>,
    /// `e_i` per irreducible factor of `h` (degree, sign); 0 when `h_i(±2) = 0`.
    pub e_signs: Vec<(usize, i32)>,
    pub f_at_1: SquareClass,
    pub f_at_minus_1: SquareClass,
    pub h_separable: bool,
    pub f_separable: bool,
}

fn sign_of_reciprocity<T: PartialEq + Clone>(c: &[T], neg: impl Fn(&T) -> T) -> Option<i32> {
    let rev: Vec<T> = c.iter().rev().cloned().collect();
    if rev == c {
        return Some(1);
    }
    let negated: Vec<T> = c.iter().map(&neg).collect();
    if rev == negated {
        return Some(-1);
    }
    None
}

/// Strip a reciprocal polynomial over `Q` (`deg P > 2`).
pub fn strip(p: &RatPoly) -> Result<StrippedPoly<RatPoly>> {
    let n = p.deg();
    if p.is_zero() || n <= 2 {
        return Err(Error::invalid("degree must exceed 2"));
    }
    strip_any(p)
}

/// Strip without the `deg P > 2` requirement (any positive degree).
pub fn strip_any(p: &RatPoly) -> Result<StrippedPoly<RatPoly>> {
    let n = p.deg();
    if p.is_zero() || n == 0 {
        return Err(Error::invalid("constant polynomial"));
    }
    let eps = sign_of_reciprocity(p.coeffs(), |c| -c.clone()).ok_or(Error::NotReciprocal)?;
    let (divisor, removed) = linear_divisor(n, eps);
    let f = match &divisor {
        None => p.clone(),
        Some(d) => {
            let (q, r) = p.divrem(&RatPoly::from_i64s(d));
            if !r.is_zero() {
                return Err(Error::Inconsistent("forced factor does not divide".into()));
            }
            q
        }
    };
    Ok(StrippedPoly {
        f: f.monic(),
        removed,
        epsilon: eps,
        original_degree: n,
    })
}

fn linear_divisor(n: usize, eps: i32) -> (Option<Vec<i64>>, Removed) {
    if n % 2 == 1 {
        (Some(vec![1, eps as i64]), Removed::OnePlusEpsT)
    } else if eps == -1 {
        (Some(vec![1, 0, -1]), Removed::OneMinusTSquared)
    } else {
        (None, Removed::Nothing)
    }
}

/// Strip a reciprocal polynomial over `F_q`.
pub fn strip_fq(fq: &Fq, p: &FqPoly) -> Result<StrippedPoly<FqPoly>> {
    let n = p.deg();
    if p.is_zero() || n == 0 {
        return Err(Error::invalid("constant polynomial"));
    }
    let eps = sign_of_reciprocity(p.coeffs(), |&c| fq.neg(c)).ok_or(Error::NotReciprocal)?;
    let (divisor, removed) = linear_divisor(n, eps);
    let f = match &divisor {
        None => p.clone(),
        Some(d) => {
            let (q, r) = fq.poly_divrem(p, &fq.poly_from_i64(d));
            if !r.is_zero() {
                return Err(Error::Inconsistent("forced factor does not divide".into()));
            }
            q
        }
    };
    Ok(StrippedPoly {
        f: fq.poly_monic(&f).1,
        removed,
        epsilon: eps,
        original_degree: n,
    })
}

/// `D_k(y)` with `T^k + T^{-k} = D_k(T + 1/T)`, for `k = 0..=n` (`D_0 = 2`).
fn dickson(n: usize) -> Vec<Vec<i64>> {
    let mut d: Vec<Vec<i64>> = vec![vec![2], vec![0, 1]];
    for k in 2..=n {
        let mut next = vec![0i64; k + 1];
        for (i, &c) in d[k - 1].iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, &c) in d[k - 2].iter().enumerate() {
            next[i] -= c;
        }
        d.push(next);
    }
    d.truncate(n + 1);
    d
}

fn dickson_big(n: usize) -> Vec<Vec<BigInt>> {
    let mut d: Vec<Vec<BigInt>> = vec![vec![BigInt::from(2)], vec![BigInt::zero(), BigInt::one()]];
    for k in 2..=n {
        let mut next = vec![BigInt::zero(); k + 1];
        for (i, c) in d[k - 1].iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in d[k - 2].iter().enumerate() {
            next[i] -= c;
        }
        d.push(next);
    }
    d.truncate(n + 1);
    d
}

fn check_reciprocal<T: PartialEq + Clone>(c: &[T]) -> Result<usize> {
    if c.len() % 2 == 0 || c.len() < 3 {
        return Err(Error::NotReciprocal);
    }
    let rev: Vec<T> = c.iter().rev().cloned().collect();
    if rev != c {
        return Err(Error::NotReciprocal);
    }
    Ok((c.len() - 1) / 2)
}

/// Trace form over `Q`: the unique `h` of degree `n` with `f = T^n h(T+1/T)`.
pub fn to_trace_form(f: &RatPoly) -> Result<RatPoly> {
    let n = check_reciprocal(f.coeffs())?;
    let d = dickson_big(n);
    let mut h = vec![BigRational::zero(); n + 1];
    h[0] = f.coeff(n);
    for k in 1..=n {
        let a = f.coeff(n + k);
        for (i, c) in d[k].iter().enumerate() {
            h[i] += &a * BigRational::from_integer(c.clone());
        }
    }
    Ok(RatPoly::new(h))
}

/// Trace form over `Z` (for integral reciprocal `f`).
pub fn to_trace_form_int(f: &IntPoly) -> Result<IntPoly> {
    let n = check_reciprocal(f.coeffs())?;
    let d = dickson_big(n);
    let mut h = vec![BigInt::zero(); n + 1];
    h[0] = f.coeff(n);
    for k in 1..=n {
        let a = f.coeff(n + k);
        for (i, c) in d[k].iter().enumerate() {
            h[i] += &a * c;
        }
    }
    Ok(IntPoly::new(h))
}

/// Trace form over `F_q`.
pub fn to_trace_form_fq(fq: &Fq, f: &FqPoly) -> Result<FqPoly> {
    let n = check_reciprocal(f.coeffs())?;
    let d = dickson(n);
    let mut h = vec![0u64; n + 1];
    h[0] = f.coeff(n);
    for k in 1..=n {
        let a = f.coeff(n + k);
        if a == 0 {
            continue;
        }
        for (i, &c) in d[k].iter().enumerate() {
            h[i] = fq.add(h[i], fq.mul(a, fq.from_i64(c)));
        }
    }
    Ok(FqPoly::new(h))
}

/// `T^n h(T + 1/T) = Σ h_j T^{n-j} (T^2 + 1)^j` over `Z`.
pub fn from_trace_form_int(h: &IntPoly) -> IntPoly {
    let n = h.deg();
    let t2 = IntPoly::from_i64s(&[1, 0, 1]);
    let mut acc = IntPoly::zero();
    let mut pw = IntPoly::one();
    for j in 0..=n {
        let mut shifted = vec![BigInt::zero(); n - j];
        shifted.extend(pw.scale(&h.coeff(j)).coeffs().iter().cloned());
        acc = acc.add(&IntPoly::new(shifted));
        pw = pw.mul(&t2);
    }
    acc
}

pub fn from_trace_form(h: &RatPoly) -> RatPoly {
    let n = h.deg();
    let t2 = RatPoly::from_i64s(&[1, 0, 1]);
    let mut acc = RatPoly::new(vec![]);
    let mut pw = RatPoly::from_i64s(&[1]);
    for j in 0..=n {
        let mut shifted = vec![BigRational::zero(); n - j];
        shifted.extend(pw.scale(&h.coeff(j)).coeffs().iter().cloned());
        acc = acc.add(&RatPoly::new(shifted));
        pw = pw.mul(&t2);
    }
    acc
}

pub fn from_trace_form_fq(fq: &Fq, h: &FqPoly) -> FqPoly {
    let n = h.deg();
    let t2 = fq.poly_from_i64(&[1, 0, 1]);
    let mut acc = FqPoly::zero();
    let mut pw = FqPoly::one();
    for j in 0..=n {
        let mut shifted = vec![0u64; n - j];
        shifted.extend(fq.poly_scale(&pw, h.coeff(j)).coeffs());
        acc = fq.poly_add(&acc, &FqPoly::new(shifted));
        pw = fq.poly_mul(&pw, &t2);
    }
    acc
}

/// Both sides of the discriminant identity for integral monic reciprocal `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscIdentity {
    pub lhs: BigInt,
    /// `h(2) h(-2) disc(h)^2`
    pub rhs: BigInt,
    /// `(-1)^n f(1) f(-1) disc(h)^2`
    pub rhs_alt: BigInt,
}

pub fn disc_identity(f: &IntPoly) -> Result<DiscIdentity> {
    let h = to_trace_form_int(f)?;
    let n = h.deg();
    let lhs = discriminant(f)?;
    let dh = discriminant(&h)?;
    let dh2 = &dh * &dh;
    let rhs = h.eval_i64(2) * h.eval_i64(-2) * &dh2;
    let mut alt = f.eval_i64(1) * f.eval_i64(-1) * &dh2;
    if n % 2 == 1 {
        alt = -alt;
    }
    Ok(DiscIdentity {
        lhs,
        rhs,
        rhs_alt: alt,
    })
}

/// Is `h` in `𝒫_n(F_q)`: separable with `h(2) h(-2) ≠ 0`.
pub fn in_p_n(fq: &Fq, h: &FqPoly) -> bool {
    h.deg() >= 1
        && fq.poly_eval(h, fq.from_i64(2)) != 0
        && fq.poly_eval(h, fq.from_i64(-2)) != 0
        && fq.poly_is_squarefree(h)
}

fn is_prime_usize(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Class membership from factor-degree patterns of `h` and `f`
/// (`h ∈ 𝒫_n` assumed).
pub fn classes_from_degrees(n: usize, h_deg: &[usize], f_deg: &[usize]) -> BTreeSet<ClassIndex> {
    let mut out = BTreeSet::new();
    let even = |d: &&usize| **d % 2 == 0;
    let one_quadratic_rest_odd =
        |ds: &[usize]| ds.iter().filter(|&&d| d == 2).count() == 1 && ds.iter().filter(even).count() == 1;
    if n == 1 {
        out.extend(1..=5);
    } else {
        if h_deg.len() == 1 {
            out.insert(1);
        }
        if h_deg.iter().any(|&d| is_prime_usize(d) && 2 * d > n) {
            out.insert(2);
        }
        if one_quadratic_rest_odd(h_deg) {
            out.insert(3);
        }
        let f_quads = f_deg.iter().filter(|&&d| d == 2).count();
        let f_even = f_deg.iter().filter(even).count();
        if h_deg.iter().all(|d| d % 2 == 1) && (f_quads == 1 || f_quads == 2) && f_even == f_quads {
            out.insert(4);
        }
        if (h_deg.iter().filter(even).count() + f_even) % 2 == 1 {
            out.insert(5);
        }
    }
    if one_quadratic_rest_odd(f_deg) {
        out.insert(6);
    }
    out
}

/// The set of `i` with `h ∈ H_{n,i}(F_q)`; empty unless `h ∈ 𝒫_n`.
pub fn classify_h(fq: &Fq, h: &FqPoly) -> BTreeSet<ClassIndex> {
    let (_, h) = fq.poly_monic(h);
    if !in_p_n(fq, &h) {
        return BTreeSet::new();
    }
    let n = h.deg();
    let f = from_trace_form_fq(fq, &h);
    let hd = squarefree_factor_degrees(fq, &h);
    let fd = squarefree_factor_degrees(fq, &f);
    classes_from_degrees(n, &hd, &fd)
}

/// Full factorization profile of `f = T^n h(T+1/T)`.
pub fn profile(fq: &Fq, h: &FqPoly) -> Result<FactorizationProfile> {
    let (_, h) = fq.poly_monic(h);
    let f = from_trace_form_fq(fq, &h);
    let hf = factor(fq, &h)?;
    let ff = factor(fq, &f)?;
    let two = fq.from_i64(2);
    let mtwo = fq.from_i64(-2);
    let e_signs = hf
        .factors
        .iter()
        .flat_map(|(g, m)| {
            let v = fq.mul(fq.poly_eval(g, two), fq.poly_eval(g, mtwo));
            std::iter::repeat((g.deg(), fq.chi(v))).take(*m as usize)
        })
        .collect();
    Ok(FactorizationProfile {
        h_degrees: hf.degrees(),
        f_degrees: ff.degrees(),
        e_signs,
        f_at_1: fq.square_class(fq.poly_eval(&f, 1)),
        f_at_minus_1: fq.square_class(fq.poly_eval(&f, fq.neg(1))),
        h_separable: fq.poly_is_squarefree(&h),
        f_separable: fq.poly_is_squarefree(&f),
    })
}

/// Maximum number of irreducible factors allowed in `F^{α,β}_{2n,i}`.
pub const FACTOR_CAP: usize = 8;

/// Membership in `F^{α,β}_{2n,i}(F_q)`.
pub fn in_f_class(fq: &Fq, f: &FqPoly, i: ClassIndex, alpha: SquareClass, beta: SquareClass) -> bool {
    if !f.is_monic() || f.deg() < 2 {
        return false;
    }
    let Ok(h) = to_trace_form_fq(fq, f) else {
        return false;
    };
    let a = fq.square_class(fq.poly_eval(f, 1));
    let b = fq.square_class(fq.poly_eval(f, fq.neg(1)));
    if a == SquareClass::Zero || b == SquareClass::Zero || a != alpha || b != beta {
        return false;
    }
    if !in_p_n(fq, &h) {
        return false;
    }
    let hd = squarefree_factor_degrees(fq, &h);
    let fd = squarefree_factor_degrees(fq, f);
    fd.len() <= FACTOR_CAP && classes_from_degrees(h.deg(), &hd, &fd).contains(&i)
}

/// One bucket of the irreducible count, keyed by the classes of `h(2)`, `h(-2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IrredBucket {
    pub alpha: SquareClass,
    pub beta: SquareClass,
    pub count: u64,
    /// `|4 m count - q^m|`
    pub deviation: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IrredCount {
    pub q: u64,
    pub m: usize,
    pub buckets: Vec<IrredBucket>,
    pub total: u64,
}

impl IrredCount {
    pub fn bucket(&self, alpha: SquareClass, beta: SquareClass) -> u64 {
        self.buckets
            .iter()
            .find(|b| b.alpha == alpha && b.beta == beta)
            .map_or(0, |b| b.count)
    }

    /// Largest deviation divided by `q^{m/2}`.
    pub fn worst_ratio(&self) -> f64 {
        let scale = (self.q as f64).powf(self.m as f64 / 2.0);
        self.buckets
            .iter()
            .map(|b| b.deviation as f64 / scale)
            .fold(0.0, f64::max)
    }
}

/// Default enumeration budget for [`count_irreducible_classes`].
pub const IRRED_BUDGET: u64 = 1_000_000;

const CLASSES: [SquareClass; 2] = [SquareClass::Square, SquareClass::NonSquare];

fn bucket_index(a: SquareClass, b: SquareClass) -> usize {
    (if a == SquareClass::Square { 0 } else { 2 }) + if b == SquareClass::Square { 0 } else { 1 }
}

fn assemble(q: u64, m: usize, counts: [u64; 4]) -> IrredCount {
    let qm = q.pow(m as u32);
    let mut buckets = Vec::new();
    for a in CLASSES {
        for b in CLASSES {
            let c = counts[bucket_index(a, b)];
            buckets.push(IrredBucket {
                alpha: a,
                beta: b,
                count: c,
                deviation: (4 * m as u64 * c).abs_diff(qm),
            });
        }
    }
    IrredCount {
        q,
        m,
        buckets,
        total: counts.iter().sum(),
    }
}

fn qm_checked(q: u64, m: usize, budget: u64) -> Result<u64> {
    match q.checked_pow(m as u32) {
        Some(v) if v <= budget => Ok(v),
        _ => Err(Error::budget("q^m enumeration", format!("{q}^{m}"), budget)),
    }
}

/// Exact counts `|I_m^{α,β}|` by enumerating all monic `h` of degree `m`.
pub fn count_irreducible_classes(fq: &Fq, m: usize, budget: u64) -> Result<IrredCount> {
    if m == 0 {
        return Err(Error::invalid("m must be positive"));
    }
    let q = fq.order();
    let total = qm_checked(q, m, budget)?;
    let two = fq.from_i64(2);
    let mtwo = fq.from_i64(-2);
    let mut counts = [0u64; 4];
    let mut c = vec![0u64; m + 1];
    c[m] = 1;
    for code in 0..total {
        let mut r = code;
        for slot in c.iter_mut().take(m) {
            *slot = r % q;
            r /= q;
        }
        let h = FqPoly::new(c.clone());
        // cheap root filter before the full test
        if m > 1 && c[0] == 0 {
            continue;
        }
        if m > 1 && fq.elements().any(|x| fq.poly_eval(&h, x) == 0) {
            continue;
        }
        if !fq.poly_is_irreducible(&h) {
            continue;
        }
        let a = fq.square_class(fq.poly_eval(&h, two));
        let b = fq.square_class(fq.poly_eval(&h, mtwo));
        if a == SquareClass::Zero || b == SquareClass::Zero {
            continue;
        }
        counts[bucket_index(a, b)] += 1;
    }
    Ok(assemble(q, m, counts))
}

/// The same counts through elements `ζ` of degree `m` over `F_q`:
/// `h(2)` is the norm of `2 - ζ`, whose class is the quadratic character of
/// `2 - ζ` in `F_{q^m}`.
pub fn count_irreducible_classes_norm(fq: &Fq, m: usize, budget: u64) -> Result<IrredCount> {
    let q = fq.order();
    qm_checked(q, m, budget)?;
    let big = Fq::new(fq.characteristic(), fq.degree() * m as u32)?;
    let proper: Vec<u64> = (1..m).filter(|d| m % d == 0).map(|d| q.pow(d as u32)).collect();
    let two = big.from_i64(2);
    let mtwo = big.from_i64(-2);
    let mut counts = [0u64; 4];
    for z in big.elements() {
        if proper.iter().any(|&e| big.pow(z, e) == z) {
            continue;
        }
        let a = big.square_class(big.sub(two, z));
        let b = big.square_class(big.sub(mtwo, z));
        if a == SquareClass::Zero || b == SquareClass::Zero {
            continue;
        }
        counts[bucket_index(a, b)] += 1;
    }
    for c in counts.iter_mut() {
        debug_assert_eq!(*c % m as u64, 0);
        *c /= m as u64;
    }
    Ok(assemble(q, m, counts))
}

/// All monic polynomials of degree `n` over `F_q`, in encoding order.
pub fn monic_polys(fq: &Fq, n: usize) -> impl Iterator<Item = FqPoly> + '_ {
    let q = fq.order();
    let total = q.pow(n as u32);
    (0..total).map(move |mut code| {
        let mut c = Vec::with_capacity(n + 1);
        for _ in 0..n {
            c.push(code % q);
            code /= q;
        }
        c.push(1);
        FqPoly::new(c)
    })
}
