//! Polynomials over the integers and the rationals, with exact resultants
//! and discriminants.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::field::Fq;
use super::poly::FqPoly;
use crate::error::{Error, Result};

/// Polynomial with integer coefficients (ascending, trimmed).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

/// Polynomial with rational coefficients (ascending, trimmed).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

/// JSON form of a polynomial: `{"coeffs": [...], "modulus": p | null}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub coeffs: Vec<String>,
    pub modulus: Option<u64>,
}

fn trim<T: Zero>(c: &mut Vec<T>) {
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
}

/// Parse the comma-separated ascending coefficient format, e.g. `1,-3,1`.
/// Entries may be integers or fractions `a/b`.
pub fn parse_coeffs(s: &str) -> Result<Vec<BigRational>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::invalid("empty coefficient list"));
    }
    s.split(',')
        .map(|t| parse_rational(t.trim()))
        .collect()
}

pub fn parse_rational(t: &str) -> Result<BigRational> {
    let bad = || Error::invalid(format!("bad coefficient {t:?}"));
    match t.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

pub fn rational_to_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> IntPoly {
        trim(&mut coeffs);
        IntPoly { coeffs }
    }

    pub fn from_i64s(c: &[i64]) -> IntPoly {
        IntPoly::new(c.iter().map(|&a| BigInt::from(a)).collect())
    }

    pub fn zero() -> IntPoly {
        IntPoly { coeffs: vec![] }
    }

    pub fn one() -> IntPoly {
        IntPoly::from_i64s(&[1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly::zero();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        IntPoly::new(c)
    }

    pub fn scale(&self, s: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, n: u32) -> IntPoly {
        let mut acc = IntPoly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.eval(&BigInt::from(x))
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Gcd of the coefficients (non-negative).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Divide by the content, making the leading coefficient positive.
    pub fn primitive(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut c = self.content();
        if self.lc().is_negative() {
            c = -c;
        }
        IntPoly::new(self.coeffs.iter().map(|x| x / &c).collect())
    }

    /// Reduction modulo the characteristic of `fq` (prime subfield image).
    pub fn reduce(&self, fq: &Fq) -> FqPoly {
        FqPoly::new(self.coeffs.iter().map(|c| fq.from_bigint(c)).collect())
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    /// `T^deg f(1/T)`.
    pub fn reversed(&self) -> IntPoly {
        let mut c = self.coeffs.clone();
        c.reverse();
        IntPoly::new(c)
    }

    /// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) a = q b + r`.
    pub fn prem(&self, b: &IntPoly) -> IntPoly {
        let db = b.degree().expect("pseudo-division by zero");
        if self.coeffs.len() <= db {
            return self.clone();
        }
        let lb = b.lc();
        let mut r = self.coeffs.clone();
        let steps = r.len() - db;
        for k in (db..r.len()).rev() {
            let c = r[k].clone();
            for x in r.iter_mut().take(k) {
                *x *= &lb;
            }
            r[k] = BigInt::zero();
            if !c.is_zero() {
                for (i, bc) in b.coeffs.iter().enumerate().take(db) {
                    r[k - db + i] -= &c * bc;
                }
            }
        }
        debug_assert_eq!(steps, self.coeffs.len() - db);
        r.truncate(db);
        IntPoly::new(r)
    }

    /// Exact division by an integer polynomial; `None` when the quotient is
    /// not integral or the division leaves a remainder.
    pub fn div_exact(&self, b: &IntPoly) -> Option<IntPoly> {
        let (q, r) = self.to_rat().divrem(&b.to_rat());
        if !r.is_zero() {
            return None;
        }
        q.to_int()
    }

    pub fn div_scalar_exact(&self, s: &BigInt) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .map(|c| {
                    debug_assert!((c % s).is_zero());
                    c / s
                })
                .collect(),
        )
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> RatPoly {
        trim(&mut coeffs);
        RatPoly { coeffs }
    }

    pub fn parse(s: &str) -> Result<RatPoly> {
        Ok(RatPoly::new(parse_coeffs(s)?))
    }

    pub fn from_i64s(c: &[i64]) -> RatPoly {
        IntPoly::from_i64s(c).to_rat()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &RatPoly) -> RatPoly {
        if self.is_zero() || o.is_zero() {
            return RatPoly::new(vec![]);
        }
        let mut c = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RatPoly::new(c)
    }

    pub fn scale(&self, s: &BigRational) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_i64(&self, x: i64) -> BigRational {
        self.eval(&BigRational::from_integer(BigInt::from(x)))
    }

    pub fn divrem(&self, b: &RatPoly) -> (RatPoly, RatPoly) {
        let db = b.degree().expect("division by the zero polynomial");
        if self.coeffs.len() <= db {
            return (RatPoly::new(vec![]), self.clone());
        }
        let lb = b.lc();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigRational::zero(); r.len() - db];
        for k in (db..r.len()).rev() {
            if r[k].is_zero() {
                continue;
            }
            let t = &r[k] / &lb;
            for (i, bc) in b.coeffs.iter().enumerate() {
                r[k - db + i] -= &t * bc;
            }
            q[k - db] = t;
        }
        r.truncate(db);
        (RatPoly::new(q), RatPoly::new(r))
    }

    /// Integer polynomial if every coefficient is integral.
    pub fn to_int(&self) -> Option<IntPoly> {
        if self.coeffs.iter().all(|c| c.is_integer()) {
            Some(IntPoly::new(
                self.coeffs.iter().map(|c| c.numer().clone()).collect(),
            ))
        } else {
            None
        }
    }

    /// Multiply by the lcm `L` of the denominators; returns `(L * self, L)`.
    pub fn clear_denominators(&self) -> (IntPoly, BigInt) {
        let l = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let lr = BigRational::from_integer(l.clone());
        (
            self.scale(&lr).to_int().expect("denominators cleared"),
            l,
        )
    }

    pub fn reversed(&self) -> RatPoly {
        let mut c = self.coeffs.clone();
        c.reverse();
        RatPoly::new(c)
    }

    /// Monic associate.
    pub fn monic(&self) -> RatPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = BigRational::one() / self.lc();
        self.scale(&inv)
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            coeffs: self.coeffs.iter().map(rational_to_string).collect(),
            modulus: None,
        }
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(rational_to_string).collect();
        f.write_str(&parts.join(","))
    }
}

fn pow_big(b: &BigInt, e: usize) -> BigInt {
    num_traits::pow(b.clone(), e)
}

/// Resultant over the integers by the subresultant algorithm.
pub fn resultant(a: &IntPoly, b: &IntPoly) -> Result<BigInt> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut s = BigInt::one();
    if a.deg() < b.deg() {
        std::mem::swap(&mut a, &mut b);
        if a.deg() % 2 == 1 && b.deg() % 2 == 1 {
            s = -s;
        }
    }
    if b.deg() == 0 {
        return Ok(s * pow_big(&b.lc(), a.deg()));
    }
    let ca = a.content();
    let cb = b.content();
    a = a.div_scalar_exact(&ca);
    b = b.div_scalar_exact(&cb);
    let t = pow_big(&ca, b.deg()) * pow_big(&cb, a.deg());
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let da = a.deg();
        let db = b.deg();
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = a.prem(&b);
        if r.is_zero() {
            return Ok(BigInt::zero());
        }
        a = b;
        b = r.div_scalar_exact(&(&g * pow_big(&h, delta)));
        g = a.lc();
        // h <- h^(1 - delta) g^delta
        if delta > 0 {
            h = pow_big(&g, delta) / pow_big(&h, delta - 1);
        }
        if b.deg() == 0 {
            let da = a.deg();
            let hh = pow_big(&b.lc(), da) / pow_big(&h, da - 1);
            return Ok(s * t * hh);
        }
    }
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Sylvester matrix of `f` (degree m) and `g` (degree n).
pub fn sylvester_matrix(f: &IntPoly, g: &IntPoly) -> Vec<Vec<BigInt>> {
    let m = f.deg();
    let n = g.deg();
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for k in 0..=m {
            row[i + k] = f.coeff(m - k);
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for k in 0..=n {
            row[i + k] = g.coeff(n - k);
        }
        rows.push(row);
    }
    rows
}

/// Resultant as the determinant of the Sylvester matrix.
pub fn resultant_sylvester(f: &IntPoly, g: &IntPoly) -> Result<BigInt> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.deg() == 0 {
        return Ok(pow_big(&f.lc(), g.deg()));
    }
    if g.deg() == 0 {
        return Ok(pow_big(&g.lc(), f.deg()));
    }
    Ok(det_bareiss(sylvester_matrix(f, g)))
}

/// `disc(f) = (-1)^{n(n-1)/2} Res(f, f') / lc(f)`.
pub fn discriminant(f: &IntPoly) -> Result<BigInt> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let n = f.deg();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let r = resultant(f, &f.derivative())?;
    let d = r / f.lc();
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -d } else { d })
}

/// Resultant and discriminant together: `(Res(f, g), disc(f))`.
pub fn disc_and_resultant(f: &IntPoly, g: &IntPoly) -> Result<(BigInt, BigInt)> {
    Ok((resultant(f, g)?, discriminant(f)?))
}

/// Squarefree part of `|m|` by trial division up to `limit`, with the sign
/// kept. The flag is `true` when the cofactor left over was not fully
/// factored.
pub fn squarefree_part(m: &BigInt, limit: u64) -> (BigInt, bool) {
    if m.is_zero() {
        return (BigInt::zero(), false);
    }
    let sign = if m.is_negative() { -1 } else { 1 };
    let mut r = m.abs();
    let mut out = BigInt::one();
    let mut d = 2u64;
    let mut fully = false;
    while d <= limit {
        let bd = BigInt::from(d);
        if &bd * &bd > r {
            fully = true;
            break;
        }
        let mut e = 0u32;
        while (&r % &bd).is_zero() {
            r /= &bd;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &bd;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut partial = false;
    if !r.is_one() {
        if fully {
            out *= &r;
        } else if !super::field::is_perfect_square(&r) {
            out *= &r;
            partial = true;
        }
    }
    (out * BigInt::from(sign), partial)
}
