//! Finite fields of odd characteristic.
//!
//! Elements are plain `u64` encodings. In the prime field `F_p` the encoding
//! is the residue in `[0, p)`. In `F_{p^e}` an element `c_0 + c_1 x + ... +
//! c_{e-1} x^{e-1}` (modulo the field's fixed modulus) is encoded as
//! `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`, so the prime subfield keeps its
//! natural encoding.
//!
//! Extension fields carry log/exp/Zech tables, which caps their order.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest prime accepted for a prime field (products must fit in `u64`).
pub const MAX_PRIME: u64 = (1 << 31) - 1;
/// Largest order accepted for a proper extension field.
pub const MAX_EXT_ORDER: u64 = 1 << 21;

/// Square class of a field element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SquareClass {
    Square,
    NonSquare,
    Zero,
}

impl SquareClass {
    /// Group law on `F^x / F^x2`; anything times `Zero` is `Zero`.
    pub fn mul(self, other: SquareClass) -> SquareClass {
        use SquareClass::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (a, b) if a == b => Square,
            _ => NonSquare,
        }
    }

    pub fn from_sign(s: i32) -> SquareClass {
        match s.signum() {
            0 => SquareClass::Zero,
            1 => SquareClass::Square,
            _ => SquareClass::NonSquare,
        }
    }

    /// `+1`, `-1` or `0`.
    pub fn sign(self) -> i32 {
        match self {
            SquareClass::Square => 1,
            SquareClass::NonSquare => -1,
            SquareClass::Zero => 0,
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            SquareClass::Square => "sq",
            SquareClass::NonSquare => "nonsq",
            SquareClass::Zero => "zero",
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

const NONE: u32 = u32::MAX;

struct Tables {
    log: Vec<u32>,
    // exp over two periods so that log sums never need a reduction
    exp: Vec<u32>,
    zech: Vec<u32>,
    order: u32,
}

struct Inner {
    p: u64,
    e: u32,
    q: u64,
    modulus: Vec<u64>,
    generator: u64,
    tables: Option<Tables>,
}

/// A finite field `F_q`, `q = p^e`, `p` odd.
///
/// Cloning is cheap; the tables are shared.
#[derive(Clone)]
pub struct Fq(Arc<Inner>);

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.e == other.0.e
    }
}
impl Eq for Fq {}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.e == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^{}", self.0.p, self.0.e)
        }
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn mod_inv(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, a as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1);
    if t < 0 {
        (t + p as i64) as u64
    } else {
        t as u64
    }
}

// Digit-level helpers used while the tables are being built.
fn to_digits(mut a: u64, p: u64, e: u32) -> Vec<u64> {
    let mut d = vec![0u64; e as usize];
    for slot in d.iter_mut() {
        *slot = a % p;
        a /= p;
    }
    d
}

fn from_digits(d: &[u64], p: u64) -> u64 {
    d.iter().rev().fold(0u64, |acc, &c| acc * p + c)
}

fn digit_mul(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let e = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * e];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (e..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for i in 0..e {
            let sub = c * modulus[i] % p;
            prod[k - e + i] = (prod[k - e + i] + p - sub) % p;
        }
    }
    prod.truncate(e);
    prod
}

impl Fq {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Fq> {
        Fq::new(p, 1)
    }

    /// `F_{p^e}`, using the least monic irreducible of degree `e` (ordered by
    /// the integer encoding of its lower coefficients) as modulus.
    pub fn new(p: u64, e: u32) -> Result<Fq> {
        if p == 2 {
            return Err(Error::CharacteristicTwo);
        }
        if !is_prime_u64(p) || p > MAX_PRIME {
            return Err(Error::invalid(format!("{p} is not a supported odd prime")));
        }
        if e == 0 {
            return Err(Error::invalid("extension degree must be positive"));
        }
        if e == 1 {
            let generator = (1..p)
                .find(|&g| {
                    prime_factors(p - 1)
                        .iter()
                        .all(|&r| pow_mod(g, (p - 1) / r, p) != 1)
                })
                .unwrap_or(1);
            return Ok(Fq(Arc::new(Inner {
                p,
                e,
                q: p,
                modulus: vec![0, 1],
                generator,
                tables: None,
            })));
        }
        let q = p
            .checked_pow(e)
            .filter(|&q| q <= MAX_EXT_ORDER)
            .ok_or_else(|| Error::Budget {
                what: "extension field order".into(),
                needed: (p as f64).powi(e as i32).to_string(),
                limit: MAX_EXT_ORDER.to_string(),
            })?;
        let base = Fq::prime(p)?;
        let modulus = least_irreducible(&base, e as usize);
        let order = q - 1;
        let factors = prime_factors(order);
        let digit_pow = |g: u64, mut n: u64| -> Vec<u64> {
            let mut acc = to_digits(1, p, e);
            let mut b = to_digits(g, p, e);
            while n > 0 {
                if n & 1 == 1 {
                    acc = digit_mul(&acc, &b, &modulus, p);
                }
                b = digit_mul(&b, &b, &modulus, p);
                n >>= 1;
            }
            acc
        };
        let one = to_digits(1, p, e);
        let generator = (2..q)
            .find(|&g| factors.iter().all(|&r| digit_pow(g, order / r) != one))
            .expect("multiplicative group is cyclic");
        let gd = to_digits(generator, p, e);
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut log = vec![NONE; q as usize];
        let mut cur = one.clone();
        for k in 0..order {
            let c = from_digits(&cur, p);
            exp.push(c as u32);
            log[c as usize] = k as u32;
            cur = digit_mul(&cur, &gd, &modulus, p);
        }
        for k in 0..order as usize {
            exp.push(exp[k]);
        }
        let mut zech = vec![NONE; order as usize];
        for k in 0..order as usize {
            let mut d = to_digits(exp[k] as u64, p, e);
            d[0] = (d[0] + 1) % p;
            let s = from_digits(&d, p);
            if s != 0 {
                zech[k] = log[s as usize];
            }
        }
        Ok(Fq(Arc::new(Inner {
            p,
            e,
            q,
            modulus,
            generator,
            tables: Some(Tables {
                log,
                exp,
                zech,
                order: order as u32,
            }),
        })))
    }

    /// The field with `q` elements.
    pub fn with_order(q: u64) -> Result<Fq> {
        if q < 3 {
            return Err(Error::invalid(format!("no odd-characteristic field of order {q}")));
        }
        let p = prime_factors(q)[0];
        let mut e = 0u32;
        let mut r = q;
        while r % p == 0 {
            r /= p;
            e += 1;
        }
        if r != 1 {
            return Err(Error::invalid(format!("{q} is not a prime power")));
        }
        Fq::new(p, e)
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.e
    }

    pub fn order(&self) -> u64 {
        self.0.q
    }

    /// Modulus defining the extension, ascending coefficients (monic).
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    /// A fixed generator of the multiplicative group.
    pub fn generator(&self) -> u64 {
        self.0.generator
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.e == 1
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> std::ops::Range<u64> {
        0..self.0.q
    }

    #[inline]
    pub fn zero(&self) -> u64 {
        0
    }

    #[inline]
    pub fn one(&self) -> u64 {
        1
    }

    /// Image of an integer in the prime subfield.
    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.0.p as i64) as u64
    }

    pub fn from_bigint(&self, a: &BigInt) -> u64 {
        let p = BigInt::from(self.0.p);
        a.mod_floor(&p).to_u64().expect("residue fits")
    }

    /// Digits of an element with respect to the power basis.
    pub fn digits(&self, a: u64) -> Vec<u64> {
        to_digits(a, self.0.p, self.0.e)
    }

    pub fn from_digit_slice(&self, d: &[u64]) -> u64 {
        let mut v = vec![0u64; self.0.e as usize];
        for (i, &c) in d.iter().enumerate() {
            v[i % self.0.e as usize] = c % self.0.p;
        }
        from_digits(&v, self.0.p)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        match &self.0.tables {
            None => {
                let s = a + b;
                if s >= self.0.p {
                    s - self.0.p
                } else {
                    s
                }
            }
            Some(t) => {
                if a == 0 {
                    return b;
                }
                if b == 0 {
                    return a;
                }
                let la = t.log[a as usize];
                let lb = t.log[b as usize];
                let d = if lb >= la { lb - la } else { lb + t.order - la };
                let z = t.zech[d as usize];
                if z == NONE {
                    0
                } else {
                    t.exp[(la + z) as usize] as u64
                }
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        match &self.0.tables {
            None => {
                if a == 0 {
                    0
                } else {
                    self.0.p - a
                }
            }
            Some(t) => {
                if a == 0 {
                    0
                } else {
                    t.exp[(t.log[a as usize] + t.order / 2) as usize] as u64
                }
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        match &self.0.tables {
            None => {
                if a >= b {
                    a - b
                } else {
                    a + self.0.p - b
                }
            }
            Some(_) => self.add(a, self.neg(b)),
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        match &self.0.tables {
            None => a * b % self.0.p,
            Some(t) => {
                if a == 0 || b == 0 {
                    0
                } else {
                    t.exp[(t.log[a as usize] + t.log[b as usize]) as usize] as u64
                }
            }
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        match &self.0.tables {
            None => mod_inv(a, self.0.p),
            Some(t) => {
                let l = t.log[a as usize];
                t.exp[((t.order - l) % t.order) as usize] as u64
            }
        }
    }

    pub fn div(&self, a: u64, b: u64) -> u64 {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: u64, n: u64) -> u64 {
        match &self.0.tables {
            None => pow_mod(a, n, self.0.p),
            Some(t) => {
                if a == 0 {
                    return if n == 0 { 1 } else { 0 };
                }
                let l = t.log[a as usize] as u128 * n as u128 % t.order as u128;
                t.exp[l as usize] as u64
            }
        }
    }

    /// Quadratic character: `1`, `-1`, or `0`.
    #[inline]
    pub fn chi(&self, a: u64) -> i32 {
        if a == 0 {
            return 0;
        }
        match &self.0.tables {
            None => jacobi(a, self.0.p),
            Some(t) => {
                if t.log[a as usize] % 2 == 0 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn square_class(&self, a: u64) -> SquareClass {
        SquareClass::from_sign(self.chi(a))
    }

    /// Square class by the defining criterion `a^((q-1)/2)`; slower than
    /// [`Fq::square_class`] and used to cross-check it.
    pub fn square_class_euler(&self, a: u64) -> SquareClass {
        if a == 0 {
            return SquareClass::Zero;
        }
        if self.pow(a, (self.0.q - 1) / 2) == 1 {
            SquareClass::Square
        } else {
            SquareClass::NonSquare
        }
    }

    /// A fixed representative of the given nonzero class.
    pub fn class_rep(&self, c: SquareClass) -> u64 {
        match c {
            SquareClass::Square => 1,
            SquareClass::NonSquare => self.0.generator,
            SquareClass::Zero => 0,
        }
    }

    /// Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: u64) -> u64 {
        self.pow(a, self.0.p)
    }

    /// Norm down to the prime field.
    pub fn norm_to_prime(&self, a: u64) -> u64 {
        let q = self.0.q;
        let p = self.0.p;
        self.pow(a, (q - 1) / (p - 1))
    }

    /// Embedding of `self` into `big` (requires `self.degree() | big.degree()`).
    ///
    /// Returns the full table `a -> image(a)`. The root of `self`'s modulus
    /// chosen in `big` is the one with least encoding.
    pub fn embedding_into(&self, big: &Fq) -> Result<Vec<u64>> {
        if self.0.p != big.0.p || big.0.e % self.0.e != 0 {
            return Err(Error::invalid(format!("{self} does not embed in {big}")));
        }
        let e = self.0.e as usize;
        let rho = if e == 1 {
            0
        } else {
            let m = &self.0.modulus;
            big.elements()
                .find(|&x| {
                    let mut acc = 0u64;
                    for &c in m.iter().rev() {
                        acc = big.add(big.mul(acc, x), c);
                    }
                    acc == 0
                })
                .expect("modulus has a root in the larger field")
        };
        let mut powers = vec![1u64; e];
        for i in 1..e {
            powers[i] = big.mul(powers[i - 1], rho);
        }
        Ok(self
            .elements()
            .map(|a| {
                let d = self.digits(a);
                d.iter()
                    .zip(&powers)
                    .fold(0u64, |acc, (&c, &w)| big.add(acc, big.mul(c, w)))
            })
            .collect())
    }

    pub fn bigint_class(&self, a: &BigInt) -> SquareClass {
        self.square_class(self.from_bigint(a))
    }

    /// Signed representative in `(-p/2, p/2]` for prime-field elements.
    pub fn signed_rep(&self, a: u64) -> i64 {
        let p = self.0.p;
        if self.0.e == 1 && a > p / 2 {
            a as i64 - p as i64
        } else {
            a as i64
        }
    }
}

pub(crate) fn pow_mod(mut a: u64, mut n: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        n >>= 1;
    }
    acc
}

fn jacobi(mut a: u64, mut n: u64) -> i32 {
    let mut t = 1;
    a %= n;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

fn least_irreducible(base: &Fq, e: usize) -> Vec<u64> {
    let p = base.order();
    let count = p.pow(e as u32);
    for code in 0..count {
        let mut c = to_digits(code, p, e as u32);
        c.push(1);
        let f = super::FqPoly::new(c.clone());
        if base.poly_is_irreducible(&f) {
            return c;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Square class of a nonzero rational number represented by an integer:
/// `Square` iff the integer is a perfect square.
pub fn is_perfect_square(a: &BigInt) -> bool {
    if a.is_negative() {
        return false;
    }
    let r = a.sqrt();
    &(&r * &r) == a
}
