//! Dense univariate polynomials over a finite field.

use std::fmt;

use serde::Serialize;

use super::field::Fq;

/// Polynomial over some `Fq`, ascending coefficients, no trailing zeros.
///
/// The field is not stored; every operation goes through an [`Fq`] method.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FqPoly {
    coeffs: Vec<u64>,
}

impl FqPoly {
    pub fn new(mut coeffs: Vec<u64>) -> FqPoly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FqPoly { coeffs }
    }

    pub fn zero() -> FqPoly {
        FqPoly { coeffs: Vec::new() }
    }

    pub fn one() -> FqPoly {
        FqPoly { coeffs: vec![1] }
    }

    /// The indeterminate.
    pub fn x() -> FqPoly {
        FqPoly { coeffs: vec![0, 1] }
    }

    pub fn constant(c: u64) -> FqPoly {
        FqPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == 1
    }

    /// Coefficients in reverse order, `T^deg f(1/T)` (trailing zeros of the
    /// input become a lower degree).
    pub fn reversed(&self) -> FqPoly {
        let mut c = self.coeffs.clone();
        c.reverse();
        FqPoly::new(c)
    }
}

impl fmt::Display for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl Fq {
    pub fn poly_from_i64(&self, c: &[i64]) -> FqPoly {
        FqPoly::new(c.iter().map(|&a| self.from_i64(a)).collect())
    }

    pub fn poly_add(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        let (long, short) = if a.coeffs.len() >= b.coeffs.len() {
            (a, b)
        } else {
            (b, a)
        };
        let mut c = long.coeffs.clone();
        for (i, &y) in short.coeffs.iter().enumerate() {
            c[i] = self.add(c[i], y);
        }
        FqPoly::new(c)
    }

    pub fn poly_neg(&self, a: &FqPoly) -> FqPoly {
        FqPoly::new(a.coeffs.iter().map(|&x| self.neg(x)).collect())
    }

    pub fn poly_sub(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        let n = a.coeffs.len().max(b.coeffs.len());
        let mut c = vec![0u64; n];
        for (i, slot) in c.iter_mut().enumerate() {
            *slot = self.sub(a.coeff(i), b.coeff(i));
        }
        FqPoly::new(c)
    }

    pub fn poly_scale(&self, a: &FqPoly, s: u64) -> FqPoly {
        FqPoly::new(a.coeffs.iter().map(|&x| self.mul(x, s)).collect())
    }

    pub fn poly_mul(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        if a.is_zero() || b.is_zero() {
            return FqPoly::zero();
        }
        let mut c = vec![0u64; a.coeffs.len() + b.coeffs.len() - 1];
        if self.is_prime_field() {
            // accumulate without reduction where it is safe to do so
            let p = self.order();
            if p < (1 << 20) && a.coeffs.len().min(b.coeffs.len()) < 1 << 20 {
                let mut acc = vec![0u64; c.len()];
                for (i, &x) in a.coeffs.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (j, &y) in b.coeffs.iter().enumerate() {
                        acc[i + j] += x * y;
                    }
                    if i % 1024 == 1023 {
                        for v in acc.iter_mut() {
                            *v %= p;
                        }
                    }
                }
                for (slot, v) in c.iter_mut().zip(acc) {
                    *slot = v % p;
                }
                return FqPoly::new(c);
            }
        }
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                c[i + j] = self.add(c[i + j], self.mul(x, y));
            }
        }
        FqPoly::new(c)
    }

    /// Quotient and remainder; panics if `b` is zero.
    pub fn poly_divrem(&self, a: &FqPoly, b: &FqPoly) -> (FqPoly, FqPoly) {
        let db = b.degree().expect("division by the zero polynomial");
        if a.coeffs.len() <= db {
            return (FqPoly::zero(), a.clone());
        }
        let inv = self.inv(b.lc());
        let mut r = a.coeffs.clone();
        let mut q = vec![0u64; r.len() - db];
        for k in (db..r.len()).rev() {
            let c = r[k];
            if c == 0 {
                continue;
            }
            let t = self.mul(c, inv);
            q[k - db] = t;
            for (i, &bc) in b.coeffs.iter().enumerate() {
                r[k - db + i] = self.sub(r[k - db + i], self.mul(t, bc));
            }
        }
        r.truncate(db);
        (FqPoly::new(q), FqPoly::new(r))
    }

    pub fn poly_rem(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        let db = b.degree().expect("division by the zero polynomial");
        if a.coeffs.len() <= db {
            return a.clone();
        }
        let mut r = a.coeffs.clone();
        self.rem_in_place(&mut r, b);
        FqPoly::new(r)
    }

    fn rem_in_place(&self, r: &mut Vec<u64>, b: &FqPoly) {
        let db = b.coeffs.len() - 1;
        let monic = b.lc() == 1;
        let inv = if monic { 1 } else { self.inv(b.lc()) };
        if self.is_prime_field() {
            let p = self.order();
            for k in (db..r.len()).rev() {
                let c = r[k] % p;
                if c == 0 {
                    continue;
                }
                let t = if monic { c } else { c * inv % p };
                let nt = p - t;
                for i in 0..db {
                    let idx = k - db + i;
                    r[idx] = (r[idx] + nt * b.coeffs[i]) % p;
                }
                r[k] = 0;
            }
        } else {
            for k in (db..r.len()).rev() {
                let c = r[k];
                if c == 0 {
                    continue;
                }
                let t = self.mul(c, inv);
                for i in 0..db {
                    let idx = k - db + i;
                    r[idx] = self.sub(r[idx], self.mul(t, b.coeffs[i]));
                }
                r[k] = 0;
            }
        }
        r.truncate(db);
        while r.last() == Some(&0) {
            r.pop();
        }
    }

    /// Exact quotient; panics (debug) if the division leaves a remainder.
    pub fn poly_div_exact(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        let (q, r) = self.poly_divrem(a, b);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// `(lc, a / lc)`; the zero polynomial maps to `(0, 0)`.
    pub fn poly_monic(&self, a: &FqPoly) -> (u64, FqPoly) {
        let lc = a.lc();
        if lc == 0 || lc == 1 {
            return (lc, a.clone());
        }
        let inv = self.inv(lc);
        (lc, self.poly_scale(a, inv))
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn poly_gcd(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let r = self.poly_rem(&x, &y);
            x = y;
            y = r;
        }
        self.poly_monic(&x).1
    }

    pub fn poly_eval(&self, a: &FqPoly, x: u64) -> u64 {
        a.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| self.add(self.mul(acc, x), c))
    }

    pub fn poly_derivative(&self, a: &FqPoly) -> FqPoly {
        if a.coeffs.len() <= 1 {
            return FqPoly::zero();
        }
        FqPoly::new(
            a.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| self.mul(self.from_i64(i as i64), c))
                .collect(),
        )
    }

    pub fn poly_mulmod(&self, a: &FqPoly, b: &FqPoly, m: &FqPoly) -> FqPoly {
        let mut prod = self.poly_mul(a, b).coeffs;
        if prod.len() >= m.coeffs.len() {
            self.rem_in_place(&mut prod, m);
        }
        FqPoly::new(prod)
    }

    pub fn poly_powmod(&self, a: &FqPoly, mut n: u64, m: &FqPoly) -> FqPoly {
        let mut acc = self.poly_rem(&FqPoly::one(), m);
        let mut base = self.poly_rem(a, m);
        while n > 0 {
            if n & 1 == 1 {
                acc = self.poly_mulmod(&acc, &base, m);
            }
            n >>= 1;
            if n > 0 {
                base = self.poly_mulmod(&base, &base, m);
            }
        }
        acc
    }

    pub fn poly_pow(&self, a: &FqPoly, n: u32) -> FqPoly {
        let mut acc = FqPoly::one();
        for _ in 0..n {
            acc = self.poly_mul(&acc, a);
        }
        acc
    }

    /// Composition `a(b)`.
    pub fn poly_compose(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        let mut acc = FqPoly::zero();
        for &c in a.coeffs.iter().rev() {
            acc = self.poly_add(&self.poly_mul(&acc, b), &FqPoly::constant(c));
        }
        acc
    }

    /// Matrix of the Frobenius `r -> r^q` on `F_q[x]/(m)`; row `i` is
    /// `x^(i q) mod m`.
    pub fn frobenius_matrix(&self, m: &FqPoly) -> Vec<FqPoly> {
        let n = m.deg();
        let xq = self.poly_powmod(&FqPoly::x(), self.order(), m);
        let mut rows = Vec::with_capacity(n);
        let mut cur = self.poly_rem(&FqPoly::one(), m);
        for _ in 0..n {
            rows.push(cur.clone());
            cur = self.poly_mulmod(&cur, &xq, m);
        }
        rows
    }

    /// Apply a Frobenius matrix from [`Fq::frobenius_matrix`] to `r mod m`.
    pub fn apply_frobenius(&self, rows: &[FqPoly], r: &FqPoly) -> FqPoly {
        let n = rows.len();
        let mut out = vec![0u64; n];
        if self.is_prime_field() && self.order() < (1 << 26) {
            let p = self.order();
            let mut acc = vec![0u64; n];
            for (i, &c) in r.coeffs.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (j, &v) in rows[i].coeffs.iter().enumerate() {
                    acc[j] += c * v % p;
                }
            }
            for (o, a) in out.iter_mut().zip(acc) {
                *o = a % p;
            }
        } else {
            for (i, &c) in r.coeffs.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (j, &v) in rows[i].coeffs.iter().enumerate() {
                    out[j] = self.add(out[j], self.mul(c, v));
                }
            }
        }
        FqPoly::new(out)
    }

    /// Resultant by the Euclidean algorithm.
    pub fn poly_resultant(&self, a: &FqPoly, b: &FqPoly) -> u64 {
        if a.is_zero() || b.is_zero() {
            return 0;
        }
        let mut f = a.clone();
        let mut g = b.clone();
        let mut acc = 1u64;
        loop {
            let df = f.deg();
            let dg = g.deg();
            if dg == 0 {
                return self.mul(acc, self.pow(g.lc(), df as u64));
            }
            if df == 0 {
                return self.mul(acc, self.pow(f.lc(), dg as u64));
            }
            let r = self.poly_rem(&f, &g);
            if r.is_zero() {
                return 0;
            }
            // res(f, g) = (-1)^{df dg} lc(g)^{df - dr} res(g, r)
            let dr = r.deg();
            if df % 2 == 1 && dg % 2 == 1 {
                acc = self.neg(acc);
            }
            acc = self.mul(acc, self.pow(g.lc(), (df - dr) as u64));
            f = g;
            g = r;
        }
    }

    /// `disc(f) = (-1)^{n(n-1)/2} Res(f, f') / lc(f)`.
    pub fn poly_discriminant(&self, f: &FqPoly) -> u64 {
        let n = f.deg();
        assert!(!f.is_zero(), "discriminant of the zero polynomial");
        if n == 0 {
            return 1;
        }
        let df = self.poly_derivative(f);
        if df.is_zero() {
            return 0;
        }
        // resultant with f' taken at its formal degree n - 1
        let r = self.mul(
            self.poly_resultant(f, &df),
            self.pow(f.lc(), (n - 1 - df.deg()) as u64),
        );
        let mut d = self.div(r, f.lc());
        if (n * (n - 1) / 2) % 2 == 1 {
            d = self.neg(d);
        }
        d
    }

    pub fn poly_is_squarefree(&self, f: &FqPoly) -> bool {
        if f.deg() == 0 {
            return !f.is_zero();
        }
        let d = self.poly_derivative(f);
        !d.is_zero() && self.poly_gcd(f, &d).is_one()
    }
}
