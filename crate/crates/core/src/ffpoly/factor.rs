//! Factorization over finite fields: squarefree split, distinct-degree
//! factorization, then Cantor–Zassenhaus equal-degree splitting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::field::Fq;
use super::poly::FqPoly;
use crate::error::{Error, Result};

/// Default seed for the equal-degree splitting step.
pub const DEFAULT_SEED: u64 = 0x5eed_f00d;

/// `unit * prod(factor^mult)`, factors monic irreducible and sorted by
/// degree, then by coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub unit: u64,
    pub factors: Vec<(FqPoly, u32)>,
}

impl Factorization {
    pub fn product(&self, fq: &Fq) -> FqPoly {
        let mut acc = FqPoly::constant(self.unit);
        for (g, m) in &self.factors {
            acc = fq.poly_mul(&acc, &fq.poly_pow(g, *m));
        }
        acc
    }

    /// Degrees of the irreducible factors, repeated by multiplicity.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self
            .factors
            .iter()
            .flat_map(|(g, m)| std::iter::repeat(g.deg()).take(*m as usize))
            .collect();
        d.sort_unstable();
        d
    }

    pub fn count(&self) -> usize {
        self.factors.iter().map(|(_, m)| *m as usize).sum()
    }
}

fn pth_root(fq: &Fq, f: &FqPoly) -> FqPoly {
    let p = fq.characteristic() as usize;
    let e = fq.degree();
    // a^(1/p) = a^(p^(e-1))
    let exp = fq.characteristic().pow(e - 1);
    FqPoly::new(
        f.coeffs()
            .iter()
            .step_by(p)
            .map(|&c| fq.pow(c, exp))
            .collect(),
    )
}

/// Squarefree decomposition of a monic polynomial: pairwise coprime
/// squarefree parts with multiplicities.
pub fn squarefree_decomposition(fq: &Fq, f: &FqPoly) -> Vec<(FqPoly, u32)> {
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let d = fq.poly_derivative(f);
    if d.is_zero() {
        let p = fq.characteristic() as u32;
        for (g, m) in squarefree_decomposition(fq, &pth_root(fq, f)) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = fq.poly_gcd(f, &d);
    let mut w = fq.poly_div_exact(f, &c);
    let mut i = 1u32;
    while w.deg() > 0 {
        let y = fq.poly_gcd(&w, &c);
        let z = fq.poly_div_exact(&w, &y);
        if z.deg() > 0 {
            out.push((z, i));
        }
        i += 1;
        c = fq.poly_div_exact(&c, &y);
        w = y;
    }
    if c.deg() > 0 {
        let p = fq.characteristic() as u32;
        for (g, m) in squarefree_decomposition(fq, &pth_root(fq, &c)) {
            out.push((g, m * p));
        }
    }
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// `(d, product of all irreducible factors of degree d)`.
pub fn distinct_degree(fq: &Fq, f: &FqPoly) -> Vec<(usize, FqPoly)> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    if f.deg() == 0 {
        return out;
    }
    let frob = fq.frobenius_matrix(f);
    let x = fq.poly_rem(&FqPoly::x(), f);
    let mut h = x.clone();
    let mut d = 0usize;
    while rest.deg() >= 2 * (d + 1) {
        d += 1;
        h = fq.apply_frobenius(&frob, &h);
        let t = fq.poly_sub(&fq.poly_rem(&h, &rest), &fq.poly_rem(&x, &rest));
        let g = fq.poly_gcd(&rest, &t);
        if g.deg() > 0 {
            rest = fq.poly_div_exact(&rest, &g);
            out.push((d, g));
        }
    }
    if rest.deg() > 0 {
        out.push((rest.deg(), rest));
    }
    out
}

/// Degrees of the irreducible factors of a squarefree polynomial, sorted.
/// Uses only distinct-degree factorization (no randomness).
pub fn squarefree_factor_degrees(fq: &Fq, f: &FqPoly) -> Vec<usize> {
    let (_, m) = fq.poly_monic(f);
    let mut out = Vec::new();
    for (d, g) in distinct_degree(fq, &m) {
        for _ in 0..g.deg() / d {
            out.push(d);
        }
    }
    out.sort_unstable();
    out
}

fn random_poly(fq: &Fq, deg_below: usize, rng: &mut ChaCha8Rng) -> FqPoly {
    FqPoly::new((0..deg_below).map(|_| rng.gen_range(0..fq.order())).collect())
}

/// Split a monic squarefree product of irreducibles of degree `d`.
pub fn equal_degree(fq: &Fq, g: &FqPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FqPoly> {
    let n = g.deg();
    if n == d {
        return vec![g.clone()];
    }
    let half = (fq.order() - 1) / 2;
    loop {
        let a = random_poly(fq, n, rng);
        if a.deg() == 0 {
            continue;
        }
        let u0 = fq.poly_gcd(g, &a);
        let u = if u0.deg() > 0 {
            u0
        } else {
            // a^((q^d - 1)/2) = (a^(1 + q + ... + q^(d-1)))^((q-1)/2)
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                t = fq.poly_powmod(&t, fq.order(), g);
                acc = fq.poly_mulmod(&acc, &t, g);
            }
            let b = fq.poly_powmod(&acc, half, g);
            fq.poly_gcd(g, &fq.poly_sub(&b, &FqPoly::one()))
        };
        if u.deg() > 0 && u.deg() < n {
            let v = fq.poly_div_exact(g, &u);
            let mut out = equal_degree(fq, &u, d, rng);
            out.extend(equal_degree(fq, &v, d, rng));
            return out;
        }
    }
}

/// Complete factorization with an explicit seed for the randomized step.
pub fn factor_seeded(fq: &Fq, f: &FqPoly, seed: u64) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (unit, monic) = fq.poly_monic(f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Vec::new();
    for (part, mult) in squarefree_decomposition(fq, &monic) {
        for (d, g) in distinct_degree(fq, &part) {
            for h in equal_degree(fq, &g, d, &mut rng) {
                factors.push((h, mult));
            }
        }
    }
    factors.sort_by(|a, b| (a.0.deg(), &a.0).cmp(&(b.0.deg(), &b.0)));
    Ok(Factorization { unit, factors })
}

/// Complete factorization with the default seed.
pub fn factor(fq: &Fq, f: &FqPoly) -> Result<Factorization> {
    factor_seeded(fq, f, DEFAULT_SEED)
}

/// Irreducibility test; constants are rejected.
pub fn is_irreducible(fq: &Fq, f: &FqPoly) -> Result<bool> {
    if f.deg() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    Ok(fq.poly_is_irreducible(f))
}

impl Fq {
    /// Ben-Or test: no irreducible factor of degree at most `deg/2`.
    pub fn poly_is_irreducible(&self, f: &FqPoly) -> bool {
        let n = f.deg();
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let (_, m) = self.poly_monic(f);
        let frob = self.frobenius_matrix(&m);
        let x = self.poly_rem(&FqPoly::x(), &m);
        let mut h = x.clone();
        for _ in 1..=n / 2 {
            h = self.apply_frobenius(&frob, &h);
            if !self.poly_gcd(&m, &self.poly_sub(&h, &x)).is_one() {
                return false;
            }
        }
        true
    }
}
