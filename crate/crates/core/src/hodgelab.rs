//! Primitive Hodge numbers of smooth hypersurfaces, the middle degree `N`,
//! the signature congruence and the quadratic field `K`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffpoly::{is_perfect_square, squarefree_part};
use crate::galclass::KField;

/// Truncated series in `y, z`: `c[p][q]` for `p + q ≤ deg`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Series2 {
    deg: usize,
    c: Vec<Vec<BigInt>>,
}

impl Series2 {
    fn zero(deg: usize) -> Series2 {
        Series2 {
            deg,
            c: (0..=deg).map(|p| vec![BigInt::zero(); deg + 1 - p]).collect(),
        }
    }

    fn get(&self, p: usize, q: usize) -> BigInt {
        if p + q <= self.deg {
            self.c[p][q].clone()
        } else {
            BigInt::zero()
        }
    }

    fn from_fn(deg: usize, f: impl Fn(usize, usize) -> BigInt) -> Series2 {
        let mut s = Series2::zero(deg);
        for p in 0..=deg {
            for q in 0..=deg - p {
                s.c[p][q] = f(p, q);
            }
        }
        s
    }

    fn mul(&self, o: &Series2) -> Series2 {
        let deg = self.deg.min(o.deg);
        let mut s = Series2::zero(deg);
        for p1 in 0..=deg {
            for q1 in 0..=deg - p1 {
                let a = &self.c[p1][q1];
                if a.is_zero() {
                    continue;
                }
                for p2 in 0..=deg - p1 - q1 {
                    for q2 in 0..=deg - p1 - q1 - p2 {
                        s.c[p1 + p2][q1 + q2] += a * &o.c[p2][q2];
                    }
                }
            }
        }
        s
    }

    fn sub(&self, o: &Series2) -> Series2 {
        let deg = self.deg.min(o.deg);
        Series2::from_fn(deg, |p, q| self.get(p, q) - o.get(p, q))
    }

    /// Inverse of a series with constant term 1, by `s·t = 1` degree by degree.
    fn inverse(&self) -> Result<Series2> {
        if !self.c[0][0].is_one() {
            return Err(Error::Inconsistent("series constant term is not 1".into()));
        }
        let deg = self.deg;
        let mut t = Series2::zero(deg);
        t.c[0][0] = BigInt::one();
        for m in 1..=deg {
            for p in 0..=m {
                let q = m - p;
                let mut acc = BigInt::zero();
                for p1 in 0..=p {
                    for q1 in 0..=q {
                        if p1 + q1 == 0 {
                            continue;
                        }
                        acc += &self.c[p1][q1] * &t.c[p - p1][q - q1];
                    }
                }
                t.c[p][q] = -acc;
            }
        }
        Ok(t)
    }
}

fn binom(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// Coefficients `[p][q]` of a polynomial in `y, z` of total degree ≤ `deg`.
type Poly2 = Vec<Vec<BigInt>>;

fn poly2(deg: usize) -> Poly2 {
    vec![vec![BigInt::zero(); deg + 1]; deg + 1]
}

/// `P / (y - z)` exactly, one homogeneous part at a time.
fn div_y_minus_z(p: &Poly2, deg: usize) -> Result<Poly2> {
    let mut out = poly2(deg);
    for m in 0..=deg {
        // a_i: coefficient of y^i z^{m-i}
        let a: Vec<BigInt> = (0..=m).map(|i| p[i][m - i].clone()).collect();
        if m == 0 {
            if !a[0].is_zero() {
                return Err(Error::Inconsistent("not divisible by y - z".into()));
            }
            continue;
        }
        let mut b = vec![BigInt::zero(); m];
        let mut prev = BigInt::zero();
        for i in 0..m {
            b[i] = &prev - &a[i];
            prev = b[i].clone();
        }
        if prev != a[m] {
            return Err(Error::Inconsistent("not divisible by y - z".into()));
        }
        for (i, bi) in b.into_iter().enumerate() {
            out[i][m - 1 - i] = bi;
        }
    }
    Ok(out)
}

fn to_series(p: &Poly2, deg: usize) -> Series2 {
    Series2::from_fn(deg, |a, b| {
        p.get(a).and_then(|r| r.get(b)).cloned().unwrap_or_default()
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HodgeTable {
    pub n: usize,
    pub d: usize,
    /// `h°_{p, n-p}` for `p = 0..=n`.
    #[serde(serialize_with = "crate::ser::bigints")]
    pub hodge: Vec<BigInt>,
    #[serde(rename = "N", serialize_with = "crate::ser::bigint")]
    pub big_n: BigInt,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub b_plus: BigInt,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub b_minus: BigInt,
    #[serde(serialize_with = "crate::ser::bigint")]
    pub signature: BigInt,
}

fn check_nd(n: usize, d: usize) -> Result<()> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::invalid("n must be even and at least 2"));
    }
    if d < 3 {
        return Err(Error::invalid("d must be at least 3"));
    }
    Ok(())
}

/// `N = (d-1)((d-1)^{n+1} + 1) / d`.
pub fn middle_degree(n: usize, d: usize) -> Result<BigInt> {
    if d < 2 {
        return Err(Error::invalid("d must be at least 2"));
    }
    let e = BigInt::from(d - 1);
    let num = &e * (num_traits::pow(e.clone(), n + 1) + 1u32);
    let (q, r) = num.div_rem(&BigInt::from(d));
    if !r.is_zero() {
        return Err(Error::Inconsistent(format!("N is not an integer for n={n}, d={d}")));
    }
    Ok(q)
}

/// All `h°_{p,q}` with `p + q ≤ deg` from the generating series.
fn hodge_series(d: usize, deg: usize) -> Result<Series2> {
    // the quotient's numerator and denominator have degree ≤ d + 1 before dividing
    let full = d + 1;
    let mut num = poly2(full);
    let mut den = poly2(full);
    for i in 0..=d {
        let c = binom(d, i);
        num[i][0] += &c;
        num[0][i] -= &c;
        // (1+z)^d y - (1+y)^d z
        den[1][i] += &c;
        den[i][1] -= &c;
    }
    let num = to_series(&div_y_minus_z(&num, full)?, deg);
    let den = to_series(&div_y_minus_z(&den, full)?, deg);
    let ratio = num.mul(&den.inverse()?);
    let one = Series2::from_fn(deg, |p, q| if p + q == 0 { BigInt::one() } else { BigInt::zero() });
    let alt = |p: usize| if p % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    // 1/((1+y)(1+z)) = Σ (-y)^a (-z)^b
    let geo = Series2::from_fn(deg, |p, q| alt(p) * alt(q));
    Ok(geo.mul(&ratio.sub(&one)))
}

/// `Σ_{p+q=m} (-1)^p h°_{p,q}` from `(α/β - 1)/(1 - x^2)`.
fn alternating_sum(d: usize, m: usize) -> Result<BigInt> {
    let alpha: Vec<BigInt> = (0..=m)
        .map(|i| if i % 2 == 0 { binom(d, i + 1) } else { BigInt::zero() })
        .collect();
    let beta: Vec<BigInt> = (0..=m)
        .map(|i| if i % 2 == 0 { binom(d, i) } else { BigInt::zero() })
        .collect();
    let mut inv = vec![BigInt::zero(); m + 1];
    inv[0] = BigInt::one();
    for k in 1..=m {
        let mut acc = BigInt::zero();
        for j in 1..=k {
            acc += &beta[j] * &inv[k - j];
        }
        inv[k] = -acc;
    }
    let mut ratio = vec![BigInt::zero(); m + 1];
    for i in 0..=m {
        for j in 0..=m - i {
            ratio[i + j] += &alpha[i] * &inv[j];
        }
    }
    ratio[0] -= 1;
    // divide by 1 - x^2
    let mut out = BigInt::zero();
    let mut k = m as i64;
    while k >= 0 {
        out += &ratio[k as usize];
        k -= 2;
    }
    Ok(out)
}

pub fn primitive_hodge(n: usize, d: usize) -> Result<HodgeTable> {
    check_nd(n, d)?;
    let s = hodge_series(d, n)?;
    let hodge: Vec<BigInt> = (0..=n).map(|p| s.get(p, n - p)).collect();
    let big_n = middle_degree(n, d)?;
    let total: BigInt = hodge.iter().sum();
    if total != big_n {
        return Err(Error::Inconsistent(format!("Σ h° = {total}, N = {big_n}")));
    }
    let alt: BigInt = hodge
        .iter()
        .enumerate()
        .map(|(p, h)| if p % 2 == 0 { h.clone() } else { -h.clone() })
        .sum();
    if alt != alternating_sum(d, n)? {
        return Err(Error::Inconsistent("alternating sum disagrees with the x-series".into()));
    }
    // Hodge index: Σ_{p+q=n} (-1)^p h^{p,q} + 1 - (-1)^{n/2}, with h = h° + δ
    let mid_sign = if (n / 2) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    let signature = &alt + &mid_sign + BigInt::one() - &mid_sign;
    let dim = &big_n + 1u32;
    let two_plus = &dim + &signature;
    if two_plus.is_odd() {
        return Err(Error::Inconsistent("b+ + b- and b+ - b- differ in parity".into()));
    }
    let b_plus: BigInt = two_plus / 2;
    let b_minus = &dim - &b_plus;
    Ok(HodgeTable {
        n,
        d,
        hodge,
        big_n,
        b_plus,
        b_minus,
        signature,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignatureCheck {
    #[serde(serialize_with = "crate::ser::bigint")]
    pub signature: BigInt,
    pub d: usize,
    pub pass: bool,
    /// `2 b_- ≡ 0 mod 4`.
    pub b_minus_even: bool,
}

/// `b_+ - b_- ≡ d (mod 4)`, for odd `d`.
pub fn signature_congruence(n: usize, d: usize) -> Result<SignatureCheck> {
    if d % 2 == 0 {
        return Err(Error::invalid("the congruence is stated for odd d"));
    }
    let t = primitive_hodge(n, d)?;
    let pass = (&t.signature - BigInt::from(d)).mod_floor(&BigInt::from(4)).is_zero();
    Ok(SignatureCheck {
        signature: t.signature,
        d,
        pass,
        b_minus_even: t.b_minus.is_even(),
    })
}

/// `K = Q(√((-1)^{(d-1)/2} d))` for odd `d`.
pub fn k_field_hypersurface(d: usize) -> Result<KField> {
    if d % 2 == 0 || d < 3 {
        return Err(Error::invalid("d must be odd and at least 3"));
    }
    let mut radicand = BigInt::from(d);
    if ((d - 1) / 2) % 2 == 1 {
        radicand = -radicand;
    }
    let (sf, complete) = squarefree_part(&radicand, 1_000_000);
    let is_rational = !radicand.is_negative() && is_perfect_square(&radicand);
    Ok(KField {
        radicand,
        is_rational,
        squarefree: sf,
        partially_factored: !complete,
        disc_class_agrees: None,
    })
}
