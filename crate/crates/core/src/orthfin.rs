//! Orthogonal spaces over finite fields of odd characteristic: spinor norms,
//! the four cosets of `Ω(V)`, brute-force enumeration of `O(V)`, exact
//! conjugacy-class proportions and the class densities `|C_i(κ)|/|κ|`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffpoly::{factor, Fq, FqPoly, SquareClass};
use crate::recpoly::{classify_h, from_trace_form_fq, monic_polys, to_trace_form_fq, ClassIndex};

/// Orthogonal space with a diagonal Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthSpace {
    fq: Fq,
    gram: Vec<u64>,
}

/// An element of `O(V)`, row-major `N x N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrthElem {
    pub n: usize,
    pub matrix: Vec<u64>,
}

/// `(det, spin)` label of a coset of `Ω(V)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CosetLabel {
    pub det: i32,
    pub spin: SquareClass,
}

impl CosetLabel {
    pub fn all() -> [CosetLabel; 4] {
        let (s, n) = (SquareClass::Square, SquareClass::NonSquare);
        [
            CosetLabel { det: 1, spin: s },
            CosetLabel { det: 1, spin: n },
            CosetLabel { det: -1, spin: s },
            CosetLabel { det: -1, spin: n },
        ]
    }
}

impl OrthElem {
    pub fn identity(n: usize) -> OrthElem {
        let mut m = vec![0; n * n];
        for i in 0..n {
            m[i * n + i] = 1;
        }
        OrthElem { n, matrix: m }
    }

    pub fn at(&self, i: usize, j: usize) -> u64 {
        self.matrix[i * self.n + j]
    }
}

impl OrthSpace {
    /// Canonical space `diag(1, …, 1, d)` with `class(d) = disc`.
    pub fn new(fq: &Fq, n: usize, disc: SquareClass) -> Result<OrthSpace> {
        if n == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if disc == SquareClass::Zero {
            return Err(Error::invalid("discriminant must be nonzero"));
        }
        let mut gram = vec![1u64; n];
        gram[n - 1] = fq.class_rep(disc);
        Ok(OrthSpace { fq: fq.clone(), gram })
    }

    /// Even-dimensional space, split or not.
    pub fn with_split(fq: &Fq, n: usize, split: bool) -> Result<OrthSpace> {
        if n % 2 == 1 {
            return Err(Error::invalid("split/non-split needs even dimension"));
        }
        let c = fq.square_class(fq.from_i64(if (n / 2) % 2 == 0 { 1 } else { -1 }));
        let disc = if split { c } else { c.mul(SquareClass::NonSquare) };
        OrthSpace::new(fq, n, disc)
    }

    pub fn with_gram(fq: &Fq, gram: Vec<u64>) -> Result<OrthSpace> {
        if gram.is_empty() || gram.iter().any(|&g| g == 0 || g >= fq.order()) {
            return Err(Error::invalid("Gram diagonal must be nonzero field elements"));
        }
        Ok(OrthSpace { fq: fq.clone(), gram })
    }

    pub fn field(&self) -> &Fq {
        &self.fq
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn q(&self) -> u64 {
        self.fq.order()
    }

    pub fn gram(&self) -> &[u64] {
        &self.gram
    }

    pub fn disc(&self) -> SquareClass {
        let p = self.gram.iter().fold(1, |a, &g| self.fq.mul(a, g));
        self.fq.square_class(p)
    }

    /// For even `N`: `disc(V) = class((-1)^{N/2})`.
    pub fn is_split(&self) -> Option<bool> {
        let n = self.dim();
        if n % 2 == 1 {
            return None;
        }
        let c = self
            .fq
            .square_class(self.fq.from_i64(if (n / 2) % 2 == 0 { 1 } else { -1 }));
        Some(self.disc() == c)
    }

    /// `⟨v, v⟩`.
    pub fn norm(&self, v: &[u64]) -> u64 {
        let f = &self.fq;
        v.iter()
            .zip(&self.gram)
            .fold(0, |a, (&x, &g)| f.add(a, f.mul(g, f.mul(x, x))))
    }

    pub fn pair(&self, u: &[u64], v: &[u64]) -> u64 {
        let f = &self.fq;
        (0..self.dim()).fold(0, |a, i| f.add(a, f.mul(self.gram[i], f.mul(u[i], v[i]))))
    }

    /// `|O(V)|` from the classical formulas.
    pub fn group_order(&self) -> BigInt {
        let q = BigInt::from(self.q());
        let n = self.dim();
        if n == 1 {
            return BigInt::from(2);
        }
        let m = n / 2;
        let mut o = BigInt::from(2);
        if n % 2 == 1 {
            o *= q.pow((m * m) as u32);
            for i in 1..=m {
                o *= q.pow(2 * i as u32) - 1;
            }
        } else {
            let eta = if self.is_split() == Some(true) { 1 } else { -1 };
            o *= q.pow((m * (m - 1)) as u32);
            o *= q.pow(m as u32) - eta;
            for i in 1..m {
                o *= q.pow(2 * i as u32) - 1;
            }
        }
        o
    }

    /// Reflection `x ↦ x - 2⟨x,v⟩/⟨v,v⟩ v`.
    pub fn reflection(&self, v: &[u64]) -> Result<OrthElem> {
        let f = &self.fq;
        let qv = self.norm(v);
        if qv == 0 {
            return Err(Error::invalid("isotropic vector"));
        }
        let n = self.dim();
        let c = f.div(2, qv);
        let mut m = OrthElem::identity(n).matrix;
        for i in 0..n {
            for j in 0..n {
                // column j is r(e_j) = e_j - c g_j v_j v
                let t = f.mul(c, f.mul(self.gram[j], f.mul(v[j], v[i])));
                m[i * n + j] = f.sub(m[i * n + j], t);
            }
        }
        Ok(OrthElem { n, matrix: m })
    }

    pub fn mul(&self, a: &OrthElem, b: &OrthElem) -> OrthElem {
        let f = &self.fq;
        let n = a.n;
        let mut m = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let x = a.matrix[i * n + k];
                if x == 0 {
                    continue;
                }
                for j in 0..n {
                    m[i * n + j] = f.add(m[i * n + j], f.mul(x, b.matrix[k * n + j]));
                }
            }
        }
        OrthElem { n, matrix: m }
    }

    pub fn apply(&self, a: &OrthElem, v: &[u64]) -> Vec<u64> {
        let f = &self.fq;
        let n = a.n;
        (0..n)
            .map(|i| (0..n).fold(0, |s, j| f.add(s, f.mul(a.matrix[i * n + j], v[j]))))
            .collect()
    }

    /// `AᵀGA = G`.
    pub fn is_orthogonal(&self, a: &OrthElem) -> bool {
        let n = self.dim();
        if a.n != n || a.matrix.len() != n * n {
            return false;
        }
        let col = |j: usize| -> Vec<u64> { (0..n).map(|i| a.at(i, j)).collect() };
        let cols: Vec<Vec<u64>> = (0..n).map(col).collect();
        for i in 0..n {
            for j in i..n {
                let expect = if i == j { self.gram[i] } else { 0 };
                if self.pair(&cols[i], &cols[j]) != expect {
                    return false;
                }
            }
        }
        true
    }

    pub fn det(&self, a: &OrthElem) -> u64 {
        det_fq(&self.fq, a.n, a.matrix.clone())
    }

    pub fn det_sign(&self, a: &OrthElem) -> i32 {
        if self.det(a) == 1 {
            1
        } else {
            -1
        }
    }

    /// Norm classes of a reflection factorization of `A` (Cartan–Dieudonné
    /// along the orthogonal basis).
    pub fn reflection_norms(&self, a: &OrthElem) -> Vec<u64> {
        let f = &self.fq;
        let n = self.dim();
        let mut m = a.clone();
        let mut norms = Vec::new();
        for k in 0..n {
            let mut x = vec![0u64; n];
            x[k] = 1;
            let y: Vec<u64> = (0..n).map(|i| m.at(i, k)).collect();
            if y == x {
                continue;
            }
            let d: Vec<u64> = x.iter().zip(&y).map(|(&s, &t)| f.sub(s, t)).collect();
            let qd = self.norm(&d);
            if qd != 0 {
                m = self.mul(&self.reflection(&d).unwrap(), &m);
                norms.push(qd);
            } else {
                let s: Vec<u64> = x.iter().zip(&y).map(|(&s, &t)| f.add(s, t)).collect();
                let qs = self.norm(&s);
                m = self.mul(&self.reflection(&s).unwrap(), &m);
                m = self.mul(&self.reflection(&x).unwrap(), &m);
                norms.push(qs);
                norms.push(self.gram[k]);
            }
        }
        debug_assert_eq!(m, OrthElem::identity(n));
        norms
    }

    /// Spinor norm by reflection factorization.
    pub fn spinor_norm_reflections(&self, a: &OrthElem) -> SquareClass {
        let p = self
            .reflection_norms(a)
            .iter()
            .fold(1, |acc, &x| self.fq.mul(acc, x));
        self.fq.square_class(p)
    }

    /// `class(2^N det(I + A))` when `det(I + A) ≠ 0`.
    pub fn spinor_norm_zassenhaus(&self, a: &OrthElem) -> Option<SquareClass> {
        let f = &self.fq;
        let n = a.n;
        let mut m = a.matrix.clone();
        for i in 0..n {
            m[i * n + i] = f.add(m[i * n + i], 1);
        }
        let d = det_fq(f, n, m);
        if d == 0 {
            return None;
        }
        Some(f.square_class(f.mul(f.pow(2, n as u64), d)))
    }

    pub fn spinor_norm(&self, a: &OrthElem) -> SquareClass {
        match self.spinor_norm_zassenhaus(a) {
            Some(c) => c,
            None => self.spinor_norm_reflections(a),
        }
    }

    pub fn coset_label(&self, a: &OrthElem) -> CosetLabel {
        CosetLabel {
            det: self.det_sign(a),
            spin: self.spinor_norm(a),
        }
    }

    /// `P(T) = det(I - AT)`.
    pub fn char_poly(&self, a: &OrthElem) -> FqPoly {
        charpoly_fq(&self.fq, a.n, &a.matrix).reversed_full(a.n)
    }

    fn random_anisotropic(&self, rng: &mut ChaCha8Rng, class: Option<SquareClass>) -> Vec<u64> {
        let q = self.q();
        loop {
            let v: Vec<u64> = (0..self.dim()).map(|_| rng.gen_range(0..q)).collect();
            let c = self.fq.square_class(self.norm(&v));
            if c != SquareClass::Zero && class.map_or(true, |k| k == c) {
                return v;
            }
        }
    }

    /// Product of `4N` seeded random reflections, optionally corrected into
    /// the requested coset.
    pub fn random_element(&self, seed: u64, label: Option<CosetLabel>) -> Result<OrthElem> {
        let n = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = OrthElem::identity(n);
        for _ in 0..4 * n {
            let v = self.random_anisotropic(&mut rng, None);
            a = self.mul(&a, &self.reflection(&v)?);
        }
        let Some(want) = label else {
            return Ok(a);
        };
        if want.spin == SquareClass::Zero || want.det.abs() != 1 {
            return Err(Error::invalid("coset label needs det ±1 and a nonzero class"));
        }
        if n == 1 {
            let m = match (want.det, want.spin) {
                (1, SquareClass::Square) => 1,
                (-1, c) if c == self.disc() => self.fq.neg(1),
                _ => return Err(Error::invalid("coset label not realised in dimension 1")),
            };
            return Ok(OrthElem { n, matrix: vec![m] });
        }
        let have = self.coset_label(&a);
        let ratio = have.spin.mul(want.spin);
        if have.det != want.det {
            let v = self.random_anisotropic(&mut rng, Some(ratio));
            a = self.mul(&a, &self.reflection(&v)?);
        } else if ratio == SquareClass::NonSquare {
            let u = self.random_anisotropic(&mut rng, Some(SquareClass::Square));
            let w = self.random_anisotropic(&mut rng, Some(SquareClass::NonSquare));
            a = self.mul(&a, &self.reflection(&u)?);
            a = self.mul(&a, &self.reflection(&w)?);
        }
        Ok(a)
    }
}

trait ReverseFull {
    fn reversed_full(&self, n: usize) -> FqPoly;
}

impl ReverseFull for FqPoly {
    fn reversed_full(&self, n: usize) -> FqPoly {
        let mut c = self.coeffs().to_vec();
        c.resize(n + 1, 0);
        c.reverse();
        FqPoly::new(c)
    }
}

/// Determinant by Gaussian elimination.
pub fn det_fq(f: &Fq, n: usize, mut m: Vec<u64>) -> u64 {
    let mut det = 1u64;
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| m[r * n + c] != 0) else {
            return 0;
        };
        if p != c {
            for j in 0..n {
                m.swap(p * n + j, c * n + j);
            }
            det = f.neg(det);
        }
        let piv = m[c * n + c];
        det = f.mul(det, piv);
        let inv = f.inv(piv);
        for r in c + 1..n {
            let t = f.mul(m[r * n + c], inv);
            if t == 0 {
                continue;
            }
            for j in c..n {
                m[r * n + j] = f.sub(m[r * n + j], f.mul(t, m[c * n + j]));
            }
        }
    }
    det
}

/// Characteristic polynomial `det(xI - A)` via Hessenberg reduction.
pub fn charpoly_fq(f: &Fq, n: usize, a: &[u64]) -> FqPoly {
    let mut h = a.to_vec();
    let idx = |i: usize, j: usize| i * n + j;
    for c in 0..n.saturating_sub(2) {
        let Some(p) = (c + 1..n).find(|&r| h[idx(r, c)] != 0) else {
            continue;
        };
        if p != c + 1 {
            for j in 0..n {
                h.swap(idx(p, j), idx(c + 1, j));
            }
            for i in 0..n {
                h.swap(idx(i, p), idx(i, c + 1));
            }
        }
        let inv = f.inv(h[idx(c + 1, c)]);
        for r in c + 2..n {
            let t = f.mul(h[idx(r, c)], inv);
            if t == 0 {
                continue;
            }
            for j in 0..n {
                let v = f.sub(h[idx(r, j)], f.mul(t, h[idx(c + 1, j)]));
                h[idx(r, j)] = v;
            }
            for i in 0..n {
                let v = f.add(h[idx(i, c + 1)], f.mul(t, h[idx(i, r)]));
                h[idx(i, c + 1)] = v;
            }
        }
    }
    // p_k = (x - h_kk) p_{k-1} - sum_{i<k} h_ik (prod_{j=i+1}^{k} h_{j,j-1}) p_{i-1}
    let mut ps: Vec<FqPoly> = vec![FqPoly::one()];
    for k in 0..n {
        let lin = FqPoly::new(vec![f.neg(h[idx(k, k)]), 1]);
        let mut pk = f.poly_mul(&lin, &ps[k]);
        let mut prod = 1u64;
        for i in (0..k).rev() {
            prod = f.mul(prod, h[idx(i + 1, i)]);
            if prod == 0 {
                break;
            }
            let coef = f.mul(h[idx(i, k)], prod);
            pk = f.poly_sub(&pk, &f.poly_scale(&ps[i], coef));
        }
        ps.push(pk);
    }
    ps.pop().unwrap()
}

/// Default budget on `|O(V)|` for [`enumerate_o`].
pub const ENUM_BUDGET: u64 = 2_000_000;

/// All elements of `O(V)`, stored flat.
#[derive(Clone, Debug)]
pub struct GroupTable {
    pub n: usize,
    data: Vec<u64>,
}

impl GroupTable {
    pub fn len(&self) -> usize {
        self.data.len() / (self.n * self.n).max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn matrix(&self, i: usize) -> &[u64] {
        let s = self.n * self.n;
        &self.data[i * s..(i + 1) * s]
    }

    pub fn element(&self, i: usize) -> OrthElem {
        OrthElem {
            n: self.n,
            matrix: self.matrix(i).to_vec(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = OrthElem> + '_ {
        (0..self.len()).map(|i| self.element(i))
    }
}

fn pack(m: &[u64], bits: u32) -> u128 {
    m.iter().fold(0u128, |k, &x| (k << bits) | x as u128)
}

/// Right multiplication by a reflection as a rank-one update:
/// `A r_v = A - (A v)(w^T)` with `w = 2/⟨v,v⟩ G v`.
struct Mult<'a> {
    f: &'a Fq,
    n: usize,
    qs: usize,
    bits: u32,
    tables: Option<(Vec<u16>, Vec<u16>, Vec<u16>)>,
}

impl Mult<'_> {
    fn apply(&self, a: &[u64], v: &[u64], w: &[u64], b: &mut [u64]) -> u128 {
        let (n, qs) = (self.n, self.qs);
        let mut av = [0u64; 8];
        let mut key = 0u128;
        if let Some((add, mul, neg)) = &self.tables {
            for i in 0..n {
                let mut s = 0usize;
                for j in 0..n {
                    let t = mul[a[i * n + j] as usize * qs + v[j] as usize] as usize;
                    s = add[s * qs + t] as usize;
                }
                av[i] = s as u64;
            }
            for i in 0..n {
                let row = av[i] as usize * qs;
                for j in 0..n {
                    let t = neg[mul[row + w[j] as usize] as usize] as usize;
                    let e = add[a[i * n + j] as usize * qs + t] as u64;
                    b[i * n + j] = e;
                    key = (key << self.bits) | e as u128;
                }
            }
        } else {
            let f = self.f;
            for i in 0..n {
                av[i] = (0..n).fold(0, |s, j| f.add(s, f.mul(a[i * n + j], v[j])));
            }
            for i in 0..n {
                for j in 0..n {
                    b[i * n + j] = f.sub(a[i * n + j], f.mul(av[i], w[j]));
                }
            }
            key = pack(b, self.bits);
        }
        key
    }
}

/// Closure of the identity under right multiplication by reflections.
///
/// The closure is taken over a seeded subset of reflections; afterwards
/// every reflection of `V` is looked up in the result, and any missing one
/// is added to the generating set. The final set is a group containing all
/// reflections, hence all of `O(V)`.
pub fn enumerate_o(v: &OrthSpace, budget: u64) -> Result<GroupTable> {
    let n = v.dim();
    let order = v.group_order();
    if order > BigInt::from(budget) {
        return Err(Error::budget("|O(V)|", order, budget));
    }
    if n > 8 {
        return Err(Error::budget("dimension", n, 8));
    }
    let f = &v.fq;
    let q = v.q();
    let bits = 64 - (q - 1).leading_zeros();
    if bits as usize * n * n > 128 {
        return Err(Error::budget("matrix key bits", bits as usize * n * n, 128));
    }
    // one reflection per anisotropic line: first nonzero coordinate 1
    let mut gens: Vec<(Vec<u64>, Vec<u64>)> = Vec::new();
    let total = q.pow(n as u32);
    for code in 1..total {
        let mut c = code;
        let vec: Vec<u64> = (0..n)
            .map(|_| {
                let d = c % q;
                c /= q;
                d
            })
            .collect();
        if vec.iter().find(|&&x| x != 0) != Some(&1) {
            continue;
        }
        let qv = v.norm(&vec);
        if qv == 0 {
            continue;
        }
        let s = f.div(2, qv);
        let w: Vec<u64> = (0..n).map(|j| f.mul(s, f.mul(v.gram[j], vec[j]))).collect();
        gens.push((vec, w));
    }
    let tables = (q <= 256).then(|| {
        let qs = q as usize;
        let mut add = vec![0u16; qs * qs];
        let mut mul = vec![0u16; qs * qs];
        for x in 0..q {
            for y in 0..q {
                add[(x * q + y) as usize] = f.add(x, y) as u16;
                mul[(x * q + y) as usize] = f.mul(x, y) as u16;
            }
        }
        let neg: Vec<u16> = (0..q).map(|x| f.neg(x) as u16).collect();
        (add, mul, neg)
    });
    let mult = Mult {
        f,
        n,
        qs: q as usize,
        bits,
        tables,
    };
    let nn = n * n;
    let id = OrthElem::identity(n).matrix;
    let mut rng = ChaCha8Rng::seed_from_u64(0x0e7_u64 + q + n as u64);
    let mut chosen: Vec<usize> = (0..gens.len().min(2 * n + 2))
        .map(|_| rng.gen_range(0..gens.len()))
        .collect();
    let mut b = vec![0u64; nn];
    loop {
        chosen.sort_unstable();
        chosen.dedup();
        let mut seen: FxHashSet<u128> = FxHashSet::default();
        seen.insert(pack(&id, bits));
        let mut data = id.clone();
        let mut head = 0usize;
        while head * nn < data.len() {
            for &g in &chosen {
                let (vec, w) = &gens[g];
                let key = mult.apply(&data[head * nn..(head + 1) * nn], vec, w, &mut b);
                if seen.insert(key) {
                    data.extend_from_slice(&b);
                }
            }
            head += 1;
            if seen.len() as u64 > budget {
                return Err(Error::budget("|O(V)|", seen.len(), budget));
            }
        }
        let missing: Vec<usize> = (0..gens.len())
            .filter(|&g| {
                let (vec, w) = &gens[g];
                !seen.contains(&mult.apply(&id, vec, w, &mut b))
            })
            .collect();
        if missing.is_empty() {
            return Ok(GroupTable { n, data });
        }
        chosen.extend(missing.into_iter().take(n + 1));
    }
}

/// Which dimension / linear-factor case a target polynomial belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClassCase {
    /// `N = 2n`, `P = f`.
    Even,
    /// `N = 2n + 2`, `P = (1 - T^2) f`, with spinor class `β` (or both).
    EvenPlusTwo { beta: Option<SquareClass> },
    /// `N = 2n + 1`, `P = (1 - εT) f`.
    Odd { eps: i32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassProportion {
    #[serde(serialize_with = "crate::ser::rational")]
    pub proportion: BigRational,
    pub det: i32,
    /// `None` when both spinor classes are summed.
    pub spin: Option<SquareClass>,
    /// Set when the class is empty for a structural reason.
    pub empty_reason: Option<String>,
}

/// `1/|Cent(A)| = prod 1/(q^{deg h_i} - e_i)` over the irreducible factors of `h`.
pub fn centralizer_weight(fq: &Fq, h: &FqPoly) -> Result<BigRational> {
    let fac = factor(fq, h)?;
    let two = fq.from_i64(2);
    let mut w = BigRational::one();
    for (g, m) in &fac.factors {
        if *m > 1 {
            return Err(Error::NotSeparable);
        }
        let e = fq.chi(fq.mul(fq.poly_eval(g, two), fq.poly_eval(g, fq.neg(two))));
        if e == 0 {
            return Err(Error::BoundaryRoot);
        }
        let qd = BigInt::from(fq.order()).pow(g.deg() as u32);
        w /= BigRational::from_integer(qd - e);
    }
    Ok(w)
}

fn weight_from_signature(q: u64, sig: &[(usize, i32)]) -> BigRational {
    let mut w = BigRational::one();
    for &(d, e) in sig {
        w /= BigRational::from_integer(BigInt::from(q).pow(d as u32) - e);
    }
    w
}

fn signature(fq: &Fq, h: &FqPoly) -> Result<Vec<(usize, i32)>> {
    let fac = factor(fq, h)?;
    let two = fq.from_i64(2);
    let mut sig: Vec<(usize, i32)> = fac
        .factors
        .iter()
        .map(|(g, _)| {
            let e = fq.chi(fq.mul(fq.poly_eval(g, two), fq.poly_eval(g, fq.neg(two))));
            (g.deg(), e)
        })
        .collect();
    sig.sort_unstable();
    Ok(sig)
}

/// `|C| / |O(V)|` for the class of elements with the given characteristic
/// polynomial data, together with the forced `(det, spin)`.
pub fn class_proportion(v: &OrthSpace, f: &FqPoly, case: ClassCase) -> Result<ClassProportion> {
    let fq = v.field();
    if !f.is_monic() {
        return Err(Error::invalid("f must be monic"));
    }
    let h = to_trace_form_fq(fq, f)?;
    let n = h.deg();
    let one = fq.poly_eval(f, 1);
    let mone = fq.poly_eval(f, fq.neg(1));
    if one == 0 || mone == 0 {
        return Err(Error::BoundaryRoot);
    }
    if !fq.poly_is_squarefree(f) {
        return Err(Error::NotSeparable);
    }
    let need = match case {
        ClassCase::Even => 2 * n,
        ClassCase::EvenPlusTwo { .. } => 2 * n + 2,
        ClassCase::Odd { .. } => 2 * n + 1,
    };
    if v.dim() != need {
        return Err(Error::invalid(format!(
            "dimension {} does not match case (needs {need})",
            v.dim()
        )));
    }
    let w = centralizer_weight(fq, &h)?;
    let c1 = fq.square_class(one);
    let cm1 = fq.square_class(mone);
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
    Ok(match case {
        ClassCase::Even => {
            if v.disc() != c1.mul(cm1) {
                ClassProportion {
                    proportion: BigRational::zero(),
                    det: 1,
                    spin: Some(cm1),
                    empty_reason: Some("disc(V) differs from class(f(1)f(-1))".into()),
                }
            } else {
                ClassProportion {
                    proportion: w,
                    det: 1,
                    spin: Some(cm1),
                    empty_reason: None,
                }
            }
        }
        ClassCase::EvenPlusTwo { beta } => match beta {
            Some(b) if b == SquareClass::Zero => return Err(Error::invalid("β must be nonzero")),
            Some(b) => ClassProportion {
                proportion: w * quarter,
                det: -1,
                spin: Some(b),
                empty_reason: None,
            },
            None => ClassProportion {
                proportion: w * half,
                det: -1,
                spin: None,
                empty_reason: None,
            },
        },
        ClassCase::Odd { eps } => {
            if eps.abs() != 1 {
                return Err(Error::invalid("ε must be ±1"));
            }
            let spin = if eps == 1 { cm1 } else { c1.mul(v.disc()) };
            ClassProportion {
                proportion: w * half,
                det: eps,
                spin: Some(spin),
                empty_reason: None,
            }
        }
    })
}

/// Budget for the candidate enumeration in [`c_i_density`].
pub const DENSITY_BUDGET: u64 = 1_000_000;

/// Per-`h` summary used by [`c_i_density`] and its table variant.
#[derive(Clone, Debug)]
struct Candidate {
    classes: Vec<ClassIndex>,
    sig: Vec<(usize, i32)>,
    f1: SquareClass,
    fm1: SquareClass,
}

fn candidates(fq: &Fq, n: usize) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    for h in monic_polys(fq, n) {
        let cls = classify_h(fq, &h);
        if cls.is_empty() {
            continue;
        }
        let f = from_trace_form_fq(fq, &h);
        out.push(Candidate {
            classes: cls.into_iter().collect(),
            sig: signature(fq, &h)?,
            f1: fq.square_class(fq.poly_eval(&f, 1)),
            fm1: fq.square_class(fq.poly_eval(&f, fq.neg(1))),
        });
    }
    Ok(out)
}

/// `|C_i(κ)| / |κ|`, summed exactly over qualifying polynomials.
pub fn c_i_density(v: &OrthSpace, kappa: CosetLabel, i: ClassIndex, budget: u64) -> Result<BigRational> {
    Ok(c_i_density_table(v, kappa, budget)?[(i - 1) as usize].clone())
}

/// Densities for all `i = 1..=6` at once.
pub fn c_i_density_table(v: &OrthSpace, kappa: CosetLabel, budget: u64) -> Result<Vec<BigRational>> {
    let big_n = v.dim();
    if big_n <= 2 {
        return Err(Error::invalid("needs N > 2"));
    }
    if kappa.det.abs() != 1 || kappa.spin == SquareClass::Zero {
        return Err(Error::invalid("bad coset label"));
    }
    let fq = v.field();
    let q = fq.order();
    let n = match (big_n % 2, kappa.det) {
        (1, _) => (big_n - 1) / 2,
        (0, -1) => (big_n - 2) / 2,
        _ => big_n / 2,
    };
    let need = q.checked_pow(n as u32).unwrap_or(u64::MAX);
    if need > budget {
        return Err(Error::budget("candidate polynomials q^n", need, budget));
    }
    let disc = v.disc();
    // multiplier converting sum of |C|/|O| into |C|/|κ| (|κ| = |O|/4)
    let (mult, keep): (i64, Box<dyn Fn(&Candidate) -> bool>) = match (big_n % 2, kappa.det) {
        (1, eps) => (
            2,
            Box::new(move |c: &Candidate| {
                let spin = if eps == 1 { c.fm1 } else { c.f1.mul(disc) };
                spin == kappa.spin
            }),
        ),
        (0, -1) => (1, Box::new(|_: &Candidate| true)),
        _ => (
            4,
            Box::new(move |c: &Candidate| c.f1.mul(c.fm1) == disc && c.fm1 == kappa.spin),
        ),
    };
    let mut buckets: Vec<HashMap<Vec<(usize, i32)>, u64>> = vec![HashMap::new(); 6];
    for c in candidates(fq, n)? {
        if !keep(&c) {
            continue;
        }
        for &i in &c.classes {
            *buckets[(i - 1) as usize].entry(c.sig.clone()).or_default() += 1;
        }
    }
    let mut out = Vec::with_capacity(6);
    for (k, b) in buckets.iter().enumerate() {
        if k == 5 && big_n % 2 == 0 && kappa.det == 1 {
            out.push(BigRational::one());
            continue;
        }
        let mut s = BigRational::zero();
        for (sig, cnt) in b {
            s += weight_from_signature(q, sig) * BigRational::from_integer(BigInt::from(*cnt));
        }
        out.push(s * BigRational::from_integer(BigInt::from(mult)));
    }
    Ok(out)
}

/// Membership of `A` in `C_i(κ)` where `κ` is the coset of `A`.
pub fn in_c_i(v: &OrthSpace, a: &OrthElem, i: ClassIndex) -> bool {
    let fq = v.field();
    let n = v.dim();
    let det = v.det_sign(a);
    if n % 2 == 0 && det == 1 && i == 6 {
        return true;
    }
    let p = v.char_poly(a);
    let divisor = match (n % 2, det) {
        (1, e) => fq.poly_from_i64(&[1, -(e as i64)]),
        (0, -1) => fq.poly_from_i64(&[1, 0, -1]),
        _ => FqPoly::one(),
    };
    let (quo, rem) = fq.poly_divrem(&p, &divisor);
    if !rem.is_zero() {
        return false;
    }
    let (_, f) = fq.poly_monic(&quo);
    if f.deg() == 0 {
        return false;
    }
    match to_trace_form_fq(fq, &f) {
        Ok(h) => classify_h(fq, &h).contains(&i),
        Err(_) => false,
    }
}
