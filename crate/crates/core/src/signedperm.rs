//! Hyperoctahedral groups `W_{2n}` (signed permutations of `±e_1..±e_n`)
//! and `W_{2n}^+ = ker ε₁`: invariants, enumeration, cycle statistics and
//! the five-witness generation criterion.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};

/// `e_i ↦ signs[i] · e_{perm[i]}` (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SignedPerm {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Invariants {
    pub eps1: i32,
    pub eps2: i32,
    /// Cycle lengths on the `2n` points `±e_i`, sorted.
    pub cycle_type_x: Vec<usize>,
    /// Cycle lengths of `φ(g)` on the `n` pairs, sorted.
    pub cycle_type_pairs: Vec<usize>,
}

/// Joint type used for Chebotarev comparisons.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct JointType {
    pub x: Vec<usize>,
    pub pairs: Vec<usize>,
    pub eps1: i32,
}

impl fmt::Display for SignedPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .perm
            .iter()
            .zip(&self.signs)
            .map(|(p, s)| format!("{}{}", if *s < 0 { "-" } else { "" }, p + 1))
            .collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

fn cycle_lengths(map: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; map.len()];
    let mut out = Vec::new();
    for s in 0..map.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = map[x];
            len += 1;
        }
        out.push(len);
    }
    out.sort_unstable();
    out
}

fn sign_of(cycles: &[usize]) -> i32 {
    if cycles.iter().map(|l| l - 1).sum::<usize>() % 2 == 0 {
        1
    } else {
        -1
    }
}

impl SignedPerm {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<SignedPerm> {
        let n = perm.len();
        if signs.len() != n || signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::invalid("signs must be ±1, one per coordinate"));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::invalid("not a permutation"));
            }
            seen[p] = true;
        }
        Ok(SignedPerm { perm, signs })
    }

    pub fn identity(n: usize) -> SignedPerm {
        SignedPerm {
            perm: (0..n).collect(),
            signs: vec![1; n],
        }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SignedPerm) -> SignedPerm {
        let n = self.n();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for i in 0..n {
            let j = other.perm[i];
            perm[i] = self.perm[j];
            signs[i] = other.signs[i] * self.signs[j];
        }
        SignedPerm { perm, signs }
    }

    pub fn inverse(&self) -> SignedPerm {
        let n = self.n();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for i in 0..n {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        SignedPerm { perm, signs }
    }

    pub fn pow(&self, k: usize) -> SignedPerm {
        let mut acc = SignedPerm::identity(self.n());
        for _ in 0..k {
            acc = self.compose(&acc);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| p == i) && self.signs.iter().all(|&s| s == 1)
    }

    /// Action on `X`, point `2i` is `e_i` and `2i+1` is `-e_i`.
    pub fn on_x(&self) -> Vec<usize> {
        let n = self.n();
        let mut m = vec![0; 2 * n];
        for i in 0..n {
            let flip = usize::from(self.signs[i] < 0);
            m[2 * i] = 2 * self.perm[i] + flip;
            m[2 * i + 1] = 2 * self.perm[i] + (1 - flip);
        }
        m
    }

    pub fn invariants(&self) -> Invariants {
        let cx = cycle_lengths(&self.on_x());
        let cp = cycle_lengths(&self.perm);
        Invariants {
            eps1: sign_of(&cx),
            eps2: sign_of(&cp),
            cycle_type_x: cx,
            cycle_type_pairs: cp,
        }
    }

    pub fn eps1(&self) -> i32 {
        sign_of(&cycle_lengths(&self.on_x()))
    }

    pub fn eps2(&self) -> i32 {
        sign_of(&cycle_lengths(&self.perm))
    }

    /// Order of the element.
    pub fn order(&self) -> usize {
        cycle_lengths(&self.on_x())
            .into_iter()
            .fold(1, |a, l| num_integer::lcm(a, l))
    }

    /// Compact code for hashing (valid for `n ≤ 12`).
    pub fn code(&self) -> u64 {
        let mut c = 0u64;
        for i in 0..self.n() {
            c = c * 16 + self.perm[i] as u64;
        }
        for &s in &self.signs {
            c = c * 2 + u64::from(s < 0);
        }
        c
    }

    /// The signed permutation matrix (`2n`-point view is [`SignedPerm::on_x`]).
    pub fn matrix(&self) -> Vec<Vec<i8>> {
        let n = self.n();
        let mut m = vec![vec![0i8; n]; n];
        for i in 0..n {
            m[self.perm[i]][i] = self.signs[i];
        }
        m
    }
}

/// Which bullet of the criterion a witness satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum WitnessRole {
    /// `φ(g)` is an `n`-cycle.
    NCycle,
    /// `φ(g)` is a `p`-cycle, `p` prime, `p > n/2`.
    PrimeCycle,
    /// `φ(g)` is a transposition.
    Transposition,
    /// `φ(g) = 1` and `g` is one or two disjoint transpositions of `X`.
    SignFlips,
    /// `ε₁(g) ε₂(g) = -1`.
    Parity,
}

impl WitnessRole {
    pub const ALL: [WitnessRole; 5] = [
        WitnessRole::NCycle,
        WitnessRole::PrimeCycle,
        WitnessRole::Transposition,
        WitnessRole::SignFlips,
        WitnessRole::Parity,
    ];

    pub fn index(self) -> usize {
        self as usize + 1
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Does `g` itself (not a power) satisfy the bullet?
pub fn satisfies(g: &SignedPerm, role: WitnessRole) -> bool {
    let n = g.n();
    let inv = g.invariants();
    let nontrivial: Vec<usize> = inv
        .cycle_type_pairs
        .iter()
        .copied()
        .filter(|&l| l > 1)
        .collect();
    match role {
        WitnessRole::NCycle => inv.cycle_type_pairs == [n],
        WitnessRole::PrimeCycle => {
            nontrivial.len() == 1 && is_prime(nontrivial[0]) && 2 * nontrivial[0] > n
        }
        WitnessRole::Transposition => nontrivial == [2],
        WitnessRole::SignFlips => {
            let flips = g.signs.iter().filter(|&&s| s < 0).count();
            nontrivial.is_empty() && (flips == 1 || flips == 2)
        }
        WitnessRole::Parity => inv.eps1 * inv.eps2 == -1,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessSet {
    /// `(role, element)`, one per role, in role order.
    pub witnesses: Vec<(WitnessRole, SignedPerm)>,
}

impl WitnessSet {
    /// Every witness satisfies its bullet.
    pub fn verify(&self) -> bool {
        self.witnesses.len() == 5
            && self
                .witnesses
                .iter()
                .zip(WitnessRole::ALL)
                .all(|((r, g), want)| *r == want && satisfies(g, *r))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum BrauerResult {
    BigWithWitnesses(WitnessSet),
    Inconclusive { missing: Vec<WitnessRole> },
}

impl BrauerResult {
    pub fn is_big(&self) -> bool {
        matches!(self, BrauerResult::BigWithWitnesses(_))
    }
}

/// Incremental witness collector; elements (and their powers) are fed one
/// at a time.
#[derive(Clone, Debug)]
pub struct WitnessScanner {
    n: usize,
    found: [Option<SignedPerm>; 5],
}

impl WitnessScanner {
    pub fn new(n: usize) -> Result<WitnessScanner> {
        if n < 2 {
            return Err(Error::invalid("criterion needs n ≥ 2"));
        }
        Ok(WitnessScanner {
            n,
            found: Default::default(),
        })
    }

    /// Offer `g`; all its powers are examined. Returns the newly filled roles.
    pub fn offer(&mut self, g: &SignedPerm) -> Vec<WitnessRole> {
        assert_eq!(g.n(), self.n);
        let mut new = Vec::new();
        if self.done() {
            return new;
        }
        let ord = g.order();
        let mut x = g.clone();
        for _ in 1..=ord {
            for role in WitnessRole::ALL {
                let slot = &mut self.found[role as usize];
                if slot.is_none() && satisfies(&x, role) {
                    *slot = Some(x.clone());
                    new.push(role);
                }
            }
            x = g.compose(&x);
        }
        new
    }

    pub fn done(&self) -> bool {
        self.found.iter().all(Option::is_some)
    }

    pub fn result(&self) -> BrauerResult {
        if self.done() {
            BrauerResult::BigWithWitnesses(WitnessSet {
                witnesses: WitnessRole::ALL
                    .iter()
                    .map(|&r| (r, self.found[r as usize].clone().unwrap()))
                    .collect(),
            })
        } else {
            BrauerResult::Inconclusive {
                missing: WitnessRole::ALL
                    .iter()
                    .copied()
                    .filter(|&r| self.found[r as usize].is_none())
                    .collect(),
            }
        }
    }
}

/// Default element budget for closures and enumerations.
pub const W_BUDGET: usize = 10_000_000;

/// Subgroup generated by `gens` (breadth-first closure).
pub fn closure(gens: &[SignedPerm], budget: usize) -> Result<Vec<SignedPerm>> {
    let Some(first) = gens.first() else {
        return Err(Error::invalid("no generators"));
    };
    let n = first.n();
    if gens.iter().any(|g| g.n() != n) {
        return Err(Error::invalid("generators of different degree"));
    }
    let id = SignedPerm::identity(n);
    let mut seen: HashSet<u64> = HashSet::new();
    seen.insert(id.code());
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.compose(&x);
            if seen.insert(y.code()) {
                if out.len() >= budget {
                    return Err(Error::budget("subgroup order", out.len() + 1, budget));
                }
                out.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(out)
}

/// Closure mode: generate the subgroup and search it exhaustively.
pub fn check_brauer_criterion(gens: &[SignedPerm]) -> Result<BrauerResult> {
    let n = gens.first().map_or(0, SignedPerm::n);
    let mut sc = WitnessScanner::new(n)?;
    for g in closure(gens, W_BUDGET)? {
        sc.offer(&g);
        if sc.done() {
            break;
        }
    }
    Ok(sc.result())
}

/// Streaming mode: scan a supplied sample (and powers of each element).
pub fn check_brauer_stream<'a>(
    n: usize,
    sample: impl IntoIterator<Item = &'a SignedPerm>,
) -> Result<BrauerResult> {
    let mut sc = WitnessScanner::new(n)?;
    for g in sample {
        sc.offer(g);
        if sc.done() {
            break;
        }
    }
    Ok(sc.result())
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

pub fn w_order(n: usize, plus: bool) -> usize {
    let full = (1usize << n) * factorial(n);
    if plus && n >= 1 {
        full / 2
    } else {
        full
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    // Heap's algorithm
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = vec![a.clone()];
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// All of `W_{2n}` (or `W_{2n}^+`).
pub fn enumerate_w(n: usize, plus: bool) -> Result<Vec<SignedPerm>> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let size = (1u128 << n) * (1..=n as u128).product::<u128>();
    if size > W_BUDGET as u128 {
        return Err(Error::budget("|W_2n|", size, W_BUDGET));
    }
    let mut out = Vec::with_capacity(size as usize);
    for p in permutations(n) {
        for mask in 0..(1u32 << n) {
            let signs: Vec<i8> = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            let g = SignedPerm {
                perm: p.clone(),
                signs,
            };
            if !plus || g.eps1() == 1 {
                out.push(g);
            }
        }
    }
    debug_assert_eq!(out.len(), w_order(n, plus));
    Ok(out)
}

/// Exact frequencies of each joint cycle type.
pub fn class_statistics(n: usize, plus: bool) -> Result<BTreeMap<JointType, BigRational>> {
    let elems = enumerate_w(n, plus)?;
    let total = BigInt::from(elems.len());
    let mut counts: BTreeMap<JointType, u64> = BTreeMap::new();
    for g in &elems {
        let inv = g.invariants();
        *counts
            .entry(JointType {
                x: inv.cycle_type_x,
                pairs: inv.cycle_type_pairs,
                eps1: inv.eps1,
            })
            .or_default() += 1;
    }
    Ok(counts
        .into_iter()
        .map(|(k, c)| (k, BigRational::new(BigInt::from(c), total.clone())))
        .collect())
}
