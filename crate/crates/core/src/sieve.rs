//! A general Selberg sieve with the optimal weights, exact finite test
//! spaces, and coset-product density experiments over `O(V_ℓ)`.
//!
//! Subsets of `Λ` are bitmasks (`Λ` has at most 63 elements).

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffpoly::{Fq, SquareClass};
use crate::orthfin::{c_i_density, c_i_density_table, CosetLabel, OrthSpace};
use crate::recpoly::ClassIndex;

pub type Subset = u64;

const MAX_LAMBDA: usize = 63;
/// Largest support for which `Δ` is also evaluated from the double sum.
pub const DIRECT_DELTA_LIMIT: usize = 512;

/// Remainders `r_D` in `μ(A_D) = ω_D X + r_D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Remainders {
    Zero,
    /// Missing subsets count as `r_D = 0`.
    Table(BTreeMap<Subset, BigRational>),
}

impl Remainders {
    pub fn get(&self, d: Subset) -> BigRational {
        match self {
            Remainders::Zero => BigRational::zero(),
            Remainders::Table(t) => t.get(&d).cloned().unwrap_or_else(BigRational::zero),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveProblem {
    pub labels: Vec<String>,
    pub omegas: Vec<BigRational>,
    pub x: BigRational,
    pub remainders: Remainders,
    /// Sorted, duplicate-free, downward closed.
    pub support: Vec<Subset>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SieveResult {
    #[serde(serialize_with = "crate::ser::rational")]
    pub h: BigRational,
    /// `None` is the trivial bound `+∞` (`H = 0`).
    #[serde(serialize_with = "crate::ser::rational_opt")]
    pub bound: Option<BigRational>,
    #[serde(serialize_with = "crate::ser::rational_opt")]
    pub main_term: Option<BigRational>,
    #[serde(serialize_with = "crate::ser::rational")]
    pub error_term: BigRational,
    #[serde(skip)]
    pub lambdas: BTreeMap<Subset, BigRational>,
    #[serde(skip)]
    pub xis: BTreeMap<Subset, BigRational>,
    /// `Δ` from the quadratic form in the `ξ_E`.
    #[serde(serialize_with = "crate::ser::rational_opt")]
    pub delta: Option<BigRational>,
    /// `Δ = Σ ω_{D∪D'} λ_D λ_{D'}`, when the support is small enough.
    #[serde(serialize_with = "crate::ser::rational_opt")]
    pub delta_direct: Option<BigRational>,
}

fn members(d: Subset) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| d >> i & 1 == 1)
}

pub fn is_downward_closed(support: &[Subset]) -> bool {
    let set: BTreeSet<Subset> = support.iter().copied().collect();
    set.iter()
        .all(|&d| members(d).all(|i| set.contains(&(d & !(1u64 << i)))))
}

/// Every subset of `Λ = {0, …, k-1}`.
pub fn support_powerset(k: usize) -> Result<Vec<Subset>> {
    if k > 20 {
        return Err(Error::budget("power-set support", format!("2^{k}"), "2^20"));
    }
    Ok((0..1u64 << k).collect())
}

/// Subsets `D` with `∏_{λ∈D} w_λ ≤ q`, e.g. sets of primes with bounded product.
pub fn support_smooth(weights: &[u64], q: u64) -> Vec<Subset> {
    let mut out = vec![0u64];
    for (i, &w) in weights.iter().enumerate() {
        let prods: Vec<(Subset, u64)> = out.iter().map(|&d| (d, product(weights, d))).collect();
        for (d, p) in prods {
            if let Some(np) = p.checked_mul(w) {
                if np <= q {
                    out.push(d | 1 << i);
                }
            }
        }
    }
    out.sort_unstable();
    out
}

fn product(weights: &[u64], d: Subset) -> u64 {
    members(d).map(|i| weights[i]).product()
}

impl SieveProblem {
    pub fn new(
        labels: Vec<String>,
        omegas: Vec<BigRational>,
        x: BigRational,
        remainders: Remainders,
        support: Vec<Subset>,
    ) -> Result<SieveProblem> {
        if labels.len() != omegas.len() {
            return Err(Error::invalid("one density per element of Λ"));
        }
        if omegas.len() > MAX_LAMBDA {
            return Err(Error::invalid(format!("|Λ| ≤ {MAX_LAMBDA}")));
        }
        if omegas
            .iter()
            .any(|w| !w.is_positive() || *w >= BigRational::one())
        {
            return Err(Error::invalid("densities must lie in (0, 1)"));
        }
        if x.is_negative() {
            return Err(Error::invalid("X must be nonnegative"));
        }
        let full = if omegas.len() == 64 { u64::MAX } else { (1u64 << omegas.len()) - 1 };
        let mut support = support;
        support.sort_unstable();
        support.dedup();
        if support.iter().any(|d| d & !full != 0) {
            return Err(Error::invalid("support mentions indices outside Λ"));
        }
        if !is_downward_closed(&support) {
            return Err(Error::invalid("support is not downward closed"));
        }
        Ok(SieveProblem {
            labels,
            omegas,
            x,
            remainders,
            support,
        })
    }

    pub fn omega(&self, d: Subset) -> BigRational {
        members(d).fold(BigRational::one(), |acc, i| acc * &self.omegas[i])
    }

    /// `∏_{λ∈D} ω_λ / (1 - ω_λ)`.
    pub fn g(&self, d: Subset) -> BigRational {
        members(d).fold(BigRational::one(), |acc, i| {
            let w = &self.omegas[i];
            acc * w / (BigRational::one() - w)
        })
    }
}

/// The Selberg bound `μ(S) ≤ X/H + Σ_{D,D'∈𝒵} |r_{D∪D'}|` with the optimal
/// weights.
pub fn selberg_bound(p: &SieveProblem) -> Result<SieveResult> {
    if !is_downward_closed(&p.support) {
        return Err(Error::invalid("support is not downward closed"));
    }
    let gs: Vec<BigRational> = p.support.iter().map(|&d| p.g(d)).collect();
    let h: BigRational = gs.iter().cloned().sum();

    let error_term: BigRational = match &p.remainders {
        Remainders::Zero => BigRational::zero(),
        r => p
            .support
            .par_iter()
            .map(|&d| {
                p.support
                    .iter()
                    .map(|&e| r.get(d | e).abs())
                    .fold(BigRational::zero(), |a, b| a + b)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .sum(),
    };

    if h.is_zero() {
        return Ok(SieveResult {
            h,
            bound: None,
            main_term: None,
            error_term,
            lambdas: BTreeMap::new(),
            xis: BTreeMap::new(),
            delta: None,
            delta_direct: None,
        });
    }

    let hinv = BigRational::one() / &h;
    let mut xis = BTreeMap::new();
    for (&e, g) in p.support.iter().zip(&gs) {
        xis.insert(e, g * &hinv);
    }
    let mut lambdas = BTreeMap::new();
    for &d in &p.support {
        let tail: BigRational = p
            .support
            .iter()
            .zip(&gs)
            .filter(|(&e, _)| e & d == d)
            .map(|(_, g)| g.clone())
            .sum();
        let sign = if d.count_ones() % 2 == 0 { 1 } else { -1 };
        let l = tail * &hinv / p.omega(d) * BigRational::from_integer(BigInt::from(sign));
        lambdas.insert(d, l);
    }

    let delta: BigRational = p
        .support
        .iter()
        .map(|&e| {
            let inv_g = BigRational::one() / p.g(e);
            let xi = &xis[&e];
            inv_g * xi * xi
        })
        .sum();

    let delta_direct = (p.support.len() <= DIRECT_DELTA_LIMIT).then(|| {
        let mut acc = BigRational::zero();
        for &d in &p.support {
            for &e in &p.support {
                acc += p.omega(d | e) * &lambdas[&d] * &lambdas[&e];
            }
        }
        acc
    });

    let main = &p.x / &h;
    Ok(SieveResult {
        bound: Some(&main + &error_term),
        main_term: Some(main),
        h,
        error_term,
        lambdas,
        xis,
        delta: Some(delta),
        delta_direct,
    })
}

/// A finite weighted set; `membership[a]` is the set of `λ` with `a ∈ A_λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpace {
    pub lambda_count: usize,
    pub weights: Vec<BigRational>,
    pub membership: Vec<Subset>,
}

impl FiniteSpace {
    pub fn measure(&self) -> BigRational {
        self.weights.iter().cloned().sum()
    }

    /// `μ(A_D)`, with `A_∅ = A`.
    pub fn measure_of(&self, d: Subset) -> BigRational {
        self.weights
            .iter()
            .zip(&self.membership)
            .filter(|(_, &m)| m & d == d)
            .map(|(w, _)| w.clone())
            .sum()
    }

    /// `μ(A_λ) / μ(A)`, i.e. the natural densities with `X = μ(A)`.
    pub fn natural_omegas(&self) -> Vec<BigRational> {
        let total = self.measure();
        (0..self.lambda_count)
            .map(|i| self.measure_of(1 << i) / &total)
            .collect()
    }

    /// Total weight per membership pattern.
    fn by_pattern(&self) -> BTreeMap<Subset, BigRational> {
        let mut agg: BTreeMap<Subset, BigRational> = BTreeMap::new();
        for (w, &m) in self.weights.iter().zip(&self.membership) {
            *agg.entry(m).or_insert_with(BigRational::zero) += w;
        }
        agg
    }

    /// Exact `r_D = μ(A_D) - ω_D X` for every `D ⊆ Λ`.
    pub fn remainders(&self, omegas: &[BigRational], x: &BigRational) -> Remainders {
        let agg = self.by_pattern();
        let mut t = BTreeMap::new();
        for d in 0..1u64 << self.lambda_count {
            let w = members(d).fold(BigRational::one(), |acc, i| acc * &omegas[i]);
            let mu: BigRational = agg
                .iter()
                .filter(|(&m, _)| m & d == d)
                .map(|(_, w)| w.clone())
                .sum();
            let r = mu - w * x;
            if !r.is_zero() {
                t.insert(d, r);
            }
        }
        Remainders::Table(t)
    }

    /// The sieve problem with the given densities, `X = μ(A)` and exact
    /// remainders.
    pub fn problem(&self, omegas: Vec<BigRational>, support: Vec<Subset>) -> Result<SieveProblem> {
        let x = self.measure();
        let rem = self.remainders(&omegas, &x);
        let labels = (0..self.lambda_count).map(|i| i.to_string()).collect();
        SieveProblem::new(labels, omegas, x, rem, support)
    }
}

/// `μ(S)` for `S = A - ∪ A_λ`.
pub fn exact_mu_s(space: &FiniteSpace) -> BigRational {
    space
        .weights
        .iter()
        .zip(&space.membership)
        .filter(|(_, &m)| m == 0)
        .map(|(w, _)| w.clone())
        .sum()
}

/// The remainder model `(∏_{ℓ∈D} ℓ)^{N(N-1)/4} (2g + b) q^{1/2}`, taken as
/// given; nothing in this crate proves it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnverifiedRemainderModel {
    pub big_n: usize,
    pub genus: u64,
    pub punctures: u64,
    pub q: u64,
}

impl UnverifiedRemainderModel {
    pub const LABEL: &'static str = "unverified model";

    pub fn bound(&self, primes: &[u64]) -> f64 {
        let e = (self.big_n * (self.big_n - 1)) as f64 / 4.0;
        let prod: f64 = primes.iter().map(|&l| (l as f64).powf(e)).product();
        prod * (2 * self.genus + self.punctures) as f64 * (self.q as f64).sqrt()
    }

    /// `Σ_{D,D'∈𝒵} model(D ∪ D')` for a support over the given primes.
    pub fn error_term(&self, primes: &[u64], support: &[Subset]) -> f64 {
        let mut acc = 0.0;
        for &d in support {
            for &e in support {
                let ps: Vec<u64> = members(d | e).map(|i| primes[i]).collect();
                acc += self.bound(&ps);
            }
        }
        acc
    }
}

/// One prime of a density experiment: `V_ℓ` of dimension `N` and
/// discriminant `disc`, and the coset `κ_ℓ` drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SieveCell {
    pub ell: u64,
    pub disc: SquareClass,
    pub label: CosetLabel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityExperiment {
    pub big_n: usize,
    pub class: ClassIndex,
    #[serde(serialize_with = "crate::ser::rationals")]
    pub densities: Vec<BigRational>,
    /// `∏ (1 - density_ℓ)`.
    #[serde(serialize_with = "crate::ser::rational")]
    pub miss: BigRational,
    /// `(1 - c/N²)^{|D|}` for the supplied `c`.
    #[serde(serialize_with = "crate::ser::rational_opt")]
    pub reference: Option<BigRational>,
    pub within_reference: Option<bool>,
}

/// Probability that independent uniform draws from each `κ_ℓ` all miss
/// `C_i(V_ℓ)`.
pub fn density_experiment(
    big_n: usize,
    cells: &[SieveCell],
    i: ClassIndex,
    c: Option<&BigRational>,
    budget: u64,
) -> Result<DensityExperiment> {
    let mut densities = Vec::with_capacity(cells.len());
    for cell in cells {
        let fq = Fq::prime(cell.ell)?;
        let v = OrthSpace::new(&fq, big_n, cell.disc)?;
        densities.push(c_i_density(&v, cell.label, i, budget)?);
    }
    let miss = densities
        .iter()
        .fold(BigRational::one(), |acc, d| acc * (BigRational::one() - d));
    let reference = c.map(|c| {
        let n2 = BigRational::from_integer(BigInt::from(big_n * big_n));
        let base = BigRational::one() - c / n2;
        (0..cells.len()).fold(BigRational::one(), |acc, _| acc * &base)
    });
    let within_reference = reference.as_ref().map(|r| miss <= *r);
    Ok(DensityExperiment {
        big_n,
        class: i,
        densities,
        miss,
        reference,
        within_reference,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PositivityRow {
    pub ell: u64,
    pub big_n: usize,
    pub disc: SquareClass,
    pub label: CosetLabel,
    pub class: ClassIndex,
    #[serde(serialize_with = "crate::ser::rational")]
    pub density: BigRational,
    /// `N² · density`.
    #[serde(serialize_with = "crate::ser::rational")]
    pub scaled: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PositivityTable {
    pub rows: Vec<PositivityRow>,
    /// Minimum of `N² · density` over the grid.
    #[serde(serialize_with = "crate::ser::rational")]
    pub c2: BigRational,
    pub argmin: usize,
}

/// Scan `N² |C_i(V_ℓ) ∩ κ| / |κ|` over primes, dimensions, both
/// discriminants, the four cosets and `i = 1..=6`.
pub fn prop15_scan(ells: &[u64], ns: &[usize], budget: u64) -> Result<PositivityTable> {
    let mut cells = Vec::new();
    for &ell in ells {
        for &big_n in ns {
            for disc in [SquareClass::Square, SquareClass::NonSquare] {
                for label in CosetLabel::all() {
                    cells.push((ell, big_n, disc, label));
                }
            }
        }
    }
    let tables: Vec<Result<Vec<BigRational>>> = cells
        .par_iter()
        .map(|&(ell, big_n, disc, label)| {
            let fq = Fq::prime(ell)?;
            let v = OrthSpace::new(&fq, big_n, disc)?;
            c_i_density_table(&v, label, budget)
        })
        .collect();
    let mut rows = Vec::new();
    for (&(ell, big_n, disc, label), t) in cells.iter().zip(tables) {
        let n2 = BigRational::from_integer(BigInt::from(big_n * big_n));
        for (k, density) in t?.into_iter().enumerate() {
            rows.push(PositivityRow {
                ell,
                big_n,
                disc,
                label,
                class: k as ClassIndex + 1,
                scaled: &density * &n2,
                density,
            });
        }
    }
    if rows.is_empty() {
        return Err(Error::invalid("empty grid"));
    }
    let (argmin, c2) = rows
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.scaled.cmp(&b.1.scaled))
        .map(|(k, r)| (k, r.scaled.clone()))
        .expect("nonempty");
    Ok(PositivityTable { rows, c2, argmin })
}
