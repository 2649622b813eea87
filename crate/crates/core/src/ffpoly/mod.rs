//! Exact arithmetic over finite fields of odd characteristic, polynomials
//! over `F_q`, `Z` and `Q`, factorization, resultants and discriminants.

mod factor;
mod field;
mod intpoly;
mod poly;

pub use factor::{
    distinct_degree, equal_degree, factor, factor_seeded, is_irreducible,
    squarefree_decomposition, squarefree_factor_degrees, Factorization, DEFAULT_SEED,
};
pub use field::{is_perfect_square, Fq, SquareClass, MAX_EXT_ORDER, MAX_PRIME};
pub use field::is_prime_u64;
pub use intpoly::{
    det_bareiss, disc_and_resultant, discriminant, parse_coeffs, parse_rational,
    rational_to_string, resultant, resultant_sylvester, squarefree_part, sylvester_matrix,
    IntPoly, PolyJson, RatPoly,
};
pub use poly::FqPoly;

/// Square class of an element (convenience wrapper over [`Fq::square_class`]).
pub fn square_class(fq: &Fq, a: u64) -> SquareClass {
    fq.square_class(a)
}

/// Odd primes in `[lo, hi]`, increasing.
pub fn odd_primes(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 3 {
        return vec![];
    }
    let n = hi as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    if n >= 1 {
        sieve[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (lo.max(3)..=hi).filter(|&p| sieve[p as usize]).collect()
}
